//! Dirichlet Green function of `(-Δ)^m` on the unit ball of `R^{2m}` (Boggio's formula).
//!
//! `G(x, ξ) = κ ∫_1^{A} (v² - 1)^{m-1} v^{1-2m} dv` with `A = [XY]/|x - ξ|`; after
//! `v = e^t` the integral is `log A + P(A)`, `P(A) = ∫_0^{log A} [(1 - e^{-2t})^{m-1} - 1] dt`.

use crate::error::{Error, Result};
use crate::quadrature;
use crate::scalar::{dist2, dot, norm2, Real};

pub const MAX_ORDER: u32 = 3;

#[derive(Debug, Clone)]
pub struct Boggio {
    pub m: u32,
    /// Leading constant, calibrated so that `G ~ 4m log(1/|x - ξ|)`.
    pub kappa: f64,
    /// `P(∞)`.
    pub p_inf: f64,
}

/// `P(A)` by adaptive quadrature.
pub fn profile_correction(m: u32, a: f64) -> Result<f64> {
    if m == 1 || a <= 1.0 {
        return Ok(0.0);
    }
    let f = |t: f64| (1.0 - (-2.0 * t).exp()).powi(m as i32 - 1) - 1.0;
    let upper = a.ln();
    if upper.is_infinite() {
        return Ok(quadrature::integrate_semi_infinite(f, 0.0, 1e-14, 1e-13)?.value);
    }
    Ok(quadrature::integrate(f, 0.0, upper, 1e-14, 1e-13)?.value)
}

/// Closed form `P(A) = Σ_{j=1}^{m-1} (-1)^j C(m-1, j) (1 - A^{-2j}) / (2j)` (used as an oracle).
pub fn profile_correction_closed<T: Real>(m: u32, a: T) -> T {
    let mut s = T::zero();
    let mut binom = T::one();
    for j in 1..m {
        binom = binom * T::from_usize_lossy((m - j) as usize) / T::from_usize_lossy(j as usize);
        let sign = if j % 2 == 1 { -T::one() } else { T::one() };
        let two_j = T::from_usize_lossy(2 * j as usize);
        s = s + sign * binom * (T::one() - a.powi(-2 * j as i32)) / two_j;
    }
    s
}

impl Boggio {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidOrder(0));
        }
        if m > MAX_ORDER {
            return Err(Error::Unsupported(format!("Boggio kernel implemented for m <= {MAX_ORDER}")));
        }
        // slope of the raw profile integral against log(1/r) at ξ = 0, x → 0
        let raw = |r: f64| -> Result<f64> {
            let a = 1.0 / r;
            Ok(a.ln() + profile_correction(m, a)?)
        };
        let (r1, r2) = (1e-6, 1e-7);
        let slope = (raw(r2)? - raw(r1)?) / ((1.0 / r2).ln() - (1.0 / r1).ln());
        let kappa = 4.0 * m as f64 / slope;
        let p_inf = profile_correction(m, f64::INFINITY)?;
        Ok(Self { m, kappa, p_inf })
    }

    fn xy(x: &[f64], xi: &[f64]) -> f64 {
        (norm2(x) * norm2(xi) - 2.0 * dot(x, xi) + 1.0).max(0.0).sqrt()
    }

    pub fn green(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        let d = dist2(x, xi).sqrt();
        let xy = Self::xy(x, xi);
        let a = xy / d;
        Ok(self.kappa * (a.ln() + profile_correction(self.m, a)?))
    }

    pub fn regular(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        let d = dist2(x, xi).sqrt();
        let xy = Self::xy(x, xi);
        let p = if d == 0.0 { self.p_inf } else { profile_correction(self.m, xy / d)? };
        Ok(self.kappa * (xy.ln() + p))
    }

    pub fn robin(&self, xi: &[f64]) -> f64 {
        self.kappa * ((1.0 - norm2(xi)).ln() + self.p_inf)
    }

    pub fn robin_gradient(&self, xi: &[f64]) -> Vec<f64> {
        let s = -2.0 * self.kappa / (1.0 - norm2(xi));
        xi.iter().map(|v| s * v).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_is_4m() {
        for m in 1..=3 {
            let b = Boggio::new(m).unwrap();
            assert!((b.kappa - 4.0 * m as f64).abs() < 1e-6, "m={m} {}", b.kappa);
        }
    }

    #[test]
    fn profile_matches_closed_form() {
        for m in 1..=3 {
            for a in [1.0, 1.3, 4.0, 1e3] {
                let q = profile_correction(m, a).unwrap();
                let c: f64 = profile_correction_closed(m, a);
                assert!((q - c).abs() < 1e-12, "m={m} a={a}");
            }
        }
    }

    #[test]
    fn biharmonic_radial_value() {
        // ξ = 0, m = 2: G = 8 log(1/r) - 4 + 4 r²
        let b = Boggio::new(2).unwrap();
        let r: f64 = 0.3;
        let g = b.green(&[r, 0.0, 0.0, 0.0], &[0.0; 4]).unwrap();
        let exact = 8.0 * (1.0 / r).ln() - 4.0 + 4.0 * r * r;
        assert!((g - exact).abs() < 1e-9 * exact.abs());
    }
}
