//! Navier Green function of `Δ²` on the unit ball of `R⁴`:
//! `G_N = G_D + D`, where `G_D` is the Dirichlet (Boggio) kernel and `D` is the
//! biharmonic correction `D = Σ_l 16 (l+1) U_l(cos γ) I_l(|ξ|) |x|^l (1 - |x|²)`,
//! obtained by matching the normal derivative of the iterated Laplace kernel.
//! `U_l` are Chebyshev polynomials of the second kind (zonal harmonics of `S³`).

use super::boggio::Boggio;
use crate::error::{Error, Result};
use crate::scalar::{dot, norm2};

#[derive(Debug, Clone)]
pub struct NavierBall {
    dirichlet: Boggio,
    /// Minimum number of modes summed.
    pub min_degree: usize,
    /// Hard limit; exceeding it without meeting `tol` is an error.
    pub max_degree: usize,
    pub tol: f64,
}

/// `I_l(s) = -∂_r F_l(1, s)` of the mode-`l` iterated kernel.
fn mode_weight(l: usize, s: f64) -> f64 {
    let lf = l as f64;
    let a = 2.0 * lf + 4.0;
    let b = 2.0 * lf + 2.0;
    let sl = s.powi(l as i32);
    let s2 = s * s;
    (sl * s2 - sl * s2 * s.powi(2 * l as i32 + 2)) / (a * b)
        + sl / b * ((1.0 - s2) / 2.0 - (1.0 - s.powi(2 * l as i32 + 4)) / a)
}

/// Mode `l` of the iterated kernel `∫ g_l(r,t) g_l(t,s) t³ dt` times `(2l+2)²`,
/// written in a form free of cancellation (`a ≤ b`).
pub fn iterated_mode(l: usize, r: f64, s: f64) -> f64 {
    let (a, b) = if r <= s { (r, s) } else { (s, r) };
    let lf = l as f64;
    let c = 2.0 * lf + 4.0;
    let q = if b > 0.0 { a / b } else { 0.0 };
    let ql = q.powi(l as i32);
    let first = (1.0 - a.powi(2 * l as i32 + 2)) * (1.0 - b.powi(2 * l as i32 + 2)) * ql * q * q / c;
    let middle = ql
        * (1.0 - b.powi(2 * l as i32 + 2))
        * ((1.0 - q * q) / 2.0 - (b.powi(2 * l as i32 + 2) - a.powi(2 * l as i32 + 4) / (b * b)) / c);
    let head = if l == 0 { -b.ln() } else { ql * (1.0 - b.powi(2 * l as i32)) / (2.0 * lf) };
    let last = head + (a * b).powi(l as i32) * (-(1.0 - b * b) + (1.0 - b.powi(2 * l as i32 + 4)) / c);
    first + middle + last
}

/// Truncated mode sum `8 Σ_{l<L} U_l(cos γ) iterated_mode(l) / (l+1)` (slowly convergent
/// near the diagonal; used as an independent check of the production formula).
pub fn iterated_series(x: &[f64], xi: &[f64], degree: usize) -> f64 {
    let (r, s) = (norm2(x).sqrt(), norm2(xi).sqrt());
    let c = if r > 0.0 && s > 0.0 { (dot(x, xi) / (r * s)).clamp(-1.0, 1.0) } else { 0.0 };
    let (mut u0, mut u1) = (1.0, 2.0 * c);
    let mut sum = 0.0;
    for l in 0..degree {
        let u = if l == 0 { u0 } else { u1 };
        sum += 8.0 * u * iterated_mode(l, r, s) / (l as f64 + 1.0);
        if l >= 1 {
            let u2 = 2.0 * c * u1 - u0;
            u0 = u1;
            u1 = u2;
        }
    }
    sum
}

impl NavierBall {
    pub fn new() -> Result<Self> {
        Ok(Self { dirichlet: Boggio::new(2)?, min_degree: 32, max_degree: 2000, tol: 1e-13 })
    }

    pub fn with_degree(mut self, min_degree: usize, max_degree: usize) -> Self {
        self.min_degree = min_degree;
        self.max_degree = max_degree.max(min_degree);
        self
    }

    /// Correction `D(x, ξ)`.
    pub fn correction(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        let (r, s) = (norm2(x).sqrt(), norm2(xi).sqrt());
        let c = if r > 0.0 && s > 0.0 { (dot(x, xi) / (r * s)).clamp(-1.0, 1.0) } else { 0.0 };
        let mut u_prev = 0.0;
        let mut u = 1.0;
        let mut sum = 0.0;
        let mut small = 0;
        for l in 0..self.max_degree {
            let term = 16.0 * (l as f64 + 1.0) * u * mode_weight(l, s) * r.powi(l as i32) * (1.0 - r * r);
            sum += term;
            // envelope of the remaining terms, independent of the oscillating U_l
            let env = 16.0 * (l as f64 + 1.0).powi(2) * (r * s).powi(l as i32);
            if env < self.tol * (1.0 + sum.abs()) {
                small += 1;
            } else {
                small = 0;
            }
            if l + 1 >= self.min_degree && small >= 3 {
                return Ok(sum);
            }
            let next = if l == 0 { 2.0 * c } else { 2.0 * c * u - u_prev };
            u_prev = u;
            u = next;
        }
        Err(Error::ToleranceNotMet {
            achieved: 16.0 * (self.max_degree as f64).powi(2) * (r * s).powi(self.max_degree as i32),
            requested: self.tol,
        })
    }

    pub fn green(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        Ok(self.dirichlet.green(x, xi)? + self.correction(x, xi)?)
    }

    pub fn regular(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        Ok(self.dirichlet.regular(x, xi)? + self.correction(x, xi)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_source_closed_form() {
        // ξ = 0: G_N = 8 log(1/r) - 2 + 2 r²
        let n = NavierBall::new().unwrap();
        for r in [0.1f64, 0.5, 0.9] {
            let g = n.green(&[0.0, r, 0.0, 0.0], &[0.0; 4]).unwrap();
            let e = 8.0 * (1.0 / r).ln() - 2.0 + 2.0 * r * r;
            assert!((g - e).abs() < 1e-12 * e.abs().max(1.0));
        }
    }

    #[test]
    fn agrees_with_iterated_series_off_diagonal() {
        let n = NavierBall::new().unwrap();
        let x = [0.2, -0.1, 0.3, 0.05];
        let xi = [-0.3, 0.2, 0.1, -0.2];
        let direct = iterated_series(&x, &xi, 400);
        let fast = n.green(&x, &xi).unwrap();
        assert!((direct - fast).abs() < 1e-9 * fast.abs(), "{direct} {fast}");
    }

    #[test]
    fn vanishes_on_boundary_with_laplacian() {
        let n = NavierBall::new().unwrap();
        let xi = [0.3, 0.1, -0.2, 0.0];
        let b = [0.6, 0.0, 0.8, 0.0];
        assert!(n.green(&b, &xi).unwrap().abs() < 1e-12);
    }
}
