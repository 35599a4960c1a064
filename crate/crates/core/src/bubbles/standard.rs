//! Standard bubbles `U_{δ,ξ}(x) = log(α Q δ^{2m} / (δ² + |x - ξ|²)^{2m})`, entire solutions of
//! `(-Δ)^m U = ((2m-1)!/Q) e^U` in `R^{2m}` with mass `∫ e^U = Q Λ_{2m} / (2m-1)!`.

use crate::constants::{constants_for, ExactConstants};
use crate::error::{Error, Result};
use crate::quadrature::{self, Estimate};
use crate::scalar::{dist2, Real};

pub fn standard_bubble<T: Real>(m: u32, q: T, delta: T, xi: &[T], x: &[T]) -> Result<T> {
    if !(q > T::zero()) {
        return Err(Error::NoStandardSolution(q.to_f64_lossy()));
    }
    if !(delta > T::zero()) {
        return Err(Error::InvalidConfig("bubble scale must be positive".into()));
    }
    let alpha: T = ExactConstants::for_order(m)?.alpha2m.to_real();
    let two_m = T::from_usize_lossy(2 * m as usize);
    let d2 = delta * delta;
    Ok((alpha * q).ln() + two_m * delta.ln() - two_m * (d2 + dist2(x, xi)).ln())
}

/// Right-hand side of the limit equation at `x`: `((2m-1)!/Q) e^{U(x)}`.
pub fn limit_rhs(m: u32, q: f64, delta: f64, xi: &[f64], x: &[f64]) -> Result<f64> {
    let c = constants_for::<f64>(m as i64)?;
    Ok(c.reference_q() / q * standard_bubble(m, q, delta, xi, x)?.exp())
}

/// `∫_{R^{2m}} e^{U}` by radial quadrature.
pub fn bubble_mass(m: u32, q: f64, delta: f64, tol: f64) -> Result<Estimate> {
    let omega: f64 = ExactConstants::for_order(m)?.omega2m.to_real();
    let origin = vec![0.0; 2 * m as usize];
    standard_bubble(m, q, delta, &origin, &origin)?;
    let n = 2 * m as i32;
    let f = |r: f64| {
        let mut x = origin.clone();
        x[0] = r;
        standard_bubble(m, q, delta, &origin, &x).map(|u| u.exp()).unwrap_or(0.0) * r.powi(n - 1)
    };
    let inner = quadrature::integrate(&f, 0.0, delta, tol * 1e-3, tol * 1e-3)?;
    let outer = quadrature::integrate_semi_infinite(|r| f(r), delta, tol * 1e-3, tol * 1e-3)?;
    Ok(Estimate {
        value: omega * (inner.value + outer.value),
        error: omega * (inner.error + outer.error),
        evaluations: inner.evaluations + outer.evaluations,
    })
}

/// Discrete `(-Δ_h)^m f(x)` by `m` nested applications of the axis stencil in `R^{dim}`,
/// evaluated pointwise (`(2·dim+1)^m` samples).
pub fn nested_neg_laplacian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64, m: u32) -> f64 {
    if m == 0 {
        return f(x);
    }
    let inner = |p: &[f64]| nested_neg_laplacian(f, p, h, m - 1);
    let mut s = 2.0 * x.len() as f64 * inner(x);
    let mut p = x.to_vec();
    for a in 0..x.len() {
        p[a] = x[a] + h;
        s -= inner(&p);
        p[a] = x[a] - h;
        s -= inner(&p);
        p[a] = x[a];
    }
    s / (h * h)
}

/// Scale covariance: `u(μ x) + 2m log μ` for `u` a solution of `(-Δ)^m u = c e^u`.
pub fn rescaled<T: Real>(u: impl Fn(&[T]) -> T, m: u32, mu: T, x: &[T]) -> T {
    let y: Vec<T> = x.iter().map(|&v| v * mu).collect();
    u(&y) + T::from_usize_lossy(2 * m as usize) * mu.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_center() {
        let v = standard_bubble(1, 1.0, 1.0, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!((v - 8f64.ln()).abs() < 1e-15);
        assert_eq!(
            standard_bubble(2, -1.0, 1.0, &[0.0; 4], &[0.0; 4]),
            Err(Error::NoStandardSolution(-1.0))
        );
        assert_eq!(standard_bubble(2, 0.0f32, 1.0, &[0.0; 4], &[0.0; 4]), Err(Error::NoStandardSolution(0.0)));
    }

    #[test]
    fn laplacian_identity_order_one() {
        // -Δ log(1/(1+r²)²) = 8/(1+r²)²
        let f = |p: &[f64]| standard_bubble(1, 1.0, 1.0, &[0.0, 0.0], p).unwrap();
        let x = [0.3, -0.2];
        let lhs = nested_neg_laplacian(&f, &x, 1e-3, 1);
        let rhs = limit_rhs(1, 1.0, 1.0, &[0.0, 0.0], &x).unwrap();
        assert!((lhs - rhs).abs() < 1e-5 * rhs);
    }
}
