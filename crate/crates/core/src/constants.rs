//! Dimensional constants of the order-`m` Liouville problem in `R^{2m}`.
//!
//! Every constant is a rational multiple of a power of `π`; that structure is
//! kept exactly in [`ExactValue`] and only converted to floating point at the
//! API boundary.

use crate::error::{Error, Result};
use crate::quadrature::{self, Estimate};
use crate::scalar::Real;
use num_rational::Ratio;
use serde::Serialize;

/// Largest order for which the exact integer arithmetic is guaranteed not to overflow.
pub const MAX_EXACT_ORDER: u32 = 12;

/// `coeff · π^pi_power` with an exact rational coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactValue {
    pub coeff: Ratio<i128>,
    pub pi_power: u32,
}

impl ExactValue {
    pub fn new(coeff: Ratio<i128>, pi_power: u32) -> Self {
        Self { coeff, pi_power }
    }

    pub fn integer(n: i128) -> Self {
        Self::new(Ratio::from_integer(n), 0)
    }

    pub fn to_real<T: Real>(self) -> T {
        let num = T::from_i128(*self.coeff.numer()).expect("numerator fits");
        let den = T::from_i128(*self.coeff.denom()).expect("denominator fits");
        let pi = T::PI().powi(self.pi_power as i32);
        num / den * pi
    }

    fn scale(self, r: Ratio<i128>) -> Self {
        Self::new(self.coeff * r, self.pi_power)
    }
}

impl std::fmt::Display for ExactValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = if *self.coeff.denom() == 1 {
            format!("{}", self.coeff.numer())
        } else {
            format!("{}/{}", self.coeff.numer(), self.coeff.denom())
        };
        match self.pi_power {
            0 => write!(f, "{c}"),
            1 => write!(f, "{c}·π"),
            p => write!(f, "{c}·π^{p}"),
        }
    }
}

fn factorial(n: u32) -> i128 {
    (1..=n as i128).product()
}

/// Exact form of all constants for a given order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConstants {
    pub m: u32,
    /// Area of the unit `(2m-1)`-sphere.
    pub omega2m: ExactValue,
    /// Total mass of a standard bubble.
    pub lambda2m: ExactValue,
    /// Bubble amplitude: `e^U = α δ^{2m} (2m-1)! / (δ² + |x-ξ|²)^{2m}` solves `(-Δ)^m U = e^U`.
    pub alpha2m: ExactValue,
    /// Energy constant `½ α (m-1)! π^m`.
    pub bm: ExactValue,
    /// `∫ (1+|y|²)^{-2m} dy` over `R^{2m}`.
    pub c0: ExactValue,
    /// `∫ log(1+|y|²) (1+|y|²)^{-2m} dy` over `R^{2m}`.
    pub c1: ExactValue,
    /// GJMS eigenvalue of the sphere on first spherical harmonics, `α (2m-1)! / 2^{2m}`.
    pub tm: i128,
}

impl ExactConstants {
    pub fn for_order(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidOrder(0));
        }
        if m > MAX_EXACT_ORDER {
            return Err(Error::InvalidConfig(format!(
                "order m = {m} exceeds the exact-arithmetic limit {MAX_EXACT_ORDER}"
            )));
        }
        let mi = m as i128;
        let fm1 = factorial(m - 1);
        let f2m1 = factorial(2 * m - 1);
        let pow4m: i128 = 1 << (2 * m);

        let omega2m = ExactValue::new(Ratio::new(2, fm1), m);
        let lambda2m = omega2m.scale(Ratio::from_integer(pow4m * factorial(m) * fm1));
        let alpha2m = ExactValue::integer(2 * pow4m * mi);
        let bm = ExactValue::new(
            alpha2m.coeff * Ratio::from_integer(fm1) / Ratio::from_integer(2),
            m,
        );
        let c0 = ExactValue::new(Ratio::new(fm1, f2m1), m);
        let harmonic: Ratio<i128> = (m..2 * m)
            .map(|j| Ratio::new(1, j as i128))
            .fold(Ratio::from_integer(0), |a, b| a + b);
        let c1 = c0.scale(harmonic);
        let tm_ratio = alpha2m.coeff * Ratio::from_integer(f2m1) / Ratio::from_integer(pow4m);
        debug_assert!(tm_ratio.is_integer());
        Ok(Self {
            m,
            omega2m,
            lambda2m,
            alpha2m,
            bm,
            c0,
            c1,
            tm: tm_ratio.to_integer(),
        })
    }
}

/// Floating-point view of [`ExactConstants`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants<T> {
    pub m: u32,
    pub omega2m: T,
    pub lambda2m: T,
    pub alpha2m: T,
    pub bm: T,
    pub c0: T,
    pub c1: T,
    pub tm: T,
}

impl<T: Real> Constants<T> {
    /// Reference `Q = (2m-1)!` for which the standard bubble has mass `Λ_{2m}`.
    pub fn reference_q(&self) -> T {
        T::from_i128(factorial(2 * self.m - 1)).expect("factorial fits")
    }
}

pub fn constants_for<T: Real>(m: i64) -> Result<Constants<T>> {
    if m < 1 {
        return Err(Error::InvalidOrder(m));
    }
    let e = ExactConstants::for_order(m as u32)?;
    Ok(Constants {
        m: e.m,
        omega2m: e.omega2m.to_real(),
        lambda2m: e.lambda2m.to_real(),
        alpha2m: e.alpha2m.to_real(),
        bm: e.bm.to_real(),
        c0: e.c0.to_real(),
        c1: e.c1.to_real(),
        tm: T::from_i128(e.tm).expect("t_m fits"),
    })
}

/// `ρ` from `ε`: `ρ^{2m} = α (2m-1)! ε^{2m} / (1+ε²)^{2m}`.
pub fn rho_from_eps(m: u32, eps: f64) -> f64 {
    let c = constants_for::<f64>(m as i64).expect("valid order");
    let q = c.reference_q();
    let p = (c.alpha2m * q).powf(1.0 / (2.0 * m as f64));
    p * eps / (1.0 + eps * eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AppendixIntegral {
    C0,
    C1,
}

/// Radial quadrature of the integrals defining `c₀` and `c₁`, independent of their closed forms
/// except for the sphere area.
pub fn appendix_integral_oracle(m: u32, which: AppendixIntegral, tol: f64) -> Result<Estimate> {
    if m == 0 {
        return Err(Error::InvalidOrder(0));
    }
    if m > 4 {
        return Err(Error::InvalidConfig(format!(
            "c0/c1 quadrature supports m <= 4, got {m}"
        )));
    }
    let omega: f64 = ExactConstants::for_order(m)?.omega2m.to_real();
    let n = 2 * m as i32;
    let f = move |r: f64| {
        let s = 1.0 + r * r;
        let base = r.powi(n - 1) / s.powi(n);
        match which {
            AppendixIntegral::C0 => base,
            AppendixIntegral::C1 => base * s.ln(),
        }
    };
    let est = quadrature::integrate_semi_infinite(f, 0.0, tol * 1e-2, tol * 1e-2)?;
    let value = omega * est.value;
    let error = omega * est.error;
    if error > tol * value.abs() {
        return Err(Error::ToleranceNotMet {
            achieved: error / value.abs(),
            requested: tol,
        });
    }
    Ok(Estimate {
        value,
        error,
        evaluations: est.evaluations,
    })
}
