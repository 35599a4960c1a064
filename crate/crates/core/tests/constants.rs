use polyliouville::constants::{appendix_integral_oracle, constants_for, rho_from_eps, AppendixIntegral, ExactConstants};
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn low_order_values() {
    let c1 = constants_for::<f64>(1).unwrap();
    assert!((c1.lambda2m - 8.0 * PI).abs() < 1e-12);
    assert_eq!(c1.alpha2m, 8.0);
    assert_eq!(c1.tm, 2.0);
    let c2 = constants_for::<f64>(2).unwrap();
    assert!((c2.lambda2m - 64.0 * PI * PI).abs() < 1e-9);
    assert_eq!(c2.alpha2m, 64.0);
    assert_eq!(c2.tm, 24.0);
    assert!((c2.c1 - 5.0 * PI * PI / 36.0).abs() < 1e-12);
    assert_eq!(ExactConstants::for_order(2).unwrap().lambda2m.to_string(), "64·π^2");
}

#[test]
fn closed_forms_match_radial_quadrature() {
    for m in 1..=4 {
        let c = constants_for::<f64>(m as i64).unwrap();
        for (which, closed) in [(AppendixIntegral::C0, c.c0), (AppendixIntegral::C1, c.c1)] {
            let q = appendix_integral_oracle(m, which, 1e-12).unwrap().value;
            assert!((q - closed).abs() < 1e-9 * closed, "m={m} {which:?}: {q} vs {closed}");
        }
    }
}

#[test]
fn order_zero_is_rejected() {
    assert!(constants_for::<f64>(0).is_err());
    assert!(ExactConstants::for_order(0).is_err());
}

proptest! {
    #[test]
    fn t_m_is_factorial_and_b_is_half_lambda(m in 1u32..=10) {
        let c = constants_for::<f64>(m as i64).unwrap();
        let fact: f64 = (1..=2 * m).map(f64::from).product();
        prop_assert!((c.tm - fact).abs() <= 1e-12 * fact);
        prop_assert!((c.bm - c.lambda2m / 2.0).abs() <= 1e-12 * c.lambda2m);
        prop_assert_eq!(c.alpha2m, 2f64.powi(2 * m as i32 + 1) * m as f64);
    }

    #[test]
    fn rho_scales_like_eps(m in 1u32..=3, eps in 1e-4f64..0.5) {
        let c = constants_for::<f64>(m as i64).unwrap();
        let r = rho_from_eps(m, eps);
        let lhs = r.powi(2 * m as i32) * (1.0 + eps * eps).powi(2 * m as i32);
        let rhs = c.alpha2m * c.reference_q() * eps.powi(2 * m as i32);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }
}
