//! Weighted norms on the expanded domain.

use crate::error::{Error, Result};
use crate::grid::GridField;

/// Weight `Σ_i (1 + |y - ξ'_i|)^{-(4m-1)} + ε^{2m}`.
pub fn star_weight(y: [f64; 2], xi_prime: &[[f64; 2]], m: u32, eps: f64) -> f64 {
    let p = -(4.0 * m as f64 - 1.0);
    xi_prime
        .iter()
        .map(|c| (1.0 + (y[0] - c[0]).hypot(y[1] - c[1])).powf(p))
        .sum::<f64>()
        + eps.powi(2 * m as i32)
}

/// `sup |f| / weight` over inside nodes.
pub fn star_norm(f: &GridField, xi_prime: &[[f64; 2]], m: u32, eps: f64) -> Result<f64> {
    if xi_prime.is_empty() {
        return Err(Error::InvalidConfig("star norm needs at least one concentration point".into()));
    }
    Ok(f.points()
        .filter(|(k, _)| f.inside[*k])
        .map(|(k, y)| f.values[k].abs() / star_weight(y, xi_prime, m, eps))
        .fold(0.0, f64::max))
}

/// Same as [`star_norm`] for values given at arbitrary points.
pub fn star_norm_points(values: &[f64], points: &[[f64; 2]], xi_prime: &[[f64; 2]], m: u32, eps: f64) -> f64 {
    values
        .iter()
        .zip(points)
        .map(|(v, y)| v.abs() / star_weight(*y, xi_prime, m, eps))
        .fold(0.0, f64::max)
}

/// Discrete surrogate of the interior-plus-weighted-derivative norm: per bubble, the sup of
/// all finite-difference derivatives up to order `2m` on `r_i < 2`, plus
/// `Σ_{|α| ≤ 2m-1} sup_{r_i ≥ 2} r_i^{|α|} |D^α f|`.
pub fn starstar_norm(f: &GridField, xi_prime: &[[f64; 2]], m: u32) -> Result<f64> {
    if xi_prime.is_empty() {
        return Err(Error::InvalidConfig("norm needs at least one concentration point".into()));
    }
    if f.h > 1.0 {
        return Err(Error::Resolution(format!("spacing {} does not resolve the unit bubble scale", f.h)));
    }
    let order = 2 * m as usize;
    let mut derivs = Vec::new();
    for total in 0..=order {
        for a in 0..=total {
            derivs.push((total, f.derivative(a, total - a)));
        }
    }
    let mut sum = 0.0;
    for c in xi_prime {
        let mut interior: f64 = 0.0;
        let mut resolved = false;
        let mut outer = vec![0.0f64; order];
        for (k, y) in f.points() {
            let r = (y[0] - c[0]).hypot(y[1] - c[1]);
            if r < 2.0 {
                let mut all = true;
                for (_, d) in &derivs {
                    match d[k] {
                        Some(v) => interior = interior.max(v.abs()),
                        None => all = false,
                    }
                }
                resolved |= all;
            } else {
                for (total, d) in &derivs {
                    if *total < order {
                        if let Some(v) = d[k] {
                            outer[*total] = outer[*total].max(r.powi(*total as i32) * v.abs());
                        }
                    }
                }
            }
        }
        if !resolved {
            return Err(Error::Resolution(format!(
                "no node near ({:.3}, {:.3}) supports derivatives of order {order}",
                c[0], c[1]
            )));
        }
        sum += interior + outer.iter().sum::<f64>();
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Frame;
    use proptest::prelude::*;

    fn grid(f: impl Fn([f64; 2]) -> f64) -> GridField {
        GridField::from_fn(81, 81, 0.25, [-10.0, -10.0], Frame::Expanded { eps: 0.1 }, f)
    }

    #[test]
    fn zero_and_floor() {
        let xi = [[0.0, 0.0]];
        assert_eq!(star_norm(&grid(|_| 0.0), &xi, 1, 0.1).unwrap(), 0.0);
        assert_eq!(starstar_norm(&grid(|_| 0.0), &xi, 1).unwrap(), 0.0);
        // far from the support the weight is the floor ε^{2m}
        let far = [[1e6, 1e6]];
        let v = star_norm(&grid(|_| 0.01), &far, 1, 0.1).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        assert!(matches!(star_norm(&grid(|_| 1.0), &[], 1, 0.1), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn constant_field() {
        // interior sup 1 plus the order-zero exterior term 1, per bubble
        let v = starstar_norm(&grid(|_| 1.0), &[[0.0, 0.0], [4.0, 0.0]], 1).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_rejected() {
        let g = GridField::from_fn(3, 3, 3.0, [-3.0, -3.0], Frame::Expanded { eps: 0.1 }, |_| 1.0);
        assert!(matches!(starstar_norm(&g, &[[0.0, 0.0]], 1), Err(Error::Resolution(_))));
    }

    proptest! {
        #[test]
        fn star_norm_is_a_norm(a in -3.0f64..3.0, s1 in 0u64..1000, s2 in 0u64..1000) {
            let f1 = grid(|p| (p[0] * 0.37 + s1 as f64).sin() * (p[1] + 0.1 * s1 as f64).cos());
            let f2 = grid(|p| (p[1] * 0.53 - s2 as f64).cos() + 0.01 * p[0]);
            let xi = [[0.5, -0.5], [3.0, 2.0]];
            let n = |f: &GridField| star_norm(f, &xi, 1, 0.1).unwrap();
            let scaled = f1.map(|v| a * v);
            prop_assert!((n(&scaled) - a.abs() * n(&f1)).abs() <= 1e-10 * (1.0 + n(&f1)));
            let sum = f1.zip_map(&f2, |x, y| x + y);
            prop_assert!(n(&sum) <= n(&f1) + n(&f2) + 1e-10);
        }
    }
}
