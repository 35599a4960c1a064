//! Method of images on the unit disc (`m = 1`), `(-Δ) G = 8π δ`.

use crate::scalar::Real;

/// `[XY]² = |x|²|ξ|² - 2 x·ξ + 1 = |1 - x ξ̄|²`.
#[inline]
pub fn xy2<T: Real>(x: [T; 2], xi: [T; 2]) -> T {
    let nx = x[0] * x[0] + x[1] * x[1];
    let nxi = xi[0] * xi[0] + xi[1] * xi[1];
    nx * nxi - T::lit(2.0) * (x[0] * xi[0] + x[1] * xi[1]) + T::one()
}

/// `G(x, ξ) = 4 log(|1 - x ξ̄| / |x - ξ|)`.
pub fn green<T: Real>(x: [T; 2], xi: [T; 2]) -> T {
    let d2 = (x[0] - xi[0]) * (x[0] - xi[0]) + (x[1] - xi[1]) * (x[1] - xi[1]);
    T::lit(2.0) * (xy2(x, xi) / d2).ln()
}

/// `H(x, ξ) = 4 log |1 - x ξ̄|`.
pub fn regular<T: Real>(x: [T; 2], xi: [T; 2]) -> T {
    T::lit(2.0) * xy2(x, xi).ln()
}

/// `H(ξ, ξ) = 4 log(1 - |ξ|²)`.
pub fn robin<T: Real>(xi: [T; 2]) -> T {
    T::lit(4.0) * (T::one() - xi[0] * xi[0] - xi[1] * xi[1]).ln()
}

/// `∇_ξ H(ξ, ξ) = -8 ξ / (1 - |ξ|²)`.
pub fn robin_gradient<T: Real>(xi: [T; 2]) -> [T; 2] {
    let s = T::lit(-8.0) / (T::one() - xi[0] * xi[0] - xi[1] * xi[1]);
    [s * xi[0], s * xi[1]]
}

/// `∇_x G(x, ξ)`.
pub fn green_grad_x<T: Real>(x: [T; 2], xi: [T; 2]) -> [T; 2] {
    let q = xy2(x, xi);
    let nxi = xi[0] * xi[0] + xi[1] * xi[1];
    let d = [x[0] - xi[0], x[1] - xi[1]];
    let d2 = d[0] * d[0] + d[1] * d[1];
    let four = T::lit(4.0);
    [
        four * (nxi * x[0] - xi[0]) / q - four * d[0] / d2,
        four * (nxi * x[1] - xi[1]) / q - four * d[1] / d2,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((green([0.5, 0.0], [-0.5, 0.0]) - 4.0 * 1.25f64.ln()).abs() < 1e-14);
        assert!((robin([0.5f64, 0.0]) - 4.0 * 0.75f64.ln()).abs() < 1e-14);
        assert_eq!(robin([0.0f64, 0.0]), 0.0);
        let g = robin_gradient([0.5f64, 0.0]);
        assert!((g[0] + 16.0 / 3.0).abs() < 1e-14 && g[1] == 0.0);
    }

    #[test]
    fn single_precision() {
        let v: f32 = green([0.5f32, 0.0], [-0.5, 0.0]);
        assert!((v - 0.892_574_2).abs() < 1e-5);
    }

    #[test]
    fn gradient_matches_differences() {
        let (x, xi): ([f64; 2], [f64; 2]) = ([0.31, -0.2], [-0.4, 0.25]);
        let g = green_grad_x(x, xi);
        for a in 0..2 {
            let mut p = x;
            let mut q = x;
            p[a] += 1e-6;
            q[a] -= 1e-6;
            let fd = (green(p, xi) - green(q, xi)) / 2e-6;
            assert!((fd - g[a]).abs() < 1e-8);
        }
    }
}
