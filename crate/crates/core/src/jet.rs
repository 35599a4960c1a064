//! Truncated Taylor series `Σ_{k<n} c_k t^k` for exact boundary jets of radial profiles.

#[derive(Debug, Clone, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(c: f64, n: usize) -> Self {
        let mut v = vec![0.0; n];
        v[0] = c;
        Jet(v)
    }

    /// Polynomial with the given low-order coefficients, truncated to length `n`.
    pub fn poly(coeffs: &[f64], n: usize) -> Self {
        let mut v = vec![0.0; n];
        for (d, c) in v.iter_mut().zip(coeffs) {
            *d = *c;
        }
        Jet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet(self.0.iter().map(|a| a * s).collect())
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.len();
        let mut v = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                v[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(v)
    }

    pub fn div(&self, o: &Jet) -> Jet {
        let n = self.len();
        let mut q = vec![0.0; n];
        for k in 0..n {
            let mut s = self.0[k];
            for j in 1..=k {
                s -= o.0[j] * q[k - j];
            }
            q[k] = s / o.0[0];
        }
        Jet(q)
    }

    /// `d/dt`, keeping the length (top coefficient becomes zero).
    pub fn derivative(&self) -> Jet {
        let n = self.len();
        let mut v = vec![0.0; n];
        for k in 1..n {
            v[k - 1] = k as f64 * self.0[k];
        }
        Jet(v)
    }

    /// `log` of a series with positive constant term.
    pub fn ln(&self) -> Jet {
        let q = self.derivative().div(self);
        let n = self.len();
        let mut v = vec![0.0; n];
        v[0] = self.0[0].ln();
        for k in 1..n {
            v[k] = q.0[k - 1] / k as f64;
        }
        Jet(v)
    }

    /// `p`-th derivative at `t = 0`.
    pub fn derivative_at_zero(&self, p: usize) -> f64 {
        let f: f64 = (1..=p).map(|k| k as f64).product();
        self.0.get(p).copied().unwrap_or(0.0) * f
    }

    /// Radial Laplacian `f'' + (n-1) f' / r` in `R^dim`, for the series in `t = r - 1`.
    pub fn radial_laplacian(&self, dim: usize) -> Jet {
        let n = self.len();
        let inv_r = Jet::poly(&[1.0, 1.0], n).div_scalar_series();
        self.derivative()
            .derivative()
            .add(&self.derivative().mul(&inv_r).scale(dim as f64 - 1.0))
    }

    fn div_scalar_series(&self) -> Jet {
        Jet::constant(1.0, self.len()).div(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_series() {
        // log(1 + t) = t - t²/2 + t³/3
        let j = Jet::poly(&[1.0, 1.0], 5).ln();
        assert!((j.0[3] - 1.0 / 3.0).abs() < 1e-15 && (j.0[4] + 0.25).abs() < 1e-15);
    }

    #[test]
    fn laplacian_of_r_squared() {
        // r² = (1+t)²: Δ r² = 2 dim
        let j = Jet::poly(&[1.0, 2.0, 1.0], 6).radial_laplacian(4);
        assert!((j.0[0] - 8.0).abs() < 1e-14 && j.0[1].abs() < 1e-14);
    }
}
