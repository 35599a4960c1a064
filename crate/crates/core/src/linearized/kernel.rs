//! Dilation and translation modes of the bubble linearization and their cutoffs.

use crate::error::{Error, Result};
use serde::Serialize;

pub const DEFAULT_R0: f64 = 10.0;

/// Kernel elements `Y_{i0}`, `Y_{ij}` centered at `ξ'_i` with heights `μ_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelBasis {
    pub m: u32,
    pub mu: Vec<f64>,
    pub centers: Vec<Vec<f64>>,
    pub r0: f64,
}

/// Quintic ramp: `1` on `r ≤ r0`, `0` on `r ≥ r0 + 1`, `C²` in between.
pub fn cutoff(r: f64, r0: f64) -> f64 {
    let s = (r - r0).clamp(0.0, 1.0);
    1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

impl KernelBasis {
    pub fn new(m: u32, mu: Vec<f64>, centers: Vec<Vec<f64>>, r0: f64) -> Result<Self> {
        if mu.len() != centers.len() || mu.is_empty() {
            return Err(Error::InvalidConfig("need one height per center".into()));
        }
        if !(r0 > 0.0) {
            return Err(Error::InvalidConfig("cutoff radius must be positive".into()));
        }
        Ok(Self { m, mu, centers, r0 })
    }

    pub fn k(&self) -> usize {
        self.mu.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.m as usize
    }

    /// `Y_{i0}` for `j = 0`, `Y_{ij}` for `1 ≤ j ≤ 2m`, at `z = y - ξ'_i`.
    pub fn eval_local(&self, i: usize, j: usize, z: &[f64]) -> Result<f64> {
        if i >= self.k() || j > self.dim() {
            return Err(Error::IndexOutOfRange(format!("kernel index ({i}, {j})")));
        }
        let mu2 = self.mu[i] * self.mu[i];
        let r2: f64 = z.iter().map(|v| v * v).sum();
        Ok(if j == 0 {
            (r2 - mu2) / (mu2 + r2)
        } else {
            4.0 * self.m as f64 * z[j - 1] / (mu2 + r2)
        })
    }

    /// Same as [`Self::eval_local`] at absolute position `y`.
    pub fn eval(&self, i: usize, j: usize, y: &[f64]) -> Result<f64> {
        let c = self.centers.get(i).ok_or_else(|| Error::IndexOutOfRange(format!("bubble {i}")))?;
        let z: Vec<f64> = y.iter().zip(c).map(|(a, b)| a - b).collect();
        self.eval_local(i, j, &z)
    }

    pub fn chi(&self, i: usize, y: &[f64]) -> f64 {
        let r = y.iter().zip(&self.centers[i]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        cutoff(r, self.r0)
    }

    /// `χ_i Z_{ij}` for the translation modes `j ≥ 1`.
    pub fn cut_mode(&self, i: usize, j: usize, y: &[f64]) -> Result<f64> {
        Ok(self.chi(i, y) * self.eval(i, j, y)?)
    }
}

pub fn kernel_eval(basis: &KernelBasis, i: usize, j: usize, z: &[f64]) -> Result<f64> {
    basis.eval_local(i, j, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_and_limits() {
        let b = KernelBasis::new(1, vec![1.0], vec![vec![0.0, 0.0]], DEFAULT_R0).unwrap();
        assert_eq!(b.eval_local(0, 0, &[0.0, 0.0]).unwrap(), -1.0);
        assert!((b.eval_local(0, 0, &[1e3, 0.0]).unwrap() - 1.0).abs() < 2e-6);
        let p = b.eval_local(0, 1, &[0.3, 0.2]).unwrap();
        assert_eq!(b.eval_local(0, 1, &[-0.3, 0.2]).unwrap(), -p);
        assert!(b.eval_local(0, 3, &[0.0, 0.0]).is_err());
        assert_eq!(cutoff(9.0, 10.0), 1.0);
        assert_eq!(cutoff(11.5, 10.0), 0.0);
        assert!((cutoff(10.5, 10.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn translation_mode_solves_linearized_equation() {
        // (-Δ - 8/(1+|z|²)²) Y_{01} by the five-point stencil on |z| ≤ 8
        let b = KernelBasis::new(1, vec![1.0], vec![vec![0.0, 0.0]], DEFAULT_R0).unwrap();
        let h = 1.0 / 256.0;
        let f = |x: f64, y: f64| b.eval_local(0, 1, &[x, y]).unwrap();
        let mut worst: f64 = 0.0;
        let n = 40;
        for a in 0..n {
            for c in 0..n {
                let (x, y) = (-8.0 + 16.0 * a as f64 / n as f64, -8.0 + 16.0 * c as f64 / n as f64);
                if x.hypot(y) > 8.0 {
                    continue;
                }
                let lap = (4.0 * f(x, y) - f(x + h, y) - f(x - h, y) - f(x, y + h) - f(x, y - h)) / (h * h);
                let t = 8.0 / (1.0 + x * x + y * y).powi(2);
                worst = worst.max((lap - t * f(x, y)).abs());
            }
        }
        assert!(worst < 1e-3, "{worst}");
    }
}
