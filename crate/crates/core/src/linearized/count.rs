//! Kernel dimension of the bubble linearization `-Δ - 8/(1+|y|²)²` in the plane,
//! measured through the pencil `(-Δ - T) φ = ν T φ` on a Neumann box.
//!
//! By stereographic projection the pencil is the sphere Laplacian shifted so that the
//! first spherical harmonics sit at `ν = 0` (three of them), the constants at `ν = -1`
//! and the next shell at `ν = 2`.

use crate::error::{Error, Result};
use crate::linalg::SparseLu;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelCount {
    pub half_width: f64,
    pub h: f64,
    /// Pencil eigenvalues nearest zero, ordered by modulus.
    pub eigenvalues: Vec<f64>,
    /// Number of `|ν| < threshold`.
    pub near_zero: usize,
    pub threshold: f64,
}

struct BoxPencil {
    n1: usize,
    /// `M T` (lumped mass times potential).
    weight: Vec<f64>,
}

impl BoxPencil {
    fn new(half_width: f64, h: f64) -> Self {
        let n1 = (2.0 * half_width / h).round() as usize + 1;
        let mut weight = vec![0.0; n1 * n1];
        for j in 0..n1 {
            for i in 0..n1 {
                let end = |a: usize| if a == 0 || a == n1 - 1 { 0.5 } else { 1.0 };
                let (x, y) = (-half_width + i as f64 * h, -half_width + j as f64 * h);
                let t = 8.0 / (1.0 + x * x + y * y).powi(2);
                weight[j * n1 + i] = h * h * end(i) * end(j) * t;
            }
        }
        Self { n1, weight }
    }

    fn n(&self) -> usize {
        self.n1 * self.n1
    }

    /// Edges with their dual-face weights.
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n1 = self.n1;
        let mut e = Vec::new();
        for j in 0..n1 {
            for i in 0..n1 {
                let p = j * n1 + i;
                let face = |a: usize| if a == 0 || a == n1 - 1 { 0.5 } else { 1.0 };
                if i + 1 < n1 {
                    e.push((p, p + 1, face(j)));
                }
                if j + 1 < n1 {
                    e.push((p, p + n1, face(i)));
                }
            }
        }
        e
    }

    fn stiffness_minus_weight(&self) -> Vec<(usize, usize, f64)> {
        let mut t = Vec::new();
        for (p, q, w) in self.edges() {
            t.extend([(p, p, w), (q, q, w), (p, q, -w), (q, p, -w)]);
        }
        t.extend(self.weight.iter().enumerate().map(|(k, w)| (k, k, -w)));
        t
    }

    fn apply_a(&self, edges: &[(usize, usize, f64)], x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = x.iter().zip(&self.weight).map(|(x, w)| -x * w).collect();
        for &(p, q, w) in edges {
            let d = w * (x[p] - x[q]);
            y[p] += d;
            y[q] -= d;
        }
        y
    }
}

fn dot_w(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((a, b), w)| a * b * w).sum()
}

/// Shift-invert subspace iteration for the pencil eigenvalues nearest zero.
pub fn kernel_count(half_width: f64, h: f64, threshold: f64) -> Result<KernelCount> {
    if !(h > 0.0 && half_width > 4.0 * h) {
        return Err(Error::InvalidConfig("box must contain several cells".into()));
    }
    let pencil = BoxPencil::new(half_width, h);
    let n = pencil.n();
    let lu = SparseLu::factor(n, pencil.stiffness_minus_weight())?;
    let edges = pencil.edges();
    let block = 8;
    let mut x: Vec<Vec<f64>> = (0..block)
        .map(|b| {
            (0..n)
                .map(|k| {
                    let (i, j) = ((k % pencil.n1) as f64, (k / pencil.n1) as f64);
                    ((b as f64 + 1.0) * 0.37 * i + 0.11 * j * (b as f64 + 2.0)).sin() + 0.1 * (b as f64)
                })
                .collect()
        })
        .collect();
    let mut nu = vec![0.0; block];
    for _ in 0..60 {
        let rhs: Vec<Vec<f64>> = x
            .iter()
            .map(|v| v.iter().zip(&pencil.weight).map(|(a, w)| a * w).collect())
            .collect();
        x = lu.solve_many(&rhs)?;
        // weighted Gram–Schmidt
        for a in 0..block {
            for b in 0..a {
                let p = dot_w(&x[a], &x[b], &pencil.weight);
                let xb = x[b].clone();
                for (u, v) in x[a].iter_mut().zip(&xb) {
                    *u -= p * v;
                }
            }
            let s = dot_w(&x[a], &x[a], &pencil.weight).sqrt();
            x[a].iter_mut().for_each(|u| *u /= s);
        }
        let ax: Vec<Vec<f64>> = x.iter().map(|v| pencil.apply_a(&edges, v)).collect();
        let small = DMatrix::from_fn(block, block, |a, b| {
            0.5 * (x[a].iter().zip(&ax[b]).map(|(p, q)| p * q).sum::<f64>()
                + x[b].iter().zip(&ax[a]).map(|(p, q)| p * q).sum::<f64>())
        });
        let eig = SymmetricEigen::new(small);
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].abs().total_cmp(&eig.eigenvalues[b].abs()));
        let rotated: Vec<Vec<f64>> = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (a, xa) in x.iter().enumerate() {
                    let s = eig.eigenvectors[(a, c)];
                    v.iter_mut().zip(xa).for_each(|(o, p)| *o += s * p);
                }
                v
            })
            .collect();
        x = rotated;
        nu = order.iter().map(|&c| eig.eigenvalues[c]).collect();
    }
    let eigenvalues: Vec<f64> = nu.into_iter().take(6).collect();
    let near_zero = eigenvalues.iter().filter(|v| v.abs() < threshold).count();
    Ok(KernelCount { half_width, h, eigenvalues, near_zero, threshold })
}
