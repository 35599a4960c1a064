//! Positive weight functions `V` multiplying the exponential nonlinearity.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub amplitude: f64,
    pub center: Vec<f64>,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Constant { value: f64 },
    /// `c + g·x`.
    Affine { constant: f64, gradient: Vec<f64> },
    /// `base + Σ a_j exp(-|x - c_j|² / (2 w_j²))`.
    Bumps { base: f64, bumps: Vec<Bump> },
    /// `exp(a |x|²)`.
    ExpQuadratic { coefficient: f64 },
    /// Bilinear interpolation of node samples on a planar grid (row-major, x fastest).
    GridSamples {
        origin: [f64; 2],
        spacing: f64,
        nx: usize,
        ny: usize,
        values: Vec<f64>,
    },
}

impl Default for Potential {
    fn default() -> Self {
        Potential::Constant { value: 1.0 }
    }
}

impl Potential {
    pub fn constant(value: f64) -> Self {
        Potential::Constant { value }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Potential::GridSamples { nx, ny, values, spacing, .. } => {
                if *nx < 2 || *ny < 2 || values.len() != nx * ny || *spacing <= 0.0 {
                    return Err(Error::InvalidConfig("malformed potential grid".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidConfig("non-finite potential sample".into()));
                }
            }
            Potential::Bumps { bumps, .. } => {
                if bumps.iter().any(|b| b.width <= 0.0) {
                    return Err(Error::InvalidConfig("bump width must be positive".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Potential::Constant { .. })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Potential::Constant { value } => *value,
            Potential::Affine { constant, gradient } => {
                constant + gradient.iter().zip(x).map(|(g, x)| g * x).sum::<f64>()
            }
            Potential::Bumps { base, bumps } => {
                base + bumps
                    .iter()
                    .map(|b| {
                        let r2: f64 = b.center.iter().zip(x).map(|(c, x)| (x - c) * (x - c)).sum();
                        b.amplitude * (-r2 / (2.0 * b.width * b.width)).exp()
                    })
                    .sum::<f64>()
            }
            Potential::ExpQuadratic { coefficient } => {
                (coefficient * x.iter().map(|v| v * v).sum::<f64>()).exp()
            }
            Potential::GridSamples { .. } => self.bilinear(x).0,
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Potential::Constant { .. } => vec![0.0; x.len()],
            Potential::Affine { gradient, .. } => {
                let mut g = gradient.clone();
                g.resize(x.len(), 0.0);
                g
            }
            Potential::Bumps { bumps, .. } => {
                let mut g = vec![0.0; x.len()];
                for b in bumps {
                    let r2: f64 = b.center.iter().zip(x).map(|(c, x)| (x - c) * (x - c)).sum();
                    let w2 = b.width * b.width;
                    let e = b.amplitude * (-r2 / (2.0 * w2)).exp();
                    for (gi, (xi, ci)) in g.iter_mut().zip(x.iter().zip(&b.center)) {
                        *gi -= e * (xi - ci) / w2;
                    }
                }
                g
            }
            Potential::ExpQuadratic { coefficient } => {
                let v = self.value(x);
                x.iter().map(|xi| 2.0 * coefficient * xi * v).collect()
            }
            Potential::GridSamples { .. } => {
                let (_, g) = self.bilinear(x);
                g.to_vec()
            }
        }
    }

    /// `log V(x)`, failing where `V ≤ 0`.
    pub fn log_value(&self, x: &[f64]) -> Result<f64> {
        let v = self.value(x);
        if v > 0.0 && v.is_finite() {
            Ok(v.ln())
        } else {
            Err(Error::NonPositivePotential { point: x.to_vec(), value: v })
        }
    }

    pub fn grad_log(&self, x: &[f64]) -> Result<Vec<f64>> {
        let v = self.value(x);
        if v <= 0.0 || !v.is_finite() {
            return Err(Error::NonPositivePotential { point: x.to_vec(), value: v });
        }
        Ok(self.gradient(x).into_iter().map(|g| g / v).collect())
    }

    fn bilinear(&self, x: &[f64]) -> (f64, [f64; 2]) {
        let Potential::GridSamples { origin, spacing, nx, ny, values } = self else {
            unreachable!()
        };
        let fx = ((x[0] - origin[0]) / spacing).clamp(0.0, (*nx - 1) as f64);
        let fy = ((x[1] - origin[1]) / spacing).clamp(0.0, (*ny - 1) as f64);
        let i = (fx.floor() as usize).min(nx - 2);
        let j = (fy.floor() as usize).min(ny - 2);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let at = |a: usize, b: usize| values[b * nx + a];
        let (v00, v10, v01, v11) = (at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1));
        let v = v00 * (1.0 - tx) * (1.0 - ty) + v10 * tx * (1.0 - ty) + v01 * (1.0 - tx) * ty + v11 * tx * ty;
        let gx = ((v10 - v00) * (1.0 - ty) + (v11 - v01) * ty) / spacing;
        let gy = ((v01 - v00) * (1.0 - tx) + (v11 - v10) * tx) / spacing;
        (v, [gx, gy])
    }
}
