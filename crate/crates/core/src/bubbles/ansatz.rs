//! The first approximation `U = Σ_i (u_i + H_i)` and its expanded-frame form `W`.

use super::config::BubbleConfig;
use crate::constants::ExactConstants;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::greens::{GreenMethod, GreenModel};
use crate::grid::{Frame, GridField};
use crate::jet::Jet;
use crate::potential::Potential;
use crate::scalar::{dist2, norm2};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Polyharmonic correction `H_i` with boundary data `-u_i`.
#[derive(Debug, Clone)]
pub enum Correction {
    /// Unit disc: `H_i = c + 2 log|1 - z̄_in z| + 2 log|ξ̄ z - q|`.
    Disc { c: f64, z_in: [f64; 2], xi: [f64; 2], q: f64 },
    /// Centered bubble in the unit ball: `H_i = Σ_j a_j |x|^{2j}`.
    Radial { coeffs: Vec<f64> },
    /// Discrete harmonic extension on the Green function's mesh.
    Grid { values: Arc<Vec<f64>> },
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Remainders {
    pub correction: f64,
    pub far_field: f64,
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct Ansatz {
    pub config: BubbleConfig,
    pub potential: Potential,
    pub green: GreenModel,
    pub corrections: Vec<Correction>,
    log_v_xi: Vec<f64>,
    /// `α (2m-1)!`.
    amplitude: f64,
}

fn cmul(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]]
}

impl Ansatz {
    pub fn build(config: &BubbleConfig, green: &GreenModel, potential: &Potential) -> Result<Self> {
        if config.m != green.m {
            return Err(Error::InvalidConfig("configuration and Green model orders differ".into()));
        }
        let log_v_xi = config
            .xi
            .iter()
            .map(|p| potential.log_value(p))
            .collect::<Result<Vec<_>>>()?;
        let e = ExactConstants::for_order(config.m)?;
        let amplitude = e.alpha2m.to_real::<f64>() * (1..2 * config.m).map(|v| v as f64).product::<f64>();
        let mut a = Self {
            config: config.clone(),
            potential: potential.clone(),
            green: green.clone(),
            corrections: Vec::new(),
            log_v_xi,
            amplitude,
        };
        for i in 0..config.k() {
            let c = a.correction_for(i)?;
            a.corrections.push(c);
        }
        Ok(a)
    }

    fn log_height(&self, i: usize) -> f64 {
        let c = &self.config;
        2.0 * c.m as f64 * (c.mu[i] * (1.0 + c.eps * c.eps)).ln()
    }

    fn correction_for(&self, i: usize) -> Result<Correction> {
        let c = &self.config;
        let xi = &c.xi[i];
        let d = c.delta(i);
        match self.green.method() {
            GreenMethod::DiscImages => {
                let r2 = norm2(xi);
                let b = 1.0 + r2 + d * d;
                let s = (b * b - 4.0 * r2).sqrt();
                let z_in = [2.0 * xi[0] / (b + s), 2.0 * xi[1] / (b + s)];
                Ok(Correction::Disc {
                    c: -self.log_height(i) + self.log_v_xi[i],
                    z_in,
                    xi: [xi[0], xi[1]],
                    q: (b + s) / 2.0,
                })
            }
            GreenMethod::BoggioBall | GreenMethod::NavierBallIterated => {
                if norm2(xi) > 1e-24 {
                    return Err(Error::Unsupported(
                        "ball corrections for m >= 2 are implemented for centered bubbles".into(),
                    ));
                }
                self.radial_correction(i)
            }
            GreenMethod::Grid2d => {
                let g = self.green.grid().expect("grid method has a mesh");
                let values = g.harmonic_extension(|b| -self.u_i(i, &b))?;
                Ok(Correction::Grid { values: Arc::new(values) })
            }
        }
    }

    /// Matches the boundary jet of `-u_i` (Dirichlet: radial derivatives; Navier: powers of Δ).
    fn radial_correction(&self, i: usize) -> Result<Correction> {
        let c = &self.config;
        let m = c.m as usize;
        let dim = 2 * m;
        let n = 2 * m + 1;
        let d2 = c.delta(i).powi(2);
        // -u_i as a series in t = r - 1
        let log_term = Jet::poly(&[1.0 + d2, 2.0, 1.0], n).ln();
        let neg_u = log_term
            .scale(2.0 * m as f64)
            .add(&Jet::constant(-self.log_height(i) + self.log_v_xi[i], n));
        let navier = self.green.bc == crate::greens::BoundaryCondition::Navier;
        let functional = |f: &Jet, p: usize| -> f64 {
            if navier {
                let mut g = f.clone();
                for _ in 0..p {
                    g = g.radial_laplacian(dim);
                }
                g.0[0]
            } else {
                f.derivative_at_zero(p)
            }
        };
        let basis: Vec<Jet> = (0..m)
            .map(|j| {
                // (1 + t)^{2j}
                let mut b = Jet::constant(1.0, n);
                let step = Jet::poly(&[1.0, 1.0], n);
                for _ in 0..2 * j {
                    b = b.mul(&step);
                }
                b
            })
            .collect();
        let a = DMatrix::from_fn(m, m, |p, j| functional(&basis[j], p));
        let rhs = DVector::from_fn(m, |p, _| functional(&neg_u, p));
        let coeffs = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::LinearSolve("singular radial correction system".into()))?;
        Ok(Correction::Radial { coeffs: coeffs.iter().copied().collect() })
    }

    pub fn k(&self) -> usize {
        self.config.k()
    }

    pub fn m(&self) -> u32 {
        self.config.m
    }

    pub fn domain(&self) -> &Domain {
        &self.green.domain
    }

    /// `u_i(x) = 2m log(μ_i(1+ε²)) - 2m log(δ_i² + |x - ξ_i|²) - log V(ξ_i)`.
    pub fn u_i(&self, i: usize, x: &[f64]) -> f64 {
        let c = &self.config;
        let d = c.delta(i);
        self.log_height(i) - 2.0 * c.m as f64 * (d * d + dist2(x, &c.xi[i])).ln() - self.log_v_xi[i]
    }

    pub fn h_i(&self, i: usize, x: &[f64]) -> f64 {
        match &self.corrections[i] {
            Correction::Disc { c, z_in, xi, q } => {
                let z = [x[0], x[1]];
                let w = cmul([z_in[0], -z_in[1]], z);
                let f1 = (1.0 - w[0]).hypot(-w[1]);
                let v = cmul([xi[0], -xi[1]], z);
                let f2 = (v[0] - q).hypot(v[1]);
                c + 2.0 * (f1.ln() + f2.ln())
            }
            Correction::Radial { coeffs } => {
                let r2 = norm2(x);
                coeffs.iter().rev().fold(0.0, |acc, a| acc * r2 + a)
            }
            Correction::Grid { values } => {
                let g = self.green.grid().expect("grid method has a mesh");
                g.mesh.interpolate(values, [x[0], x[1]], &|b| -self.u_i(i, &b))
            }
        }
    }

    /// Sup-norm remainders of the corrections on a planar section of spacing `h`:
    /// `H_i - [H(·,ξ_i) - 2m log(μ_i(1+ε²)) + log V(ξ_i)]` over `Ω`, and
    /// `u_i + H_i - G(·,ξ_i)` on `|x - ξ_i| ≥ δ₀`.
    pub fn remainders(&self, h: f64) -> Result<Remainders> {
        if !(h > 0.0) {
            return Err(Error::InvalidConfig("sample spacing must be positive".into()));
        }
        let dim = self.domain().dim;
        let (lo, hi) = self.domain().bbox();
        let nx = ((hi[0] - lo[0]) / h).floor() as usize + 1;
        let ny = ((hi[1] - lo[1]) / h).floor() as usize + 1;
        let c = &self.config;
        let mut out = Remainders { correction: 0.0, far_field: 0.0, samples: 0 };
        for j in 0..ny {
            for i in 0..nx {
                let mut x = vec![0.0; dim];
                x[0] = lo[0] + i as f64 * h;
                x[1] = lo[1] + j as f64 * h;
                if !self.domain().contains(&x) {
                    continue;
                }
                out.samples += 1;
                for b in 0..self.k() {
                    let r = dist2(&x, &c.xi[b]).sqrt();
                    if r < 1e-12 {
                        continue;
                    }
                    let hb = self.h_i(b, &x);
                    let expected = self.green.regular(&x, &c.xi[b])? - self.log_height(b) + self.log_v_xi[b];
                    out.correction = out.correction.max((hb - expected).abs());
                    if r >= c.delta0 {
                        let g = self.green.green(&x, &c.xi[b])?;
                        out.far_field = out.far_field.max((self.u_i(b, &x) + hb - g).abs());
                    }
                }
            }
        }
        Ok(out)
    }

    /// `U(x)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        (0..self.k()).map(|i| self.u_i(i, x) + self.h_i(i, x)).sum()
    }

    /// `(-Δ)^m U(x) = Σ_i ρ^{2m} V(ξ_i) e^{u_i(x)} = Σ_i α(2m-1)! δ_i^{2m} / (δ_i² + |x-ξ_i|²)^{2m}`.
    pub fn source(&self, x: &[f64]) -> f64 {
        let m2 = 2 * self.config.m as i32;
        (0..self.k())
            .map(|i| {
                let d2 = self.config.delta(i).powi(2);
                self.amplitude * d2.powi(self.config.m as i32) / (d2 + dist2(x, &self.config.xi[i])).powi(m2)
            })
            .sum()
    }

    /// `ρ^{2m} V(x) e^{U(x)}`.
    pub fn nonlinearity(&self, x: &[f64]) -> f64 {
        let c = &self.config;
        c.rho.powi(2 * c.m as i32) * self.potential.value(x) * self.value(x).exp()
    }

    /// `W(y) = U(εy) + 2m log(ρε)`.
    pub fn w(&self, y: &[f64]) -> f64 {
        let c = &self.config;
        let x: Vec<f64> = y.iter().map(|v| v * c.eps).collect();
        self.value(&x) + 2.0 * c.m as f64 * (c.rho * c.eps).ln()
    }

    /// `(-Δ_y)^m W(y) = Σ_i α(2m-1)! μ_i^{2m} / (μ_i² + |y - ξ'_i|²)^{2m}`.
    pub fn expanded_source(&self, y: &[f64]) -> f64 {
        let c = &self.config;
        let m2 = 2 * c.m as i32;
        (0..self.k())
            .map(|i| {
                let mu2 = c.mu[i] * c.mu[i];
                let d2: f64 = y.iter().zip(&c.xi[i]).map(|(a, b)| (a - b / c.eps).powi(2)).sum();
                self.amplitude * mu2.powi(c.m as i32) / (mu2 + d2).powi(m2)
            })
            .sum()
    }

    /// `T(y) = V(εy) e^{W(y)}`.
    pub fn t(&self, y: &[f64]) -> f64 {
        let x: Vec<f64> = y.iter().map(|v| v * self.config.eps).collect();
        self.potential.value(&x) * self.w(y).exp()
    }

    /// `sup |U|` over boundary samples.
    pub fn boundary_sup(&self, samples: usize) -> f64 {
        self.domain()
            .boundary_samples(samples)
            .iter()
            .map(|b| self.value(b).abs())
            .fold(0.0, f64::max)
    }

    /// `U` sampled on a physical grid of spacing `h` (planar domains).
    pub fn physical_field(&self, h: f64) -> Result<GridField> {
        if self.domain().dim != 2 {
            return Err(Error::Unsupported("physical grids are planar".into()));
        }
        let (lo, hi) = self.domain().bbox();
        let nx = ((hi[0] - lo[0]) / h).ceil() as usize + 1;
        let ny = ((hi[1] - lo[1]) / h).ceil() as usize + 1;
        let mut g = GridField::new(nx, ny, h, lo, Frame::Physical);
        for j in 0..ny {
            for i in 0..nx {
                let p = g.point(i, j);
                let k = g.idx(i, j);
                if self.domain().contains(&p) {
                    g.values[k] = self.value(&p);
                } else {
                    g.inside[k] = false;
                }
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_boundary_and_center_chain() {
        let g = GreenModel::unit_disc();
        let v = Potential::constant(1.0);
        for xi in [vec![0.0, 0.0], vec![0.4, -0.3]] {
            let c = BubbleConfig::select(&g, &v, vec![xi], 0.1, 0.1).unwrap();
            let a = Ansatz::build(&c, &g, &v).unwrap();
            assert!(a.boundary_sup(64) < 1e-12);
        }
        let c = BubbleConfig::select(&g, &v, vec![vec![0.0, 0.0]], 0.1, 0.1).unwrap();
        let a = Ansatz::build(&c, &g, &v).unwrap();
        // ρ² V e^{u_1} = 8 δ² / (δ² + r²)²
        for r in [0.0, 0.05, 0.3] {
            let x = [r, 0.0];
            let lhs = c.rho.powi(2) * a.u_i(0, &x).exp();
            let d2 = c.delta(0).powi(2);
            let rhs = 8.0 * d2 / (d2 + r * r).powi(2);
            assert!((lhs - rhs).abs() < 1e-10 * rhs);
        }
        // centered disc: H_1 is the constant boundary value
        let h0 = a.h_i(0, &[0.0, 0.0]);
        assert!((a.h_i(0, &[0.7, 0.1]) - h0).abs() < 1e-12);
    }

    #[test]
    fn ball_corrections_vanish_on_boundary() {
        use crate::greens::BoundaryCondition;
        for (m, bc) in [(2, BoundaryCondition::Dirichlet), (3, BoundaryCondition::Dirichlet), (2, BoundaryCondition::Navier)] {
            let dom = Domain::unit_ball(2 * m as usize);
            let g = GreenModel::new(m, bc, &dom, None).unwrap();
            let v = Potential::constant(1.0);
            let c = BubbleConfig::select(&g, &v, vec![vec![0.0; 2 * m as usize]], 0.2, 0.1).unwrap();
            let a = Ansatz::build(&c, &g, &v).unwrap();
            let f = |r: f64| {
                let mut x = vec![0.0; 2 * m as usize];
                x[0] = r;
                a.value(&x)
            };
            assert!(f(1.0).abs() < 1e-12);
            let hs = 1e-4;
            match bc {
                BoundaryCondition::Dirichlet => assert!(((f(1.0) - f(1.0 - hs)) / hs).abs() < 1e-3),
                BoundaryCondition::Navier => {
                    // radial Laplacian at r = 1 by differences
                    let lap = (f(1.0 + hs) - 2.0 * f(1.0) + f(1.0 - hs)) / (hs * hs)
                        + (2.0 * m as f64 - 1.0) * (f(1.0 + hs) - f(1.0 - hs)) / (2.0 * hs);
                    assert!(lap.abs() < 1e-4, "{lap}");
                }
            }
        }
    }
}
