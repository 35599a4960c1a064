//! Admissible search regions and objectives on configuration space.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::greens::GreenModel;
use crate::potential::Potential;
use crate::reduced::{grad_phi_k, phi_k, PhiValue};
use crate::scalar::dist2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Smooth function on flattened configurations `(ξ_1, …, ξ_k)`.
pub trait Objective: Sync {
    fn value(&self, x: &[f64]) -> Result<PhiValue>;
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;
    /// Whether the gradient is exact (affects default tolerances and FD steps).
    fn analytic(&self) -> bool {
        true
    }
}

/// `φ_k` for fixed Green model and potential.
#[derive(Debug, Clone)]
pub struct PhiObjective<'a> {
    pub green: &'a GreenModel,
    pub potential: &'a Potential,
}

pub fn split(x: &[f64], d: usize) -> Vec<Vec<f64>> {
    x.chunks(d).map(|c| c.to_vec()).collect()
}

impl Objective for PhiObjective<'_> {
    fn value(&self, x: &[f64]) -> Result<PhiValue> {
        phi_k(self.green, self.potential, &split(x, self.green.dim()))
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        grad_phi_k(self.green, self.potential, &split(x, self.green.dim()))
    }

    fn analytic(&self) -> bool {
        self.green.is_analytic()
    }
}

/// `-f`, for maximization.
pub struct Negated<'a, O: Objective + ?Sized>(pub &'a O);

impl<O: Objective + ?Sized> Objective for Negated<'_, O> {
    fn value(&self, x: &[f64]) -> Result<PhiValue> {
        let v = self.0.value(x)?;
        Ok(PhiValue { value: -v.value, finite: v.finite })
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.0.gradient(x)?.into_iter().map(|v| -v).collect())
    }

    fn analytic(&self) -> bool {
        self.0.analytic()
    }
}

/// `D`: configurations at distance `> 2δ₀` from `∂Ω` and from each other, with a
/// barrier acting on a band of width `band` inside `D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchRegion {
    pub domain: Domain,
    pub k: usize,
    pub delta0: f64,
    pub band: f64,
    pub stiffness: f64,
}

impl SearchRegion {
    pub fn new(domain: &Domain, k: usize, delta0: f64) -> Result<Self> {
        if k == 0 || !(delta0 > 0.0) {
            return Err(Error::InvalidConfig("search region needs k ≥ 1 and δ₀ > 0".into()));
        }
        Ok(Self { domain: domain.clone(), k, delta0, band: delta0, stiffness: 1.0 })
    }

    pub fn with_stiffness(mut self, s: f64) -> Self {
        self.stiffness = s;
        self
    }

    pub fn d(&self) -> usize {
        self.domain.dim
    }

    pub fn n(&self) -> usize {
        self.k * self.d()
    }

    /// Slacks of all constraints (`> 0` inside `D`).
    pub fn slacks(&self, x: &[f64]) -> Vec<f64> {
        let pts = split(x, self.d());
        let mut s: Vec<f64> = pts.iter().map(|p| self.domain.signed_distance(p) - 2.0 * self.delta0).collect();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                s.push(dist2(&pts[i], &pts[j]).sqrt() - 2.0 * self.delta0);
            }
        }
        s
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n() && self.slacks(x).iter().all(|s| *s > 0.0)
    }

    /// Whether any constraint is within the barrier band.
    pub fn in_band(&self, x: &[f64]) -> bool {
        self.slacks(x).iter().any(|s| *s < self.band)
    }

    fn psi(&self, s: f64) -> (f64, f64) {
        if s >= self.band {
            (0.0, 0.0)
        } else if s <= 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            let q = self.band / s - 1.0;
            (self.stiffness * q * q, -2.0 * self.stiffness * q * self.band / (s * s))
        }
    }

    /// Barrier value and gradient.
    pub fn barrier(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let d = self.d();
        let pts = split(x, d);
        let mut val = 0.0;
        let mut grad = vec![0.0; x.len()];
        let step = 1e-7 * self.domain.diameter();
        for (i, p) in pts.iter().enumerate() {
            let (v, dv) = self.psi(self.domain.signed_distance(p) - 2.0 * self.delta0);
            val += v;
            if dv != 0.0 {
                for a in 0..d {
                    let mut q = p.clone();
                    let mut r = p.clone();
                    q[a] += step;
                    r[a] -= step;
                    let g = (self.domain.signed_distance(&q) - self.domain.signed_distance(&r)) / (2.0 * step);
                    grad[i * d + a] += dv * g;
                }
            }
            for (j, q) in pts.iter().enumerate().skip(i + 1) {
                let r = dist2(p, q).sqrt();
                let (v, dv) = self.psi(r - 2.0 * self.delta0);
                val += v;
                if dv != 0.0 {
                    for a in 0..d {
                        let u = (p[a] - q[a]) / r;
                        grad[i * d + a] += dv * u;
                        grad[j * d + a] -= dv * u;
                    }
                }
            }
        }
        (val, grad)
    }

    /// Uniform sample of `D` by rejection from the bounding box.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let d = self.d();
        let (lo, hi) = if d == 2 {
            self.domain.bbox()
        } else {
            ([-1.0, -1.0], [1.0, 1.0])
        };
        for _ in 0..100_000 {
            let x: Vec<f64> = (0..self.n())
                .map(|a| {
                    let c = if d == 2 { a % 2 } else { 0 };
                    let (l, h) = if d == 2 { (lo[c], hi[c]) } else { (-1.0, 1.0) };
                    rng.gen_range(l..h)
                })
                .collect();
            if self.contains(&x) && !self.in_band(&x) {
                return Ok(x);
            }
        }
        Err(Error::NotAdmissible("could not sample the search region".into()))
    }

    /// Points of `∂D` for `k = 1`, and configurations with one constraint active otherwise.
    pub fn boundary_samples(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
        let d = self.d();
        let onto = |p: &[f64]| -> Vec<f64> {
            // move a boundary point inward along the distance gradient to distance 2δ₀
            let mut q = p.to_vec();
            for _ in 0..60 {
                let s = self.domain.signed_distance(&q) - 2.0 * self.delta0;
                if s.abs() < 1e-13 {
                    break;
                }
                let step = 1e-7 * self.domain.diameter();
                let g: Vec<f64> = (0..d)
                    .map(|a| {
                        let mut u = q.clone();
                        let mut v = q.clone();
                        u[a] += step;
                        v[a] -= step;
                        (self.domain.signed_distance(&u) - self.domain.signed_distance(&v)) / (2.0 * step)
                    })
                    .collect();
                let g2: f64 = g.iter().map(|v| v * v).sum();
                if g2 == 0.0 {
                    break;
                }
                for a in 0..d {
                    q[a] -= s * g[a] / g2;
                }
            }
            q
        };
        let base = self.domain.boundary_samples(n);
        let mut out = Vec::with_capacity(n);
        for (t, b) in base.iter().enumerate() {
            let p = onto(b);
            if self.k == 1 {
                out.push(p);
                continue;
            }
            let mut x = self.sample(rng)?;
            let slot = t % self.k;
            x[slot * d..(slot + 1) * d].copy_from_slice(&p);
            out.push(x);
        }
        Ok(out)
    }
}
