//! Multi-start barrier descent, Newton polish and Hessian classification.

use super::region::{split, Objective, SearchRegion};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum PointKind {
    Min,
    Max,
    Saddle { index: usize },
    BoundaryRejected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub xi: Vec<Vec<f64>>,
    pub value: f64,
    pub grad_norm: f64,
    pub kind: PointKind,
    pub hessian_eigs: Vec<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchOptions {
    pub random_starts: usize,
    pub seed: u64,
    /// Defaults to `1e-8` for analytic objectives and `1e-5` otherwise.
    pub grad_tol: Option<f64>,
    pub max_iterations: usize,
    pub degenerate_rel: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { random_starts: 32, seed: 0, grad_tol: None, max_iterations: 500, degenerate_rel: 1e-6 }
    }
}

impl SearchOptions {
    pub fn tolerance(&self, obj: &dyn Objective) -> f64 {
        self.grad_tol.unwrap_or(if obj.analytic() { 1e-8 } else { 1e-5 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub best: CriticalPoint,
    /// Distinct accepted local minima, best first.
    pub candidates: Vec<CriticalPoint>,
    pub starts: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Objective plus barrier; `+∞` outside `D`.
fn total(region: &SearchRegion, obj: &dyn Objective, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    if !region.contains(x) {
        return Ok((f64::INFINITY, vec![0.0; x.len()]));
    }
    let v = obj.value(x)?;
    if !v.finite {
        return Ok((f64::INFINITY, vec![0.0; x.len()]));
    }
    let (b, gb) = region.barrier(x);
    if !b.is_finite() {
        return Ok((f64::INFINITY, vec![0.0; x.len()]));
    }
    let g = obj.gradient(x)?;
    Ok((v.value + b, g.iter().zip(&gb).map(|(a, b)| a + b).collect()))
}

fn fd_step(region: &SearchRegion, obj: &dyn Objective) -> f64 {
    region.domain.diameter() * if obj.analytic() { 1e-5 } else { 1e-4 }
}

/// Symmetrized central-difference Hessian of `grad`.
pub fn fd_hessian(grad: &dyn Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64], step: f64) -> Result<DMatrix<f64>> {
    let n = x.len();
    let mut h = DMatrix::zeros(n, n);
    for b in 0..n {
        let mut p = x.to_vec();
        let mut q = x.to_vec();
        p[b] += step;
        q[b] -= step;
        let gp = grad(&p)?;
        let gq = grad(&q)?;
        for a in 0..n {
            h[(a, b)] = (gp[a] - gq[a]) / (2.0 * step);
        }
    }
    Ok((&h + h.transpose()) * 0.5)
}

fn bfgs(region: &SearchRegion, obj: &dyn Objective, x0: &[f64], tol: f64, max_it: usize) -> Result<Vec<f64>> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut f, mut g) = total(region, obj, &x)?;
    if !f.is_finite() {
        return Ok(x);
    }
    let mut hinv = DMatrix::<f64>::identity(n, n) * (0.01 * region.domain.diameter() / norm(&g).max(1e-12));
    for _ in 0..max_it {
        if norm(&g) < 0.1 * tol {
            break;
        }
        let gv = DVector::from_column_slice(&g);
        let mut p = -(&hinv * &gv);
        if p.dot(&gv) >= 0.0 {
            hinv = DMatrix::identity(n, n) * (0.01 * region.domain.diameter() / norm(&g).max(1e-12));
            p = -(&hinv * &gv);
        }
        let slope = p.dot(&gv);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(p.iter()).map(|(a, b)| a + t * b).collect();
            let (fnew, gnew) = total(region, obj, &xn)?;
            if fnew.is_finite() && fnew <= f + 1e-4 * t * slope {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else { break };
        let s = DVector::from_iterator(n, xn.iter().zip(&x).map(|(a, b)| a - b));
        let y = DVector::from_iterator(n, gnew.iter().zip(&g).map(|(a, b)| a - b));
        let sy = s.dot(&y);
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(n, n);
            let a = &i - rho * &s * y.transpose();
            let b = &i - rho * &y * s.transpose();
            hinv = &a * &hinv * &b + rho * &s * s.transpose();
        }
        let done = (f - fnew).abs() <= 1e-16 * f.abs().max(1.0) && norm(&s.as_slice().to_vec()) < 1e-14;
        x = xn;
        f = fnew;
        g = gnew;
        if done {
            break;
        }
    }
    Ok(x)
}

/// Newton iteration on `∇f = 0` (any index), backtracking on `|∇f|` until no further decrease.
pub fn newton_polish(region: &SearchRegion, obj: &dyn Objective, x0: &[f64], max_it: usize) -> Result<Vec<f64>> {
    let step = fd_step(region, obj);
    let mut x = x0.to_vec();
    let grad = |y: &[f64]| -> Result<Vec<f64>> {
        let (f, g) = total(region, obj, y)?;
        if !f.is_finite() {
            return Err(Error::NotAdmissible("left the search region".into()));
        }
        Ok(g)
    };
    let Ok(mut g) = grad(&x) else { return Ok(x) };
    for _ in 0..max_it {
        let gn = norm(&g);
        if gn == 0.0 {
            break;
        }
        let Ok(h) = fd_hessian(&grad, &x, step) else { break };
        let Some(p) = h.lu().solve(&DVector::from_column_slice(&g)) else { break };
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let xn: Vec<f64> = x.iter().zip(p.iter()).map(|(a, b)| a - t * b).collect();
            if let Ok(gnew) = grad(&xn) {
                if norm(&gnew) < gn {
                    x = xn;
                    g = gnew;
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(x)
}

/// Points sorted lexicographically, so relabelings give the same output.
fn canonical(x: &[f64], d: usize) -> Vec<Vec<f64>> {
    let mut pts = split(x, d);
    pts.sort_by(|a, b| a.iter().zip(b).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    pts
}

/// Hessian signature of `obj` at `xi`.
pub fn classify(region: &SearchRegion, obj: &dyn Objective, xi: &[Vec<f64>], degenerate_rel: f64) -> Result<CriticalPoint> {
    let x: Vec<f64> = xi.iter().flatten().copied().collect();
    let v = obj.value(&x)?;
    let g = obj.gradient(&x)?;
    let grad = |y: &[f64]| obj.gradient(y);
    let h = fd_hessian(&grad, &x, fd_step(region, obj))?;
    let eig = SymmetricEigen::new(h);
    let mut eigs: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    let scale = eigs.iter().map(|e| e.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let degenerate = eigs.iter().any(|e| e.abs() < degenerate_rel * scale);
    let neg = eigs.iter().filter(|e| **e < -degenerate_rel * scale).count();
    let pos = eigs.iter().filter(|e| **e > degenerate_rel * scale).count();
    let kind = if !region.contains(&x) || region.in_band(&x) {
        PointKind::BoundaryRejected
    } else if neg == 0 {
        PointKind::Min
    } else if pos == 0 {
        PointKind::Max
    } else {
        PointKind::Saddle { index: neg }
    };
    let _ = pos;
    Ok(CriticalPoint { xi: xi.to_vec(), value: v.value, grad_norm: norm(&g), kind, hessian_eigs: eigs, degenerate })
}

/// Local minimum from one start; `None` if it does not converge inside `D`.
pub fn local_minimum(region: &SearchRegion, obj: &dyn Objective, x0: &[f64], opts: &SearchOptions) -> Result<Option<CriticalPoint>> {
    let tol = opts.tolerance(obj);
    let x = bfgs(region, obj, x0, tol, opts.max_iterations)?;
    let x = newton_polish(region, obj, &x, 20)?;
    if !region.contains(&x) || region.in_band(&x) {
        return Ok(None);
    }
    let g = obj.gradient(&x)?;
    if norm(&g) >= tol {
        return Ok(None);
    }
    let cp = classify(region, obj, &canonical(&x, region.d()), opts.degenerate_rel)?;
    Ok(Some(cp))
}

fn rejected(region: &SearchRegion, x: &[f64]) -> CriticalPoint {
    CriticalPoint {
        xi: canonical(x, region.d()),
        value: f64::NAN,
        grad_norm: f64::NAN,
        kind: PointKind::BoundaryRejected,
        hessian_eigs: Vec::new(),
        degenerate: false,
    }
}

/// Multi-start minimization of `obj` over `D`; the best point has lowest value,
/// ties broken lexicographically.
pub fn find_minimum(region: &SearchRegion, obj: &dyn Objective, seeds: &[Vec<f64>], opts: &SearchOptions) -> Result<SearchResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<Vec<f64>> = seeds.iter().filter(|s| s.len() == region.n()).cloned().collect();
    for _ in 0..opts.random_starts {
        starts.push(region.sample(&mut rng)?);
    }
    if starts.is_empty() {
        return Err(Error::InvalidConfig("no starting points".into()));
    }
    let found: Vec<Option<CriticalPoint>> = starts
        .par_iter()
        .map(|s| local_minimum(region, obj, s, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut accepted: Vec<CriticalPoint> = found.into_iter().flatten().filter(|c| c.kind == PointKind::Min || c.degenerate).collect();
    accepted.sort_by(|a, b| {
        a.value.total_cmp(&b.value).then_with(|| {
            let fa: Vec<f64> = a.xi.iter().flatten().copied().collect();
            let fb: Vec<f64> = b.xi.iter().flatten().copied().collect();
            fa.iter().zip(&fb).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let mut distinct: Vec<CriticalPoint> = Vec::new();
    for c in accepted {
        let x: Vec<f64> = c.xi.iter().flatten().copied().collect();
        let dup = distinct.iter().any(|d| {
            let y: Vec<f64> = d.xi.iter().flatten().copied().collect();
            norm(&x.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-5
        });
        if !dup {
            distinct.push(c);
        }
    }
    let best = distinct.first().cloned().unwrap_or_else(|| rejected(region, &starts[0]));
    Ok(SearchResult { best, candidates: distinct, starts: starts.len() })
}
