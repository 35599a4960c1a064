//! Numerical surrogate of the linking / stable critical level condition.

use super::optimize::{classify, find_minimum, newton_polish, CriticalPoint, SearchOptions};
use super::region::{split, Negated, Objective, SearchRegion};
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum LinkingMode {
    /// `B = B₀ = ∂D`: interior minimum below the boundary values.
    Minimum,
    /// `B` a path between `a` and `b`, `B₀ = {a, b}`.
    MountainPass { a: Vec<f64>, b: Vec<f64> },
    /// Interior maximum above the boundary values.
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkingOutcome {
    Holds,
    Fails,
    BoundaryHit,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkingReport {
    pub outcome: LinkingOutcome,
    /// Estimated critical level `C`.
    pub level: f64,
    /// `sup_{B₀} φ` (minimum mode: `inf_{∂D} φ`; maximum mode: `sup_{∂D} φ`).
    pub reference: f64,
    /// Change of the level over the last relaxation sweeps.
    pub gap: f64,
    pub converged: bool,
    /// Smallest `|φ - C|` over `∂D` samples.
    pub boundary_gap: f64,
    pub critical: Option<CriticalPoint>,
    pub path: Vec<Vec<f64>>,
    pub path_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkingOptions {
    pub images: usize,
    pub max_sweeps: usize,
    pub level_tol: f64,
    pub boundary_samples: usize,
    pub search: SearchOptions,
}

impl Default for LinkingOptions {
    fn default() -> Self {
        Self { images: 25, max_sweeps: 4000, level_tol: 1e-9, boundary_samples: 256, search: SearchOptions::default() }
    }
}

fn boundary_values(region: &SearchRegion, obj: &dyn Objective, opts: &LinkingOptions) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.search.seed ^ 0x5eed);
    let samples = region.boundary_samples(opts.boundary_samples, &mut rng)?;
    samples
        .par_iter()
        .map(|x| obj.value(x).map(|v| v.value))
        .collect()
}

fn extremum(region: &SearchRegion, obj: &dyn Objective, opts: &LinkingOptions, maximize: bool) -> Result<LinkingReport> {
    let res = if maximize {
        let neg = Negated(obj);
        let mut r = find_minimum(region, &neg, &[], &opts.search)?;
        r.best.value = -r.best.value;
        r
    } else {
        find_minimum(region, obj, &[], &opts.search)?
    };
    let bvals = boundary_values(region, obj, opts)?;
    let reference = if maximize {
        bvals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        bvals.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let crit = res.best.clone();
    let level = crit.value;
    let boundary_gap = bvals.iter().map(|v| (v - level).abs()).fold(f64::INFINITY, f64::min);
    let outcome = if crit.kind == super::optimize::PointKind::BoundaryRejected {
        LinkingOutcome::BoundaryHit
    } else if (maximize && level > reference + opts.level_tol) || (!maximize && level < reference - opts.level_tol) {
        LinkingOutcome::Holds
    } else {
        LinkingOutcome::Fails
    };
    let crit = if maximize && crit.kind != super::optimize::PointKind::BoundaryRejected {
        classify(region, obj, &crit.xi, opts.search.degenerate_rel)?
    } else {
        crit
    };
    Ok(LinkingReport {
        outcome,
        level,
        reference,
        gap: 0.0,
        converged: true,
        boundary_gap,
        path: vec![crit.xi.iter().flatten().copied().collect()],
        path_values: vec![level],
        critical: Some(crit),
    })
}

fn reparametrize(path: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = path.len();
    let mut s = vec![0.0; n];
    for i in 1..n {
        let d: f64 = path[i].iter().zip(&path[i - 1]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        s[i] = s[i - 1] + d;
    }
    let total = s[n - 1];
    if total == 0.0 {
        return path.to_vec();
    }
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for i in 0..n {
        let target = total * i as f64 / (n - 1) as f64;
        while seg + 1 < n - 1 && s[seg + 1] < target {
            seg += 1;
        }
        let w = if s[seg + 1] > s[seg] { (target - s[seg]) / (s[seg + 1] - s[seg]) } else { 0.0 };
        out.push(path[seg].iter().zip(&path[seg + 1]).map(|(a, b)| a + w.clamp(0.0, 1.0) * (b - a)).collect());
    }
    out
}

/// String-method relaxation of the straight path from `a` to `b`, then Newton on the top image.
fn mountain_pass(region: &SearchRegion, obj: &dyn Objective, a: &[f64], b: &[f64], opts: &LinkingOptions) -> Result<LinkingReport> {
    if !(region.contains(a) && region.contains(b)) {
        return Err(Error::NotAdmissible("mountain-pass endpoints must lie in the search region".into()));
    }
    let n = opts.images.max(5);
    let mut path: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect()
        })
        .collect();
    let eval = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
        if !region.contains(x) {
            return Ok((f64::INFINITY, vec![0.0; x.len()]));
        }
        let v = obj.value(x)?;
        let (bv, bg) = region.barrier(x);
        let g = obj.gradient(x)?;
        Ok((v.value + bv, g.iter().zip(&bg).map(|(p, q)| p + q).collect()))
    };
    let mut level = f64::INFINITY;
    let mut gap = f64::INFINITY;
    let mut converged = false;
    let mut history: Vec<f64> = Vec::new();
    for _ in 0..opts.max_sweeps {
        let evals: Vec<(f64, Vec<f64>)> = path[1..n - 1].par_iter().map(|x| eval(x)).collect::<Result<Vec<_>>>()?;
        if evals.iter().any(|(f, _)| !f.is_finite()) {
            break;
        }
        let seg = path[0].iter().zip(&path[1]).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        let gmax = evals.iter().map(|(_, g)| g.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max);
        if gmax == 0.0 {
            converged = true;
            break;
        }
        let tau = 0.2 * seg / gmax;
        for (x, (_, g)) in path[1..n - 1].iter_mut().zip(&evals) {
            // remove the tangential component so images do not slide
            for (xa, ga) in x.iter_mut().zip(g) {
                *xa -= tau * ga;
            }
        }
        path = reparametrize(&path);
        let top = evals.iter().map(|(f, _)| *f).fold(f64::NEG_INFINITY, f64::max);
        history.push(top);
        level = top;
        if history.len() > 20 {
            gap = (history[history.len() - 21] - top).abs();
            if gap < opts.level_tol {
                converged = true;
                break;
            }
        }
    }
    let path_values: Vec<f64> = path.par_iter().map(|x| obj.value(x).map(|v| v.value)).collect::<Result<Vec<_>>>()?;
    let (imax, _) = path_values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    let tol = opts.search.tolerance(obj);
    let top = newton_polish(region, obj, &path[imax], 30)?;
    let crit = classify(region, obj, &split(&top, region.d()), opts.search.degenerate_rel)?;
    if crit.grad_norm < tol && crit.value.is_finite() {
        level = crit.value;
    } else if level.is_finite() {
        level = path_values[imax];
    }
    let reference = obj.value(a)?.value.max(obj.value(b)?.value);
    let hit = path.iter().any(|x| !region.contains(x) || region.in_band(x));
    let bvals = boundary_values(region, obj, opts)?;
    let boundary_gap = bvals.iter().map(|v| (v - level).abs()).fold(f64::INFINITY, f64::min);
    let outcome = if hit {
        LinkingOutcome::BoundaryHit
    } else if !converged {
        LinkingOutcome::Inconclusive
    } else if level > reference + opts.level_tol && boundary_gap > opts.level_tol {
        LinkingOutcome::Holds
    } else {
        LinkingOutcome::Fails
    };
    Ok(LinkingReport { outcome, level, reference, gap, converged, boundary_gap, critical: Some(crit), path, path_values })
}

pub fn check_linking_level(region: &SearchRegion, obj: &dyn Objective, mode: &LinkingMode, opts: &LinkingOptions) -> Result<LinkingReport> {
    match mode {
        LinkingMode::Minimum => extremum(region, obj, opts, false),
        LinkingMode::Maximum => extremum(region, obj, opts, true),
        LinkingMode::MountainPass { a, b } => mountain_pass(region, obj, a, b, opts),
    }
}
