//! The reduced functional `φ_k`, the energy `J_ρ` and its expansion in `ε`.

use crate::bubbles::{Ansatz, BubbleConfig};
use crate::constants::ExactConstants;
use crate::error::{Error, Result};
use crate::greens::GreenModel;
use crate::potential::Potential;
use crate::quadrature::graded_radial_rule;
use crate::report::loglog_slope;
use crate::scalar::dist2;
use rayon::prelude::*;
use serde::Serialize;

/// Magnitude of the saturating value returned off the admissible region.
pub const PHI_SENTINEL: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiValue {
    pub value: f64,
    /// `false` when `value` is a sentinel: `-PHI_SENTINEL` on the diagonal, `+PHI_SENTINEL` off `Ω`.
    pub finite: bool,
}

/// `φ_k(ξ) = -Σ_i [2 log V(ξ_i) + H(ξ_i, ξ_i)] - Σ_{i≠j} G(ξ_i, ξ_j)`.
pub fn phi_k(green: &GreenModel, potential: &Potential, xi: &[Vec<f64>]) -> Result<PhiValue> {
    if xi.is_empty() {
        return Err(Error::InvalidConfig("phi_k needs at least one point".into()));
    }
    for p in xi {
        if p.len() != green.dim() {
            return Err(Error::InvalidConfig("point dimension does not match the domain".into()));
        }
        if !green.domain.contains(p) {
            return Ok(PhiValue { value: PHI_SENTINEL, finite: false });
        }
    }
    for (i, p) in xi.iter().enumerate() {
        for q in &xi[i + 1..] {
            if dist2(p, q) <= 1e-24 {
                return Ok(PhiValue { value: -PHI_SENTINEL, finite: false });
            }
        }
    }
    let mut s = 0.0;
    for (i, p) in xi.iter().enumerate() {
        s -= 2.0 * potential.log_value(p)? + green.robin(p)?;
        for q in &xi[i + 1..] {
            s -= 2.0 * green.green(p, q)?;
        }
    }
    if !s.is_finite() {
        return Ok(PhiValue { value: s.signum() * PHI_SENTINEL, finite: false });
    }
    Ok(PhiValue { value: s, finite: true })
}

/// `∇φ_k`, flattened point by point.
pub fn grad_phi_k(green: &GreenModel, potential: &Potential, xi: &[Vec<f64>]) -> Result<Vec<f64>> {
    let clearance = green.grid_spacing().map_or(0.0, |h| 2.0 * h);
    let mut out = Vec::with_capacity(xi.len() * green.dim());
    for (i, p) in xi.iter().enumerate() {
        let gr = green.robin_gradient(p)?;
        let gl = potential.grad_log(p)?;
        let mut g: Vec<f64> = gr.iter().zip(&gl).map(|(r, l)| -r - 2.0 * l).collect();
        for (j, q) in xi.iter().enumerate() {
            if j == i {
                continue;
            }
            let d = dist2(p, q).sqrt();
            if d <= clearance.max(1e-12) {
                return Err(Error::BoundaryProximity { point: p.clone(), distance: d, required: clearance });
            }
            let gx = green.green_grad_x(p, q)?;
            for (a, v) in g.iter_mut().zip(&gx) {
                *a -= 2.0 * v;
            }
        }
        out.extend(g);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub error: f64,
    /// `½ ∫ |(-Δ)^{m/2} U|²`.
    pub quadratic: f64,
    /// `ρ^{2m} ∫ V e^U`.
    pub mass: f64,
}

/// Resolution of the planar energy cubature.
#[derive(Debug, Clone, Copy)]
pub struct Cubature {
    pub angles: usize,
    pub panels: usize,
    pub order: usize,
}

impl Default for Cubature {
    fn default() -> Self {
        Self { angles: 256, panels: 48, order: 8 }
    }
}

impl Cubature {
    fn coarse(self) -> Self {
        Self { angles: self.angles / 2, panels: (self.panels * 2) / 3, order: self.order }
    }
}

/// `J_ρ(U) = ½ ∫ |(-Δ)^{m/2}U|² - ρ^{2m} ∫ V e^U`, evaluated as
/// `½ ∫ U (-Δ)^m U - ρ^{2m} ∫ V e^U` (both boundary conditions kill the boundary terms).
pub fn energy(ansatz: &Ansatz) -> Result<EnergyEstimate> {
    energy_with(ansatz, Cubature::default())
}

pub fn energy_with(ansatz: &Ansatz, cub: Cubature) -> Result<EnergyEstimate> {
    let (fine, coarse) = if ansatz.domain().dim == 2 {
        (planar_terms(ansatz, cub)?, planar_terms(ansatz, cub.coarse())?)
    } else {
        (radial_terms(ansatz, cub.panels * 2)?, radial_terms(ansatz, cub.panels)?)
    };
    let value = fine.0 - fine.1;
    let error = (value - (coarse.0 - coarse.1)).abs();
    if !value.is_finite() {
        return Err(Error::ToleranceNotMet { achieved: f64::INFINITY, requested: 0.0 });
    }
    Ok(EnergyEstimate { value, error, quadratic: fine.0, mass: fine.1 })
}

fn planar_terms(ansatz: &Ansatz, cub: Cubature) -> Result<(f64, f64)> {
    let c = &ansatz.config;
    let k = c.k();
    let rho2m = c.rho.powi(2 * c.m as i32);
    let dom = ansatz.domain();
    let pou = |x: &[f64], i: usize| -> f64 {
        let p = |j: usize| (c.delta(j).powi(2) + dist2(x, &c.xi[j])).powi(-2);
        p(i) / (0..k).map(p).sum::<f64>()
    };
    let dtheta = std::f64::consts::TAU / cub.angles as f64;
    let parts: Vec<(f64, f64)> = (0..k * cub.angles)
        .into_par_iter()
        .map(|job| {
            let (i, a) = (job / cub.angles, job % cub.angles);
            let th = (a as f64 + 0.5) * dtheta;
            let d = [th.cos(), th.sin()];
            let xi = &c.xi[i];
            let mut acc = (0.0, 0.0);
            for (lo, hi) in dom.ray_segments(xi, &d) {
                let first = if lo == 0.0 { c.delta(i) / 8.0 } else { (hi - lo) / cub.panels as f64 };
                let (rs, ws) = graded_radial_rule(lo, hi, first, cub.panels, cub.order);
                for (r, w) in rs.iter().zip(&ws) {
                    let x = [xi[0] + r * d[0], xi[1] + r * d[1]];
                    let u = ansatz.value(&x);
                    let wt = w * r * dtheta * pou(&x, i);
                    acc.0 += wt * 0.5 * u * ansatz.source(&x);
                    acc.1 += wt * rho2m * ansatz.potential.value(&x) * u.exp();
                }
            }
            acc
        })
        .collect();
    Ok(parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1)))
}

fn radial_terms(ansatz: &Ansatz, panels: usize) -> Result<(f64, f64)> {
    let c = &ansatz.config;
    let centered = c.k() == 1 && c.xi[0].iter().all(|v| *v == 0.0);
    if !(ansatz.domain().is_unit_ball() && centered && ansatz.potential.is_constant()) {
        return Err(Error::Unsupported(
            "energies in dimension >= 4 need a single centered bubble and constant potential".into(),
        ));
    }
    let n = ansatz.domain().dim;
    let e = ExactConstants::for_order(c.m)?;
    let omega: f64 = e.omega2m.to_real();
    let rho2m = c.rho.powi(2 * c.m as i32);
    let v = ansatz.potential.value(&c.xi[0]);
    let (rs, ws) = graded_radial_rule(0.0, 1.0, c.delta(0) / 8.0, panels, 10);
    let mut acc = (0.0, 0.0);
    for (r, w) in rs.iter().zip(&ws) {
        let mut x = vec![0.0; n];
        x[0] = *r;
        let u = ansatz.value(&x);
        let wt = omega * w * r.powi(n as i32 - 1);
        acc.0 += wt * 0.5 * u * ansatz.source(&x);
        acc.1 += wt * rho2m * v * u.exp();
    }
    Ok(acc)
}

/// `b_m φ_k + 4m b_m k |log ε| - 2 b_m k (1 + m c₁/c₀)`; the last term is `-4 b_m k` for `m = 1`.
pub fn energy_expansion(m: u32, k: usize, phi: f64, eps: f64) -> Result<f64> {
    let e = ExactConstants::for_order(m)?;
    let b: f64 = e.bm.to_real();
    let ratio = e.c1.coeff / e.c0.coeff;
    let ratio = *ratio.numer() as f64 / *ratio.denom() as f64;
    let k = k as f64;
    Ok(b * phi + 4.0 * m as f64 * b * k * (1.0 / eps).ln() - 2.0 * b * k * (1.0 + m as f64 * ratio))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedReport {
    pub eps: f64,
    pub phi_k: f64,
    pub grad_phi_k: Vec<f64>,
    pub j_rho: f64,
    pub mass: f64,
    /// `J_ρ(U)` minus [`energy_expansion`].
    pub expansion_residual: f64,
    pub quadrature_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionSweep {
    pub reports: Vec<ReducedReport>,
    /// Log-log slope of `|expansion_residual|` against `ε`.
    pub slope: f64,
}

pub fn reduced_report(green: &GreenModel, potential: &Potential, xi: &[Vec<f64>], eps: f64, delta0: f64) -> Result<ReducedReport> {
    let phi = phi_k(green, potential, xi)?;
    if !phi.finite {
        return Err(Error::NotAdmissible("phi_k is not finite at this configuration".into()));
    }
    let grad = grad_phi_k(green, potential, xi)?;
    let cfg = BubbleConfig::select(green, potential, xi.to_vec(), eps, delta0)?;
    let ansatz = Ansatz::build(&cfg, green, potential)?;
    let j = energy(&ansatz)?;
    let expected = energy_expansion(green.m, xi.len(), phi.value, eps)?;
    Ok(ReducedReport {
        eps,
        phi_k: phi.value,
        grad_phi_k: grad,
        j_rho: j.value,
        mass: j.mass,
        expansion_residual: j.value - expected,
        quadrature_error: j.error,
    })
}

/// Check of `J_ρ(U)` against its predicted expansion over an `ε` sweep.
pub fn expansion_check(
    green: &GreenModel,
    potential: &Potential,
    xi: &[Vec<f64>],
    eps_sweep: &[f64],
    delta0: f64,
) -> Result<ExpansionSweep> {
    let reports = eps_sweep
        .iter()
        .map(|&e| reduced_report(green, potential, xi, e, delta0))
        .collect::<Result<Vec<_>>>()?;
    let ys: Vec<f64> = reports.iter().map(|r| r.expansion_residual.abs()).collect();
    let slope = loglog_slope(eps_sweep, &ys);
    Ok(ExpansionSweep { reports, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_values() {
        let g = GreenModel::unit_disc();
        let v = Potential::constant(1.0);
        assert!(phi_k(&g, &v, &[vec![0.0, 0.0]]).unwrap().value.abs() < 1e-14);
        let p = phi_k(&g, &v, &[vec![0.5, 0.0]]).unwrap().value;
        assert!((p + 4.0 * 0.75f64.ln()).abs() < 1e-12);
        let gr = grad_phi_k(&g, &v, &[vec![0.5, 0.0]]).unwrap();
        assert!((gr[0] - 16.0 / 3.0).abs() < 1e-10 && gr[1].abs() < 1e-14);
        let d = phi_k(&g, &v, &[vec![0.1, 0.0], vec![0.1, 0.0]]).unwrap();
        assert!(!d.finite && d.value < 0.0);
    }

    #[test]
    fn disc_center_energy_closed_form() {
        let g = GreenModel::unit_disc();
        let v = Potential::constant(1.0);
        for eps in [0.2, 0.05] {
            let c = BubbleConfig::select(&g, &v, vec![vec![0.0, 0.0]], eps, 0.1).unwrap();
            let a = Ansatz::build(&c, &g, &v).unwrap();
            let j = energy(&a).unwrap();
            let pi = std::f64::consts::PI;
            let e2 = eps * eps;
            let exact = 16.0 * pi * (1.0 / eps).ln() + 8.0 * pi * (1.0 + e2).ln() - 16.0 * pi / (1.0 + e2);
            assert!((j.value - exact).abs() < 1e-8 * exact.abs(), "{} vs {exact}", j.value);
        }
    }
}
