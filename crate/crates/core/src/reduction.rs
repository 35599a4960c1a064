//! The intermediate nonlinear problem, the reduced energy `F_ε` and the full
//! construction of a concentrating solution.

use crate::bubbles::{Ansatz, BubbleConfig, ExpandedProblem, ResidualMode};
use crate::config::{ProblemConfig, Tolerances};
use crate::constants::ExactConstants;
use crate::error::{Error, Result};
use crate::greens::GreenModel;
use crate::grid::{Frame, GridField};
use crate::linearized::{solution_starstar, ProjectedSolver};
use crate::mesh::Stencil;
use crate::potential::Potential;
use crate::reduced::energy;
use crate::search::{find_minimum, PhiObjective, SearchOptions, SearchRegion};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Mesh and solver settings for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReductionOptions {
    pub mesh_h: f64,
    pub stencil: Stencil,
    pub mode: ResidualMode,
    pub r0: f64,
    pub max_iterations: usize,
    pub tol: f64,
    /// First-iterate check `‖φ₁‖_∞ ≤ C ε |log ε|`.
    pub ball_constant: f64,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self {
            mesh_h: 0.1,
            stencil: Stencil::Second,
            mode: ResidualMode::Analytic,
            r0: crate::linearized::DEFAULT_R0,
            max_iterations: 50,
            tol: 1e-10,
            ball_constant: 100.0,
        }
    }
}

impl ReductionOptions {
    pub fn from_config(cfg: &ProblemConfig, tol: &Tolerances) -> Self {
        Self {
            mesh_h: cfg.mesh_h,
            stencil: cfg.stencil,
            mode: cfg.residual_mode,
            r0: cfg.cutoff_r0,
            max_iterations: tol.max_fixed_point_iterations,
            tol: tol.fixed_point,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntermediateSolution {
    pub phi: Vec<f64>,
    pub c: Vec<Vec<f64>>,
    pub iterations: usize,
    pub phi_sup: f64,
    pub linear_residual: f64,
    /// `‖φ_n‖_∞` per iterate.
    pub history: Vec<f64>,
}

/// Fixed point `φ = Q(N(φ) - r)` with `Q` the projected solve.
pub fn solve_intermediate_with(
    problem: &ExpandedProblem,
    solver: &ProjectedSolver,
    r: &[f64],
    opts: &ReductionOptions,
) -> Result<IntermediateSolution> {
    let n = problem.n();
    let mut phi = vec![0.0; n];
    let mut history = Vec::new();
    let mut growth = 0;
    let mut last_change = f64::INFINITY;
    let eps = problem.eps();
    for it in 1..=opts.max_iterations {
        let nl = problem.nonlinear(&phi);
        let rhs: Vec<f64> = nl.iter().zip(r).map(|(a, b)| a - b).collect();
        let sol = solver.solve(&rhs)?;
        let change = sol.phi.iter().zip(&phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let sup = sol.phi_sup;
        if it == 1 && sup > opts.ball_constant * eps * (1.0 / eps).ln().max(1.0) {
            return Err(Error::ContractionFailure { iterations: 1, last_norm: sup });
        }
        // growth of the increment ‖φ_{n+1} - φ_n‖_∞, not of ‖φ_n‖_∞
        if change > last_change {
            growth += 1;
        } else {
            growth = 0;
        }
        last_change = change;
        history.push(sup);
        if growth >= 3 || !sup.is_finite() {
            return Err(Error::ContractionFailure { iterations: it, last_norm: change });
        }
        phi = sol.phi;
        if change <= opts.tol * sup.max(f64::MIN_POSITIVE) || sup == 0.0 {
            return Ok(IntermediateSolution {
                phi,
                c: sol.c,
                iterations: it,
                phi_sup: sup,
                linear_residual: sol.linear_residual,
                history,
            });
        }
    }
    Err(Error::ContractionFailure { iterations: opts.max_iterations, last_norm: *history.last().unwrap_or(&f64::NAN) })
}

pub fn solve_intermediate(problem: &ExpandedProblem, solver: &ProjectedSolver, opts: &ReductionOptions) -> Result<IntermediateSolution> {
    solve_intermediate_with(problem, solver, &problem.r, opts)
}

/// `θ = J[U + φ] - J[U]` on the expanded mesh (`m = 1`):
/// `Σ h² [(-ΔW) φ + ½ φ (-Δφ) - T (e^φ - 1)]`.
pub fn theta(problem: &ExpandedProblem, solver: &ProjectedSolver, phi: &[f64]) -> f64 {
    let lap = solver.op.laplacian.apply(phi, |_| 0.0);
    let h2 = problem.mesh.h * problem.mesh.h;
    h2 * (0..problem.n())
        .map(|k| problem.source[k] * phi[k] + 0.5 * phi[k] * lap[k] - problem.t[k] * phi[k].exp_m1())
        .sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedEnergy {
    pub f_eps: f64,
    pub j_u: f64,
    pub theta: f64,
    pub c: Vec<Vec<f64>>,
    pub mass: f64,
}

/// Everything computed at one configuration.
pub struct Stage {
    pub ansatz: Ansatz,
    pub problem: ExpandedProblem,
    pub solver: ProjectedSolver,
    pub solution: IntermediateSolution,
    pub energy: ReducedEnergy,
}

pub fn stage(green: &GreenModel, potential: &Potential, xi: &[Vec<f64>], eps: f64, delta0: f64, opts: &ReductionOptions) -> Result<Stage> {
    if green.m != 1 {
        return Err(Error::Unsupported("the nonlinear reduction is implemented for m = 1".into()));
    }
    let cfg = BubbleConfig::select(green, potential, xi.to_vec(), eps, delta0)?;
    let ansatz = Ansatz::build(&cfg, green, potential)?;
    let problem = ExpandedProblem::new(&ansatz, opts.mesh_h, opts.mode, opts.stencil)?;
    let solver = ProjectedSolver::with_r0(&problem, opts.r0)?;
    let solution = solve_intermediate(&problem, &solver, opts)?;
    let j = energy(&ansatz)?;
    let th = theta(&problem, &solver, &solution.phi);
    let h2 = problem.mesh.h * problem.mesh.h;
    let extra: f64 = h2 * problem.t.iter().zip(&solution.phi).map(|(t, p)| t * p.exp_m1()).sum::<f64>();
    let energy = ReducedEnergy { f_eps: j.value + th, j_u: j.value, theta: th, c: solution.c.clone(), mass: j.mass + extra };
    Ok(Stage { ansatz, problem, solver, solution, energy })
}

/// `F_ε(ξ) = J_ρ[U(ξ) + φ_ξ]`.
pub fn reduced_energy_f(green: &GreenModel, potential: &Potential, xi: &[Vec<f64>], eps: f64, delta0: f64, opts: &ReductionOptions) -> Result<ReducedEnergy> {
    Ok(stage(green, potential, xi, eps, delta0, opts)?.energy)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionDiagnostics {
    pub xi: Vec<Vec<f64>>,
    pub mu: Vec<f64>,
    pub eps: f64,
    pub rho: f64,
    pub c: Vec<Vec<f64>>,
    pub max_abs_c: f64,
    pub multiplier_tolerance: f64,
    pub iterations: usize,
    pub phi_sup: f64,
    pub phi_starstar: f64,
    pub linear_residual: f64,
    /// `‖-Δ_h φ + (-ΔW) - V e^{W+φ}‖_*` with `-ΔW` as used in `R`.
    pub pde_residual: f64,
    /// Same with the stencil applied to `W` as well.
    pub pde_residual_discrete: f64,
    pub residual_star: f64,
    pub mass: f64,
    pub mass_ratio: f64,
    pub j_u: f64,
    pub theta: f64,
    pub f_eps: f64,
    pub f_gradient: Option<Vec<f64>>,
    pub outer_iterations: usize,
    pub phi_critical: Vec<Vec<f64>>,
    pub sup_near: f64,
    pub sup_far: f64,
}

pub struct ReductionResult {
    pub diagnostics: SolutionDiagnostics,
    /// `u` on the physical-frame grid `x = ε y`.
    pub u_final: GridField,
    pub phi: GridField,
}

fn physical_field(problem: &ExpandedProblem, values: &[f64]) -> GridField {
    let eps = problem.eps();
    let mut f = problem.mesh.to_field(values, Frame::Physical, |_| 0.0);
    f.h *= eps;
    f.origin = [f.origin[0] * eps, f.origin[1] * eps];
    f
}

fn max_abs(c: &[Vec<f64>]) -> f64 {
    c.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Like [`construct_solution`] but returns the result even when the multipliers do not vanish.
pub fn construct_candidate(cfg: &ProblemConfig, tol: &Tolerances, search: &SearchOptions) -> Result<ReductionResult> {
    cfg.validate()?;
    if cfg.m != 1 {
        return Err(Error::Unsupported("the nonlinear reduction is implemented for m = 1".into()));
    }
    let green = cfg.green()?;
    let domain = cfg.domain()?;
    let opts = ReductionOptions::from_config(cfg, tol);
    let region = SearchRegion::new(&domain, cfg.k, cfg.delta0)?;
    let obj = PhiObjective { green: &green, potential: &cfg.potential };
    let seeds: Vec<Vec<f64>> = cfg.seed_xi.iter().map(|s| s.iter().flatten().copied().collect()).collect();
    let found = find_minimum(&region, &obj, &seeds, search)?;
    if found.best.kind == crate::search::PointKind::BoundaryRejected {
        return Err(Error::NoCriticalPoint("no interior critical point of phi_k in the admissible region".into()));
    }
    let phi_critical = found.best.xi.clone();
    let b: f64 = ExactConstants::for_order(1)?.bm.to_real();
    let d = domain.dim;
    let mut xi = phi_critical.clone();
    let mut st = stage(&green, &cfg.potential, &xi, cfg.eps, cfg.delta0, &opts)?;
    let mut f_gradient = None;
    let mut outer = 0;
    let accept = |s: &Stage| max_abs(&s.solution.c) < tol.multiplier.max(10.0 * s.solution.linear_residual);
    while !accept(&st) && outer < 6 {
        outer += 1;
        // quasi-Newton step on F_ε with the Hessian model b ∇²φ_k
        let x: Vec<f64> = xi.iter().flatten().copied().collect();
        let step = 1e-4 * domain.diameter();
        let mut g = vec![0.0; x.len()];
        for a in 0..x.len() {
            let mut p = x.clone();
            let mut q = x.clone();
            p[a] += step;
            q[a] -= step;
            let fp = reduced_energy_f(&green, &cfg.potential, &crate::search::region::split(&p, d), cfg.eps, cfg.delta0, &opts)?;
            let fq = reduced_energy_f(&green, &cfg.potential, &crate::search::region::split(&q, d), cfg.eps, cfg.delta0, &opts)?;
            g[a] = (fp.f_eps - fq.f_eps) / (2.0 * step);
        }
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        f_gradient = Some(g.clone());
        if gn < tol.gradient {
            break;
        }
        let hess = crate::search::optimize::fd_hessian(&|y: &[f64]| crate::search::Objective::gradient(&obj, y), &x, 1e-5 * domain.diameter())?;
        let model = DMatrix::from_fn(x.len(), x.len(), |i, j| b * hess[(i, j)]);
        let Some(dx) = model.lu().solve(&DVector::from_column_slice(&g)) else { break };
        let xn: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, s)| a - s).collect();
        if !region.contains(&xn) {
            break;
        }
        xi = crate::search::region::split(&xn, d);
        st = stage(&green, &cfg.potential, &xi, cfg.eps, cfg.delta0, &opts)?;
    }
    let tol_c = tol.multiplier.max(10.0 * st.solution.linear_residual);
    let max_c = max_abs(&st.solution.c);
    let lambda: f64 = ExactConstants::for_order(1)?.lambda2m.to_real();
    let p = &st.problem;
    let phi = &st.solution.phi;
    // residuals of the final u = W + φ
    let lap_phi = st.solver.op.laplacian.apply(phi, |_| 0.0);
    let te: Vec<f64> = p.t.iter().zip(phi).map(|(t, f)| t * f.exp()).collect();
    let res: Vec<f64> = (0..p.n()).map(|k| p.source[k] + lap_phi[k] - te[k]).collect();
    let full = st.solver.op.laplacian.apply(&p.w.iter().zip(phi).map(|(a, b)| a + b).collect::<Vec<_>>(), |y| st.ansatz.w(&y));
    let res_d: Vec<f64> = (0..p.n()).map(|k| full[k] - te[k]).collect();
    let shift = 2.0 * (st.ansatz.config.rho * cfg.eps).ln();
    let u: Vec<f64> = p.w.iter().zip(phi).map(|(w, f)| w + f - shift).collect();
    let (mut near, mut far) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (k, y) in p.points.iter().enumerate() {
        let x = [y[0] * cfg.eps, y[1] * cfg.eps];
        let close = xi.iter().any(|q| (x[0] - q[0]).hypot(x[1] - q[1]) < cfg.delta0);
        if close {
            near = near.max(u[k]);
        } else {
            far = far.max(u[k]);
        }
    }
    let phi_starstar = solution_starstar(p, phi).unwrap_or(f64::NAN);
    let diagnostics = SolutionDiagnostics {
        xi: xi.clone(),
        mu: st.ansatz.config.mu.clone(),
        eps: cfg.eps,
        rho: st.ansatz.config.rho,
        c: st.solution.c.clone(),
        max_abs_c: max_c,
        multiplier_tolerance: tol_c,
        iterations: st.solution.iterations,
        phi_sup: st.solution.phi_sup,
        phi_starstar,
        linear_residual: st.solution.linear_residual,
        pde_residual: p.star(&res),
        pde_residual_discrete: p.star(&res_d),
        residual_star: p.residual_star(),
        mass: st.energy.mass,
        mass_ratio: st.energy.mass / (cfg.k as f64 * lambda),
        j_u: st.energy.j_u,
        theta: st.energy.theta,
        f_eps: st.energy.f_eps,
        f_gradient,
        outer_iterations: outer,
        phi_critical,
        sup_near: near,
        sup_far: far,
    };
    Ok(ReductionResult { u_final: physical_field(p, &u), phi: p.field(phi), diagnostics })
}

impl ReductionResult {
    pub fn accepted(&self) -> bool {
        self.diagnostics.max_abs_c < self.diagnostics.multiplier_tolerance
    }
}

/// Locates a critical point of `F_ε` near the minimum of `φ_k` and returns the corrected solution.
pub fn construct_solution(cfg: &ProblemConfig, tol: &Tolerances, search: &SearchOptions) -> Result<ReductionResult> {
    let r = construct_candidate(cfg, tol, search)?;
    if !r.accepted() {
        return Err(Error::MultipliersNotVanishing { max_abs: r.diagnostics.max_abs_c, tolerance: r.diagnostics.multiplier_tolerance });
    }
    Ok(r)
}
