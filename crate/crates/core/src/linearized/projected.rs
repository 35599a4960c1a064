//! The linearized operator `L = -Δ - T` on `Ω_ε` and the projected problem
//! `L φ = h + Σ c_ij χ_i Z_ij`, `Σ_y χ_i Z_ij φ = 0`.

use super::kernel::{KernelBasis, DEFAULT_R0};
use crate::bubbles::ExpandedProblem;
use crate::error::{Error, Result};
use crate::linalg::SparseLu;
use crate::mesh::Operator;
use crate::norms::starstar_norm;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Assembled `L = -Δ_h - T` with homogeneous Dirichlet rows folded in.
#[derive(Debug, Clone)]
pub struct Linearized {
    pub laplacian: Operator,
    pub t: Vec<f64>,
}

pub fn assemble_linearized(problem: &ExpandedProblem) -> Linearized {
    Linearized { laplacian: problem.mesh.neg_laplacian(problem.stencil), t: problem.t.clone() }
}

impl Linearized {
    pub fn n(&self) -> usize {
        self.t.len()
    }

    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        let mut y = self.laplacian.apply(phi, |_| 0.0);
        for ((y, t), p) in y.iter_mut().zip(&self.t).zip(phi) {
            *y -= t * p;
        }
        y
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut t = self.laplacian.triplets();
        t.extend(self.t.iter().enumerate().map(|(k, v)| (k, k, -v)));
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectedSolveResult {
    pub phi: Vec<f64>,
    /// `c[i][j-1]` multiplies `χ_i Z_ij`.
    pub c: Vec<Vec<f64>>,
    /// `‖L φ - h - Σ c χ Z‖_*`.
    pub linear_residual: f64,
    /// `max_ij |Σ_y h² χ_i Z_ij φ| / (h² Σ |φ| + tiny)`.
    pub orthogonality: f64,
    pub phi_sup: f64,
}

/// Factorized augmented system for one configuration.
#[derive(Debug)]
pub struct ProjectedSolver {
    pub op: Linearized,
    pub basis: KernelBasis,
    /// `χ_i Z_ij` sampled at the unknowns, ordered `(i, j)`.
    pub modes: Vec<Vec<f64>>,
    lu: SparseLu,
    /// `L⁻¹ χ_i Z_ij`.
    lg: Vec<Vec<f64>>,
    schur_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    h: f64,
    points: Vec<[f64; 2]>,
    xi_prime: Vec<[f64; 2]>,
    m: u32,
    eps: f64,
}

impl ProjectedSolver {
    pub fn new(problem: &ExpandedProblem) -> Result<Self> {
        Self::with_r0(problem, DEFAULT_R0)
    }

    pub fn with_r0(problem: &ExpandedProblem, r0: f64) -> Result<Self> {
        let op = assemble_linearized(problem);
        let cfg = &problem.ansatz.config;
        let centers: Vec<Vec<f64>> = problem.xi_prime.iter().map(|c| c.to_vec()).collect();
        let basis = KernelBasis::new(cfg.m, cfg.mu.clone(), centers, r0)?;
        for (i, c) in problem.xi_prime.iter().enumerate() {
            let x = problem.mesh.physical(*c);
            let reach = (r0 + 1.0) * problem.eps();
            if problem.ansatz.domain().signed_distance(&x) <= reach {
                return Err(Error::NotAdmissible(format!(
                    "cutoff of bubble {i} (radius {}) leaves the expanded domain",
                    r0 + 1.0
                )));
            }
        }
        let n = op.n();
        let mut modes = Vec::new();
        for i in 0..basis.k() {
            for j in 1..=basis.dim() {
                let col = problem
                    .points
                    .iter()
                    .map(|y| basis.cut_mode(i, j, y))
                    .collect::<Result<Vec<_>>>()?;
                modes.push(col);
            }
        }
        let h = problem.mesh.h;
        let h2 = h * h;
        let lu = SparseLu::factor(n, op.triplets())?;
        let lg = lu.solve_many(&modes)?;
        let q = modes.len();
        let schur = DMatrix::from_fn(q, q, |a, b| h2 * modes[a].iter().zip(&lg[b]).map(|(x, y)| x * y).sum::<f64>());
        let sv = schur.clone().svd(false, false).singular_values;
        let (smax, smin) = (sv.max(), sv.min());
        if !(smin > 1e-12 * smax) {
            return Err(Error::RankDeficient(format!("constraint block has singular values {smin:e} / {smax:e}")));
        }
        let schur_lu = schur.lu();
        Ok(Self {
            op,
            basis,
            modes,
            lu,
            lg,
            schur_lu,
            h,
            points: problem.points.clone(),
            xi_prime: problem.xi_prime.clone(),
            m: cfg.m,
            eps: cfg.eps,
        })
    }

    pub fn n(&self) -> usize {
        self.op.n()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<ProjectedSolveResult> {
        let n = self.n();
        if rhs.len() != n || rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolve("right-hand side must be finite and match the mesh".into()));
        }
        let h2 = self.h * self.h;
        let lh = self.lu.solve(rhs)?;
        let q = self.modes.len();
        let g = DVector::from_fn(q, |a, _| -h2 * self.modes[a].iter().zip(&lh).map(|(x, y)| x * y).sum::<f64>());
        let cv = self
            .schur_lu
            .solve(&g)
            .ok_or_else(|| Error::RankDeficient("constraint block is singular".into()))?;
        let mut phi = lh;
        for (a, col) in self.lg.iter().enumerate() {
            for (p, v) in phi.iter_mut().zip(col) {
                *p += cv[a] * v;
            }
        }
        let x: Vec<f64> = cv.iter().copied().collect();
        let dim = self.basis.dim();
        let c: Vec<Vec<f64>> = x.chunks(dim).map(|s| s.to_vec()).collect();
        let mut res = self.op.apply(&phi);
        for (k, r) in res.iter_mut().enumerate() {
            *r -= rhs[k];
            for (q, col) in self.modes.iter().enumerate() {
                *r -= x[q] * col[k];
            }
        }
        let linear_residual = crate::norms::star_norm_points(&res, &self.points, &self.xi_prime, self.m, self.eps);
        let mass: f64 = h2 * phi.iter().map(|v| v.abs()).sum::<f64>();
        let orthogonality = self
            .modes
            .iter()
            .map(|col| (h2 * col.iter().zip(&phi).map(|(a, b)| a * b).sum::<f64>()).abs())
            .fold(0.0, f64::max)
            / (mass + f64::MIN_POSITIVE);
        let phi_sup = phi.iter().map(|v| v.abs()).fold(0.0, f64::max);
        Ok(ProjectedSolveResult { phi, c, linear_residual, orthogonality, phi_sup })
    }

    /// `Σ_ij c_ij χ_i Z_ij` at the unknowns.
    pub fn multiplier_field(&self, c: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        for (q, col) in self.modes.iter().enumerate() {
            let v = c[q / self.basis.dim()][q % self.basis.dim()];
            for (o, z) in out.iter_mut().zip(col) {
                *o += v * z;
            }
        }
        out
    }
}

/// `‖φ‖_**` of a solution on the problem's mesh.
pub fn solution_starstar(problem: &ExpandedProblem, phi: &[f64]) -> Result<f64> {
    starstar_norm(&problem.field(phi), &problem.xi_prime, problem.m())
}
