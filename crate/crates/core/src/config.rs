//! Serializable problem description shared by the library drivers and the CLI.

use crate::bubbles::ResidualMode;
use crate::domain::{Domain, DomainSpec};
use crate::error::{Error, Result};
use crate::greens::{BoundaryCondition, GreenModel};
use crate::mesh::Stencil;
use crate::potential::Potential;
use serde::{Deserialize, Serialize};

fn one() -> u32 {
    1
}
fn default_eps() -> f64 {
    0.05
}
fn default_delta0() -> f64 {
    0.05
}
fn default_mesh_h() -> f64 {
    0.1
}
fn default_r0() -> f64 {
    crate::linearized::DEFAULT_R0
}
fn default_mode() -> ResidualMode {
    ResidualMode::Analytic
}
fn default_stencil() -> Stencil {
    Stencil::Second
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default = "one")]
    pub m: u32,
    #[serde(default)]
    pub boundary: BoundaryCondition,
    pub domain: DomainSpec,
    #[serde(default)]
    pub potential: Potential,
    /// Number of concentration points.
    pub k: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_delta0")]
    pub delta0: f64,
    /// Starting configuration; otherwise found by multi-start search.
    #[serde(default)]
    pub seed_xi: Option<Vec<Vec<f64>>>,
    /// Spacing of the physical grid for grid Green functions.
    #[serde(default)]
    pub green_h: Option<f64>,
    /// Spacing of the expanded-domain mesh.
    #[serde(default = "default_mesh_h")]
    pub mesh_h: f64,
    #[serde(default = "default_stencil")]
    pub stencil: Stencil,
    #[serde(default = "default_mode")]
    pub residual_mode: ResidualMode,
    #[serde(default = "default_r0")]
    pub cutoff_r0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Accepted `max |c_ij|` is `max(multiplier, 10 · linear residual)`.
    pub multiplier: f64,
    /// Gradient tolerance for `F_ε`.
    pub gradient: f64,
    /// Relative change stopping the fixed point.
    pub fixed_point: f64,
    pub max_fixed_point_iterations: usize,
    /// Gradient tolerance for critical points of `φ_k` with analytic Green functions.
    pub search_gradient: f64,
    /// Same with grid Green functions.
    pub search_gradient_grid: f64,
    /// Relative threshold for flagging a degenerate Hessian.
    pub degenerate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            multiplier: 1e-6,
            gradient: 1e-6,
            fixed_point: 1e-10,
            max_fixed_point_iterations: 50,
            search_gradient: 1e-8,
            search_gradient_grid: 1e-5,
            degenerate: 1e-6,
        }
    }
}

impl ProblemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidOrder(0));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        for (name, v) in [("eps", self.eps), ("delta0", self.delta0), ("mesh_h", self.mesh_h), ("cutoff_r0", self.cutoff_r0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if let Some(h) = self.green_h {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::InvalidConfig("green_h must be positive".into()));
            }
        }
        if let Some(xi) = &self.seed_xi {
            if xi.len() != self.k {
                return Err(Error::InvalidConfig(format!("seed_xi has {} points, k = {}", xi.len(), self.k)));
            }
        }
        self.potential.validate()
    }

    pub fn domain(&self) -> Result<Domain> {
        Domain::new(self.domain.clone(), self.m)
    }

    pub fn green(&self) -> Result<GreenModel> {
        self.validate()?;
        GreenModel::new(self.m, self.boundary, &self.domain()?, self.green_h)
    }
}
