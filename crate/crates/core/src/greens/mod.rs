//! Green functions `(-Δ)^m G(·, ξ) = Λ_{2m} δ_ξ` with their regular parts and Robin functions.

pub mod boggio;
pub mod disc;
pub mod grid2d;
pub mod navier;

use crate::domain::{Domain, DomainSpec};
use crate::error::{Error, Result};
use crate::scalar::dist2;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    #[default]
    Dirichlet,
    Navier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenMethod {
    DiscImages,
    BoggioBall,
    NavierBallIterated,
    Grid2d,
}

#[derive(Debug, Clone)]
enum Kernel {
    Disc,
    Boggio(boggio::Boggio),
    Navier(navier::NavierBall),
    Grid(Arc<grid2d::Grid2DGreen>),
}

/// Evaluator for `G`, `H`, the Robin function and gradients on one domain.
#[derive(Debug, Clone)]
pub struct GreenModel {
    pub m: u32,
    pub bc: BoundaryCondition,
    pub domain: Domain,
    kernel: Kernel,
}

/// `K(x, ξ) = 4m log(1/|x - ξ|)`.
#[inline]
pub fn singular_part(m: u32, x: &[f64], xi: &[f64]) -> f64 {
    -2.0 * m as f64 * dist2(x, xi).ln()
}

impl GreenModel {
    /// Picks the natural method: images on the disc, Boggio / Navier on balls, grid otherwise.
    pub fn new(m: u32, bc: BoundaryCondition, domain: &Domain, grid_h: Option<f64>) -> Result<Self> {
        let method = match (&domain.spec, m, bc) {
            (DomainSpec::UnitBall, 1, _) => GreenMethod::DiscImages,
            (DomainSpec::UnitBall, _, BoundaryCondition::Dirichlet) => GreenMethod::BoggioBall,
            (DomainSpec::UnitBall, _, BoundaryCondition::Navier) => GreenMethod::NavierBallIterated,
            _ => GreenMethod::Grid2d,
        };
        Self::with_method(m, bc, domain, method, grid_h)
    }

    pub fn with_method(
        m: u32,
        bc: BoundaryCondition,
        domain: &Domain,
        method: GreenMethod,
        grid_h: Option<f64>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidOrder(0));
        }
        if domain.dim != 2 * m as usize {
            return Err(Error::InvalidConfig(format!(
                "domain dimension {} does not match 2m = {}",
                domain.dim,
                2 * m
            )));
        }
        let kernel = match method {
            GreenMethod::DiscImages => {
                if !(m == 1 && domain.is_unit_ball()) {
                    return Err(Error::Unsupported("images are implemented for the unit disc, m = 1".into()));
                }
                Kernel::Disc
            }
            GreenMethod::BoggioBall => {
                if !domain.is_unit_ball() || (bc == BoundaryCondition::Navier && m > 1) {
                    return Err(Error::Unsupported("Boggio's formula is the Dirichlet kernel of the unit ball".into()));
                }
                Kernel::Boggio(boggio::Boggio::new(m)?)
            }
            GreenMethod::NavierBallIterated => {
                if !domain.is_unit_ball() || m != 2 {
                    return Err(Error::Unsupported("the iterated Navier kernel is implemented for m = 2 on the ball".into()));
                }
                Kernel::Navier(navier::NavierBall::new()?)
            }
            GreenMethod::Grid2d => {
                if m != 1 {
                    return Err(Error::Unsupported("grid Green functions require m = 1".into()));
                }
                let h = grid_h.unwrap_or(domain.shortest_side() / 128.0);
                Kernel::Grid(Arc::new(grid2d::Grid2DGreen::new(domain, h)?))
            }
        };
        Ok(Self { m, bc, domain: domain.clone(), kernel })
    }

    pub fn unit_disc() -> Self {
        Self { m: 1, bc: BoundaryCondition::Dirichlet, domain: Domain::unit_disc(), kernel: Kernel::Disc }
    }

    pub fn method(&self) -> GreenMethod {
        match self.kernel {
            Kernel::Disc => GreenMethod::DiscImages,
            Kernel::Boggio(_) => GreenMethod::BoggioBall,
            Kernel::Navier(_) => GreenMethod::NavierBallIterated,
            Kernel::Grid(_) => GreenMethod::Grid2d,
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self.kernel, Kernel::Grid(_))
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    /// Grid spacing for grid methods.
    pub fn grid_spacing(&self) -> Option<f64> {
        match &self.kernel {
            Kernel::Grid(g) => Some(g.h()),
            _ => None,
        }
    }

    pub fn grid(&self) -> Option<&grid2d::Grid2DGreen> {
        match &self.kernel {
            Kernel::Grid(g) => Some(g),
            _ => None,
        }
    }

    fn check(&self, p: &[f64]) -> Result<()> {
        self.domain.check_inside(p)
    }

    pub fn green(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        self.check(x)?;
        self.check(xi)?;
        if dist2(x, xi) == 0.0 {
            return Err(Error::SingularEvaluation);
        }
        match &self.kernel {
            Kernel::Disc => Ok(disc::green([x[0], x[1]], [xi[0], xi[1]])),
            Kernel::Boggio(b) => b.green(x, xi),
            Kernel::Navier(n) => n.green(x, xi),
            Kernel::Grid(_) => Ok(singular_part(1, x, xi) + self.regular_unchecked(x, xi)?),
        }
    }

    /// `H(x, ξ) = G(x, ξ) - K(x, ξ)`, continuous up to `x = ξ`.
    pub fn regular(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        self.check(x)?;
        self.check(xi)?;
        self.regular_unchecked(x, xi)
    }

    fn regular_unchecked(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        match &self.kernel {
            Kernel::Disc => Ok(disc::regular([x[0], x[1]], [xi[0], xi[1]])),
            Kernel::Boggio(b) => b.regular(x, xi),
            Kernel::Navier(n) => n.regular(x, xi),
            Kernel::Grid(g) => g.regular([x[0], x[1]], [xi[0], xi[1]]),
        }
    }

    /// Robin function `H(ξ, ξ)`.
    pub fn robin(&self, xi: &[f64]) -> Result<f64> {
        self.check(xi)?;
        match &self.kernel {
            Kernel::Disc => Ok(disc::robin([xi[0], xi[1]])),
            Kernel::Boggio(b) => Ok(b.robin(xi)),
            _ => self.regular_unchecked(xi, xi),
        }
    }

    fn fd_step(&self) -> f64 {
        1e-5 * self.domain.diameter()
    }

    fn require_clearance(&self, xi: &[f64]) -> Result<()> {
        self.check(xi)?;
        let d = self.domain.signed_distance(xi);
        let required = match self.grid_spacing() {
            Some(h) => 2.0 * h,
            None => 2.0 * self.fd_step(),
        };
        if d <= required {
            return Err(Error::BoundaryProximity { point: xi.to_vec(), distance: d, required });
        }
        Ok(())
    }

    /// `∇_ξ H(ξ, ξ)`: closed form on the disc and Dirichlet ball, central differences otherwise.
    pub fn robin_gradient(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.require_clearance(xi)?;
        match &self.kernel {
            Kernel::Disc => Ok(disc::robin_gradient([xi[0], xi[1]]).to_vec()),
            Kernel::Boggio(b) => Ok(b.robin_gradient(xi)),
            _ => self.robin_gradient_fd(xi),
        }
    }

    /// Central-difference Robin gradient with step `1e-5 · diam`.
    pub fn robin_gradient_fd(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.require_clearance(xi)?;
        let s = self.fd_step();
        (0..xi.len())
            .map(|a| {
                let mut p = xi.to_vec();
                let mut q = xi.to_vec();
                p[a] += s;
                q[a] -= s;
                Ok((self.robin(&p)? - self.robin(&q)?) / (2.0 * s))
            })
            .collect()
    }

    /// `∇_x G(x, ξ)`.
    pub fn green_grad_x(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        self.check(xi)?;
        if dist2(x, xi) == 0.0 {
            return Err(Error::SingularEvaluation);
        }
        if let Kernel::Disc = self.kernel {
            return Ok(disc::green_grad_x([x[0], x[1]], [xi[0], xi[1]]).to_vec());
        }
        // singular part exactly, regular part by central differences
        let d2 = dist2(x, xi);
        let s = self.fd_step();
        (0..x.len())
            .map(|a| {
                let mut p = x.to_vec();
                let mut q = x.to_vec();
                p[a] += s;
                q[a] -= s;
                let dh = (self.regular_unchecked(&p, xi)? - self.regular_unchecked(&q, xi)?) / (2.0 * s);
                Ok(-4.0 * self.m as f64 * (x[a] - xi[a]) / d2 + dh)
            })
            .collect()
    }

    /// CSV table with columns `x_1..x_n, xi_1..xi_n, G, H`.
    pub fn write_table<W: Write>(&self, mut w: W, pairs: &[(Vec<f64>, Vec<f64>)], digits: usize) -> Result<()> {
        let n = self.dim();
        let mut head: Vec<String> = (1..=n).map(|i| format!("x_{i}")).collect();
        head.extend((1..=n).map(|i| format!("xi_{i}")));
        head.push("G".into());
        head.push("H".into());
        write!(w, "{}\r\n", head.join(","))?;
        for (x, xi) in pairs {
            let g = self.green(x, xi)?;
            let h = self.regular(x, xi)?;
            let row: Vec<String> = x
                .iter()
                .chain(xi.iter())
                .chain([g, h].iter())
                .map(|v| crate::report::round_sig(*v, digits))
                .collect();
            write!(w, "{}\r\n", row.join(","))?;
        }
        Ok(())
    }
}
