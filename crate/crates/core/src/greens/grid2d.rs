//! Finite-difference Green function for planar domains (`m = 1`).
//!
//! `H(·, ξ)` is the discrete harmonic function with boundary data `-K(·, ξ)`,
//! solved with one shared LU factorization; solutions are memoized per source.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::SparseLu;
use crate::mesh::{Operator, PlanarMesh, Stencil};
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

pub struct Grid2DGreen {
    pub mesh: PlanarMesh,
    op: Operator,
    lu: SparseLu,
    cache: RwLock<HashMap<[u64; 2], Arc<Vec<f64>>>>,
}

impl std::fmt::Debug for Grid2DGreen {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid2DGreen")
            .field("h", &self.mesh.h)
            .field("unknowns", &self.mesh.n())
            .finish()
    }
}

/// Upper bound on memoized values before the cache is flushed.
const CACHE_VALUES: usize = 1 << 25;

/// `-K(x, ξ) = 4 log |x - ξ|`.
#[inline]
pub fn neg_singular(x: [f64; 2], xi: [f64; 2]) -> f64 {
    2.0 * ((x[0] - xi[0]).powi(2) + (x[1] - xi[1]).powi(2)).ln()
}

impl Grid2DGreen {
    pub fn new(domain: &Domain, h: f64) -> Result<Self> {
        if domain.dim != 2 {
            return Err(Error::Unsupported("grid Green functions are planar".into()));
        }
        let min_side = domain.shortest_side();
        if h <= 0.0 || min_side / h < 33.0 {
            return Err(Error::Resolution(format!(
                "spacing {h} leaves fewer than 32 interior points across the shortest side {min_side}"
            )));
        }
        let mesh = PlanarMesh::new(domain, 1.0, h, [0.0, 0.0])?;
        let op = mesh.neg_laplacian(Stencil::Second);
        let lu = SparseLu::factor(mesh.n(), op.triplets())?;
        Ok(Self { mesh, op, lu, cache: RwLock::new(HashMap::new()) })
    }

    pub fn h(&self) -> f64 {
        self.mesh.h
    }

    /// Discrete harmonic extension of arbitrary boundary data.
    pub fn harmonic_extension(&self, g: impl Fn([f64; 2]) -> f64) -> Result<Vec<f64>> {
        let rhs: Vec<f64> = self.op.boundary_term(g).into_iter().map(|v| -v).collect();
        self.lu.solve(&rhs)
    }

    pub fn solution(&self, xi: [f64; 2]) -> Result<Arc<Vec<f64>>> {
        let key = [xi[0].to_bits(), xi[1].to_bits()];
        if let Some(v) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let u = Arc::new(self.harmonic_extension(|b| neg_singular(b, xi))?);
        let mut cache = self.cache.write().expect("cache lock");
        if cache.len() >= (CACHE_VALUES / self.mesh.n().max(1)).max(16) {
            cache.clear();
        }
        cache.insert(key, u.clone());
        Ok(u)
    }

    pub fn cached_sources(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    pub fn regular(&self, x: [f64; 2], xi: [f64; 2]) -> Result<f64> {
        let u = self.solution(xi)?;
        Ok(self.mesh.interpolate(&u, x, &|b| neg_singular(b, xi)))
    }
}
