//! Uniform planar grids fitted to a (possibly rescaled) domain, with Shortley–Weller
//! treatment of boundary crossings and an optional fourth-order interior stencil.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::grid::{Frame, GridField};

const NONE: u32 = u32::MAX;
/// Smallest admissible arm fraction; nodes closer to the boundary still get a
/// well-defined (if stiff) row.
const MIN_THETA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    /// Five-point Laplacian.
    Second,
    /// Nine-point wide cross `(-1, 16, -30, 16, -1)/12` wherever it fits, five-point elsewhere.
    Fourth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arm {
    Node(u32),
    /// Boundary crossing at fraction `theta` of the spacing.
    Boundary(f64),
}

/// Grid in coordinates `y`, with physical position `x = scale · y`.
#[derive(Debug, Clone)]
pub struct PlanarMesh {
    pub domain: Domain,
    pub scale: f64,
    pub origin: [f64; 2],
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub node_of: Vec<u32>,
    /// Grid index of each unknown.
    pub nodes: Vec<usize>,
    /// Arms E, W, N, S of each unknown.
    pub arms: Vec<[Arm; 4]>,
}

const DIRS: [[f64; 2]; 4] = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];

/// Rows of a discrete operator on the unknowns plus boundary couplings.
#[derive(Debug, Clone, Default)]
pub struct Operator {
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
    pub bnd_ptr: Vec<usize>,
    /// `(coefficient, boundary point in mesh coordinates)`.
    pub bnd: Vec<(f64, [f64; 2])>,
}

impl Operator {
    pub fn n(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// `A u + Σ b g(point)`: the operator applied to `u` with Dirichlet data `g`.
    pub fn apply(&self, u: &[f64], g: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        (0..self.n())
            .map(|r| {
                let mut s = 0.0;
                for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                    s += self.vals[k] * u[self.cols[k] as usize];
                }
                for k in self.bnd_ptr[r]..self.bnd_ptr[r + 1] {
                    let (c, p) = self.bnd[k];
                    s += c * g(p);
                }
                s
            })
            .collect()
    }

    /// Boundary contribution only, `Σ b g(point)` per row.
    pub fn boundary_term(&self, g: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        (0..self.n())
            .map(|r| {
                (self.bnd_ptr[r]..self.bnd_ptr[r + 1])
                    .map(|k| self.bnd[k].0 * g(self.bnd[k].1))
                    .sum()
            })
            .collect()
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut t = Vec::with_capacity(self.vals.len());
        for r in 0..self.n() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                t.push((r, self.cols[k] as usize, self.vals[k]));
            }
        }
        t
    }
}

impl PlanarMesh {
    /// Mesh of the domain `Ω / scale` with spacing `h`, placed so that `anchor`
    /// (mesh coordinates) is a node.
    pub fn new(domain: &Domain, scale: f64, h: f64, anchor: [f64; 2]) -> Result<Self> {
        if domain.dim != 2 {
            return Err(Error::Unsupported("planar meshes need a two-dimensional domain".into()));
        }
        if !(h > 0.0 && scale > 0.0) {
            return Err(Error::InvalidConfig("mesh spacing and scale must be positive".into()));
        }
        let (lo, hi) = domain.bbox();
        let lo = [lo[0] / scale, lo[1] / scale];
        let hi = [hi[0] / scale, hi[1] / scale];
        let mut origin = [0.0; 2];
        let mut count = [0usize; 2];
        for a in 0..2 {
            let below = ((anchor[a] - lo[a]) / h).ceil() + 1.0;
            origin[a] = anchor[a] - below * h;
            count[a] = (((hi[a] - origin[a]) / h).ceil() + 2.0) as usize;
        }
        let (nx, ny) = (count[0], count[1]);
        if nx.saturating_mul(ny) > 60_000_000 {
            return Err(Error::Resolution(format!("mesh of {nx}×{ny} nodes is too large")));
        }
        let mut node_of = vec![NONE; nx * ny];
        let mut nodes = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let y = [origin[0] + i as f64 * h, origin[1] + j as f64 * h];
                if domain.signed_distance(&[scale * y[0], scale * y[1]]) > 1e-13 * scale {
                    node_of[j * nx + i] = nodes.len() as u32;
                    nodes.push(j * nx + i);
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::Resolution("mesh has no interior nodes".into()));
        }
        let mut arms = Vec::with_capacity(nodes.len());
        for &g in &nodes {
            let (i, j) = ((g % nx) as isize, (g / nx) as isize);
            let y = [origin[0] + i as f64 * h, origin[1] + j as f64 * h];
            let mut a = [Arm::Boundary(1.0); 4];
            for (d, dir) in DIRS.iter().enumerate() {
                let (ni, nj) = (i + dir[0] as isize, j + dir[1] as isize);
                let nb = node_of[nj as usize * nx + ni as usize];
                if nb != NONE {
                    a[d] = Arm::Node(nb);
                } else {
                    let x = [scale * y[0], scale * y[1]];
                    let t = domain
                        .ray_crossings(&x, dir)
                        .first()
                        .map(|t| t / (scale * h))
                        .unwrap_or(1.0);
                    a[d] = Arm::Boundary(t.clamp(MIN_THETA, 1.0));
                }
            }
            arms.push(a);
        }
        Ok(Self { domain: domain.clone(), scale, origin, h, nx, ny, node_of, nodes, arms })
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn node_point(&self, k: usize) -> [f64; 2] {
        let g = self.nodes[k];
        self.grid_point(g % self.nx, g / self.nx)
    }

    #[inline]
    pub fn grid_point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    pub fn physical(&self, y: [f64; 2]) -> [f64; 2] {
        [self.scale * y[0], self.scale * y[1]]
    }

    pub fn node_at(&self, i: isize, j: isize) -> Option<u32> {
        if i < 0 || j < 0 || i as usize >= self.nx || j as usize >= self.ny {
            return None;
        }
        let n = self.node_of[j as usize * self.nx + i as usize];
        (n != NONE).then_some(n)
    }

    /// Boundary crossing point of arm `d` of unknown `k`.
    pub fn arm_point(&self, k: usize, d: usize, theta: f64) -> [f64; 2] {
        let p = self.node_point(k);
        [p[0] + DIRS[d][0] * theta * self.h, p[1] + DIRS[d][1] * theta * self.h]
    }

    /// Discrete `-Δ` on the unknowns with Dirichlet couplings.
    pub fn neg_laplacian(&self, stencil: Stencil) -> Operator {
        let h2 = self.h * self.h;
        let mut op = Operator {
            row_ptr: vec![0],
            bnd_ptr: vec![0],
            ..Default::default()
        };
        for k in 0..self.n() {
            let g = self.nodes[k];
            let (i, j) = ((g % self.nx) as isize, (g / self.nx) as isize);
            let wide = if stencil == Stencil::Fourth {
                let idx = [
                    self.node_at(i + 1, j),
                    self.node_at(i - 1, j),
                    self.node_at(i + 2, j),
                    self.node_at(i - 2, j),
                    self.node_at(i, j + 1),
                    self.node_at(i, j - 1),
                    self.node_at(i, j + 2),
                    self.node_at(i, j - 2),
                ];
                if idx.iter().all(Option::is_some) {
                    Some(idx.map(Option::unwrap))
                } else {
                    None
                }
            } else {
                None
            };
            if let Some(idx) = wide {
                op.cols.push(k as u32);
                op.vals.push(60.0 / (12.0 * h2));
                for (n, c) in idx.iter().zip([-16.0, -16.0, 1.0, 1.0, -16.0, -16.0, 1.0, 1.0]) {
                    op.cols.push(*n);
                    op.vals.push(c / (12.0 * h2));
                }
            } else {
                let a = &self.arms[k];
                let len = |d: usize| match a[d] {
                    Arm::Node(_) => self.h,
                    Arm::Boundary(t) => t * self.h,
                };
                let mut diag = 0.0;
                for (p, q) in [(0usize, 1usize), (2, 3)] {
                    let (hp, hq) = (len(p), len(q));
                    diag += 2.0 / (hp * hq);
                    for (d, hd) in [(p, hp), (q, hq)] {
                        let c = -2.0 / (hd * (hp + hq));
                        match a[d] {
                            Arm::Node(n) => {
                                op.cols.push(n);
                                op.vals.push(c);
                            }
                            Arm::Boundary(t) => op.bnd.push((c, self.arm_point(k, d, t))),
                        }
                    }
                }
                op.cols.push(k as u32);
                op.vals.push(diag);
            }
            op.row_ptr.push(op.cols.len());
            op.bnd_ptr.push(op.bnd.len());
        }
        op
    }

    /// Samples `f` at every unknown.
    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64 + Sync) -> Vec<f64> {
        use rayon::prelude::*;
        (0..self.n()).into_par_iter().map(|k| f(self.node_point(k))).collect()
    }

    /// Embeds unknown values into a full grid field (outside nodes get `outside`).
    pub fn to_field(&self, u: &[f64], frame: Frame, outside: impl Fn([f64; 2]) -> f64) -> GridField {
        let mut g = GridField::new(self.nx, self.ny, self.h, self.origin, frame);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let gi = j * self.nx + i;
                let n = self.node_of[gi];
                if n == NONE {
                    g.inside[gi] = false;
                    g.values[gi] = outside(self.grid_point(i, j));
                } else {
                    g.values[gi] = u[n as usize];
                }
            }
        }
        g
    }

    /// Interpolates unknown values `u` (with Dirichlet data `bval`) at mesh coordinate `y`:
    /// bicubic where the 4×4 block is interior, bilinear with boundary ghosts otherwise.
    pub fn interpolate(&self, u: &[f64], y: [f64; 2], bval: &dyn Fn([f64; 2]) -> f64) -> f64 {
        let fx = (y[0] - self.origin[0]) / self.h;
        let fy = (y[1] - self.origin[1]) / self.h;
        let i = (fx.floor() as isize).clamp(0, self.nx as isize - 2);
        let j = (fy.floor() as isize).clamp(0, self.ny as isize - 2);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let mut block = [[0.0; 4]; 4];
        let mut full = true;
        'outer: for (b, row) in block.iter_mut().enumerate() {
            for (a, v) in row.iter_mut().enumerate() {
                match self.node_at(i - 1 + a as isize, j - 1 + b as isize) {
                    Some(n) => *v = u[n as usize],
                    None => {
                        full = false;
                        break 'outer;
                    }
                }
            }
        }
        if full {
            let wx = lagrange4(tx);
            let wy = lagrange4(ty);
            let mut s = 0.0;
            for b in 0..4 {
                for a in 0..4 {
                    s += wx[a] * wy[b] * block[b][a];
                }
            }
            return s;
        }
        let corner = |a: isize, b: isize| -> f64 {
            let (ci, cj) = (i + a, j + b);
            if let Some(n) = self.node_at(ci, cj) {
                return u[n as usize];
            }
            // ghost value from an interior axis neighbour whose arm crosses the boundary
            let q = self.grid_point(ci.max(0) as usize, cj.max(0) as usize);
            let mut acc = 0.0;
            let mut cnt = 0.0;
            for (d, dir) in DIRS.iter().enumerate() {
                let (pi, pj) = (ci - dir[0] as isize, cj - dir[1] as isize);
                if let Some(p) = self.node_at(pi, pj) {
                    if let Arm::Boundary(t) = self.arms[p as usize][d] {
                        let up = u[p as usize];
                        let g = bval(self.arm_point(p as usize, d, t));
                        acc += up + (g - up) / t;
                        cnt += 1.0;
                    }
                }
            }
            if cnt > 0.0 { acc / cnt } else { bval(q) }
        };
        let (v00, v10, v01, v11) = (corner(0, 0), corner(1, 0), corner(0, 1), corner(1, 1));
        v00 * (1.0 - tx) * (1.0 - ty) + v10 * tx * (1.0 - ty) + v01 * (1.0 - tx) * ty + v11 * tx * ty
    }
}

/// Cubic Lagrange weights on nodes `-1, 0, 1, 2` at `t ∈ [0, 1]`.
fn lagrange4(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseLu;

    fn solve_poisson(mesh: &PlanarMesh, stencil: Stencil, f: impl Fn([f64; 2]) -> f64 + Sync, g: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        let op = mesh.neg_laplacian(stencil);
        let lu = SparseLu::factor(mesh.n(), op.triplets()).unwrap();
        let bt = op.boundary_term(&g);
        let rhs: Vec<f64> = mesh.sample(&f).iter().zip(&bt).map(|(f, b)| f - b).collect();
        lu.solve(&rhs).unwrap()
    }

    #[test]
    fn disc_poisson_second_order() {
        // -Δu = 4, u = 0 on the unit circle: u = 1 - |x|²
        let d = Domain::unit_disc();
        let mut errs = Vec::new();
        for h in [1.0 / 16.0, 1.0 / 32.0] {
            let m = PlanarMesh::new(&d, 1.0, h, [0.0, 0.0]).unwrap();
            let u = solve_poisson(&m, Stencil::Second, |_| 4.0, |_| 0.0);
            let e = (0..m.n())
                .map(|k| {
                    let p = m.node_point(k);
                    (u[k] - (1.0 - p[0] * p[0] - p[1] * p[1])).abs()
                })
                .fold(0.0, f64::max);
            errs.push(e);
        }
        // quadratic solution is reproduced exactly up to boundary treatment
        assert!(errs[1] < 1e-10, "{errs:?}");
    }

    #[test]
    fn fourth_order_converges_faster() {
        let d = Domain::unit_square();
        let exact = |p: [f64; 2]| (3.0 * p[0]).sin() * (2.0 * p[1]).cosh();
        let f = |p: [f64; 2]| 5.0 * exact(p);
        let mut e2 = Vec::new();
        let mut e4 = Vec::new();
        for h in [1.0 / 20.0, 1.0 / 40.0] {
            let m = PlanarMesh::new(&d, 1.0, h, [0.0, 0.0]).unwrap();
            for (st, out) in [(Stencil::Second, &mut e2), (Stencil::Fourth, &mut e4)] {
                let u = solve_poisson(&m, st, f, exact);
                out.push((0..m.n()).map(|k| (u[k] - exact(m.node_point(k))).abs()).fold(0.0, f64::max));
            }
        }
        assert!((e2[0] / e2[1]).log2() > 1.8, "{e2:?}");
        assert!(e4[1] < e2[1] / 5.0, "{e4:?} {e2:?}");
    }

    #[test]
    fn interpolation_reproduces_smooth_function() {
        let d = Domain::unit_disc();
        let m = PlanarMesh::new(&d, 1.0, 1.0 / 32.0, [0.0, 0.0]).unwrap();
        let f = |p: [f64; 2]| (p[0] + 0.3 * p[1]).exp();
        let u = m.sample(f);
        for y in [[0.123, -0.456], [0.7, 0.69], [0.0, 0.995]] {
            let v = m.interpolate(&u, y, &f);
            assert!((v - f(y)).abs() < 2e-3, "{y:?}");
        }
        assert!((m.interpolate(&u, [0.1234, 0.2], &f) - f([0.1234, 0.2])).abs() < 1e-8);
    }
}
