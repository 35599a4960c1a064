//! Bounded domains: the unit ball of `R^{2m}` and planar regions for `m = 1`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Serializable domain description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    /// Unit ball of `R^{2m}`; the dimension is taken from the operator order.
    UnitBall,
    Rectangle { min: [f64; 2], max: [f64; 2] },
    /// Simple polygon, vertices in order (either orientation).
    Polygon { vertices: Vec<[f64; 2]> },
    /// `inner < |x| < outer`.
    Annulus { inner: f64, outer: f64 },
}

/// A validated domain with its ambient dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domain {
    pub spec: DomainSpec,
    pub dim: usize,
}

impl Domain {
    pub fn new(spec: DomainSpec, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidOrder(0));
        }
        let dim = 2 * m as usize;
        match &spec {
            DomainSpec::UnitBall => {}
            DomainSpec::Rectangle { min, max } => {
                if !(min[0] < max[0] && min[1] < max[1]) {
                    return Err(Error::InvalidConfig("rectangle must have min < max".into()));
                }
            }
            DomainSpec::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::InvalidConfig("polygon needs at least three vertices".into()));
                }
                if polygon_area(vertices).abs() < 1e-14 {
                    return Err(Error::InvalidConfig("degenerate polygon".into()));
                }
            }
            DomainSpec::Annulus { inner, outer } => {
                if !(*inner > 0.0 && inner < outer) {
                    return Err(Error::InvalidConfig("annulus needs 0 < inner < outer".into()));
                }
            }
        }
        if !matches!(spec, DomainSpec::UnitBall) && m != 1 {
            return Err(Error::InvalidConfig(format!(
                "planar domains require m = 1, got m = {m}"
            )));
        }
        Ok(Self { spec, dim })
    }

    pub fn unit_disc() -> Self {
        Self { spec: DomainSpec::UnitBall, dim: 2 }
    }

    pub fn unit_ball(dim: usize) -> Self {
        Self { spec: DomainSpec::UnitBall, dim }
    }

    pub fn unit_square() -> Self {
        Self {
            spec: DomainSpec::Rectangle { min: [-0.5, -0.5], max: [0.5, 0.5] },
            dim: 2,
        }
    }

    pub fn is_unit_ball(&self) -> bool {
        matches!(self.spec, DomainSpec::UnitBall)
    }

    /// Signed distance to the boundary, positive inside.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        match &self.spec {
            DomainSpec::UnitBall => 1.0 - x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            DomainSpec::Rectangle { min, max } => {
                let dx = (x[0] - min[0]).min(max[0] - x[0]);
                let dy = (x[1] - min[1]).min(max[1] - x[1]);
                if dx >= 0.0 && dy >= 0.0 {
                    dx.min(dy)
                } else {
                    let ox = (min[0] - x[0]).max(x[0] - max[0]).max(0.0);
                    let oy = (min[1] - x[1]).max(x[1] - max[1]).max(0.0);
                    -(ox * ox + oy * oy).sqrt()
                }
            }
            DomainSpec::Polygon { vertices } => {
                let p = [x[0], x[1]];
                let n = vertices.len();
                let d = (0..n)
                    .map(|i| segment_distance(p, vertices[i], vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min);
                if point_in_polygon(p, vertices) { d } else { -d }
            }
            DomainSpec::Annulus { inner, outer } => {
                let r = x[0].hypot(x[1]);
                (r - inner).min(outer - r)
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.signed_distance(x) > 0.0
    }

    pub fn check_inside(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim || !self.contains(x) {
            return Err(Error::OutsideDomain { point: x.to_vec() });
        }
        Ok(())
    }

    pub fn diameter(&self) -> f64 {
        match &self.spec {
            DomainSpec::UnitBall => 2.0,
            DomainSpec::Rectangle { min, max } => (max[0] - min[0]).hypot(max[1] - min[1]),
            DomainSpec::Polygon { vertices } => {
                let mut d: f64 = 0.0;
                for a in vertices {
                    for b in vertices {
                        d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
                    }
                }
                d
            }
            DomainSpec::Annulus { outer, .. } => 2.0 * outer,
        }
    }

    /// Axis-aligned bounding box of a planar domain (or the 2-D section of the ball).
    pub fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        match &self.spec {
            DomainSpec::UnitBall => ([-1.0, -1.0], [1.0, 1.0]),
            DomainSpec::Rectangle { min, max } => (*min, *max),
            DomainSpec::Polygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for a in 0..2 {
                        lo[a] = lo[a].min(v[a]);
                        hi[a] = hi[a].max(v[a]);
                    }
                }
                (lo, hi)
            }
            DomainSpec::Annulus { outer, .. } => ([-outer, -outer], [*outer, *outer]),
        }
    }

    /// Shortest side of the bounding box.
    pub fn shortest_side(&self) -> f64 {
        let (lo, hi) = self.bbox();
        (hi[0] - lo[0]).min(hi[1] - lo[1])
    }

    /// Sorted positive parameters `t` where `p + t d` crosses the boundary.
    pub fn ray_crossings(&self, p: &[f64], d: &[f64]) -> Vec<f64> {
        let mut ts = match &self.spec {
            DomainSpec::UnitBall => sphere_crossings(p, d, 1.0),
            DomainSpec::Annulus { inner, outer } => {
                let mut t = sphere_crossings(p, d, *inner);
                t.extend(sphere_crossings(p, d, *outer));
                t
            }
            DomainSpec::Rectangle { min, max } => {
                let v = [
                    [min[0], min[1]],
                    [max[0], min[1]],
                    [max[0], max[1]],
                    [min[0], max[1]],
                ];
                polygon_crossings([p[0], p[1]], [d[0], d[1]], &v)
            }
            DomainSpec::Polygon { vertices } => polygon_crossings([p[0], p[1]], [d[0], d[1]], vertices),
        };
        ts.retain(|t| *t > 0.0);
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        ts
    }

    /// Parameter intervals `[t0, t1]` of the ray `p + t d`, `t ≥ 0`, lying inside the domain.
    /// The start point must be inside.
    pub fn ray_segments(&self, p: &[f64], d: &[f64]) -> Vec<(f64, f64)> {
        let ts = self.ray_crossings(p, d);
        let mut out = Vec::new();
        let mut start = 0.0;
        let mut inside = true;
        for t in ts {
            if inside {
                out.push((start, t));
            } else {
                start = t;
            }
            inside = !inside;
        }
        out
    }

    /// Roughly uniform samples of the boundary (planar: `n` points; ball: points on great circles).
    pub fn boundary_samples(&self, n: usize) -> Vec<Vec<f64>> {
        match &self.spec {
            DomainSpec::UnitBall => {
                let mut out = Vec::with_capacity(n);
                let planes = if self.dim == 2 { 1 } else { self.dim - 1 };
                for j in 0..n {
                    let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                    let a = j % planes;
                    let mut x = vec![0.0; self.dim];
                    x[a] = t.cos();
                    x[a + 1] = t.sin();
                    out.push(x);
                }
                out
            }
            DomainSpec::Annulus { inner, outer } => (0..n)
                .map(|j| {
                    let t = 2.0 * std::f64::consts::PI * j as f64 / (n / 2).max(1) as f64;
                    let r = if j % 2 == 0 { *outer } else { *inner };
                    vec![r * t.cos(), r * t.sin()]
                })
                .collect(),
            DomainSpec::Rectangle { min, max } => {
                let v = vec![
                    [min[0], min[1]],
                    [max[0], min[1]],
                    [max[0], max[1]],
                    [min[0], max[1]],
                ];
                perimeter_samples(&v, n)
            }
            DomainSpec::Polygon { vertices } => perimeter_samples(vertices, n),
        }
    }
}

fn sphere_crossings(p: &[f64], d: &[f64], r: f64) -> Vec<f64> {
    let a: f64 = d.iter().map(|v| v * v).sum();
    let b: f64 = 2.0 * p.iter().zip(d).map(|(p, d)| p * d).sum::<f64>();
    let c: f64 = p.iter().map(|v| v * v).sum::<f64>() - r * r;
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    // numerically stable pair of roots
    let q = -0.5 * (b + b.signum() * s);
    let q = if q == 0.0 { -0.5 * s } else { q };
    let mut t = vec![q / a];
    if q != 0.0 {
        t.push(c / q);
    }
    t
}

fn polygon_crossings(p: [f64; 2], d: [f64; 2], v: &[[f64; 2]]) -> Vec<f64> {
    let n = v.len();
    let mut out = Vec::new();
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        let e = [b[0] - a[0], b[1] - a[1]];
        let den = d[0] * e[1] - d[1] * e[0];
        if den.abs() < 1e-300 {
            continue;
        }
        let w = [a[0] - p[0], a[1] - p[1]];
        let t = (w[0] * e[1] - w[1] * e[0]) / den;
        let s = (w[0] * d[1] - w[1] * d[0]) / den;
        if (0.0..1.0).contains(&s) {
            out.push(t);
        }
    }
    out
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let e = [b[0] - a[0], b[1] - a[1]];
    let w = [p[0] - a[0], p[1] - a[1]];
    let l2 = e[0] * e[0] + e[1] * e[1];
    let t = ((w[0] * e[0] + w[1] * e[1]) / l2).clamp(0.0, 1.0);
    (w[0] - t * e[0]).hypot(w[1] - t * e[1])
}

fn point_in_polygon(p: [f64; 2], v: &[[f64; 2]]) -> bool {
    let n = v.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn polygon_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
}

fn perimeter_samples(v: &[[f64; 2]], n: usize) -> Vec<Vec<f64>> {
    let k = v.len();
    let lens: Vec<f64> = (0..k)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % k]);
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .collect();
    let total: f64 = lens.iter().sum();
    (0..n)
        .map(|j| {
            let mut s = total * j as f64 / n as f64;
            let mut i = 0;
            while s > lens[i] && i + 1 < k {
                s -= lens[i];
                i += 1;
            }
            let (a, b) = (v[i], v[(i + 1) % k]);
            let t = s / lens[i];
            vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_requires_order_one() {
        let spec = DomainSpec::Rectangle { min: [0.0, 0.0], max: [1.0, 1.0] };
        assert!(Domain::new(spec.clone(), 1).is_ok());
        assert!(matches!(Domain::new(spec, 2), Err(Error::InvalidConfig(_))));
        assert_eq!(Domain::new(DomainSpec::UnitBall, 2).unwrap().dim, 4);
    }

    #[test]
    fn ray_segments_annulus() {
        let d = Domain::new(DomainSpec::Annulus { inner: 0.5, outer: 1.0 }, 1).unwrap();
        let s = d.ray_segments(&[0.0, -0.75], &[0.0, 1.0]);
        assert_eq!(s.len(), 2);
        assert!((s[0].1 - 0.25).abs() < 1e-14);
        assert!((s[1].0 - 1.25).abs() < 1e-14 && (s[1].1 - 1.75).abs() < 1e-14);
    }

    #[test]
    fn polygon_matches_rectangle() {
        let r = Domain::unit_square();
        let p = Domain::new(
            DomainSpec::Polygon {
                vertices: vec![[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]],
            },
            1,
        )
        .unwrap();
        for x in [[0.1, 0.2], [0.45, -0.3], [0.7, 0.0], [-0.2, -0.6]] {
            assert!((r.signed_distance(&x) - p.signed_distance(&x)).abs() < 1e-14);
            let d = [0.6, 0.8];
            if r.contains(&x) {
                assert!((r.ray_crossings(&x, &d)[0] - p.ray_crossings(&x, &d)[0]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ball_crossing() {
        let b = Domain::unit_ball(4);
        let t = b.ray_crossings(&[0.5, 0.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(t, vec![0.5]);
        assert!((b.signed_distance(&[0.0, 0.6, 0.0, 0.0]) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn spec_json_strict() {
        let ok: DomainSpec = serde_json::from_str(r#"{"kind":"annulus","inner":0.3,"outer":1.0}"#).unwrap();
        assert_eq!(ok, DomainSpec::Annulus { inner: 0.3, outer: 1.0 });
        assert!(serde_json::from_str::<DomainSpec>(r#"{"kind":"annulus","inner":0.3,"outer":1.0,"x":1}"#).is_err());
    }
}
