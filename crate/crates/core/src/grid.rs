//! Sampled fields on uniform planar grids.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Read, Write};

/// Coordinate frame of a field: the physical domain or the expanded domain `Ω/ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "frame", rename_all = "snake_case")]
pub enum Frame {
    Physical,
    Expanded { eps: f64 },
}

impl Frame {
    fn tag(&self) -> &'static str {
        match self {
            Frame::Physical => "physical",
            Frame::Expanded { .. } => "expanded",
        }
    }
    fn eps(&self) -> f64 {
        match self {
            Frame::Physical => 1.0,
            Frame::Expanded { eps } => *eps,
        }
    }
    fn from_tag(tag: &str, eps: f64) -> Result<Self> {
        match tag {
            "physical" => Ok(Frame::Physical),
            "expanded" => Ok(Frame::Expanded { eps }),
            t => Err(Error::Parse(format!("unknown frame '{t}'"))),
        }
    }
}

/// Node samples on an `nx × ny` grid; `inside` marks nodes in the open domain.
/// Values at outside nodes are stored but excluded from norms and derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: [f64; 2],
    pub frame: Frame,
    pub values: Vec<f64>,
    pub inside: Vec<bool>,
}

impl GridField {
    pub fn new(nx: usize, ny: usize, h: f64, origin: [f64; 2], frame: Frame) -> Self {
        Self {
            nx,
            ny,
            h,
            origin,
            frame,
            values: vec![0.0; nx * ny],
            inside: vec![true; nx * ny],
        }
    }

    /// Same geometry, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.values.len());
        Self { values, ..self.clone() }
    }

    pub fn from_fn(
        nx: usize,
        ny: usize,
        h: f64,
        origin: [f64; 2],
        frame: Frame,
        f: impl Fn([f64; 2]) -> f64,
    ) -> Self {
        let mut g = Self::new(nx, ny, h, origin, frame);
        for j in 0..ny {
            for i in 0..nx {
                g.values[j * nx + i] = f(g.point(i, j));
            }
        }
        g
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, [f64; 2])> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (self.idx(i, j), self.point(i, j))))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        self.with_values(self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn sup_inside(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.inside)
            .filter(|(_, &m)| m)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max)
    }

    /// `Σ h² f` over inside nodes.
    pub fn integral_inside(&self) -> f64 {
        self.h
            * self.h
            * self
                .values
                .iter()
                .zip(&self.inside)
                .filter(|(_, &m)| m)
                .map(|(v, _)| v)
                .sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Centered finite-difference approximation of `∂_x^a ∂_y^b f` at every node whose
    /// whole stencil lies inside; `None` elsewhere.
    pub fn derivative(&self, a: usize, b: usize) -> Vec<Option<f64>> {
        let mut cur: Vec<Option<f64>> = self
            .values
            .iter()
            .zip(&self.inside)
            .map(|(&v, &m)| if m { Some(v) } else { None })
            .collect();
        for (order, step) in [(a, 1isize), (b, self.nx as isize)] {
            let (pairs, single) = (order / 2, order % 2);
            for _ in 0..pairs {
                cur = self.apply_1d(&cur, step, |l, c, r| (l - 2.0 * c + r) / (self.h * self.h));
            }
            if single == 1 {
                cur = self.apply_1d(&cur, step, |l, _, r| (r - l) / (2.0 * self.h));
            }
        }
        cur
    }

    fn apply_1d(
        &self,
        src: &[Option<f64>],
        step: isize,
        f: impl Fn(f64, f64, f64) -> f64,
    ) -> Vec<Option<f64>> {
        let mut out = vec![None; src.len()];
        for j in 0..self.ny {
            for i in 0..self.nx {
                let along_x = step == 1;
                let (pos, len) = if along_x { (i, self.nx) } else { (j, self.ny) };
                if pos == 0 || pos + 1 >= len {
                    continue;
                }
                let k = self.idx(i, j) as isize;
                if let (Some(l), Some(c), Some(r)) = (
                    src[(k - step) as usize],
                    src[k as usize],
                    src[(k + step) as usize],
                ) {
                    out[k as usize] = Some(f(l, c, r));
                }
            }
        }
        out
    }

    /// Five-point `-Δ_h f` at nodes whose four neighbours are inside.
    pub fn neg_laplacian(&self) -> Vec<Option<f64>> {
        let dxx = self.derivative(2, 0);
        let dyy = self.derivative(0, 2);
        dxx.iter()
            .zip(&dyy)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some(-(a + b)),
                _ => None,
            })
            .collect()
    }

    // ---------------------------------------------------------------- IO

    /// CSV layout: a metadata header row `nx,ny,h,frame,eps,origin_x,origin_y` with one
    /// data row, then a table `i,j,value,inside` with one row per node.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        self.write_csv_with(w, fmt_f64)
    }

    /// [`Self::write_csv`] with node values rounded to `digits` significant digits.
    pub fn write_csv_rounded<W: Write>(&self, w: W, digits: usize) -> Result<()> {
        self.write_csv_with(w, |v| crate::report::round_sig(v, digits))
    }

    fn write_csv_with<W: Write>(&self, mut w: W, fmt_f64: impl Fn(f64) -> String) -> Result<()> {
        write!(w, "nx,ny,h,frame,eps,origin_x,origin_y\r\n")?;
        write!(
            w,
            "{},{},{},{},{},{},{}\r\n",
            self.nx,
            self.ny,
            fmt_f64(self.h),
            self.frame.tag(),
            fmt_f64(self.frame.eps()),
            fmt_f64(self.origin[0]),
            fmt_f64(self.origin[1])
        )?;
        write!(w, "i,j,value,inside\r\n")?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = self.idx(i, j);
                write!(w, "{},{},{},{}\r\n", i, j, fmt_f64(self.values[k]), self.inside[k] as u8)?;
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse("unexpected end of grid CSV".into()))?
                .map_err(Error::from)
        };
        let header = next()?;
        if header.trim() != "nx,ny,h,frame,eps,origin_x,origin_y" {
            return Err(Error::Parse(format!("bad grid CSV header '{header}'")));
        }
        let meta = next()?;
        let f: Vec<&str> = meta.trim().split(',').collect();
        if f.len() != 7 {
            return Err(Error::Parse("bad grid CSV metadata row".into()));
        }
        let nx: usize = parse(f[0])?;
        let ny: usize = parse(f[1])?;
        let h: f64 = parse(f[2])?;
        let eps: f64 = parse(f[4])?;
        let frame = Frame::from_tag(f[3], eps)?;
        let origin = [parse(f[5])?, parse(f[6])?];
        let mut g = Self::new(nx, ny, h, origin, frame);
        if next()?.trim() != "i,j,value,inside" {
            return Err(Error::Parse("bad grid CSV table header".into()));
        }
        let mut seen = 0;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let c: Vec<&str> = line.trim().split(',').collect();
            if c.len() != 4 {
                return Err(Error::Parse(format!("bad grid CSV row '{line}'")));
            }
            let (i, j): (usize, usize) = (parse(c[0])?, parse(c[1])?);
            if i >= nx || j >= ny {
                return Err(Error::Parse("grid CSV index out of range".into()));
            }
            let k = g.idx(i, j);
            g.values[k] = parse(c[2])?;
            g.inside[k] = c[3] == "1";
            seen += 1;
        }
        if seen != nx * ny {
            return Err(Error::Parse(format!("expected {} grid rows, found {seen}", nx * ny)));
        }
        Ok(g)
    }

    const MAGIC: &'static [u8; 8] = b"PLGRID01";

    /// Little-endian binary: magic, `nx, ny` (u64), `h, eps, origin_x, origin_y` (f64),
    /// frame byte (0 physical, 1 expanded), then `nx·ny` mask bytes and `nx·ny` f64 values.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(Self::MAGIC)?;
        w.write_all(&(self.nx as u64).to_le_bytes())?;
        w.write_all(&(self.ny as u64).to_le_bytes())?;
        for v in [self.h, self.frame.eps(), self.origin[0], self.origin[1]] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&[matches!(self.frame, Frame::Expanded { .. }) as u8])?;
        let mask: Vec<u8> = self.inside.iter().map(|&b| b as u8).collect();
        w.write_all(&mask)?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(Error::Parse("not a grid field file".into()));
        }
        let mut b8 = [0u8; 8];
        let mut u = |r: &mut R| -> Result<u64> {
            r.read_exact(&mut b8)?;
            Ok(u64::from_le_bytes(b8))
        };
        let nx = u(&mut r)? as usize;
        let ny = u(&mut r)? as usize;
        let mut f = |r: &mut R| -> Result<f64> { Ok(f64::from_bits(u(r)?)) };
        let h = f(&mut r)?;
        let eps = f(&mut r)?;
        let origin = [f(&mut r)?, f(&mut r)?];
        let mut fb = [0u8; 1];
        r.read_exact(&mut fb)?;
        let frame = if fb[0] == 1 { Frame::Expanded { eps } } else { Frame::Physical };
        let n = nx
            .checked_mul(ny)
            .filter(|n| *n < (1 << 32))
            .ok_or_else(|| Error::Parse("grid too large".into()))?;
        let mut mask = vec![0u8; n];
        r.read_exact(&mut mask)?;
        let mut g = Self::new(nx, ny, h, origin, frame);
        g.inside = mask.iter().map(|&b| b == 1).collect();
        for v in g.values.iter_mut() {
            r.read_exact(&mut b8)?;
            *v = f64::from_le_bytes(b8);
        }
        Ok(g)
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("cannot parse '{s}'")))
}

/// Shortest round-trip representation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GridField {
        let mut g = GridField::from_fn(9, 7, 0.25, [-1.0, -0.75], Frame::Expanded { eps: 0.1 }, |p| {
            p[0] * p[0] * p[1] + 0.5 * p[1]
        });
        g.inside[0] = false;
        g
    }

    #[test]
    fn csv_round_trip() {
        let g = sample();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let back = GridField::read_csv(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn binary_round_trip() {
        let g = sample();
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        let back = GridField::read_binary(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn derivatives_of_cubic() {
        let g = sample();
        // f = x² y + y/2: f_x = 2xy, f_xx = 2y, f_xy = 2x, f_xxy = 2
        let dx = g.derivative(1, 0);
        let dxy = g.derivative(1, 1);
        let dxxy = g.derivative(2, 1);
        let k = g.idx(4, 3);
        let p = g.point(4, 3);
        assert!((dx[k].unwrap() - 2.0 * p[0] * p[1]).abs() < 1e-12);
        assert!((dxy[k].unwrap() - 2.0 * p[0]).abs() < 1e-12);
        assert!((dxxy[k].unwrap() - 2.0).abs() < 1e-12);
        assert!(dx[g.idx(0, 3)].is_none());
        assert!(dx[g.idx(1, 0)].is_none() || g.derivative(0, 1)[g.idx(1, 0)].is_none());
    }
}
