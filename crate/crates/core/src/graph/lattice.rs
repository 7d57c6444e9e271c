use serde::{Deserialize, Serialize};

use super::{Digraph, RADIUS_SLACK};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::quadrature::QuadratureSpec;
use crate::trajectory::segment_time;
use crate::wind::WindField;

pub const DEFAULT_VERTEX_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LatticeOptions {
    pub vertex_cap: usize,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        Self { vertex_cap: DEFAULT_VERTEX_CAP }
    }
}

/// Cartesian lattice over the bounding rectangle of a domain, plus the two
/// end points as extra vertices. Arc weights are computed when requested.
#[derive(Debug, Clone)]
pub struct LatticeDigraph {
    min: Vec2,
    max: Vec2,
    nx: usize,
    ny: usize,
    sx: f64,
    sy: f64,
    h: f64,
    l: f64,
    radius: f64,
    offsets: Vec<(i64, i64)>,
    extras: Vec<Vec2>,
    domain: Domain,
    field: WindField,
    quad: QuadratureSpec,
}

fn axis(lo: f64, hi: f64, step: f64) -> (usize, f64) {
    let width = hi - lo;
    if width <= 0.0 {
        return (1, 0.0);
    }
    let cells = (width / step).ceil().max(1.0) as usize;
    (cells + 1, width / cells as f64)
}

/// Builds the lattice with spacing at most `h√2` in each direction over the
/// bounding rectangle of `domain`, connecting all pairs within `l + 2h`.
/// `origin` and `destination` become vertices (reusing a lattice vertex when
/// one coincides).
#[allow(clippy::too_many_arguments)]
pub fn build_lattice(
    domain: &Domain,
    h: f64,
    l: f64,
    field: &WindField,
    quad: &QuadratureSpec,
    origin: Vec2,
    destination: Vec2,
    options: LatticeOptions,
) -> Result<LatticeDigraph> {
    if !(h > 0.0) || !(l >= 0.0) || !h.is_finite() || !l.is_finite() {
        return Err(Error::InvalidArgument(format!("need h > 0 and l >= 0, got h={h}, l={l}")));
    }
    let rect = domain.bounding_rect();
    let (min, max) = rect.bounding_box();
    if !(min.is_finite() && max.is_finite() && min.x <= max.x && min.y <= max.y) {
        return Err(Error::EmptyDomain);
    }
    let step = h * std::f64::consts::SQRT_2;
    let (nx, sx) = axis(min.x, max.x, step);
    let (ny, sy) = axis(min.y, max.y, step);
    let lattice_count = (nx as u128) * (ny as u128);
    if lattice_count + 2 > options.vertex_cap as u128 {
        return Err(Error::ResourceLimit {
            needed: lattice_count.min(usize::MAX as u128) as usize,
            cap: options.vertex_cap,
        });
    }
    let radius = (l + 2.0 * h) * (1.0 + RADIUS_SLACK);
    let kx = if sx > 0.0 { (radius / sx).floor() as i64 } else { 0 };
    let ky = if sy > 0.0 { (radius / sy).floor() as i64 } else { 0 };
    let mut offsets = Vec::new();
    for dy in -ky..=ky {
        for dx in -kx..=kx {
            if (dx, dy) == (0, 0) {
                continue;
            }
            let (ox, oy) = (dx as f64 * sx, dy as f64 * sy);
            if ox * ox + oy * oy <= radius * radius {
                offsets.push((dx, dy));
            }
        }
    }
    let mut g = LatticeDigraph {
        min,
        max,
        nx,
        ny,
        sx,
        sy,
        h,
        l,
        radius,
        offsets,
        extras: Vec::new(),
        domain: rect,
        field: field.clone(),
        quad: quad.clone(),
    };
    for p in [origin, destination] {
        if !g.domain.contains(p) {
            return Err(Error::InvalidArgument(format!("end point {p:?} lies outside the domain")));
        }
        if g.find_vertex(p).is_none() {
            g.extras.push(p);
        }
    }
    Ok(g)
}

impl LatticeDigraph {
    fn lattice_count(&self) -> usize {
        self.nx * self.ny
    }

    fn coords(&self, i: usize) -> (i64, i64) {
        ((i % self.nx) as i64, (i / self.nx) as i64)
    }

    fn lattice_point(&self, ix: i64, iy: i64) -> Vec2 {
        let x = if ix as usize == self.nx - 1 { self.max.x } else { self.min.x + ix as f64 * self.sx };
        let y = if iy as usize == self.ny - 1 { self.max.y } else { self.min.y + iy as f64 * self.sy };
        Vec2::new(x, y)
    }

    /// Lattice shape `(nx, ny)` and spacings `(sx, sy)`.
    pub fn shape(&self) -> ((usize, usize), (f64, f64)) {
        ((self.nx, self.ny), (self.sx, self.sy))
    }

    pub fn field(&self) -> &WindField {
        &self.field
    }

    /// Arc radius `l + 2h` including the rounding slack.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn lattice_box(&self, p: Vec2, r: f64) -> (i64, i64, i64, i64) {
        let fx = |x: f64| if self.sx > 0.0 { (x - self.min.x) / self.sx } else { 0.0 };
        let fy = |y: f64| if self.sy > 0.0 { (y - self.min.y) / self.sy } else { 0.0 };
        let x0 = (fx(p.x - r).floor() as i64).max(0);
        let x1 = (fx(p.x + r).ceil() as i64).min(self.nx as i64 - 1);
        let y0 = (fy(p.y - r).floor() as i64).max(0);
        let y1 = (fy(p.y + r).ceil() as i64).min(self.ny as i64 - 1);
        (x0, x1, y0, y1)
    }

    fn collect_neighbors(&self, u: usize, out: &mut Vec<usize>) {
        out.clear();
        let n = self.lattice_count();
        let pu = self.vertex(u);
        if u < n {
            let (ix, iy) = self.coords(u);
            for &(dx, dy) in &self.offsets {
                let (jx, jy) = (ix + dx, iy + dy);
                if jx >= 0 && jy >= 0 && (jx as usize) < self.nx && (jy as usize) < self.ny {
                    out.push(jy as usize * self.nx + jx as usize);
                }
            }
        } else {
            let (x0, x1, y0, y1) = self.lattice_box(pu, self.radius);
            for jy in y0..=y1 {
                for jx in x0..=x1 {
                    if self.lattice_point(jx, jy).distance(pu) <= self.radius {
                        out.push(jy as usize * self.nx + jx as usize);
                    }
                }
            }
        }
        for (k, e) in self.extras.iter().enumerate() {
            let v = n + k;
            if v != u && e.distance(pu) <= self.radius {
                out.push(v);
            }
        }
        out.sort_unstable();
    }
}

impl Digraph for LatticeDigraph {
    fn vertex_count(&self) -> usize {
        self.lattice_count() + self.extras.len()
    }

    fn vertex(&self, i: usize) -> Vec2 {
        let n = self.lattice_count();
        if i < n {
            let (ix, iy) = self.coords(i);
            self.lattice_point(ix, iy)
        } else {
            self.extras[i - n]
        }
    }

    fn h(&self) -> f64 {
        self.h
    }

    fn l(&self) -> f64 {
        self.l
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn visit_arcs(&self, u: usize, visit: &mut dyn FnMut(usize, f64)) -> Result<()> {
        let mut nb = Vec::with_capacity(self.offsets.len() + 2);
        self.collect_neighbors(u, &mut nb);
        let pu = self.vertex(u);
        for v in nb {
            let w = segment_time(&self.field, pu, self.vertex(v), &self.quad)?;
            visit(v, w);
        }
        Ok(())
    }

    fn neighbors(&self, u: usize) -> Vec<usize> {
        let mut nb = Vec::new();
        self.collect_neighbors(u, &mut nb);
        nb
    }

    fn has_arc(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        let n = self.lattice_count();
        if u < n && v < n {
            let (ux, uy) = self.coords(u);
            let (vx, vy) = self.coords(v);
            let (ox, oy) = ((vx - ux) as f64 * self.sx, (vy - uy) as f64 * self.sy);
            return ox * ox + oy * oy <= self.radius * self.radius;
        }
        self.vertex(u).distance(self.vertex(v)) <= self.radius
    }

    fn arc_weight(&self, u: usize, v: usize) -> Result<Option<f64>> {
        if !self.has_arc(u, v) {
            return Ok(None);
        }
        segment_time(&self.field, self.vertex(u), self.vertex(v), &self.quad).map(Some)
    }

    fn nearest_vertex(&self, p: Vec2) -> usize {
        let rx = if self.sx > 0.0 { ((p.x - self.min.x) / self.sx).round() as i64 } else { 0 };
        let ry = if self.sy > 0.0 { ((p.y - self.min.y) / self.sy).round() as i64 } else { 0 };
        let mut best = (f64::INFINITY, usize::MAX);
        let consider = |best: &mut (f64, usize), i: usize, q: Vec2| {
            let d2 = (q - p).norm_sq();
            if d2 < best.0 || (d2 == best.0 && i < best.1) {
                *best = (d2, i);
            }
        };
        for jy in (ry - 1).max(0)..=(ry + 1).min(self.ny as i64 - 1) {
            for jx in (rx - 1).max(0)..=(rx + 1).min(self.nx as i64 - 1) {
                consider(&mut best, jy as usize * self.nx + jx as usize, self.lattice_point(jx, jy));
            }
        }
        if best.1 == usize::MAX {
            // p far outside: clamp to the lattice
            let jx = rx.clamp(0, self.nx as i64 - 1);
            let jy = ry.clamp(0, self.ny as i64 - 1);
            consider(&mut best, jy as usize * self.nx + jx as usize, self.lattice_point(jx, jy));
        }
        let n = self.lattice_count();
        for (k, e) in self.extras.iter().enumerate() {
            consider(&mut best, n + k, *e);
        }
        best.1
    }

    fn arc_count(&self) -> usize {
        let mut nb = Vec::new();
        (0..self.vertex_count())
            .map(|u| {
                self.collect_neighbors(u, &mut nb);
                nb.len()
            })
            .sum()
    }
}
