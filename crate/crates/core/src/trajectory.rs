//! Polyline trajectories and the travel-time functional.
//!
//! A trajectory `ξ: [0,1] → R²` is flown at constant airspeed `v̄`. Eliminating
//! the heading, the time spent per unit parameter is
//!
//! `f(w, ξ_τ) = (−ξ_τ·w + sqrt((ξ_τ·w)² + (v̄² − ‖w‖²)‖ξ_τ‖²)) / (v̄² − ‖w‖²)`
//!
//! and the travel time is `T(ξ) = ∫ f(w(ξ), ξ_τ) dτ`. `T` only depends on the
//! geometry of the curve, so for polylines it is a sum of straight segment
//! times.

use std::cell::RefCell;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::quadrature::QuadratureSpec;
use crate::wind::{SegmentPanels, WindField};

thread_local! {
    static PANELS: RefCell<SegmentPanels> = RefCell::new(SegmentPanels::default());
}

/// Time per unit parameter, `f(w, d)`.
pub fn integrand_f(w: Vec2, d: Vec2, airspeed: f64) -> Result<f64> {
    let ws = w.norm_sq();
    if ws >= airspeed * airspeed {
        return Err(Error::WindExceedsAirspeed { wind: ws.sqrt(), airspeed });
    }
    Ok(integrand_parts(w, d, airspeed).0)
}

/// `f` together with `∂f/∂d`; note `∂f/∂w = −f ∂f/∂d`.
///
/// `f` is the positive root of `g f² + 2a f − ‖d‖² = 0` with `a = d·w`,
/// `g = v̄² − ‖w‖²`; the root is taken in the cancellation-free form.
#[inline]
pub fn integrand_parts(w: Vec2, d: Vec2, airspeed: f64) -> (f64, Vec2) {
    let a = d.dot(w);
    let g = airspeed * airspeed - w.norm_sq();
    let dd = d.norm_sq();
    let sq = (a * a + g * dd).sqrt();
    let f = if a > 0.0 { dd / (a + sq) } else { (sq - a) / g };
    let fd = (d - w * f) / sq;
    (f, fd)
}

#[inline]
fn check_wind(w: Vec2, airspeed: f64) -> Result<()> {
    if w.norm_sq() >= airspeed * airspeed {
        Err(Error::WindExceedsAirspeed { wind: w.norm(), airspeed })
    } else {
        Ok(())
    }
}

/// Travel time along the straight segment `a → b`.
pub fn segment_time(field: &WindField, a: Vec2, b: Vec2, quad: &QuadratureSpec) -> Result<f64> {
    let d = b - a;
    if d.norm_sq() == 0.0 {
        return Ok(0.0);
    }
    let v = field.airspeed;
    PANELS.with(|cell| {
        let mut sp = cell.borrow_mut();
        field.segment_panels(a, b, &mut sp);
        let mut total = 0.0;
        for panel in &sp.panels {
            let len = panel.s1 - panel.s0;
            let active = sp.active(panel);
            if panel.constant {
                let w = field.eval_active(a + d * (0.5 * (panel.s0 + panel.s1)), active);
                check_wind(w, v)?;
                total += len * integrand_parts(w, d, v).0;
                continue;
            }
            let mut acc = 0.0;
            for (&s, &wt) in quad.nodes().iter().zip(quad.weights()) {
                let w = field.eval_active(a + d * (panel.s0 + s * len), active);
                check_wind(w, v)?;
                acc += wt * integrand_parts(w, d, v).0;
            }
            total += len * acc;
        }
        Ok(total)
    })
}

/// Segment time with its gradient with respect to both end points.
pub fn segment_time_grad(
    field: &WindField,
    a: Vec2,
    b: Vec2,
    quad: &QuadratureSpec,
) -> Result<(f64, Vec2, Vec2)> {
    let d = b - a;
    if d.norm_sq() == 0.0 {
        return Err(Error::DegeneratePath("zero-length segment".into()));
    }
    let v = field.airspeed;
    PANELS.with(|cell| {
        let mut sp = cell.borrow_mut();
        field.segment_panels(a, b, &mut sp);
        let (mut total, mut ga, mut gb) = (0.0, Vec2::ZERO, Vec2::ZERO);
        for panel in &sp.panels {
            let len = panel.s1 - panel.s0;
            let active = sp.active(panel);
            if panel.constant {
                let w = field.eval_active(a + d * (0.5 * (panel.s0 + panel.s1)), active);
                check_wind(w, v)?;
                let (f, fd) = integrand_parts(w, d, v);
                total += len * f;
                ga -= fd * len;
                gb += fd * len;
                continue;
            }
            for (&s, &wt) in quad.nodes().iter().zip(quad.weights()) {
                let t = panel.s0 + s * len;
                let p = a + d * t;
                let w = field.eval_active(p, active);
                check_wind(w, v)?;
                let jac = field.jacobian_active(p, active);
                let (f, fd) = integrand_parts(w, d, v);
                let jf = jac.tr_mul_vec(fd * (-f));
                let c = wt * len;
                total += c * f;
                ga += (jf * (1.0 - t) - fd) * c;
                gb += (jf * t + fd) * c;
            }
        }
        Ok((total, ga, gb))
    })
}

/// Travel time along a polyline given by its vertices.
pub fn polyline_time(field: &WindField, vertices: &[Vec2], quad: &QuadratureSpec) -> Result<f64> {
    let mut total = 0.0;
    for w in vertices.windows(2) {
        total += segment_time(field, w[0], w[1], quad)?;
    }
    Ok(total)
}

/// Travel time and its gradient with respect to every vertex. Entries for
/// the two end points are set to zero since they are fixed.
pub fn polyline_time_grad(
    field: &WindField,
    vertices: &[Vec2],
    quad: &QuadratureSpec,
) -> Result<(f64, Vec<Vec2>)> {
    let n = vertices.len();
    let mut grad = vec![Vec2::ZERO; n];
    let mut total = 0.0;
    for i in 0..n.saturating_sub(1) {
        let (t, ga, gb) = segment_time_grad(field, vertices[i], vertices[i + 1], quad)?;
        total += t;
        grad[i] += ga;
        grad[i + 1] += gb;
    }
    if n > 0 {
        grad[0] = Vec2::ZERO;
        grad[n - 1] = Vec2::ZERO;
    }
    Ok((total, grad))
}

fn polyline_length(vertices: &[Vec2]) -> f64 {
    vertices.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// A polyline from `x_O` to `x_D` without zero-length segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PathJson", into = "PathJson")]
pub struct Path {
    vertices: Vec<Vec2>,
    length: f64,
}

#[derive(Serialize, Deserialize)]
struct PathJson {
    vertices: Vec<Vec2>,
}

impl TryFrom<PathJson> for Path {
    type Error = Error;
    fn try_from(p: PathJson) -> Result<Self> {
        Path::new(p.vertices)
    }
}

impl From<Path> for PathJson {
    fn from(p: Path) -> Self {
        PathJson { vertices: p.vertices }
    }
}

impl Path {
    /// Builds a path, dropping vertices closer than `1e-12·L` to their
    /// predecessor. The last vertex is always kept.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::DegeneratePath("a path needs at least two vertices".into()));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegeneratePath("non-finite vertex".into()));
        }
        let raw = polyline_length(&vertices);
        if !(raw > 0.0) {
            return Err(Error::DegeneratePath("path has zero length".into()));
        }
        let tol = 1e-12 * raw;
        let last = *vertices.last().unwrap();
        let mut out: Vec<Vec2> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if out.last().is_none_or(|p| p.distance(v) > tol) {
                out.push(v);
            }
        }
        if *out.last().unwrap() != last {
            // the end point was dropped as a near-duplicate; it wins over its neighbour
            if out.len() == 1 {
                out.push(last);
            } else {
                *out.last_mut().unwrap() = last;
            }
        }
        if out.len() < 2 {
            return Err(Error::DegeneratePath("path has zero length".into()));
        }
        let length = polyline_length(&out);
        Ok(Self { vertices: out, length })
    }

    pub fn straight(a: Vec2, b: Vec2) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn origin(&self) -> Vec2 {
        self.vertices[0]
    }

    pub fn destination(&self) -> Vec2 {
        *self.vertices.last().unwrap()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Cumulative arclength at each vertex.
    pub fn arclengths(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.vertices.len());
        let mut acc = 0.0;
        s.push(0.0);
        for w in self.vertices.windows(2) {
            acc += w[0].distance(w[1]);
            s.push(acc);
        }
        s
    }

    /// Parametrization by normalized arclength.
    pub fn constant_speed(&self) -> ParamPolyline {
        let s = self.arclengths();
        let total = *s.last().unwrap();
        let mut knots: Vec<f64> = s.iter().map(|x| x / total).collect();
        *knots.last_mut().unwrap() = 1.0;
        ParamPolyline { knots, points: self.vertices.clone() }
    }

    /// Parametrization with one equal parameter step per segment, `τ_i = i/n`.
    pub fn uniform_in_index(&self) -> ParamPolyline {
        let n = self.segment_count() as f64;
        let knots = (0..self.vertices.len()).map(|i| i as f64 / n).collect();
        ParamPolyline { knots, points: self.vertices.clone() }
    }

    pub fn travel_time(&self, field: &WindField, quad: &QuadratureSpec) -> Result<f64> {
        polyline_time(field, &self.vertices, quad)
    }

    /// CSV with columns `tau,x,y`, `tau` the normalized arclength.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let p = self.constant_speed();
        write_samples_csv(w, &p.knots, &p.points)
    }

    /// Reads `tau,x,y` CSV (the `tau` column is ignored).
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut vertices = Vec::new();
        for rec in rdr.deserialize::<CsvSample>() {
            let rec = rec?;
            vertices.push(Vec2::new(rec.x, rec.y));
        }
        Path::new(vertices)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
struct CsvSample {
    tau: f64,
    x: f64,
    y: f64,
}

fn write_samples_csv<W: Write>(w: W, tau: &[f64], pts: &[Vec2]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for (&t, p) in tau.iter().zip(pts) {
        wtr.serialize(CsvSample { tau: t, x: p.x, y: p.y })?;
    }
    wtr.flush()?;
    Ok(())
}

/// A piecewise-linear map `[0,1] → R²` with knots `τ_j` and values `ξ(τ_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamPolyline {
    pub knots: Vec<f64>,
    pub points: Vec<Vec2>,
}

impl ParamPolyline {
    fn interval(&self, tau: f64) -> usize {
        let n = self.knots.len();
        match self.knots.binary_search_by(|k| k.partial_cmp(&tau).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    pub fn point_at(&self, tau: f64) -> Vec2 {
        let j = self.interval(tau);
        let (t0, t1) = (self.knots[j], self.knots[j + 1]);
        let s = if t1 > t0 { (tau - t0) / (t1 - t0) } else { 0.0 };
        self.points[j].lerp(self.points[j + 1], s)
    }

    /// Derivative on the interval containing `tau` (right-continuous).
    pub fn derivative_at(&self, tau: f64) -> Vec2 {
        let j = self.interval(tau);
        let (t0, t1) = (self.knots[j], self.knots[j + 1]);
        if t1 > t0 {
            (self.points[j + 1] - self.points[j]) / (t1 - t0)
        } else {
            Vec2::ZERO
        }
    }
}

/// The constant-speed representative of a path: the exact geometry of `base`
/// plus `n_s` samples equally spaced in arclength, `ξ(k/(n_s−1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantSpeedPath {
    base: Path,
    samples: Vec<Vec2>,
}

impl ConstantSpeedPath {
    pub fn base(&self) -> &Path {
        &self.base
    }

    pub fn samples(&self) -> &[Vec2] {
        &self.samples
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    pub fn length(&self) -> f64 {
        self.base.length
    }

    /// Sample parameters `τ_k = k/(n_s−1)`.
    pub fn sample_taus(&self) -> Vec<f64> {
        let m = (self.samples.len() - 1) as f64;
        (0..self.samples.len()).map(|k| k as f64 / m).collect()
    }

    /// Exact arclength parametrization of the base geometry.
    pub fn parametrization(&self) -> ParamPolyline {
        self.base.constant_speed()
    }

    pub fn point_at(&self, tau: f64) -> Vec2 {
        self.parametrization().point_at(tau)
    }

    /// Samples merged with the base vertices, ordered by arclength.
    pub fn polyline(&self) -> Vec<Vec2> {
        let p = self.parametrization();
        let taus = self.sample_taus();
        let mut out = Vec::with_capacity(p.knots.len() + taus.len());
        let (mut i, mut j) = (0, 0);
        let tol = 1e-12;
        while i < p.knots.len() || j < taus.len() {
            let take_knot = j >= taus.len() || (i < p.knots.len() && p.knots[i] <= taus[j]);
            let (t, pt) = if take_knot {
                i += 1;
                (p.knots[i - 1], p.points[i - 1])
            } else {
                j += 1;
                (taus[j - 1], self.samples[j - 1])
            };
            let _ = t;
            if out.last().is_none_or(|q: &Vec2| q.distance(pt) > tol * self.base.length) {
                out.push(pt);
            }
        }
        out
    }

    pub fn travel_time(&self, field: &WindField, quad: &QuadratureSpec) -> Result<f64> {
        self.base.travel_time(field, quad)
    }

    /// Gradient of `T` with respect to the samples (end points zero),
    /// treating the samples as the polyline's control points.
    pub fn travel_time_gradient(
        &self,
        field: &WindField,
        quad: &QuadratureSpec,
    ) -> Result<Vec<Vec2>> {
        Ok(polyline_time_grad(field, &self.samples, quad)?.1)
    }

    /// CSV of the samples with columns `tau,x,y`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_samples_csv(w, &self.sample_taus(), &self.samples)
    }
}

/// Resamples `path` at `n_s` points equally spaced in arclength.
pub fn resample_constant_speed(path: &Path, n_s: usize) -> Result<ConstantSpeedPath> {
    if n_s < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let s = path.arclengths();
    let total = path.length;
    let mut samples = Vec::with_capacity(n_s);
    let mut seg = 0;
    let last = path.vertices.len() - 1;
    for k in 0..n_s {
        if k == 0 {
            samples.push(path.origin());
            continue;
        }
        if k == n_s - 1 {
            samples.push(path.destination());
            continue;
        }
        let target = total * k as f64 / (n_s - 1) as f64;
        while seg + 1 < last && s[seg + 1] <= target {
            seg += 1;
        }
        let span = s[seg + 1] - s[seg];
        let frac = if span > 0.0 { ((target - s[seg]) / span).clamp(0.0, 1.0) } else { 0.0 };
        samples.push(path.vertices[seg].lerp(path.vertices[seg + 1], frac));
    }
    Ok(ConstantSpeedPath { base: path.clone(), samples })
}

/// Pointwise difference `δξ = ξ_A − ξ_B` of two parametrized polylines on the
/// merged knot grid. `δξ` is exact at the knots and `δξ_τ` is constant on
/// each interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDeviation {
    pub grid: Vec<f64>,
    pub delta: Vec<Vec2>,
    pub delta_tau: Vec<Vec2>,
    pub sup: f64,
    pub sup_tau: f64,
}

impl PathDeviation {
    /// `‖δξ‖_∞ + ‖δξ_τ‖_∞`
    pub fn lipschitz_norm(&self) -> f64 {
        self.sup + self.sup_tau
    }

    /// `δξ` at an arbitrary parameter.
    pub fn delta_at(&self, tau: f64) -> Vec2 {
        ParamPolyline { knots: self.grid.clone(), points: self.delta.clone() }.point_at(tau)
    }
}

/// Deviation between two constant-speed paths sampled on the same grid.
pub fn deviation(a: &ConstantSpeedPath, b: &ConstantSpeedPath) -> Result<PathDeviation> {
    if a.sample_count() != b.sample_count() {
        return Err(Error::GridMismatch(a.sample_count(), b.sample_count()));
    }
    Ok(deviation_param(&a.parametrization(), &b.parametrization()))
}

/// Merges the knot sets of two parameter grids on `[0, 1]`.
pub fn merge_knots(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = a.iter().chain(b).copied().collect();
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    grid.dedup_by(|x, y| (*x - *y).abs() <= 1e-14);
    grid
}

/// Deviation between two arbitrary parametrized polylines.
pub fn deviation_param(a: &ParamPolyline, b: &ParamPolyline) -> PathDeviation {
    let grid = merge_knots(&a.knots, &b.knots);
    let delta: Vec<Vec2> = grid.iter().map(|&t| a.point_at(t) - b.point_at(t)).collect();
    let mut delta_tau = Vec::with_capacity(grid.len().saturating_sub(1));
    for j in 0..grid.len().saturating_sub(1) {
        let dt = grid[j + 1] - grid[j];
        delta_tau.push((delta[j + 1] - delta[j]) / dt);
    }
    let sup = delta.iter().map(|d| d.norm()).fold(0.0, f64::max);
    let sup_tau = delta_tau.iter().map(|d| d.norm()).fold(0.0, f64::max);
    PathDeviation { grid, delta, delta_tau, sup, sup_tau }
}
