//! Stationary analytic wind fields.
//!
//! Three families are supported: a uniform field, the laminar shear flow
//! `w(p) = (w̄·clamp(2p₂/H − 1, −1, 1), 0)` and sums of non-overlapping
//! bump vortices `w_i(p) = s_i w̃(r_i) (−sin α_i, cos α_i)` with
//! `w̃(r) = w̄ exp(q/(q−1))`, `q = (r/R)²`, supported on `r < R`.
//!
//! All fields provide exact first and second derivatives. The shear field is
//! only Lipschitz on the lines `p₂ ∈ {0, H}` and a vortex has an undefined
//! direction at its center; there the derivatives are taken from the zero
//! branch and the value at an exact vortex center is the zero vector.

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geometry::{Mat2, Tensor3, Vec2};

/// One bump vortex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vortex {
    pub center: Vec2,
    pub radius: f64,
    /// `+1` counter-clockwise, `-1` clockwise.
    pub spin: i8,
}

impl Vortex {
    pub fn new(center: Vec2, radius: f64, spin: i8) -> Self {
        Self { center, radius, spin }
    }

    fn sign(&self) -> f64 {
        if self.spin < 0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Profile `w̃(r)` and its first two radial derivatives.
    fn profile(&self, max_speed: f64, r: f64) -> (f64, f64, f64) {
        let r2 = self.radius * self.radius;
        let q = r * r / r2;
        if q >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let qm1 = q - 1.0;
        let g = max_speed * (q / qm1).exp();
        // g' = g u, g'' = g (u² + u')
        let u = -2.0 * r / (r2 * qm1 * qm1);
        let du = -2.0 / (r2 * qm1 * qm1) + 8.0 * r * r / (r2 * r2 * qm1 * qm1 * qm1);
        (g, g * u, g * (u * u + du))
    }

    fn eval(&self, max_speed: f64, p: Vec2) -> Vec2 {
        let d = p - self.center;
        let r = d.norm();
        if r == 0.0 || r >= self.radius {
            return Vec2::ZERO;
        }
        let (g, _, _) = self.profile(max_speed, r);
        d.perp() * (self.sign() * g / r)
    }

    fn jacobian(&self, max_speed: f64, p: Vec2) -> Mat2 {
        let d = p - self.center;
        let r = d.norm();
        if r == 0.0 || r >= self.radius {
            return Mat2::ZERO;
        }
        let (g, g1, _) = self.profile(max_speed, r);
        let phi = g / r;
        let dphi = (g1 - phi) / r;
        let jd = d.perp();
        let grad = d * (dphi / r);
        let s = self.sign();
        // J = [[0,-1],[1,0]]
        let jmat = [[0.0, -1.0], [1.0, 0.0]];
        let jdv = [jd.x, jd.y];
        let gv = [grad.x, grad.y];
        let mut m = [[0.0; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                m[k][i] = s * (jdv[k] * gv[i] + phi * jmat[k][i]);
            }
        }
        Mat2(m)
    }

    fn hessian(&self, max_speed: f64, p: Vec2) -> Tensor3 {
        let d = p - self.center;
        let r = d.norm();
        if r == 0.0 || r >= self.radius {
            return Tensor3::ZERO;
        }
        let (g, g1, g2) = self.profile(max_speed, r);
        let dphi = g1 / r - g / (r * r);
        let ddphi = g2 / r - 2.0 * g1 / (r * r) + 2.0 * g / (r * r * r);
        let dv = [d.x, d.y];
        let jd = d.perp();
        let jdv = [jd.x, jd.y];
        let jmat = [[0.0, -1.0], [1.0, 0.0]];
        let s = self.sign();
        let mut grad = [0.0; 2];
        for i in 0..2 {
            grad[i] = dphi * dv[i] / r;
        }
        let mut t = [[[0.0; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let hij = ddphi * dv[i] * dv[j] / (r * r)
                    + dphi * (delta / r - dv[i] * dv[j] / (r * r * r));
                for k in 0..2 {
                    t[k][i][j] =
                        s * (jdv[k] * hij + jmat[k][j] * grad[i] + jmat[k][i] * grad[j]);
                }
            }
        }
        Tensor3(t)
    }
}

/// The wind model, serialized with a `kind` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum WindKind {
    Uniform {
        wind: Vec2,
    },
    #[serde(rename_all = "camelCase")]
    Shear {
        max_speed: f64,
        height: f64,
    },
    #[serde(rename_all = "camelCase")]
    VortexSum {
        max_speed: f64,
        vortices: Vec<Vortex>,
    },
}

/// A wind field together with the constant airspeed it is flown at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindField {
    pub airspeed: f64,
    pub wind: WindKind,
}

/// Which set a [`WindBounds`] value refers to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum BoundRegion {
    Point { p: Vec2 },
    PathTube { path: Vec<Vec2>, radius: f64 },
    Domain { domain: Domain },
}

/// Suprema of `‖w‖`, `‖w_x‖_F`, `‖w_xx‖_F` over a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindBounds {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub region: BoundRegion,
}

/// Sampled suprema over vortex discs are multiplied by this factor.
pub const SAMPLED_BOUND_INFLATION: f64 = 1.05;
/// Sampling grid spacing for vortex suprema, as a fraction of the radius.
pub const VORTEX_SAMPLES_PER_RADIUS: f64 = 50.0;
/// Derivative suprema of a vortex skip the core `r < VORTEX_CORE·R`. The
/// field turns discontinuously at the center, so `‖w_x‖ ~ w̄/r` there and
/// any sampled value would only reflect the sampling grid.
pub const VORTEX_CORE: f64 = 0.5;

const SHEAR_LEVELS: usize = 8;
// r/R: linear inside, then sqrt(1 - 2^(-k/2)) so that the exponent q/(q-1)
// grows by √2 from one level to the next towards the rim
const VORTEX_LEVELS: [f64; 21] = [
    0.125,
    0.25,
    0.375,
    0.5,
    0.5411961001461969,
    std::f64::consts::FRAC_1_SQRT_2,
    0.8040190354753588,
    0.8660254037844386,
    0.9073165405212026,
    0.9354143466934853,
    0.9547835630925375,
    0.9682458365518543,
    0.9776532238865889,
    0.9842509842514764,
    0.988889737578422,
    0.9921567416492215,
    0.9944603846026046,
    0.9960860906568267,
    0.9972340388654912,
    0.998044963916957,
    1.0,
];

/// Named instances shipped with the library.
pub const PRESETS: [&str; 4] = ["shear", "vortex1", "vortex15", "vortex50"];

impl WindField {
    pub fn uniform(wind: Vec2, airspeed: f64) -> Self {
        Self { airspeed, wind: WindKind::Uniform { wind } }
    }

    pub fn shear(max_speed: f64, height: f64, airspeed: f64) -> Self {
        Self { airspeed, wind: WindKind::Shear { max_speed, height } }
    }

    pub fn vortex_sum(max_speed: f64, vortices: Vec<Vortex>, airspeed: f64) -> Result<Self> {
        let field = Self { airspeed, wind: WindKind::VortexSum { max_speed, vortices } };
        field.validate()?;
        Ok(field)
    }

    /// Zero wind at unit airspeed.
    pub fn calm() -> Self {
        Self::uniform(Vec2::ZERO, 1.0)
    }

    /// One of the four benchmark instances (`shear`, `vortex1`, `vortex15`,
    /// `vortex50`), all with `v̄ = 1` and `w̄ = 0.5`.
    pub fn preset(name: &str) -> Result<Self> {
        let airspeed = 1.0;
        let max_speed = 0.5;
        match name {
            "shear" => Ok(Self::shear(max_speed, 0.5, airspeed)),
            "vortex1" => Self::vortex_sum(
                max_speed,
                vec![Vortex::new(Vec2::new(0.5, 0.0), 0.5, 1)],
                airspeed,
            ),
            "vortex15" => {
                let rows = [(-0.1875, 1), (0.0625, -1), (0.3125, 1)];
                let mut vortices = Vec::with_capacity(15);
                for (y, spin) in rows {
                    for j in 0..5 {
                        vortices.push(Vortex::new(Vec2::new(0.25 * j as f64, y), 0.125, spin));
                    }
                }
                Self::vortex_sum(max_speed, vortices, airspeed)
            }
            "vortex50" => {
                let spins = [-1, 1, -1, 1, -1];
                let mut vortices = Vec::with_capacity(50);
                for (i, spin) in spins.into_iter().enumerate() {
                    let y = -0.21875 + 0.125 * i as f64;
                    for j in 0..10 {
                        let x = -0.0625 + 0.125 * j as f64;
                        vortices.push(Vortex::new(Vec2::new(x, y), 0.0625, spin));
                    }
                }
                Self::vortex_sum(max_speed, vortices, airspeed)
            }
            other => Err(Error::InvalidArgument(format!("unknown instance preset '{other}'"))),
        }
    }

    /// Checks parameter sanity and that vortices do not overlap.
    pub fn validate(&self) -> Result<()> {
        if !(self.airspeed > 0.0) {
            return Err(Error::InvalidArgument("airspeed must be positive".into()));
        }
        match &self.wind {
            WindKind::Uniform { wind } => {
                if !wind.is_finite() {
                    return Err(Error::InvalidArgument("wind must be finite".into()));
                }
            }
            WindKind::Shear { max_speed, height } => {
                if !(*height > 0.0) || !(*max_speed >= 0.0) {
                    return Err(Error::InvalidArgument("shear needs H > 0 and w̄ >= 0".into()));
                }
            }
            WindKind::VortexSum { max_speed, vortices } => {
                if !(*max_speed >= 0.0) {
                    return Err(Error::InvalidArgument("w̄ must be nonnegative".into()));
                }
                for (i, a) in vortices.iter().enumerate() {
                    if !(a.radius > 0.0) || !a.center.is_finite() || a.spin.abs() != 1 {
                        return Err(Error::InvalidArgument(format!("vortex {i} is malformed")));
                    }
                    for (j, b) in vortices.iter().enumerate().skip(i + 1) {
                        let gap = a.center.distance(b.center) - (a.radius + b.radius);
                        if gap < -1e-12 {
                            return Err(Error::InvalidArgument(format!(
                                "vortices {i} and {j} overlap"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Upper bound on the wind magnitude anywhere, `w̄`.
    pub fn max_speed(&self) -> f64 {
        match &self.wind {
            WindKind::Uniform { wind } => wind.norm(),
            WindKind::Shear { max_speed, .. } => *max_speed,
            WindKind::VortexSum { max_speed, vortices } => {
                if vortices.is_empty() {
                    0.0
                } else {
                    *max_speed
                }
            }
        }
    }

    pub fn eval(&self, p: Vec2) -> Vec2 {
        match &self.wind {
            WindKind::Uniform { wind } => *wind,
            WindKind::Shear { max_speed, height } => {
                Vec2::new(max_speed * (2.0 * p.y / height - 1.0).clamp(-1.0, 1.0), 0.0)
            }
            WindKind::VortexSum { max_speed, vortices } => vortices
                .iter()
                .fold(Vec2::ZERO, |acc, v| acc + v.eval(*max_speed, p)),
        }
    }

    pub fn jacobian(&self, p: Vec2) -> Mat2 {
        match &self.wind {
            WindKind::Uniform { .. } => Mat2::ZERO,
            WindKind::Shear { max_speed, height } => {
                if p.y > 0.0 && p.y < *height {
                    Mat2::new([[0.0, 2.0 * max_speed / height], [0.0, 0.0]])
                } else {
                    Mat2::ZERO
                }
            }
            WindKind::VortexSum { max_speed, vortices } => vortices
                .iter()
                .fold(Mat2::ZERO, |acc, v| acc.add(&v.jacobian(*max_speed, p))),
        }
    }

    pub fn hessian(&self, p: Vec2) -> Tensor3 {
        match &self.wind {
            WindKind::Uniform { .. } | WindKind::Shear { .. } => Tensor3::ZERO,
            WindKind::VortexSum { max_speed, vortices } => {
                let mut t = Tensor3::ZERO;
                for v in vortices {
                    t.add_assign(&v.hessian(*max_speed, p));
                }
                t
            }
        }
    }

    /// Value restricted to the listed vortices (all other terms are known to vanish).
    #[inline]
    pub(crate) fn eval_active(&self, p: Vec2, active: &[u16]) -> Vec2 {
        match &self.wind {
            WindKind::VortexSum { max_speed, vortices } => active
                .iter()
                .fold(Vec2::ZERO, |acc, &i| acc + vortices[i as usize].eval(*max_speed, p)),
            _ => self.eval(p),
        }
    }

    #[inline]
    pub(crate) fn jacobian_active(&self, p: Vec2, active: &[u16]) -> Mat2 {
        match &self.wind {
            WindKind::VortexSum { max_speed, vortices } => active.iter().fold(Mat2::ZERO, |acc, &i| {
                acc.add(&vortices[i as usize].jacobian(*max_speed, p))
            }),
            _ => self.jacobian(p),
        }
    }

    /// Whether the closed segment `a → b` touches a line where the field's
    /// derivative jumps (the shear kinks `y = 0` and `y = H`).
    pub fn touches_kink(&self, a: Vec2, b: Vec2) -> bool {
        match &self.wind {
            WindKind::Shear { height, .. } => {
                let (lo, hi) = (a.y.min(b.y), a.y.max(b.y));
                (lo <= 0.0 && hi >= 0.0) || (lo <= *height && hi >= *height)
            }
            _ => false,
        }
    }

    /// Characteristic length of the field's spatial variation.
    pub fn feature_length(&self) -> f64 {
        match &self.wind {
            WindKind::Uniform { .. } => f64::INFINITY,
            WindKind::Shear { height, .. } => *height,
            WindKind::VortexSum { vortices, .. } => vortices
                .iter()
                .map(|v| v.radius)
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Splits the segment `a → b` into quadrature panels. Panel boundaries are
    /// placed on level sets of the field (shear levels `p₂ = kH/8`, vortex
    /// circles at fixed fractions of `R`) and dyadically graded around the
    /// closest approach to each vortex center, so the layout moves
    /// continuously with the segment end points.
    pub fn segment_panels(&self, a: Vec2, b: Vec2, scratch: &mut SegmentPanels) {
        scratch.clear();
        let d = b - a;
        let breaks = &mut scratch.breaks;
        breaks.push(0.0);
        match &self.wind {
            WindKind::Uniform { .. } => {}
            WindKind::Shear { height, .. } => {
                if d.y != 0.0 {
                    for k in 0..=SHEAR_LEVELS {
                        let level = height * k as f64 / SHEAR_LEVELS as f64;
                        let s = (level - a.y) / d.y;
                        if s > 0.0 && s < 1.0 {
                            breaks.push(s);
                        }
                    }
                }
            }
            WindKind::VortexSum { vortices, .. } => {
                let len2 = d.norm_sq();
                let len = len2.sqrt();
                for (idx, v) in vortices.iter().enumerate() {
                    let m = a - v.center;
                    // closest approach parameter and distance
                    let s_star = if len2 > 0.0 { -m.dot(d) / len2 } else { 0.0 };
                    let closest = m + d * s_star;
                    let dist = closest.norm();
                    if dist >= v.radius {
                        continue;
                    }
                    let half_chord = (v.radius * v.radius - dist * dist).sqrt();
                    if s_star + half_chord / len <= 0.0 || s_star - half_chord / len >= 1.0 {
                        continue;
                    }
                    scratch.active.push(idx as u16);
                    let mut push = |s: f64| {
                        if s > 0.0 && s < 1.0 {
                            breaks.push(s);
                        }
                    };
                    for frac in VORTEX_LEVELS {
                        let rr = frac * v.radius;
                        if rr > dist {
                            let hc = (rr * rr - dist * dist).sqrt() / len;
                            push(s_star - hc);
                            push(s_star + hc);
                        }
                    }
                    push(s_star);
                    for k in 1..4 {
                        let off = half_chord * k as f64 / 4.0 / len;
                        push(s_star - off);
                        push(s_star + off);
                    }
                    let mut off = 0.5 * dist;
                    while off < half_chord {
                        if off > 0.0 {
                            push(s_star - off / len);
                            push(s_star + off / len);
                        } else {
                            break;
                        }
                        off *= 2.0;
                    }
                }
            }
        }
        breaks.push(1.0);
        breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
        breaks.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        for w in 0..breaks.len() - 1 {
            let (s0, s1) = (breaks[w], breaks[w + 1]);
            if s1 <= s0 {
                continue;
            }
            let mid = a + d * (0.5 * (s0 + s1));
            let start = scratch.panel_active.len() as u32;
            let constant = match &self.wind {
                WindKind::Uniform { .. } => true,
                WindKind::Shear { height, .. } => mid.y <= 0.0 || mid.y >= *height,
                WindKind::VortexSum { vortices, .. } => {
                    for &i in &scratch.active {
                        let v = &vortices[i as usize];
                        if mid.distance(v.center) < v.radius {
                            scratch.panel_active.push(i);
                        }
                    }
                    scratch.panel_active.len() as u32 == start
                }
            };
            let count = scratch.panel_active.len() as u32 - start;
            scratch.panels.push(Panel { s0, s1, constant, active: (start, count) });
        }
    }

    /// Local or regional suprema of the wind and its derivatives.
    pub fn local_bounds(&self, p: Vec2) -> Result<WindBounds> {
        let b = WindBounds {
            c0: self.eval(p).norm(),
            c1: self.jacobian(p).frobenius(),
            c2: self.hessian(p).frobenius(),
            region: BoundRegion::Point { p },
        };
        self.check_bound(b)
    }

    /// Suprema over all points within `radius` of the polyline `path`.
    pub fn tube_bounds(&self, path: &[Vec2], radius: f64) -> Result<WindBounds> {
        if path.is_empty() || !(radius >= 0.0) {
            return Err(Error::InvalidArgument("tube needs a path and radius >= 0".into()));
        }
        let dist_to_path = |p: Vec2| -> f64 {
            if path.len() == 1 {
                return p.distance(path[0]);
            }
            path.windows(2)
                .map(|w| point_segment_distance(p, w[0], w[1]))
                .fold(f64::INFINITY, f64::min)
        };
        let region = BoundRegion::PathTube { path: path.to_vec(), radius };
        let (c0, c1, c2) = match &self.wind {
            WindKind::Uniform { wind } => (wind.norm(), 0.0, 0.0),
            WindKind::Shear { max_speed, height } => {
                let (lo, hi) = path.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p.y - radius), hi.max(p.y + radius))
                });
                shear_bounds(*max_speed, *height, lo, hi)
            }
            WindKind::VortexSum { max_speed, vortices } => {
                let mut acc = (0.0f64, 0.0f64, 0.0f64);
                for v in vortices {
                    if dist_to_path(v.center) >= v.radius + radius {
                        continue;
                    }
                    let contains_center = dist_to_path(v.center) <= radius;
                    let s = sample_vortex(v, *max_speed, |p| dist_to_path(p) <= radius);
                    acc.0 = acc.0.max(if contains_center { *max_speed } else { s.0 });
                    acc.1 = acc.1.max(s.1 * SAMPLED_BOUND_INFLATION);
                    acc.2 = acc.2.max(s.2 * SAMPLED_BOUND_INFLATION);
                }
                acc
            }
        };
        self.check_bound(WindBounds { c0, c1, c2, region })
    }

    /// Global constants `c̄0, c̄1, c̄2` over a domain.
    pub fn global_bounds(&self, domain: &Domain) -> Result<WindBounds> {
        let region = BoundRegion::Domain { domain: domain.clone() };
        let (lo, hi) = domain.bounding_box();
        let (c0, c1, c2) = match &self.wind {
            WindKind::Uniform { wind } => (wind.norm(), 0.0, 0.0),
            WindKind::Shear { max_speed, height } => shear_bounds(*max_speed, *height, lo.y, hi.y),
            WindKind::VortexSum { max_speed, vortices } => {
                let mut acc = (0.0f64, 0.0f64, 0.0f64);
                for v in vortices {
                    let nearest = Vec2::new(v.center.x.clamp(lo.x, hi.x), v.center.y.clamp(lo.y, hi.y));
                    if nearest.distance(v.center) >= v.radius {
                        continue;
                    }
                    let s = sample_vortex(v, *max_speed, |p| domain.contains(p));
                    acc.0 = acc.0.max(if domain.contains(v.center) { *max_speed } else { s.0 });
                    acc.1 = acc.1.max(s.1 * SAMPLED_BOUND_INFLATION);
                    acc.2 = acc.2.max(s.2 * SAMPLED_BOUND_INFLATION);
                }
                acc
            }
        };
        self.check_bound(WindBounds { c0, c1, c2, region })
    }

    fn check_bound(&self, b: WindBounds) -> Result<WindBounds> {
        if b.c0 >= self.airspeed {
            return Err(Error::BoundExceedsAirspeed { c0: b.c0, airspeed: self.airspeed });
        }
        Ok(b)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: WindField = serde_json::from_str(s)?;
        f.validate()?;
        Ok(f)
    }
}

fn shear_bounds(max_speed: f64, height: f64, lo: f64, hi: f64) -> (f64, f64, f64) {
    let prof = |y: f64| (2.0 * y / height - 1.0).clamp(-1.0, 1.0).abs();
    // |clamp| is convex in y, so the sup sits at an end of the interval
    let c0 = max_speed * prof(lo).max(prof(hi));
    let c1 = if hi > 0.0 && lo < height { 2.0 * max_speed / height } else { 0.0 };
    (c0, c1, 0.0)
}

/// Sampled suprema of a single vortex over `{p in disc : keep(p)}` on a
/// cell-centred grid anchored at the vortex center; derivatives outside the
/// core only.
fn sample_vortex(v: &Vortex, max_speed: f64, keep: impl Fn(Vec2) -> bool) -> (f64, f64, f64) {
    let n = VORTEX_SAMPLES_PER_RADIUS as i64;
    let step = v.radius / VORTEX_SAMPLES_PER_RADIUS;
    let mut acc = (0.0f64, 0.0f64, 0.0f64);
    for i in -n..n {
        for j in -n..n {
            let off = Vec2::new((i as f64 + 0.5) * step, (j as f64 + 0.5) * step);
            if off.norm() >= v.radius {
                continue;
            }
            let p = v.center + off;
            if !keep(p) {
                continue;
            }
            acc.0 = acc.0.max(v.eval(max_speed, p).norm());
            if off.norm() < VORTEX_CORE * v.radius {
                continue;
            }
            acc.1 = acc.1.max(v.jacobian(max_speed, p).frobenius());
            acc.2 = acc.2.max(v.hessian(max_speed, p).frobenius());
        }
    }
    acc
}

pub(crate) fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let len2 = d.norm_sq();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let s = ((p - a).dot(d) / len2).clamp(0.0, 1.0);
    p.distance(a + d * s)
}

/// A quadrature panel `[s0, s1]` of a segment parameter.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub s0: f64,
    pub s1: f64,
    /// Wind is constant on the whole panel.
    pub constant: bool,
    active: (u32, u32),
}

/// Reusable buffers for [`WindField::segment_panels`].
#[derive(Debug, Default, Clone)]
pub struct SegmentPanels {
    breaks: Vec<f64>,
    active: Vec<u16>,
    panel_active: Vec<u16>,
    pub panels: Vec<Panel>,
}

impl SegmentPanels {
    fn clear(&mut self) {
        self.breaks.clear();
        self.active.clear();
        self.panel_active.clear();
        self.panels.clear();
    }

    /// Vortices that can be nonzero on `panel`.
    #[inline]
    pub fn active(&self, panel: &Panel) -> &[u16] {
        let (start, count) = panel.active;
        &self.panel_active[start as usize..(start + count) as usize]
    }
}
