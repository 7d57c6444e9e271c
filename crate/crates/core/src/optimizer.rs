//! Continuous trajectory optimization over polyline control points, and the
//! heading-angle optimality residual.
//!
//! The end points are fixed and the interior control points are moved by a
//! limited-memory BFGS iteration with Armijo backtracking on the travel time.
//! Since `T` does not depend on the parametrization, control points tend to
//! drift along the path; they are periodically redistributed at equal
//! arclength as long as that does not increase `T`.
//!
//! Tangential moves of nearly collinear control points barely change `T`, so
//! the problem is badly conditioned and L-BFGS stalls well above tight
//! tolerances. Below a configurable gradient level (by default right away)
//! the iteration switches to a damped Newton method on the normal offsets of
//! an equal-arclength reference polyline. Each offset only interacts with
//! its two neighbours, so the Hessian is tridiagonal and costs six gradient
//! evaluations (central differences, perturbing every third offset at once). The reported
//! gradient norm is then the normal part; the tangential part only reflects
//! the equal-spacing constraint.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::quadrature::QuadratureSpec;
use crate::trajectory::{
    integrand_parts, polyline_time, polyline_time_grad, resample_constant_speed, ConstantSpeedPath,
    Path,
};
use crate::wind::WindField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct OptimizerConfig {
    pub control_points: usize,
    pub max_iterations: usize,
    /// Stop when `n ‖∇T‖_∞ L / T` falls below this.
    pub gradient_tolerance: f64,
    pub reparametrize_every: usize,
    /// Redistribution is only attempted while the relative gradient is above this.
    pub reparametrize_above: f64,
    pub memory: usize,
    pub armijo_c1: f64,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    /// Switch from L-BFGS to damped Newton once the relative gradient is
    /// below this. The default skips the L-BFGS phase.
    pub newton_below: f64,
    pub quadrature: QuadratureSpec,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            control_points: 64,
            max_iterations: 5000,
            gradient_tolerance: 1e-9,
            reparametrize_every: 10,
            reparametrize_above: 1e-5,
            memory: 10,
            armijo_c1: 1e-4,
            backtrack_factor: 0.5,
            max_backtracks: 60,
            newton_below: 1e30,
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.control_points < 3 {
            return Err(Error::InvalidArgument("need at least 3 control points".into()));
        }
        if !(self.gradient_tolerance > 0.0) || self.memory == 0 {
            return Err(Error::InvalidArgument("tolerance and memory must be positive".into()));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::InvalidArgument("backtrack factor must lie in (0,1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OptimizerStatus {
    Converged,
    MaxIterations,
    /// The line search stalled; the best iterate is returned.
    NoDescent,
    /// The optimized path was slower than the seed, so the seed is returned.
    SeedKept,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimalityCertificate {
    /// `sup |φ_t − w_x : B(φ)| · T` over the control-point windows.
    pub residual: f64,
    /// `n ‖∇T‖_∞ L / T`.
    pub gradient_norm: f64,
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub path: ConstantSpeedPath,
    pub time: f64,
    pub seed_time: f64,
    pub iterations: usize,
    pub status: OptimizerStatus,
    pub certificate: OptimalityCertificate,
}

fn flatten(pts: &[Vec2]) -> Vec<f64> {
    pts[1..pts.len() - 1].iter().flat_map(|p| [p.x, p.y]).collect()
}

fn unflatten(x: &[f64], ends: (Vec2, Vec2), out: &mut Vec<Vec2>) {
    out.clear();
    out.push(ends.0);
    for c in x.chunks_exact(2) {
        out.push(Vec2::new(c[0], c[1]));
    }
    out.push(ends.1);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn relative_gradient(g: &[f64], n: usize, len: f64, t: f64) -> f64 {
    let inf = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    n as f64 * inf * len / t
}

fn length(pts: &[Vec2]) -> f64 {
    pts.windows(2).map(|w| w[0].distance(w[1])).sum()
}

struct Objective<'a> {
    field: &'a WindField,
    quad: &'a QuadratureSpec,
    ends: (Vec2, Vec2),
    buf: Vec<Vec2>,
}

impl Objective<'_> {
    fn value_grad(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        unflatten(x, self.ends, &mut self.buf);
        let (t, g) = polyline_time_grad(self.field, &self.buf, self.quad)?;
        Ok((t, flatten(&g)))
    }

    fn value(&mut self, x: &[f64]) -> Option<f64> {
        unflatten(x, self.ends, &mut self.buf);
        if self.buf.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        polyline_time(self.field, &self.buf, self.quad).ok().filter(|t| t.is_finite())
    }
}

/// Locally minimizes the travel time starting from `seed`.
pub fn optimize(seed: &Path, field: &WindField, config: &OptimizerConfig) -> Result<OptimizeResult> {
    config.validate()?;
    let quad = &config.quadrature;
    let n = config.control_points;
    let seed_time = seed.travel_time(field, quad)?;
    let ends = (seed.origin(), seed.destination());
    let mut obj = Objective { field, quad, ends, buf: Vec::with_capacity(n) };

    let mut x = flatten(resample_constant_speed(seed, n)?.samples());
    let (mut t, mut g) = obj.value_grad(&x)?;
    let mut pts = Vec::with_capacity(n);
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut status = OptimizerStatus::MaxIterations;
    let mut iterations = 0;
    let mut since_reparam = 0;
    let mut normal_rel = None;

    while iterations < config.max_iterations {
        unflatten(&x, ends, &mut pts);
        let len = length(&pts);
        let rel = relative_gradient(&g, n, len, t);
        if rel < config.gradient_tolerance {
            status = OptimizerStatus::Converged;
            break;
        }
        if rel < config.newton_below {
            let budget = config.max_iterations - iterations;
            let out = newton(&mut obj, &mut x, &mut t, &mut g, n, config, budget)?;
            iterations += out.1;
            status = out.0;
            normal_rel = Some(out.2);
            break;
        }
        if since_reparam >= config.reparametrize_every && rel > config.reparametrize_above {
            since_reparam = 0;
            if let Ok(p) = Path::new(pts.clone()) {
                let xr = flatten(resample_constant_speed(&p, n)?.samples());
                if let Ok((tr, gr)) = obj.value_grad(&xr) {
                    if tr <= t {
                        x = xr;
                        t = tr;
                        g = gr;
                        mem.clear();
                        continue;
                    }
                }
            }
        }
        iterations += 1;
        since_reparam += 1;

        // two-loop recursion
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, rho) in mem.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = mem.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            mem.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        let mut step = if mem.is_empty() {
            // first move limited to a quarter of the control spacing
            let dmax = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (0.25 * len / (n - 1) as f64 / dmax).min(1.0)
        } else {
            1.0
        };

        let mut accepted = None;
        let mut trial = vec![0.0; x.len()];
        for _ in 0..config.max_backtracks {
            for ((ti, xi), di) in trial.iter_mut().zip(&x).zip(&d) {
                *ti = xi + step * di;
            }
            if let Some(tt) = obj.value(&trial) {
                if tt <= t + config.armijo_c1 * step * slope {
                    accepted = Some(tt);
                    break;
                }
            }
            step *= config.backtrack_factor;
        }
        let Some(_) = accepted else {
            if mem.is_empty() {
                status = OptimizerStatus::NoDescent;
                break;
            }
            mem.clear();
            continue;
        };
        let (tn, gn) = obj.value_grad(&trial)?;
        let s: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            mem.push_back((s, y, 1.0 / sy));
            if mem.len() > config.memory {
                mem.pop_front();
            }
        }
        x = trial;
        t = tn;
        g = gn;
    }

    unflatten(&x, ends, &mut pts);
    let mut path = Path::new(pts.clone())?;
    let mut time = t;
    let mut grad_norm = normal_rel.unwrap_or_else(|| relative_gradient(&g, n, path.length(), t));
    if time > seed_time + 1e-12 {
        status = OptimizerStatus::SeedKept;
        path = seed.clone();
        time = seed_time;
        grad_norm = f64::NAN;
    }
    let csp = resample_constant_speed(&path, n)?;
    let residual = heading_residual(&csp, field, quad)?;
    Ok(OptimizeResult {
        path: csp,
        time,
        seed_time,
        iterations,
        status,
        certificate: OptimalityCertificate { residual, gradient_norm: grad_norm },
    })
}

fn normals(pts: &[Vec2]) -> Vec<Vec2> {
    (1..pts.len() - 1)
        .map(|i| {
            let t = pts[i + 1] - pts[i - 1];
            t.perp() / t.norm()
        })
        .collect()
}

fn offset(reference: &[Vec2], nu: &[Vec2], s: &[f64]) -> Vec<f64> {
    let mut x = Vec::with_capacity(2 * s.len());
    for ((r, n), si) in reference[1..].iter().zip(nu).zip(s) {
        let p = *r + *n * *si;
        x.push(p.x);
        x.push(p.y);
    }
    x
}

fn project(g: &[f64], nu: &[Vec2]) -> Vec<f64> {
    g.chunks_exact(2).zip(nu).map(|(c, n)| c[0] * n.x + c[1] * n.y).collect()
}

/// Tridiagonal Hessian of `s ↦ T(r + sν)` by central differences of the
/// gradient, perturbing every third offset at once.
fn normal_hessian(
    obj: &mut Objective,
    reference: &[Vec2],
    nu: &[Vec2],
    s: &[f64],
    eps: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = s.len();
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m.saturating_sub(1)];
    let mut lower = vec![0.0; m.saturating_sub(1)];
    let mut sp = s.to_vec();
    for color in 0..3 {
        for i in (color..m).step_by(3) {
            sp[i] = s[i] + eps;
        }
        let gp = project(&obj.value_grad(&offset(reference, nu, &sp))?.1, nu);
        for i in (color..m).step_by(3) {
            sp[i] = s[i] - eps;
        }
        let gm = project(&obj.value_grad(&offset(reference, nu, &sp))?.1, nu);
        for i in (color..m).step_by(3) {
            sp[i] = s[i];
            let col = |j: usize| (gp[j] - gm[j]) / (2.0 * eps);
            diag[i] = col(i);
            if i + 1 < m {
                lower[i] = col(i + 1);
            }
            if i > 0 {
                upper[i - 1] = col(i - 1);
            }
        }
    }
    let off = lower.iter().zip(&upper).map(|(a, b)| 0.5 * (a + b)).collect();
    Ok((diag, off))
}

/// Solves `(H + μI) d = −g` for symmetric tridiagonal `H` by Cholesky;
/// `None` if the matrix is not positive definite.
fn solve_tridiagonal(diag: &[f64], off: &[f64], mu: f64, g: &[f64]) -> Option<Vec<f64>> {
    let m = diag.len();
    let mut piv = Vec::with_capacity(m);
    let mut y = Vec::with_capacity(m);
    for i in 0..m {
        let (mut d, mut r) = (diag[i] + mu, -g[i]);
        if i > 0 {
            let l = off[i - 1];
            d -= l * l / piv[i - 1];
            r -= l * y[i - 1] / piv[i - 1];
        }
        if !(d > 0.0) {
            return None;
        }
        piv.push(d);
        y.push(r);
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut r = y[i];
        if i + 1 < m {
            r -= off[i] * x[i + 1];
        }
        x[i] = r / piv[i];
    }
    Some(x)
}

/// Damped Newton iteration on normal offsets of an equal-arclength
/// reference polyline. After each inner solve the result is redistributed at
/// equal arclength and becomes the next reference; the iteration ends when
/// the normal gradient is already below tolerance right after a
/// redistribution.
fn newton(
    obj: &mut Objective,
    x: &mut Vec<f64>,
    t: &mut f64,
    g: &mut Vec<f64>,
    n: usize,
    config: &OptimizerConfig,
    budget: usize,
) -> Result<(OptimizerStatus, usize, f64)> {
    let mut pts = Vec::with_capacity(n);
    let mut iterations = 0;
    let mut rel = f64::INFINITY;
    for _ in 0..budget.max(1) {
        unflatten(x, obj.ends, &mut pts);
        let reference = resample_constant_speed(&Path::new(pts.clone())?, n)?.samples().to_vec();
        let xr = flatten(&reference);
        let (tr, gr) = obj.value_grad(&xr)?;
        *x = xr;
        *t = tr;
        *g = gr;
        let nu = normals(&reference);
        let len = length(&reference);
        let spacing = len / (n - 1) as f64;
        let mut s = vec![0.0; n - 2];
        let mut gs = project(g, &nu);
        let mut mu_rel = 0.0f64;
        let mut inner = 0;
        loop {
            rel = relative_gradient(&gs, n, len, *t);
            if rel < config.gradient_tolerance {
                break;
            }
            if iterations >= budget {
                return Ok((OptimizerStatus::MaxIterations, iterations, rel));
            }
            iterations += 1;
            inner += 1;
            let (diag, off) = normal_hessian(obj, &reference, &nu, &s, 1e-4 * spacing)?;
            let scale = diag.iter().map(|d| d.abs()).sum::<f64>() / diag.len() as f64;
            let gnorm = dot(&gs, &gs).sqrt();
            let mut accepted = false;
            for _ in 0..40 {
                let mu = mu_rel * scale.max(f64::MIN_POSITIVE);
                let Some(mut d) = solve_tridiagonal(&diag, &off, mu, &gs) else {
                    mu_rel = (mu_rel * 10.0).max(1e-10);
                    continue;
                };
                let dmax = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if dmax > 0.25 * spacing {
                    let k = 0.25 * spacing / dmax;
                    d.iter_mut().for_each(|v| *v *= k);
                }
                let slope = dot(&gs, &d);
                if !(slope < 0.0) {
                    mu_rel = (mu_rel * 10.0).max(1e-10);
                    continue;
                }
                let trial_s: Vec<f64> = s.iter().zip(&d).map(|(a, b)| a + b).collect();
                let trial = offset(&reference, &nu, &trial_s);
                if let Some(tt) = obj.value(&trial) {
                    let armijo = tt <= *t + config.armijo_c1 * slope;
                    // at round-off level T cannot resolve progress; accept if
                    // the gradient shrinks and T does not measurably grow
                    let flat = tt <= *t * (1.0 + 4.0 * f64::EPSILON);
                    if armijo || flat {
                        let (tn, gn) = obj.value_grad(&trial)?;
                        let gsn = project(&gn, &nu);
                        if armijo || dot(&gsn, &gsn).sqrt() < gnorm {
                            s = trial_s;
                            *x = trial;
                            *t = tn;
                            *g = gn;
                            gs = gsn;
                            mu_rel = if mu_rel < 1e-11 { 0.0 } else { mu_rel * 0.1 };
                            accepted = true;
                            break;
                        }
                    }
                }
                mu_rel = (mu_rel * 10.0).max(1e-8);
            }
            if !accepted {
                return Ok((OptimizerStatus::NoDescent, iterations, rel));
            }
            // large offsets leave the frame of the reference normals
            if s.iter().any(|v| v.abs() > 0.5 * spacing) {
                break;
            }
        }
        if inner == 0 {
            return Ok((OptimizerStatus::Converged, iterations, rel));
        }
    }
    Ok((OptimizerStatus::MaxIterations, iterations, rel))
}

/// Heading angle of the airspeed vector needed to fly along `d` at `p`.
fn heading(field: &WindField, p: Vec2, d: Vec2) -> Result<(f64, f64)> {
    let w = field.eval(p);
    let v = field.airspeed;
    if w.norm_sq() >= v * v {
        return Err(Error::WindExceedsAirspeed { wind: w.norm(), airspeed: v });
    }
    let (f, _) = integrand_parts(w, d, v);
    let air = d / f - w;
    let speed = air.norm();
    if (speed - v).abs() > 1e-6 * v {
        return Err(Error::AirspeedInconsistency { found: speed, expected: v });
    }
    Ok((air.y.atan2(air.x), f))
}

/// `w_x : B(φ)` with `B = [[cs, −c²], [s², −cs]]`.
fn zermelo_rate(field: &WindField, p: Vec2, phi: f64) -> f64 {
    let j = field.jacobian(p).0;
    let (s, c) = phi.sin_cos();
    // rows of j: (u_x, u_y), (v_x, v_y)
    s * s * j[1][0] + s * c * (j[0][0] - j[1][1]) - c * c * j[0][1]
}

/// Integrated Zermelo equation between consecutive segment midpoints:
/// for each interior vertex the change of heading between the two adjacent
/// segment midpoints is compared with `∫ w_x : B(φ) dt` over the same
/// stretch. Returns the largest mismatch per unit time, scaled by `T`.
pub fn heading_residual(
    path: &ConstantSpeedPath,
    field: &WindField,
    quad: &QuadratureSpec,
) -> Result<f64> {
    Ok(heading_residual_profile(path, field, quad)?.into_iter().fold(0.0, f64::max))
}

/// The residual of [`heading_residual`] at each interior vertex.
pub fn heading_residual_profile(
    path: &ConstantSpeedPath,
    field: &WindField,
    quad: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let pts = path.base().vertices();
    let m = pts.len() - 1;
    if m < 2 {
        return Ok(Vec::new());
    }
    let total = polyline_time(field, pts, quad)?;
    // headings at segment midpoints, unwrapped along the path
    let mut phi: Vec<f64> = Vec::with_capacity(m);
    for j in 0..m {
        let (a, b) = (pts[j], pts[j + 1]);
        // fourth-order tangent at the midpoint where the path is smooth enough
        let smooth = j >= 1
            && j + 2 <= m
            && !(j - 1..j + 2).any(|i| field.touches_kink(pts[i], pts[i + 1]));
        let d = if smooth {
            (b - a) * (27.0 / 24.0) - (pts[j + 2] - pts[j - 1]) / 24.0
        } else {
            b - a
        };
        let (mut h, _) = heading(field, a.lerp(b, 0.5), d)?;
        if let Some(&prev) = phi.last() {
            let two_pi = std::f64::consts::TAU;
            h += two_pi * ((prev - h) / two_pi).round();
        }
        phi.push(h);
    }
    let mut panels = crate::wind::SegmentPanels::default();
    let mut half = |a: Vec2, b: Vec2, s0: f64, s1: f64| -> Result<(f64, f64)> {
        // integrate rate·dt and dt over s ∈ [s0, s1] of segment a→b
        let d = b - a;
        field.segment_panels(a, b, &mut panels);
        let (mut rate, mut dt) = (0.0, 0.0);
        for panel in &panels.panels {
            let (p0, p1) = (panel.s0.max(s0), panel.s1.min(s1));
            if p1 <= p0 {
                continue;
            }
            for (&s, &wt) in quad.nodes().iter().zip(quad.weights()) {
                let p = a + d * (p0 + s * (p1 - p0));
                let (ph, f) = heading(field, p, d)?;
                let c = wt * (p1 - p0) * f;
                rate += c * zermelo_rate(field, p, ph);
                dt += c;
            }
        }
        Ok((rate, dt))
    };
    let mut out = Vec::with_capacity(m - 1);
    for k in 1..m {
        let (r0, t0) = half(pts[k - 1], pts[k], 0.5, 1.0)?;
        let (r1, t1) = half(pts[k], pts[k + 1], 0.0, 0.5)?;
        let dphi = phi[k] - phi[k - 1];
        let dt = t0 + t1;
        out.push(if dt > 0.0 { (dphi - r0 - r1).abs() / dt * total } else { 0.0 });
    }
    Ok(out)
}

/// Discrete curvature `sup ‖ξ_{k+1} − 2ξ_k + ξ_{k−1}‖ (n_s−1)²` over the samples.
pub fn measure_curvature(path: &ConstantSpeedPath) -> f64 {
    let s = path.samples();
    if s.len() < 3 {
        return 0.0;
    }
    let scale = ((s.len() - 1) as f64).powi(2);
    s.windows(3)
        .map(|w| (w[2] - w[1] * 2.0 + w[0]).norm() * scale)
        .fold(0.0, f64::max)
}
