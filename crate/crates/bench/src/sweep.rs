use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use zermelo_core::bounds::{
    a_posteriori, coupling_h, local_bound, search_domain, APrioriSetup,
};
use zermelo_core::graph::{build_lattice, interpolate, shortest_path, Digraph, LatticeOptions};
use zermelo_core::optimizer::{measure_curvature, optimize, OptimizerStatus};
use zermelo_core::trajectory::Path;
use zermelo_core::{Domain, Error, Result, WindField};

use crate::config::{Coupling, ExperimentConfig, LSweep, SeedPolicy};

/// One density of a sweep. Timings live in [`RowTiming`] so that the table
/// itself is reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRow {
    pub l: f64,
    pub h: f64,
    pub vertex_count: usize,
    pub arc_count: usize,
    pub t_graph: f64,
    pub t_continuous: f64,
    /// `T(ξ_G) − T(ξ_C)`
    pub error: f64,
    pub a_posteriori: f64,
    pub a_posteriori_terms: [f64; 3],
    pub local: f64,
    pub a_priori: f64,
    /// Measured curvature of `ξ_C`, used by the local bound.
    pub sigma: f64,
    pub length: f64,
    pub residual: f64,
    pub status: Option<OptimizerStatus>,
    pub simplified_valid: bool,
    pub l_within_length: bool,
    pub coupling_respected: bool,
    /// Set when the row could not be computed; all numbers are then NaN.
    pub failure: Option<String>,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }

    fn failed(l: f64, h: f64, e: &Error) -> Self {
        let nan = f64::NAN;
        Self {
            l,
            h,
            vertex_count: 0,
            arc_count: 0,
            t_graph: nan,
            t_continuous: nan,
            error: nan,
            a_posteriori: nan,
            a_posteriori_terms: [nan; 3],
            local: nan,
            a_priori: nan,
            sigma: nan,
            length: nan,
            residual: nan,
            status: None,
            simplified_valid: false,
            l_within_length: false,
            coupling_respected: false,
            failure: Some(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RowTiming {
    pub l: f64,
    pub search_secs: f64,
    pub optimize_secs: f64,
    pub bounds_secs: f64,
}

/// Result of the pilot run that fixes the coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Pilot {
    pub l: f64,
    pub h: f64,
    pub sigma: f64,
    pub length: f64,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepTable {
    pub instance: String,
    pub pilot: Option<Pilot>,
    /// Largest `l` actually swept; below the configured one when the sweep
    /// was restricted to the dense regime.
    pub l_max: f64,
    /// Rows in decreasing `l`.
    pub rows: Vec<SweepRow>,
}

const PILOT_LEVELS: i32 = 5;
/// Pilot curvature below this multiple of its length counts as a straight line.
const STRAIGHT: f64 = 1e-8;

struct Context {
    field: WindField,
    domain: Domain,
    setup: APrioriSetup,
    config: ExperimentConfig,
}

impl Context {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let field = config.field()?;
        let (domain, _) = search_domain(config.origin, config.destination, &field)?;
        let setup = APrioriSetup::new(config.origin, config.destination, &field)?;
        Ok(Self { field, domain, setup, config: config.clone() })
    }

    fn lattice(&self, h: f64, l: f64) -> Result<zermelo_core::graph::LatticeDigraph> {
        let c = &self.config;
        build_lattice(
            &self.domain,
            h,
            l,
            &self.field,
            &c.quadrature,
            c.origin,
            c.destination,
            LatticeOptions { vertex_cap: c.vertex_cap },
        )
    }

    fn discrete(&self, h: f64, l: f64) -> Result<(Path, f64, usize, usize)> {
        let g = self.lattice(h, l)?;
        let o = g.find_vertex(self.config.origin).expect("origin is a vertex");
        let d = g.find_vertex(self.config.destination).expect("destination is a vertex");
        let dp = shortest_path(&g, o, d, self.field.airspeed + self.field.max_speed())?;
        let path = interpolate(&dp, &g)?;
        Ok((path, dp.cost, g.vertex_count(), g.arc_count()))
    }

    fn row(&self, l: f64, h: f64) -> Result<(SweepRow, RowTiming)> {
        let c = &self.config;
        let t0 = Instant::now();
        let (xi_g, t_graph, vertex_count, arc_count) = self.discrete(h, l)?;
        let t1 = Instant::now();
        let seed = match c.seed_policy {
            SeedPolicy::Discrete => xi_g.clone(),
            SeedPolicy::Straight => Path::straight(c.origin, c.destination)?,
        };
        let opt = optimize(&seed, &self.field, &c.optimizer)?;
        let t2 = Instant::now();
        let xi_c = &opt.path;
        let post = a_posteriori(xi_c, &xi_g.constant_speed(), &self.field, &c.quadrature)?;
        let sigma = measure_curvature(xi_c);
        let local = local_bound(xi_c, &self.field, &c.quadrature, sigma, l)?;
        let length = xi_c.length();
        let row = SweepRow {
            l,
            h,
            vertex_count,
            arc_count,
            t_graph,
            t_continuous: opt.time,
            error: t_graph - opt.time,
            a_posteriori: post.total,
            a_posteriori_terms: post.terms,
            local: local.value,
            a_priori: self.setup.bound(l),
            sigma,
            length,
            residual: opt.certificate.residual,
            status: Some(opt.status),
            simplified_valid: self.setup.simplified_valid,
            l_within_length: l <= length,
            coupling_respected: h <= coupling_h(sigma, length, l) * (1.0 + 1e-9),
            failure: None,
        };
        let timing = RowTiming {
            l,
            search_secs: (t1 - t0).as_secs_f64(),
            optimize_secs: (t2 - t1).as_secs_f64(),
            bounds_secs: t2.elapsed().as_secs_f64(),
        };
        Ok((row, timing))
    }

    /// Optima at `l = max/2^k` with `h = l/4` for the lattices that fit the
    /// cap; the fastest one fixes the coupling through its curvature and
    /// length.
    fn pilot(&self) -> Result<Pilot> {
        let mut best: Option<Pilot> = None;
        for k in 0..PILOT_LEVELS {
            let l = self.config.l_values.max / f64::powi(2.0, k);
            let h = l / 4.0;
            let seed = match self.discrete(h, l) {
                Ok((seed, ..)) => seed,
                Err(Error::ResourceLimit { .. }) => break,
                Err(e) => return Err(e),
            };
            let opt = optimize(&seed, &self.field, &self.config.optimizer)?;
            if best.as_ref().is_none_or(|b| opt.time < b.time) {
                let (sigma, length) = (measure_curvature(&opt.path), opt.path.length());
                best = Some(Pilot { l, h, sigma, length, time: opt.time });
            }
        }
        best.ok_or(Error::ResourceLimit { needed: usize::MAX, cap: self.config.vertex_cap })
    }

    fn coupling(&self, pilot: Option<&Pilot>) -> impl Fn(f64) -> f64 + Sync {
        let (sigma, length, ratio) = match (&self.config.coupling, pilot) {
            (Coupling::Fixed { sigma, length }, _) => (*sigma, *length, None),
            (Coupling::Proportional { ratio }, _) => (0.0, 1.0, Some(*ratio)),
            // a straight optimum has no curvature to couple to
            (Coupling::Pilot, Some(p)) if p.sigma <= STRAIGHT * p.length => (0.0, 1.0, Some(p.h / p.l)),
            (Coupling::Pilot, Some(p)) => (p.sigma, p.length, None),
            (Coupling::Pilot, None) => unreachable!("pilot coupling without pilot"),
        };
        move |l| match ratio {
            Some(r) => r * l,
            None => coupling_h(sigma, length, l),
        }
    }

    /// Finest `l ≤ max` whose lattice fits the vertex cap.
    fn finest_feasible(&self, couple: &dyn Fn(f64) -> f64) -> Result<f64> {
        let fits = |l: f64| match self.lattice(couple(l), l) {
            Ok(_) => Ok(true),
            Err(Error::ResourceLimit { .. }) => Ok(false),
            Err(e) => Err(e),
        };
        let mut hi = self.config.l_values.max;
        if !fits(hi)? {
            return Err(Error::ResourceLimit { needed: usize::MAX, cap: self.config.vertex_cap });
        }
        let mut lo = hi * 1e-3;
        if fits(lo)? {
            return Ok(lo);
        }
        for _ in 0..50 {
            let mid = (lo * hi).sqrt();
            if fits(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

/// Relative travel-time slack within which two optima count as the same.
const SAME_OPTIMUM: f64 = 1e-6;

impl Context {
    fn rows(&self, ls: &[f64], couple: &(dyn Fn(f64) -> f64 + Sync)) -> Result<Vec<(SweepRow, Option<RowTiming>)>> {
        Ok(pool(self.config.jobs())?.install(|| {
            ls.par_iter()
                .map(|&l| {
                    let h = couple(l);
                    match self.row(l, h) {
                        Ok((row, t)) => (row, Some(t)),
                        Err(e) => (SweepRow::failed(l, h, &e), None),
                    }
                })
                .collect()
        }))
    }
}

/// Coarsest `l` such that this row and all finer ones reach the best known
/// optimum.
fn dense_limit(rows: &[SweepRow], best: f64) -> Option<f64> {
    let mut limit = None;
    for r in rows.iter().rev() {
        if !(r.ok() && (r.t_continuous - best).abs() <= SAME_OPTIMUM * best) {
            break;
        }
        limit = Some(r.l);
    }
    limit
}

/// Runs the full sweep. Rows are computed concurrently and returned in
/// decreasing `l`; a failing row is recorded and the run continues.
pub fn run_instance(config: &ExperimentConfig) -> Result<(SweepTable, Vec<RowTiming>)> {
    let ctx = Context::new(config)?;
    let pilot = match config.coupling {
        Coupling::Pilot => Some(ctx.pilot()?),
        _ => None,
    };
    let couple = ctx.coupling(pilot.as_ref());
    let sweep = &config.l_values;
    let min = match sweep.min {
        Some(m) => m,
        None => ctx.finest_feasible(&couple)?,
    };
    let mut results = ctx.rows(&sweep.values(min), &couple)?;
    let mut l_max = sweep.max;
    if sweep.dense_only && sweep.count > 1 {
        let best = results
            .iter()
            .filter(|r| r.0.ok())
            .map(|r| r.0.t_continuous)
            .chain(pilot.as_ref().map(|p| p.time))
            .fold(f64::INFINITY, f64::min);
        if let Some(limit) = dense_limit(&results.iter().map(|r| r.0.clone()).collect::<Vec<_>>(), best) {
            if limit < sweep.max && limit > min {
                l_max = limit;
                let dense = LSweep { max: limit, ..sweep.clone() };
                results = ctx.rows(&dense.values(min), &couple)?;
            }
        }
    }
    let timings = results.iter().filter_map(|r| r.1).collect();
    let rows = results.into_iter().map(|r| r.0).collect();
    Ok((SweepTable { instance: config.instance.clone(), pilot, l_max, rows }, timings))
}
