use proptest::prelude::*;
use zermelo_core::bounds::search_domain;
use zermelo_core::graph::{build_lattice, interpolate, shortest_path, Digraph, LatticeOptions};
use zermelo_core::optimizer::{
    heading_residual, measure_curvature, optimize, OptimizerConfig, OptimizerStatus,
};
use zermelo_core::quadrature::QuadratureSpec;
use zermelo_core::trajectory::{resample_constant_speed, Path};
use zermelo_core::{Vec2, WindField};

const O: Vec2 = Vec2::new(0.0, 0.0);
const D: Vec2 = Vec2::new(1.0, 0.0);

fn config(n: usize) -> OptimizerConfig {
    OptimizerConfig { control_points: n, ..OptimizerConfig::default() }
}

fn graph_seed(field: &WindField, l: f64, h: f64) -> Path {
    let (domain, _) = search_domain(O, D, field).unwrap();
    let q = QuadratureSpec::default();
    let g = build_lattice(&domain, h, l, field, &q, O, D, LatticeOptions::default()).unwrap();
    let (o, d) = (g.find_vertex(O).unwrap(), g.find_vertex(D).unwrap());
    let dp = shortest_path(&g, o, d, field.airspeed + field.max_speed()).unwrap();
    interpolate(&dp, &g).unwrap()
}

fn bent(height: f64) -> Path {
    Path::new(vec![O, Vec2::new(0.3, height), Vec2::new(0.7, -height), D]).unwrap()
}

#[test]
fn constant_wind_optimum_is_straight() {
    // ground speed along the x axis is w_x + sqrt(v̄² − w_y²)
    let cases = [
        (Vec2::ZERO, 1.0),
        (Vec2::new(0.4, 0.0), 1.0 / 1.4),
        (Vec2::new(-0.4, 0.0), 1.0 / 0.6),
        (Vec2::new(0.0, 0.3), 1.0 / 0.91f64.sqrt()),
        (Vec2::new(0.2, -0.3), 1.0 / (0.2 + 0.91f64.sqrt())),
    ];
    for (w, exact) in cases {
        let field = WindField::uniform(w, 1.0);
        let r = optimize(&bent(0.15), &field, &config(32)).unwrap();
        assert!((r.time - exact).abs() < 1e-8, "{w:?}: {} vs {exact}", r.time);
        let off = r.path.samples().iter().map(|p| p.y.abs()).fold(0.0, f64::max);
        assert!(off < 1e-5, "{w:?}: lateral offset {off}");
    }
}

#[test]
fn shear_improves_on_graph_seed() {
    let field = WindField::preset("shear").unwrap();
    let seed = graph_seed(&field, 0.15, 0.04);
    let r = optimize(&seed, &field, &config(128)).unwrap();
    assert_eq!(r.status, OptimizerStatus::Converged);
    assert!(r.time < r.seed_time && r.time < 2.0);
    assert!((r.time - 1.338_69).abs() < 1e-4, "{}", r.time);
    // the detour leaves the headwind along y = 0
    let top = r.path.samples().iter().map(|p| p.y.abs()).fold(0.0, f64::max);
    assert!(top > 0.2);
}

#[test]
fn certificate_tightens_under_refinement() {
    for name in ["shear", "vortex1"] {
        let field = WindField::preset(name).unwrap();
        let seed = graph_seed(&field, 0.1, 0.02);
        let res: Vec<f64> = [64, 128, 256]
            .iter()
            .map(|&n| optimize(&seed, &field, &config(n)).unwrap().certificate.residual)
            .collect();
        assert!(res[2] < 1e-3, "{name}: {res:?}");
        assert!(res[0] > res[1] && res[1] > res[2], "{name}: {res:?}");
    }
}

#[test]
fn optimum_is_a_local_minimum() {
    let field = WindField::preset("vortex1").unwrap();
    let q = QuadratureSpec::default();
    let r = optimize(&graph_seed(&field, 0.1, 0.02), &field, &config(64)).unwrap();
    let pts = r.path.base().vertices();
    let n = pts.len() - 1;
    for mode in 1..4 {
        let mut last = 0.0;
        for k in 1..6 {
            let eps = 1e-3 * k as f64;
            let moved: Vec<Vec2> = pts
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let s = i as f64 / n as f64;
                    *p + Vec2::new(0.3, 1.0) * (eps * (mode as f64 * std::f64::consts::PI * s).sin())
                })
                .collect();
            let dt = Path::new(moved).unwrap().travel_time(&field, &q).unwrap() - r.time;
            assert!(dt > last - 1e-13, "mode {mode}, eps {eps}: {dt} after {last}");
            last = dt;
        }
        assert!(last > 0.0);
    }
}

#[test]
fn optimum_does_not_depend_on_seed() {
    let field = WindField::preset("shear").unwrap();
    let a = optimize(&graph_seed(&field, 0.2, 0.06), &field, &config(128)).unwrap();
    let b = optimize(&graph_seed(&field, 0.08, 0.015), &field, &config(128)).unwrap();
    let c = optimize(&bent(0.3), &field, &config(128)).unwrap();
    assert!((a.time - b.time).abs() < 1e-7, "{} {}", a.time, b.time);
    assert!((a.time - c.time).abs() < 1e-7, "{} {}", a.time, c.time);
}

#[test]
fn circle_arc_curvature() {
    // quarter circle of radius ρ: ‖ξ_ττ‖ = L²/ρ under constant speed
    let rho = 0.8;
    let pts: Vec<Vec2> = (0..=400)
        .map(|i| {
            let t = std::f64::consts::FRAC_PI_2 * i as f64 / 400.0;
            Vec2::new(rho * t.sin(), rho * (1.0 - t.cos()))
        })
        .collect();
    let arc = resample_constant_speed(&Path::new(pts).unwrap(), 128).unwrap();
    let exact = arc.length().powi(2) / rho;
    let sigma = measure_curvature(&arc);
    assert!((sigma / exact - 1.0).abs() < 0.05, "{sigma} vs {exact}");
    let line = resample_constant_speed(&Path::straight(O, D).unwrap(), 64).unwrap();
    assert!(measure_curvature(&line) < 1e-12);
}

#[test]
fn straight_line_in_calm_air_has_no_residual() {
    let field = WindField::calm();
    let line = resample_constant_speed(&Path::straight(O, D).unwrap(), 65).unwrap();
    let r = heading_residual(&line, &field, &QuadratureSpec::default()).unwrap();
    assert!(r < 1e-12, "{r}");
}

#[test]
fn rejects_bad_config() {
    let field = WindField::calm();
    let seed = Path::straight(O, D).unwrap();
    assert!(optimize(&seed, &field, &config(2)).is_err());
    let c = OptimizerConfig { backtrack_factor: 1.0, ..config(16) };
    assert!(optimize(&seed, &field, &c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn never_worse_than_seed(
        h1 in -0.4f64..0.4,
        h2 in -0.4f64..0.4,
        x1 in 0.1f64..0.45,
        x2 in 0.55f64..0.9,
        preset in 0usize..4,
    ) {
        let field = WindField::preset(["shear", "vortex1", "vortex15", "vortex50"][preset]).unwrap();
        let seed = Path::new(vec![O, Vec2::new(x1, h1), Vec2::new(x2, h2), D]).unwrap();
        let r = optimize(&seed, &field, &config(32)).unwrap();
        prop_assert!(r.time <= r.seed_time + 1e-12);
        let again = r.path.travel_time(&field, &QuadratureSpec::default()).unwrap();
        prop_assert!((again - r.time).abs() <= 1e-12 * r.time);
    }
}
