use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zermelo_core::quadrature::QuadratureSpec;
use zermelo_core::trajectory::{
    deviation, deviation_param, integrand_f, polyline_time_grad, resample_constant_speed,
    segment_time, Path,
};
use zermelo_core::{Error, Vec2, WindField};

fn v(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}

/// The integrand exactly as written, with the subtraction left in.
fn f_direct(w: Vec2, d: Vec2, vb: f64) -> f64 {
    let a = d.x * w.x + d.y * w.y;
    let g = vb * vb - (w.x * w.x + w.y * w.y);
    (-a + (a * a + g * (d.x * d.x + d.y * d.y)).sqrt()) / g
}

/// Composite midpoint rule along one segment.
fn midpoint_time(field: &WindField, a: Vec2, b: Vec2, n: usize) -> f64 {
    let d = b - a;
    let mut acc = 0.0;
    for k in 0..n {
        let s = (k as f64 + 0.5) / n as f64;
        acc += f_direct(field.eval(a + d * s), d, field.airspeed);
    }
    acc / n as f64
}

fn random_path(rng: &mut ChaCha8Rng, n: usize, spread: f64) -> Path {
    let mut pts = vec![v(0.0, 0.0)];
    for k in 1..n - 1 {
        let x = k as f64 / (n - 1) as f64 + rng.gen_range(-0.3..0.3) / n as f64;
        pts.push(v(x, rng.gen_range(-spread..spread)));
    }
    pts.push(v(1.0, 0.0));
    Path::new(pts).unwrap()
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

#[test]
fn straight_path_times() {
    let p = Path::straight(v(0.0, 0.0), v(1.0, 0.0)).unwrap();
    let q = quad();
    let cases = [
        (v(0.0, 0.0), 1.0),
        (v(0.5, 0.0), 2.0 / 3.0),
        (v(-0.5, 0.0), 2.0),
        (v(0.0, 0.5), 1.0 / 0.75f64.sqrt()),
    ];
    for (w, expect) in cases {
        let t = p.travel_time(&WindField::uniform(w, 1.0), &q).unwrap();
        assert!((t - expect).abs() < 1e-12, "w={w:?}: {t} vs {expect}");
    }
}

#[test]
fn shear_centerline_is_pure_headwind() {
    let field = WindField::preset("shear").unwrap();
    let (a, b) = (v(0.0, 0.0), v(1.0, 0.0));
    let t = segment_time(&field, a, b, &quad()).unwrap();
    assert!((t - 2.0).abs() < 1e-12);
    let riemann = midpoint_time(&field, a, b, 1_000_000);
    assert!((t - riemann).abs() < 1e-9);
}

#[test]
fn quadrature_agrees_with_midpoint_rule() {
    let q = quad();
    let segs = [
        ("shear", v(0.05, -0.1), v(0.9, 0.61)),
        ("vortex1", v(0.0, 0.0), v(1.0, 0.1)),
        ("vortex1", v(0.1, -0.4), v(0.8, 0.3)),
        ("vortex15", v(-0.1, -0.3), v(1.1, 0.4)),
        ("vortex50", v(0.0, -0.2), v(1.0, 0.25)),
    ];
    for (name, a, b) in segs {
        let field = WindField::preset(name).unwrap();
        let t = segment_time(&field, a, b, &q).unwrap();
        let m = midpoint_time(&field, a, b, 400_000);
        assert!(((t - m) / t).abs() < 1e-8, "{name}: {t} vs {m}");
    }
}

#[test]
fn integrand_rejects_strong_wind() {
    let r = integrand_f(v(0.0, 1.0), v(1.0, 0.0), 1.0);
    assert!(matches!(r, Err(Error::WindExceedsAirspeed { .. })));
    let field = WindField::uniform(v(1.2, 0.0), 1.0);
    let p = Path::straight(v(0.0, 0.0), v(1.0, 0.0)).unwrap();
    assert!(p.travel_time(&field, &quad()).is_err());
}

#[test]
fn collinear_midpoints_do_not_change_time() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let q = quad();
    for name in zermelo_core::wind::PRESETS {
        let field = WindField::preset(name).unwrap();
        for _ in 0..10 {
            let p = random_path(&mut rng, 7, 0.35);
            let mut refined = Vec::new();
            for w in p.vertices().windows(2) {
                refined.push(w[0]);
                refined.push(w[0].lerp(w[1], rng.gen_range(0.1..0.9)));
            }
            refined.push(p.destination());
            let t0 = p.travel_time(&field, &q).unwrap();
            let t1 = Path::new(refined).unwrap().travel_time(&field, &q).unwrap();
            assert!(((t1 - t0) / t0).abs() < 1e-10, "{name}: {t0} vs {t1}");
        }
    }
}

#[test]
fn halving_segments_converges() {
    let q = quad();
    for name in zermelo_core::wind::PRESETS {
        let field = WindField::preset(name).unwrap();
        let p = Path::new(vec![v(0.0, 0.0), v(0.3, 0.2), v(0.7, -0.15), v(1.0, 0.0)]).unwrap();
        let mut refined = Vec::new();
        for w in p.vertices().windows(2) {
            refined.push(w[0]);
            refined.push(w[0].lerp(w[1], 0.5));
        }
        refined.push(p.destination());
        let t0 = p.travel_time(&field, &q).unwrap();
        let t1 = Path::new(refined).unwrap().travel_time(&field, &q).unwrap();
        assert!(((t1 - t0) / t0).abs() < 1e-9, "{name}");
    }
}

#[test]
fn round_trip_in_uniform_wind_is_slower() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let q = quad();
    for _ in 0..50 {
        let w = v(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
        let field = WindField::uniform(w, 1.0);
        let a = v(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let b = v(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let dist = a.distance(b);
        let tf = segment_time(&field, a, b, &q).unwrap();
        let tb = segment_time(&field, b, a, &q).unwrap();
        assert!(tf + tb >= 2.0 * dist - 1e-12);
        // closed form: 2 dist / (v̄² − ‖w‖²) · sqrt(v̄² − ‖w‖²(1 − cos²θ))
        let g = 1.0 - w.norm_sq();
        let along = (b - a).dot(w) / dist;
        let expect = 2.0 * dist * (g + along * along).sqrt() / g;
        assert!(((tf + tb) - expect).abs() < 1e-12 * expect);
    }
    let field = WindField::uniform(v(0.0, 0.0), 1.0);
    let t = segment_time(&field, v(0.0, 0.0), v(3.0, 4.0), &q).unwrap()
        + segment_time(&field, v(3.0, 4.0), v(0.0, 0.0), &q).unwrap();
    assert!((t - 10.0).abs() < 1e-12);
}

fn fd_gradient_error(field: &WindField, verts: &[Vec2], q: &QuadratureSpec) -> f64 {
    let (_, g) = polyline_time_grad(field, verts, q).unwrap();
    let step = 1e-6;
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut pts = verts.to_vec();
    for i in 1..verts.len() - 1 {
        for axis in 0..2 {
            let orig = pts[i];
            let e = if axis == 0 { v(step, 0.0) } else { v(0.0, step) };
            pts[i] = orig + e;
            let tp = zermelo_core::trajectory::polyline_time(field, &pts, q).unwrap();
            pts[i] = orig - e;
            let tm = zermelo_core::trajectory::polyline_time(field, &pts, q).unwrap();
            pts[i] = orig;
            let fd = (tp - tm) / (2.0 * step);
            let an = if axis == 0 { g[i].x } else { g[i].y };
            err = err.max((fd - an).abs());
            scale = scale.max(an.abs());
        }
    }
    err / scale.max(1e-300)
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let q = quad();
    for name in zermelo_core::wind::PRESETS {
        let field = WindField::preset(name).unwrap();
        for _ in 0..15 {
            let n = rng.gen_range(6..=12);
            let p = random_path(&mut rng, n, 0.4);
            let rel = fd_gradient_error(&field, p.vertices(), &q);
            assert!(rel < 1e-5, "{name}: relative error {rel}");
        }
    }
}

#[test]
fn straight_zero_wind_gradient_vanishes() {
    let p = Path::straight(v(0.0, 0.0), v(2.0, 1.0)).unwrap();
    let cs = resample_constant_speed(&p, 17).unwrap();
    let g = cs.travel_time_gradient(&WindField::calm(), &quad()).unwrap();
    assert!(g.iter().all(|x| x.norm() < 1e-13));
}

#[test]
fn negative_gradient_descends_in_uniform_wind() {
    let field = WindField::uniform(v(0.3, -0.2), 1.0);
    let q = quad();
    let pts: Vec<Vec2> = (0..9)
        .map(|k| {
            let t = k as f64 / 8.0;
            v(t, 0.05 * (std::f64::consts::PI * t).sin() * (3.0 * t).cos())
        })
        .collect();
    let (t0, g) = polyline_time_grad(&field, &pts, &q).unwrap();
    let gn: f64 = g.iter().map(|x| x.norm_sq()).sum::<f64>().sqrt();
    assert!(gn > 0.0);
    // interior vertices move toward the chord
    for (p, gi) in pts.iter().zip(&g).skip(1).take(7) {
        if p.y.abs() > 1e-3 {
            assert!(gi.y * p.y > 0.0);
        }
    }
    for eps in [1e-2, 1e-3, 1e-4] {
        let moved: Vec<Vec2> = pts.iter().zip(&g).map(|(p, gi)| *p - *gi * eps).collect();
        let t1 = zermelo_core::trajectory::polyline_time(&field, &moved, &q).unwrap();
        assert!(t1 < t0);
    }
}

#[test]
fn resample_straight_and_l_shape() {
    let p = Path::straight(v(0.0, 0.0), v(1.0, 0.0)).unwrap();
    let cs = resample_constant_speed(&p, 5).unwrap();
    for (k, s) in cs.samples().iter().enumerate() {
        assert!(s.distance(v(k as f64 / 4.0, 0.0)) < 1e-15);
    }
    let l = Path::new(vec![v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0)]).unwrap();
    let cs = resample_constant_speed(&l, 8).unwrap();
    for (k, s) in cs.samples().iter().enumerate() {
        let arc = k as f64 * 2.0 / 7.0;
        let expect = if arc <= 1.0 { v(arc, 0.0) } else { v(1.0, arc - 1.0) };
        assert!(s.distance(expect) < 1e-14, "k={k}: {s:?} vs {expect:?}");
    }
    assert!(matches!(resample_constant_speed(&l, 1), Err(Error::InvalidArgument(_))));
}

#[test]
fn resample_preserves_length() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let p = random_path(&mut rng, 9, 0.5);
        let cs = resample_constant_speed(&p, 1000).unwrap();
        let merged = Path::new(cs.polyline()).unwrap();
        assert!(((merged.length() - p.length()) / p.length()).abs() < 1e-9);
        assert!((cs.length() - p.length()).abs() < 1e-15);
        // consecutive samples sit L/(n_s−1) apart in arclength, so chords on
        // straight stretches equal that spacing
        let step = p.length() / 999.0;
        let chords: Vec<f64> = cs.samples().windows(2).map(|w| w[0].distance(w[1])).collect();
        let exact = chords.iter().filter(|c| ((**c - step) / step).abs() < 1e-9).count();
        assert!(exact + p.segment_count() > chords.len());
        assert!(chords.iter().all(|c| *c <= step * (1.0 + 1e-9)));
    }
}

#[test]
fn deviation_of_sine_offset() {
    let n = 4001;
    let straight = Path::new((0..n).map(|k| v(k as f64 / (n - 1) as f64, 0.0)).collect()).unwrap();
    let bumped = Path::new(
        (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                v(t, 0.1 * (std::f64::consts::PI * t).sin())
            })
            .collect(),
    )
    .unwrap();
    let d = deviation_param(&bumped.uniform_in_index(), &straight.uniform_in_index());
    assert!((d.sup - 0.1).abs() < 1e-9);
    assert!((d.sup_tau - 0.1 * std::f64::consts::PI).abs() < 1e-5);
    assert!(d.delta[0].norm() < 1e-15 && d.delta.last().unwrap().norm() < 1e-15);
    assert!((d.lipschitz_norm() - 0.1 * (1.0 + std::f64::consts::PI)).abs() < 1e-5);
}

#[test]
fn deviation_of_identical_paths_and_grid_mismatch() {
    let p = Path::new(vec![v(0.0, 0.0), v(0.4, 0.3), v(1.0, 0.0)]).unwrap();
    let a = resample_constant_speed(&p, 64).unwrap();
    let d = deviation(&a, &a).unwrap();
    assert_eq!(d.sup, 0.0);
    assert_eq!(d.sup_tau, 0.0);
    let b = resample_constant_speed(&p, 65).unwrap();
    assert!(matches!(deviation(&a, &b), Err(Error::GridMismatch(64, 65))));
    let q = Path::straight(v(0.0, 0.0), v(1.0, 0.0)).unwrap();
    let d = deviation(&a, &resample_constant_speed(&q, 64).unwrap()).unwrap();
    assert_eq!(d.delta[0], Vec2::ZERO);
    assert_eq!(*d.delta.last().unwrap(), Vec2::ZERO);
}

#[test]
fn duplicate_vertices_are_dropped() {
    let p = Path::new(vec![v(0.0, 0.0), v(0.0, 0.0), v(0.5, 0.0), v(0.5, 1e-14), v(1.0, 0.0)]).unwrap();
    assert_eq!(p.vertices().len(), 3);
    assert!(matches!(Path::new(vec![v(1.0, 1.0), v(1.0, 1.0)]), Err(Error::DegeneratePath(_))));
    assert!(matches!(Path::new(vec![v(1.0, 1.0)]), Err(Error::DegeneratePath(_))));
}

#[test]
fn csv_and_json_round_trip() {
    let p = Path::new(vec![v(0.0, 0.0), v(0.25, 0.125), v(1.0, -0.5)]).unwrap();
    let mut buf = Vec::new();
    p.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("tau,x,y\n"));
    assert_eq!(Path::read_csv(buf.as_slice()).unwrap(), p);
    assert_eq!(Path::from_json(&p.to_json().unwrap()).unwrap(), p);
}

proptest! {
    #[test]
    fn integrand_matches_direct_formula(
        wx in -0.7f64..0.7, wy in -0.7f64..0.7,
        dx in -2.0f64..2.0, dy in -2.0f64..2.0,
    ) {
        let w = v(wx, wy);
        let d = v(dx, dy);
        prop_assume!(w.norm() < 0.95 && d.norm() > 1e-3);
        let f = integrand_f(w, d, 1.0).unwrap();
        prop_assert!(f > 0.0);
        let direct = f_direct(w, d, 1.0);
        prop_assert!((f - direct).abs() <= 1e-12 * direct.max(1.0));
        // ground speed along d equals ‖d‖/f and lies within v̄ ± ‖w‖
        let speed = d.norm() / f;
        prop_assert!(speed >= 1.0 - w.norm() - 1e-12 && speed <= 1.0 + w.norm() + 1e-12);
    }

    #[test]
    fn time_is_positive_homogeneous_in_speed(
        ax in -1.0f64..1.0, ay in -1.0f64..1.0, bx in -1.0f64..1.0, by in -1.0f64..1.0,
    ) {
        let (a, b) = (v(ax, ay), v(bx, by));
        prop_assume!(a.distance(b) > 1e-3);
        let q = quad();
        let field = WindField::preset("vortex15").unwrap();
        let t = segment_time(&field, a, b, &q).unwrap();
        prop_assert!(t > 0.0);
        prop_assert!(t >= a.distance(b) / 1.5 - 1e-12);
        prop_assert!(t <= a.distance(b) / 0.5 + 1e-12);
    }
}
