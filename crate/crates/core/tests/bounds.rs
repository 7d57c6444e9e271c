use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zermelo_core::bounds::{
    a_posteriori, alpha, coupling_h, coupling_l, curvature_bound, local_bound, path_length_bounds,
    rounding_error_bound, APrioriSetup, AlphaVariant,
};
use zermelo_core::quadrature::QuadratureSpec;
use zermelo_core::trajectory::{resample_constant_speed, Path};
use zermelo_core::{Error, Vec2, WindField};

const O: Vec2 = Vec2::new(0.0, 0.0);
const D: Vec2 = Vec2::new(1.0, 0.0);

/// The full coefficients, written out term by term with `u = ṽ`.
fn alpha_oracle(c0: f64, c1: f64, c2: f64, v: f64, len: f64) -> [f64; 3] {
    let u = (v * v - c0 * c0).sqrt();
    let s = (v * v + c0 * c0).sqrt();
    let bracket0 = 1.0
        + 6.0 * c0 / u
        + 2.0 * s / u
        + 6.0 * c0 * c0 / (u * u)
        + 8.0 * c0 * c0 * c0 / (u * u * u)
        + 8.0 * c0 * c0 * s / (u * u * u);
    let bracket2 = 1.0 + 2.0 * c0 / u + 2.0 * c0 * c0 / (u * u) + 2.0 * c0 * s / (u * u);
    let a0 = len * (c1 * c1 / (u * u * u) * bracket0 + c2 / (u * u) * bracket2);
    let a1 = c1 / (u * u)
        * (2.0 + 8.0 * c0 / u + 4.0 * c0 * c0 / (u * u) + 8.0 * c0 * c0 * c0 / (u * u * u));
    let a2 = 1.0 / (u * len) * (1.0 + 3.0 * c0 * c0 / (u * u));
    [a0, a1, a2]
}

fn simplified_oracle(c0: f64, c1: f64, c2: f64, v: f64, len: f64) -> [f64; 3] {
    let u = (v * v - c0 * c0).sqrt();
    [len / u.powi(3) * (12.0 * c1 * c1 + 4.0 * u * c2), 8.0 * c1 / (u * u), 2.0 / (len * u)]
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[test]
fn alpha_matches_transcription() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut simplified_checked = 0;
    for _ in 0..1000 {
        let v = rng.gen_range(0.5..3.0);
        let c0 = v * rng.gen_range(0.0..0.99);
        let (c1, c2, len) = (rng.gen_range(0.0..50.0), rng.gen_range(0.0..500.0), rng.gen_range(0.1..5.0));
        let full = alpha(c0, c1, c2, v, len, AlphaVariant::Full).unwrap().as_array();
        let oracle = alpha_oracle(c0, c1, c2, v, len);
        for k in 0..3 {
            assert!(rel(full[k], oracle[k]) < 1e-12, "α{k} at {:?}", (c0, c1, c2, v, len));
        }
        match alpha(c0, c1, c2, v, len, AlphaVariant::Simplified) {
            Ok(s) => {
                assert!(c0 <= v / 5f64.sqrt());
                let s = s.as_array();
                let o = simplified_oracle(c0, c1, c2, v, len);
                for k in 0..3 {
                    assert!(rel(s[k], o[k]) < 1e-12);
                    assert!(s[k] >= full[k], "simplified α{k} below full at {:?}", (c0, c1, c2, v));
                }
                simplified_checked += 1;
            }
            Err(Error::SimplifiedInapplicable { .. }) => assert!(c0 > v / 5f64.sqrt()),
            Err(e) => panic!("{e}"),
        }
    }
    assert!(simplified_checked > 300);
}

#[test]
fn alpha_rejects_wind_at_airspeed() {
    assert!(matches!(
        alpha(1.0, 0.0, 0.0, 1.0, 1.0, AlphaVariant::Full),
        Err(Error::WindExceedsAirspeed { .. })
    ));
}

#[test]
fn shear_global_constants() {
    // |w| ≤ 1/2, ‖J‖ = 1/2 / (1/4), no curvature; L_max = 1.5/0.5
    let field = WindField::preset("shear").unwrap();
    let s = APrioriSetup::new(O, D, &field).unwrap();
    assert!((s.constants.c0 - 0.5).abs() < 1e-12);
    assert!((s.constants.c1 - 2.0).abs() < 1e-9);
    assert!(s.constants.c2.abs() < 1e-9);
    assert_eq!((s.direct, s.max_length), (1.0, 3.0));
    let r2 = 2f64.sqrt();
    let sigma = 2.0 * 9.0 / 0.5 * (r2 + 3.0 * (1.0 + r2 + 0.5));
    assert!(rel(s.sigma, sigma) < 1e-9, "{} vs {sigma}", s.sigma);
    assert!(!s.simplified_valid);
}

#[test]
fn pipeline_stays_below_printed_form() {
    // weak shear: c̄0 = 0.3 ≤ 1/√5, so the relaxed printed constants apply
    let field = WindField::shear(0.3, 0.5, 1.0);
    let s = APrioriSetup::new(O, D, &field).unwrap();
    assert!(s.simplified_valid);
    for l in [0.3, 0.1, 0.01, 1e-4] {
        let (b, p) = (s.bound(l), s.printed(1.0, l));
        assert!(b > 0.0 && b <= p, "l = {l}: {b} > {p}");
    }
}

#[test]
fn pipeline_closed_form_without_mean_wind() {
    // c0 = 0 turns the coefficients into L(3c1² + c2), 2c1, 1/L for v̄ = 1
    let (c1, c2, len, lt, sigma, l) = (1.5, 4.0, 2.0, 1.2, 3.0, 0.05);
    let a = alpha(0.0, c1, c2, 1.0, len, AlphaVariant::Full).unwrap();
    assert_eq!(a.as_array(), [len * (3.0 * c1 * c1 + c2), 2.0 * c1, 1.0 / len]);
    let x = l / lt;
    let by_hand = 4.0 * sigma * sigma * x * x / 3.0
        * (x * x * len * (3.0 * c1 * c1 + c2) + 10.0 * x * c1 + 23.0 / len);
    let b = rounding_error_bound(sigma, lt, l, a.as_array());
    assert!(rel(b, by_hand) < 1e-14);
}

#[test]
fn calm_air_collapses_every_bound() {
    let field = WindField::calm();
    let q = QuadratureSpec::default();
    let s = APrioriSetup::new(O, D, &field).unwrap();
    assert_eq!(s.sigma, 0.0);
    assert_eq!(s.bound(0.1), 0.0);
    let line = resample_constant_speed(&Path::straight(O, D).unwrap(), 65).unwrap();
    let post = a_posteriori(&line, &Path::straight(O, D).unwrap().constant_speed(), &field, &q).unwrap();
    assert_eq!(post.total, 0.0);
    let local = local_bound(&line, &field, &q, 0.0, 0.1).unwrap();
    assert_eq!(local.value, 0.0);
    assert_eq!(local.alpha_sup, [0.0, 0.0, 1.0]);
}

#[test]
fn a_priori_is_quadratic_for_small_l() {
    for name in ["shear", "vortex1", "vortex15", "vortex50"] {
        let s = APrioriSetup::new(O, D, &WindField::preset(name).unwrap()).unwrap();
        let (l0, l1) = (1e-5, 1e-4);
        let p = (s.bound(l1) / s.bound(l0)).ln() / (l1 / l0).ln();
        assert!((p - 2.0).abs() < 0.01, "{name}: {p}");
    }
}

#[test]
fn sine_deviation_in_calm_air() {
    // α = (0, 0, 1/(v̄L)), δξ = ε sin(πτ) e_y: the bound is ε²π²/2
    let (eps, n) = (0.01, 2000);
    let field = WindField::calm();
    let q = QuadratureSpec::default();
    let line = resample_constant_speed(&Path::straight(O, D).unwrap(), n + 1).unwrap();
    let wavy: Vec<Vec2> = (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            Vec2::new(t, eps * (std::f64::consts::PI * t).sin())
        })
        .collect();
    let xi = Path::new(wavy).unwrap().uniform_in_index();
    let post = a_posteriori(&line, &xi, &field, &q).unwrap();
    let exact = eps * eps * std::f64::consts::PI.powi(2) / 2.0;
    assert!(rel(post.total, exact) < 1e-5, "{} vs {exact}", post.total);
    assert_eq!(post.terms[0], 0.0);
    assert_eq!(post.terms[1], 0.0);
}

#[test]
fn curvature_and_length_values() {
    // c0 = 0: σ̄ = c1 L² (√2 + 1 + √2)
    let c = curvature_bound(0.0, 2.0, 1.0, 1.5).unwrap();
    assert!(rel(c.sigma, 2.0 * 2.25 * (1.0 + 2.0 * 2f64.sqrt())) < 1e-14);
    assert_eq!(c.simplified, Some(17.0 * 2.0 * 2.25));
    assert_eq!(curvature_bound(0.5, 1.0, 1.0, 1.0).unwrap().simplified, None);
    let (lo, hi) = path_length_bounds(O, Vec2::new(3.0, 4.0), 0.5, 1.0).unwrap();
    assert_eq!((lo, hi), (5.0, 15.0));
    assert!(path_length_bounds(O, D, 1.0, 1.0).is_err());
}

proptest! {
    #[test]
    fn coupling_inverts(sigma in 0.01f64..1e3, len in 0.1f64..10.0, l in 1e-4f64..1.0) {
        let h = coupling_h(sigma, len, l);
        prop_assert!((coupling_l(sigma, len, h) - l).abs() <= 1e-12 * l);
    }

    #[test]
    fn a_posteriori_is_quadratic_in_deviation(a in -0.2f64..0.2, b in -0.2f64..0.2, k in 1usize..4) {
        let field = WindField::preset("vortex1").unwrap();
        let q = QuadratureSpec::default();
        let xi_c = resample_constant_speed(&Path::straight(O, D).unwrap(), 33).unwrap();
        let offset = |scale: f64| {
            let pts: Vec<Vec2> = (0..=32)
                .map(|i| {
                    let t = i as f64 / 32.0;
                    let s = (k as f64 * std::f64::consts::PI * t).sin();
                    Vec2::new(t + scale * 0.1 * a * s, scale * b * s)
                })
                .collect();
            Path::new(pts).unwrap().uniform_in_index()
        };
        let one = a_posteriori(&xi_c, &offset(1.0), &field, &q).unwrap();
        let two = a_posteriori(&xi_c, &offset(2.0), &field, &q).unwrap();
        prop_assert!(one.total >= 0.0);
        for i in 0..3 {
            prop_assert!((two.terms[i] - 4.0 * one.terms[i]).abs() <= 1e-10 * (1.0 + two.terms[i]));
        }
    }
}
