//! Discretization error bounds.
//!
//! The second directional derivative of the integrand is bounded by
//! `α0 ‖δξ‖² + α1 ‖δξ‖‖δξ_τ‖ + α2 ‖δξ_τ‖²`, with coefficients depending on the
//! local wind bounds `c0, c1, c2`, the airspeed and the path length `L`. From
//! this follow three estimates of `T(ξ_G) − T(ξ_C)`:
//!
//! * a posteriori: `∫ α(ξ_C)·(δξ, δξ_τ) dτ` with the actual deviation,
//! * local: the rounding error estimate in terms of suprema along `ξ_C`,
//! * a priori: the same with global constants and end points only.

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::quadrature::QuadratureSpec;
use crate::trajectory::{deviation_param, ConstantSpeedPath, ParamPolyline};
use crate::wind::{SegmentPanels, WindBounds, WindField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum AlphaVariant {
    Full,
    /// Valid only for `c0 ≤ v̄/√5`.
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AlphaCoefficients {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub variant: AlphaVariant,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub airspeed: f64,
    pub length: f64,
    /// `ṽ = sqrt(v̄² − c0²)`
    pub v_low: f64,
}

impl AlphaCoefficients {
    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha0, self.alpha1, self.alpha2]
    }
}

/// Evaluates the coefficients for given local constants.
pub fn alpha(
    c0: f64,
    c1: f64,
    c2: f64,
    airspeed: f64,
    length: f64,
    variant: AlphaVariant,
) -> Result<AlphaCoefficients> {
    if c0 >= airspeed {
        return Err(Error::WindExceedsAirspeed { wind: c0, airspeed });
    }
    let v = airspeed;
    let vl = (v * v - c0 * c0).sqrt();
    let (a0, a1, a2) = match variant {
        AlphaVariant::Full => {
            let r = c0 / vl;
            let q = (v * v + c0 * c0).sqrt() / vl;
            let a0 = length
                * (c1 * c1 / vl.powi(3)
                    * (1.0 + 6.0 * r + 2.0 * q + 6.0 * r * r + 8.0 * r.powi(3) + 8.0 * r * r * q)
                    + c2 / (vl * vl) * (1.0 + 2.0 * r + 2.0 * r * r + 2.0 * r * q));
            let a1 = c1 / (vl * vl) * (2.0 + 8.0 * r + 4.0 * r * r + 8.0 * r.powi(3));
            let a2 = (1.0 + 3.0 * r * r) / (vl * length);
            (a0, a1, a2)
        }
        AlphaVariant::Simplified => {
            if c0 > v / 5f64.sqrt() {
                return Err(Error::SimplifiedInapplicable { c0 });
            }
            let a0 = length / vl.powi(3) * (12.0 * c1 * c1 + 4.0 * vl * c2);
            (a0, 8.0 * c1 / (vl * vl), 2.0 / (length * vl))
        }
    };
    Ok(AlphaCoefficients {
        alpha0: a0,
        alpha1: a1,
        alpha2: a2,
        variant,
        c0,
        c1,
        c2,
        airspeed,
        length,
        v_low: vl,
    })
}

/// Coefficients from the wind at `p`.
pub fn alpha_at(
    p: Vec2,
    field: &WindField,
    length: f64,
    variant: AlphaVariant,
) -> Result<AlphaCoefficients> {
    let b = field.local_bounds(p)?;
    alpha(b.c0, b.c1, b.c2, field.airspeed, length, variant)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CurvatureBound {
    pub sigma: f64,
    /// `17 c̄1 L²`, when `c̄0 ≤ v̄/√5`.
    pub simplified: Option<f64>,
}

/// Upper bound on `‖(ξ_C)_ττ‖` from global wind constants:
/// `σ̄ = c̄1 L²/(v̄ − c̄0) · (√2 v̄ + (v̄ + c̄0)/(v̄ − c̄0) · ((1 + √2) v̄ + c̄0))`.
pub fn curvature_bound(c0: f64, c1: f64, airspeed: f64, length: f64) -> Result<CurvatureBound> {
    if c0 >= airspeed {
        return Err(Error::WindExceedsAirspeed { wind: c0, airspeed });
    }
    let v = airspeed;
    let s2 = std::f64::consts::SQRT_2;
    let sigma = c1 * length * length / (v - c0)
        * (s2 * v + (v + c0) / (v - c0) * ((1.0 + s2) * v + c0));
    let simplified = (c0 <= v / 5f64.sqrt()).then_some(17.0 * c1 * length * length);
    Ok(CurvatureBound { sigma, simplified })
}

/// `(L_min, L_max)` for the length of a global minimizer.
pub fn path_length_bounds(origin: Vec2, destination: Vec2, c0: f64, airspeed: f64) -> Result<(f64, f64)> {
    if c0 >= airspeed {
        return Err(Error::WindExceedsAirspeed { wind: c0, airspeed });
    }
    let d = origin.distance(destination);
    Ok((d, (airspeed + c0) / (airspeed - c0) * d))
}

/// `h = σ̄ l² / L²`
pub fn coupling_h(sigma: f64, length: f64, l: f64) -> f64 {
    sigma * l * l / (length * length)
}

/// `l = L sqrt(h/σ̄)`
pub fn coupling_l(sigma: f64, length: f64, h: f64) -> f64 {
    length * (h / sigma).sqrt()
}

/// The rounding-error estimate
/// `4σ̄²l²/(3L²) · ((l/L)² α0 + 5 (l/L) α1 + 23 α2)`.
pub fn rounding_error_bound(sigma: f64, length: f64, l: f64, alpha: [f64; 3]) -> f64 {
    let x = l / length;
    4.0 * sigma * sigma * x * x / 3.0 * (x * x * alpha[0] + 5.0 * x * alpha[1] + 23.0 * alpha[2])
}

/// The a priori bound with its numeric constants as printed for
/// `c̄0 ≤ v̄/√5`:
/// `4σ̄²/(3L̃³v̄) · (14l²(7/2 c̄1² + v̄c̄2) + 51c̄1 l/v̄ + 52) · l²`.
pub fn a_priori_printed(sigma: f64, c1: f64, c2: f64, airspeed: f64, direct: f64, l: f64) -> f64 {
    let v = airspeed;
    4.0 * sigma * sigma / (3.0 * direct.powi(3) * v)
        * (14.0 * l * l * (3.5 * c1 * c1 + v * c2) + 51.0 * c1 * l / v + 52.0)
        * l
        * l
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct APosteriori {
    pub total: f64,
    /// `∫α0‖δξ‖²`, `∫α1‖δξ‖‖δξ_τ‖`, `∫α2‖δξ_τ‖²`
    pub terms: [f64; 3],
}

fn local_c(field: &WindField, p: Vec2) -> (f64, f64, f64) {
    (field.eval(p).norm(), field.jacobian(p).frobenius(), field.hessian(p).frobenius())
}

/// Visits the quadrature nodes along `ξ_C` restricted to `[τ0, τ1]` of one of
/// its linear pieces `a → b`.
fn piece_nodes(
    field: &WindField,
    quad: &QuadratureSpec,
    a: Vec2,
    b: Vec2,
    panels: &mut SegmentPanels,
    mut visit: impl FnMut(f64, f64, Vec2) -> Result<()>,
) -> Result<()> {
    field.segment_panels(a, b, panels);
    let d = b - a;
    for panel in &panels.panels {
        let h = panel.s1 - panel.s0;
        for (&s, &w) in quad.nodes().iter().zip(quad.weights()) {
            let t = panel.s0 + s * h;
            visit(t, w * h, a + d * t)?;
        }
    }
    Ok(())
}

/// `∫₀¹ α0‖δξ‖² + α1‖δξ‖‖δξ_τ‖ + α2‖δξ_τ‖² dτ` with `δξ = ξ − ξ_C` and the
/// full coefficients evaluated pointwise at `ξ_C`.
pub fn a_posteriori(
    xi_c: &ConstantSpeedPath,
    xi: &ParamPolyline,
    field: &WindField,
    quad: &QuadratureSpec,
) -> Result<APosteriori> {
    let pc = xi_c.parametrization();
    let len = xi_c.length();
    let dev = deviation_param(xi, &pc);
    let mut terms = [0.0; 3];
    let mut panels = SegmentPanels::default();
    for j in 0..dev.grid.len() - 1 {
        let (t0, t1) = (dev.grid[j], dev.grid[j + 1]);
        if t1 <= t0 {
            continue;
        }
        let (a, b) = (pc.point_at(t0), pc.point_at(t1));
        let (d0, d1) = (dev.delta[j], dev.delta[j + 1]);
        let dtau = dev.delta_tau[j].norm();
        piece_nodes(field, quad, a, b, &mut panels, |s, w, p| {
            let (c0, c1, c2) = local_c(field, p);
            let al = alpha(c0, c1, c2, field.airspeed, len, AlphaVariant::Full)?;
            let dn = d0.lerp(d1, s).norm();
            let wt = w * (t1 - t0);
            terms[0] += wt * al.alpha0 * dn * dn;
            terms[1] += wt * al.alpha1 * dn * dtau;
            terms[2] += wt * al.alpha2 * dtau * dtau;
            Ok(())
        })?;
    }
    Ok(APosteriori { total: terms.iter().sum(), terms })
}

/// Suprema of the full coefficients over the quadrature nodes along `ξ_C`.
pub fn alpha_sup_along(
    xi_c: &ConstantSpeedPath,
    field: &WindField,
    quad: &QuadratureSpec,
) -> Result<[f64; 3]> {
    let pts = xi_c.base().vertices();
    let len = xi_c.length();
    let mut sup = [0.0f64; 3];
    let mut panels = SegmentPanels::default();
    let mut visit = |p: Vec2| -> Result<()> {
        let (c0, c1, c2) = local_c(field, p);
        let al = alpha(c0, c1, c2, field.airspeed, len, AlphaVariant::Full)?.as_array();
        for k in 0..3 {
            sup[k] = sup[k].max(al[k]);
        }
        Ok(())
    };
    for w in pts.windows(2) {
        piece_nodes(field, quad, w[0], w[1], &mut panels, |_, _, p| visit(p))?;
    }
    Ok(sup)
}

/// Tube constants along `ξ_C` fed into [`curvature_bound`].
pub fn tube_curvature(xi_c: &ConstantSpeedPath, field: &WindField, radius: f64) -> Result<f64> {
    let b = field.tube_bounds(xi_c.base().vertices(), radius)?;
    Ok(curvature_bound(b.c0, b.c1, field.airspeed, xi_c.length())?.sigma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LocalBound {
    pub value: f64,
    pub sigma: f64,
    pub length: f64,
    pub alpha_sup: [f64; 3],
}

/// Local bound for connectivity length `l`, given a curvature value `σ̄`
/// for `ξ_C`.
pub fn local_bound(
    xi_c: &ConstantSpeedPath,
    field: &WindField,
    quad: &QuadratureSpec,
    sigma: f64,
    l: f64,
) -> Result<LocalBound> {
    let alpha_sup = alpha_sup_along(xi_c, field, quad)?;
    let length = xi_c.length();
    Ok(LocalBound { value: rounding_error_bound(sigma, length, l, alpha_sup), sigma, length, alpha_sup })
}

/// Everything the a priori bound needs, computed once per instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct APrioriSetup {
    pub direct: f64,
    pub max_length: f64,
    pub domain: Domain,
    pub constants: WindBounds,
    pub sigma: f64,
    /// Global coefficients: `α0` with `L_max`, `α1`, and `α2` with `L̃`.
    pub alpha: [f64; 3],
    pub simplified_valid: bool,
}

/// The search domain: bounding rectangle of the ellipse with foci at the
/// end points and major axis `L_max`, where `L_max` uses `sup ‖w‖`.
pub fn search_domain(origin: Vec2, destination: Vec2, field: &WindField) -> Result<(Domain, f64)> {
    let (_, lmax) = path_length_bounds(origin, destination, field.max_speed(), field.airspeed)?;
    let ellipse = Domain::ellipse(origin, destination, lmax)?;
    Ok((ellipse.bounding_rect(), lmax))
}

impl APrioriSetup {
    pub fn new(origin: Vec2, destination: Vec2, field: &WindField) -> Result<Self> {
        let (domain, _) = search_domain(origin, destination, field)?;
        let constants = field.global_bounds(&domain)?;
        let v = field.airspeed;
        let (direct, max_length) = path_length_bounds(origin, destination, constants.c0, v)?;
        if !(direct > 0.0) {
            return Err(Error::InvalidArgument("origin and destination coincide".into()));
        }
        let sigma = curvature_bound(constants.c0, constants.c1, v, max_length)?.sigma;
        let (c0, c1, c2) = (constants.c0, constants.c1, constants.c2);
        let a_hi = alpha(c0, c1, c2, v, max_length, AlphaVariant::Full)?;
        let a_lo = alpha(c0, c1, c2, v, direct, AlphaVariant::Full)?;
        Ok(Self {
            direct,
            max_length,
            domain,
            sigma,
            alpha: [a_hi.alpha0, a_hi.alpha1, a_lo.alpha2],
            simplified_valid: c0 <= v / 5f64.sqrt(),
            constants,
        })
    }

    pub fn bound(&self, l: f64) -> f64 {
        rounding_error_bound(self.sigma, self.direct, l, self.alpha)
    }

    /// The printed closed form with this setup's `σ̄` and constants.
    pub fn printed(&self, airspeed: f64, l: f64) -> f64 {
        a_priori_printed(self.sigma, self.constants.c1, self.constants.c2, airspeed, self.direct, l)
    }
}

/// A priori bound from end points and the field alone.
pub fn a_priori(origin: Vec2, destination: Vec2, field: &WindField, l: f64) -> Result<f64> {
    Ok(APrioriSetup::new(origin, destination, field)?.bound(l))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidityFlags {
    /// `c̄0 ≤ v̄/√5`, under which the printed constants apply.
    pub simplified_valid: bool,
    pub l_within_length: bool,
    /// `h ≤ σ̄ l²/L²` for the curvature used in the local bound.
    pub coupling_respected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    pub a_posteriori: APosteriori,
    pub local: LocalBound,
    pub a_priori: f64,
    pub a_priori_sigma: f64,
    pub measured_error: f64,
    pub flags: ValidityFlags,
}
