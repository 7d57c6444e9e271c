//! Planar search domains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// A compact region of the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "camelCase")]
pub enum Domain {
    #[serde(rename_all = "camelCase")]
    Rect { min: Vec2, max: Vec2 },
    /// Points whose focal distances sum to at most `major_axis`.
    #[serde(rename_all = "camelCase")]
    Ellipse { focus_a: Vec2, focus_b: Vec2, major_axis: f64 },
}

impl Domain {
    pub fn rect(min: Vec2, max: Vec2) -> Result<Self> {
        if !(min.x <= max.x && min.y <= max.y) {
            return Err(Error::InvalidArgument("rectangle corners out of order".into()));
        }
        Ok(Domain::Rect { min, max })
    }

    pub fn ellipse(focus_a: Vec2, focus_b: Vec2, major_axis: f64) -> Result<Self> {
        if !(major_axis >= focus_a.distance(focus_b)) {
            return Err(Error::InvalidArgument(
                "major axis shorter than the focal distance".into(),
            ));
        }
        Ok(Domain::Ellipse { focus_a, focus_b, major_axis })
    }

    pub fn contains(&self, p: Vec2) -> bool {
        match self {
            Domain::Rect { min, max } => {
                p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y
            }
            Domain::Ellipse { focus_a, focus_b, major_axis } => {
                p.distance(*focus_a) + p.distance(*focus_b) <= *major_axis
            }
        }
    }

    /// Axis-aligned bounding box `(min, max)`. Exact for ellipses in any
    /// orientation.
    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        match self {
            Domain::Rect { min, max } => (*min, *max),
            Domain::Ellipse { focus_a, focus_b, major_axis } => {
                let c = (*focus_a + *focus_b) * 0.5;
                let a = 0.5 * major_axis;
                let f = 0.5 * focus_a.distance(*focus_b);
                let b = (a * a - f * f).max(0.0).sqrt();
                let (cos, sin) = if f > 0.0 {
                    let u = (*focus_b - *focus_a) / (2.0 * f);
                    (u.x, u.y)
                } else {
                    (1.0, 0.0)
                };
                let hx = ((a * cos).powi(2) + (b * sin).powi(2)).sqrt();
                let hy = ((a * sin).powi(2) + (b * cos).powi(2)).sqrt();
                (Vec2::new(c.x - hx, c.y - hy), Vec2::new(c.x + hx, c.y + hy))
            }
        }
    }

    /// The bounding rectangle as a domain of its own.
    pub fn bounding_rect(&self) -> Domain {
        let (min, max) = self.bounding_box();
        Domain::Rect { min, max }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ellipse_box_axis_aligned() {
        let d = Domain::ellipse(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), 2.0).unwrap();
        let (lo, hi) = d.bounding_box();
        let b = (1.0f64 - 0.25).sqrt();
        assert!((lo.x + 0.5).abs() < 1e-15 && (hi.x - 1.5).abs() < 1e-15);
        assert!((lo.y + b).abs() < 1e-15 && (hi.y - b).abs() < 1e-15);
        assert!(d.contains(Vec2::new(0.5, 0.0)));
        assert!(!d.contains(Vec2::new(1.49, 0.8)));
    }

    #[test]
    fn rotated_ellipse_box_contains_boundary() {
        let d = Domain::ellipse(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), 3.0).unwrap();
        let (lo, hi) = d.bounding_box();
        // walk the boundary in polar form around the first focus
        let (fa, fb) = (Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0));
        let mut touched = [false; 4];
        for k in 0..20000 {
            let t = k as f64 * std::f64::consts::TAU / 20000.0;
            let u = Vec2::new(t.cos(), t.sin());
            // |p - fb| = 3 - r with p = r u  =>  r = (9 - |fb|²) / (2 (3 - u·fb))
            let r = (9.0 - fb.norm_sq()) / (2.0 * (3.0 - u.dot(fb)));
            let p = fa + u * r;
            assert!(p.x >= lo.x - 1e-12 && p.x <= hi.x + 1e-12);
            assert!(p.y >= lo.y - 1e-12 && p.y <= hi.y + 1e-12);
            touched[0] |= (p.x - lo.x).abs() < 1e-6;
            touched[1] |= (p.x - hi.x).abs() < 1e-6;
            touched[2] |= (p.y - lo.y).abs() < 1e-6;
            touched[3] |= (p.y - hi.y).abs() < 1e-6;
        }
        assert!(touched.iter().all(|&t| t));
    }
}
