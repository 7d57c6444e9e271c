use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::spatial::PointGrid;
use super::Digraph;
use crate::domain::Domain;
use crate::geometry::Vec2;

/// First failed density condition, with a witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "camelCase")]
pub enum DensityViolation {
    /// A vertex outside `Ω`.
    Containment { vertex: usize, point: Vec2 },
    /// A point of `Ω` farther than `h` from every vertex.
    VertexDensity { witness: Vec2, nearest: usize, distance: f64 },
    /// Vertices at distance at most `l + 2h` without the arc `from → to`.
    LocalConnectivity { from: usize, to: usize, distance: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCertificate {
    pub ok: bool,
    pub violation: Option<DensityViolation>,
    pub samples: usize,
}

/// Checks the three density conditions. Vertex density is tested on
/// `sample_count` points drawn uniformly from `domain` (rejection sampling
/// from its bounding box, deterministic in `seed`).
pub fn verify_density<G: Digraph + ?Sized>(
    graph: &G,
    domain: &Domain,
    sample_count: usize,
    seed: u64,
) -> DensityCertificate {
    let fail = |v| DensityCertificate { ok: false, violation: Some(v), samples: sample_count };
    let n = graph.vertex_count();
    let tol = 1e-12;
    let slack_box = {
        let (lo, hi) = domain.bounding_box();
        let pad = tol * (1.0 + (hi.x - lo.x).abs().max((hi.y - lo.y).abs()));
        (lo - Vec2::new(pad, pad), hi + Vec2::new(pad, pad))
    };
    for i in 0..n {
        let p = graph.vertex(i);
        let inside = match domain {
            Domain::Rect { .. } => {
                p.x >= slack_box.0.x && p.x <= slack_box.1.x && p.y >= slack_box.0.y && p.y <= slack_box.1.y
            }
            Domain::Ellipse { focus_a, focus_b, major_axis } => {
                p.distance(*focus_a) + p.distance(*focus_b) <= major_axis * (1.0 + tol)
            }
        };
        if !inside {
            return fail(DensityViolation::Containment { vertex: i, point: p });
        }
    }

    let h = graph.h();
    let (lo, hi) = domain.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn = 0;
    let mut attempts = 0usize;
    while drawn < sample_count && attempts < 1000 * sample_count.max(1) {
        attempts += 1;
        let p = Vec2::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
        if !domain.contains(p) {
            continue;
        }
        drawn += 1;
        if n == 0 {
            return fail(DensityViolation::VertexDensity { witness: p, nearest: 0, distance: f64::INFINITY });
        }
        let k = graph.nearest_vertex(p);
        let d = graph.vertex(k).distance(p);
        if d > h * (1.0 + tol) {
            return fail(DensityViolation::VertexDensity { witness: p, nearest: k, distance: d });
        }
    }

    let r = graph.l() + 2.0 * h;
    let points: Vec<Vec2> = (0..n).map(|i| graph.vertex(i)).collect();
    let grid = PointGrid::new(&points, r);
    let mut near = Vec::new();
    for u in 0..n {
        grid.within(points[u], r, &mut near);
        near.sort_unstable();
        for &v in &near {
            if v != u && !graph.has_arc(u, v) {
                let distance = points[u].distance(points[v]);
                return fail(DensityViolation::LocalConnectivity { from: u, to: v, distance });
            }
        }
    }
    DensityCertificate { ok: true, violation: None, samples: sample_count }
}
