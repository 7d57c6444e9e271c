use serde::{Deserialize, Serialize};

use super::{DenseDigraph, Digraph, DiscretePath};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::quadrature::QuadratureSpec;
use crate::trajectory::{ConstantSpeedPath, ParamPolyline, Path};
use crate::wind::WindField;

/// Result of snapping an equidistant sampling of a path to the graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundedPath {
    /// `n`, the number of grid intervals.
    pub steps: usize,
    /// Snapped vertex for each `τ_i = i/n`, before collapsing repeats.
    pub snapped: Vec<usize>,
    /// The same sequence with consecutive repeats collapsed.
    pub path: DiscretePath,
}

impl RoundedPath {
    /// `ξ_R`: the snapped points interpolated linearly in `τ` with knots `i/n`.
    pub fn parametrization<G: Digraph + ?Sized>(&self, graph: &G) -> ParamPolyline {
        let n = self.steps as f64;
        ParamPolyline {
            knots: (0..=self.steps).map(|i| i as f64 / n).collect(),
            points: self.snapped.iter().map(|&v| graph.vertex(v)).collect(),
        }
    }

    /// Geometric length of the rounded polyline.
    pub fn length<G: Digraph + ?Sized>(&self, graph: &G) -> f64 {
        self.path.vertices.windows(2).map(|w| graph.vertex(w[0]).distance(graph.vertex(w[1]))).sum()
    }
}

/// Samples `ξ` at `τ_i = i/n` with `n = ⌈L/l⌉` and snaps each sample to its
/// nearest vertex. Fails with `SnapGap` if two consecutive snapped vertices
/// are not joined by an arc.
pub fn round_path<G: Digraph + ?Sized>(xi: &ConstantSpeedPath, graph: &G) -> Result<RoundedPath> {
    round_path_with(xi, graph, |_, p| graph.nearest_vertex(p))
}

/// Like [`round_path`] with a custom snapping rule `snap(i, ξ(τ_i))`.
pub fn round_path_with<G: Digraph + ?Sized>(
    xi: &ConstantSpeedPath,
    graph: &G,
    mut snap: impl FnMut(usize, Vec2) -> usize,
) -> Result<RoundedPath> {
    let l = graph.l();
    if !(l > 0.0) {
        return Err(Error::InvalidArgument("rounding needs l > 0".into()));
    }
    let len = xi.length();
    let steps = ((len / l) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let param = xi.parametrization();
    let snapped: Vec<usize> =
        (0..=steps).map(|i| snap(i, param.point_at(i as f64 / steps as f64))).collect();
    let mut vertices = vec![snapped[0]];
    let mut cost = 0.0;
    for &v in &snapped[1..] {
        let u = *vertices.last().unwrap();
        if v == u {
            continue;
        }
        match graph.arc_weight(u, v)? {
            Some(w) => cost += w,
            None => {
                return Err(Error::SnapGap { from: graph.vertex(u), to: graph.vertex(v) });
            }
        }
        vertices.push(v);
    }
    Ok(RoundedPath { steps, snapped, path: DiscretePath { vertices, cost } })
}

/// The zigzag construction showing that nearest-vertex rounding alone does
/// not control path length: vertices on the lines `y = ±1` staggered by `l`,
/// plus the two end points, for the straight path from `(0,0)` to `(1,0)`.
///
/// The end points are the last two vertices. They are closer to every
/// interior sample than the staggered vertices, so [`PathologicalInstance::round`]
/// reserves them for `τ = 0` and `τ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathologicalInstance {
    pub l: f64,
    pub h: f64,
    pub xi: Path,
    pub vertices: Vec<Vec2>,
    pub domain: Domain,
}

pub fn pathological_instance(l: f64) -> Result<PathologicalInstance> {
    if !(l > 0.0 && l <= 1.0) {
        return Err(Error::InvalidArgument("need 0 < l <= 1".into()));
    }
    let h = (1.0 + l * l / 4.0).sqrt();
    let mut vertices = Vec::new();
    for j in 0..2 {
        let mut i = 0usize;
        loop {
            let x = l * (2 * i + j) as f64;
            if x > 1.0 + 1e-12 {
                break;
            }
            vertices.push(Vec2::new(x, 2.0 * j as f64 - 1.0));
            i += 1;
        }
    }
    vertices.push(Vec2::new(0.0, 0.0));
    vertices.push(Vec2::new(1.0, 0.0));
    Ok(PathologicalInstance {
        l,
        h,
        xi: Path::straight(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0))?,
        vertices,
        domain: Domain::rect(Vec2::new(0.0, -1.0), Vec2::new(1.0, 1.0))?,
    })
}

impl PathologicalInstance {
    pub fn graph(&self, field: &WindField, quad: &QuadratureSpec) -> Result<DenseDigraph> {
        DenseDigraph::from_vertices(self.vertices.clone(), self.h, self.l, self.domain.clone(), field, quad)
    }

    /// Rounds `ξ` with the end points pinned and every interior sample
    /// snapped to the nearest staggered vertex (ties to the smallest index).
    pub fn round<G: Digraph + ?Sized>(&self, graph: &G) -> Result<RoundedPath> {
        let xi = crate::trajectory::resample_constant_speed(&self.xi, 2)?;
        let stagger = self.vertices.len() - 2;
        let steps = ((1.0 / self.l) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        round_path_with(&xi, graph, |i, p| {
            if i == 0 {
                stagger
            } else if i == steps {
                stagger + 1
            } else {
                let mut best = 0;
                for k in 1..stagger {
                    if graph.vertex(k).distance(p) < graph.vertex(best).distance(p) {
                        best = k;
                    }
                }
                best
            }
        })
    }
}
