//! `(h,l)`-dense digraphs, shortest paths and the rounding map.
//!
//! A digraph is `(h,l)`-dense in a convex set `Ω` if all vertices lie in `Ω`,
//! every point of `Ω` is within `h` of a vertex and every ordered pair of
//! vertices at distance at most `l + 2h` is an arc. Arc weights are the
//! straight-segment travel times.
//!
//! Two representations are provided: [`LatticeDigraph`] stores only the
//! Cartesian lattice description and evaluates arc weights on demand, while
//! [`DenseDigraph`] holds an explicit adjacency list with stored weights.

mod dense;
mod lattice;
mod rounding;
mod search;
mod spatial;
mod verify;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::Result;
use crate::geometry::Vec2;
use crate::trajectory::Path;

pub use dense::DenseDigraph;
pub use lattice::{build_lattice, LatticeDigraph, LatticeOptions, DEFAULT_VERTEX_CAP};
pub use rounding::{
    pathological_instance, round_path, round_path_with, PathologicalInstance, RoundedPath,
};
pub use search::{shortest_path, shortest_path_with_heuristic};
pub use spatial::PointGrid;
pub use verify::{verify_density, DensityCertificate, DensityViolation};

/// Relative slack on the arc radius `l + 2h` when deciding adjacency, so that
/// pairs exactly at the radius are never lost to rounding.
pub const RADIUS_SLACK: f64 = 1e-12;

/// Read access shared by both graph representations.
pub trait Digraph: Sync {
    fn vertex_count(&self) -> usize;
    fn vertex(&self, i: usize) -> Vec2;
    /// Density radius `h`.
    fn h(&self) -> f64;
    /// Connectivity length `l`.
    fn l(&self) -> f64;
    fn domain(&self) -> &Domain;
    /// Calls `visit(target, weight)` for every arc leaving `u`, targets in
    /// increasing order.
    fn visit_arcs(&self, u: usize, visit: &mut dyn FnMut(usize, f64)) -> Result<()>;
    /// Targets of the arcs leaving `u`, increasing.
    fn neighbors(&self, u: usize) -> Vec<usize>;
    fn has_arc(&self, u: usize, v: usize) -> bool;
    fn arc_weight(&self, u: usize, v: usize) -> Result<Option<f64>>;
    /// Nearest vertex; ties go to the smallest index.
    fn nearest_vertex(&self, p: Vec2) -> usize;
    /// Index of the vertex at `p`, if any lies within `1e-12` of it.
    fn find_vertex(&self, p: Vec2) -> Option<usize> {
        let i = self.nearest_vertex(p);
        (self.vertex(i).distance(p) <= 1e-12).then_some(i)
    }
    /// Number of arcs.
    fn arc_count(&self) -> usize {
        (0..self.vertex_count()).map(|u| self.neighbors(u).len()).sum()
    }
}

/// A vertex sequence of a digraph with its total weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePath {
    pub vertices: Vec<usize>,
    pub cost: f64,
}

impl DiscretePath {
    pub fn origin(&self) -> usize {
        self.vertices[0]
    }

    pub fn destination(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    /// Vertex positions in order.
    pub fn points<G: Digraph + ?Sized>(&self, graph: &G) -> Vec<Vec2> {
        self.vertices.iter().map(|&i| graph.vertex(i)).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["step", "vertex"])?;
        for (k, v) in self.vertices.iter().enumerate() {
            wtr.write_record([k.to_string(), v.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Piecewise-linear interpolation of a discrete path.
pub fn interpolate<G: Digraph + ?Sized>(dp: &DiscretePath, graph: &G) -> Result<Path> {
    Path::new(dp.points(graph))
}

/// Writes `index,x,y` rows.
pub fn write_vertices_csv<G: Digraph + ?Sized, W: Write>(graph: &G, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["index", "x", "y"])?;
    for i in 0..graph.vertex_count() {
        let p = graph.vertex(i);
        wtr.write_record([i.to_string(), p.x.to_string(), p.y.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes `src,dst,weight` rows, evaluating lazy weights as needed.
pub fn write_arcs_csv<G: Digraph + ?Sized, W: Write>(graph: &G, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["src", "dst", "weight"])?;
    for u in 0..graph.vertex_count() {
        let mut rows = Vec::new();
        graph.visit_arcs(u, &mut |v, wgt| rows.push((v, wgt)))?;
        for (v, wgt) in rows {
            wtr.write_record([u.to_string(), v.to_string(), wgt.to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}
