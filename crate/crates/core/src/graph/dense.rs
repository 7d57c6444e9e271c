use rayon::prelude::*;

use super::spatial::PointGrid;
use super::{Digraph, RADIUS_SLACK};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::quadrature::QuadratureSpec;
use crate::trajectory::segment_time;
use crate::wind::WindField;

/// Digraph with explicit adjacency (sorted targets) and stored weights.
#[derive(Debug, Clone)]
pub struct DenseDigraph {
    vertices: Vec<Vec2>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    h: f64,
    l: f64,
    domain: Domain,
    index: PointGrid,
}

impl DenseDigraph {
    /// Builds from an explicit arc list. Duplicate arcs keep the first weight.
    pub fn from_arcs(
        vertices: Vec<Vec2>,
        arcs: &[(usize, usize, f64)],
        h: f64,
        l: f64,
        domain: Domain,
    ) -> Result<Self> {
        let n = vertices.len();
        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in arcs {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidArgument(format!("bad arc ({u}, {v})")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!("arc ({u}, {v}) has weight {w}")));
            }
            adj[u].push((v as u32, w));
        }
        Ok(Self::from_adjacency(vertices, adj, h, l, domain))
    }

    fn from_adjacency(
        vertices: Vec<Vec2>,
        mut adj: Vec<Vec<(u32, f64)>>,
        h: f64,
        l: f64,
        domain: Domain,
    ) -> Self {
        let mut offsets = Vec::with_capacity(vertices.len() + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for list in adj.iter_mut() {
            list.sort_by_key(|a| a.0);
            list.dedup_by_key(|a| a.0);
            for &(v, w) in list.iter() {
                targets.push(v);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        let cell = if l + 2.0 * h > 0.0 { l + 2.0 * h } else { f64::INFINITY };
        let index = PointGrid::new(&vertices, cell);
        Self { vertices, offsets, targets, weights, h, l, domain, index }
    }

    /// Connects every ordered pair within `l + 2h` with its travel time.
    pub fn from_vertices(
        vertices: Vec<Vec2>,
        h: f64,
        l: f64,
        domain: Domain,
        field: &WindField,
        quad: &QuadratureSpec,
    ) -> Result<Self> {
        let r = (l + 2.0 * h) * (1.0 + RADIUS_SLACK);
        let grid = PointGrid::new(&vertices, r);
        let adj: Result<Vec<Vec<(u32, f64)>>> = (0..vertices.len())
            .into_par_iter()
            .map(|u| {
                let mut near = Vec::new();
                grid.within(vertices[u], r, &mut near);
                near.sort_unstable();
                let mut list = Vec::with_capacity(near.len());
                for v in near {
                    if v != u {
                        let w = segment_time(field, vertices[u], vertices[v], quad)?;
                        list.push((v as u32, w));
                    }
                }
                Ok(list)
            })
            .collect();
        Ok(Self::from_adjacency(vertices, adj?, h, l, domain))
    }

    /// Materializes any digraph, evaluating all weights.
    pub fn from_graph<G: Digraph + ?Sized>(graph: &G) -> Result<Self> {
        let n = graph.vertex_count();
        let vertices: Vec<Vec2> = (0..n).map(|i| graph.vertex(i)).collect();
        let adj: Result<Vec<Vec<(u32, f64)>>> = (0..n)
            .into_par_iter()
            .map(|u| {
                let mut list = Vec::new();
                graph.visit_arcs(u, &mut |v, w| list.push((v as u32, w)))?;
                Ok(list)
            })
            .collect();
        Ok(Self::from_adjacency(vertices, adj?, graph.h(), graph.l(), graph.domain().clone()))
    }

    /// Copy with vertex `i` and its arcs removed; higher indices shift down.
    pub fn without_vertex(&self, i: usize) -> Self {
        let vertices: Vec<Vec2> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, p)| *p)
            .collect();
        let remap = |k: usize| if k > i { k - 1 } else { k };
        let mut adj = Vec::with_capacity(vertices.len());
        for u in 0..self.vertices.len() {
            if u == i {
                continue;
            }
            let list = self
                .arcs(u)
                .filter(|&(v, _)| v != i)
                .map(|(v, w)| (remap(v) as u32, w))
                .collect();
            adj.push(list);
        }
        Self::from_adjacency(vertices, adj, self.h, self.l, self.domain.clone())
    }

    /// Copy with the arc `u → v` removed.
    pub fn without_arc(&self, u: usize, v: usize) -> Self {
        let adj = (0..self.vertices.len())
            .map(|a| {
                self.arcs(a)
                    .filter(|&(b, _)| !(a == u && b == v))
                    .map(|(b, w)| (b as u32, w))
                    .collect()
            })
            .collect();
        Self::from_adjacency(self.vertices.clone(), adj, self.h, self.l, self.domain.clone())
    }

    /// Arcs leaving `u` as `(target, weight)`.
    pub fn arcs(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[u]..self.offsets[u + 1];
        self.targets[r.clone()].iter().zip(&self.weights[r]).map(|(&v, &w)| (v as usize, w))
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }
}

impl Digraph for DenseDigraph {
    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i]
    }

    fn h(&self) -> f64 {
        self.h
    }

    fn l(&self) -> f64 {
        self.l
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn visit_arcs(&self, u: usize, visit: &mut dyn FnMut(usize, f64)) -> Result<()> {
        for (v, w) in self.arcs(u) {
            visit(v, w);
        }
        Ok(())
    }

    fn neighbors(&self, u: usize) -> Vec<usize> {
        self.arcs(u).map(|a| a.0).collect()
    }

    fn has_arc(&self, u: usize, v: usize) -> bool {
        let r = self.offsets[u]..self.offsets[u + 1];
        self.targets[r].binary_search(&(v as u32)).is_ok()
    }

    fn arc_weight(&self, u: usize, v: usize) -> Result<Option<f64>> {
        let r = self.offsets[u]..self.offsets[u + 1];
        Ok(self.targets[r.clone()]
            .binary_search(&(v as u32))
            .ok()
            .map(|k| self.weights[r.start + k]))
    }

    fn nearest_vertex(&self, p: Vec2) -> usize {
        self.index.nearest(p).unwrap_or(0)
    }

    fn arc_count(&self) -> usize {
        self.targets.len()
    }
}
