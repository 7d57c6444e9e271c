use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Digraph, DiscretePath};
use crate::error::{Error, Result};
use crate::geometry::Vec2;

#[derive(Clone, Copy)]
struct Entry {
    f: f64,
    g: f64,
    v: usize,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap; smallest f, then smallest index first
    fn cmp(&self, o: &Self) -> Ordering {
        o.f.total_cmp(&self.f).then_with(|| o.v.cmp(&self.v))
    }
}

/// A* with the heuristic `‖p − x_D‖ / max_ground_speed`, which never
/// overestimates when `max_ground_speed ≥ v̄ + sup‖w‖`. A non-finite or
/// non-positive speed gives plain Dijkstra.
pub fn shortest_path<G: Digraph + ?Sized>(
    graph: &G,
    origin: usize,
    destination: usize,
    max_ground_speed: f64,
) -> Result<DiscretePath> {
    let target = graph.vertex(destination);
    if max_ground_speed > 0.0 && max_ground_speed.is_finite() {
        shortest_path_with_heuristic(graph, origin, destination, |p| {
            p.distance(target) / max_ground_speed
        })
    } else {
        shortest_path_with_heuristic(graph, origin, destination, |_| 0.0)
    }
}

/// A* with an arbitrary admissible heuristic. Stale heap entries are skipped
/// and settled vertices are reopened if a cheaper route turns up, so an
/// inconsistent heuristic still gives optimal costs.
pub fn shortest_path_with_heuristic<G: Digraph + ?Sized>(
    graph: &G,
    origin: usize,
    destination: usize,
    heuristic: impl Fn(Vec2) -> f64,
) -> Result<DiscretePath> {
    let n = graph.vertex_count();
    if origin >= n || destination >= n {
        return Err(Error::InvalidArgument("origin or destination out of range".into()));
    }
    let mut g = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    g[origin] = 0.0;
    heap.push(Entry { f: heuristic(graph.vertex(origin)), g: 0.0, v: origin });
    let mut found = false;
    let mut arcs: Vec<(usize, f64)> = Vec::new();
    while let Some(Entry { g: gu, v: u, .. }) = heap.pop() {
        if gu > g[u] {
            continue;
        }
        if u == destination {
            found = true;
            break;
        }
        arcs.clear();
        graph.visit_arcs(u, &mut |v, w| arcs.push((v, w)))?;
        for &(v, w) in &arcs {
            let cand = gu + w;
            if cand < g[v] {
                g[v] = cand;
                pred[v] = u;
                heap.push(Entry { f: cand + heuristic(graph.vertex(v)), g: cand, v });
            }
        }
    }
    if !found {
        return Err(Error::Unreachable { origin, destination });
    }
    let mut vertices = vec![destination];
    let mut cur = destination;
    while cur != origin {
        cur = pred[cur];
        vertices.push(cur);
    }
    vertices.reverse();
    Ok(DiscretePath { vertices, cost: g[destination] })
}
