//! Uniform bucket grid for nearest-point and radius queries.

use crate::geometry::Vec2;

#[derive(Debug, Clone)]
pub struct PointGrid {
    points: Vec<Vec2>,
    min: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    start: Vec<u32>,
    items: Vec<u32>,
}

impl PointGrid {
    /// Buckets of side about `cell`, coarsened if the grid would have far
    /// more cells than points.
    pub fn new(points: &[Vec2], cell: f64) -> Self {
        let (mut min, mut max) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in points {
            min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
            max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
        }
        if points.is_empty() {
            min = Vec2::ZERO;
            max = Vec2::ZERO;
        }
        let ext = (max.x - min.x).max(max.y - min.y).max(1e-300);
        let budget = 4 * points.len() + 16;
        let mut cell = if cell > 0.0 && cell.is_finite() { cell } else { ext };
        loop {
            let nx = ((max.x - min.x) / cell).floor() as usize + 1;
            let ny = ((max.y - min.y) / cell).floor() as usize + 1;
            if nx.saturating_mul(ny) <= budget {
                break;
            }
            cell *= 2.0;
        }
        let nx = ((max.x - min.x) / cell).floor() as usize + 1;
        let ny = ((max.y - min.y) / cell).floor() as usize + 1;
        let mut counts = vec![0u32; nx * ny + 1];
        let cell_of = |p: &Vec2| {
            let ix = (((p.x - min.x) / cell).floor() as usize).min(nx - 1);
            let iy = (((p.y - min.y) / cell).floor() as usize).min(ny - 1);
            iy * nx + ix
        };
        for p in points {
            counts[cell_of(p) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let start = counts.clone();
        let mut fill = counts;
        let mut items = vec![0u32; points.len()];
        // indices are inserted in increasing order within each bucket
        for (i, p) in points.iter().enumerate() {
            let c = cell_of(p);
            items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        Self { points: points.to_vec(), min, cell, nx, ny, start, items }
    }

    fn clamp_cell(&self, p: Vec2) -> (i64, i64) {
        let ix = ((p.x - self.min.x) / self.cell).floor().clamp(0.0, (self.nx - 1) as f64) as i64;
        let iy = ((p.y - self.min.y) / self.cell).floor().clamp(0.0, (self.ny - 1) as f64) as i64;
        (ix, iy)
    }

    fn bucket(&self, ix: i64, iy: i64) -> &[u32] {
        let c = iy as usize * self.nx + ix as usize;
        &self.items[self.start[c] as usize..self.start[c + 1] as usize]
    }

    /// Nearest point index; ties go to the smallest index. `None` if empty.
    pub fn nearest(&self, p: Vec2) -> Option<usize> {
        if self.points.is_empty() {
            return None;
        }
        let (cx, cy) = self.clamp_cell(p);
        let mut best: Option<(f64, usize)> = None;
        let kmax = self.nx.max(self.ny) as i64;
        for k in 0..=kmax {
            if let Some((d2, _)) = best {
                // cells at ring k are at least (k-1)·cell away
                let lb = (k - 1).max(0) as f64 * self.cell;
                if lb * lb > d2 {
                    break;
                }
            }
            for iy in (cy - k).max(0)..=(cy + k).min(self.ny as i64 - 1) {
                for ix in (cx - k).max(0)..=(cx + k).min(self.nx as i64 - 1) {
                    if (ix - cx).abs() != k && (iy - cy).abs() != k {
                        continue;
                    }
                    for &i in self.bucket(ix, iy) {
                        let d2 = (self.points[i as usize] - p).norm_sq();
                        let cand = (d2, i as usize);
                        if best.is_none_or(|b| cand.0 < b.0 || (cand.0 == b.0 && cand.1 < b.1)) {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
        best.map(|b| b.1)
    }

    /// Indices of all points within `r` of `p` (unordered).
    pub fn within(&self, p: Vec2, r: f64, out: &mut Vec<usize>) {
        out.clear();
        if self.points.is_empty() {
            return;
        }
        let (x0, y0) = self.clamp_cell(p - Vec2::new(r, r));
        let (x1, y1) = self.clamp_cell(p + Vec2::new(r, r));
        let r2 = r * r;
        for iy in y0..=y1 {
            for ix in x0..=x1 {
                for &i in self.bucket(ix, iy) {
                    if (self.points[i as usize] - p).norm_sq() <= r2 {
                        out.push(i as usize);
                    }
                }
            }
        }
    }
}
