//! Cell-list neighbour lookup for hardcore thinning and pair counting.

use std::collections::HashMap;

use crate::geometry::CartesianPoint;
use crate::num::{as_f64, Real};

/// Uniform grid over `[-half_width, half_width]^d` with cells of side
/// `cell`; any two points closer than `cell` sit in the same or adjacent
/// cells.
pub(crate) struct NeighborGrid {
    cell: f64,
    half_width: f64,
    dims: usize,
    per_axis: u64,
    cells: HashMap<u64, Vec<usize>>,
}

impl NeighborGrid {
    pub fn build<T: Real>(points: &[CartesianPoint<T>], cell: f64, half_width: f64, dims: usize) -> Self {
        let per_axis = ((2.0 * half_width / cell).ceil() as u64).max(1);
        let mut grid = NeighborGrid {
            cell,
            half_width,
            dims,
            per_axis,
            cells: HashMap::new(),
        };
        for (i, p) in points.iter().enumerate() {
            let key = grid.key_of(p);
            grid.cells.entry(key).or_default().push(i);
        }
        grid
    }

    fn axis_index<T: Real>(&self, x: T) -> u64 {
        let idx = ((as_f64(x) + self.half_width) / self.cell).floor();
        (idx.max(0.0) as u64).min(self.per_axis - 1)
    }

    fn key_of<T: Real>(&self, p: &CartesianPoint<T>) -> u64 {
        let mut key = 0u64;
        for &c in &p.coords {
            key = key * self.per_axis + self.axis_index(c);
        }
        key
    }

    /// Visit the indices of all points in the 3^d cell neighbourhood of `p`
    /// (callers filter by exact distance and identity).
    pub fn for_each_candidate<T: Real>(&self, p: &CartesianPoint<T>, mut f: impl FnMut(usize)) {
        let idx: Vec<u64> = p.coords.iter().map(|&c| self.axis_index(c)).collect();
        let mut offsets = vec![-1i64; self.dims];
        loop {
            let mut key = 0u64;
            let mut valid = true;
            for axis in 0..self.dims {
                let v = idx[axis] as i64 + offsets[axis];
                if v < 0 || v >= self.per_axis as i64 {
                    valid = false;
                    break;
                }
                key = key * self.per_axis + v as u64;
            }
            if valid {
                if let Some(bucket) = self.cells.get(&key) {
                    for &j in bucket {
                        f(j);
                    }
                }
            }
            // advance the mixed-radix offset counter over {-1, 0, 1}^d
            let mut axis = 0;
            loop {
                if axis == self.dims {
                    return;
                }
                offsets[axis] += 1;
                if offsets[axis] <= 1 {
                    break;
                }
                offsets[axis] = -1;
                axis += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[[f64; 2]]) -> Vec<CartesianPoint<f64>> {
        raw.iter()
            .map(|c| CartesianPoint::new(c.to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn finds_all_close_pairs() {
        let points = pts(&[[0.0, 0.0], [0.25, 0.0], [0.9, 0.9], [-0.95, 0.1], [0.1, -0.2]]);
        let grid = NeighborGrid::build(&points, 0.3, 1.0, 2);
        for (i, p) in points.iter().enumerate() {
            let mut got: Vec<usize> = Vec::new();
            grid.for_each_candidate(p, |j| {
                if j != i && points[j].distance_to(p) <= 0.3 {
                    got.push(j);
                }
            });
            got.sort_unstable();
            let mut brute: Vec<usize> = (0..points.len())
                .filter(|&j| j != i && points[j].distance_to(p) <= 0.3)
                .collect();
            brute.sort_unstable();
            assert_eq!(got, brute, "mismatch at point {i}");
        }
    }
}
