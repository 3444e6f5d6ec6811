//! Discrete Hausdorff distance between point clouds.
//!
//! Two interchangeable engines: a brute-force scan and a uniform-grid
//! spatial index with expanding ring search. Both compute, for every query
//! point, the exact minimum of the same squared-distance values, so they
//! return bitwise-identical results; the dispatcher picks the index only
//! when the pair-count makes it worthwhile. Distances between the sampled
//! sets and the continuous images they discretize differ by at most the
//! sampling pitch recorded on the sets.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::parallel;
use crate::sample::{dist2, SampledSet};

const INDEX_PAIR_THRESHOLD: usize = 250_000;

/// Hausdorff distance between two sampled sets.
pub fn hausdorff_distance(x: &SampledSet, y: &SampledSet) -> Result<f64> {
    let (xs, ys) = (&x.points, &y.points);
    let pairs = xs.len().saturating_mul(ys.len());
    let dim = xs.first().map(|p| p.len()).unwrap_or(0);
    if pairs >= INDEX_PAIR_THRESHOLD && dim <= 3 {
        hausdorff_indexed(xs, ys)
    } else {
        hausdorff_brute(xs, ys)
    }
}

/// Exhaustive all-pairs engine.
pub fn hausdorff_brute(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<f64> {
    check_nonempty(x, y)?;
    let xy = directed2_brute(x, y);
    let yx = directed2_brute(y, x);
    Ok(xy.max(yx).sqrt())
}

/// Grid-indexed engine; image dimension at most 3.
pub fn hausdorff_indexed(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<f64> {
    check_nonempty(x, y)?;
    let xy = directed2_indexed(x, y);
    let yx = directed2_indexed(y, x);
    Ok(xy.max(yx).sqrt())
}

fn check_nonempty(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(())
}

fn directed2_brute(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    let mins = parallel::map_slice(from, |p| {
        to.iter().map(|q| dist2(p, q)).fold(f64::INFINITY, f64::min)
    });
    parallel::fold_max(&mins)
}

fn directed2_indexed(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    let index = match GridIndex::build(to) {
        Some(ix) => ix,
        // Degenerate extent (all target points equal): brute is O(|from|).
        None => return directed2_brute(from, to),
    };
    let mins = parallel::map_slice(from, |p| index.nearest2(p, to));
    parallel::fold_max(&mins)
}

/// Uniform grid over the padded-to-3d bounding box of the indexed set.
struct GridIndex {
    cell: f64,
    lo: [f64; 3],
    dims: [i64; 3],
    buckets: HashMap<[i64; 3], Vec<usize>>,
}

fn pad3(p: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    out[..p.len()].copy_from_slice(p);
    out
}

impl GridIndex {
    fn build(points: &[Vec<f64>]) -> Option<GridIndex> {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in points {
            let p = pad3(p);
            for c in 0..3 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        let extent = (0..3).map(|c| hi[c] - lo[c]).fold(0.0, f64::max);
        if !(extent > 0.0) {
            return None;
        }
        // Aim for order-one points per occupied cell.
        let target = (points.len() as f64).cbrt().ceil().max(1.0);
        let cell = extent / target;
        let mut index = GridIndex {
            cell,
            lo,
            dims: [0; 3],
            buckets: HashMap::new(),
        };
        for c in 0..3 {
            index.dims[c] = ((hi[c] - lo[c]) / cell).floor() as i64 + 1;
        }
        for (k, p) in points.iter().enumerate() {
            index.buckets.entry(index.cell_of(&pad3(p))).or_default().push(k);
        }
        Some(index)
    }

    fn cell_of(&self, p: &[f64; 3]) -> [i64; 3] {
        let mut c = [0i64; 3];
        for k in 0..3 {
            c[k] = (((p[k] - self.lo[k]) / self.cell).floor() as i64).clamp(0, self.dims[k] - 1);
        }
        c
    }

    fn nearest2(&self, query: &[f64], points: &[Vec<f64>]) -> f64 {
        let q = pad3(query);
        let mut home = [0i64; 3];
        for k in 0..3 {
            home[k] = ((q[k] - self.lo[k]) / self.cell).floor() as i64;
        }
        let max_ring = (0..3)
            .map(|k| home[k].max(self.dims[k] - 1 - home[k]).max(-home[k]))
            .max()
            .unwrap()
            + 1;
        let mut best = f64::INFINITY;
        for ring in 0..=max_ring {
            // Cells at Chebyshev ring `k` hold points at distance at least
            // `(k-1) * cell`; the shave factor keeps the bound safe under
            // floating-point rounding (it can only cost an extra ring).
            let lower = self.cell * (ring - 1).max(0) as f64 * 0.999;
            if lower * lower > best {
                break;
            }
            self.scan_ring(&home, ring, points, &q, &mut best);
        }
        best
    }

    fn scan_ring(&self, home: &[i64; 3], ring: i64, points: &[Vec<f64>], q: &[f64; 3], best: &mut f64) {
        let lo: Vec<i64> = (0..3).map(|k| (home[k] - ring).max(0)).collect();
        let hi: Vec<i64> = (0..3).map(|k| (home[k] + ring).min(self.dims[k] - 1)).collect();
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    let cheb = (x - home[0])
                        .abs()
                        .max((y - home[1]).abs())
                        .max((z - home[2]).abs());
                    if cheb != ring {
                        continue;
                    }
                    if let Some(bucket) = self.buckets.get(&[x, y, z]) {
                        for &idx in bucket {
                            let d = dist2(&pad3(&points[idx]), q);
                            if d < *best {
                                *best = d;
                            }
                        }
                    }
                }
            }
        }
    }
}
