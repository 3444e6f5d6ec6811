//! Dense, deterministic sampling of patches.
//!
//! Surfaces sample on an `m x m` affine grid over the bounding box of the
//! domain, keeping exactly the nodes that lie in the domain (membership is
//! decided in rational arithmetic, so slanted boundaries keep their boundary
//! nodes). Curves take `m` uniform parameter values. Grid coordinates are
//! exact rationals, so a given `(spec, m)` pair always evaluates the exact
//! same points; with the `parallel` feature rows are computed concurrently
//! but collected in row order, keeping the output bitwise identical.

use crate::error::{Error, Result};
use crate::parallel;
use crate::patch::PatchSpec;
use crate::rat::Rat;

/// Grid-structured samples of one patch. `nodes` is row-major with `None`
/// for grid nodes outside the domain; curves have a single row.
#[derive(Clone, Debug)]
pub struct SampledGrid {
    pub rows: usize,
    pub cols: usize,
    pub nodes: Vec<Option<Vec<f64>>>,
    /// Max image distance between grid-adjacent samples: the discretization
    /// pitch that bounds the gap between the sampled set and the continuous
    /// image.
    pub pitch: f64,
}

impl SampledGrid {
    pub fn node(&self, row: usize, col: usize) -> Option<&Vec<f64>> {
        self.nodes[row * self.cols + col].as_ref()
    }

    pub fn points(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.nodes.iter().flatten()
    }
}

/// Flat point cloud with its provenance parameters.
#[derive(Clone, Debug)]
pub struct SampledSet {
    pub points: Vec<Vec<f64>>,
    pub resolution: usize,
    pub pitch: f64,
}

impl SampledSet {
    /// Concatenation; the pitch of a union is the max of the pitches.
    pub fn merge<I: IntoIterator<Item = SampledSet>>(parts: I) -> SampledSet {
        let mut points = Vec::new();
        let mut resolution = 0;
        let mut pitch = 0.0f64;
        for part in parts {
            points.extend(part.points);
            resolution = resolution.max(part.resolution);
            pitch = pitch.max(part.pitch);
        }
        SampledSet {
            points,
            resolution,
            pitch,
        }
    }
}

/// Sample a patch at resolution `m`, keeping the grid structure.
pub fn sample_patch_grid(spec: &PatchSpec, m: usize) -> Result<SampledGrid> {
    if m < 2 {
        return Err(Error::BadResolution { m });
    }
    match spec.chart_dim() {
        2 => grid_2d(spec, m),
        1 => grid_1d(spec, m),
        _ => {
            let p = spec.evaluate_chart(&[])?;
            Ok(SampledGrid {
                rows: 1,
                cols: m,
                nodes: vec![Some(p); m],
                pitch: 0.0,
            })
        }
    }
}

/// Sample a patch at resolution `m` as a flat point set.
pub fn sample_patch(spec: &PatchSpec, m: usize) -> Result<SampledSet> {
    let grid = sample_patch_grid(spec, m)?;
    Ok(flatten(&grid, m))
}

pub(crate) fn flatten(grid: &SampledGrid, m: usize) -> SampledSet {
    SampledSet {
        points: grid.points().cloned().collect(),
        resolution: m,
        pitch: grid.pitch,
    }
}

fn grid_2d(spec: &PatchSpec, m: usize) -> Result<SampledGrid> {
    let poly = spec.domain().expect("2d chart has a domain polytope");
    let mut lo = [i64::MAX; 2];
    let mut hi = [i64::MIN; 2];
    for k in 0..poly.vertices.len() {
        let v = poly.vertex_coords(k);
        for c in 0..2 {
            lo[c] = lo[c].min(v[c]);
            hi[c] = hi[c].max(v[c]);
        }
    }
    let step = (m - 1) as i64;
    let coord = |c: usize, i: usize| Rat::frac(lo[c] * step + i as i64 * (hi[c] - lo[c]), step);
    let rows: Vec<Result<Vec<Option<Vec<f64>>>>> = parallel::map_range(m, |j| {
        let y = coord(1, j);
        let mut row = Vec::with_capacity(m);
        for i in 0..m {
            let xc = [coord(0, i), y.clone()];
            match spec.evaluate_chart(&xc) {
                Ok(p) => row.push(Some(p)),
                Err(Error::OutsideDomain) => row.push(None),
                Err(e) => return Err(e),
            }
        }
        Ok(row)
    });
    let mut nodes = Vec::with_capacity(m * m);
    for row in rows {
        nodes.extend(row?);
    }
    let pitch = grid_pitch(&nodes, m, m);
    Ok(SampledGrid {
        rows: m,
        cols: m,
        nodes,
        pitch,
    })
}

fn grid_1d(spec: &PatchSpec, m: usize) -> Result<SampledGrid> {
    let poly = spec.domain().expect("1d chart has a domain polytope");
    let lo = poly.vertex_coords(0)[0];
    let hi = poly.vertex_coords(1)[0];
    let step = (m - 1) as i64;
    let nodes: Vec<Result<Option<Vec<f64>>>> = parallel::map_range(m, |i| {
        let s = Rat::frac(lo * step + i as i64 * (hi - lo), step);
        spec.evaluate_chart(&[s]).map(Some)
    });
    let nodes: Vec<Option<Vec<f64>>> = nodes.into_iter().collect::<Result<_>>()?;
    let pitch = grid_pitch(&nodes, 1, m);
    Ok(SampledGrid {
        rows: 1,
        cols: m,
        nodes,
        pitch,
    })
}

fn grid_pitch(nodes: &[Option<Vec<f64>>], rows: usize, cols: usize) -> f64 {
    let mut worst = 0.0f64;
    let mut consider = |a: &Option<Vec<f64>>, b: &Option<Vec<f64>>| {
        if let (Some(p), Some(q)) = (a, b) {
            worst = worst.max(dist2(p, q));
        }
    };
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                consider(&nodes[r * cols + c], &nodes[r * cols + c + 1]);
            }
            if r + 1 < rows {
                consider(&nodes[r * cols + c], &nodes[(r + 1) * cols + c]);
            }
        }
    }
    worst.sqrt()
}

pub(crate) fn dist2(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patch::{bezier_curve, tensor_patch, triangle_patch, PatchSpec};

    fn linear_segment() -> PatchSpec {
        PatchSpec::new(
            bezier_curve(1).unwrap(),
            vec![1.0, 1.0],
            vec![vec![0.0, 0.0], vec![2.0, 4.0]],
        )
        .unwrap()
    }

    #[test]
    fn linear_curve_samples_uniformly() {
        let set = sample_patch(&linear_segment(), 5).unwrap();
        assert_eq!(set.points.len(), 5);
        for (k, p) in set.points.iter().enumerate() {
            let t = k as f64 / 4.0;
            assert!((p[0] - 2.0 * t).abs() < 1e-15);
            assert!((p[1] - 4.0 * t).abs() < 1e-15);
        }
        let seg = (0.5f64.powi(2) + 1.0f64).sqrt();
        assert!((set.pitch - seg).abs() < 1e-12);
    }

    #[test]
    fn constant_patch_repeats_its_point() {
        let config = crate::lattice::LatticeConfig::new(2, vec![vec![1, 1]]).unwrap();
        let spec = PatchSpec::new(config, vec![3.0], vec![vec![7.0, 8.0]]).unwrap();
        let set = sample_patch(&spec, 4).unwrap();
        assert_eq!(set.points, vec![vec![7.0, 8.0]; 4]);
        assert_eq!(set.pitch, 0.0);
    }

    #[test]
    fn box_grid_is_full_and_triangle_grid_is_half() {
        let square = PatchSpec::new(
            tensor_patch(1, 1).unwrap(),
            vec![1.0; 4],
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
        )
        .unwrap();
        let set = sample_patch(&square, 5).unwrap();
        assert_eq!(set.points.len(), 25);

        let tri_cfg = triangle_patch(2).unwrap();
        let controls: Vec<Vec<f64>> = tri_cfg
            .points()
            .iter()
            .map(|p| vec![p[0] as f64, p[1] as f64, 0.0])
            .collect();
        let tri = PatchSpec::new(tri_cfg, vec![1.0; 6], controls).unwrap();
        let grid = sample_patch_grid(&tri, 5).unwrap();
        // Nodes with i + j <= 4 survive the clip: the triangular sub-grid.
        let kept = grid.nodes.iter().flatten().count();
        assert_eq!(kept, 15);
        for j in 0..5 {
            for i in 0..5 {
                assert_eq!(grid.node(j, i).is_some(), i + j <= 4);
            }
        }
    }

    #[test]
    fn resolution_below_two_is_rejected() {
        assert!(matches!(
            sample_patch(&linear_segment(), 1),
            Err(Error::BadResolution { m: 1 })
        ));
    }
}
