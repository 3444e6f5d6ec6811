//! Wavefront OBJ export of sampled geometry.
//!
//! Surface grids become quad meshes: every grid cell whose four corners all
//! lie inside the domain turns into one `f` record, wound counterclockwise
//! in the parameter grid. Curve pieces become `l` polylines; point pieces
//! collapse to a single `p` record. A control surface puts each facet piece
//! in its own `g` group so viewers can color the pieces independently.
//! Vertices appear in sampling order and indices are global and 1-based, so
//! the output for a given input is byte-for-byte reproducible.

use std::fmt::Write as _;
use std::path::Path;

use crate::degeneration::ControlSurface;
use crate::error::{Error, Result};
use crate::io::write_text;
use crate::patch::PatchSpec;
use crate::sample::{sample_patch_grid, SampledGrid};

/// Mesh a single patch at resolution `m` into one OBJ group named `patch`.
pub fn patch_obj(spec: &PatchSpec, m: usize) -> Result<String> {
    check_image_dim(spec.image_dim())?;
    let grid = sample_patch_grid(spec, m)?;
    let mut out = String::new();
    emit_piece(&mut out, "patch", &grid, spec.chart_dim(), 0);
    Ok(out)
}

/// Mesh every facet piece of a control surface, one group `piece_<k>` per
/// facet, where `k` is the face index in the decomposition. Lower faces are
/// covered by the facet closures and get no group of their own.
pub fn surface_obj(surface: &ControlSurface, m: usize) -> Result<String> {
    let mut out = String::new();
    let mut base = 0;
    for (k, piece) in surface.facet_pieces() {
        check_image_dim(piece.image_dim())?;
        let grid = sample_patch_grid(piece, m)?;
        base = emit_piece(&mut out, &format!("piece_{k}"), &grid, piece.chart_dim(), base);
    }
    Ok(out)
}

pub fn write_patch_obj(spec: &PatchSpec, m: usize, path: &Path) -> Result<()> {
    write_text(path, &patch_obj(spec, m)?)
}

pub fn write_surface_obj(surface: &ControlSurface, m: usize, path: &Path) -> Result<()> {
    write_text(path, &surface_obj(surface, m)?)
}

fn check_image_dim(dim: usize) -> Result<()> {
    if dim > 3 {
        return Err(Error::UnsupportedDimension { dim });
    }
    Ok(())
}

fn push_vertex(out: &mut String, p: &[f64]) {
    let mut c = [0.0f64; 3];
    c[..p.len()].copy_from_slice(p);
    writeln!(out, "v {} {} {}", c[0], c[1], c[2]).expect("string writes never fail");
}

/// Append one group. `base` is the number of vertices already written;
/// returns the new total so the caller can chain groups.
fn emit_piece(out: &mut String, name: &str, grid: &SampledGrid, chart_dim: usize, base: usize) -> usize {
    writeln!(out, "g {name}").expect("string writes never fail");
    if chart_dim == 0 {
        // All m nodes of a point piece coincide; one vertex tells the story.
        let p = grid.nodes[0].as_ref().expect("point charts have no clip");
        push_vertex(out, p);
        writeln!(out, "p {}", base + 1).expect("string writes never fail");
        return base + 1;
    }
    let mut ids = vec![0usize; grid.nodes.len()];
    let mut next = base;
    for (k, node) in grid.nodes.iter().enumerate() {
        if let Some(p) = node {
            next += 1;
            ids[k] = next;
            push_vertex(out, p);
        }
    }
    if chart_dim == 1 {
        let line: Vec<String> = ids.iter().filter(|&&i| i != 0).map(|i| i.to_string()).collect();
        writeln!(out, "l {}", line.join(" ")).expect("string writes never fail");
    } else {
        for r in 0..grid.rows - 1 {
            for c in 0..grid.cols - 1 {
                let quad = [
                    ids[r * grid.cols + c],
                    ids[r * grid.cols + c + 1],
                    ids[(r + 1) * grid.cols + c + 1],
                    ids[(r + 1) * grid.cols + c],
                ];
                if quad.iter().all(|&i| i != 0) {
                    writeln!(out, "f {} {} {} {}", quad[0], quad[1], quad[2], quad[3])
                        .expect("string writes never fail");
                }
            }
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneration::control_surface;
    use crate::patch::{bezier_curve, tensor_patch};
    use crate::subdivision::{regular_decomposition, Lifting};

    fn bilinear() -> PatchSpec {
        PatchSpec::new(
            tensor_patch(1, 1).unwrap(),
            vec![1.0; 4],
            vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![1.0, 1.0, 1.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn bilinear_at_minimum_resolution_is_one_quad() {
        let text = patch_obj(&bilinear(), 2).unwrap();
        let vertices = text.lines().filter(|l| l.starts_with("v ")).count();
        let faces: Vec<&str> = text.lines().filter(|l| l.starts_with("f ")).collect();
        assert_eq!(vertices, 4);
        assert_eq!(faces, vec!["f 1 2 4 3"]);
        assert!(text.starts_with("g patch\n"));
    }

    #[test]
    fn planar_images_are_padded_to_three_coordinates() {
        let spec = PatchSpec::new(
            tensor_patch(1, 1).unwrap(),
            vec![1.0; 4],
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
        )
        .unwrap();
        let text = patch_obj(&spec, 2).unwrap();
        assert!(text.contains("v 1 1 0"));
    }

    #[test]
    fn high_dimensional_images_are_rejected() {
        let spec = PatchSpec::new(
            bezier_curve(1).unwrap(),
            vec![1.0; 2],
            vec![vec![0.0; 4], vec![1.0; 4]],
        )
        .unwrap();
        assert!(matches!(
            patch_obj(&spec, 3),
            Err(Error::UnsupportedDimension { dim: 4 })
        ));
    }

    #[test]
    fn curves_export_as_polylines() {
        let spec = PatchSpec::new(
            bezier_curve(2).unwrap(),
            vec![1.0, 1.0, 1.0],
            vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![2.0, 0.0]],
        )
        .unwrap();
        let text = patch_obj(&spec, 4).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert!(text.lines().any(|l| l == "l 1 2 3 4"));
        assert!(!text.contains("\nf "));
    }

    #[test]
    fn control_surface_groups_follow_the_facets() {
        let config = tensor_patch(2, 2).unwrap();
        // Product lifting: four unit squares, so every piece meshes fully.
        let lifting = Lifting::from_ints(&[0, 1, 0, 1, 2, 1, 0, 1, 0]);
        let deco = regular_decomposition(&config, &lifting).unwrap();
        let controls: Vec<Vec<f64>> = config
            .points()
            .iter()
            .map(|p| vec![p[0] as f64, p[1] as f64, 0.0])
            .collect();
        let spec = PatchSpec::new(config.clone(), vec![1.0; 9], controls).unwrap();
        let surface = control_surface(&spec, &deco).unwrap();
        let text = surface_obj(&surface, 3).unwrap();
        let groups: Vec<&str> = text.lines().filter(|l| l.starts_with("g ")).collect();
        assert_eq!(groups.len(), surface.facet_pieces().count());
        for (k, g) in groups.iter().enumerate() {
            assert_eq!(*g, format!("g piece_{k}"));
        }
        // Indices are global: the last face record references the last vertex.
        let vertices = text.lines().filter(|l| l.starts_with("v ")).count();
        let last_face = text.lines().rev().find(|l| l.starts_with("f ")).unwrap();
        assert!(last_face.split_whitespace().any(|t| t == vertices.to_string()));
    }

    #[test]
    fn missing_corners_suppress_their_quads() {
        use crate::patch::triangle_patch;
        let cfg = triangle_patch(1).unwrap();
        let spec = PatchSpec::new(
            cfg,
            vec![1.0; 3],
            vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
        )
        .unwrap();
        let text = patch_obj(&spec, 3).unwrap();
        // 3x3 grid clipped to i + j <= 2: six vertices, and only the cell
        // at the right angle has all four corners.
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 6);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 1);
    }
}
