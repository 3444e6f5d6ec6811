//! Upper hulls of lifted configurations.
//!
//! Lifting a configuration `A` in `Z^d` by rational values gives points
//! `(a, values[a])` in `R^(d+1)`. The upper faces (outward normal with
//! positive last coordinate) determine the induced regular decomposition: a
//! point belongs to a face exactly when its lift lies on the face's
//! supporting plane, and points lifted strictly below the hull belong to no
//! face at all.
//!
//! Dimension 2 lifts run through an incremental convex hull with exact
//! orientation predicates; coplanar triangles are merged afterwards by
//! keying faces on their supporting affine function. The construction is
//! verified against the projected-area identity (upper faces tile the base
//! hull exactly); on any deficit the code falls back to brute-force
//! enumeration of supporting planes, which is also the oracle the tests
//! compare against.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeConfig, Polytope};
use crate::linalg;
use crate::rat::Rat;

/// Affine function `x -> constant + linear . x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub constant: Rat,
    pub linear: Vec<Rat>,
}

impl AffineForm {
    pub fn eval_int(&self, p: &[i64]) -> Rat {
        let mut acc = self.constant.clone();
        for (c, x) in self.linear.iter().zip(p) {
            acc += &(c * &Rat::int(*x));
        }
        acc
    }

    pub fn eval_rat(&self, p: &[Rat]) -> Rat {
        let mut acc = self.constant.clone();
        for (c, x) in self.linear.iter().zip(p) {
            acc += &(c * x);
        }
        acc
    }
}

/// One upper face: its supporting function and the labels lifted onto it.
#[derive(Clone, Debug)]
pub struct UpperFace {
    pub affine: AffineForm,
    pub members: Vec<usize>,
}

/// A configuration together with a lifting and the upper faces of its hull.
#[derive(Clone, Debug)]
pub struct LiftedPolytope {
    pub base: Polytope,
    pub values: Vec<Rat>,
    pub upper_faces: Vec<UpperFace>,
    /// True when the lifting is affine, so the single upper face is all of
    /// the configuration.
    pub degenerate: bool,
}

pub(crate) fn lift(config: &LatticeConfig, values: &[Rat]) -> Result<LiftedPolytope> {
    if values.len() != config.len() {
        return Err(Error::MissingLiftValue {
            got: values.len(),
            expected: config.len(),
        });
    }
    let base = lattice::convex_hull(config)?;

    if let Some(affine) = affine_fit(config, values) {
        return Ok(LiftedPolytope {
            base,
            values: values.to_vec(),
            upper_faces: vec![UpperFace {
                affine,
                members: (0..config.len()).collect(),
            }],
            degenerate: true,
        });
    }

    let mut faces = match config.dim() {
        1 => upper_faces_1d(config, values),
        2 => {
            let fast = upper_faces_2d(config, values);
            if covers_base(config, &base, &fast) {
                fast
            } else {
                // The incremental hull missed a facet (possible only through
                // a construction bug); the slow enumeration is sound.
                upper_faces_brute(config, values)
            }
        }
        dim => return Err(Error::UnsupportedDimension { dim }),
    };
    for f in &mut faces {
        f.members.sort_unstable();
    }
    faces.sort_by(|a, b| a.members.cmp(&b.members));
    debug_assert!(covers_base(config, &base, &faces));
    Ok(LiftedPolytope {
        base,
        values: values.to_vec(),
        upper_faces: faces,
        degenerate: false,
    })
}

/// The affine function equal to the lifting, if there is one.
fn affine_fit(config: &LatticeConfig, values: &[Rat]) -> Option<AffineForm> {
    let d = config.dim();
    // Greedily pick d+1 affinely independent points.
    let mut basis = vec![0usize];
    for l in 1..config.len() {
        if basis.len() == d + 1 {
            break;
        }
        let mut trial = basis.clone();
        trial.push(l);
        let pts: Vec<Vec<i64>> = trial.iter().map(|&i| config.point(i).to_vec()).collect();
        if lattice::affine_rank_of(&pts) == trial.len() - 1 {
            basis = trial;
        }
    }
    if basis.len() != d + 1 {
        return None; // does not span; convex_hull reports this
    }
    let rows: Vec<Vec<Rat>> = basis
        .iter()
        .map(|&l| {
            let mut row = vec![Rat::one()];
            row.extend(config.point(l).iter().map(|&x| Rat::int(x)));
            row
        })
        .collect();
    let rhs: Vec<Rat> = basis.iter().map(|&l| values[l].clone()).collect();
    let sol = linalg::solve(&rows, &rhs)?;
    let affine = AffineForm {
        constant: sol[0].clone(),
        linear: sol[1..].to_vec(),
    };
    let fits = (0..config.len()).all(|l| affine.eval_int(config.point(l)) == values[l]);
    fits.then_some(affine)
}

/// Do the projected upper faces tile the base hull? Exact area identity.
fn covers_base(config: &LatticeConfig, base: &Polytope, faces: &[UpperFace]) -> bool {
    if config.dim() == 1 {
        let total: i64 = faces
            .iter()
            .map(|f| {
                let h = lattice::member_hull(config, &f.members).expect("face members");
                config.point(h.ring[h.ring.len() - 1])[0] - config.point(h.ring[0])[0]
            })
            .sum();
        let lo = base.vertex_coords(0)[0];
        let hi = base.vertex_coords(1)[0];
        return total == hi - lo;
    }
    let mut total: i128 = 0;
    for f in faces {
        let h = lattice::member_hull(config, &f.members).expect("face members");
        total += lattice::member_area2(config, &h);
    }
    let ring: Vec<Vec<i64>> = (0..base.vertices.len())
        .map(|k| base.vertex_coords(k).to_vec())
        .collect();
    let idx: Vec<usize> = (0..ring.len()).collect();
    let mut hull_area: i128 = 0;
    for k in 0..idx.len() {
        let p = &ring[k];
        let q = &ring[(k + 1) % ring.len()];
        hull_area += p[0] as i128 * q[1] as i128 - q[0] as i128 * p[1] as i128;
    }
    total == hull_area
}

/// Members lifted exactly onto the plane, or `None` if some point is above.
fn support_members(config: &LatticeConfig, values: &[Rat], affine: &AffineForm) -> Option<Vec<usize>> {
    let mut members = Vec::new();
    for l in 0..config.len() {
        let ell = affine.eval_int(config.point(l));
        if values[l] > ell {
            return None;
        }
        if values[l] == ell {
            members.push(l);
        }
    }
    Some(members)
}

fn upper_faces_1d(config: &LatticeConfig, values: &[Rat]) -> Vec<UpperFace> {
    let mut order: Vec<usize> = (0..config.len()).collect();
    order.sort_by_key(|&l| config.point(l)[0]);
    // Upper chain, left to right; collinear middles are popped and recovered
    // through the support test afterwards.
    let mut chain: Vec<usize> = Vec::new();
    for &l in &order {
        while chain.len() >= 2 {
            let o = chain[chain.len() - 2];
            let a = chain[chain.len() - 1];
            let ox = Rat::int(config.point(o)[0]);
            let ax = Rat::int(config.point(a)[0]);
            let lx = Rat::int(config.point(l)[0]);
            let cross = &(&(&ax - &ox) * &(&values[l] - &values[o]))
                - &(&(&values[a] - &values[o]) * &(&lx - &ox));
            if cross >= Rat::zero() {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(l);
    }
    let mut out = Vec::new();
    for w in chain.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (xa, xb) = (config.point(a)[0], config.point(b)[0]);
        let slope = &(&values[b] - &values[a]) / &Rat::int(xb - xa);
        let constant = &values[a] - &(&slope * &Rat::int(xa));
        let affine = AffineForm {
            constant,
            linear: vec![slope],
        };
        let members = support_members(config, values, &affine).expect("upper chain edge supports");
        out.push(UpperFace { affine, members });
    }
    out
}

/// Plane `z = c0 + c1 x + c2 y` through three lifted points; `None` when the
/// projections are collinear (a vertical plane).
fn plane_through(config: &LatticeConfig, values: &[Rat], tri: [usize; 3]) -> Option<AffineForm> {
    let rows: Vec<Vec<Rat>> = tri
        .iter()
        .map(|&l| {
            let p = config.point(l);
            vec![Rat::one(), Rat::int(p[0]), Rat::int(p[1])]
        })
        .collect();
    let rhs: Vec<Rat> = tri.iter().map(|&l| values[l].clone()).collect();
    let sol = linalg::solve(&rows, &rhs)?;
    Some(AffineForm {
        constant: sol[0].clone(),
        linear: sol[1..].to_vec(),
    })
}

fn collect_upper(
    config: &LatticeConfig,
    values: &[Rat],
    triangles: impl Iterator<Item = [usize; 3]>,
) -> Vec<UpperFace> {
    let mut seen: BTreeMap<Vec<Rat>, ()> = BTreeMap::new();
    let mut out = Vec::new();
    for tri in triangles {
        let Some(affine) = plane_through(config, values, tri) else {
            continue;
        };
        let key = vec![
            affine.constant.clone(),
            affine.linear[0].clone(),
            affine.linear[1].clone(),
        ];
        if seen.contains_key(&key) {
            continue;
        }
        if let Some(members) = support_members(config, values, &affine) {
            seen.insert(key, ());
            out.push(UpperFace { affine, members });
        }
    }
    out
}

/// Every supporting plane through three lifted points. Quartic and slow, but
/// correct by inspection; used as fallback and as the test oracle.
pub(crate) fn upper_faces_brute(config: &LatticeConfig, values: &[Rat]) -> Vec<UpperFace> {
    let n = config.len();
    let triples = (0..n).flat_map(move |i| {
        (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| [i, j, k]))
    });
    collect_upper(config, values, triples)
}

fn upper_faces_2d(config: &LatticeConfig, values: &[Rat]) -> Vec<UpperFace> {
    let pts: Vec<[Rat; 3]> = (0..config.len())
        .map(|l| {
            let p = config.point(l);
            [Rat::int(p[0]), Rat::int(p[1]), values[l].clone()]
        })
        .collect();
    // A non-affine lifting of a spanning configuration always spans 3-space,
    // so `None` only signals an internal anomaly; the slow path decides then.
    match hull3_triangles(&pts) {
        Some(triangles) => collect_upper(config, values, triangles.into_iter()),
        None => upper_faces_brute(config, values),
    }
}

fn sub3(a: &[Rat; 3], b: &[Rat; 3]) -> [Rat; 3] {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn det3(u: &[Rat; 3], v: &[Rat; 3], w: &[Rat; 3]) -> Rat {
    let m01 = &(&v[1] * &w[2]) - &(&v[2] * &w[1]);
    let m02 = &(&v[0] * &w[2]) - &(&v[2] * &w[0]);
    let m03 = &(&v[0] * &w[1]) - &(&v[1] * &w[0]);
    &(&(&u[0] * &m01) - &(&u[1] * &m02)) + &(&u[2] * &m03)
}

/// Sign of the orientation of `d` against the plane through `a, b, c`.
fn orient3(pts: &[[Rat; 3]], a: usize, b: usize, c: usize, d: &[Rat; 3]) -> std::cmp::Ordering {
    let u = sub3(&pts[b], &pts[a]);
    let v = sub3(&pts[c], &pts[a]);
    let w = sub3(d, &pts[a]);
    det3(&u, &v, &w).cmp(&Rat::zero())
}

/// Triangles of the full convex hull of `pts`, which must span 3-space.
/// Coplanar input points are allowed; faces then appear as several coplanar
/// triangles, merged later through their supporting planes.
fn hull3_triangles(pts: &[[Rat; 3]]) -> Option<Vec<[usize; 3]>> {
    use std::cmp::Ordering::*;

    let n = pts.len();
    let i0 = 0;
    let i1 = (1..n).find(|&i| pts[i] != pts[i0])?;
    let i2 = (1..n).find(|&i| {
        i != i1 && {
            let u = sub3(&pts[i1], &pts[i0]);
            let v = sub3(&pts[i], &pts[i0]);
            let cx = &(&u[1] * &v[2]) - &(&u[2] * &v[1]);
            let cy = &(&u[2] * &v[0]) - &(&u[0] * &v[2]);
            let cz = &(&u[0] * &v[1]) - &(&u[1] * &v[0]);
            !(cx.is_zero() && cy.is_zero() && cz.is_zero())
        }
    })?;
    let i3 = (1..n).find(|&i| i != i1 && i != i2 && orient3(pts, i0, i1, i2, &pts[i]) != Equal)?;

    let four = Rat::int(4);
    let centroid: [Rat; 3] = [0, 1, 2].map(|k| {
        &(&(&(&pts[i0][k] + &pts[i1][k]) + &pts[i2][k]) + &pts[i3][k]) / &four
    });

    let mut faces: Vec<[usize; 3]> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    // Orient every face away from the fixed interior point. The interior
    // point never lies on a boundary plane, so `Equal` means the face under
    // construction is not a boundary triangle; give up on the fast path.
    let oriented = |a: usize, b: usize, c: usize| -> Option<[usize; 3]> {
        match orient3(pts, a, b, c, &centroid) {
            Less => Some([a, b, c]),
            Greater => Some([a, c, b]),
            Equal => None,
        }
    };
    for (a, b, c) in [(i0, i1, i2), (i0, i1, i3), (i0, i2, i3), (i1, i2, i3)] {
        faces.push(oriented(a, b, c)?);
        alive.push(true);
    }

    let seeded = [i0, i1, i2, i3];
    for p in 0..n {
        if seeded.contains(&p) {
            continue;
        }
        let visible: Vec<usize> = (0..faces.len())
            .filter(|&f| alive[f] && orient3(pts, faces[f][0], faces[f][1], faces[f][2], &pts[p]) == Greater)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for &f in &visible {
            let [a, b, c] = faces[f];
            for (u, v) in [(a, b), (b, c), (c, a)] {
                edges.insert((u, v));
            }
        }
        for &f in &visible {
            alive[f] = false;
        }
        let horizon: Vec<(usize, usize)> = edges
            .iter()
            .filter(|&&(u, v)| !edges.contains(&(v, u)))
            .copied()
            .collect();
        for (u, v) in horizon {
            faces.push(oriented(u, v, p)?);
            alive.push(true);
        }
    }

    Some(
        faces
            .into_iter()
            .zip(alive)
            .filter_map(|(f, a)| a.then_some(f))
            .collect(),
    )
}
