//! Lattice configurations, their convex hulls and facet inequalities.
//!
//! A configuration is a finite list of distinct integer points in `Z^d`;
//! points are referred to by their index (label) throughout the crate. Hulls
//! are computed exactly and facets are stored as primitive integer
//! inequalities `h(x) = normal . x + offset >= 0`, the normalization that the
//! basis-function exponents depend on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rat::Rat;

/// Distinct labelled points in `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeConfig {
    dim: usize,
    points: Vec<Vec<i64>>,
}

impl LatticeConfig {
    pub fn new(dim: usize, points: Vec<Vec<i64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyConfig);
        }
        for (label, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    label,
                    got: p.len(),
                    expected: dim,
                });
            }
        }
        let mut sorted: Vec<usize> = (0..points.len()).collect();
        sorted.sort_by(|&i, &j| points[i].cmp(&points[j]));
        for w in sorted.windows(2) {
            if points[w[0]] == points[w[1]] {
                return Err(Error::DuplicatePoint {
                    first: w[0].min(w[1]),
                    second: w[0].max(w[1]),
                });
            }
        }
        Ok(LatticeConfig { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, label: usize) -> &[i64] {
        &self.points[label]
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    /// Rank of the differences `p_i - p_0` over the rationals.
    pub fn affine_rank(&self) -> usize {
        affine_rank_of(&self.points)
    }

    /// Sub-configuration on `labels`, in the given order.
    pub fn restrict(&self, labels: &[usize]) -> Result<LatticeConfig> {
        let mut points = Vec::with_capacity(labels.len());
        for &l in labels {
            if l >= self.len() {
                return Err(Error::LabelOutOfRange {
                    label: l,
                    len: self.len(),
                });
            }
            points.push(self.points[l].clone());
        }
        LatticeConfig::new(self.dim, points)
    }
}

pub(crate) fn affine_rank_of(points: &[Vec<i64>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let dim = points[0].len();
    let rows: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| (0..dim).map(|k| Rat::int(p[k] - points[0][k])).collect())
        .collect();
    linalg::rank(rows)
}

/// Primitive integer inequality `h(x) = normal . x + offset >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetInequality {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl FacetInequality {
    pub fn eval_int(&self, p: &[i64]) -> i64 {
        let mut acc = self.offset as i128;
        for (n, x) in self.normal.iter().zip(p) {
            acc += *n as i128 * *x as i128;
        }
        i64::try_from(acc).expect("facet value overflow")
    }

    pub fn eval_rat(&self, p: &[Rat]) -> Rat {
        let mut acc = Rat::int(self.offset);
        for (n, x) in self.normal.iter().zip(p) {
            acc += &(&Rat::int(*n) * x);
        }
        acc
    }

    pub fn eval_f64(&self, p: &[f64]) -> f64 {
        let mut acc = self.offset as f64;
        for (n, x) in self.normal.iter().zip(p) {
            acc += *n as f64 * x;
        }
        acc
    }
}

/// Convex hull of a configuration: vertex labels plus facet inequalities.
///
/// For `dim == 2` the vertices run counterclockwise from the
/// lexicographically smallest point and `facets[k]` vanishes on the edge from
/// `vertices[k]` to `vertices[k+1]`. For `dim == 1` they are `[argmin,
/// argmax]` and `facets[k]` vanishes at `vertices[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    pub dim: usize,
    pub vertices: Vec<usize>,
    vertex_coords: Vec<Vec<i64>>,
    pub facets: Vec<FacetInequality>,
}

impl Polytope {
    pub fn vertex_coords(&self, k: usize) -> &[i64] {
        &self.vertex_coords[k]
    }
}

/// Location of a point relative to a polytope, exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolytopeFace {
    Outside,
    Interior,
    /// Relative interior of the facet with this index.
    Facet(usize),
    /// Equal to the vertex with this configuration label.
    Vertex(usize),
}

pub fn convex_hull(config: &LatticeConfig) -> Result<Polytope> {
    if config.is_empty() {
        return Err(Error::EmptyConfig);
    }
    let rank = config.affine_rank();
    if rank < config.dim() {
        return Err(Error::DegenerateSpan {
            dim: config.dim(),
            rank,
        });
    }
    match config.dim() {
        1 => hull_1d(config),
        2 => hull_2d(config),
        dim => Err(Error::UnsupportedDimension { dim }),
    }
}

fn hull_1d(config: &LatticeConfig) -> Result<Polytope> {
    let mut lo = 0;
    let mut hi = 0;
    for (label, p) in config.points().iter().enumerate() {
        if p[0] < config.point(lo)[0] {
            lo = label;
        }
        if p[0] > config.point(hi)[0] {
            hi = label;
        }
    }
    let (a, b) = (config.point(lo)[0], config.point(hi)[0]);
    Ok(Polytope {
        dim: 1,
        vertices: vec![lo, hi],
        vertex_coords: vec![vec![a], vec![b]],
        facets: vec![
            FacetInequality {
                normal: vec![1],
                offset: -a,
            },
            FacetInequality {
                normal: vec![-1],
                offset: b,
            },
        ],
    })
}

pub(crate) fn cross2(o: &[i64], a: &[i64], b: &[i64]) -> i128 {
    let (ax, ay) = ((a[0] - o[0]) as i128, (a[1] - o[1]) as i128);
    let (bx, by) = ((b[0] - o[0]) as i128, (b[1] - o[1]) as i128);
    ax * by - ay * bx
}

/// Counterclockwise ring of hull vertex labels, lex-smallest first.
pub(crate) fn hull_ring_2d(points: &[Vec<i64>], labels: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = labels.to_vec();
    order.sort_by(|&i, &j| points[i].cmp(&points[j]));
    order.dedup_by(|a, b| points[*a] == points[*b]);
    if order.len() <= 2 {
        return order;
    }
    let build = |iter: &mut dyn Iterator<Item = usize>| {
        let mut chain: Vec<usize> = Vec::new();
        for l in iter {
            while chain.len() >= 2
                && cross2(
                    &points[chain[chain.len() - 2]],
                    &points[chain[chain.len() - 1]],
                    &points[l],
                ) <= 0
            {
                chain.pop();
            }
            chain.push(l);
        }
        chain
    };
    let lower = build(&mut order.iter().copied());
    let upper = build(&mut order.iter().rev().copied());
    let mut ring = lower;
    ring.pop();
    ring.extend_from_slice(&upper[..upper.len() - 1]);
    ring
}

fn hull_2d(config: &LatticeConfig) -> Result<Polytope> {
    let all: Vec<usize> = (0..config.len()).collect();
    let ring = hull_ring_2d(config.points(), &all);
    let mut facets = Vec::with_capacity(ring.len());
    for k in 0..ring.len() {
        let p = config.point(ring[k]);
        let q = config.point(ring[(k + 1) % ring.len()]);
        facets.push(edge_inequality(p, q));
    }
    Ok(Polytope {
        dim: 2,
        vertex_coords: ring.iter().map(|&l| config.point(l).to_vec()).collect(),
        vertices: ring,
        facets,
    })
}

/// Inward primitive inequality for the directed edge `p -> q` of a
/// counterclockwise polygon (interior on the left).
pub(crate) fn edge_inequality(p: &[i64], q: &[i64]) -> FacetInequality {
    let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
    let g = gcd(dx.unsigned_abs(), dy.unsigned_abs()) as i64;
    let normal = vec![-dy / g, dx / g];
    let offset = -(normal[0] * p[0] + normal[1] * p[1]);
    FacetInequality { normal, offset }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest face of `poly` containing `x`, or `Outside`.
pub fn face_membership(poly: &Polytope, x: &[Rat]) -> PolytopeFace {
    let mut tight = Vec::new();
    for (k, h) in poly.facets.iter().enumerate() {
        let v = h.eval_rat(x);
        if v.is_negative() {
            return PolytopeFace::Outside;
        }
        if v.is_zero() {
            tight.push(k);
        }
    }
    match (poly.dim, tight.len()) {
        (_, 0) => PolytopeFace::Interior,
        (1, _) => PolytopeFace::Vertex(poly.vertices[tight[0]]),
        (_, 1) => PolytopeFace::Facet(tight[0]),
        _ => {
            for (k, label) in poly.vertices.iter().enumerate() {
                let coords = &poly.vertex_coords[k];
                if coords.iter().zip(x).all(|(c, xi)| &Rat::int(*c) == xi) {
                    return PolytopeFace::Vertex(*label);
                }
            }
            unreachable!("point tight on several facets must be a vertex")
        }
    }
}

/// Twice the signed area of a counterclockwise integer ring.
fn shoelace2(points: &[Vec<i64>], ring: &[usize]) -> i128 {
    let mut acc: i128 = 0;
    for k in 0..ring.len() {
        let p = &points[ring[k]];
        let q = &points[ring[(k + 1) % ring.len()]];
        acc += p[0] as i128 * q[1] as i128 - q[0] as i128 * p[1] as i128;
    }
    acc
}

/// Hull of a subset of configuration points, in any affine rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberHull {
    /// Affine dimension of the member set: 0, 1, or 2.
    pub dim: usize,
    /// Hull vertex labels: a counterclockwise ring (dim 2), the two
    /// endpoints (dim 1), or the single point (dim 0).
    pub ring: Vec<usize>,
}

pub(crate) fn member_hull(config: &LatticeConfig, members: &[usize]) -> Result<MemberHull> {
    for &l in members {
        if l >= config.len() {
            return Err(Error::LabelOutOfRange {
                label: l,
                len: config.len(),
            });
        }
    }
    if members.is_empty() {
        return Err(Error::EmptyConfig);
    }
    let pts: Vec<Vec<i64>> = members.iter().map(|&l| config.point(l).to_vec()).collect();
    match affine_rank_of(&pts) {
        0 => Ok(MemberHull {
            dim: 0,
            ring: vec![members[0]],
        }),
        1 => {
            // Endpoints: extremes of the projection onto the direction.
            let dir = primitive_direction(&sub(config.point(*members.last().unwrap()), &pts[0]));
            let key = |l: usize| -> i128 {
                config
                    .point(l)
                    .iter()
                    .zip(&dir)
                    .map(|(x, d)| *x as i128 * *d as i128)
                    .sum()
            };
            let lo = *members.iter().min_by_key(|&&l| key(l)).unwrap();
            let hi = *members.iter().max_by_key(|&&l| key(l)).unwrap();
            Ok(MemberHull {
                dim: 1,
                ring: vec![lo, hi],
            })
        }
        2 => Ok(MemberHull {
            dim: 2,
            ring: hull_ring_2d(config.points(), members),
        }),
        r => Err(Error::UnsupportedDimension { dim: r }),
    }
}

/// Area of the hull of a member set; zero in rank below 2.
pub(crate) fn member_area2(config: &LatticeConfig, hull: &MemberHull) -> i128 {
    if hull.dim < 2 {
        0
    } else {
        shoelace2(config.points(), &hull.ring)
    }
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Divides out the gcd; the sign makes the first nonzero entry positive.
pub(crate) fn primitive_direction(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0u64, |acc, &x| gcd(acc, x.unsigned_abs()));
    assert!(g != 0, "zero direction");
    let mut out: Vec<i64> = v.iter().map(|&x| x / g as i64).collect();
    if let Some(first) = out.iter().find(|&&x| x != 0) {
        if *first < 0 {
            for x in &mut out {
                *x = -*x;
            }
        }
    }
    out
}

pub(crate) fn rat_point(p: &[i64]) -> Vec<Rat> {
    p.iter().map(|&x| Rat::int(x)).collect()
}

pub use crate::upper_hull::{AffineForm, LiftedPolytope, UpperFace};

/// Upper faces of the convex hull of the lifted points `(a, values[a])`.
///
/// `values` is indexed by label. Points lifted strictly below the hull are
/// members of no upper face.
pub fn lift(config: &LatticeConfig, values: &[Rat]) -> Result<LiftedPolytope> {
    crate::upper_hull::lift(config, values)
}
