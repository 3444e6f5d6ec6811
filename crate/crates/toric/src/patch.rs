//! Patch evaluation and the factorization through the weighted simplex.
//!
//! The basis function of a label `a` is the product of the primitive facet
//! inequalities of the domain polytope, each raised to its (integer) value
//! at `a`, with the convention 0^0 = 1. A patch divides the weighted,
//! control-point-scaled sum of basis functions by the weighted sum; the
//! same map factors as a composition of three elementary maps through the
//! standard simplex, which is kept as a separate code path and compared in
//! tests.
//!
//! The basis omits binomial coefficients. Classical Bernstein data is
//! recovered by folding the coefficients into the weights: a weighted
//! Bezier curve of degree `d` with weights `v_i` corresponds to
//! `w_i = v_i * C(d,i)` here, and similarly per axis for tensor products
//! and with trinomials for triangles.
//!
//! Configurations of lower affine rank (single points, collinear sets, the
//! restriction of a surface to an edge) evaluate through an intrinsic
//! integer chart of their span, so a sub-patch is again a patch.

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeConfig, Polytope, PolytopeFace};
use crate::linalg;
use crate::rat::Rat;

/// Nonnegative barycentric coordinates over the labels, summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint {
    pub coordinates: Vec<f64>,
}

impl SimplexPoint {
    fn normalized(raw: Vec<f64>) -> Result<SimplexPoint> {
        let sum: f64 = raw.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::OutsideDomain);
        }
        Ok(SimplexPoint {
            coordinates: raw.into_iter().map(|v| v / sum).collect(),
        })
    }
}

/// Weighted patch data: a configuration, one positive weight and one
/// control point per label.
#[derive(Clone, Debug)]
pub struct PatchSpec {
    config: LatticeConfig,
    weights: Vec<f64>,
    control_points: Vec<Vec<f64>>,
    basis: BasisData,
}

impl PatchSpec {
    pub fn new(
        config: LatticeConfig,
        weights: Vec<f64>,
        control_points: Vec<Vec<f64>>,
    ) -> Result<PatchSpec> {
        if weights.len() != config.len() {
            return Err(Error::WrongCount {
                what: "weights",
                got: weights.len(),
                expected: config.len(),
            });
        }
        for (a, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::NonpositiveWeight { label: a, value: w });
            }
        }
        if control_points.len() != config.len() {
            return Err(Error::WrongCount {
                what: "control points",
                got: control_points.len(),
                expected: config.len(),
            });
        }
        let image_dim = control_points[0].len();
        for (a, b) in control_points.iter().enumerate() {
            if b.len() != image_dim {
                return Err(Error::DimensionMismatch {
                    label: a,
                    got: b.len(),
                    expected: image_dim,
                });
            }
        }
        let basis = BasisData::build(&config)?;
        Ok(PatchSpec {
            config,
            weights,
            control_points,
            basis,
        })
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn control_points(&self) -> &[Vec<f64>] {
        &self.control_points
    }

    pub fn image_dim(&self) -> usize {
        self.control_points[0].len()
    }

    /// Intrinsic dimension of the domain (0, 1 or 2).
    pub fn chart_dim(&self) -> usize {
        match &self.basis.chart {
            Chart::Identity => self.config.dim(),
            Chart::Line { .. } => 1,
            Chart::Point { .. } => 0,
        }
    }

    /// Domain polytope in chart coordinates; `None` for a single point.
    pub fn domain(&self) -> Option<&Polytope> {
        self.basis.polytope.as_ref()
    }

    /// The sub-patch on a subset of labels, e.g. a face of the domain.
    pub fn restrict(&self, labels: &[usize]) -> Result<PatchSpec> {
        let config = self.config.restrict(labels)?;
        let weights = labels.iter().map(|&l| self.weights[l]).collect();
        let control_points = labels.iter().map(|&l| self.control_points[l].clone()).collect();
        PatchSpec::new(config, weights, control_points)
    }

    /// Basis vector at an exact point, with exact domain membership and
    /// facet values; powers and downstream arithmetic are floating point.
    pub fn basis_rat(&self, x: &[Rat]) -> Result<Vec<f64>> {
        let xc = self.basis.to_chart_rat(x)?;
        self.basis.basis_at(&xc)
    }

    /// Evaluate at exact chart coordinates, skipping the ambient round trip.
    pub(crate) fn evaluate_chart(&self, xc: &[Rat]) -> Result<Vec<f64>> {
        let beta = self.basis.basis_at(xc)?;
        self.combine(&beta)
    }

    /// Direct evaluation of the defining ratio at an exact point.
    pub fn evaluate_rat(&self, x: &[Rat]) -> Result<Vec<f64>> {
        let beta = self.basis_rat(x)?;
        self.combine(&beta)
    }

    fn combine(&self, beta: &[f64]) -> Result<Vec<f64>> {
        let mut num = vec![0.0; self.image_dim()];
        let mut den = 0.0;
        for (a, b) in beta.iter().enumerate() {
            let wb = self.weights[a] * b;
            den += wb;
            for (k, acc) in num.iter_mut().enumerate() {
                *acc += wb * self.control_points[a][k];
            }
        }
        if !(den > 0.0) || !den.is_finite() {
            return Err(Error::OutsideDomain);
        }
        Ok(num.into_iter().map(|v| v / den).collect())
    }

    /// Reference evaluation in exact rational arithmetic throughout.
    /// Weights and control points convert exactly from their float values.
    pub fn evaluate_exact(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        let xc = self.basis.to_chart_rat(x)?;
        let beta = self.basis.basis_at_exact(&xc)?;
        let mut num = vec![Rat::zero(); self.image_dim()];
        let mut den = Rat::zero();
        for (a, b) in beta.iter().enumerate() {
            let w = Rat::from_f64(self.weights[a]).expect("weights are finite");
            let wb = &w * b;
            den += &wb;
            for (k, acc) in num.iter_mut().enumerate() {
                let c = Rat::from_f64(self.control_points[a][k]).expect("control points are finite");
                *acc += &(&wb * &c);
            }
        }
        assert!(den.is_positive(), "denominator vanishes inside the domain");
        Ok(num.into_iter().map(|v| v / &den).collect())
    }
}

/// Basis function of one label at a point of the domain.
pub fn toric_basis(config: &LatticeConfig, a: usize, x: &[f64]) -> Result<f64> {
    if a >= config.len() {
        return Err(Error::LabelOutOfRange {
            label: a,
            len: config.len(),
        });
    }
    let basis = BasisData::build(config)?;
    let xc = basis.to_chart(x)?;
    Ok(basis.basis_at(&xc)?[a])
}

/// The normalized basis vector: first leg of the factorization.
pub fn beta_map(config: &LatticeConfig, x: &[f64]) -> Result<SimplexPoint> {
    let basis = BasisData::build(config)?;
    let xc = basis.to_chart(x)?;
    SimplexPoint::normalized(basis.basis_at(&xc)?)
}

/// Coordinatewise weight scaling followed by renormalization.
pub fn weight_action(weights: &[f64], z: &SimplexPoint) -> Result<SimplexPoint> {
    if weights.len() != z.coordinates.len() {
        return Err(Error::WrongCount {
            what: "weights",
            got: weights.len(),
            expected: z.coordinates.len(),
        });
    }
    for (a, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::NonpositiveWeight { label: a, value: w });
        }
    }
    SimplexPoint::normalized(
        weights
            .iter()
            .zip(&z.coordinates)
            .map(|(w, v)| w * v)
            .collect(),
    )
}

/// Push a simplex point to the image space: the convex combination of the
/// control points it weights.
pub fn project(control_points: &[Vec<f64>], z: &SimplexPoint) -> Result<Vec<f64>> {
    if control_points.len() != z.coordinates.len() {
        return Err(Error::WrongCount {
            what: "control points",
            got: control_points.len(),
            expected: z.coordinates.len(),
        });
    }
    let dim = control_points[0].len();
    let mut out = vec![0.0; dim];
    for (b, &za) in control_points.iter().zip(&z.coordinates) {
        for (k, acc) in out.iter_mut().enumerate() {
            *acc += za * b[k];
        }
    }
    Ok(out)
}

/// Patch value at `x`, directly from the defining ratio.
pub fn evaluate(spec: &PatchSpec, x: &[f64]) -> Result<Vec<f64>> {
    spec.evaluate_rat(&exact_point(x)?)
}

/// The composition of the three factor maps; agrees with [`evaluate`] up
/// to floating-point error and is kept separate so tests can compare them.
pub fn evaluate_factored(spec: &PatchSpec, x: &[f64]) -> Result<Vec<f64>> {
    let xc = spec.basis.to_chart_rat(&exact_point(x)?)?;
    let z = SimplexPoint::normalized(spec.basis.basis_at(&xc)?)?;
    let wz = weight_action(&spec.weights, &z)?;
    project(&spec.control_points, &wz)
}

fn exact_point(x: &[f64]) -> Result<Vec<Rat>> {
    x.iter()
        .map(|&v| Rat::from_f64(v).ok_or(Error::OutsideDomain))
        .collect()
}

/// Lattice points of the segment `[0, d]`, labelled left to right.
pub fn bezier_curve(d: usize) -> Result<LatticeConfig> {
    if d == 0 {
        return Err(Error::ZeroDegree);
    }
    LatticeConfig::new(1, (0..=d as i64).map(|i| vec![i]).collect())
}

/// Lattice points of the box `[0, c] x [0, d]`, row by row, `x` fastest.
pub fn tensor_patch(c: usize, d: usize) -> Result<LatticeConfig> {
    if c == 0 || d == 0 {
        return Err(Error::ZeroDegree);
    }
    let mut pts = Vec::with_capacity((c + 1) * (d + 1));
    for j in 0..=d as i64 {
        for i in 0..=c as i64 {
            pts.push(vec![i, j]);
        }
    }
    LatticeConfig::new(2, pts)
}

/// Lattice points of the triangle `x, y >= 0, x + y <= d`, row by row.
pub fn triangle_patch(d: usize) -> Result<LatticeConfig> {
    if d == 0 {
        return Err(Error::ZeroDegree);
    }
    let mut pts = Vec::new();
    for j in 0..=d as i64 {
        for i in 0..=(d as i64 - j) {
            pts.push(vec![i, j]);
        }
    }
    LatticeConfig::new(2, pts)
}

/// Two convex combinations of labels describing the same point of the
/// plane. Points of the patch image satisfy a multiplicative identity for
/// every such pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinomialRelation {
    pub alpha: Vec<Rat>,
    pub beta: Vec<Rat>,
}

impl BinomialRelation {
    /// Exact check of the defining identities against a configuration.
    pub fn validate(&self, config: &LatticeConfig) -> Result<()> {
        let n = config.len();
        if self.alpha.len() != n || self.beta.len() != n {
            return Err(Error::InvalidRelation {
                reason: format!(
                    "coefficient vectors have lengths {} and {}, expected {n}",
                    self.alpha.len(),
                    self.beta.len()
                ),
            });
        }
        for side in [&self.alpha, &self.beta] {
            if side.iter().any(Rat::is_negative) {
                return Err(Error::InvalidRelation {
                    reason: "coefficients must be nonnegative".into(),
                });
            }
            let sum = side.iter().fold(Rat::zero(), |acc, v| &acc + v);
            if sum != Rat::one() {
                return Err(Error::InvalidRelation {
                    reason: format!("coefficients sum to {sum}, expected 1"),
                });
            }
        }
        for c in 0..config.dim() {
            let mut diff = Rat::zero();
            for a in 0..n {
                let coord = Rat::int(config.point(a)[c]);
                diff += &(&(&self.alpha[a] - &self.beta[a]) * &coord);
            }
            if !diff.is_zero() {
                return Err(Error::InvalidRelation {
                    reason: "the two sides combine to different points".into(),
                });
            }
        }
        Ok(())
    }

    /// |prod z^alpha * prod w^beta - prod z^beta * prod w^alpha|.
    pub fn residual(&self, z: &[f64], weights: &[f64]) -> f64 {
        let mut left = 1.0;
        let mut right = 1.0;
        for a in 0..z.len() {
            let ea = self.alpha[a].to_f64();
            let eb = self.beta[a].to_f64();
            if ea != 0.0 {
                left *= z[a].powf(ea);
                right *= weights[a].powf(ea);
            }
            if eb != 0.0 {
                right *= z[a].powf(eb);
                left *= weights[a].powf(eb);
            }
        }
        (left - right).abs()
    }
}

/// Max residual of the relations over weighted simplex points of the
/// sampled domain points.
pub fn check_binomial_relations(
    spec: &PatchSpec,
    relations: &[BinomialRelation],
    samples: &[Vec<f64>],
) -> Result<f64> {
    for rel in relations {
        rel.validate(spec.config())?;
    }
    let mut worst = 0.0f64;
    for x in samples {
        let beta = spec.basis_rat(&exact_point(x)?)?;
        let z = weight_action(&spec.weights, &SimplexPoint::normalized(beta)?)?;
        for rel in relations {
            worst = worst.max(rel.residual(&z.coordinates, &spec.weights));
        }
    }
    Ok(worst)
}

/// A spanning set of relations from the integer kernel of the stacked
/// matrix of point coordinates and a row of ones: each kernel vector
/// splits into its positive and negative parts, normalized to sum one.
pub fn generate_relations(config: &LatticeConfig) -> Vec<BinomialRelation> {
    let n = config.len();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for c in 0..config.dim() {
        rows.push((0..n).map(|a| Rat::int(config.point(a)[c])).collect());
    }
    rows.push(vec![Rat::one(); n]);
    linalg::nullspace(rows, n)
        .into_iter()
        .filter_map(|v| relation_from_kernel_vector(&v))
        .collect()
}

fn relation_from_kernel_vector(v: &[Rat]) -> Option<BinomialRelation> {
    let mut scale: i128 = 1;
    for x in v {
        let (_, den) = x.to_fraction()?;
        scale = lcm128(scale, den);
    }
    let ints: Vec<i128> = v
        .iter()
        .map(|x| {
            let (num, den) = x.to_fraction().unwrap();
            num * (scale / den)
        })
        .collect();
    let g = ints.iter().fold(0i128, |acc, &x| gcd128(acc, x.abs()));
    if g == 0 {
        return None;
    }
    let ints: Vec<i128> = ints.iter().map(|&x| x / g).collect();
    let pos: i128 = ints.iter().filter(|&&x| x > 0).sum();
    if pos == 0 {
        return None;
    }
    let den: i64 = pos.try_into().ok()?;
    let coeff = |m: i128, keep_positive: bool| -> Option<Rat> {
        let kept = if keep_positive { m.max(0) } else { (-m).max(0) };
        Some(Rat::frac(i64::try_from(kept).ok()?, den))
    };
    let alpha: Option<Vec<Rat>> = ints.iter().map(|&m| coeff(m, true)).collect();
    let beta: Option<Vec<Rat>> = ints.iter().map(|&m| coeff(m, false)).collect();
    Some(BinomialRelation {
        alpha: alpha?,
        beta: beta?,
    })
}

fn gcd128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd128(b, a % b)
    }
}

fn lcm128(a: i128, b: i128) -> i128 {
    (a / gcd128(a, b)) * b
}

#[derive(Clone, Debug)]
enum Chart {
    Identity,
    Line {
        origin: Vec<i64>,
        dir: Vec<i64>,
        norm2: i64,
    },
    Point {
        origin: Vec<i64>,
    },
}

/// Precomputed chart, domain polytope and basis exponents.
#[derive(Clone, Debug)]
struct BasisData {
    chart: Chart,
    polytope: Option<Polytope>,
    exponents: Vec<Vec<i64>>,
    len: usize,
}

impl BasisData {
    fn build(config: &LatticeConfig) -> Result<BasisData> {
        let rank = config.affine_rank();
        if rank == config.dim() {
            let polytope = lattice::convex_hull(config)?;
            let exponents = exponents_for(&polytope, config.points());
            return Ok(BasisData {
                chart: Chart::Identity,
                polytope: Some(polytope),
                exponents,
                len: config.len(),
            });
        }
        if rank == 1 {
            let first = config.point(0).to_vec();
            let other = config
                .points()
                .iter()
                .find(|p| **p != first)
                .expect("rank 1 needs two distinct points");
            let dir = lattice::primitive_direction(&sub(other, &first));
            let norm2: i64 = dir.iter().map(|&v| v * v).sum();
            // Collinear lattice points differ by integer multiples of the
            // primitive direction, so the parameters are exact integers.
            let raw: Vec<i64> = config
                .points()
                .iter()
                .map(|p| dot(&sub(p, &first), &dir) / norm2)
                .collect();
            let smin = *raw.iter().min().unwrap();
            let at_min = raw.iter().position(|&s| s == smin).unwrap();
            let origin = config.point(at_min).to_vec();
            let chart_points: Vec<Vec<i64>> = raw.iter().map(|&s| vec![s - smin]).collect();
            let inner = LatticeConfig::new(1, chart_points.clone())?;
            let polytope = lattice::convex_hull(&inner)?;
            let exponents = exponents_for(&polytope, &chart_points);
            return Ok(BasisData {
                chart: Chart::Line { origin, dir, norm2 },
                polytope: Some(polytope),
                exponents,
                len: config.len(),
            });
        }
        Ok(BasisData {
            chart: Chart::Point {
                origin: config.point(0).to_vec(),
            },
            polytope: None,
            exponents: Vec::new(),
            len: config.len(),
        })
    }

    fn to_chart(&self, x: &[f64]) -> Result<Vec<Rat>> {
        self.to_chart_rat(&exact_point(x)?)
    }

    fn to_chart_rat(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        match &self.chart {
            Chart::Identity => Ok(x.to_vec()),
            Chart::Line { origin, dir, norm2 } => {
                if x.len() != origin.len() {
                    return Err(Error::OutsideDomain);
                }
                let mut s = Rat::zero();
                for k in 0..x.len() {
                    s += &(&(&x[k] - &Rat::int(origin[k])) * &Rat::int(dir[k]));
                }
                let s = s / Rat::int(*norm2);
                // Off-line points are outside the (degenerate) domain.
                for k in 0..x.len() {
                    let back = &Rat::int(origin[k]) + &(&s * &Rat::int(dir[k]));
                    if back != x[k] {
                        return Err(Error::OutsideDomain);
                    }
                }
                Ok(vec![s])
            }
            Chart::Point { origin } => {
                if x.len() != origin.len() {
                    return Err(Error::OutsideDomain);
                }
                for k in 0..x.len() {
                    if x[k] != Rat::int(origin[k]) {
                        return Err(Error::OutsideDomain);
                    }
                }
                Ok(Vec::new())
            }
        }
    }

    /// Basis values at exact chart coordinates. Facet values are computed
    /// exactly and converted; a nonnegative rational stays nonnegative, so
    /// in-domain points never see spurious negative bases.
    fn basis_at(&self, xc: &[Rat]) -> Result<Vec<f64>> {
        let poly = match &self.polytope {
            None => return Ok(vec![1.0; self.len]),
            Some(p) => p,
        };
        if matches!(lattice::face_membership(poly, xc), PolytopeFace::Outside) {
            return Err(Error::OutsideDomain);
        }
        let hv: Vec<f64> = poly.facets.iter().map(|h| h.eval_rat(xc).to_f64()).collect();
        Ok((0..self.len)
            .map(|a| {
                let mut acc = 1.0;
                for (e, v) in hv.iter().enumerate() {
                    let k = self.exponents[e][a];
                    if k != 0 {
                        acc *= v.powi(k as i32);
                    }
                }
                acc
            })
            .collect())
    }

    fn basis_at_exact(&self, xc: &[Rat]) -> Result<Vec<Rat>> {
        let poly = match &self.polytope {
            None => return Ok(vec![Rat::one(); self.len]),
            Some(p) => p,
        };
        if matches!(lattice::face_membership(poly, xc), PolytopeFace::Outside) {
            return Err(Error::OutsideDomain);
        }
        let hv: Vec<Rat> = poly.facets.iter().map(|h| h.eval_rat(xc)).collect();
        Ok((0..self.len)
            .map(|a| {
                let mut acc = Rat::one();
                for (e, v) in hv.iter().enumerate() {
                    for _ in 0..self.exponents[e][a] {
                        acc = &acc * v;
                    }
                }
                acc
            })
            .collect())
    }
}

fn exponents_for(poly: &Polytope, points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    poly.facets
        .iter()
        .map(|h| points.iter().map(|p| h.eval_int(p)).collect())
        .collect()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
