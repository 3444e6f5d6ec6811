//! Polyhedral decompositions of a lattice configuration.
//!
//! A decomposition is a cell complex whose full-dimensional faces (facets)
//! tile the hull of the configuration and intersect along common faces.
//! Decompositions arise here in two ways: induced by a lifting (take the
//! upper faces of the lifted hull and project), or supplied by the caller
//! and validated. Exact certification decides whether a validated
//! decomposition is induced by some lifting, returning either a lifting
//! witness with a positive bending margin or a Farkas certificate of
//! infeasibility. Both artifacts can be re-checked independently of the
//! solver by [`verify_regularity`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, AffineForm, FacetInequality, LatticeConfig, MemberHull};
use crate::linalg;
use crate::rat::Rat;
use crate::simplex;

/// A height per configuration label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lifting {
    values: Vec<Rat>,
}

impl Lifting {
    pub fn new(values: Vec<Rat>) -> Self {
        Lifting { values }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Lifting {
            values: values.iter().map(|&v| Rat::int(v)).collect(),
        }
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Negated heights; turns upper hulls into lower hulls.
    pub fn negated(&self) -> Self {
        Lifting {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// A face of a decomposition, identified by the labels lying on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    /// Sorted member labels.
    pub members: Vec<usize>,
    /// Affine dimension of the member set.
    pub dimension: usize,
}

/// How a decomposition was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    FromLifting(Lifting),
    UserSupplied,
}

/// Nonnegative multipliers proving that no lifting induces the
/// decomposition.
///
/// Entries are keyed by `(facet index, label)` where the facet index counts
/// the full-dimensional faces in stored order. `support` multipliers weight
/// the constraints "facet plane at a non-member label exceeds its height by
/// the bending margin"; `membership` multipliers weight the equalities
/// "facet plane agrees with the height at a member label". The combination
/// must cancel every plane and height variable and leave a negative
/// coefficient on the margin, which is impossible when a positive margin
/// exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    pub support: Vec<(usize, usize, Rat)>,
    pub membership: Vec<(usize, usize, Rat)>,
}

/// Outcome of certification, stored on the decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum Regularity {
    Unknown,
    Regular { witness: Lifting, margin: Rat },
    Irregular { certificate: FarkasCertificate },
}

/// A validated cell complex on a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    dim: usize,
    labels: usize,
    faces: Vec<Face>,
    pub source: Source,
    pub regularity: Regularity,
    validated: bool,
}

impl Decomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All faces, facets first, then by member list.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Full-dimensional faces in stored order; certificate indices refer to
    /// positions in this sequence.
    pub fn facets(&self) -> impl Iterator<Item = &Face> {
        let d = self.dim;
        self.faces.iter().filter(move |f| f.dimension == d)
    }

    /// Labels that lie on no face: lifted strictly below the upper hull.
    pub fn no_face_labels(&self) -> Vec<usize> {
        let mut seen = vec![false; self.labels];
        for f in &self.faces {
            for &a in &f.members {
                seen[a] = true;
            }
        }
        (0..self.labels).filter(|&a| !seen[a]).collect()
    }

    /// Whether some face contains both labels.
    pub fn share_face(&self, a: usize, b: usize) -> bool {
        self.faces.iter().any(|f| {
            f.members.binary_search(&a).is_ok() && f.members.binary_search(&b).is_ok()
        })
    }

    pub(crate) fn guard(&self, config: &LatticeConfig) -> Result<()> {
        if !self.validated || self.labels != config.len() || self.dim != config.dim() {
            return Err(Error::UnvalidatedInput {
                reason: "decomposition was not validated against this configuration".into(),
            });
        }
        Ok(())
    }
}

/// The decomposition induced by a lifting: upper faces of the lifted hull,
/// closed under the face relation. The lifting itself is the regularity
/// witness; its margin is the least slack of any lifted point under a facet
/// plane not through it.
pub fn regular_decomposition(config: &LatticeConfig, lifting: &Lifting) -> Result<Decomposition> {
    let lifted = lattice::lift(config, lifting.values())?;
    let facet_sets: Vec<Vec<usize>> = lifted
        .upper_faces
        .iter()
        .map(|f| f.members.clone())
        .collect();
    let faces = closure_faces(config, &facet_sets)?;

    let mut margin: Option<Rat> = None;
    for f in &lifted.upper_faces {
        for a in 0..config.len() {
            if f.members.binary_search(&a).is_err() {
                let slack = &f.affine.eval_int(config.point(a)) - &lifting.values()[a];
                debug_assert!(slack.is_positive());
                if margin.as_ref().map_or(true, |m| &slack < m) {
                    margin = Some(slack);
                }
            }
        }
    }

    Ok(Decomposition {
        dim: config.dim(),
        labels: config.len(),
        faces,
        source: Source::FromLifting(lifting.clone()),
        regularity: Regularity::Regular {
            witness: lifting.clone(),
            margin: margin.unwrap_or_else(Rat::one),
        },
        validated: true,
    })
}

/// Checks that the supplied member sets form a decomposition: facets tile
/// the hull without overlap, meet only along shared member sets, and any
/// lower-dimensional entries are faces of the facets. Regularity is left
/// [`Regularity::Unknown`].
pub fn validate_decomposition(
    config: &LatticeConfig,
    supplied: &[Vec<usize>],
) -> Result<Decomposition> {
    let base = lattice::convex_hull(config)?;
    let d = config.dim();

    let mut canon: Vec<Vec<usize>> = Vec::with_capacity(supplied.len());
    for (idx, raw) in supplied.iter().enumerate() {
        let mut m = raw.clone();
        m.sort_unstable();
        m.dedup();
        if m.is_empty() {
            return Err(Error::UnvalidatedInput {
                reason: format!("supplied face {idx} has no members"),
            });
        }
        for &l in &m {
            if l >= config.len() {
                return Err(Error::LabelOutOfRange {
                    label: l,
                    len: config.len(),
                });
            }
        }
        canon.push(m);
    }

    // Split full-dimensional entries from lower-dimensional ones.
    let mut facets: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut lower: Vec<(usize, Vec<usize>)> = Vec::new();
    for (idx, m) in canon.into_iter().enumerate() {
        let pts: Vec<Vec<i64>> = m.iter().map(|&l| config.point(l).to_vec()).collect();
        if lattice::affine_rank_of(&pts) == d {
            facets.push((idx, m));
        } else {
            lower.push((idx, m));
        }
    }

    let hulls: Vec<MemberHull> = facets
        .iter()
        .map(|(_, m)| lattice::member_hull(config, m))
        .collect::<Result<_>>()?;
    let ineqs: Vec<Vec<FacetInequality>> = hulls.iter().map(|h| hull_inequalities(config, h)).collect();

    for i in 0..facets.len() {
        for j in i + 1..facets.len() {
            check_pair(config, &facets[i], &facets[j], &hulls[i], &hulls[j], &ineqs[i], &ineqs[j])?;
        }
    }

    // Tiles are pairwise interior-disjoint inside the hull, so exact measure
    // agreement means there is no gap.
    let covered: i128 = hulls.iter().map(|h| measure2(config, h)).sum();
    let total = base_measure2(config, &base.vertices);
    if covered != total {
        return Err(Error::CoverageGap {
            covered: half_string(covered),
            total: half_string(total),
        });
    }

    let facet_sets: Vec<Vec<usize>> = facets.into_iter().map(|(_, m)| m).collect();
    let faces = closure_faces(config, &facet_sets)?;

    for (idx, m) in &lower {
        if !faces.iter().any(|f| &f.members == m) {
            return Err(Error::UnvalidatedInput {
                reason: format!("supplied face {idx} is not a face of the supplied facets"),
            });
        }
    }

    Ok(Decomposition {
        dim: d,
        labels: config.len(),
        faces,
        source: Source::UserSupplied,
        regularity: Regularity::Unknown,
        validated: true,
    })
}

/// Decides regularity of a validated decomposition by exact linear
/// programming, stores the outcome on the decomposition, and returns it.
///
/// Regular outcomes carry a lifting witness and a positive bending margin;
/// the witness satisfies, with that margin, every constraint of the full
/// system: one plane per facet agreeing with the witness on members and
/// exceeding it by the margin elsewhere. Irregular outcomes carry a
/// [`FarkasCertificate`] over the same constraint rows. Both are re-checked
/// here before being returned.
pub fn certify_regularity(
    config: &LatticeConfig,
    deco: &mut Decomposition,
) -> Result<Regularity> {
    deco.guard(config)?;
    let d = config.dim();
    let n = config.len();
    let facets: Vec<Face> = deco.facets().cloned().collect();
    let pins: Vec<Vec<usize>> = facets
        .iter()
        .map(|f| pick_pins(config, &f.members, d))
        .collect();

    // Unknowns: heights z (split into z = p - q with p, q >= 0) and the
    // margin. Per facet, the plane is eliminated: it is the affine
    // interpolant of z at d+1 pinned members, so a member constraint
    // becomes a two-sided tie between z at the member and the interpolant,
    // and each wall between adjacent facets contributes one fold constraint
    // at a witness vertex of the neighbor. The margin is capped to keep the
    // program bounded; the optimum is then 0 or 1 and positive exactly when
    // a witness exists.
    let ncols = 2 * n + 1;
    let eps_col = 2 * n;
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    let mut meta: Vec<RowMeta> = Vec::new();

    fn add_z(row: &mut [Rat], n: usize, a: usize, c: &Rat) {
        row[a] += c;
        row[n + a] -= c;
    }

    for (fi, face) in facets.iter().enumerate() {
        for &a in &face.members {
            if pins[fi].contains(&a) {
                continue;
            }
            let g = gamma(config, &pins[fi], config.point(a));
            let mut row = vec![Rat::zero(); ncols];
            add_z(&mut row, n, a, &Rat::one());
            for (k, &p) in pins[fi].iter().enumerate() {
                add_z(&mut row, n, p, &-&g[k]);
            }
            let neg: Vec<Rat> = row.iter().map(|v| -v).collect();
            rows.push(row);
            rhs.push(Rat::zero());
            meta.push(RowMeta::Tie {
                facet: fi,
                label: a,
                positive: true,
            });
            rows.push(neg);
            rhs.push(Rat::zero());
            meta.push(RowMeta::Tie {
                facet: fi,
                label: a,
                positive: false,
            });
        }
    }

    for (fi, v) in walls(config, &facets, d) {
        let g = gamma(config, &pins[fi], config.point(v));
        let mut row = vec![Rat::zero(); ncols];
        add_z(&mut row, n, v, &Rat::one());
        for (k, &p) in pins[fi].iter().enumerate() {
            add_z(&mut row, n, p, &-&g[k]);
        }
        row[eps_col] = Rat::one();
        rows.push(row);
        rhs.push(Rat::zero());
        meta.push(RowMeta::Fold { facet: fi, label: v });
    }

    let mut cap = vec![Rat::zero(); ncols];
    cap[eps_col] = Rat::one();
    rows.push(cap);
    rhs.push(Rat::one());
    meta.push(RowMeta::Cap);

    let mut objective = vec![Rat::zero(); ncols];
    objective[eps_col] = Rat::one();

    let sol = simplex::solve_standard(&rows, &rhs, &objective)?;

    let regularity = if sol.value.is_positive() {
        let z: Vec<Rat> = (0..n).map(|a| &sol.x[a] - &sol.x[n + a]).collect();
        // Gauge: shift by the affine interpolant at the first facet's pins
        // so the witness vanishes there.
        let alpha = affine_from(config, &pins[0], &z);
        let mut w: Vec<Rat> = (0..n)
            .map(|a| &z[a] - &alpha.eval_int(config.point(a)))
            .collect();
        let planes: Vec<AffineForm> = pins
            .iter()
            .map(|pin| affine_from(config, pin, &w))
            .collect();
        let mut on_some_face = vec![false; n];
        for f in &facets {
            for &a in &f.members {
                on_some_face[a] = true;
            }
        }
        for a in 0..n {
            if !on_some_face[a] {
                let hull_value = planes
                    .iter()
                    .map(|pl| pl.eval_int(config.point(a)))
                    .min()
                    .expect("at least one facet");
                w[a] = &hull_value - &sol.value;
            }
        }
        let mut margin: Option<Rat> = None;
        for (fi, f) in facets.iter().enumerate() {
            for a in 0..n {
                if f.members.binary_search(&a).is_err() {
                    let slack = &planes[fi].eval_int(config.point(a)) - &w[a];
                    if margin.as_ref().map_or(true, |m| &slack < m) {
                        margin = Some(slack);
                    }
                }
            }
        }
        let margin = margin.unwrap_or_else(Rat::one);
        let witness = Lifting::new(w);
        assert!(
            check_witness(config, &facets, &witness, &margin),
            "solver produced a witness violating its own constraints"
        );
        Regularity::Regular { witness, margin }
    } else {
        // Expand the duals of the reduced rows into multipliers on the full
        // system. A tie pair collapses to one signed membership multiplier;
        // a fold row becomes a support multiplier at its witness label plus
        // membership corrections at the pins.
        let mut support: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
        let mut membership: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
        let mut tie_mu: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
        for (r, m) in meta.iter().enumerate() {
            let y = &sol.duals[r];
            match m {
                RowMeta::Tie {
                    facet,
                    label,
                    positive,
                } => {
                    let e = tie_mu.entry((*facet, *label)).or_insert_with(Rat::zero);
                    if *positive {
                        *e += y;
                    } else {
                        *e -= y;
                    }
                }
                RowMeta::Fold { facet, label } => {
                    if y.is_zero() {
                        continue;
                    }
                    assert!(!y.is_negative(), "dual of a <= row must be nonnegative");
                    *support.entry((*facet, *label)).or_insert_with(Rat::zero) += y;
                    let g = gamma(config, &pins[*facet], config.point(*label));
                    for (k, &p) in pins[*facet].iter().enumerate() {
                        *membership.entry((*facet, p)).or_insert_with(Rat::zero) -=
                            &(y * &g[k]);
                    }
                }
                RowMeta::Cap => {
                    assert!(y.is_zero(), "cap multiplier must vanish at a zero optimum");
                }
            }
        }
        for ((fi, a), mu) in tie_mu {
            if mu.is_zero() {
                continue;
            }
            let g = gamma(config, &pins[fi], config.point(a));
            for (k, &p) in pins[fi].iter().enumerate() {
                *membership.entry((fi, p)).or_insert_with(Rat::zero) -= &(&mu * &g[k]);
            }
            *membership.entry((fi, a)).or_insert_with(Rat::zero) += &mu;
        }
        let certificate = FarkasCertificate {
            support: support
                .into_iter()
                .filter(|(_, y)| !y.is_zero())
                .map(|((f, a), y)| (f, a, y))
                .collect(),
            membership: membership
                .into_iter()
                .filter(|(_, y)| !y.is_zero())
                .map(|((f, a), y)| (f, a, y))
                .collect(),
        };
        assert!(
            check_farkas(config, &facets, &certificate),
            "solver produced an inconsistent infeasibility certificate"
        );
        Regularity::Irregular { certificate }
    };

    deco.regularity = regularity.clone();
    Ok(regularity)
}

/// Re-checks the stored certificate by direct substitution, independently
/// of the solver. Returns an error if regularity was never certified.
pub fn verify_regularity(config: &LatticeConfig, deco: &Decomposition) -> Result<bool> {
    deco.guard(config)?;
    let facets: Vec<Face> = deco.facets().cloned().collect();
    match &deco.regularity {
        Regularity::Unknown => Err(Error::UnvalidatedInput {
            reason: "regularity has not been certified".into(),
        }),
        Regularity::Regular { witness, margin } => {
            Ok(check_witness(config, &facets, witness, margin))
        }
        Regularity::Irregular { certificate } => Ok(check_farkas(config, &facets, certificate)),
    }
}

enum RowMeta {
    Tie {
        facet: usize,
        label: usize,
        positive: bool,
    },
    Fold {
        facet: usize,
        label: usize,
    },
    Cap,
}

/// Margin constraints hold verbatim: per facet, the plane through the
/// witness at the pins agrees with the witness on every member and exceeds
/// it by the margin on every non-member.
fn check_witness(
    config: &LatticeConfig,
    facets: &[Face],
    witness: &Lifting,
    margin: &Rat,
) -> bool {
    if !margin.is_positive() || witness.len() != config.len() {
        return false;
    }
    let d = config.dim();
    for f in facets {
        let pins = pick_pins(config, &f.members, d);
        let plane = affine_from(config, &pins, witness.values());
        for a in 0..config.len() {
            let ell = plane.eval_int(config.point(a));
            let lam = &witness.values()[a];
            if f.members.binary_search(&a).is_ok() {
                if &ell != lam {
                    return false;
                }
            } else if ell < lam + margin {
                return false;
            }
        }
    }
    true
}

/// The multiplier combination must cancel every plane coefficient and every
/// height, with positive total weight on the margin rows.
fn check_farkas(config: &LatticeConfig, facets: &[Face], cert: &FarkasCertificate) -> bool {
    let n = config.len();
    let d = config.dim();
    let mut z = vec![Rat::zero(); n];
    let mut ell = vec![vec![Rat::zero(); d + 1]; facets.len()];
    let mut total = Rat::zero();

    let add = |ell_f: &mut [Rat], z_a: &mut Rat, p: &[i64], y: &Rat| {
        ell_f[0] += y;
        for (k, &x) in p.iter().enumerate() {
            ell_f[k + 1] += &(y * &Rat::int(x));
        }
        *z_a -= y;
    };

    for (fi, a, y) in &cert.support {
        if *fi >= facets.len() || *a >= n || y.is_negative() {
            return false;
        }
        if facets[*fi].members.binary_search(a).is_ok() {
            return false;
        }
        add(&mut ell[*fi], &mut z[*a], config.point(*a), y);
        total += y;
    }
    for (fi, a, y) in &cert.membership {
        if *fi >= facets.len() || *a >= n {
            return false;
        }
        if facets[*fi].members.binary_search(a).is_err() {
            return false;
        }
        add(&mut ell[*fi], &mut z[*a], config.point(*a), y);
    }

    total.is_positive()
        && z.iter().all(Rat::is_zero)
        && ell.iter().flatten().all(Rat::is_zero)
}

/// d+1 affinely independent members, greedily from the sorted list.
fn pick_pins(config: &LatticeConfig, members: &[usize], d: usize) -> Vec<usize> {
    let mut pins = vec![members[0]];
    for &m in &members[1..] {
        if pins.len() == d + 1 {
            break;
        }
        let mut trial = pins.clone();
        trial.push(m);
        let pts: Vec<Vec<i64>> = trial.iter().map(|&l| config.point(l).to_vec()).collect();
        if lattice::affine_rank_of(&pts) == trial.len() - 1 {
            pins = trial;
        }
    }
    assert_eq!(pins.len(), d + 1, "facet members must span full dimension");
    pins
}

/// Barycentric coefficients of `x` with respect to the pins.
fn gamma(config: &LatticeConfig, pins: &[usize], x: &[i64]) -> Vec<Rat> {
    let k = pins.len();
    let mut rows = vec![vec![Rat::zero(); k]; k];
    let mut rhs = vec![Rat::zero(); k];
    for (i, &p) in pins.iter().enumerate() {
        rows[0][i] = Rat::one();
        for (c, &coord) in config.point(p).iter().enumerate() {
            rows[c + 1][i] = Rat::int(coord);
        }
    }
    rhs[0] = Rat::one();
    for (c, &coord) in x.iter().enumerate() {
        rhs[c + 1] = Rat::int(coord);
    }
    linalg::solve(&rows, &rhs).expect("pins are affinely independent")
}

/// The affine form interpolating `values` at the pins.
fn affine_from(config: &LatticeConfig, pins: &[usize], values: &[Rat]) -> AffineForm {
    let rows: Vec<Vec<Rat>> = pins
        .iter()
        .map(|&l| {
            let mut row = vec![Rat::one()];
            row.extend(config.point(l).iter().map(|&x| Rat::int(x)));
            row
        })
        .collect();
    let rhs: Vec<Rat> = pins.iter().map(|&l| values[l].clone()).collect();
    let sol = linalg::solve(&rows, &rhs).expect("pins are affinely independent");
    AffineForm {
        constant: sol[0].clone(),
        linear: sol[1..].to_vec(),
    }
}

/// Interior walls: for each facet pair whose shared members span a
/// hyperplane of the tiling, one `(facet, witness label)` entry where the
/// witness is the first member of the other facet off that hyperplane.
fn walls(config: &LatticeConfig, facets: &[Face], d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..facets.len() {
        for j in i + 1..facets.len() {
            let shared = intersect_sorted(&facets[i].members, &facets[j].members);
            if shared.is_empty() {
                continue;
            }
            let pts: Vec<Vec<i64>> = shared.iter().map(|&l| config.point(l).to_vec()).collect();
            if lattice::affine_rank_of(&pts) != d - 1 {
                continue;
            }
            let v = facets[j]
                .members
                .iter()
                .copied()
                .find(|&v| {
                    let mut trial = pts.clone();
                    trial.push(config.point(v).to_vec());
                    lattice::affine_rank_of(&trial) == d
                })
                .expect("facet spans full dimension");
            out.push((i, v));
        }
    }
    out
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter()
        .copied()
        .filter(|x| b.binary_search(x).is_ok())
        .collect()
}

/// Closes facet member sets under the face relation: edges of each facet
/// hull (with all members on them) and hull vertices as singletons.
fn closure_faces(config: &LatticeConfig, facet_sets: &[Vec<usize>]) -> Result<Vec<Face>> {
    let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for members in facet_sets {
        let hull = lattice::member_hull(config, members)?;
        sets.insert(members.clone());
        match hull.dim {
            2 => {
                let ring = &hull.ring;
                for k in 0..ring.len() {
                    let p = config.point(ring[k]);
                    let q = config.point(ring[(k + 1) % ring.len()]);
                    let h = lattice::edge_inequality(p, q);
                    let edge: Vec<usize> = members
                        .iter()
                        .copied()
                        .filter(|&a| h.eval_int(config.point(a)) == 0)
                        .collect();
                    sets.insert(edge);
                    sets.insert(vec![ring[k]]);
                }
            }
            1 => {
                sets.insert(vec![hull.ring[0]]);
                sets.insert(vec![*hull.ring.last().unwrap()]);
            }
            _ => {}
        }
    }
    let mut faces: Vec<Face> = sets
        .into_iter()
        .map(|members| {
            let pts: Vec<Vec<i64>> = members.iter().map(|&l| config.point(l).to_vec()).collect();
            Face {
                dimension: lattice::affine_rank_of(&pts),
                members,
            }
        })
        .collect();
    faces.sort_by(|a, b| {
        b.dimension
            .cmp(&a.dimension)
            .then_with(|| a.members.cmp(&b.members))
    });
    Ok(faces)
}

/// Facet-inequality description of a full-dimensional member hull.
fn hull_inequalities(config: &LatticeConfig, hull: &MemberHull) -> Vec<FacetInequality> {
    match hull.dim {
        1 => {
            let lo = config.point(hull.ring[0])[0];
            let hi = config.point(hull.ring[1])[0];
            vec![
                FacetInequality {
                    normal: vec![1],
                    offset: -lo,
                },
                FacetInequality {
                    normal: vec![-1],
                    offset: hi,
                },
            ]
        }
        2 => {
            let ring = &hull.ring;
            (0..ring.len())
                .map(|k| {
                    lattice::edge_inequality(
                        config.point(ring[k]),
                        config.point(ring[(k + 1) % ring.len()]),
                    )
                })
                .collect()
        }
        _ => unreachable!("facet hulls are full-dimensional"),
    }
}

/// Two tiles may only meet along a common face whose lattice points are
/// members of both.
fn check_pair(
    config: &LatticeConfig,
    (i_idx, mi): &(usize, Vec<usize>),
    (j_idx, mj): &(usize, Vec<usize>),
    hull_i: &MemberHull,
    hull_j: &MemberHull,
    ineq_i: &[FacetInequality],
    ineq_j: &[FacetInequality],
) -> Result<()> {
    let inside_j = |p: &[i64]| ineq_j.iter().all(|h| h.eval_int(p) >= 0);
    let inside_i = |p: &[i64]| ineq_i.iter().all(|h| h.eval_int(p) >= 0);

    let clipped = match config.dim() {
        1 => {
            let (lo_i, hi_i) = (
                config.point(hull_i.ring[0])[0],
                config.point(hull_i.ring[1])[0],
            );
            let (lo_j, hi_j) = (
                config.point(hull_j.ring[0])[0],
                config.point(hull_j.ring[1])[0],
            );
            let lo = lo_i.max(lo_j);
            let hi = hi_i.min(hi_j);
            if lo > hi {
                return Ok(());
            }
            if lo < hi {
                return Err(Error::OverlapViolation {
                    first: *i_idx,
                    second: *j_idx,
                });
            }
            vec![vec![Rat::int(lo)]]
        }
        _ => {
            let ring: Vec<Vec<Rat>> = hull_i
                .ring
                .iter()
                .map(|&l| lattice::rat_point(config.point(l)))
                .collect();
            let clipped = clip_polygon(ring, ineq_j);
            if clipped.is_empty() {
                return Ok(());
            }
            if shoelace2_rat(&clipped).abs().is_positive() {
                return Err(Error::OverlapViolation {
                    first: *i_idx,
                    second: *j_idx,
                });
            }
            clipped
        }
    };

    let on_i: Vec<usize> = mi
        .iter()
        .copied()
        .filter(|&a| inside_j(config.point(a)))
        .collect();
    let on_j: Vec<usize> = mj
        .iter()
        .copied()
        .filter(|&a| inside_i(config.point(a)))
        .collect();
    if on_i != on_j {
        return Err(Error::BadIntersection {
            first: *i_idx,
            second: *j_idx,
            reason: "tiles touch but their members on the intersection differ".into(),
        });
    }
    if on_i.is_empty() {
        return Err(Error::BadIntersection {
            first: *i_idx,
            second: *j_idx,
            reason: "tiles touch at points that are members of neither".into(),
        });
    }
    let unique: BTreeSet<&Vec<Rat>> = clipped.iter().collect();
    for u in unique {
        let hit = on_i
            .iter()
            .any(|&a| lattice::rat_point(config.point(a)) == *u);
        if !hit {
            return Err(Error::BadIntersection {
                first: *i_idx,
                second: *j_idx,
                reason: "intersection has a vertex that is not a shared member".into(),
            });
        }
    }
    Ok(())
}

/// Sutherland-Hodgman clipping of a convex ring against halfplanes, exact.
fn clip_polygon(mut poly: Vec<Vec<Rat>>, ineqs: &[FacetInequality]) -> Vec<Vec<Rat>> {
    for h in ineqs {
        if poly.is_empty() {
            return poly;
        }
        let vals: Vec<Rat> = poly.iter().map(|p| h.eval_rat(p)).collect();
        let mut out: Vec<Vec<Rat>> = Vec::new();
        for k in 0..poly.len() {
            let k2 = (k + 1) % poly.len();
            let cur_in = !vals[k].is_negative();
            let next_in = !vals[k2].is_negative();
            if cur_in {
                out.push(poly[k].clone());
            }
            if cur_in != next_in {
                let t = &vals[k] / &(&vals[k] - &vals[k2]);
                let pt: Vec<Rat> = poly[k]
                    .iter()
                    .zip(&poly[k2])
                    .map(|(p, q)| p + &(&t * &(q - p)))
                    .collect();
                out.push(pt);
            }
        }
        out.dedup();
        while out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        poly = out;
    }
    poly
}

fn shoelace2_rat(ring: &[Vec<Rat>]) -> Rat {
    if ring.len() < 3 {
        return Rat::zero();
    }
    let mut acc = Rat::zero();
    for k in 0..ring.len() {
        let p = &ring[k];
        let q = &ring[(k + 1) % ring.len()];
        acc += &(&(&p[0] * &q[1]) - &(&q[0] * &p[1]));
    }
    acc
}

/// Twice the area (or, on a line, twice the length) of a member hull.
fn measure2(config: &LatticeConfig, hull: &MemberHull) -> i128 {
    match hull.dim {
        2 => lattice::member_area2(config, hull),
        1 if config.dim() == 1 => {
            2 * (config.point(hull.ring[1])[0] as i128 - config.point(hull.ring[0])[0] as i128)
        }
        _ => 0,
    }
}

fn base_measure2(config: &LatticeConfig, ring: &[usize]) -> i128 {
    match config.dim() {
        1 => {
            let lo = config.point(ring[0])[0] as i128;
            let hi = config.point(ring[ring.len() - 1])[0] as i128;
            2 * (hi - lo).abs()
        }
        _ => {
            let mut acc: i128 = 0;
            for k in 0..ring.len() {
                let p = config.point(ring[k]);
                let q = config.point(ring[(k + 1) % ring.len()]);
                acc += p[0] as i128 * q[1] as i128 - q[0] as i128 * p[1] as i128;
            }
            acc.abs()
        }
    }
}

fn half_string(measure2: i128) -> String {
    let r = Rat::int((measure2 / 2) as i64);
    if measure2 % 2 == 0 {
        r.to_string()
    } else {
        format!("{}/2", measure2)
    }
}
