//! Weight families `t^(lambda(a)) * w_a`, piecewise control surfaces, and
//! the convergence experiments tying the two together.
//!
//! As `t` grows, the patch with the scaled weights migrates toward the
//! control surface of the decomposition induced by the lifting; the sweep
//! measures that migration as a discrete Hausdorff distance per `t` and
//! compares it against a sampling-aware threshold.

use crate::error::{Error, Result};
use crate::hausdorff::hausdorff_distance;
use crate::lattice;
use crate::parallel;
use crate::patch::PatchSpec;
use crate::sample::{dist2, sample_patch, sample_patch_grid, SampledGrid, SampledSet};
use crate::subdivision::{regular_decomposition, Decomposition, Lifting};

/// Componentwise `t^(lifting(a)) * w_a`, literally.
pub fn degeneration_weights(weights: &[f64], lifting: &Lifting, t: f64) -> Result<Vec<f64>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonpositiveT { t });
    }
    if lifting.len() != weights.len() {
        return Err(Error::MissingLiftValue {
            got: lifting.len(),
            expected: weights.len(),
        });
    }
    Ok(weights
        .iter()
        .zip(lifting.values())
        .map(|(w, l)| w * t.powf(l.to_f64()))
        .collect())
}

/// A patch together with a lifting: the one-parameter family of patches
/// obtained by scaling the weights.
#[derive(Clone, Debug)]
pub struct DegenerationFamily {
    base: PatchSpec,
    lifting: Lifting,
}

impl DegenerationFamily {
    pub fn new(base: PatchSpec, lifting: Lifting) -> Result<DegenerationFamily> {
        if lifting.len() != base.config().len() {
            return Err(Error::MissingLiftValue {
                got: lifting.len(),
                expected: base.config().len(),
            });
        }
        Ok(DegenerationFamily { base, lifting })
    }

    pub fn base(&self) -> &PatchSpec {
        &self.base
    }

    pub fn lifting(&self) -> &Lifting {
        &self.lifting
    }

    /// The literal scaled weights, as in [`degeneration_weights`].
    pub fn weights_at(&self, t: f64) -> Result<Vec<f64>> {
        degeneration_weights(self.base.weights(), &self.lifting, t)
    }

    /// The family member at `t`. The patch map is invariant under a common
    /// positive factor on the weights, so the implementation uses
    /// `t^(lifting(a) - max lifting)`: exponents stay nonpositive and no
    /// intermediate power can overflow, whatever the schedule.
    pub fn member(&self, t: f64) -> Result<PatchSpec> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::NonpositiveT { t });
        }
        let top = self
            .lifting
            .values()
            .iter()
            .max()
            .expect("nonempty lifting")
            .to_f64();
        let weights = self
            .base
            .weights()
            .iter()
            .zip(self.lifting.values())
            .map(|(w, l)| w * t.powf(l.to_f64() - top))
            .collect();
        PatchSpec::new(
            self.base.config().clone(),
            weights,
            self.base.control_points().to_vec(),
        )
    }
}

/// The piecewise patch spanned by a decomposition: one sub-patch per face,
/// continuous across shared faces because the data of a shared face is the
/// same from both sides.
#[derive(Clone, Debug)]
pub struct ControlSurface {
    decomposition: Decomposition,
    pieces: Vec<PatchSpec>,
    facet_indices: Vec<usize>,
}

/// Restrict a patch to every face of a decomposition. Works for irregular
/// decompositions too: the surface exists, only the limit statement needs
/// regularity.
pub fn control_surface(spec: &PatchSpec, deco: &Decomposition) -> Result<ControlSurface> {
    deco.guard(spec.config())?;
    let mut pieces = Vec::with_capacity(deco.faces().len());
    let mut facet_indices = Vec::new();
    for (k, face) in deco.faces().iter().enumerate() {
        let piece = spec
            .restrict(&face.members)
            .map_err(|_| Error::FaceNotSubset { face: k })?;
        if face.dimension == deco.dim() {
            facet_indices.push(k);
        }
        pieces.push(piece);
    }
    Ok(ControlSurface {
        decomposition: deco.clone(),
        pieces,
        facet_indices,
    })
}

impl ControlSurface {
    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    /// Sub-patches aligned with `decomposition().faces()`.
    pub fn pieces(&self) -> &[PatchSpec] {
        &self.pieces
    }

    /// The full-dimensional pieces, with their face indices.
    pub fn facet_pieces(&self) -> impl Iterator<Item = (usize, &PatchSpec)> {
        self.facet_indices.iter().map(move |&k| (k, &self.pieces[k]))
    }

    /// Grid samples of every facet piece; lower faces are covered by the
    /// facet closures, so this is the whole surface as a point set.
    pub fn sample_grids(&self, m: usize) -> Result<Vec<(usize, SampledGrid)>> {
        self.facet_pieces()
            .map(|(k, piece)| Ok((k, sample_patch_grid(piece, m)?)))
            .collect()
    }

    pub fn sample(&self, m: usize) -> Result<SampledSet> {
        let parts = self
            .sample_grids(m)?
            .into_iter()
            .map(|(_, grid)| crate::sample::flatten(&grid, m));
        Ok(SampledSet::merge(parts))
    }

    /// Largest control-point diameter of any facet piece: an upper bound
    /// for the image diameter of any piece, used to scale thresholds.
    pub fn max_piece_diameter(&self) -> f64 {
        let mut worst = 0.0f64;
        for (_, piece) in self.facet_pieces() {
            let pts = piece.control_points();
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    worst = worst.max(dist2(&pts[i], &pts[j]));
                }
            }
        }
        worst.sqrt()
    }
}

/// One measured sweep entry.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub hausdorff: f64,
    pub sampling_pitch: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Sweep rows in increasing `t`, plus the shared threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub threshold: f64,
}

impl SweepReport {
    /// Re-judge every row against `scale * threshold`.
    pub fn apply_tolerance_scale(&mut self, scale: f64) {
        self.threshold *= scale;
        for row in &mut self.rows {
            row.threshold = self.threshold;
            row.pass = row.hausdorff < self.threshold;
        }
    }

    /// The convergence criterion: the distance column is nonincreasing
    /// after its first entry (single-step noise up to a tenth of the
    /// threshold is tolerated) and the final entry is below the threshold.
    pub fn converged(&self) -> bool {
        let noise = self.threshold / 10.0;
        let monotone = self
            .rows
            .windows(2)
            .all(|w| w[1].hausdorff <= w[0].hausdorff + noise);
        monotone && self.rows.last().map_or(false, |r| r.pass)
    }
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    let increasing = schedule.windows(2).all(|w| w[0] < w[1]);
    if schedule.is_empty() || !increasing || schedule.iter().any(|t| !(*t >= 1.0)) {
        return Err(Error::BadSchedule);
    }
    Ok(())
}

/// Per facet `F` of the induced decomposition, the exponent vector
/// `lifting(a) - l_F(a)`, where `l_F` is the affine function supporting the
/// lifted facet: zero on the members of `F`, negative elsewhere.
fn facet_exponents(family: &DegenerationFamily) -> Result<Vec<Vec<f64>>> {
    let config = family.base.config();
    let lifted = lattice::lift(config, family.lifting.values())?;
    let values = family.lifting.values();
    Ok(lifted
        .upper_faces
        .iter()
        .map(|face| {
            (0..config.len())
                .map(|a| (&values[a] - &face.affine.eval_int(config.point(a))).to_f64())
                .collect()
        })
        .collect())
}

/// Grid samples of the member at `t`, taken once per facet of the induced
/// decomposition with the weights `w_a * t^(lifting(a) - l_F(a))`.
///
/// Scaling the weights by a character `a -> s^a` (here `s = t^(-v)` for the
/// linear part `v` of `l_F`) reparametrizes the patch without changing its
/// image, so every point sampled here lies on the image of the member at
/// `t`. The plain parametrization concentrates everything except the
/// top-lifted labels into parameter boundary layers of width about `1/t`,
/// which no fixed grid resolves; the translate adapted to `F` traces the
/// part of the image near the piece of `F` uniformly in `t` instead.
fn sample_member_translates(
    family: &DegenerationFamily,
    exponents: &[Vec<f64>],
    t: f64,
    m: usize,
) -> Result<SampledSet> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonpositiveT { t });
    }
    let parts: Vec<Result<SampledSet>> = exponents
        .iter()
        .map(|exps| {
            let weights: Vec<f64> = family
                .base
                .weights()
                .iter()
                .zip(exps)
                .map(|(w, e)| w * t.powf(*e))
                .collect();
            let translate = PatchSpec::new(
                family.base.config().clone(),
                weights,
                family.base.control_points().to_vec(),
            )?;
            sample_patch(&translate, m)
        })
        .collect();
    let parts: Vec<SampledSet> = parts.into_iter().collect::<Result<_>>()?;
    Ok(SampledSet::merge(parts))
}

/// Hausdorff distance from the family member at each scheduled `t` to the
/// control surface of the decomposition induced by the lifting.
///
/// The member is sampled through [`sample_member_translates`], so that
/// every facet's share of the image is resolved at all `t`. The threshold
/// is `3 * (max facet piece diameter) / m`: three sampling pitches of the
/// coarsest piece, the resolution below which the discrete distance is
/// dominated by discretization rather than geometry.
pub fn convergence_sweep(
    spec: &PatchSpec,
    lifting: &Lifting,
    schedule: &[f64],
    m: usize,
) -> Result<SweepReport> {
    check_schedule(schedule)?;
    if m < 2 {
        return Err(Error::BadResolution { m });
    }
    let deco = regular_decomposition(spec.config(), lifting)?;
    let surface = control_surface(spec, &deco)?;
    let target = surface.sample(m)?;
    let threshold = 3.0 * surface.max_piece_diameter() / m as f64;
    let family = DegenerationFamily::new(spec.clone(), lifting.clone())?;
    let exponents = facet_exponents(&family)?;
    let rows: Vec<Result<SweepRow>> = parallel::map_slice(schedule, |&t| {
        let moving = sample_member_translates(&family, &exponents, t, m)?;
        let hausdorff = hausdorff_distance(&moving, &target)?;
        let sampling_pitch = moving.pitch.max(target.pitch);
        Ok(SweepRow {
            t,
            hausdorff,
            sampling_pitch,
            threshold,
            pass: hausdorff < threshold,
        })
    });
    let rows: Vec<SweepRow> = rows.into_iter().collect::<Result<_>>()?;
    Ok(SweepReport { rows, threshold })
}

/// Distance table from the scheduled family members to an arbitrary fixed
/// surface (not necessarily the one induced by the lifting). Used to show
/// that the family does NOT approach surfaces of irregular decompositions.
pub fn distance_sweep(
    spec: &PatchSpec,
    lifting: &Lifting,
    schedule: &[f64],
    m: usize,
    target: &ControlSurface,
) -> Result<Vec<(f64, f64)>> {
    check_schedule(schedule)?;
    let target = target.sample(m)?;
    let family = DegenerationFamily::new(spec.clone(), lifting.clone())?;
    let exponents = facet_exponents(&family)?;
    let rows: Vec<Result<(f64, f64)>> = parallel::map_slice(schedule, |&t| {
        let moving = sample_member_translates(&family, &exponents, t, m)?;
        Ok((t, hausdorff_distance(&moving, &target)?))
    });
    rows.into_iter().collect()
}

/// Mass the lifted simplex points retain outside the decomposition:
/// `pair_mass` is the largest `min(z_a, z_b)` over label pairs sharing no
/// face, `solo_mass` the largest `z_c` over labels on no face. `None`
/// where the exclusion set is empty. Both tend to zero as `t` grows.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportDecay {
    pub pair_mass: Option<f64>,
    pub solo_mass: Option<f64>,
}

pub fn support_decay_probe(
    spec: &PatchSpec,
    lifting: &Lifting,
    t: f64,
    samples: &[Vec<f64>],
) -> Result<SupportDecay> {
    let deco = regular_decomposition(spec.config(), lifting)?;
    let n = spec.config().len();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !deco.share_face(a, b) {
                pairs.push((a, b));
            }
        }
    }
    let solos = deco.no_face_labels();
    let family = DegenerationFamily::new(spec.clone(), lifting.clone())?;
    let member = family.member(t)?;
    let mut pair_mass = if pairs.is_empty() { None } else { Some(0.0f64) };
    let mut solo_mass = if solos.is_empty() { None } else { Some(0.0f64) };
    for x in samples {
        let beta = member.basis_rat(&to_rat(x)?)?;
        let weights = member.weights();
        let total: f64 = beta.iter().zip(weights).map(|(b, w)| b * w).sum();
        let z: Vec<f64> = beta
            .iter()
            .zip(weights)
            .map(|(b, w)| b * w / total)
            .collect();
        if let Some(mass) = pair_mass.as_mut() {
            for &(a, b) in &pairs {
                *mass = mass.max(z[a].min(z[b]));
            }
        }
        if let Some(mass) = solo_mass.as_mut() {
            for &c in &solos {
                *mass = mass.max(z[c]);
            }
        }
    }
    Ok(SupportDecay {
        pair_mass,
        solo_mass,
    })
}

fn to_rat(x: &[f64]) -> Result<Vec<crate::rat::Rat>> {
    x.iter()
        .map(|&v| crate::rat::Rat::from_f64(v).ok_or(Error::OutsideDomain))
        .collect()
}
