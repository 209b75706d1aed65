//! The two top-level decision procedures, built on the counting machinery:
//! classify a curve as a pseudo-lemniscate of f (or not), and test whether
//! the image f(S) can possibly be a Jordan curve.
//!
//! Classification cross-checks two independent characterizations. The
//! sampled preimage counts must read (n-, n+) on the two faces of Gamma
//! with min(n-, n+) on Gamma itself, and the direct image check — f(S)
//! within `containment_tol` of Gamma, no critical points on S — must agree
//! with that reading. A count mismatch alone is decisive (constant face
//! counts need nothing beyond the argument principle), but a
//! pseudo-lemniscate verdict additionally requires the direct check, so
//! numerical disagreement between the two surfaces as `Indeterminate`
//! rather than silently trusting either side.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::ComplexValue;
use crate::config::ToleranceConfig;
use crate::counting::{self, PreimageCountReport};
use crate::error::{Error, Result};
use crate::expr::FunctionDef;
use crate::geometry::{JordanCurve, Location};
use crate::locator::{critical_points_on_curve, ZeroPoleRecord};

/// Attempt budget for rejection sampling before giving up on a face.
const MAX_DRAWS: usize = 20_000;
/// How many times a boundary sample slides along Gamma looking for a spot
/// where the winding count is trustworthy, before falling back to direct
/// subdivision counting.
const SLIDE_RETRIES: usize = 32;

/// How many sample points to draw on each face of Gamma and on Gamma
/// itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplePlan {
    pub k_inner: usize,
    pub k_outer: usize,
    pub k_boundary: usize,
    /// Seed for the face-sampling RNG.
    pub seed: u64,
    /// Parameter step a boundary sample slides along Gamma when it sits
    /// too close to f(S) for a trustworthy winding number.
    pub boundary_slide: f64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            k_inner: 8,
            k_outer: 8,
            k_boundary: 8,
            seed: 0,
            // 32 retries at this step cover most of the curve without ever
            // resonating with the even sample spacing.
            boundary_slide: 0.029,
        }
    }
}

impl SamplePlan {
    pub fn validate(&self) -> Result<()> {
        let ks = [
            ("k_inner", self.k_inner),
            ("k_outer", self.k_outer),
            ("k_boundary", self.k_boundary),
        ];
        for (name, k) in ks {
            if k < 3 {
                return Err(Error::Config(format!(
                    "{name} must be at least 3 to witness a constant count, got {k}"
                )));
            }
        }
        if !(self.boundary_slide.is_finite() && self.boundary_slide > 0.0) {
            return Err(Error::Config(format!(
                "boundary_slide must be positive and finite, got {}",
                self.boundary_slide
            )));
        }
        Ok(())
    }
}

/// Which region of the target curve a sample point was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Face {
    Inner,
    Outer,
    Boundary,
}

/// One counted sample point, tagged with the face it was drawn from.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FaceSample {
    pub face: Face,
    #[serde(flatten)]
    pub report: PreimageCountReport,
}

/// A value together with its preimage count, quoted in verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountWitness {
    pub w: ComplexValue,
    pub count: u32,
}

/// A counted sample quoted in classification verdicts, which also need to
/// say which face the sample came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FaceWitness {
    pub face: Face,
    pub w: ComplexValue,
    pub count: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// Counts read n- inside Gamma, n+ outside (including infinity), and
    /// min(n-, n+) on Gamma, and the direct image check concurs.
    PseudoLemniscate { n_minus: u32, n_plus: u32 },
    /// Two samples whose counts are incompatible with any pseudo-lemniscate:
    /// either the same face disagreeing with itself, or a boundary point
    /// off the min of the two face counts.
    NotPseudoLemniscate {
        witness_pair: (FaceWitness, FaceWitness),
    },
    /// The count reading and the direct image check contradict each other,
    /// so neither can be trusted.
    Indeterminate { reason: String },
}

/// Direct test of the definition: does f map the sampled curve into Gamma,
/// and is f' zero-free on it?
#[derive(Clone, Debug, Serialize)]
pub struct ImageCheck {
    /// max over the samples of S of dist(f(z), Gamma); infinite when f
    /// blows up on the curve.
    pub max_image_distance: f64,
    pub critical_points_on_curve: Vec<ZeroPoleRecord>,
    /// Set when the critical-point search itself failed.
    pub error: Option<String>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub image_check: ImageCheck,
    pub samples: Vec<FaceSample>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonJordanVerdict {
    /// Three pairwise-distinct counts with f' zero-free on S: no Jordan
    /// curve has three faces, and a non-critical image can only split the
    /// plane into regions of two count values, so f(S) is not Jordan.
    ImageNotJordan { witnesses: Vec<CountWitness> },
    /// f' vanishes on S itself, which already rules the curve out as a
    /// pseudo-lemniscate and explains any count pattern.
    CriticalPointOnCurve { points: Vec<ZeroPoleRecord> },
    /// Three distinct counts were found but the critical-point search
    /// failed, so the two explanations cannot be told apart.
    DisjunctionUnresolved {
        witnesses: Vec<CountWitness>,
        error: String,
    },
    /// Fewer than three distinct counts: the candidates prove nothing
    /// either way.
    Inconclusive { counts_seen: Vec<u32> },
}

#[derive(Clone, Debug, Serialize)]
pub struct NonJordanReport {
    pub verdict: NonJordanVerdict,
    /// Candidates skipped because they hug f(S) too closely to count.
    pub skipped: Vec<ComplexValue>,
    /// Every candidate that produced a count, in input order.
    pub counts: Vec<CountWitness>,
}

/// Draw `plan.k_inner` points inside Gamma, `plan.k_outer` finite points
/// outside it plus one far point and the point at infinity, and
/// `plan.k_boundary` points on Gamma itself. Deterministic in `plan.seed`.
pub fn sample_faces(
    gamma: &JordanCurve,
    plan: &SamplePlan,
    cfg: &ToleranceConfig,
) -> Result<(Vec<ComplexValue>, Vec<ComplexValue>, Vec<ComplexValue>)> {
    let (inner, outer, ts) = faces_with_boundary_params(gamma, plan, cfg)?;
    let boundary = ts
        .iter()
        .map(|t| ComplexValue::Finite(gamma.point_at(*t)))
        .collect();
    Ok((inner, outer, boundary))
}

/// Same as `sample_faces`, but boundary points come back as curve
/// parameters so the classifier can slide them along Gamma.
fn faces_with_boundary_params(
    gamma: &JordanCurve,
    plan: &SamplePlan,
    cfg: &ToleranceConfig,
) -> Result<(Vec<ComplexValue>, Vec<ComplexValue>, Vec<f64>)> {
    plan.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let bbox = gamma.bbox();
    let center = 0.5 * (bbox.lo + bbox.hi);
    let (w, h) = (bbox.hi.re - bbox.lo.re, bbox.hi.im - bbox.lo.im);

    let mut inner = Vec::with_capacity(plan.k_inner);
    let mut draws = 0usize;
    while inner.len() < plan.k_inner {
        draws += 1;
        if draws > MAX_DRAWS {
            return Err(Error::Geometry(format!(
                "drew {MAX_DRAWS} bounding-box points without finding {} \
                 interior points of the target curve",
                plan.k_inner
            )));
        }
        let z = Complex64::new(
            bbox.lo.re + rng.gen::<f64>() * w,
            bbox.lo.im + rng.gen::<f64>() * h,
        );
        if gamma.locate_point(z, cfg)?.location == Location::Inside {
            inner.push(ComplexValue::Finite(z));
        }
    }

    // Finite outer points: all but one drawn from a box twice the size of
    // the bounding box (so they stay near the curve, where a count error
    // would actually hide), plus one far point. Infinity is always
    // appended: the unbounded face contains it whether or not any finite
    // draw represents it well.
    let mut outer = Vec::with_capacity(plan.k_outer + 1);
    let mut draws = 0usize;
    while outer.len() + 1 < plan.k_outer {
        draws += 1;
        if draws > MAX_DRAWS {
            return Err(Error::Geometry(format!(
                "drew {MAX_DRAWS} points without finding {} exterior points \
                 of the target curve",
                plan.k_outer - 1
            )));
        }
        let z = center
            + Complex64::new(
                (rng.gen::<f64>() - 0.5) * 2.0 * w,
                (rng.gen::<f64>() - 0.5) * 2.0 * h,
            );
        if gamma.locate_point(z, cfg)?.location == Location::Outside {
            outer.push(ComplexValue::Finite(z));
        }
    }
    let far = center + Complex64::new(3.0 * gamma.diameter(), 0.0);
    if gamma.locate_point(far, cfg)?.location != Location::Outside {
        return Err(Error::Geometry(format!(
            "point {far} at three diameters from the curve is not outside it"
        )));
    }
    outer.push(ComplexValue::Finite(far));
    outer.push(ComplexValue::Infinity);

    let ts = (0..plan.k_boundary).map(|_| rng.gen::<f64>()).collect();
    Ok((inner, outer, ts))
}

enum PlannedPoint {
    Free(ComplexValue),
    OnCurve(f64),
}

/// Decide whether S is a pseudo-lemniscate of f with respect to Gamma: a
/// full connected component of the preimage f^-1(Gamma).
pub fn classify(
    f: &FunctionDef,
    s: &JordanCurve,
    gamma: &JordanCurve,
    plan: &SamplePlan,
    cfg: &ToleranceConfig,
) -> Result<ClassificationReport> {
    cfg.validate()?;
    let s = s.normalize();
    let gamma = gamma.normalize();
    let (inner, outer, boundary_ts) = faces_with_boundary_params(&gamma, plan, cfg)?;

    let image = counting::sample_image(f, &s)?;
    let poles_inside = counting::count_poles_in(f, &s, cfg)?;

    let jobs: Vec<(Face, PlannedPoint)> = inner
        .iter()
        .map(|w| (Face::Inner, PlannedPoint::Free(*w)))
        .chain(outer.iter().map(|w| (Face::Outer, PlannedPoint::Free(*w))))
        .chain(
            boundary_ts
                .iter()
                .map(|t| (Face::Boundary, PlannedPoint::OnCurve(*t))),
        )
        .collect();
    let samples: Vec<FaceSample> = jobs
        .par_iter()
        .map(|(face, planned)| {
            let report = match planned {
                PlannedPoint::Free(w) => {
                    counting::count_at(f, &s, w, &image, poles_inside, cfg, true)?
                }
                PlannedPoint::OnCurve(t) => {
                    boundary_count(f, &s, &gamma, *t, plan, &image, poles_inside, cfg)?
                }
            };
            Ok(FaceSample {
                face: *face,
                report,
            })
        })
        .collect::<Result<_>>()?;

    let image_check = direct_image_check(f, &s, &gamma, cfg);
    let counts = read_counts(&samples);
    let verdict = join_verdicts(counts, &image_check);
    Ok(ClassificationReport {
        verdict,
        image_check,
        samples,
    })
}

/// Count preimages of a point on Gamma itself. The winding number is
/// useless wherever f(S) hugs Gamma — which is everywhere, on a genuine
/// pseudo-lemniscate — so slide along the curve looking for an admissible
/// spot and, failing that, count solutions of f = w inside S directly.
#[allow(clippy::too_many_arguments)]
fn boundary_count(
    f: &FunctionDef,
    s: &JordanCurve,
    gamma: &JordanCurve,
    t0: f64,
    plan: &SamplePlan,
    image: &counting::ImageSamples,
    poles_inside: u32,
    cfg: &ToleranceConfig,
) -> Result<PreimageCountReport> {
    for attempt in 0..=SLIDE_RETRIES {
        let w = ComplexValue::Finite(gamma.point_at(t0 + attempt as f64 * plan.boundary_slide));
        match counting::count_at(f, s, &w, image, poles_inside, cfg, false) {
            Err(Error::TooCloseToImage { .. }) => continue,
            other => return other,
        }
    }
    let w = ComplexValue::Finite(gamma.point_at(t0));
    counting::count_at(f, s, &w, image, poles_inside, cfg, true).map_err(|e| {
        Error::Indeterminate(format!(
            "no admissible boundary sample near t = {t0:.4} after {SLIDE_RETRIES} slides, \
             and the direct count failed there: {e}"
        ))
    })
}

fn direct_image_check(
    f: &FunctionDef,
    s: &JordanCurve,
    gamma: &JordanCurve,
    cfg: &ToleranceConfig,
) -> ImageCheck {
    let mut max_image_distance = 0.0f64;
    for (_, z) in s.samples() {
        let d = match f.eval_c64(*z) {
            Ok(ComplexValue::Finite(w)) => gamma.distance_to(w),
            _ => f64::INFINITY,
        };
        max_image_distance = max_image_distance.max(d);
    }
    let band = (cfg.boundary_band * s.diameter()).max(100.0 * cfg.newton_tol);
    let (critical_points_on_curve, error) = match critical_points_on_curve(f, s, band, cfg) {
        Ok(points) => (points, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let holds =
        max_image_distance <= cfg.containment_tol && error.is_none() && critical_points_on_curve.is_empty();
    ImageCheck {
        max_image_distance,
        critical_points_on_curve,
        error,
        holds,
    }
}

enum CountReading {
    Consistent { n_minus: u32, n_plus: u32 },
    Mismatch(FaceWitness, FaceWitness),
}

fn witness(s: &FaceSample) -> FaceWitness {
    FaceWitness {
        face: s.face,
        w: s.report.w,
        count: s.report.count,
    }
}

fn read_counts(samples: &[FaceSample]) -> CountReading {
    let of_face = |face: Face| samples.iter().filter(move |s| s.face == face);
    // Face sampling guarantees at least three points per face, so the
    // unwraps cannot fire.
    let inner0 = of_face(Face::Inner).next().unwrap();
    let outer0 = of_face(Face::Outer).next().unwrap();
    for face in [Face::Inner, Face::Outer] {
        let first = of_face(face).next().unwrap();
        if let Some(bad) = of_face(face).find(|s| s.report.count != first.report.count) {
            return CountReading::Mismatch(witness(first), witness(bad));
        }
    }
    let (n_minus, n_plus) = (inner0.report.count, outer0.report.count);
    let reference = if n_minus <= n_plus { inner0 } else { outer0 };
    let expected = n_minus.min(n_plus);
    if let Some(bad) = of_face(Face::Boundary).find(|s| s.report.count != expected) {
        return CountReading::Mismatch(witness(reference), witness(bad));
    }
    CountReading::Consistent { n_minus, n_plus }
}

fn join_verdicts(counts: CountReading, check: &ImageCheck) -> Verdict {
    match counts {
        CountReading::Consistent { n_minus, n_plus } if check.holds => {
            Verdict::PseudoLemniscate { n_minus, n_plus }
        }
        CountReading::Consistent { n_minus, n_plus } => Verdict::Indeterminate {
            reason: format!(
                "counts read n- = {n_minus}, n+ = {n_plus} like a pseudo-lemniscate, but the \
                 direct image check does not confirm it: max dist(f(S), Gamma) = {:.3e}, \
                 {} critical points on S{}",
                check.max_image_distance,
                check.critical_points_on_curve.len(),
                check
                    .error
                    .as_deref()
                    .map(|e| format!(", critical-point search failed: {e}"))
                    .unwrap_or_default()
            ),
        },
        // A count mismatch is decisive on its own: a pseudo-lemniscate has
        // constant counts per face by the argument principle, no matter
        // what the derivative does. Only a *passing* image check
        // contradicts it.
        CountReading::Mismatch(a, b) if !check.holds => Verdict::NotPseudoLemniscate {
            witness_pair: (a, b),
        },
        CountReading::Mismatch(a, b) => Verdict::Indeterminate {
            reason: format!(
                "f(S) stays within {:.3e} of Gamma with no critical points on S, yet \
                 counts disagree: {:?} on the {:?} face vs {:?} on the {:?} face",
                check.max_image_distance,
                a.count,
                a.face,
                b.count,
                b.face
            ),
        },
    }
}

/// Test whether f(S) can be a Jordan curve at all. Three candidate values
/// of w with pairwise-distinct counts N_f(w) mean the image has at least
/// three faces — impossible for a Jordan curve — unless a critical point
/// on S explains the counts instead.
pub fn non_jordan_test(
    f: &FunctionDef,
    s: &JordanCurve,
    candidates: &[ComplexValue],
    cfg: &ToleranceConfig,
) -> Result<NonJordanReport> {
    if candidates.len() < 3 {
        return Err(Error::Config(format!(
            "the non-Jordan test needs at least 3 candidate values, got {}",
            candidates.len()
        )));
    }
    cfg.validate()?;
    let s = s.normalize();
    let image = counting::sample_image(f, &s)?;
    let poles_inside = counting::count_poles_in(f, &s, cfg)?;

    let results: Vec<(ComplexValue, Result<PreimageCountReport>)> = candidates
        .par_iter()
        .map(|w| {
            (
                *w,
                counting::count_at(f, &s, w, &image, poles_inside, cfg, false),
            )
        })
        .collect();
    let mut counts = Vec::new();
    let mut skipped = Vec::new();
    for (w, result) in results {
        match result {
            Ok(report) => counts.push(CountWitness {
                w,
                count: report.count,
            }),
            Err(Error::TooCloseToImage { .. }) => skipped.push(w),
            Err(e) => return Err(e),
        }
    }

    // First witness of each distinct count, in input order, capped at 3.
    let mut witnesses: Vec<CountWitness> = Vec::new();
    for c in &counts {
        if witnesses.len() == 3 {
            break;
        }
        if !witnesses.iter().any(|p| p.count == c.count) {
            witnesses.push(*c);
        }
    }
    let mut counts_seen: Vec<u32> = witnesses.iter().map(|c| c.count).collect();
    counts_seen.sort_unstable();

    let band = (cfg.boundary_band * s.diameter()).max(100.0 * cfg.newton_tol);
    let verdict = if witnesses.len() >= 3 {
        match critical_points_on_curve(f, &s, band, cfg) {
            Ok(points) if points.is_empty() => NonJordanVerdict::ImageNotJordan { witnesses },
            Ok(points) => NonJordanVerdict::CriticalPointOnCurve { points },
            Err(e) => NonJordanVerdict::DisjunctionUnresolved {
                witnesses,
                error: e.to_string(),
            },
        }
    } else {
        // Too few distinct counts to force the disjunction, but a critical
        // point on S is disqualifying all by itself when one shows up.
        match critical_points_on_curve(f, &s, band, cfg) {
            Ok(points) if !points.is_empty() => NonJordanVerdict::CriticalPointOnCurve { points },
            _ => NonJordanVerdict::Inconclusive { counts_seen },
        }
    };
    Ok(NonJordanReport {
        verdict,
        skipped,
        counts,
    })
}

/// Default candidate values for the non-Jordan test: a jittered n-point
/// grid over the (padded) bounding box of f(S), plus infinity.
pub fn default_candidates(
    f: &FunctionDef,
    s: &JordanCurve,
    n: usize,
    seed: u64,
) -> Result<Vec<ComplexValue>> {
    if n < 3 {
        return Err(Error::Config(format!(
            "the candidate grid needs at least 3 points, got {n}"
        )));
    }
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (_, z) in s.samples() {
        if let Ok(ComplexValue::Finite(w)) = f.eval_c64(*z) {
            lo = Complex64::new(lo.re.min(w.re), lo.im.min(w.im));
            hi = Complex64::new(hi.re.max(w.re), hi.im.max(w.im));
        }
    }
    if !(lo.re.is_finite() && hi.re.is_finite()) {
        return Err(Error::Geometry(
            "the image of the curve has no finite samples to build a candidate grid from".into(),
        ));
    }
    // Pad so the grid spills outside the image hull, and fatten boxes that
    // are degenerate because the image is a point or a line segment.
    let span = (hi - lo).norm().max(1e-3 * (1.0 + lo.norm() + hi.norm()));
    let pad = 0.2 * span;
    lo -= Complex64::new(pad, pad);
    hi += Complex64::new(pad, pad);

    let g = (n as f64).sqrt().ceil() as usize;
    let (cw, ch) = (
        (hi.re - lo.re) / g as f64,
        (hi.im - lo.im) / g as f64,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n + 1);
    'grid: for j in 0..g {
        for i in 0..g {
            if out.len() == n {
                break 'grid;
            }
            let z = Complex64::new(
                lo.re + (i as f64 + 0.5 + 0.5 * (rng.gen::<f64>() - 0.5)) * cw,
                lo.im + (j as f64 + 0.5 + 0.5 * (rng.gen::<f64>() - 0.5)) * ch,
            );
            out.push(ComplexValue::Finite(z));
        }
    }
    out.push(ComplexValue::Infinity);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::BlaschkeProduct;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_circle() -> JordanCurve {
        JordanCurve::circle(c(0.0, 0.0), 1.0, 256).unwrap()
    }

    fn counts_of(report: &ClassificationReport, face: Face) -> Vec<u32> {
        report
            .samples
            .iter()
            .filter(|s| s.face == face)
            .map(|s| s.report.count)
            .collect()
    }

    #[test]
    fn sample_plan_rejects_tiny_sample_counts() {
        let plan = SamplePlan {
            k_inner: 2,
            ..SamplePlan::default()
        };
        assert!(matches!(plan.validate(), Err(Error::Config(_))));
        let gamma = unit_circle();
        let cfg = ToleranceConfig::default();
        assert!(matches!(
            sample_faces(&gamma, &plan, &cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn face_samples_land_in_their_faces() {
        let gamma = unit_circle();
        let plan = SamplePlan {
            k_inner: 3,
            k_outer: 3,
            k_boundary: 3,
            seed: 7,
            ..SamplePlan::default()
        };
        let cfg = ToleranceConfig::default();
        let (inner, outer, boundary) = sample_faces(&gamma, &plan, &cfg).unwrap();

        assert_eq!(inner.len(), 3);
        for w in &inner {
            assert!(w.as_finite().unwrap().norm() < 1.0);
        }
        assert_eq!(outer.len(), 4);
        assert_eq!(outer[3], ComplexValue::Infinity);
        for w in &outer[..3] {
            assert!(w.as_finite().unwrap().norm() > 1.0);
        }
        assert_eq!(boundary.len(), 3);
        for w in &boundary {
            assert!((w.as_finite().unwrap().norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn face_sampling_is_deterministic() {
        let gamma = unit_circle();
        let plan = SamplePlan::default();
        let cfg = ToleranceConfig::default();
        let a = sample_faces(&gamma, &plan, &cfg).unwrap();
        let b = sample_faces(&gamma, &plan, &cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn blaschke_pair_is_a_pseudo_lemniscate() {
        let b = BlaschkeProduct::build(vec![c(0.0, 0.0), c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        let f = b.to_function_def();
        let circle = unit_circle();
        let report = classify(
            &f,
            &circle,
            &circle,
            &SamplePlan::default(),
            &ToleranceConfig::default(),
        )
        .unwrap();
        assert_eq!(
            report.verdict,
            Verdict::PseudoLemniscate {
                n_minus: 2,
                n_plus: 0
            }
        );
        assert!(counts_of(&report, Face::Boundary).iter().all(|&n| n == 0));
        assert!(report.image_check.holds);
        assert!(report.image_check.max_image_distance < 1e-9);
    }

    #[test]
    fn reciprocal_swaps_the_face_counts() {
        let f = FunctionDef::parse("1/z").unwrap();
        let circle = unit_circle();
        let report = classify(
            &f,
            &circle,
            &circle,
            &SamplePlan::default(),
            &ToleranceConfig::default(),
        )
        .unwrap();
        assert_eq!(
            report.verdict,
            Verdict::PseudoLemniscate {
                n_minus: 0,
                n_plus: 1
            }
        );
        assert!(counts_of(&report, Face::Boundary).iter().all(|&n| n == 0));
    }

    // f = z^2 (1 - az)/(z - a) is unimodular on the unit circle with two
    // zeros and one pole inside it. Its critical points are the roots of
    // 2az^2 - (1 + 3a^2)z + 2a, a reciprocal pair; for a < 1/3 they are
    // real and off the circle, so the circle is a genuine pseudo-lemniscate
    // with counts (2, 1) and min(2, 1) = 1 on the boundary.
    #[test]
    fn mixed_degree_ratio_keeps_the_minimum_on_the_boundary() {
        let f = FunctionDef::parse("z^2 * (1 - 0.25*z) / (z - 0.25)").unwrap();
        let circle = unit_circle();
        let report = classify(
            &f,
            &circle,
            &circle,
            &SamplePlan::default(),
            &ToleranceConfig::default(),
        )
        .unwrap();
        assert_eq!(
            report.verdict,
            Verdict::PseudoLemniscate {
                n_minus: 2,
                n_plus: 1
            }
        );
        assert!(counts_of(&report, Face::Boundary).iter().all(|&n| n == 1));
    }

    // For 1/3 < a < 1 the critical pair of the same family sits exactly on
    // the unit circle (conjugate roots with product 1), the circle map
    // folds, and the boundary count drops to 0 on the fold arc: at a = 0.5
    // the preimages of w = 1 are 1 and exp(±i pi/3), all on the circle.
    // The classifier must refuse the pseudo-lemniscate label and the image
    // check must pin the critical points to the curve.
    #[test]
    fn critical_points_on_the_curve_break_the_min_rule() {
        let f = FunctionDef::parse("z^2 * (1 - 0.5*z) / (z - 0.5)").unwrap();
        let circle = unit_circle();
        let report = classify(
            &f,
            &circle,
            &circle,
            &SamplePlan::default(),
            &ToleranceConfig::default(),
        )
        .unwrap();
        assert!(matches!(
            report.verdict,
            Verdict::NotPseudoLemniscate { .. }
        ));
        assert!(!report.image_check.holds);
        // f(S) really does lie on Gamma; only the critical points disqualify.
        assert!(report.image_check.max_image_distance < 1e-9);
        let crit = &report.image_check.critical_points_on_curve;
        assert_eq!(crit.len(), 2);
        for p in crit {
            assert!((p.location.norm() - 1.0).abs() < 1e-6);
            assert!((p.location.re - 0.875).abs() < 1e-6);
        }
    }

    #[test]
    fn off_curve_image_is_rejected() {
        let f = FunctionDef::parse("z").unwrap();
        let s = unit_circle();
        let gamma = JordanCurve::circle(c(1.2, 0.0), 1.0, 256).unwrap();
        let report = classify(
            &f,
            &s,
            &gamma,
            &SamplePlan::default(),
            &ToleranceConfig::default(),
        )
        .unwrap();
        assert!(matches!(
            report.verdict,
            Verdict::NotPseudoLemniscate { .. }
        ));
        assert!(!report.image_check.holds);
        assert!(report.image_check.max_image_distance > 1.0);
    }

    #[test]
    fn classification_is_deterministic() {
        let f = FunctionDef::parse("1/z").unwrap();
        let circle = unit_circle();
        let plan = SamplePlan::default();
        let cfg = ToleranceConfig::default();
        let a = classify(&f, &circle, &circle, &plan, &cfg).unwrap();
        let b = classify(&f, &circle, &circle, &plan, &cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn non_jordan_test_needs_three_candidates() {
        let f = FunctionDef::parse("z").unwrap();
        let result = non_jordan_test(
            &f,
            &unit_circle(),
            &[ComplexValue::Finite(c(0.0, 0.0)), ComplexValue::Infinity],
            &ToleranceConfig::default(),
        );
        assert!(matches!(result, Err(Error::Config(_))));
    }

    #[test]
    fn identity_counts_alone_are_inconclusive() {
        let f = FunctionDef::parse("z").unwrap();
        let candidates = [
            ComplexValue::Finite(c(0.0, 0.0)),
            ComplexValue::Finite(c(0.5, 0.0)),
            ComplexValue::Finite(c(2.0, 0.0)),
        ];
        let report =
            non_jordan_test(&f, &unit_circle(), &candidates, &ToleranceConfig::default()).unwrap();
        match &report.verdict {
            NonJordanVerdict::Inconclusive { counts_seen } => {
                assert_eq!(counts_seen, &[0, 1]);
            }
            other => panic!("expected Inconclusive, got {other:?}"),
        }
        assert!(report.skipped.is_empty());
        assert_eq!(report.counts.len(), 3);
    }

    #[test]
    fn critical_point_on_the_curve_is_reported() {
        let f = FunctionDef::parse("z^2").unwrap();
        let s = JordanCurve::circle(c(0.5, 0.0), 0.5, 256).unwrap();
        let candidates = [
            ComplexValue::Finite(c(-0.1, 0.0)),
            ComplexValue::Finite(c(0.25, 0.0)),
            ComplexValue::Finite(c(0.2, 0.0)),
        ];
        let report = non_jordan_test(&f, &s, &candidates, &ToleranceConfig::default()).unwrap();
        match &report.verdict {
            NonJordanVerdict::CriticalPointOnCurve { points } => {
                assert_eq!(points.len(), 1);
                assert!(points[0].location.norm() < 1e-6);
            }
            other => panic!("expected CriticalPointOnCurve, got {other:?}"),
        }
    }

    #[test]
    fn exponential_image_fails_the_jordan_test() {
        let f = FunctionDef::parse("exp(z)").unwrap();
        let s = JordanCurve::rounded_polygon(
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 8.0), c(0.0, 2.0)],
            0.05,
            20.0,
        )
        .unwrap();
        let e = std::f64::consts::E;
        let candidates = [
            ComplexValue::Finite(c(0.0, 1.0)),
            ComplexValue::Finite(c(0.0, e)),
            ComplexValue::Finite(c(0.0, e * e)),
        ];
        let report = non_jordan_test(&f, &s, &candidates, &ToleranceConfig::default()).unwrap();
        match &report.verdict {
            NonJordanVerdict::ImageNotJordan { witnesses } => {
                let counts: Vec<u32> = witnesses.iter().map(|w| w.count).collect();
                assert_eq!(counts, vec![1, 2, 0]);
            }
            other => panic!("expected ImageNotJordan, got {other:?}"),
        }
    }

    #[test]
    fn candidates_hugging_the_image_are_skipped() {
        let f = FunctionDef::parse("z").unwrap();
        let candidates = [
            ComplexValue::Finite(c(1.0, 0.0)),
            ComplexValue::Finite(c(0.0, 0.0)),
            ComplexValue::Finite(c(0.3, 0.0)),
            ComplexValue::Finite(c(2.0, 0.0)),
        ];
        let report =
            non_jordan_test(&f, &unit_circle(), &candidates, &ToleranceConfig::default()).unwrap();
        assert_eq!(report.skipped, vec![ComplexValue::Finite(c(1.0, 0.0))]);
        assert_eq!(report.counts.len(), 3);
        assert!(matches!(
            report.verdict,
            NonJordanVerdict::Inconclusive { .. }
        ));
    }

    #[test]
    fn default_candidate_grid_is_deterministic_and_ends_at_infinity() {
        let f = FunctionDef::parse("z^2").unwrap();
        let s = unit_circle();
        let a = default_candidates(&f, &s, 8, 11).unwrap();
        let b = default_candidates(&f, &s, 8, 11).unwrap();
        assert_eq!(a.len(), 9);
        assert_eq!(a[8], ComplexValue::Infinity);
        assert_eq!(a, b);
        assert!(matches!(default_candidates(&f, &s, 2, 0), Err(Error::Config(_))));
    }
}
