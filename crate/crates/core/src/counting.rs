//! Preimage counting through the argument principle: for a point w off the
//! image curve, the number of solutions of f(z) = w enclosed by S equals the
//! winding of f∘S about w plus the number of poles of f inside S (counted
//! with multiplicity). At w = ∞ the count is the enclosed pole count itself.

use num_complex::Complex64;
use serde::Serialize;

use crate::complex::ComplexValue;
use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::expr::FunctionDef;
use crate::geometry::{JordanCurve, Location};
use crate::locator::{isolate_around_curve, PointKind};
use crate::winding::{closed_path_winding, PathWinding, WindErr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    /// Winding of the image path plus the enclosed pole count.
    Winding,
    /// Direct isolation of the solutions of f(z) = w inside S. Used when the
    /// image path passes too close to w for a reliable winding, and always
    /// for w = ∞; solutions lying on S itself are not counted.
    Subdivision,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PreimageCountReport {
    pub w: ComplexValue,
    pub count: u32,
    pub method: CountMethod,
    /// Smallest chordal distance from the sampled image path to w.
    pub min_image_distance: f64,
    /// Deepest bisection the image winding needed (0 for subdivision).
    pub refinement_depth: u32,
}

/// Image values of the curve's own samples, shared across winding queries.
pub(crate) struct ImageSamples {
    values: Vec<(f64, ComplexValue)>,
    /// Diagonal of the bounding box of the finite values; the proximity band
    /// around each query point scales with it.
    pub(crate) band_scale: f64,
}

pub(crate) fn sample_image(f: &FunctionDef, s: &JordanCurve) -> Result<ImageSamples> {
    let mut values = Vec::with_capacity(s.samples().len());
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(t, z) in s.samples() {
        let v = f.eval_c64(z)?;
        if let Some(u) = v.as_finite() {
            lo = Complex64::new(lo.re.min(u.re), lo.im.min(u.im));
            hi = Complex64::new(hi.re.max(u.re), hi.im.max(u.im));
        }
        values.push((t, v));
    }
    let band_scale = if lo.re <= hi.re {
        (hi - lo).norm()
    } else {
        0.0
    };
    Ok(ImageSamples { values, band_scale })
}

impl ImageSamples {
    pub(crate) fn min_chordal_to(&self, w: &ComplexValue) -> f64 {
        self.values
            .iter()
            .map(|(_, v)| v.chordal_distance(w))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Winding of f∘S about a finite w, refining between the precomputed sample
/// values where the subtended angle is too coarse.
pub(crate) fn image_winding_from(
    f: &FunctionDef,
    s: &JordanCurve,
    w: Complex64,
    samples: &ImageSamples,
    cfg: &ToleranceConfig,
) -> Result<PathWinding> {
    let band = cfg.image_band * samples.band_scale;
    let eval = |t: f64| f.eval_c64(s.point_at(t));
    match closed_path_winding(eval, w, band, &samples.values, 24) {
        Ok(pw) => Ok(pw),
        Err(WindErr::TooClose { distance, .. }) => {
            Err(Error::TooCloseToImage { distance, band })
        }
        Err(WindErr::Infinite { t }) => Err(Error::PoleOnCurve {
            location: s.point_at(t),
        }),
        Err(WindErr::Unresolved { min_distance, .. }) => Err(Error::TooCloseToImage {
            distance: min_distance,
            band,
        }),
        Err(WindErr::Eval(e)) => Err(e),
    }
}

/// Number of poles of f strictly inside S, counted with multiplicity. A pole
/// within the boundary band of S is an error: every count that depends on
/// the enclosed poles would be meaningless.
pub fn count_poles_in(f: &FunctionDef, s: &JordanCurve, cfg: &ToleranceConfig) -> Result<u32> {
    let band = cfg.boundary_band * s.diameter();
    let records = isolate_around_curve(f, s, 2.0 * band, cfg)?;
    let mut total = 0u32;
    for rec in records {
        if rec.kind != PointKind::Pole {
            continue;
        }
        let loc = s.locate_point(rec.location, cfg)?;
        match loc.location {
            Location::NearBoundary => {
                return Err(Error::PoleOnCurve {
                    location: rec.location,
                })
            }
            Location::Inside => total += rec.order,
            Location::Outside => {}
        }
    }
    Ok(total)
}

fn winding_count(
    f: &FunctionDef,
    s: &JordanCurve,
    w: Complex64,
    samples: &ImageSamples,
    poles_inside: u32,
    cfg: &ToleranceConfig,
) -> Result<PreimageCountReport> {
    let pw = image_winding_from(f, s, w, samples, cfg)?;
    let total = pw.winding + i64::from(poles_inside);
    if total < 0 {
        return Err(Error::Internal(format!(
            "argument principle produced a negative count at w = {w}: \
             image winding {} with {poles_inside} enclosed poles",
            pw.winding
        )));
    }
    Ok(PreimageCountReport {
        w: ComplexValue::Finite(w),
        count: total as u32,
        method: CountMethod::Winding,
        min_image_distance: pw.min_chordal,
        refinement_depth: pw.refinement_depth,
    })
}

/// Count solutions of f(z) = w inside S by isolating them directly.
/// Solutions within the boundary band of S are excluded: they sit on the
/// curve, not in its interior.
fn subdivision_count(
    f: &FunctionDef,
    s: &JordanCurve,
    w: Complex64,
    samples: &ImageSamples,
    cfg: &ToleranceConfig,
) -> Result<PreimageCountReport> {
    let g = f.sub_const(w);
    let band = cfg.boundary_band * s.diameter();
    let records = isolate_around_curve(&g, s, 2.0 * band, cfg)?;
    let mut count = 0u32;
    for rec in records {
        if rec.kind != PointKind::Zero {
            continue;
        }
        if s.locate_point(rec.location, cfg)?.location == Location::Inside {
            count += rec.order;
        }
    }
    Ok(PreimageCountReport {
        w: ComplexValue::Finite(w),
        count,
        method: CountMethod::Subdivision,
        min_image_distance: samples.min_chordal_to(&ComplexValue::Finite(w)),
        refinement_depth: 0,
    })
}

pub(crate) fn count_at(
    f: &FunctionDef,
    s: &JordanCurve,
    w: &ComplexValue,
    samples: &ImageSamples,
    poles_inside: u32,
    cfg: &ToleranceConfig,
    fallback: bool,
) -> Result<PreimageCountReport> {
    match w {
        ComplexValue::Infinity => Ok(PreimageCountReport {
            w: ComplexValue::Infinity,
            count: poles_inside,
            method: CountMethod::Subdivision,
            min_image_distance: samples.min_chordal_to(&ComplexValue::Infinity),
            refinement_depth: 0,
        }),
        ComplexValue::Finite(wz) => {
            match winding_count(f, s, *wz, samples, poles_inside, cfg) {
                Err(Error::TooCloseToImage { .. }) if fallback => {
                    subdivision_count(f, s, *wz, samples, cfg)
                }
                other => other,
            }
        }
    }
}

/// N_f(w) by the argument principle. Fails with `TooCloseToImage` when the
/// image of S runs too close to w for the winding to be trustworthy.
pub fn count_preimages(
    f: &FunctionDef,
    s: &JordanCurve,
    w: ComplexValue,
    cfg: &ToleranceConfig,
) -> Result<PreimageCountReport> {
    let samples = sample_image(f, s)?;
    let poles_inside = count_poles_in(f, s, cfg)?;
    count_at(f, s, &w, &samples, poles_inside, cfg, false)
}

/// Like [`count_preimages`], but when w sits on (or hugs) the image curve the
/// count falls back to isolating the solutions of f(z) = w directly,
/// excluding the ones on S itself. This keeps boundary points of an image
/// region countable — exactly where the winding route must give up.
pub fn count_preimages_robust(
    f: &FunctionDef,
    s: &JordanCurve,
    w: ComplexValue,
    cfg: &ToleranceConfig,
) -> Result<PreimageCountReport> {
    let samples = sample_image(f, s)?;
    let poles_inside = count_poles_in(f, s, cfg)?;
    count_at(f, s, &w, &samples, poles_inside, cfg, true)
}

/// Counts for a whole batch of query points, sharing the image samples and
/// the enclosed pole count, with the per-point work done in parallel.
/// Results keep the order of `ws` regardless of thread scheduling.
pub fn count_on_grid(
    f: &FunctionDef,
    s: &JordanCurve,
    ws: &[ComplexValue],
    cfg: &ToleranceConfig,
) -> Result<Vec<PreimageCountReport>> {
    use rayon::prelude::*;
    let samples = sample_image(f, s)?;
    let poles_inside = count_poles_in(f, s, cfg)?;
    ws.par_iter()
        .map(|w| count_at(f, s, w, &samples, poles_inside, cfg, true))
        .collect()
}
