//! Adaptive winding of an image path about a point: the workhorse behind
//! both argument-principle preimage counts and quadtree cell tests.

use num_complex::Complex64;

use crate::complex::ComplexValue;
use crate::error::Error;
use crate::geometry::angle_step;

#[derive(Clone, Copy, Debug)]
pub(crate) struct PathWinding {
    pub winding: i64,
    /// Smallest chordal distance from a value to `about`.
    pub min_chordal: f64,
    /// Sum of |angle step| — how much the image path swings around `about`.
    pub total_variation: f64,
    /// Deepest bisection applied to any initial segment.
    pub refinement_depth: u32,
}

/// Why a winding could not be computed. `t` is the path parameter nearest
/// the failure, so callers can point at a location.
#[derive(Debug)]
pub(crate) enum WindErr {
    /// A value came within `band` of `about`.
    TooClose { distance: f64, t: f64 },
    /// The path value was infinite (a pole on the path).
    Infinite { t: f64 },
    /// Bisection budget exhausted with angle steps still too large, or a
    /// non-integer turn count remained. Typically means `about` lies on the
    /// image curve itself.
    Unresolved { t: f64, min_distance: f64 },
    Eval(Error),
}

pub(crate) type WindResult = std::result::Result<PathWinding, WindErr>;

const MAX_EVALUATIONS: usize = 1 << 19;

/// Winding number of t -> eval(t) (a closed path: eval(0) == eval(1)) about
/// `about`. Starts from caller-provided samples `(t, value)` and bisects any
/// segment whose subtended angle reaches pi/2, up to `max_depth` rounds per
/// segment. Values must stay outside `band` of `about`.
pub(crate) fn closed_path_winding(
    mut eval: impl FnMut(f64) -> crate::error::Result<ComplexValue>,
    about: Complex64,
    band: f64,
    initial: &[(f64, ComplexValue)],
    max_depth: u32,
) -> WindResult {
    assert!(initial.len() >= 2, "need at least one path segment");
    let about_v = ComplexValue::Finite(about);

    let mut min_distance = f64::INFINITY;
    let mut min_chordal = f64::INFINITY;
    let mut closest_t = 0.0;
    let mut evaluations = 0usize;

    let admit = |t: f64,
                     v: ComplexValue,
                     min_distance: &mut f64,
                     min_chordal: &mut f64,
                     closest_t: &mut f64|
     -> std::result::Result<Complex64, WindErr> {
        let z = match v {
            ComplexValue::Finite(z) => z,
            ComplexValue::Infinity => return Err(WindErr::Infinite { t }),
        };
        let d = (z - about).norm();
        let ch = v.chordal_distance(&about_v);
        if d < *min_distance {
            *min_distance = d;
            *closest_t = t;
        }
        if ch < *min_chordal {
            *min_chordal = ch;
        }
        if d <= band {
            return Err(WindErr::TooClose { distance: d, t });
        }
        Ok(z)
    };

    // Seed segments from the caller's samples.
    let mut checked: Vec<(f64, Complex64)> = Vec::with_capacity(initial.len());
    for &(t, v) in initial {
        let z = admit(t, v, &mut min_distance, &mut min_chordal, &mut closest_t)?;
        checked.push((t, z));
    }

    let mut total = 0.0;
    let mut variation = 0.0;
    let mut deepest = 0u32;
    let mut stack: Vec<(f64, Complex64, f64, Complex64, u32)> = Vec::new();
    for k in 0..checked.len() - 1 {
        let (t0, z0) = checked[k];
        let (t1, z1) = checked[k + 1];
        stack.push((t0, z0, t1, z1, 0));
    }

    while let Some((t0, z0, t1, z1, depth)) = stack.pop() {
        let step = angle_step(z0 - about, z1 - about);
        if step.abs() < std::f64::consts::FRAC_PI_2 {
            total += step;
            variation += step.abs();
            continue;
        }
        if depth >= max_depth || evaluations >= MAX_EVALUATIONS {
            // Report the stuck segment itself: a persistent large angle step
            // marks where the path runs over (or jumps across) `about`.
            return Err(WindErr::Unresolved {
                t: 0.5 * (t0 + t1),
                min_distance,
            });
        }
        let tm = 0.5 * (t0 + t1);
        evaluations += 1;
        let vm = eval(tm).map_err(WindErr::Eval)?;
        let zm = admit(tm, vm, &mut min_distance, &mut min_chordal, &mut closest_t)?;
        deepest = deepest.max(depth + 1);
        stack.push((t0, z0, tm, zm, depth + 1));
        stack.push((tm, zm, t1, z1, depth + 1));
    }

    let turns = total / (2.0 * std::f64::consts::PI);
    let rounded = turns.round();
    if (turns - rounded).abs() >= 0.25 {
        return Err(WindErr::Unresolved {
            t: closest_t,
            min_distance,
        });
    }
    Ok(PathWinding {
        winding: rounded as i64,
        min_chordal,
        total_variation: variation,
        refinement_depth: deepest,
    })
}
