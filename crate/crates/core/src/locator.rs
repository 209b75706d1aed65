//! Quadtree isolation of zeros, poles, and critical points: boundary
//! windings decide which cells can hold anything, multiplicity-aware Newton
//! polishes each survivor, and a tiny verification circle confirms the
//! claimed order before a record is emitted.

use num_complex::Complex64;

pub use crate::geometry::Rect;

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::expr::FunctionDef;
use crate::geometry::JordanCurve;
use crate::winding::{closed_path_winding, PathWinding, WindErr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Zero,
    Pole,
    CriticalPoint,
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ZeroPoleRecord {
    #[serde(serialize_with = "crate::complex::serialize_c64")]
    pub location: Complex64,
    pub order: u32,
    pub kind: PointKind,
    /// |f| at the location for zeros and critical points, |1/f| for poles.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocatorConfig {
    /// Absolute floor on cell diagonals; below it an active cell is an
    /// unresolved cluster.
    pub min_cell: f64,
    pub max_depth: u32,
    /// Absolute residual target for Newton refinement.
    pub newton_tol: f64,
    pub newton_max_iter: u32,
}

impl LocatorConfig {
    /// Derive absolute settings for a search box from the shared relative
    /// tolerances.
    pub fn for_rect(rect: &Rect, tol: &ToleranceConfig) -> LocatorConfig {
        LocatorConfig {
            min_cell: tol.min_cell * rect.diagonal(),
            max_depth: 48,
            newton_tol: tol.newton_tol,
            newton_max_iter: 50,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.min_cell.is_finite() && self.min_cell > 0.0) {
            return Err(Error::Config(format!(
                "min_cell must be positive, got {}",
                self.min_cell
            )));
        }
        if !(self.newton_tol.is_finite() && self.newton_tol > 0.0) {
            return Err(Error::Config(format!(
                "newton_tol must be positive, got {}",
                self.newton_tol
            )));
        }
        if self.max_depth == 0 || self.newton_max_iter == 0 {
            return Err(Error::Config(
                "max_depth and newton_max_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Fraction of the top-level diagonal at which cells stop subdividing and
/// Newton takes over. Also the floor below which a canceling zero/pole pair
/// inside a single cell becomes invisible to boundary data.
const RESOLVE_FRACTION: f64 = 1e-3;

/// Keep-alive threshold (radians of total boundary angular variation) for
/// cells whose net winding vanishes. The reciprocal-winding test adds
/// nothing here — the winding of 1/f is exactly minus that of f — so angular
/// variation is the only usable evidence of a hidden canceling pair.
const VAR_KEEP: f64 = 1.2;

/// Center offsets (in cell-size units) tried in order when a zero or pole
/// sits on a subdivision line.
const GRID_SHIFTS: [(f64, f64); 5] = [
    (0.0, 0.0),
    (0.093, 0.051),
    (-0.071, 0.083),
    (0.059, -0.107),
    (-0.113, -0.047),
];

/// Fraction of the smaller cell side within which a point counts as sitting
/// on the cell's edge. Used both to route verification failures into grid
/// shifts and to decide which ancestor owns an edge problem.
const NEAR_EDGE_FRACTION: f64 = 0.05;

/// Total grid-shift retries allowed per `isolate` call before giving up.
const SHIFT_BUDGET: u32 = 64;

struct Ctx<'a> {
    f: &'a FunctionDef,
    fp: FunctionDef,
    cfg: &'a LocatorConfig,
    resolve_size: f64,
    shifts_left: std::cell::Cell<u32>,
    /// Whether f can have poles at all; pole-free functions skip the
    /// hidden-pair moment probe on empty-looking cells.
    pole_capable: bool,
}

enum CellFail {
    /// Zero/pole on or near this cell's edge; the parent must shift its grid.
    EdgeHit { location: Complex64 },
    Fatal(Error),
}

/// Signed distance from `z` to the nearest edge of `cell` (negative outside).
fn edge_margin(cell: &Rect, z: Complex64) -> f64 {
    (z.re - cell.lo.re)
        .min(cell.hi.re - z.re)
        .min(z.im - cell.lo.im)
        .min(cell.hi.im - z.im)
}

fn near_edge(cell: &Rect, z: Complex64) -> bool {
    edge_margin(cell, z) <= NEAR_EDGE_FRACTION * cell.width().min(cell.height())
}

fn cell_winding(ctx: &Ctx, cell: &Rect) -> std::result::Result<PathWinding, CellFail> {
    let eval = |t: f64| ctx.f.eval_c64(cell.boundary_point(t));
    let mut initial = Vec::with_capacity(17);
    for k in 0..=16 {
        let t = k as f64 / 16.0;
        let v = ctx.f.eval_c64(cell.boundary_point(t)).map_err(CellFail::Fatal)?;
        initial.push((t, v));
    }
    match closed_path_winding(eval, Complex64::new(0.0, 0.0), 0.0, &initial, 20) {
        Ok(w) => Ok(w),
        Err(WindErr::TooClose { t, .. })
        | Err(WindErr::Infinite { t })
        | Err(WindErr::Unresolved { t, .. }) => Err(CellFail::EdgeHit {
            location: cell.boundary_point(t),
        }),
        Err(WindErr::Eval(e)) => Err(CellFail::Fatal(e)),
    }
}

/// Multiplicity-aware Newton: z <- z - m f / f' converges quadratically to a
/// zero of order m, and with m < 0 to a pole of order |m|.
fn newton_refine(ctx: &Ctx, cell: &Rect, m: i64) -> Option<(Complex64, f64)> {
    let mf = m as f64;
    let mut z = cell.center();
    let escape = cell.inflate(8.0);
    for _ in 0..ctx.cfg.newton_max_iter {
        let fv = ctx.f.eval_c64(z).ok()?;
        let residual = match (m > 0, fv.as_finite()) {
            (true, Some(v)) => v.norm(),
            // Hunting a zero but standing on a pole: nudge off and retry.
            (true, None) => {
                z += Complex64::new(1e-13 * (1.0 + z.re.abs()), 1e-13 * (1.0 + z.im.abs()));
                continue;
            }
            (false, Some(v)) => 1.0 / v.norm(),
            // An exactly-infinite value IS the pole; nothing left to refine.
            (false, None) => return Some((z, 0.0)),
        };
        if residual <= ctx.cfg.newton_tol {
            return Some((z, residual));
        }
        let fv = fv.as_finite().expect("infinite values handled above");
        let Some(fpv) = ctx.fp.eval_c64(z).ok()?.as_finite() else {
            // f finite, f' over the cap: right on top of a pole, but not yet
            // inside the residual target. Step off and come back around.
            z += Complex64::new(1e-13 * (1.0 + z.re.abs()), 1e-13 * (1.0 + z.im.abs()));
            continue;
        };
        if fpv.norm() == 0.0 {
            z += Complex64::new(1e-9 * cell.width(), 1e-9 * cell.height());
            continue;
        }
        let step = mf * fv / fpv;
        if !step.re.is_finite() || !step.im.is_finite() {
            return None;
        }
        z -= step;
        if !escape.contains(z, 0.0) {
            return None;
        }
    }
    None
}

/// Verify a refined point by winding a small circle around it. The radius
/// balances two floors: Newton's own tolerance and the f64 noise floor for
/// an order-m root, where |f| ~ r^m must stay well above machine epsilon.
fn verification_radius(cfg: &LocatorConfig, m: i64, scale: f64) -> f64 {
    let noise_floor = 10f64.powf(-13.0 / m.unsigned_abs() as f64);
    (100.0 * cfg.newton_tol).max(noise_floor).min(0.45 * scale)
}

fn verify_order(ctx: &Ctx, z: Complex64, m: i64, radius: f64) -> bool {
    let eval = |t: f64| {
        let ang = 2.0 * std::f64::consts::PI * t;
        ctx.f
            .eval_c64(z + radius * Complex64::new(ang.cos(), ang.sin()))
    };
    let mut initial = Vec::with_capacity(17);
    for k in 0..=16 {
        let t = k as f64 / 16.0;
        match eval(t) {
            Ok(v) => initial.push((t, v)),
            Err(_) => return false,
        }
    }
    matches!(
        closed_path_winding(eval, Complex64::new(0.0, 0.0), 0.0, &initial, 20),
        Ok(w) if w.winding == m
    )
}

enum Resolution {
    Resolved(ZeroPoleRecord),
    /// Newton converged next to the cell edge but the order check failed —
    /// the signature of a root sitting exactly on a grid line, where each
    /// neighboring cell sees only part of its multiplicity. A grid shift by
    /// an ancestor fixes this; further subdivision never does.
    NearEdge(Complex64),
    Failed,
}

fn try_resolve(ctx: &Ctx, cell: &Rect, m: i64) -> Resolution {
    let Some((z, residual)) = newton_refine(ctx, cell, m) else {
        return Resolution::Failed;
    };
    // The point must belong to this cell — a Newton run that drifted into a
    // neighbor would double-count with that neighbor's own record.
    if !cell.contains(z, 1e-9 * cell.diagonal()) {
        return Resolution::Failed;
    }
    let radius = verification_radius(ctx.cfg, m, cell.diagonal());
    if !verify_order(ctx, z, m, radius) {
        if near_edge(cell, z) {
            return Resolution::NearEdge(z);
        }
        return Resolution::Failed;
    }
    Resolution::Resolved(ZeroPoleRecord {
        location: z,
        order: m.unsigned_abs() as u32,
        kind: if m > 0 { PointKind::Zero } else { PointKind::Pole },
        residual,
    })
}

/// Conservative check for poles: any division by something non-constant
/// (or a negative power, or a logarithm, which blows up at zeros of its
/// argument) can produce one.
fn pole_capable(e: &crate::expr::Expr) -> bool {
    use crate::expr::Expr::*;
    match e {
        Const(_) | Var => false,
        Neg(a) | Exp(a) | Sin(a) | Cos(a) => pole_capable(a),
        Log(_) => true,
        Add(a, b) | Sub(a, b) | Mul(a, b) => pole_capable(a) || pole_capable(b),
        Div(a, b) => {
            pole_capable(a) || pole_capable(b) || !matches!(**b, Const(_))
        }
        Pow(a, n) => pole_capable(a) || (*n < 0 && !matches!(**a, Const(_))),
    }
}

const MOMENT_EVAL_CAP: usize = 4000;
const MOMENT_MAX_DEPTH: u32 = 14;

/// Adaptive Simpson quadrature of f'/f · [u, u²] along cell edges, with
/// u = (z − center)/scale.
struct MomentProbe<'b> {
    f: &'b FunctionDef,
    fp: &'b FunctionDef,
    center: Complex64,
    scale: f64,
    evals: std::cell::Cell<usize>,
}

type MomentPair = (Complex64, Complex64);

impl MomentProbe<'_> {
    fn g(&self, z: Complex64) -> Option<MomentPair> {
        if self.evals.get() >= MOMENT_EVAL_CAP {
            return None;
        }
        self.evals.set(self.evals.get() + 1);
        let fv = self.f.eval_c64(z).ok()?.as_finite()?;
        if fv.norm() == 0.0 {
            return None;
        }
        let dv = self.fp.eval_c64(z).ok()?.as_finite()?;
        let g = dv / fv;
        let u = (z - self.center) / self.scale;
        Some((u * g, u * u * g))
    }

    fn edge(&self, a: Complex64, b: Complex64, tol1: f64, tol2: f64) -> Option<MomentPair> {
        let ga = self.g(a)?;
        let gm = self.g(0.5 * (a + b))?;
        let gb = self.g(b)?;
        self.refine(a, b, ga, gm, gb, tol1, tol2, 0)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        a: Complex64,
        b: Complex64,
        ga: MomentPair,
        gm: MomentPair,
        gb: MomentPair,
        tol1: f64,
        tol2: f64,
        depth: u32,
    ) -> Option<MomentPair> {
        let m = 0.5 * (a + b);
        let h = b - a;
        let whole1 = h / 6.0 * (ga.0 + 4.0 * gm.0 + gb.0);
        let whole2 = h / 6.0 * (ga.1 + 4.0 * gm.1 + gb.1);
        let gp = self.g(0.5 * (a + m))?;
        let gq = self.g(0.5 * (m + b))?;
        let hh = 0.5 * h;
        let left1 = hh / 6.0 * (ga.0 + 4.0 * gp.0 + gm.0);
        let right1 = hh / 6.0 * (gm.0 + 4.0 * gq.0 + gb.0);
        let left2 = hh / 6.0 * (ga.1 + 4.0 * gp.1 + gm.1);
        let right2 = hh / 6.0 * (gm.1 + 4.0 * gq.1 + gb.1);
        let err1 = (left1 + right1 - whole1).norm() / 15.0;
        let err2 = (left2 + right2 - whole2).norm() / 15.0;
        if err1 <= tol1 && err2 <= tol2 {
            return Some((left1 + right1, left2 + right2));
        }
        if depth >= MOMENT_MAX_DEPTH {
            return None;
        }
        let lo = self.refine(a, m, ga, gp, gm, 0.5 * tol1, 0.5 * tol2, depth + 1)?;
        let hi = self.refine(m, b, gm, gq, gb, 0.5 * tol1, 0.5 * tol2, depth + 1)?;
        Some((lo.0 + hi.0, lo.1 + hi.1))
    }
}

/// Moment probe for calm winding-zero cells: zeros and poles hiding inside
/// in equal number cancel in the winding and barely stir the boundary
/// argument, but the boundary integrals of z·f'/f and z²·f'/f equal
/// Σmᵢzᵢ and Σmᵢzᵢ² over the hidden points and expose the pair. Returns
/// true when the cell must be subdivided after all. Configurations
/// symmetric enough to zero both moments (say three zeros in a rotationally
/// symmetric star around a matching pole) can still slip through, as can
/// pairs tighter than the resolution floor.
fn hidden_pair(ctx: &Ctx, cell: &Rect) -> bool {
    let center = cell.center();
    let scale = 0.5 * cell.diagonal();
    // Normalized thresholds: a dipole of separation resolve_size/2 must
    // register at any cell size.
    let tau1 = 0.5 * ctx.resolve_size / scale;
    let tau2 = tau1 * tau1;
    let probe = MomentProbe {
        f: ctx.f,
        fp: &ctx.fp,
        center,
        scale,
        evals: std::cell::Cell::new(0),
    };
    let corners = [
        cell.lo,
        Complex64::new(cell.hi.re, cell.lo.im),
        cell.hi,
        Complex64::new(cell.lo.re, cell.hi.im),
        cell.lo,
    ];
    let mut i1 = Complex64::new(0.0, 0.0);
    let mut i2 = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        // Keep total quadrature error below ~20% of the decision threshold.
        let two_pi = std::f64::consts::TAU;
        match probe.edge(corners[k], corners[k + 1], 0.05 * two_pi * tau1, 0.05 * two_pi * tau2) {
            Some((a, b)) => {
                i1 += a;
                i2 += b;
            }
            // Quadrature breakdown on a supposedly calm boundary: distrust
            // the cell and let subdivision sort it out.
            None => return true,
        }
    }
    let denom = Complex64::new(0.0, std::f64::consts::TAU);
    let m1 = (i1 / denom).norm();
    let m2 = (i2 / denom).norm();
    m1 > tau1 || m2 > tau2
}

fn handle_cell(
    ctx: &Ctx,
    cell: Rect,
    depth: u32,
) -> std::result::Result<Vec<ZeroPoleRecord>, CellFail> {
    let w = cell_winding(ctx, &cell)?;
    let diag = cell.diagonal();
    if w.winding == 0 {
        // Below the resolution floor a cancelling pair is unresolvable
        // anyway; above it, a calm boundary is only trusted when the
        // moment probe agrees nothing hides inside.
        if diag <= ctx.resolve_size {
            return Ok(Vec::new());
        }
        if w.total_variation < VAR_KEEP && !(ctx.pole_capable && hidden_pair(ctx, &cell)) {
            return Ok(Vec::new());
        }
    }
    if w.winding != 0 && diag <= ctx.resolve_size {
        match try_resolve(ctx, &cell, w.winding) {
            Resolution::Resolved(rec) => return Ok(vec![rec]),
            Resolution::NearEdge(z) => return Err(CellFail::EdgeHit { location: z }),
            Resolution::Failed => {}
        }
    }
    if depth >= ctx.cfg.max_depth || diag <= ctx.cfg.min_cell {
        return Err(CellFail::Fatal(Error::UnresolvedCluster {
            re_lo: cell.lo.re,
            re_hi: cell.hi.re,
            im_lo: cell.lo.im,
            im_hi: cell.hi.im,
        }));
    }
    subdivide(ctx, cell, depth)
}

fn subdivide(
    ctx: &Ctx,
    cell: Rect,
    depth: u32,
) -> std::result::Result<Vec<ZeroPoleRecord>, CellFail> {
    let mut last_hit = cell.center();
    for (i, (dx, dy)) in GRID_SHIFTS.iter().enumerate() {
        if i > 0 {
            // Retries are globally budgeted; exhausting the budget means the
            // same point keeps defeating every grid we draw.
            let left = ctx.shifts_left.get();
            if left == 0 {
                break;
            }
            ctx.shifts_left.set(left - 1);
        }
        let center = Complex64::new(
            cell.lo.re + cell.width() * (0.5 + dx).clamp(0.2, 0.8),
            cell.lo.im + cell.height() * (0.5 + dy).clamp(0.2, 0.8),
        );
        let mut records = Vec::new();
        let mut hit = None;
        for child in cell.split(center) {
            match handle_cell(ctx, child, depth + 1) {
                Ok(mut recs) => records.append(&mut recs),
                Err(CellFail::EdgeHit { location }) => {
                    hit = Some(location);
                    break;
                }
                Err(fatal) => return Err(fatal),
            }
        }
        match hit {
            None => return Ok(records),
            Some(location) => {
                // A hit on this cell's own boundary cannot be fixed by
                // re-drawing interior lines; hand it to the ancestor whose
                // interior it is.
                if near_edge(&cell, location) {
                    return Err(CellFail::EdgeHit { location });
                }
                last_hit = location;
            }
        }
    }
    // Every shifted grid ran through the same point: give up and report it.
    Err(CellFail::EdgeHit { location: last_hit })
}

/// Find all zeros and poles of `f` in `rect` with orders and residuals,
/// sorted by (re, im). The search box boundary must be clear of zeros and
/// poles; a persistent hit is reported as `BoundaryHit`.
pub fn isolate(f: &FunctionDef, rect: &Rect, cfg: &LocatorConfig) -> Result<Vec<ZeroPoleRecord>> {
    cfg.validate()?;
    let ctx = Ctx {
        f,
        fp: f.derivative_fn(),
        cfg,
        resolve_size: (RESOLVE_FRACTION * rect.diagonal()).max(cfg.min_cell),
        shifts_left: std::cell::Cell::new(SHIFT_BUDGET),
        pole_capable: pole_capable(f.body()),
    };
    let mut records = match handle_cell(&ctx, *rect, 0) {
        Ok(r) => r,
        Err(CellFail::EdgeHit { location }) => return Err(Error::BoundaryHit { location }),
        Err(CellFail::Fatal(e)) => return Err(e),
    };
    records.sort_by(|a, b| {
        (a.location.re, a.location.im)
            .partial_cmp(&(b.location.re, b.location.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(records)
}

/// Zeros of f' inside `rect` (poles of f are poles of f' too and are
/// filtered out), reported as critical points with residual |f'|.
pub fn critical_points(
    f: &FunctionDef,
    rect: &Rect,
    cfg: &LocatorConfig,
) -> Result<Vec<ZeroPoleRecord>> {
    let records = isolate(&f.derivative_fn(), rect, cfg)?;
    Ok(records
        .into_iter()
        .filter(|r| r.kind == PointKind::Zero)
        .map(|r| ZeroPoleRecord {
            kind: PointKind::CriticalPoint,
            ..r
        })
        .collect())
}

/// Critical points of `f` within `band` of the curve.
pub fn critical_points_on_curve(
    f: &FunctionDef,
    curve: &JordanCurve,
    band: f64,
    tol: &ToleranceConfig,
) -> Result<Vec<ZeroPoleRecord>> {
    let fp = f.derivative_fn();
    let records = isolate_around_curve(&fp, curve, band, tol)?;
    Ok(records
        .into_iter()
        .filter(|r| r.kind == PointKind::Zero && curve.distance_to(r.location) <= band)
        .map(|r| ZeroPoleRecord {
            kind: PointKind::CriticalPoint,
            ..r
        })
        .collect())
}

/// Isolate over a padded bounding box of a curve, retrying with different
/// padding when a zero or pole lands exactly on the box edge.
pub(crate) fn isolate_around_curve(
    f: &FunctionDef,
    curve: &JordanCurve,
    extra_pad: f64,
    tol: &ToleranceConfig,
) -> Result<Vec<ZeroPoleRecord>> {
    let bbox = curve.bbox();
    let mut last = None;
    for pad_frac in [0.07, 0.11, 0.035, 0.161] {
        let pad = pad_frac * bbox.diagonal() + extra_pad;
        let rect = Rect::new(
            Complex64::new(bbox.lo.re - pad, bbox.lo.im - pad),
            Complex64::new(bbox.hi.re + pad, bbox.hi.im + pad),
        )?;
        let cfg = LocatorConfig::for_rect(&rect, tol);
        match isolate(f, &rect, &cfg) {
            Err(Error::BoundaryHit { location }) => {
                last = Some(Error::BoundaryHit { location });
            }
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}
