//! Sampled Jordan curves with exact generators behind them, winding numbers
//! by principal-angle summation, and point location.

use std::sync::Arc;

use num_complex::Complex64;

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};

/// Axis-aligned closed rectangle in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub lo: Complex64,
    pub hi: Complex64,
}

impl Rect {
    pub fn new(lo: Complex64, hi: Complex64) -> Result<Rect> {
        if !(lo.re.is_finite() && lo.im.is_finite() && hi.re.is_finite() && hi.im.is_finite()) {
            return Err(Error::Geometry("rectangle corners must be finite".into()));
        }
        if hi.re <= lo.re || hi.im <= lo.im {
            return Err(Error::Geometry(format!(
                "rectangle must have positive extent, got [{}, {}] x [{}, {}]",
                lo.re, hi.re, lo.im, hi.im
            )));
        }
        Ok(Rect { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi.re - self.lo.re
    }

    pub fn height(&self) -> f64 {
        self.hi.im - self.lo.im
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.lo.re + self.hi.re),
            0.5 * (self.lo.im + self.hi.im),
        )
    }

    pub fn diagonal(&self) -> f64 {
        (self.width().hypot(self.height())).max(f64::MIN_POSITIVE)
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.lo.re - slack
            && z.re <= self.hi.re + slack
            && z.im >= self.lo.im - slack
            && z.im <= self.hi.im + slack
    }

    /// Counterclockwise boundary point for t in [0, 1), starting at `lo`.
    pub fn boundary_point(&self, t: f64) -> Complex64 {
        let t = t.rem_euclid(1.0) * 4.0;
        let (w, h) = (self.width(), self.height());
        if t < 1.0 {
            Complex64::new(self.lo.re + w * t, self.lo.im)
        } else if t < 2.0 {
            Complex64::new(self.hi.re, self.lo.im + h * (t - 1.0))
        } else if t < 3.0 {
            Complex64::new(self.hi.re - w * (t - 2.0), self.hi.im)
        } else {
            Complex64::new(self.lo.re, self.hi.im - h * (t - 3.0))
        }
    }

    /// Split into four cells at an interior point.
    pub fn split(&self, at: Complex64) -> [Rect; 4] {
        let (x, y) = (at.re, at.im);
        let c = |a, b, cc, d| Rect {
            lo: Complex64::new(a, cc),
            hi: Complex64::new(b, d),
        };
        [
            c(self.lo.re, x, self.lo.im, y),
            c(x, self.hi.re, self.lo.im, y),
            c(self.lo.re, x, y, self.hi.im),
            c(x, self.hi.re, y, self.hi.im),
        ]
    }

    /// Scale about the center by `factor`.
    pub fn inflate(&self, factor: f64) -> Rect {
        let c = self.center();
        let hw = 0.5 * self.width() * factor;
        let hh = 0.5 * self.height() * factor;
        Rect {
            lo: Complex64::new(c.re - hw, c.im - hh),
            hi: Complex64::new(c.re + hw, c.im + hh),
        }
    }
}

/// Where a point sits relative to a positively oriented Jordan curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Inside,
    Outside,
    NearBoundary,
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct PointLocation {
    pub location: Location,
    /// Distance from the query point to the curve.
    pub distance: f64,
}

/// Exact parameterization backing the sample polyline, so refinement adds
/// true curve points instead of subdividing chords.
#[derive(Clone, Debug)]
enum CurveGen {
    Circle {
        center: Complex64,
        radius: f64,
    },
    Polyline {
        pts: Arc<Vec<(f64, Complex64)>>,
    },
    Pieces {
        pieces: Arc<Vec<PathPiece>>,
        total_len: f64,
    },
}

#[derive(Clone, Debug)]
enum PathPiece {
    Line {
        a: Complex64,
        b: Complex64,
        start: f64,
        len: f64,
    },
    Arc {
        center: Complex64,
        radius: f64,
        a0: f64,
        sweep: f64,
        start: f64,
        len: f64,
    },
}

impl PathPiece {
    fn start(&self) -> f64 {
        match self {
            PathPiece::Line { start, .. } | PathPiece::Arc { start, .. } => *start,
        }
    }

    fn len(&self) -> f64 {
        match self {
            PathPiece::Line { len, .. } | PathPiece::Arc { len, .. } => *len,
        }
    }

    fn point_at_len(&self, s: f64) -> Complex64 {
        match self {
            PathPiece::Line { a, b, len, .. } => {
                let u = (s / len).clamp(0.0, 1.0);
                a + (b - a) * u
            }
            PathPiece::Arc {
                center,
                radius,
                a0,
                sweep,
                len,
                ..
            } => {
                let u = (s / len).clamp(0.0, 1.0);
                let ang = a0 + sweep * u;
                center + radius * Complex64::new(ang.cos(), ang.sin())
            }
        }
    }
}

/// A closed, simple, sampled curve. The sample list always stores the closure
/// point: `samples.last() == samples.first()` exactly, with parameters
/// running from 0 to 1.
#[derive(Clone, Debug)]
pub struct JordanCurve {
    samples: Vec<(f64, Complex64)>,
    gen: CurveGen,
    reversed: bool,
    orientation: i8,
    diameter: f64,
}

const MAX_REFINED_SAMPLES: usize = 1 << 21;

impl JordanCurve {
    /// Circle sampled at `n` equal parameter steps.
    pub fn circle(center: Complex64, radius: f64, n: usize) -> Result<JordanCurve> {
        if !(radius.is_finite() && radius > 0.0) || !center.re.is_finite() || !center.im.is_finite()
        {
            return Err(Error::Geometry(format!(
                "circle needs a finite center and positive radius, got {center}, r = {radius}"
            )));
        }
        if n < 8 {
            return Err(Error::Geometry(format!(
                "circle needs at least 8 samples, got {n}"
            )));
        }
        let gen = CurveGen::Circle { center, radius };
        let mut samples = Vec::with_capacity(n + 1);
        for k in 0..n {
            let t = k as f64 / n as f64;
            samples.push((t, gen_point(&gen, t)));
        }
        samples.push((1.0, samples[0].1));
        Self::finish(samples, gen, false)
    }

    /// Closed polyline through the given points (closure point optional).
    pub fn from_samples(points: &[Complex64]) -> Result<JordanCurve> {
        let mut pts: Vec<Complex64> = Vec::with_capacity(points.len() + 1);
        for p in points {
            if !p.re.is_finite() || !p.im.is_finite() {
                return Err(Error::Geometry("curve samples must be finite".into()));
            }
            if pts.last().map_or(true, |q| *q != *p) {
                pts.push(*p);
            }
        }
        if pts.len() >= 2 && pts[0] == *pts.last().unwrap() {
            pts.pop();
        }
        if pts.len() < 3 {
            return Err(Error::Geometry(format!(
                "a Jordan curve needs at least 3 distinct points, got {}",
                pts.len()
            )));
        }
        pts.push(pts[0]);
        let total: f64 = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
        if total <= 0.0 {
            return Err(Error::Geometry("curve has zero length".into()));
        }
        let mut samples = Vec::with_capacity(pts.len());
        let mut acc = 0.0;
        for (k, p) in pts.iter().enumerate() {
            if k > 0 {
                acc += (pts[k] - pts[k - 1]).norm();
            }
            samples.push((acc / total, *p));
        }
        samples.last_mut().unwrap().0 = 1.0;
        samples[0].0 = 0.0;
        let gen = CurveGen::Polyline {
            pts: Arc::new(samples.clone()),
        };
        Self::finish(samples, gen, false)
    }

    /// Outward offset of a simple polygon at distance `fillet_radius`:
    /// edges shift outward and every vertex becomes a tangent circular arc,
    /// giving a C1 curve that strictly contains the polygon. `density` is
    /// samples per unit of arc length.
    pub fn rounded_polygon(
        vertices: &[Complex64],
        fillet_radius: f64,
        density: f64,
    ) -> Result<JordanCurve> {
        if vertices.len() < 3 {
            return Err(Error::Geometry(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if !(fillet_radius.is_finite() && fillet_radius > 0.0) {
            return Err(Error::Geometry(format!(
                "fillet radius must be positive, got {fillet_radius}"
            )));
        }
        if !(density.is_finite() && density > 0.0) {
            return Err(Error::Geometry(format!(
                "sample density must be positive, got {density}"
            )));
        }
        let mut vs: Vec<Complex64> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Geometry("polygon vertices must be finite".into()));
            }
            if vs.last().map_or(true, |q| *q != *v) {
                vs.push(*v);
            }
        }
        if vs.len() >= 2 && vs[0] == *vs.last().unwrap() {
            vs.pop();
        }
        if vs.len() < 3 {
            return Err(Error::Geometry(
                "polygon has fewer than 3 distinct vertices".into(),
            ));
        }
        // Work in counterclockwise order.
        if polygon_signed_area(&vs) < 0.0 {
            vs.reverse();
        }
        {
            let mut closed: Vec<Complex64> = vs.clone();
            closed.push(vs[0]);
            if let Some((i, j)) = polyline_self_intersection(&closed) {
                return Err(Error::Geometry(format!(
                    "polygon is not simple: edges {i} and {j} intersect"
                )));
            }
        }

        let n = vs.len();
        let r = fillet_radius;
        let mut dirs = Vec::with_capacity(n);
        for k in 0..n {
            let d = vs[(k + 1) % n] - vs[k];
            let len = d.norm();
            if len == 0.0 {
                return Err(Error::Geometry("polygon has a zero-length edge".into()));
            }
            dirs.push(d / len);
        }
        // Outward normal of a CCW polygon is the edge direction rotated -90.
        let normals: Vec<Complex64> = dirs
            .iter()
            .map(|d| Complex64::new(d.im, -d.re))
            .collect();

        let mut pieces: Vec<PathPiece> = Vec::with_capacity(2 * n);
        let mut acc = 0.0;
        let start_point = vs[0] + r * normals[0];
        for k in 0..n {
            // Offset edge k.
            let a = vs[k] + r * normals[k];
            let b = vs[(k + 1) % n] + r * normals[k];
            let len = (b - a).norm();
            pieces.push(PathPiece::Line {
                a,
                b,
                start: acc,
                len,
            });
            acc += len;
            // Arc around vertex k+1 joining normal k to normal k+1.
            let k1 = (k + 1) % n;
            let cross = dirs[k].re * dirs[k1].im - dirs[k].im * dirs[k1].re;
            let dot = dirs[k].re * dirs[k1].re + dirs[k].im * dirs[k1].im;
            if cross.abs() < 1e-14 && dot < 0.0 {
                return Err(Error::Geometry(format!(
                    "polygon edge {k} doubles back on itself"
                )));
            }
            let a0 = normals[k].im.atan2(normals[k].re);
            let a1 = normals[k1].im.atan2(normals[k1].re);
            let mut sweep = a1 - a0;
            // Convex vertex (left turn): positive sweep; reflex: negative.
            if cross >= 0.0 {
                sweep = sweep.rem_euclid(2.0 * std::f64::consts::PI);
            } else {
                sweep = -((-sweep).rem_euclid(2.0 * std::f64::consts::PI));
            }
            let len = r * sweep.abs();
            if len > 1e-12 * r.max(1.0) {
                pieces.push(PathPiece::Arc {
                    center: vs[k1],
                    radius: r,
                    a0,
                    sweep,
                    start: acc,
                    len,
                });
                acc += len;
            }
        }
        let total_len = acc;

        // Sample each piece, sharing exact junction points.
        let mut samples: Vec<(f64, Complex64)> = Vec::new();
        for piece in &pieces {
            let m = ((piece.len() * density).ceil() as usize).max(2);
            for j in 0..m {
                let s = piece.len() * j as f64 / m as f64;
                let t = (piece.start() + s) / total_len;
                samples.push((t, piece.point_at_len(s)));
            }
        }
        samples.push((1.0, start_point));
        samples[0].1 = start_point;

        let gen = CurveGen::Pieces {
            pieces: Arc::new(pieces),
            total_len,
        };
        let curve = Self::finish(samples, gen, false)?;
        if curve.orientation != 1 {
            return Err(Error::Internal(
                "rounded polygon came out negatively oriented".into(),
            ));
        }
        Ok(curve)
    }

    fn finish(
        samples: Vec<(f64, Complex64)>,
        gen: CurveGen,
        reversed: bool,
    ) -> Result<JordanCurve> {
        let pts: Vec<Complex64> = samples.iter().map(|&(_, p)| p).collect();
        if let Some((i, j)) = polyline_self_intersection(&pts) {
            return Err(Error::Geometry(format!(
                "curve is not simple: segments {i} and {j} intersect"
            )));
        }
        let area = polyline_signed_area(&pts);
        let orientation = if area >= 0.0 { 1 } else { -1 };
        let diameter = bbox_of(&pts).diagonal();
        Ok(JordanCurve {
            samples,
            gen,
            reversed,
            orientation,
            diameter,
        })
    }

    pub fn samples(&self) -> &[(f64, Complex64)] {
        &self.samples
    }

    /// Sample points without the duplicated closure point.
    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.samples[..self.samples.len() - 1].iter().map(|&(_, p)| p)
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    /// Diagonal of the bounding box; the scale reference for relative bands.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn bbox(&self) -> Rect {
        bbox_of_pairs(&self.samples)
    }

    /// Exact curve point at parameter t (wrapped into [0, 1)).
    pub fn point_at(&self, t: f64) -> Complex64 {
        let t = t.rem_euclid(1.0);
        let t = if self.reversed { 1.0 - t } else { t };
        gen_point(&self.gen, t)
    }

    /// Positively oriented copy (flips the parameterization if needed).
    pub fn normalize(&self) -> JordanCurve {
        if self.orientation == 1 {
            return self.clone();
        }
        let n = self.samples.len();
        let mut samples = Vec::with_capacity(n);
        for k in (0..n).rev() {
            let (t, p) = self.samples[k];
            samples.push((1.0 - t, p));
        }
        samples[0].0 = 0.0;
        samples.last_mut().unwrap().0 = 1.0;
        JordanCurve {
            samples,
            gen: self.gen.clone(),
            reversed: !self.reversed,
            orientation: -self.orientation,
            diameter: self.diameter,
        }
    }

    /// Insert true curve points until no chord exceeds `max_spacing`.
    pub fn refine(&self, max_spacing: f64) -> Result<JordanCurve> {
        if !(max_spacing.is_finite() && max_spacing > 0.0) {
            return Err(Error::Config(format!(
                "max_spacing must be positive, got {max_spacing}"
            )));
        }
        let mut samples = self.samples.clone();
        loop {
            let mut refined = Vec::with_capacity(samples.len() * 2);
            let mut any = false;
            for k in 0..samples.len() - 1 {
                let (t0, p0) = samples[k];
                let (t1, p1) = samples[k + 1];
                refined.push((t0, p0));
                if (p1 - p0).norm() > max_spacing {
                    let tm = 0.5 * (t0 + t1);
                    refined.push((tm, self.point_at(tm)));
                    any = true;
                }
            }
            refined.push(*samples.last().unwrap());
            if refined.len() > MAX_REFINED_SAMPLES {
                return Err(Error::Config(format!(
                    "refinement to spacing {max_spacing} needs more than {MAX_REFINED_SAMPLES} samples"
                )));
            }
            samples = refined;
            if !any {
                break;
            }
        }
        Ok(JordanCurve {
            samples,
            gen: self.gen.clone(),
            reversed: self.reversed,
            orientation: self.orientation,
            diameter: self.diameter,
        })
    }

    pub fn signed_area(&self) -> f64 {
        let pts: Vec<Complex64> = self.samples.iter().map(|&(_, p)| p).collect();
        polyline_signed_area(&pts)
    }

    /// Distance from `w` to the curve: polyline distance sharpened by a
    /// golden-section search on the exact parameterization around the
    /// nearest segment.
    pub fn distance_to(&self, w: Complex64) -> f64 {
        self.nearest(w).1
    }

    /// Parameter of (approximately) the nearest curve point, with distance.
    pub fn nearest(&self, w: Complex64) -> (f64, f64) {
        let n = self.samples.len();
        let mut best_d = f64::INFINITY;
        let mut best_k = 0;
        let mut best_t = 0.0;
        for k in 0..n - 1 {
            let (t0, p0) = self.samples[k];
            let (t1, p1) = self.samples[k + 1];
            let (u, d) = point_segment_nearest(w, p0, p1);
            if d < best_d {
                best_d = d;
                best_k = k;
                best_t = t0 + u * (t1 - t0);
            }
        }
        // Sharpen on the true curve over the two segments around the hit.
        let lo = self.samples[best_k.saturating_sub(1)].0;
        let hi = self.samples[(best_k + 2).min(n - 1)].0;
        let (t_ref, d_ref) = golden_min(
            |t| (self.point_at(t) - w).norm(),
            lo,
            hi,
            60,
        );
        if d_ref < best_d {
            (t_ref.rem_euclid(1.0), d_ref)
        } else {
            (best_t, best_d)
        }
    }

    /// Winding number about `w`, using the default exclusion band
    /// (`ToleranceConfig::default().boundary_band` x diameter).
    pub fn winding_number(&self, w: Complex64) -> Result<i64> {
        let band = ToleranceConfig::default().boundary_band * self.diameter;
        self.winding_number_with_band(w, band)
    }

    /// Winding number about `w` with an explicit exclusion band. Segments
    /// whose subtended angle reaches pi/2 are bisected on the exact curve
    /// before summing, and a non-integer residual above 0.25 turns is an
    /// error rather than a rounded guess.
    pub fn winding_number_with_band(&self, w: Complex64, band: f64) -> Result<i64> {
        let distance = self.distance_to(w);
        if distance <= band {
            return Err(Error::TooCloseToCurve { distance, band });
        }
        let mut pts: Vec<(f64, Complex64)> = self.samples.clone();
        for _round in 0..24 {
            let mut next = Vec::with_capacity(pts.len());
            let mut any = false;
            for k in 0..pts.len() - 1 {
                let (t0, p0) = pts[k];
                let (t1, p1) = pts[k + 1];
                next.push((t0, p0));
                if angle_step(p0 - w, p1 - w).abs() >= std::f64::consts::FRAC_PI_2 {
                    let tm = 0.5 * (t0 + t1);
                    next.push((tm, self.point_at(tm)));
                    any = true;
                }
            }
            next.push(*pts.last().unwrap());
            if next.len() > MAX_REFINED_SAMPLES {
                return Err(Error::TooCloseToCurve { distance, band });
            }
            pts = next;
            if !any {
                break;
            }
        }
        let mut total = 0.0;
        for k in 0..pts.len() - 1 {
            total += angle_step(pts[k].1 - w, pts[k + 1].1 - w);
        }
        let turns = total / (2.0 * std::f64::consts::PI);
        let rounded = turns.round();
        if (turns - rounded).abs() >= 0.25 {
            return Err(Error::TooCloseToCurve { distance, band });
        }
        Ok(rounded as i64)
    }

    /// Classify `w` against the curve. `NearBoundary` exactly when the
    /// distance is within `boundary_band` x diameter; otherwise Inside/Outside
    /// by winding number (+-1 means inside; the curve need not be normalized).
    pub fn locate_point(&self, w: Complex64, cfg: &ToleranceConfig) -> Result<PointLocation> {
        let band = cfg.boundary_band * self.diameter;
        self.locate_point_with_band(w, band)
    }

    pub fn locate_point_with_band(&self, w: Complex64, band: f64) -> Result<PointLocation> {
        let distance = self.distance_to(w);
        if distance <= band {
            return Ok(PointLocation {
                location: Location::NearBoundary,
                distance,
            });
        }
        let winding = self.winding_number_with_band(w, band)?;
        let location = if winding == 0 {
            Location::Outside
        } else {
            Location::Inside
        };
        Ok(PointLocation { location, distance })
    }
}

fn gen_point(gen: &CurveGen, t: f64) -> Complex64 {
    match gen {
        CurveGen::Circle { center, radius } => {
            let ang = 2.0 * std::f64::consts::PI * t;
            center + radius * Complex64::new(ang.cos(), ang.sin())
        }
        CurveGen::Polyline { pts } => {
            let n = pts.len();
            // Find the segment whose parameter range contains t.
            let mut lo = 0;
            let mut hi = n - 1;
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if pts[mid].0 <= t {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (t0, p0) = pts[lo];
            let (t1, p1) = pts[hi];
            if t1 <= t0 {
                return p0;
            }
            let u = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
            p0 + (p1 - p0) * u
        }
        CurveGen::Pieces { pieces, total_len } => {
            let s = (t * total_len).clamp(0.0, *total_len);
            let mut lo = 0;
            let mut hi = pieces.len();
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if pieces[mid].start() <= s {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            pieces[lo].point_at_len(s - pieces[lo].start())
        }
    }
}

/// Principal argument of b relative to a: arg(b/a) in (-pi, pi].
pub(crate) fn angle_step(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg()
}

fn point_segment_nearest(w: Complex64, a: Complex64, b: Complex64) -> (f64, f64) {
    let ab = b - a;
    let denom = ab.norm_sqr();
    if denom == 0.0 {
        return (0.0, (w - a).norm());
    }
    let u = (((w - a).re * ab.re + (w - a).im * ab.im) / denom).clamp(0.0, 1.0);
    let p = a + ab * u;
    (u, (w - p).norm())
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn polyline_signed_area(pts: &[Complex64]) -> f64 {
    let mut area = 0.0;
    for k in 0..pts.len().saturating_sub(1) {
        area += pts[k].re * pts[k + 1].im - pts[k + 1].re * pts[k].im;
    }
    0.5 * area
}

fn polygon_signed_area(vs: &[Complex64]) -> f64 {
    let mut area = 0.0;
    for k in 0..vs.len() {
        let a = vs[k];
        let b = vs[(k + 1) % vs.len()];
        area += a.re * b.im - b.re * a.im;
    }
    0.5 * area
}

fn bbox_of(pts: &[Complex64]) -> Rect {
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo.re = lo.re.min(p.re);
        lo.im = lo.im.min(p.im);
        hi.re = hi.re.max(p.re);
        hi.im = hi.im.max(p.im);
    }
    Rect { lo, hi }
}

fn bbox_of_pairs(samples: &[(f64, Complex64)]) -> Rect {
    let pts: Vec<Complex64> = samples.iter().map(|&(_, p)| p).collect();
    bbox_of(&pts)
}

fn orient2d(a: Complex64, b: Complex64, c: Complex64, eps: f64) -> i8 {
    let v = (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re);
    if v > eps {
        1
    } else if v < -eps {
        -1
    } else {
        0
    }
}

fn on_segment(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re)
        && p.re <= a.re.max(b.re)
        && p.im >= a.im.min(b.im)
        && p.im <= a.im.max(b.im)
}

fn segments_intersect(p1: Complex64, p2: Complex64, p3: Complex64, p4: Complex64) -> bool {
    let scale = (p2 - p1).norm().max((p4 - p3).norm()).max(1e-300);
    let eps = 1e-14 * scale * scale;
    let d1 = orient2d(p3, p4, p1, eps);
    let d2 = orient2d(p3, p4, p2, eps);
    let d3 = orient2d(p1, p2, p3, eps);
    let d4 = orient2d(p1, p2, p4, eps);
    if d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0 {
        return true;
    }
    (d1 == 0 && on_segment(p3, p4, p1))
        || (d2 == 0 && on_segment(p3, p4, p2))
        || (d3 == 0 && on_segment(p1, p2, p3))
        || (d4 == 0 && on_segment(p1, p2, p4))
}

/// Check a closed polyline (last point == first) for self-intersection;
/// returns the first offending segment pair. Adjacent segments are allowed
/// to share their common endpoint only.
fn polyline_self_intersection(pts: &[Complex64]) -> Option<(usize, usize)> {
    let n = pts.len().saturating_sub(1);
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Shared endpoint is fine; interior overlap is not. Test the
                // segments with the shared vertex trimmed off slightly.
                let (a1, a2) = (pts[i], pts[i + 1]);
                let (b1, b2) = (pts[j], pts[j + 1]);
                let shrink = |p: Complex64, q: Complex64| p + (q - p) * 1e-9;
                let (a1s, a2s, b1s, b2s) = if j == i + 1 {
                    (a1, shrink(a2, a1), shrink(b1, b2), b2)
                } else {
                    (shrink(a1, a2), a2, b1, shrink(b2, b1))
                };
                if segments_intersect(a1s, a2s, b1s, b2s) {
                    return Some((i, j));
                }
            } else if segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_circle() -> JordanCurve {
        JordanCurve::circle(c(0.0, 0.0), 1.0, 256).unwrap()
    }

    #[test]
    fn winding_inside_outside_reversed() {
        let s = unit_circle();
        assert_eq!(s.winding_number(c(0.3, 0.1)).unwrap(), 1);
        assert_eq!(s.winding_number(c(2.0, 0.0)).unwrap(), 0);
        let rev = {
            let pts: Vec<Complex64> = s.points().collect();
            let mut rpts: Vec<Complex64> = pts.into_iter().rev().collect();
            rpts.rotate_right(1);
            JordanCurve::from_samples(&rpts).unwrap()
        };
        assert_eq!(rev.winding_number(c(0.3, 0.1)).unwrap(), -1);
        assert_eq!(rev.orientation(), -1);
    }

    #[test]
    fn winding_on_curve_is_an_error() {
        let s = unit_circle();
        assert!(matches!(
            s.winding_number(c(1.0, 0.0)),
            Err(Error::TooCloseToCurve { .. })
        ));
    }

    #[test]
    fn locate_point_cases() {
        let s = unit_circle();
        let cfg = ToleranceConfig::default();
        assert_eq!(
            s.locate_point(c(0.5, 0.0), &cfg).unwrap().location,
            Location::Inside
        );
        assert_eq!(
            s.locate_point(c(3.0, -1.0), &cfg).unwrap().location,
            Location::Outside
        );
        let near = s.locate_point(c(1.0 + 1e-12, 0.0), &cfg).unwrap();
        assert_eq!(near.location, Location::NearBoundary);
        assert!(near.distance <= cfg.boundary_band * s.diameter());
    }

    #[test]
    fn normalize_flips_negative_orientation_and_is_idempotent() {
        let cw: Vec<Complex64> = (0..64)
            .map(|k| {
                let a = -2.0 * std::f64::consts::PI * k as f64 / 64.0;
                c(a.cos(), a.sin())
            })
            .collect();
        let s = JordanCurve::from_samples(&cw).unwrap();
        assert_eq!(s.orientation(), -1);
        let n = s.normalize();
        assert_eq!(n.orientation(), 1);
        assert!(n.signed_area() > 0.0);
        assert_eq!(n.winding_number(c(0.0, 0.0)).unwrap(), 1);
        let nn = n.normalize();
        assert_eq!(nn.orientation(), 1);
        assert_eq!(nn.samples().len(), n.samples().len());
        // Generator still agrees with the flipped samples.
        for &(t, p) in nn.samples().iter().step_by(7) {
            assert!((nn.point_at(t) - p).norm() < 1e-12);
        }
    }

    #[test]
    fn refine_adds_true_circle_points() {
        let s = JordanCurve::circle(c(0.0, 0.0), 1.0, 16).unwrap();
        let r = s.refine(0.01).unwrap();
        assert!(r.samples().len() > s.samples().len());
        for k in 0..r.samples().len() - 1 {
            let (_, p0) = r.samples()[k];
            let (_, p1) = r.samples()[k + 1];
            assert!((p1 - p0).norm() <= 0.01 + 1e-12);
            assert!((p0.norm() - 1.0).abs() < 1e-12, "refined point off circle");
        }
    }

    #[test]
    fn refine_rejects_nonpositive_spacing() {
        let s = unit_circle();
        assert!(matches!(s.refine(0.0), Err(Error::Config(_))));
        assert!(matches!(s.refine(-1.0), Err(Error::Config(_))));
    }

    #[test]
    fn rounded_square_contains_polygon_and_is_smooth() {
        let square = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)];
        let k = JordanCurve::rounded_polygon(&square, 0.1, 64.0).unwrap();
        let cfg = ToleranceConfig::default();
        for v in square {
            assert_eq!(
                k.locate_point(v, &cfg).unwrap().location,
                Location::Inside,
                "vertex {v} should be strictly inside the offset curve"
            );
        }
        // Area of the offset region: 1 + perimeter*r + pi r^2.
        let expected = 1.0 + 4.0 * 0.1 + std::f64::consts::PI * 0.01;
        assert!((k.signed_area() - expected).abs() < 2e-3);
        // C1 in the sampled sense: consecutive chord directions turn slowly.
        let pts: Vec<Complex64> = k.samples().iter().map(|&(_, p)| p).collect();
        for w in pts.windows(3) {
            let d1 = w[1] - w[0];
            let d2 = w[2] - w[1];
            if d1.norm() > 0.0 && d2.norm() > 0.0 {
                assert!(angle_step(d1, d2).abs() < 0.3, "kink in offset curve");
            }
        }
    }

    #[test]
    fn rounded_triangle_and_tall_quad_build() {
        let tri = [c(0.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)];
        JordanCurve::rounded_polygon(&tri, 0.05, 64.0).unwrap();
        let quad = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 8.0), c(0.0, 2.0)];
        let k = JordanCurve::rounded_polygon(&quad, 0.05, 32.0).unwrap();
        assert_eq!(k.orientation(), 1);
        // The tall vertex is inside the offset curve.
        let cfg = ToleranceConfig::default();
        assert_eq!(
            k.locate_point(c(1.0, 8.0), &cfg).unwrap().location,
            Location::Inside
        );
    }

    #[test]
    fn degenerate_polygons_are_rejected() {
        let two = [c(0.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(
            JordanCurve::rounded_polygon(&two, 0.1, 32.0),
            Err(Error::Geometry(_))
        ));
        let bowtie = [c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)];
        assert!(matches!(
            JordanCurve::rounded_polygon(&bowtie, 0.05, 32.0),
            Err(Error::Geometry(_))
        ));
        assert!(matches!(
            JordanCurve::rounded_polygon(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)], 0.0, 32.0),
            Err(Error::Geometry(_))
        ));
        let self_x = [c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.5)];
        assert!(JordanCurve::from_samples(&self_x).is_err());
    }

    #[test]
    fn point_at_matches_samples() {
        let quad = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 8.0), c(0.0, 2.0)];
        for curve in [
            unit_circle(),
            JordanCurve::rounded_polygon(&quad, 0.05, 32.0).unwrap(),
            JordanCurve::from_samples(&[c(0.0, 0.0), c(2.0, 0.0), c(1.0, 2.0)]).unwrap(),
        ] {
            for &(t, p) in curve.samples() {
                assert!(
                    (curve.point_at(t) - p).norm() < 1e-9,
                    "point_at({t}) diverges from stored sample"
                );
            }
        }
    }

    #[test]
    fn distance_uses_exact_curve_not_chords() {
        // With only 32 samples the chord sag is ~5e-3; the sharpened
        // distance must still see the true circle.
        let s = JordanCurve::circle(c(0.0, 0.0), 1.0, 32).unwrap();
        let w = {
            // Midway between two samples, just outside the circle.
            let t = 0.5 / 32.0;
            s.point_at(t) * 1.000001
        };
        let d = s.distance_to(w);
        assert!(
            (d - 1e-6).abs() < 1e-8,
            "expected ~1e-6 true distance, got {d:.3e}"
        );
    }

    #[test]
    fn winding_is_constant_along_paths_avoiding_the_curve() {
        use rand::{Rng, SeedableRng};
        let s = unit_circle();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0003);
        let mut done = 0;
        while done < 60 {
            let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let b = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            // Keep segments clear of the curve so the winding is defined.
            let clear = (0..=40).all(|k| {
                let p = a + (b - a) * (k as f64 / 40.0);
                (p.norm() - 1.0).abs() > 0.05
            });
            if !clear {
                continue;
            }
            let wa = s.winding_number(a).unwrap();
            let wb = s.winding_number(b).unwrap();
            // If the segment never crosses the circle, windings agree.
            let crosses = (a.norm() - 1.0).signum() != (b.norm() - 1.0).signum();
            if !crosses {
                assert_eq!(wa, wb, "winding changed between {a} and {b}");
            }
            done += 1;
        }
    }

    #[test]
    fn rect_boundary_walk_is_counterclockwise() {
        let r = Rect::new(c(0.0, 0.0), c(2.0, 1.0)).unwrap();
        assert_eq!(r.boundary_point(0.0), c(0.0, 0.0));
        assert_eq!(r.boundary_point(0.25), c(2.0, 0.0));
        assert_eq!(r.boundary_point(0.5), c(2.0, 1.0));
        assert_eq!(r.boundary_point(0.75), c(0.0, 1.0));
        assert!(Rect::new(c(1.0, 0.0), c(0.0, 1.0)).is_err());
    }
}
