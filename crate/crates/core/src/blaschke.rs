//! Finite Blaschke products on the unit disk and ratio-of-products models:
//! a function that maps the unit circle to itself (up to tolerance) is
//! λ·A(z)/B(z) for Blaschke products A, B whose zeros are the zeros and
//! poles of the function inside the disk. `fit_ratio_model` recovers that
//! representation numerically.

use num_complex::Complex64;
use serde::Serialize;

use crate::complex::{serialize_c64, serialize_c64_slice, ComplexValue};
use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::expr::{Expr, FunctionDef};
use crate::geometry::Rect;
use crate::locator::{isolate, LocatorConfig, PointKind};

/// Boundary deviation above which a function is not accepted as mapping the
/// unit circle to itself.
pub const MODEL_BAND: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct BlaschkeProduct {
    /// Zeros inside the open unit disk, repeated per multiplicity.
    #[serde(serialize_with = "serialize_c64_slice")]
    pub zeros: Vec<Complex64>,
    #[serde(serialize_with = "serialize_c64")]
    pub unimodular_constant: Complex64,
}

impl BlaschkeProduct {
    /// A product λ·Π (z - a)/(1 - ā z). Every zero must lie strictly inside
    /// the unit disk and λ must be unimodular (within 1e-9; it is then
    /// renormalized exactly).
    pub fn build(zeros: Vec<Complex64>, constant: Complex64) -> Result<BlaschkeProduct> {
        for &a in &zeros {
            let modulus = a.norm();
            if !modulus.is_finite() || modulus >= 1.0 {
                return Err(Error::InvalidZero { zero: a, modulus });
            }
        }
        let modulus = constant.norm();
        if !modulus.is_finite() || (modulus - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConstant { modulus });
        }
        Ok(BlaschkeProduct {
            zeros,
            unimodular_constant: constant / modulus,
        })
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn eval(&self, z: Complex64) -> ComplexValue {
        let mut acc = self.unimodular_constant;
        for &a in &self.zeros {
            let den = Complex64::new(1.0, 0.0) - a.conj() * z;
            if den.norm() == 0.0 {
                return ComplexValue::Infinity;
            }
            acc *= (z - a) / den;
        }
        ComplexValue::clamped(acc)
    }

    fn factor_expr(a: Complex64) -> Expr {
        Expr::Div(
            Box::new(Expr::Sub(
                Box::new(Expr::Var),
                Box::new(Expr::Const(a)),
            )),
            Box::new(Expr::Sub(
                Box::new(Expr::constant(1.0, 0.0)),
                Box::new(Expr::Mul(
                    Box::new(Expr::Const(a.conj())),
                    Box::new(Expr::Var),
                )),
            )),
        )
    }

    fn expr(&self) -> Expr {
        let mut acc = Expr::Const(self.unimodular_constant);
        for &a in &self.zeros {
            acc = Expr::Mul(Box::new(acc), Box::new(Self::factor_expr(a)));
        }
        acc.simplified()
    }

    /// The product as a parsed function, with its exact symbolic derivative.
    pub fn to_function_def(&self) -> FunctionDef {
        FunctionDef::from_expr(self.expr())
    }
}

/// λ·A(z)/B(z) for Blaschke products A (carrying λ) and B (unit constant),
/// together with the largest chordal deviation from the function it models.
#[derive(Clone, Debug, Serialize)]
pub struct RatioModel {
    pub numerator: BlaschkeProduct,
    pub denominator: BlaschkeProduct,
    /// Largest chordal distance between model and function over a polar grid
    /// of the closed unit disk.
    pub max_model_error: f64,
}

impl RatioModel {
    pub fn eval(&self, z: Complex64) -> ComplexValue {
        match (self.numerator.eval(z), self.denominator.eval(z)) {
            (ComplexValue::Finite(a), ComplexValue::Finite(b)) => {
                if b.norm() == 0.0 {
                    ComplexValue::Infinity
                } else {
                    ComplexValue::clamped(a / b)
                }
            }
            (ComplexValue::Finite(_), ComplexValue::Infinity) => {
                ComplexValue::Finite(Complex64::new(0.0, 0.0))
            }
            (ComplexValue::Infinity, _) => ComplexValue::Infinity,
        }
    }

    pub fn to_function_def(&self) -> FunctionDef {
        FunctionDef::from_expr(
            Expr::Div(
                Box::new(self.numerator.expr()),
                Box::new(self.denominator.expr()),
            )
            .simplified(),
        )
    }
}

/// Largest deviation of |B| from 1 over `n` equispaced points of the unit
/// circle.
pub fn verify_unimodular(b: &BlaschkeProduct, n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let z = Complex64::new(th.cos(), th.sin());
        let dev = match b.eval(z) {
            ComplexValue::Finite(v) => (v.norm() - 1.0).abs(),
            ComplexValue::Infinity => f64::INFINITY,
        };
        worst = worst.max(dev);
    }
    worst
}

fn boundary_deviation(f: &FunctionDef, n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let z = Complex64::new(th.cos(), th.sin());
        let dev = match f.eval_c64(z)? {
            ComplexValue::Finite(v) => (v.norm() - 1.0).abs(),
            ComplexValue::Infinity => f64::INFINITY,
        };
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Fit λ·A/B to a function that maps the unit circle to itself: A collects
/// the zeros of f in the disk, B the poles, and λ is read off at a reference
/// point. Fails with `NotBoundaryUnimodular` when |f| strays from 1 on the
/// circle by more than [`MODEL_BAND`].
pub fn fit_ratio_model(f: &FunctionDef, cfg: &ToleranceConfig) -> Result<RatioModel> {
    let deviation = boundary_deviation(f, 512)?;
    if deviation > MODEL_BAND {
        return Err(Error::NotBoundaryUnimodular { deviation });
    }

    // Zeros/poles of f across the disk. The search box extends past |z| = 1
    // (reflections of interior points across the circle may fall inside it;
    // the |z| < 1 filter drops them) and its half-width is re-jittered when a
    // root lands exactly on the box edge.
    let mut records = None;
    let mut last = Error::Internal("no isolation attempted".into());
    for half in [1.1, 1.13, 1.073, 1.161] {
        let rect = Rect::new(
            Complex64::new(-half, -half),
            Complex64::new(half, half),
        )?;
        let lcfg = LocatorConfig::for_rect(&rect, cfg);
        match isolate(f, &rect, &lcfg) {
            Ok(r) => {
                records = Some(r);
                break;
            }
            Err(e @ Error::BoundaryHit { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    let records = match records {
        Some(r) => r,
        None => return Err(last),
    };

    let mut zeros = Vec::new();
    let mut poles = Vec::new();
    for rec in records {
        if rec.location.norm() >= 1.0 {
            continue;
        }
        let bucket = match rec.kind {
            PointKind::Zero => &mut zeros,
            PointKind::Pole => &mut poles,
            PointKind::CriticalPoint => continue,
        };
        for _ in 0..rec.order {
            bucket.push(rec.location);
        }
    }

    let one = Complex64::new(1.0, 0.0);
    let a = BlaschkeProduct::build(zeros, one)?;
    let b = BlaschkeProduct::build(poles, one)?;

    // λ = f·B/A at a reference point clear of all zeros and poles.
    let mut lambda = None;
    for &(re, im) in &[(0.37, 0.21), (-0.29, 0.43), (0.11, -0.53), (-0.41, -0.17)] {
        let z0 = Complex64::new(re, im);
        let (av, bv) = match (a.eval(z0), b.eval(z0)) {
            (ComplexValue::Finite(x), ComplexValue::Finite(y)) => (x, y),
            _ => continue,
        };
        if av.norm() < 1e-6 || bv.norm() < 1e-6 {
            continue;
        }
        let fv = match f.eval_c64(z0)? {
            ComplexValue::Finite(v) => v,
            ComplexValue::Infinity => continue,
        };
        let raw = fv * bv / av;
        if raw.norm() > 0.0 && raw.norm().is_finite() {
            lambda = Some(raw / raw.norm());
            break;
        }
    }
    let lambda = lambda.ok_or_else(|| {
        Error::Internal("no usable reference point for the unimodular constant".into())
    })?;

    let model = RatioModel {
        numerator: BlaschkeProduct {
            zeros: a.zeros,
            unimodular_constant: lambda,
        },
        denominator: b,
        max_model_error: 0.0,
    };

    // Largest chordal deviation over a polar grid of the closed disk.
    let mut worst: f64 = 0.0;
    for j in 0..64 {
        let r = j as f64 / 63.0;
        for k in 0..64 {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
            let z = r * Complex64::new(th.cos(), th.sin());
            let fv = f.eval_c64(z)?;
            let mv = model.eval(z);
            worst = worst.max(fv.chordal_distance(&mv));
        }
    }

    Ok(RatioModel {
        max_model_error: worst,
        ..model
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit() -> Complex64 {
        c(1.0, 0.0)
    }

    #[test]
    fn build_rejects_zeros_outside_the_disk() {
        match BlaschkeProduct::build(vec![c(1.0, 0.2)], unit()) {
            Err(Error::InvalidZero { modulus, .. }) => assert!(modulus >= 1.0),
            other => panic!("expected InvalidZero, got {other:?}"),
        }
        assert!(matches!(
            BlaschkeProduct::build(vec![c(0.3, 0.0)], c(0.9, 0.0)),
            Err(Error::InvalidConstant { .. })
        ));
    }

    #[test]
    fn product_is_unimodular_on_the_circle_and_vanishes_at_zeros() {
        let b = BlaschkeProduct::build(
            vec![c(0.5, 0.0), c(-0.2, 0.3), c(0.0, 0.0)],
            c(0.0, 1.0),
        )
        .unwrap();
        assert!(verify_unimodular(&b, 257) < 1e-12);
        for &a in &b.zeros {
            let v = b.eval(a).as_finite().unwrap();
            assert!(v.norm() < 1e-15);
        }
    }

    #[test]
    fn function_def_matches_direct_evaluation() {
        let b = BlaschkeProduct::build(vec![c(0.4, -0.1), c(-0.3, 0.2)], unit()).unwrap();
        let f = b.to_function_def();
        for k in 0..40 {
            let th = 0.157 * k as f64;
            let z = (0.05 * k as f64).min(1.9) * Complex64::new(th.cos(), th.sin());
            let direct = b.eval(z);
            let via_expr = f.eval_c64(z).unwrap();
            assert!(direct.chordal_distance(&via_expr) < 1e-12);
        }
    }

    #[test]
    fn fit_recovers_zeros_poles_and_constant() {
        // λ·A/B with A = z(z-0.5)/(1-0.5z), B = (z-0.3i)/(1+0.3i·z).
        let lam = Complex64::from_polar(1.0, 0.7);
        let a = BlaschkeProduct::build(vec![c(0.0, 0.0), c(0.5, 0.0)], lam).unwrap();
        let b = BlaschkeProduct::build(vec![c(0.0, 0.3)], unit()).unwrap();
        let f = RatioModel {
            numerator: a,
            denominator: b,
            max_model_error: 0.0,
        }
        .to_function_def();

        let model = fit_ratio_model(&f, &ToleranceConfig::default()).unwrap();
        assert_eq!(model.numerator.degree(), 2);
        assert_eq!(model.denominator.degree(), 1);
        let mut zs = model.numerator.zeros.clone();
        zs.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert!((zs[0] - c(0.0, 0.0)).norm() < 1e-8);
        assert!((zs[1] - c(0.5, 0.0)).norm() < 1e-8);
        assert!((model.denominator.zeros[0] - c(0.0, 0.3)).norm() < 1e-8);
        assert!((model.numerator.unimodular_constant - lam).norm() < 1e-8);
        assert!(model.max_model_error < 1e-8);
    }

    #[test]
    fn fit_handles_repeated_zeros() {
        let b = BlaschkeProduct::build(vec![c(0.2, 0.1), c(0.2, 0.1)], unit()).unwrap();
        let model = fit_ratio_model(&b.to_function_def(), &ToleranceConfig::default()).unwrap();
        assert_eq!(model.numerator.degree(), 2);
        assert!((model.numerator.zeros[0] - model.numerator.zeros[1]).norm() < 1e-6);
        assert!((model.numerator.zeros[0] - c(0.2, 0.1)).norm() < 1e-4);
        // A double zero is only pinned down to roughly the square root of the
        // residual tolerance, so the model error bound is looser here.
        assert!(model.max_model_error < 1e-4);
    }

    #[test]
    fn non_unimodular_boundary_is_rejected() {
        let f = FunctionDef::parse("z^2 + 0.5").unwrap();
        match fit_ratio_model(&f, &ToleranceConfig::default()) {
            Err(Error::NotBoundaryUnimodular { deviation }) => assert!(deviation > 0.1),
            other => panic!("expected NotBoundaryUnimodular, got {other:?}"),
        }
    }
}
