//! Cross-module invariants, each pinned to a fixed seed so failures
//! reproduce exactly. Winding numbers here are recomputed from scratch
//! (plain angle summation over sampled paths) so the suite does not lean
//! on the library's own winding code to judge itself.

use num_complex::Complex64;
use pseudolem::analysis::{self, SamplePlan, Verdict};
use pseudolem::blaschke::{fit_ratio_model, BlaschkeProduct, RatioModel};
use pseudolem::counting;
use pseudolem::geometry::Rect;
use pseudolem::locator::{self, LocatorConfig, PointKind};
use pseudolem::trace;
use pseudolem::{ComplexValue, Error, FunctionDef, JordanCurve, ToleranceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS: &[&str] = &[
    "z^2",
    "exp(z)",
    "1/z",
    "z^3 - 3*z + 1",
    "(z^2 + 1)/(z - 2)",
    "z*(z - 0.5)/(1 - 0.5*z)",
    "sin(z)",
    "log(z + 3)",
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn parse(text: &str) -> FunctionDef {
    FunctionDef::parse(text).unwrap()
}

fn unit_circle() -> JordanCurve {
    JordanCurve::circle(c(0.0, 0.0), 1.0, 256).unwrap()
}

/// Winding of the closed polygon `points` about `w`, by angle summation.
fn winding_about(points: &[Complex64], w: Complex64) -> i64 {
    let mut total = 0.0;
    for k in 0..points.len() {
        let a = points[k] - w;
        let b = points[(k + 1) % points.len()] - w;
        total += (b * a.conj()).arg();
    }
    (total / std::f64::consts::TAU).round() as i64
}

fn shoelace(points: &[Complex64]) -> f64 {
    let mut area = 0.0;
    for k in 0..points.len() {
        let a = points[k];
        let b = points[(k + 1) % points.len()];
        area += a.re * b.im - b.re * a.im;
    }
    0.5 * area
}

/// N_f(w), or None when w hugs the image too closely to count.
fn count(f: &FunctionDef, s: &JordanCurve, w: ComplexValue) -> Option<u32> {
    match counting::count_preimages(f, s, w, &ToleranceConfig::default()) {
        Ok(report) => Some(report.count),
        Err(Error::TooCloseToImage { .. }) => None,
        Err(e) => panic!("count failed: {e}"),
    }
}

#[test]
fn symbolic_derivatives_match_central_differences() {
    let h = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for text in CORPUS {
        let f = parse(text);
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < 200 {
            attempts += 1;
            assert!(attempts < 100_000, "could not sample {text}");
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if z.norm() > 2.0 {
                continue;
            }
            let fetch = |p: Complex64| f.eval_c64(p).ok().and_then(|v| v.as_finite());
            let (Some(fp), Some(fm)) = (fetch(z + h), fetch(z - h)) else {
                continue;
            };
            let Some(exact) = f.eval_derivative_c64(z).ok().and_then(|v| v.as_finite()) else {
                continue;
            };
            // Near a pole the difference quotient itself is hopeless; the
            // invariant is about regular points.
            if exact.norm() > 1e3 {
                continue;
            }
            let numeric = (fp - fm) / (2.0 * h);
            assert!(
                (exact - numeric).norm() <= 1e-6 * (1.0 + exact.norm()),
                "{text} at {z}: symbolic {exact}, central difference {numeric}"
            );
            accepted += 1;
        }
    }
}

#[test]
fn reparsing_a_printed_function_preserves_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for text in CORPUS {
        let f = parse(text);
        let again = parse(&f.to_string());
        for _ in 0..100 {
            let z = ComplexValue::clamped(c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
            let a = f.eval(z);
            let b = again.eval(z);
            match (a, b) {
                (Ok(a), Ok(b)) => assert_eq!(a.chordal_distance(&b), 0.0, "{text} at {z:?}"),
                (a, b) => panic!("{text} at {z:?}: {a:?} vs {b:?}"),
            }
        }
    }
}

#[test]
fn winding_is_constant_off_the_curve() {
    let quad = JordanCurve::rounded_polygon(
        &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 8.0), c(0.0, 2.0)],
        0.05,
        24.0,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for curve in [unit_circle(), quad] {
        let bbox = curve.bbox().inflate(1.5);
        let clearance = 0.02 * curve.diameter();
        let mut paths = 0;
        let mut attempts = 0;
        while paths < 100 {
            attempts += 1;
            assert!(attempts < 100_000);
            let draw = |rng: &mut ChaCha8Rng| {
                c(
                    rng.gen_range(bbox.lo.re..bbox.hi.re),
                    rng.gen_range(bbox.lo.im..bbox.hi.im),
                )
            };
            let (a, b) = (draw(&mut rng), draw(&mut rng));
            // The certificate that the segment stays clear of the curve
            // needs sampling finer than the clearance itself, so a crossing
            // cannot slip between consecutive checkpoints.
            let dense: Vec<Complex64> =
                (0..=400).map(|k| a + (b - a) * (k as f64 / 400.0)).collect();
            if dense.iter().any(|z| curve.distance_to(*z) < clearance) {
                continue;
            }
            let reference = curve.winding_number(dense[0]).unwrap();
            for z in dense.iter().step_by(20) {
                assert_eq!(curve.winding_number(*z).unwrap(), reference);
            }
            paths += 1;
        }
    }
}

#[test]
fn normalized_curves_are_positively_oriented() {
    let clockwise: Vec<Complex64> = (0..128)
        .map(|k| {
            let th = -std::f64::consts::TAU * k as f64 / 128.0;
            c(th.cos(), th.sin())
        })
        .collect();
    let curves = [
        unit_circle(),
        JordanCurve::from_samples(&clockwise).unwrap(),
        JordanCurve::rounded_polygon(&[c(0.0, 0.0), c(4.0, 0.0), c(0.0, 4.0)], 0.1, 24.0).unwrap(),
        JordanCurve::rounded_polygon(
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 8.0), c(0.0, 2.0)],
            0.05,
            24.0,
        )
        .unwrap(),
    ];
    for curve in curves {
        assert!(curve.normalize().signed_area() > 0.0);
    }
}

#[test]
fn corpus_polygons_round_to_simple_curves() {
    let polygons: &[&[Complex64]] = &[
        &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 8.0), c(0.0, 2.0)],
        &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 4.0), c(0.0, 2.0)],
        &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)],
        &[c(0.0, 0.0), c(4.0, 0.0), c(0.0, 4.0)],
        &[c(-3.0, -0.5), c(3.0, -0.5), c(3.0, 0.5), c(-3.0, 0.5)],
    ];
    for vertices in polygons {
        let curve = JordanCurve::rounded_polygon(vertices, 0.05, 24.0).unwrap();
        assert!(curve.normalize().signed_area() > 0.0);
    }
    // The simplicity gate is live: a figure-eight is rejected.
    let eight = [c(0.0, 0.0), c(2.0, 2.0), c(2.0, 0.0), c(0.0, 2.0)];
    assert!(matches!(
        JordanCurve::from_samples(&eight),
        Err(Error::Geometry(_))
    ));
}

#[test]
fn counts_are_constant_on_faces_of_the_image_complement() {
    // z + 1/z maps the circle |z| = 2 onto an ellipse; the disk |z| < 2
    // covers the inside twice (z and 1/z) and the outside once (1/w branch;
    // the pole at 0 is the preimage of infinity).
    let f = parse("(z^2 + 1)/z");
    let s = JordanCurve::circle(c(0.0, 0.0), 2.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let sample = |lo: f64, hi: f64, rng: &mut ChaCha8Rng| {
        let rho = rng.gen_range(lo..hi);
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        let z = rho * c(th.cos(), th.sin());
        ComplexValue::Finite(z + 1.0 / z)
    };
    for _ in 0..10 {
        let w = sample(0.8, 1.6, &mut rng);
        assert_eq!(count(&f, &s, w), Some(2), "inside the ellipse at {w:?}");
    }
    for _ in 0..10 {
        let w = sample(2.6, 4.0, &mut rng);
        assert_eq!(count(&f, &s, w), Some(1), "outside the ellipse at {w:?}");
    }
    assert_eq!(count(&f, &s, ComplexValue::Infinity), Some(1));

    // A degree-2 Blaschke product on the unit circle: 2 inside, 0 outside.
    let b = parse("z*(z - 0.5)/(1 - 0.5*z)");
    let s = unit_circle();
    for _ in 0..10 {
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        let inside = ComplexValue::Finite(rng.gen_range(0.05..0.85) * c(th.cos(), th.sin()));
        let outside = ComplexValue::Finite(rng.gen_range(1.2..3.0) * c(th.cos(), th.sin()));
        assert_eq!(count(&b, &s, inside), Some(2));
        assert_eq!(count(&b, &s, outside), Some(0));
    }
}

#[test]
fn mobius_relabeling_of_the_target_preserves_counts() {
    // rho(w) = (w + 0.3i) / (0.2w + 1), a Mobius map with ad - bc != 0;
    // counting rho(f) at rho(w) must agree with counting f at w.
    let f_text = "z^2 - 0.5*z";
    let f = parse(f_text);
    let g = parse(&format!(
        "(({f_text}) + 0.3*i) / (0.2*({f_text}) + 1)"
    ));
    let rho = |w: Complex64| (w + c(0.0, 0.3)) / (0.2 * w + 1.0);
    let s = unit_circle();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 20 {
        attempts += 1;
        assert!(attempts < 10_000);
        let w = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (Some(direct), Some(relabeled)) = (
            count(&f, &s, ComplexValue::Finite(w)),
            count(&g, &s, ComplexValue::Finite(rho(w))),
        ) else {
            continue;
        };
        assert_eq!(direct, relabeled, "at w = {w}");
        checked += 1;
    }
}

#[test]
fn conjugation_symmetric_functions_have_conjugation_symmetric_counts() {
    let s = unit_circle();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for text in ["z^3 - 3*z + 1", "(z^2 + 1)/(z - 2)"] {
        let f = parse(text);
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 20 {
            attempts += 1;
            assert!(attempts < 10_000);
            let w = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let (Some(plain), Some(mirrored)) = (
                count(&f, &s, ComplexValue::Finite(w)),
                count(&f, &s, ComplexValue::Finite(w.conj())),
            ) else {
                continue;
            };
            assert_eq!(plain, mirrored, "{text} at w = {w}");
            checked += 1;
        }
    }
}

#[test]
fn a_multiply_connected_face_splits_counts_across_its_boundaries() {
    // f = z + 1/z sends both |z| = 2 and |z| = 1/2 onto the same ellipse,
    // so the preimage of that ellipse bounds an annulus. The count over the
    // annulus must equal the winding of f over its outer boundary minus the
    // winding over its inner boundary (both positively oriented).
    let f = parse("(z^2 + 1)/z");
    let gamma_points: Vec<Complex64> = (0..512)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / 512.0;
            let z = 2.0 * c(th.cos(), th.sin());
            z + 1.0 / z
        })
        .collect();
    let gamma = JordanCurve::from_samples(&gamma_points).unwrap();
    let rect = Rect::new(c(-3.0, -3.0), c(3.0, 3.0)).unwrap();
    let cfg = ToleranceConfig::default();
    let mut components = trace::trace_components(&f, &gamma, &rect, &cfg).unwrap();
    assert_eq!(components.len(), 2);
    components.sort_by(|a, b| {
        let radius = |p: &trace::PathComponent| {
            p.points.iter().map(|z| z.norm()).sum::<f64>() / p.points.len() as f64
        };
        radius(b).total_cmp(&radius(a))
    });
    let mut oriented: Vec<Vec<Complex64>> = components
        .iter()
        .map(|p| p.points.clone())
        .collect();
    for points in &mut oriented {
        if shoelace(points) < 0.0 {
            points.reverse();
        }
    }
    let mean_radius =
        |points: &[Complex64]| points.iter().map(|z| z.norm()).sum::<f64>() / points.len() as f64;
    assert!((mean_radius(&oriented[0]) - 2.0).abs() < 0.05);
    assert!((mean_radius(&oriented[1]) - 0.5).abs() < 0.05);

    let w = c(0.0, 0.3);
    let image = |points: &[Complex64]| -> Vec<Complex64> {
        points
            .iter()
            .map(|z| f.eval_c64(*z).unwrap().as_finite().unwrap())
            .collect()
    };
    let n_outer = winding_about(&image(&oriented[0]), w);
    let n_inner = winding_about(&image(&oriented[1]), w);
    assert_eq!(n_outer, 1);
    assert_eq!(n_inner, -1);

    let outer_disk = JordanCurve::circle(c(0.0, 0.0), 2.0, 256).unwrap();
    let inner_disk = JordanCurve::circle(c(0.0, 0.0), 0.5, 256).unwrap();
    let in_annulus = count(&f, &outer_disk, ComplexValue::Finite(w)).unwrap()
        - count(&f, &inner_disk, ComplexValue::Finite(w)).unwrap();
    assert_eq!(i64::from(in_annulus), n_outer - n_inner);
}

#[test]
fn zeros_minus_poles_equals_the_boundary_winding() {
    let cases: &[(&str, Rect)] = &[
        (
            "z^3 - 3*z + 1",
            Rect::new(c(-2.1, -1.9), c(2.2, 1.8)).unwrap(),
        ),
        (
            "(z^2 + 1)/(z - 2)",
            Rect::new(c(-1.37, -1.53), c(2.61, 1.49)).unwrap(),
        ),
        ("exp(z)", Rect::new(c(-1.3, -1.2), c(1.1, 1.4)).unwrap()),
        ("1/z", Rect::new(c(-0.9, -1.1), c(1.2, 0.8)).unwrap()),
    ];
    for (text, rect) in cases {
        let f = parse(text);
        let lcfg = LocatorConfig::for_rect(rect, &ToleranceConfig::default());
        let records = locator::isolate(&f, rect, &lcfg).unwrap();
        let net: i64 = records
            .iter()
            .map(|r| match r.kind {
                PointKind::Zero => i64::from(r.order),
                PointKind::Pole => -i64::from(r.order),
                PointKind::CriticalPoint => 0,
            })
            .sum();
        let boundary: Vec<Complex64> = (0..4096)
            .map(|k| {
                let z = rect.boundary_point(k as f64 / 4096.0);
                f.eval_c64(z).unwrap().as_finite().unwrap()
            })
            .collect();
        assert_eq!(winding_about(&boundary, c(0.0, 0.0)), net, "{text}");
    }
}

#[test]
fn locations_satisfy_their_residual_bound() {
    let rect = Rect::new(c(-2.1, -1.9), c(2.6, 1.8)).unwrap();
    let lcfg = LocatorConfig::for_rect(&rect, &ToleranceConfig::default());
    for text in ["z^3 - 3*z + 1", "(z^2 + 1)/(z - 2)", "z^2*(z - 1)"] {
        let records = locator::isolate(&parse(text), &rect, &lcfg).unwrap();
        assert!(!records.is_empty());
        for r in &records {
            assert!(
                r.residual <= lcfg.newton_tol,
                "{text}: residual {} at {}",
                r.residual,
                r.location
            );
        }
    }
}

#[test]
fn halving_min_cell_reproduces_the_same_records() {
    let rect = Rect::new(c(-2.1, -1.9), c(2.6, 1.8)).unwrap();
    let coarse = LocatorConfig::for_rect(&rect, &ToleranceConfig::default());
    let fine = LocatorConfig {
        min_cell: coarse.min_cell / 2.0,
        ..coarse.clone()
    };
    for text in ["z^3 - 3*z + 1", "(z^2 + 1)/(z - 2)"] {
        let f = parse(text);
        let a = locator::isolate(&f, &rect, &coarse).unwrap();
        let b = locator::isolate(&f, &rect, &fine).unwrap();
        assert_eq!(a.len(), b.len(), "{text}");
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!((ra.order, ra.kind), (rb.order, rb.kind));
            assert!((ra.location - rb.location).norm() <= 10.0 * coarse.newton_tol);
        }
    }
}

#[test]
fn nearby_targets_have_nearby_roots() {
    // Roots of z^2 - w stay within 1e-3 of the roots of z^2 - w0 whenever
    // |w - w0| < 1e-4.
    let rect = Rect::new(c(-2.0, -2.0), c(2.0, 2.0)).unwrap();
    let lcfg = LocatorConfig::for_rect(&rect, &ToleranceConfig::default());
    let reference = [c(1.0, 0.0), c(-1.0, 0.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..8 {
        let dw = c(rng.gen_range(-1e-4..1e-4), rng.gen_range(-1e-4..1e-4));
        let w = c(1.0, 0.0) + dw;
        let f = parse(&format!("z^2 - ({} + {}*i)", w.re, w.im));
        let records = locator::isolate(&f, &rect, &lcfg).unwrap();
        assert_eq!(records.len(), 2);
        for r in &records {
            let nearest = reference
                .iter()
                .map(|z| (r.location - z).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-3, "root {} strayed {nearest}", r.location);
        }
    }
}

#[test]
fn traced_points_lie_on_the_preimage_curve() {
    let cfg = ToleranceConfig::default();
    // Keep the Blaschke ratio's pole at z = 2 off the box edge.
    let rect = Rect::new(c(-1.9, -1.9), c(1.9, 1.9)).unwrap();
    // (function, gamma center, gamma radius)
    let cases: &[(&str, Complex64, f64)] = &[
        ("z^3", c(0.0, 0.0), 1.0),
        ("z*(z - 0.5)/(1 - 0.5*z)", c(0.0, 0.0), 1.0),
        ("z^2", c(1.0, 0.0), 1.0),
    ];
    for (text, center, radius) in cases {
        let f = parse(text);
        let gamma = JordanCurve::circle(*center, *radius, 256).unwrap();
        let report = trace::trace(&f, &gamma, &rect, &cfg).unwrap();
        assert!(!report.components.is_empty());
        for component in &report.components {
            for z in &component.points {
                let fz = f.eval_c64(*z).unwrap().as_finite().unwrap();
                // Distance to the exact circle, not its sampled polyline.
                let off_curve = ((fz - center).norm() - radius).abs();
                assert!(off_curve <= 1e-7, "{text}: f({z}) strays {off_curve:.3e}");
            }
        }
    }
}

#[test]
fn power_maps_cover_the_circle_once() {
    let cfg = ToleranceConfig::default();
    let rect = Rect::new(c(-2.0, -2.0), c(2.0, 2.0)).unwrap();
    let gamma = unit_circle();
    for n in 1..=5u32 {
        let f = parse(&format!("z^{n}"));
        let components = trace::trace_components(&f, &gamma, &rect, &cfg).unwrap();
        assert_eq!(components.len(), 1, "z^{n}");
        let only = &components[0];
        assert!(only.closed);
        // The preimage of the unit circle under z^n is the unit circle
        // itself, walked once.
        for z in &only.points {
            assert!((z.norm() - 1.0).abs() <= 1e-7);
        }
        assert_eq!(winding_about(&only.points, c(0.0, 0.0)).abs(), 1);
    }
}

#[test]
fn off_center_targets_split_into_n_components() {
    let cfg = ToleranceConfig::default();
    let rect = Rect::new(c(-8.0, -8.0), c(8.0, 8.0)).unwrap();
    let gamma = JordanCurve::circle(c(5.0, 0.0), 2.0, 256).unwrap();
    for n in 1..=5usize {
        let f = parse(&format!("z^{n}"));
        let components = trace::trace_components(&f, &gamma, &rect, &cfg).unwrap();
        assert_eq!(components.len(), n, "z^{n}");
        assert!(components.iter().all(|p| p.closed));
        // Distinct components keep well clear of one another.
        let tube = 2.0 * cfg.trace_tol * gamma.diameter();
        for i in 0..components.len() {
            for j in i + 1..components.len() {
                let min_gap = components[i]
                    .points
                    .iter()
                    .flat_map(|a| components[j].points.iter().map(move |b| (a - b).norm()))
                    .fold(f64::INFINITY, f64::min);
                assert!(min_gap > tube.max(0.05), "components {i},{j} gap {min_gap}");
            }
        }
    }
}

#[test]
fn branch_points_have_even_edge_counts() {
    let cfg = ToleranceConfig::default();
    let rect = Rect::new(c(-2.0, -2.0), c(2.0, 2.0)).unwrap();
    let gamma = JordanCurve::circle(c(1.0, 0.0), 1.0, 256).unwrap();
    // z^n has a critical point of order n-1 at 0, and 0 maps onto gamma,
    // so the preimage curve must show 2n local edges there.
    for (text, expected_edges) in [("z^2", 4, ), ("z^3", 6)] {
        let f = parse(text);
        let report = trace::trace(&f, &gamma, &rect, &cfg).unwrap();
        assert_eq!(report.branch_points.len(), 1, "{text}");
        let bp = &report.branch_points[0];
        assert!(bp.location.norm() <= 1e-6);
        assert_eq!(bp.edges, expected_edges);
        assert!(bp.edges % 2 == 0 && bp.edges >= 4);
    }
}

fn random_ratio(rng: &mut ChaCha8Rng, n_minus: usize, n_plus: usize) -> RatioModel {
    let mut draw = |n: usize, taken: &[Complex64]| -> Vec<Complex64> {
        let mut zeros = Vec::new();
        while zeros.len() < n {
            let z = c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8));
            if z.norm() < 0.8
                && taken.iter().chain(&zeros).all(|t| (t - z).norm() > 0.15)
            {
                zeros.push(z);
            }
        }
        zeros
    };
    let top = draw(n_minus, &[]);
    let bottom = draw(n_plus, &top);
    RatioModel {
        numerator: BlaschkeProduct::build(top, c(1.0, 0.0)).unwrap(),
        denominator: BlaschkeProduct::build(bottom, c(1.0, 0.0)).unwrap(),
        max_model_error: 0.0,
    }
}

fn assert_multiset_close(expected: &[Complex64], got: &[Complex64], tol: f64) {
    assert_eq!(expected.len(), got.len());
    let mut remaining: Vec<Complex64> = got.to_vec();
    for a in expected {
        let (k, gap) = remaining
            .iter()
            .enumerate()
            .map(|(k, b)| (k, (a - b).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        assert!(gap <= tol, "no recovered zero within {tol} of {a} (best {gap})");
        remaining.swap_remove(k);
    }
}

#[test]
fn synthesized_ratios_are_recovered() {
    let cfg = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for (n_minus, n_plus) in [(2, 1), (3, 2), (1, 3)] {
        let truth = random_ratio(&mut rng, n_minus, n_plus);
        let model = fit_ratio_model(&truth.to_function_def(), &cfg).unwrap();
        assert_multiset_close(&truth.numerator.zeros, &model.numerator.zeros, 1e-7);
        assert_multiset_close(&truth.denominator.zeros, &model.denominator.zeros, 1e-7);
        assert!(model.max_model_error <= 1e-8);
    }
}

#[test]
fn blaschke_ratio_counts_follow_the_three_face_rule() {
    // Degrees (2, 1): 2 preimages inside the circle, 1 outside, and the
    // minimum, 1, for values on the circle itself. The denominator zero
    // must stay well inside the numerator's: d/dtheta arg f on the circle
    // is a difference of Poisson kernels, and a denominator zero as far
    // out as 0.3i spikes its kernel above the other two, putting critical
    // points of f on the circle itself; with 0.1i the difference keeps a
    // margin above zero the whole way around, so the circle really is a
    // component of its own preimage and the on-circle count is the
    // minimum everywhere, not just at lucky angles.
    let f = parse("(z*(z - 0.5)/(1 - 0.5*z)) / ((z - 0.1*i)/(1 + 0.1*i*z))");
    let s = unit_circle();
    let cfg = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..20 {
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        let inside = ComplexValue::Finite(rng.gen_range(0.05..0.9) * c(th.cos(), th.sin()));
        let outside = ComplexValue::Finite(rng.gen_range(1.15..4.0) * c(th.cos(), th.sin()));
        let on = ComplexValue::Finite(c(th.cos(), th.sin()));
        assert_eq!(count(&f, &s, inside), Some(2));
        assert_eq!(count(&f, &s, outside), Some(1));
        let boundary = counting::count_preimages_robust(&f, &s, on, &cfg).unwrap();
        assert_eq!(boundary.count, 1);
    }
    assert_eq!(count(&f, &s, ComplexValue::Infinity), Some(1));
}

#[test]
fn classifier_verdict_agrees_with_the_direct_image_check() {
    let s = unit_circle();
    let plan = SamplePlan::default();
    let cfg = ToleranceConfig::default();
    let cases = [
        ("z*(z - 0.5)/(1 - 0.5*z)", true),
        ("(1 - 0.5*z)/(z*(z - 0.5))", true),
        ("exp(z)", false),
    ];
    for (text, is_pseudo_lemniscate) in cases {
        let report = analysis::classify(&parse(text), &s, &s, &plan, &cfg).unwrap();
        let positively_classified = matches!(report.verdict, Verdict::PseudoLemniscate { .. });
        assert_eq!(positively_classified, is_pseudo_lemniscate, "{text}");
        // The two routes to the same property must agree on every input.
        assert_eq!(positively_classified, report.image_check.holds, "{text}");
    }
}
