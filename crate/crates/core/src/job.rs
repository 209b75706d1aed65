//! Job files and their execution: one JSON job in, one JSON report out,
//! plus whatever SVG/CSV artifacts the job asks for.
//!
//! Reports are emitted even when a job fails — the verdict then carries
//! `kind: "error"` with the error's tag and message — so a consumer can
//! always parse what happened. Exit codes: 0 for a definite answer, 2 for
//! bad input, 3 when the numerics could not settle the question, 4 for an
//! internal inconsistency.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::analysis::{self, SamplePlan};
use crate::blaschke;
use crate::complex::ComplexValue;
use crate::config::ToleranceConfig;
use crate::counting;
use crate::error::{Error, Result};
use crate::expr::FunctionDef;
use crate::geometry::{JordanCurve, Rect};
use crate::locator::{self, LocatorConfig, PointKind};
use crate::render::{self, Scene};
use crate::trace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Classify,
    NonJordan,
    Trace,
    Locate,
    Count,
    BlaschkeModel,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::NonJordan => "nonjordan",
            Command::Trace => "trace",
            Command::Locate => "locate",
            Command::Count => "count",
            Command::BlaschkeModel => "blaschke-model",
        }
    }
}

/// Curve description as it appears in job files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Circle {
        center: [f64; 2],
        radius: f64,
        #[serde(default = "default_circle_samples")]
        samples: usize,
    },
    /// Outward offset of a polygon with circular-arc corners.
    RoundedPolygon {
        vertices: Vec<[f64; 2]>,
        fillet_radius: f64,
        #[serde(default = "default_density")]
        density: f64,
    },
    /// Closed polyline through the listed points.
    Samples { points: Vec<[f64; 2]> },
}

fn default_circle_samples() -> usize {
    256
}

fn default_density() -> f64 {
    24.0
}

impl CurveSpec {
    pub fn build(&self) -> Result<JordanCurve> {
        match self {
            CurveSpec::Circle {
                center,
                radius,
                samples,
            } => JordanCurve::circle(Complex64::new(center[0], center[1]), *radius, *samples),
            CurveSpec::RoundedPolygon {
                vertices,
                fillet_radius,
                density,
            } => {
                let vs: Vec<Complex64> = vertices
                    .iter()
                    .map(|v| Complex64::new(v[0], v[1]))
                    .collect();
                JordanCurve::rounded_polygon(&vs, *fillet_radius, *density)
            }
            CurveSpec::Samples { points } => {
                let ps: Vec<Complex64> = points
                    .iter()
                    .map(|p| Complex64::new(p[0], p[1]))
                    .collect();
                JordanCurve::from_samples(&ps)
            }
        }
    }
}

/// Rectangle description for trace/locate search boxes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl BoxSpec {
    pub fn build(&self) -> Result<Rect> {
        Rect::new(
            Complex64::new(self.lo[0], self.lo[1]),
            Complex64::new(self.hi[0], self.hi[1]),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// One job file. A single struct covers every command; each command reads
/// the fields it needs and errors on the ones it is missing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobSpec {
    /// Expression in z, e.g. "z^2 * (1 - 0.25*z)/(z - 0.25)".
    pub function: String,
    /// The curve S under test.
    pub curve_s: Option<CurveSpec>,
    /// The target curve Gamma; defaults to S where a command allows that.
    pub curve_gamma: Option<CurveSpec>,
    pub tolerances: ToleranceConfig,
    pub sample_plan: SamplePlan,
    /// Search box for `trace` and `locate`.
    pub search_box: Option<BoxSpec>,
    /// Target values for `count`, candidate values for `nonjordan`.
    pub points: Vec<[f64; 2]>,
    /// Append the point at infinity to `points`.
    pub include_infinity: bool,
    /// Size of the default candidate grid when `nonjordan` gets no points.
    pub candidates: usize,
    pub outputs: Outputs,
}

impl Default for JobSpec {
    fn default() -> Self {
        JobSpec {
            function: String::new(),
            curve_s: None,
            curve_gamma: None,
            tolerances: ToleranceConfig::default(),
            sample_plan: SamplePlan::default(),
            search_box: None,
            points: Vec::new(),
            include_infinity: false,
            candidates: 8,
            outputs: Outputs::default(),
        }
    }
}

impl JobSpec {
    pub fn from_path(path: &Path) -> Result<JobSpec> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// `--seed` override: every random choice in the run follows it.
    pub fn override_seed(&mut self, seed: u64) {
        self.tolerances.seed = seed;
        self.sample_plan.seed = seed;
    }

    fn function(&self) -> Result<FunctionDef> {
        if self.function.trim().is_empty() {
            return Err(Error::Job("job has no \"function\" field".into()));
        }
        FunctionDef::parse(&self.function)
    }

    fn curve_s(&self) -> Result<JordanCurve> {
        self.curve_s
            .as_ref()
            .ok_or_else(|| Error::Job("this command needs \"curve_s\"".into()))?
            .build()
    }

    /// Gamma when given, S otherwise (classify with S = Gamma, trace of
    /// the curve itself).
    fn gamma_or_s(&self) -> Result<JordanCurve> {
        match &self.curve_gamma {
            Some(spec) => spec.build(),
            None => self.curve_s(),
        }
    }

    fn search_box(&self) -> Result<Rect> {
        self.search_box
            .as_ref()
            .ok_or_else(|| Error::Job("this command needs \"search_box\"".into()))?
            .build()
    }

    fn finite_points(&self) -> Vec<ComplexValue> {
        let mut ws: Vec<ComplexValue> = self
            .points
            .iter()
            .map(|p| ComplexValue::clamped(Complex64::new(p[0], p[1])))
            .collect();
        if self.include_infinity {
            ws.push(ComplexValue::Infinity);
        }
        ws
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub job_echo: JobSpec,
    pub verdict: Value,
    pub samples: Vec<Value>,
    pub diagnostics: Vec<String>,
    pub timings: BTreeMap<String, f64>,
}

/// Run one command against one job. Always yields a report; the exit code
/// is 0 for definite verdicts, the error's code otherwise, and 3 when a
/// successful run ends in an indeterminate or inconclusive verdict.
pub fn run(command: Command, job: &JobSpec, out_dir: Option<&Path>, verbose: bool) -> (Report, i32) {
    let mut report = Report {
        command: command.name(),
        job_echo: job.clone(),
        verdict: Value::Null,
        samples: Vec::new(),
        diagnostics: Vec::new(),
        timings: BTreeMap::new(),
    };
    let started = Instant::now();
    let outcome = match command {
        Command::Classify => run_classify(job, out_dir, &mut report),
        Command::NonJordan => run_nonjordan(job, out_dir, &mut report),
        Command::Trace => run_trace(job, out_dir, &mut report),
        Command::Locate => run_locate(job, out_dir, &mut report),
        Command::Count => run_count(job, out_dir, &mut report),
        Command::BlaschkeModel => run_blaschke_model(job, out_dir, &mut report),
    };
    report
        .timings
        .insert("total".into(), started.elapsed().as_secs_f64());
    let code = match outcome {
        Ok(code) => code,
        Err(e) => {
            report.verdict = json!({
                "kind": "error",
                "error_kind": e.kind(),
                "message": e.to_string(),
            });
            e.exit_code()
        }
    };
    if verbose {
        eprintln!(
            "{}: exit {code} in {:.3}s",
            command.name(),
            started.elapsed().as_secs_f64()
        );
    }
    if let Some(path) = &job.outputs.json {
        let path = resolve(path, out_dir);
        if let Err(e) = write_report(&report, &path) {
            report
                .diagnostics
                .push(format!("failed to write report to {}: {e}", path.display()));
            return (report, Error::from(e).exit_code());
        }
    }
    (report, code)
}

pub fn write_report(report: &Report, path: &Path) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut text = serde_json::to_string_pretty(report).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

/// Report for failures before a job could even be loaded.
pub fn error_report(command: Command, e: &Error) -> Report {
    Report {
        command: command.name(),
        job_echo: JobSpec::default(),
        verdict: json!({
            "kind": "error",
            "error_kind": e.kind(),
            "message": e.to_string(),
        }),
        samples: Vec::new(),
        diagnostics: Vec::new(),
        timings: BTreeMap::new(),
    }
}

fn resolve(path: &Path, out_dir: Option<&Path>) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn fmt_cv(w: &ComplexValue) -> String {
    match w {
        ComplexValue::Finite(z) => format!("[{}, {}]", z.re, z.im),
        ComplexValue::Infinity => "inf".into(),
    }
}

/// The image polyline f over the samples of S, for overlays. Infinite
/// values stay in the list as split points for the renderer.
fn image_polyline(f: &FunctionDef, s: &JordanCurve) -> Vec<Complex64> {
    s.samples()
        .iter()
        .map(|(_, z)| match f.eval_c64(*z) {
            Ok(ComplexValue::Finite(w)) => w,
            _ => Complex64::new(f64::INFINITY, f64::INFINITY),
        })
        .collect()
}

fn curve_polyline(curve: &JordanCurve) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = curve.samples().iter().map(|(_, z)| *z).collect();
    if let Some(first) = pts.first().copied() {
        pts.push(first);
    }
    pts
}

fn rect_polyline(rect: &Rect) -> Vec<Complex64> {
    vec![
        rect.lo,
        Complex64::new(rect.hi.re, rect.lo.im),
        rect.hi,
        Complex64::new(rect.lo.re, rect.hi.im),
        rect.lo,
    ]
}

fn run_classify(job: &JobSpec, out_dir: Option<&Path>, report: &mut Report) -> Result<i32> {
    let t = Instant::now();
    let f = job.function()?;
    let s = job.curve_s()?;
    let gamma = job.gamma_or_s()?;
    report
        .timings
        .insert("build".into(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let outcome = analysis::classify(&f, &s, &gamma, &job.sample_plan, &job.tolerances)?;
    report
        .timings
        .insert("classify".into(), t.elapsed().as_secs_f64());

    report.verdict = serde_json::to_value(&outcome.verdict)?;
    report.samples = outcome
        .samples
        .iter()
        .map(serde_json::to_value)
        .collect::<std::result::Result<_, _>>()?;
    report.diagnostics.push(format!(
        "max dist(f(S), Gamma) over the curve samples: {:.6e}",
        outcome.image_check.max_image_distance
    ));
    report.diagnostics.push(format!(
        "critical points on S: {}",
        outcome.image_check.critical_points_on_curve.len()
    ));
    if let Some(e) = &outcome.image_check.error {
        report
            .diagnostics
            .push(format!("critical-point search failed: {e}"));
    }

    if let Some(path) = &job.outputs.svg {
        let mut scene = Scene::new();
        scene.add_polyline("S", &curve_polyline(&s));
        scene.add_polyline("Gamma", &curve_polyline(&gamma));
        scene.add_polyline("f(S)", &image_polyline(&f, &s));
        for sample in &outcome.samples {
            if let ComplexValue::Finite(w) = sample.report.w {
                scene.add_marker(w, format!("{:?}: N = {}", sample.face, sample.report.count));
            }
        }
        scene.write_svg(&resolve(path, out_dir))?;
    }
    if let Some(path) = &job.outputs.csv {
        let rows: Vec<String> = outcome
            .samples
            .iter()
            .map(|s| {
                let (re, im) = match s.report.w {
                    ComplexValue::Finite(w) => (format!("{}", w.re), format!("{}", w.im)),
                    ComplexValue::Infinity => ("inf".into(), "inf".into()),
                };
                format!(
                    "{:?},{re},{im},{},{:?},{:e}",
                    s.face, s.report.count, s.report.method, s.report.min_image_distance
                )
                .to_lowercase()
            })
            .collect();
        render::write_csv(
            &resolve(path, out_dir),
            "face,w_re,w_im,count,method,min_image_distance",
            &rows,
        )?;
    }

    Ok(match outcome.verdict {
        analysis::Verdict::Indeterminate { .. } => 3,
        _ => 0,
    })
}

fn run_nonjordan(job: &JobSpec, out_dir: Option<&Path>, report: &mut Report) -> Result<i32> {
    let t = Instant::now();
    let f = job.function()?;
    let s = job.curve_s()?;
    let candidates = {
        let listed = job.finite_points();
        if listed.is_empty() {
            analysis::default_candidates(&f, &s, job.candidates, job.sample_plan.seed)?
        } else {
            listed
        }
    };
    report
        .timings
        .insert("build".into(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let outcome = analysis::non_jordan_test(&f, &s, &candidates, &job.tolerances)?;
    report
        .timings
        .insert("nonjordan".into(), t.elapsed().as_secs_f64());

    report.verdict = serde_json::to_value(&outcome.verdict)?;
    report.samples = outcome
        .counts
        .iter()
        .map(serde_json::to_value)
        .collect::<std::result::Result<_, _>>()?;
    for w in &outcome.skipped {
        report.diagnostics.push(format!(
            "candidate {} skipped: too close to f(S) for a trustworthy winding",
            fmt_cv(w)
        ));
    }

    if let Some(path) = &job.outputs.svg {
        let mut scene = Scene::new();
        scene.add_polyline("f(S)", &image_polyline(&f, &s));
        for c in &outcome.counts {
            if let ComplexValue::Finite(w) = c.w {
                scene.add_marker(w, format!("N = {}", c.count));
            }
        }
        scene.write_svg(&resolve(path, out_dir))?;
    }
    if let Some(path) = &job.outputs.csv {
        let rows: Vec<String> = outcome
            .counts
            .iter()
            .map(|c| {
                let (re, im) = match c.w {
                    ComplexValue::Finite(w) => (format!("{}", w.re), format!("{}", w.im)),
                    ComplexValue::Infinity => ("inf".into(), "inf".into()),
                };
                format!("{re},{im},{}", c.count)
            })
            .collect();
        render::write_csv(&resolve(path, out_dir), "w_re,w_im,count", &rows)?;
    }

    Ok(match outcome.verdict {
        analysis::NonJordanVerdict::ImageNotJordan { .. }
        | analysis::NonJordanVerdict::CriticalPointOnCurve { .. } => 0,
        analysis::NonJordanVerdict::DisjunctionUnresolved { .. }
        | analysis::NonJordanVerdict::Inconclusive { .. } => 3,
    })
}

fn run_trace(job: &JobSpec, out_dir: Option<&Path>, report: &mut Report) -> Result<i32> {
    let t = Instant::now();
    let f = job.function()?;
    let gamma = job.gamma_or_s()?;
    let rect = job.search_box()?;
    report
        .timings
        .insert("build".into(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let outcome = trace::trace(&f, &gamma, &rect, &job.tolerances)?;
    report
        .timings
        .insert("trace".into(), t.elapsed().as_secs_f64());

    report.verdict = json!({
        "kind": "traced",
        "components": outcome.components.len(),
        "closed_components": outcome.components.iter().filter(|c| c.closed).count(),
        "branch_points": outcome.branch_points.len(),
    });
    report.samples = outcome
        .components
        .iter()
        .map(serde_json::to_value)
        .collect::<std::result::Result<_, _>>()?;
    for b in &outcome.branch_points {
        report.diagnostics.push(format!(
            "branch point at [{}, {}] with {} edges",
            b.location.re, b.location.im, b.edges
        ));
    }

    if let Some(path) = &job.outputs.svg {
        let mut scene = Scene::new();
        scene.add_polyline("search box", &rect_polyline(&rect));
        for (i, comp) in outcome.components.iter().enumerate() {
            let mut pts = comp.points.clone();
            if comp.closed {
                if let Some(first) = pts.first().copied() {
                    pts.push(first);
                }
            }
            let shape = if comp.closed { "closed" } else { "open" };
            scene.add_polyline(format!("component {i} ({shape})"), &pts);
        }
        for b in &outcome.branch_points {
            scene.add_marker(b.location, format!("branch point, {} edges", b.edges));
        }
        scene.write_svg(&resolve(path, out_dir))?;
    }
    if let Some(path) = &job.outputs.csv {
        let mut rows = Vec::new();
        for (i, comp) in outcome.components.iter().enumerate() {
            for (theta, z) in comp.parameter_track.iter().zip(&comp.points) {
                rows.push(format!("{i},{theta},{},{}", z.re, z.im));
            }
        }
        render::write_csv(&resolve(path, out_dir), "component,theta,re,im", &rows)?;
    }

    Ok(0)
}

fn run_locate(job: &JobSpec, out_dir: Option<&Path>, report: &mut Report) -> Result<i32> {
    let t = Instant::now();
    let f = job.function()?;
    let rect = job.search_box()?;
    report
        .timings
        .insert("build".into(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let lcfg = LocatorConfig::for_rect(&rect, &job.tolerances);
    let records = locator::isolate(&f, &rect, &lcfg)?;
    report
        .timings
        .insert("locate".into(), t.elapsed().as_secs_f64());

    let zeros = records.iter().filter(|r| r.kind == PointKind::Zero).count();
    let poles = records.iter().filter(|r| r.kind == PointKind::Pole).count();
    report.verdict = json!({
        "kind": "located",
        "zeros": zeros,
        "poles": poles,
    });
    report.samples = records
        .iter()
        .map(serde_json::to_value)
        .collect::<std::result::Result<_, _>>()?;

    if let Some(path) = &job.outputs.svg {
        let mut scene = Scene::new();
        scene.add_polyline("search box", &rect_polyline(&rect));
        for r in &records {
            scene.add_marker(
                r.location,
                format!("{:?} of order {}", r.kind, r.order).to_lowercase(),
            );
        }
        scene.write_svg(&resolve(path, out_dir))?;
    }
    if let Some(path) = &job.outputs.csv {
        let rows: Vec<String> = records
            .iter()
            .map(|r| {
                format!(
                    "{:?},{},{},{},{:e}",
                    r.kind, r.location.re, r.location.im, r.order, r.residual
                )
                .to_lowercase()
            })
            .collect();
        render::write_csv(&resolve(path, out_dir), "kind,re,im,order,residual", &rows)?;
    }

    Ok(0)
}

fn run_count(job: &JobSpec, out_dir: Option<&Path>, report: &mut Report) -> Result<i32> {
    let t = Instant::now();
    let f = job.function()?;
    let s = job.curve_s()?;
    let ws = job.finite_points();
    if ws.is_empty() {
        return Err(Error::Job(
            "count needs \"points\" (and/or \"include_infinity\": true)".into(),
        ));
    }
    report
        .timings
        .insert("build".into(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let counts = counting::count_on_grid(&f, &s, &ws, &job.tolerances)?;
    report
        .timings
        .insert("count".into(), t.elapsed().as_secs_f64());

    report.verdict = json!({
        "kind": "counted",
        "counts": counts.iter().map(|r| r.count).collect::<Vec<_>>(),
    });
    report.samples = counts
        .iter()
        .map(serde_json::to_value)
        .collect::<std::result::Result<_, _>>()?;

    if let Some(path) = &job.outputs.svg {
        let mut scene = Scene::new();
        scene.add_polyline("S", &curve_polyline(&s));
        scene.add_polyline("f(S)", &image_polyline(&f, &s));
        for r in &counts {
            if let ComplexValue::Finite(w) = r.w {
                scene.add_marker(w, format!("N = {}", r.count));
            }
        }
        scene.write_svg(&resolve(path, out_dir))?;
    }
    if let Some(path) = &job.outputs.csv {
        let rows: Vec<String> = counts
            .iter()
            .map(|r| {
                let (re, im) = match r.w {
                    ComplexValue::Finite(w) => (format!("{}", w.re), format!("{}", w.im)),
                    ComplexValue::Infinity => ("inf".into(), "inf".into()),
                };
                format!(
                    "{re},{im},{},{:?},{:e}",
                    r.count, r.method, r.min_image_distance
                )
                .to_lowercase()
            })
            .collect();
        render::write_csv(
            &resolve(path, out_dir),
            "w_re,w_im,count,method,min_image_distance",
            &rows,
        )?;
    }

    Ok(0)
}

fn run_blaschke_model(job: &JobSpec, out_dir: Option<&Path>, report: &mut Report) -> Result<i32> {
    let t = Instant::now();
    let f = job.function()?;
    report
        .timings
        .insert("build".into(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let model = match blaschke::fit_ratio_model(&f, &job.tolerances) {
        Ok(model) => model,
        // A definite negative answer, not a failure: f is simply not
        // unimodular on the unit circle, so no Blaschke ratio models it.
        Err(Error::NotBoundaryUnimodular { deviation }) => {
            report.verdict = json!({
                "kind": "not_boundary_unimodular",
                "deviation": deviation,
            });
            report.diagnostics.push(format!(
                "|f| deviates from 1 on the unit circle by {deviation:.6e}; \
                 no Blaschke-product ratio can model it"
            ));
            report
                .timings
                .insert("fit".into(), t.elapsed().as_secs_f64());
            return Ok(0);
        }
        Err(e) => return Err(e),
    };
    report
        .timings
        .insert("fit".into(), t.elapsed().as_secs_f64());

    report.verdict = json!({
        "kind": "blaschke_model",
        "numerator_degree": model.numerator.zeros.len(),
        "denominator_degree": model.denominator.zeros.len(),
        "max_model_error": model.max_model_error,
    });
    report.samples = vec![serde_json::to_value(&model)?];

    if let Some(path) = &job.outputs.svg {
        let mut scene = Scene::new();
        let circle = JordanCurve::circle(Complex64::new(0.0, 0.0), 1.0, 256)?;
        scene.add_polyline("unit circle", &curve_polyline(&circle));
        for z in &model.numerator.zeros {
            scene.add_marker(*z, "zero");
        }
        for z in &model.denominator.zeros {
            scene.add_marker(*z, "denominator zero (pole of the model)");
        }
        scene.write_svg(&resolve(path, out_dir))?;
    }
    if let Some(path) = &job.outputs.csv {
        let mut rows = Vec::new();
        for z in &model.numerator.zeros {
            rows.push(format!("numerator_zero,{},{}", z.re, z.im));
        }
        for z in &model.denominator.zeros {
            rows.push(format!("denominator_zero,{},{}", z.re, z.im));
        }
        render::write_csv(&resolve(path, out_dir), "role,re,im", &rows)?;
    }

    Ok(0)
}
