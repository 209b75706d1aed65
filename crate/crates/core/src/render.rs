//! SVG scenes and CSV tables for the artifacts the CLI emits.
//!
//! The scene model is deliberately small: labeled polylines, labeled point
//! markers, and nothing else. Curves, traced components, boxes and sample
//! points all reduce to those two primitives.

use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#e377c2",
];

struct Polyline {
    label: String,
    points: Vec<Complex64>,
    /// Index into the palette; polylines split across segments share one.
    color: usize,
    in_legend: bool,
}

struct Marker {
    at: Complex64,
    label: String,
}

#[derive(Default)]
pub struct Scene {
    polylines: Vec<Polyline>,
    markers: Vec<Marker>,
    next_color: usize,
}

impl Scene {
    pub fn new() -> Scene {
        Scene::default()
    }

    /// Add a polyline under the next palette color. Non-finite points split
    /// the line into separate strokes (a curve through a pole renders as
    /// its finite pieces).
    pub fn add_polyline(&mut self, label: impl Into<String>, points: &[Complex64]) {
        let color = self.next_color % PALETTE.len();
        self.next_color += 1;
        let label = label.into();
        let mut first = true;
        for piece in points.split(|z| !(z.re.is_finite() && z.im.is_finite())) {
            if piece.len() < 2 {
                continue;
            }
            self.polylines.push(Polyline {
                label: label.clone(),
                points: piece.to_vec(),
                color,
                in_legend: first,
            });
            first = false;
        }
    }

    pub fn add_marker(&mut self, at: Complex64, label: impl Into<String>) {
        if at.re.is_finite() && at.im.is_finite() {
            self.markers.push(Marker {
                at,
                label: label.into(),
            });
        }
    }

    fn bounds(&self) -> (Complex64, Complex64) {
        let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut feed = |z: &Complex64| {
            lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
        };
        for p in &self.polylines {
            p.points.iter().for_each(&mut feed);
        }
        for m in &self.markers {
            feed(&m.at);
        }
        if !(lo.re.is_finite() && hi.re > lo.re && hi.im > lo.im) {
            (Complex64::new(-1.0, -1.0), Complex64::new(1.0, 1.0))
        } else {
            (lo, hi)
        }
    }

    /// SVG 1.1 document. The y axis flips so the picture matches the usual
    /// mathematical orientation.
    pub fn to_svg(&self) -> String {
        let (lo, hi) = self.bounds();
        let margin = 0.08 * (hi - lo).norm().max(1e-12);
        let (x, w) = (lo.re - margin, hi.re - lo.re + 2.0 * margin);
        let (y, h) = (-(hi.im + margin), hi.im - lo.im + 2.0 * margin);
        let scale = w.max(h);
        let stroke = 0.004 * scale;
        let radius = 0.009 * scale;
        let font = 0.035 * scale;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x} {y} {w} {h}">"#
        );
        for p in &self.polylines {
            let mut pts = String::new();
            for z in &p.points {
                let _ = write!(pts, "{},{} ", z.re, -z.im);
            }
            let _ = writeln!(
                svg,
                r#"  <polyline points="{}" fill="none" stroke="{}" stroke-width="{stroke}"><title>{}</title></polyline>"#,
                pts.trim_end(),
                PALETTE[p.color],
                escape(&p.label)
            );
        }
        for m in &self.markers {
            let _ = writeln!(
                svg,
                r##"  <circle cx="{}" cy="{}" r="{radius}" fill="#333333"><title>{}</title></circle>"##,
                m.at.re,
                -m.at.im,
                escape(&m.label)
            );
        }
        // Legend: one text row per distinct polyline label.
        let mut row = 0;
        for p in self.polylines.iter().filter(|p| p.in_legend) {
            let _ = writeln!(
                svg,
                r#"  <text x="{}" y="{}" font-size="{font}" fill="{}">{}</text>"#,
                x + 0.5 * font,
                y + (1.2 + 1.2 * row as f64) * font,
                PALETTE[p.color],
                escape(&p.label)
            );
            row += 1;
        }
        svg.push_str("</svg>\n");
        svg
    }

    pub fn write_svg(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_svg())
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Header row plus one record per row, RFC-4180 line endings not required:
/// plain `\n`, values already formatted by the caller.
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    write_file(path, &text)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, content)?;
    Ok(())
}
