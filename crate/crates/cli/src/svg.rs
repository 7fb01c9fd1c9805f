//! SVG drawing of a horizontal foliation.
//!
//! Layers from bottom to top: generic leaves (green), separatrices (black),
//! saddle connections of the strips (red), poles (blue) and zeros (orange).

use std::fmt::Write;

use qdiff_lab::flatgeo::{Foliation, PlainDifferential, StripDecomposition};
use qdiff_lab::C64;

const SIZE: f64 = 800.0;
const GRID: usize = 7;

struct Frame {
    center: C64,
    radius: f64,
}

impl Frame {
    fn new(pd: &PlainDifferential) -> Frame {
        let pts: Vec<C64> = pd.factors.iter().map(|f| f.0).collect();
        if pts.is_empty() {
            return Frame {
                center: C64::new(0.0, 0.0),
                radius: 2.0,
            };
        }
        let center = pts.iter().sum::<C64>() / pts.len() as f64;
        let spread = pts.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
        Frame {
            center,
            radius: 1.6 * spread + 0.5,
        }
    }

    fn map(&self, z: C64) -> (f64, f64) {
        let u = (z - self.center) / (2.0 * self.radius);
        (SIZE * (0.5 + u.re), SIZE * (0.5 - u.im))
    }

    fn inside(&self, z: C64) -> bool {
        (z - self.center).norm() < 3.0 * self.radius
    }
}

fn polyline(out: &mut String, frame: &Frame, pts: &[C64], stroke: &str, width: f64) {
    // split wherever the trajectory leaves the drawable region
    let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for &z in pts {
        if z.re.is_finite() && z.im.is_finite() && frame.inside(z) {
            runs.last_mut().unwrap().push(frame.map(z));
        } else if !runs.last().unwrap().is_empty() {
            runs.push(Vec::new());
        }
    }
    for run in runs.iter().filter(|r| r.len() > 1) {
        let coords: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            out,
            r#"  <polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
            coords.join(" ")
        );
    }
}

pub fn render(pd: &PlainDifferential, fol: &Foliation, dec: &StripDecomposition, leaf_budget: f64) -> String {
    let frame = Frame::new(pd);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"  <rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(out, r#"  <g id="leaves">"#);
    let singular: Vec<C64> = pd.factors.iter().map(|f| f.0).collect();
    for i in 0..GRID {
        for j in 0..GRID {
            let u = (i as f64 + 0.5) / GRID as f64 - 0.5;
            let v = (j as f64 + 0.5) / GRID as f64 - 0.5;
            let z = frame.center + C64::new(u, v) * (2.0 * frame.radius);
            if singular.iter().any(|s| (s - z).norm() < 0.05 * frame.radius) {
                continue;
            }
            let (a, b) = fol.leaf(dec.phase, z, leaf_budget);
            polyline(&mut out, &frame, &a.points, "green", 0.8);
            polyline(&mut out, &frame, &b.points, "green", 0.8);
        }
    }
    let _ = writeln!(out, "  </g>\n  <g id=\"separatrices\">");
    for t in &dec.separatrices {
        polyline(&mut out, &frame, &t.points, "black", 1.4);
    }
    let _ = writeln!(out, "  </g>\n  <g id=\"saddle-connections\">");
    for s in &dec.strips {
        polyline(&mut out, &frame, &s.saddle_connection.points, "red", 2.0);
    }
    let _ = writeln!(out, "  </g>\n  <g id=\"singularities\">");
    for p in pd.poles() {
        if let Some(z) = p.at.finite() {
            let (x, y) = frame.map(z);
            let _ = writeln!(out, r#"    <circle cx="{x:.2}" cy="{y:.2}" r="6" fill="blue"/>"#);
        }
    }
    for (z, _) in pd.zeros() {
        let (x, y) = frame.map(z);
        let _ = writeln!(out, r#"    <circle cx="{x:.2}" cy="{y:.2}" r="5" fill="orange" stroke="black"/>"#);
    }
    let _ = writeln!(out, "  </g>\n</svg>");
    out
}
