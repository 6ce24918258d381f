//! Static SVG trajectory plots.

use std::fmt::Write;

use crate::formation::{SensingGraph, Vec2};
use crate::sim::TrajectoryLog;

const SIZE: f64 = 640.0;
const PAD: f64 = 24.0;
/// Polylines are thinned to about this many vertices per agent.
const MAX_VERTICES: usize = 1500;
const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

/// Maps world coordinates into the square canvas, y up.
struct View {
    min: Vec2,
    scale: f64,
}

impl View {
    fn fit(points: impl Iterator<Item = Vec2>) -> Self {
        let (mut lo, mut hi) = (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY));
        for p in points {
            lo = lo.inf(&p);
            hi = hi.sup(&p);
        }
        if !lo.x.is_finite() {
            return Self { min: Vec2::zeros(), scale: 1.0 };
        }
        let span = (hi - lo).max().max(1e-12);
        let scale = (SIZE - 2.0 * PAD) / span;
        // Center the shorter side.
        let extra = (Vec2::repeat(span) - (hi - lo)) * 0.5;
        Self { min: lo - extra, scale }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        let q = (p - self.min) * self.scale;
        (PAD + q.x, SIZE - PAD - q.y)
    }
}

/// Trajectory polylines, hollow start markers, filled final positions, and the edges of
/// `graph` drawn between the final positions.
pub fn trajectory_svg(log: &TrajectoryLog, graph: Option<&SensingGraph>) -> String {
    let k_last = log.records.len().saturating_sub(1);
    let stride = (log.records.len() / MAX_VERTICES).max(1);
    let samples: Vec<usize> = (0..log.records.len()).step_by(stride).chain([k_last]).collect();
    let tracks: Vec<Vec<Vec2>> = {
        let mut t = vec![Vec::with_capacity(samples.len()); log.n];
        for &k in &samples {
            for (i, p) in log.positions(k).into_iter().enumerate() {
                t[i].push(p);
            }
        }
        t
    };
    let view = View::fit(tracks.iter().flatten().copied());

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if log.records.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let last = log.positions(k_last);
    if let Some(g) = graph {
        for &(i, j) in g.edges() {
            let ((x1, y1), (x2, y2)) = (view.map(last[i]), view.map(last[j]));
            let _ = writeln!(
                s,
                r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="black" stroke-width="1" stroke-opacity="0.5"/>"#
            );
        }
    }
    for (i, track) in tracks.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = track
            .iter()
            .map(|&p| {
                let (x, y) = view.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        let (x0, y0) = view.map(track[0]);
        let _ = writeln!(s, r#"<circle cx="{x0:.2}" cy="{y0:.2}" r="4" fill="none" stroke="{color}" stroke-width="1.5"/>"#);
        let (x1, y1) = view.map(last[i]);
        let _ = writeln!(s, r#"<circle cx="{x1:.2}" cy="{y1:.2}" r="4" fill="{color}"/>"#);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11" font-family="sans-serif">{}</text>"#, x1 + 5.0, y1 - 5.0, i + 1);
    }
    s.push_str("</svg>\n");
    s
}
