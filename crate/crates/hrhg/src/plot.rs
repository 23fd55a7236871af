//! Minimal native SVG emission for threshold scatter/fit plots and the
//! correctable-region figure. No plotting dependency; the CSV/JSON files
//! remain the canonical artifacts.

use std::fmt::Write as _;

use crate::fit::{FitPoint, ThresholdEstimate};

const W: f64 = 640.0;
const H: f64 = 480.0;
const ML: f64 = 70.0;
const MR: f64 = 20.0;
const MT: f64 = 20.0;
const MB: f64 = 55.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        ML + (x - self.x0) / (self.x1 - self.x0) * (W - ML - MR)
    }

    fn sy(&self, y: f64) -> f64 {
        H - MB - (y - self.y0) / (self.y1 - self.y0) * (H - MT - MB)
    }
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        "<rect x='{ML}' y='{MT}' width='{}' height='{}' fill='none' stroke='black'/>",
        W - ML - MR,
        H - MT - MB
    );
    for i in 0..=5 {
        let x = f.x0 + (f.x1 - f.x0) * i as f64 / 5.0;
        let y = f.y0 + (f.y1 - f.y0) * i as f64 / 5.0;
        let _ = write!(
            out,
            "<line x1='{:.1}' y1='{}' x2='{:.1}' y2='{}' stroke='black'/>\
             <text x='{:.1}' y='{}' font-size='12' text-anchor='middle'>{:.3}</text>",
            f.sx(x),
            H - MB,
            f.sx(x),
            H - MB + 5.0,
            f.sx(x),
            H - MB + 20.0,
            x
        );
        let _ = write!(
            out,
            "<line x1='{}' y1='{:.1}' x2='{}' y2='{:.1}' stroke='black'/>\
             <text x='{}' y='{:.1}' font-size='12' text-anchor='end'>{:.3}</text>",
            ML - 5.0,
            f.sy(y),
            ML,
            f.sy(y),
            ML - 8.0,
            f.sy(y) + 4.0,
            y
        );
    }
    let _ = write!(
        out,
        "<text x='{:.1}' y='{}' font-size='14' text-anchor='middle'>{}</text>",
        ML + (W - ML - MR) / 2.0,
        H - 12.0,
        x_label
    );
    let _ = write!(
        out,
        "<text x='16' y='{:.1}' font-size='14' text-anchor='middle' transform='rotate(-90 16 {:.1})'>{}</text>",
        MT + (H - MT - MB) / 2.0,
        MT + (H - MT - MB) / 2.0,
        y_label
    );
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Failure-rate scatter with per-distance fit curves and the fitted crossing.
pub fn threshold_plot(
    points: &[FitPoint],
    est: Option<&ThresholdEstimate>,
    x_label: &str,
) -> String {
    let mut ds: Vec<usize> = points.iter().map(|p| p.d).collect();
    ds.sort_unstable();
    ds.dedup();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y1 = 0.0f64;
    for p in points {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y1 = y1.max(p.p_fail + 2.0 * p.stderr);
    }
    let pad = 0.05 * (x1 - x0).max(1e-9);
    let f = Frame {
        x0: x0 - pad,
        x1: x1 + pad,
        y0: 0.0,
        y1: (y1 * 1.15).max(1e-6),
    };
    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns='http://www.w3.org/2000/svg' width='{W}' height='{H}' viewBox='0 0 {W} {H}'>\
         <rect width='{W}' height='{H}' fill='white'/>"
    );
    axes(&mut out, &f, x_label, "logical failure rate");
    for (ci, &d) in ds.iter().enumerate() {
        let color = COLORS[ci % COLORS.len()];
        for p in points.iter().filter(|p| p.d == d) {
            let (sx, sy) = (f.sx(p.x), f.sy(p.p_fail));
            let (e0, e1) = (f.sy(p.p_fail - p.stderr), f.sy(p.p_fail + p.stderr));
            let _ = write!(
                out,
                "<line x1='{sx:.1}' y1='{e0:.1}' x2='{sx:.1}' y2='{e1:.1}' stroke='{color}'/>\
                 <circle cx='{sx:.1}' cy='{sy:.1}' r='3' fill='{color}'/>"
            );
        }
        if let Some(e) = est {
            let mut path = String::new();
            for k in 0..=100 {
                let x = f.x0 + (f.x1 - f.x0) * k as f64 / 100.0;
                let u = (x - e.x_c) * (d as f64).powf(1.0 / e.nu);
                let y = (e.coeff_a + e.coeff_b * u + e.coeff_c * u * u).clamp(f.y0, f.y1);
                let _ = write!(
                    path,
                    "{}{:.1},{:.1} ",
                    if k == 0 { "M" } else { "L" },
                    f.sx(x),
                    f.sy(y)
                );
            }
            let _ = write!(
                out,
                "<path d='{path}' fill='none' stroke='{color}' stroke-width='1' opacity='0.7'/>"
            );
        }
        let _ = write!(
            out,
            "<text x='{}' y='{}' font-size='13' fill='{color}'>d = {d}</text>",
            W - MR - 70.0,
            MT + 18.0 * (ci as f64 + 1.0)
        );
    }
    if let Some(e) = est {
        let sx = f.sx(e.x_c);
        let _ = write!(
            out,
            "<line x1='{sx:.1}' y1='{MT}' x2='{sx:.1}' y2='{}' stroke='black' stroke-dasharray='6 4'/>\
             <text x='{:.1}' y='{}' font-size='13' text-anchor='middle'>crossing {:.3}</text>",
            H - MB,
            sx,
            MT + 14.0,
            e.x_c
        );
    }
    out.push_str("</svg>");
    out
}

/// Correctable-region plot over the (squeezing dB, swap-out) plane: fitted
/// boundary points with the region below the curve shaded.
pub fn region_plot(boundary: &[(f64, f64)]) -> String {
    let mut pts = boundary.to_vec();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let x0 = pts.first().map_or(9.0, |p| p.0) - 0.5;
    let x1 = pts.last().map_or(16.0, |p| p.0) + 0.5;
    let y1 = pts.iter().map(|p| p.1).fold(0.05, f64::max) * 1.2;
    let f = Frame { x0, x1, y0: 0.0, y1 };
    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns='http://www.w3.org/2000/svg' width='{W}' height='{H}' viewBox='0 0 {W} {H}'>\
         <rect width='{W}' height='{H}' fill='white'/>"
    );
    if !pts.is_empty() {
        // Shade from the boundary toward high squeezing / low swap-out.
        let mut poly = String::new();
        for (x, y) in &pts {
            let _ = write!(poly, "{:.1},{:.1} ", f.sx(*x), f.sy(*y));
        }
        let _ = write!(poly, "{:.1},{:.1} ", f.sx(f.x1), f.sy(pts.last().unwrap().1));
        let _ = write!(poly, "{:.1},{:.1} ", f.sx(f.x1), f.sy(0.0));
        let _ = write!(poly, "{:.1},{:.1}", f.sx(pts[0].0), f.sy(0.0));
        let _ = write!(
            out,
            "<polygon points='{poly}' fill='#9ecae1' opacity='0.5' stroke='none'/>"
        );
        let mut line = String::new();
        for (k, (x, y)) in pts.iter().enumerate() {
            let _ = write!(
                line,
                "{}{:.1},{:.1} ",
                if k == 0 { "M" } else { "L" },
                f.sx(*x),
                f.sy(*y)
            );
        }
        let _ = write!(
            out,
            "<path d='{line}' fill='none' stroke='#1f77b4' stroke-width='2'/>"
        );
        for (x, y) in &pts {
            let _ = write!(
                out,
                "<circle cx='{:.1}' cy='{:.1}' r='4' fill='#1f77b4'/>",
                f.sx(*x),
                f.sy(*y)
            );
        }
        let _ = write!(
            out,
            "<text x='{:.1}' y='{:.1}' font-size='14'>correctable</text>",
            f.sx(f.x0 + 0.75 * (f.x1 - f.x0)),
            f.sy(0.18 * f.y1)
        );
    }
    axes(&mut out, &f, "squeezing (dB)", "swap-out probability p0");
    out.push_str("</svg>");
    out
}
