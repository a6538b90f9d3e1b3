//! Minimal deterministic SVG line plots: axes box, ticks, polylines, legend.
//! CSV is the normative output; these renderings are for quick inspection.

use std::fmt::Write;

pub struct Curve {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub curves: Vec<Curve>,
    /// Horizontal reference lines (value, label).
    pub h_lines: Vec<(f64, String)>,
}

pub const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

const W: f64 = 800.0;
const H: f64 = 560.0;
const ML: f64 = 78.0;
const MR: f64 = 24.0;
const MT: f64 = 46.0;
const MB: f64 = 62.0;

fn fmt2(x: f64) -> String {
    format!("{x:.2}")
}

fn tick_label(v: f64, log: bool) -> String {
    let value = if log { 10f64.powf(v) } else { v };
    if value != 0.0 && (value.abs() >= 1e4 || value.abs() < 1e-3) {
        format!("{value:.0e}")
    } else if (value - value.round()).abs() < 1e-9 {
        format!("{}", value.round() as i64)
    } else {
        format!("{value:.3}")
    }
}

/// Evenly spaced ticks over [lo, hi] (already in plot coordinates).
fn ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

impl Plot {
    pub fn render(&self) -> String {
        let map = |v: f64, log: bool| -> Option<f64> {
            if log {
                if v > 0.0 {
                    Some(v.log10())
                } else {
                    None
                }
            } else if v.is_finite() {
                Some(v)
            } else {
                None
            }
        };
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for c in &self.curves {
            for (x, y) in &c.points {
                if let (Some(px), Some(py)) = (map(*x, self.log_x), map(*y, self.log_y)) {
                    xs.push(px);
                    ys.push(py);
                }
            }
        }
        for (y, _) in &self.h_lines {
            if let Some(py) = map(*y, self.log_y) {
                ys.push(py);
            }
        }
        let (x_lo, x_hi) = bounds(&xs);
        let (y_lo, y_hi) = bounds(&ys);
        let sx = |px: f64| ML + (px - x_lo) / (x_hi - x_lo) * (W - ML - MR);
        let sy = |py: f64| H - MB - (py - y_lo) / (y_hi - y_lo) * (H - MT - MB);

        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
        );
        let _ = writeln!(out, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
        let _ = writeln!(
            out,
            "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            W - ML - MR,
            H - MT - MB
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>",
            W / 2.0,
            xml(&self.title)
        );
        // ticks
        for t in ticks(x_lo, x_hi, 6) {
            let x = sx(t);
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
                fmt2(x),
                fmt2(H - MB),
                fmt2(x),
                fmt2(H - MB + 6.0)
            );
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
                fmt2(x),
                fmt2(H - MB + 22.0),
                tick_label(t, self.log_x)
            );
        }
        for t in ticks(y_lo, y_hi, 6) {
            let y = sy(t);
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
                fmt2(ML - 6.0),
                fmt2(y),
                fmt2(ML),
                fmt2(y)
            );
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
                fmt2(ML - 10.0),
                fmt2(y + 4.0),
                tick_label(t, self.log_y)
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>",
            W / 2.0,
            H - 16.0,
            xml(&self.x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 20 {})\">{}</text>",
            H / 2.0,
            H / 2.0,
            xml(&self.y_label)
        );
        // reference lines
        for (v, label) in &self.h_lines {
            if let Some(py) = map(*v, self.log_y) {
                let y = sy(py);
                let _ = writeln!(
                    out,
                    "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#777777\" stroke-dasharray=\"2,4\"/>",
                    fmt2(y),
                    W - MR,
                    fmt2(y)
                );
                let _ = writeln!(
                    out,
                    "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#777777\">{}</text>",
                    W - MR - 4.0,
                    fmt2(y - 4.0),
                    xml(label)
                );
            }
        }
        // curves
        for c in &self.curves {
            let mut path = String::new();
            let mut pen_down = false;
            for (x, y) in &c.points {
                match (map(*x, self.log_x), map(*y, self.log_y)) {
                    (Some(px), Some(py)) => {
                        let cmd = if pen_down { 'L' } else { 'M' };
                        let _ = write!(path, "{cmd}{} {} ", fmt2(sx(px)), fmt2(sy(py)));
                        pen_down = true;
                    }
                    _ => pen_down = false, // break the line at divergences
                }
            }
            let dash = if c.dashed {
                " stroke-dasharray=\"6,4\""
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\"{dash}/>",
                path.trim_end(),
                c.color
            );
        }
        // legend
        for (i, c) in self.curves.iter().enumerate() {
            let y = MT + 18.0 + 18.0 * i as f64;
            let dash = if c.dashed {
                " stroke-dasharray=\"6,4\""
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.6\"{dash}/>",
                ML + 10.0,
                fmt2(y - 4.0),
                ML + 40.0,
                fmt2(y - 4.0),
                c.color
            );
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
                ML + 46.0,
                fmt2(y),
                xml(&c.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in v {
        lo = lo.min(*x);
        hi = hi.max(*x);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.04 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
