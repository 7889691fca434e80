//! Minimal static SVG emission: class-colored scatter plots and
//! accuracy-versus-factor line charts. Every marker carries `data-x`/`data-y`
//! attributes holding the exact data values it was plotted from.

use std::fmt::Write as _;
use std::path::Path;

use cephalo_core::augment::{LabeledSet, Origin};
use cephalo_core::features::GrowthLabel;

use crate::error::CliError;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN: f64 = 60.0;

fn class_color(label: GrowthLabel) -> &'static str {
    match label {
        GrowthLabel::Horizontal => "#d62728",
        GrowthLabel::Mixed => "#1f77b4",
        GrowthLabel::Vertical => "#2ca02c",
    }
}

const SERIES_COLORS: [&str; 9] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22",
];

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn from_bounds(xs: impl Iterator<Item = f64>, ys: impl Iterator<Item = f64>) -> Frame {
        let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for x in xs {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
        }
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for y in ys {
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        // pad degenerate spans so the transform stays finite
        if !(x_max > x_min) {
            x_min -= 0.5;
            x_max += 0.5;
        }
        if !(y_max > y_min) {
            y_min -= 0.5;
            y_max += 0.5;
        }
        let pad_x = 0.05 * (x_max - x_min);
        let pad_y = 0.05 * (y_max - y_min);
        Frame {
            x_min: x_min - pad_x,
            x_max: x_max + pad_x,
            y_min: y_min - pad_y,
            y_max: y_max + pad_y,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn document_open(title: &str) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        s,
        "  <title>{}</title>",
        escape(title)
    );
    let _ = writeln!(
        s,
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(s: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN;
    let x1 = WIDTH - MARGIN;
    let y0 = HEIGHT - MARGIN;
    let y1 = MARGIN;
    let _ = writeln!(
        s,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - MARGIN / 3.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">{}</text>",
        MARGIN / 3.0,
        (y0 + y1) / 2.0,
        MARGIN / 3.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
    for (value, px) in [(frame.x_min, x0), (frame.x_max, x1)] {
        let _ = writeln!(
            s,
            "  <text x=\"{px}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{value:.3}</text>",
            y0 + 18.0
        );
    }
    for (value, py) in [(frame.y_min, y0), (frame.y_max, y1)] {
        let _ = writeln!(
            s,
            "  <text x=\"{}\" y=\"{py}\" font-size=\"11\" text-anchor=\"end\">{value:.3}</text>",
            x0 - 6.0
        );
    }
}

/// Scatter of an augmented set over its first two feature axes: originals
/// filled, synthetic points hollow, one color per class.
pub fn write_augment_scatter(
    path: &Path,
    set: &LabeledSet,
    x_name: &str,
    y_name: &str,
) -> Result<(), CliError> {
    if set.dim() < 2 {
        return Err(CliError::Config(String::from(
            "scatter needs at least two feature columns",
        )));
    }
    let frame = Frame::from_bounds(
        set.points.iter().map(|p| p[0]),
        set.points.iter().map(|p| p[1]),
    );
    let mut s = document_open("augmented set");
    axes(&mut s, &frame, x_name, y_name);
    for i in 0..set.len() {
        let (x, y) = (set.points[i][0], set.points[i][1]);
        let color = class_color(set.labels[i]);
        let style = match set.origin[i] {
            Origin::Original => format!("fill=\"{color}\" stroke=\"none\""),
            Origin::Synthetic => format!("fill=\"none\" stroke=\"{color}\""),
        };
        let _ = writeln!(
            s,
            "  <circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" {style} data-x=\"{x}\" data-y=\"{y}\"/>",
            frame.px(x),
            frame.py(y),
        );
    }
    // legend: class colors plus the origin convention
    let mut ly = MARGIN + 10.0;
    for label in GrowthLabel::ALL {
        let _ = writeln!(
            s,
            "  <circle cx=\"{}\" cy=\"{ly}\" r=\"4\" fill=\"{}\"/>",
            WIDTH - MARGIN - 150.0,
            class_color(label)
        );
        let _ = writeln!(
            s,
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>",
            WIDTH - MARGIN - 140.0,
            ly + 4.0,
            label.label()
        );
        ly += 18.0;
    }
    let _ = writeln!(
        s,
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\">filled: original, hollow: synthetic</text>",
        WIDTH - MARGIN - 150.0,
        ly + 4.0
    );
    s.push_str("</svg>\n");
    std::fs::write(path, s).map_err(|e| CliError::file(path, e.to_string()))?;
    Ok(())
}

/// One line per series over (x, y) points; used for accuracy-vs-factor and
/// accuracy-vs-noise charts.
pub fn write_line_chart(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(String, Vec<(f64, f64)>)],
) -> Result<(), CliError> {
    let frame = Frame::from_bounds(
        series.iter().flat_map(|(_, pts)| pts.iter().map(|p| p.0)),
        series.iter().flat_map(|(_, pts)| pts.iter().map(|p| p.1)),
    );
    let mut s = document_open(title);
    axes(&mut s, &frame, x_label, y_label);
    for (si, (name, pts)) in series.iter().enumerate() {
        let color = SERIES_COLORS[si % SERIES_COLORS.len()];
        if pts.len() > 1 {
            let d: Vec<String> = pts
                .iter()
                .enumerate()
                .map(|(i, (x, y))| {
                    format!(
                        "{}{:.3} {:.3}",
                        if i == 0 { "M" } else { "L" },
                        frame.px(*x),
                        frame.py(*y)
                    )
                })
                .collect();
            let _ = writeln!(
                s,
                "  <path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                d.join(" ")
            );
        }
        for (x, y) in pts {
            let _ = writeln!(
                s,
                "  <circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"{color}\" data-x=\"{x}\" data-y=\"{y}\"/>",
                frame.px(*x),
                frame.py(*y),
            );
        }
        let ly = MARGIN + 10.0 + 16.0 * si as f64;
        let _ = writeln!(
            s,
            "  <line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            WIDTH - MARGIN - 170.0,
            WIDTH - MARGIN - 150.0
        );
        let _ = writeln!(
            s,
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>",
            WIDTH - MARGIN - 144.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    std::fs::write(path, s).map_err(|e| CliError::file(path, e.to_string()))?;
    Ok(())
}
