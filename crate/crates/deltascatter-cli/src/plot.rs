//! Deterministic SVG polyline plots of sweep/coincidence CSV tables.
//!
//! No graphics dependency: the emitter writes a fixed-size frame, an
//! `abs_f`-over-param polyline, and min/max labels. Identical input and
//! flags produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::{CliError, EXIT_INPUT};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN: f64 = 64.0;

pub struct PlotData {
    pub points: Vec<(f64, f64)>,
    pub x_label: String,
    pub y_label: String,
}

/// Parses a CSV produced by `sweep` or `coincidence`: the first column is
/// the abscissa, the `abs_f` column the ordinate. Rows with non-finite
/// values (singular points) are skipped.
pub fn parse_csv(text: &str, path: &Path) -> Result<PlotData, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::new(EXIT_INPUT, format!("{}: empty CSV", path.display())))?;
    let columns: Vec<&str> = header.split(',').collect();
    let y_index = columns.iter().position(|c| *c == "abs_f").ok_or_else(|| {
        CliError::new(EXIT_INPUT, format!("{}: no abs_f column in header", path.display()))
    })?;
    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < columns.len() {
            return Err(CliError::new(
                EXIT_INPUT,
                format!("{}: short row at line {}", path.display(), lineno + 2),
            ));
        }
        let x: f64 = fields[0].parse().map_err(|_| {
            CliError::new(EXIT_INPUT, format!("{}: bad abscissa at line {}", path.display(), lineno + 2))
        })?;
        let y: f64 = fields[y_index].parse().map_err(|_| {
            CliError::new(EXIT_INPUT, format!("{}: bad abs_f at line {}", path.display(), lineno + 2))
        })?;
        if x.is_finite() && y.is_finite() {
            points.push((x, y));
        }
    }
    if points.len() < 2 {
        return Err(CliError::new(
            EXIT_INPUT,
            format!("{}: need at least two finite rows to plot", path.display()),
        ));
    }
    Ok(PlotData {
        points,
        x_label: columns[0].to_string(),
        y_label: "abs_f".to_string(),
    })
}

/// Renders the polyline. With `log_y` the ordinate is log10-transformed;
/// nonpositive values are then an input error.
pub fn render_svg(data: &PlotData, log_y: bool) -> Result<String, CliError> {
    let mut points = data.points.clone();
    if log_y {
        if let Some((x, y)) = points.iter().find(|(_, y)| *y <= 0.0) {
            return Err(CliError::new(
                EXIT_INPUT,
                format!("log axis requested but abs_f = {y} at param = {x} is not positive"),
            ));
        }
        for p in points.iter_mut() {
            p.1 = p.1.log10();
        }
    }
    let (x_min, x_max) = bounds(points.iter().map(|p| p.0));
    let (y_min, y_max) = bounds(points.iter().map(|p| p.1));
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let y_span = if y_max > y_min { y_max - y_min } else { 1.0 };
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN + (x - x_min) / x_span * (WIDTH - 2.0 * MARGIN),
            HEIGHT - MARGIN - (y - y_min) / y_span * (HEIGHT - 2.0 * MARGIN),
        )
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let mut path = String::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        let (px, py) = to_px(x, y);
        let _ = write!(path, "{}{px:.4},{py:.4}", if i == 0 { "" } else { " " });
    }
    let _ = writeln!(
        svg,
        "<polyline points=\"{path}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>"
    );
    let y_name = if log_y { format!("log10({})", data.y_label) } else { data.y_label.clone() };
    let _ = writeln!(
        svg,
        "<text x=\"{:.4}\" y=\"{:.4}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        HEIGHT - MARGIN / 3.0,
        xml_escape(&data.x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.4}\" y=\"{:.4}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 {:.4} {:.4})\">{}</text>",
        MARGIN / 3.0,
        HEIGHT / 2.0,
        MARGIN / 3.0,
        HEIGHT / 2.0,
        xml_escape(&y_name)
    );
    for (value, x_side) in [(x_min, false), (x_max, true)] {
        let (px, _) = to_px(value, y_min);
        let anchor = if x_side { "end" } else { "start" };
        let _ = writeln!(
            svg,
            "<text x=\"{px:.4}\" y=\"{:.4}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"{anchor}\">{value:.6e}</text>",
            HEIGHT - MARGIN + 16.0
        );
    }
    for (value, top) in [(y_min, false), (y_max, true)] {
        let (_, py) = to_px(x_min, value);
        let _ = writeln!(
            svg,
            "<text x=\"{:.4}\" y=\"{:.4}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{value:.6e}</text>",
            MARGIN - 6.0,
            py + if top { 10.0 } else { 0.0 }
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
