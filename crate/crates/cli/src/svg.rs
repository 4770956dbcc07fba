//! Minimal static SVG line plots for the ratio and sum series.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{io_at, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 300.0;
const MARGIN: f64 = 45.0;

/// One polyline over integer x positions, with axes and min/max labels.
pub fn write_line_plot(path: &Path, title: &str, xs: &[usize], ys: &[f64]) -> Result<()> {
    assert_eq!(xs.len(), ys.len());
    let x_min = xs.first().copied().unwrap_or(0) as f64;
    let x_max = xs.last().copied().unwrap_or(1) as f64;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for &y in ys {
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if !y_min.is_finite() || y_min == y_max {
        y_min = 0.0;
        y_max = y_max.max(1.0);
    }
    let x_span = (x_max - x_min).max(1.0);
    let y_span = y_max - y_min;

    let to_px = |x: f64, y: f64| {
        (
            MARGIN + (x - x_min) / x_span * (WIDTH - 2.0 * MARGIN),
            HEIGHT - MARGIN - (y - y_min) / y_span * (HEIGHT - 2.0 * MARGIN),
        )
    };

    let mut points = String::new();
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        let (px, py) = to_px(x as f64, y);
        let _ = write!(points, "{px:.2},{py:.2} ");
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"18\" font-family=\"monospace\" font-size=\"13\">{title}</text>",
        MARGIN
    );
    // Axes.
    let _ = writeln!(
        svg,
        "<line x1=\"{m:.2}\" y1=\"{b:.2}\" x2=\"{r:.2}\" y2=\"{b:.2}\" stroke=\"black\"/>",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{m:.2}\" y1=\"{t:.2}\" x2=\"{m:.2}\" y2=\"{b:.2}\" stroke=\"black\"/>",
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN
    );
    // Range labels.
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\">{}</text>",
        MARGIN,
        HEIGHT - MARGIN + 16.0,
        x_min as usize
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{}</text>",
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16.0,
        x_max as usize
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\">{:e}</text>",
        4.0,
        HEIGHT - MARGIN,
        y_min
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\">{:e}</text>",
        4.0,
        MARGIN + 4.0,
        y_max
    );
    let _ = writeln!(
        svg,
        "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\" points=\"{}\"/>",
        points.trim_end()
    );
    let _ = writeln!(svg, "</svg>");
    io_at(path, std::fs::write(path, svg))
}
