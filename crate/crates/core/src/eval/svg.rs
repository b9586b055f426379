//! Trajectory overlay plots as standalone SVG files.

use crate::error::{CoreError, Result};
use std::path::Path;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 800.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// One named polyline in meters.
pub struct PlotSeries<'a> {
    pub name: &'a str,
    pub points: &'a [(f64, f64)],
}

/// Renders an overlay of the given trajectories with a metric grid and a
/// legend. Output is a pure function of the input.
pub fn render_svg(series: &[PlotSeries<'_>]) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(CoreError::Input("nothing to plot".into()));
    }
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for s in series {
        for (x, y) in s.points {
            min_x = min_x.min(*x);
            max_x = max_x.max(*x);
            min_y = min_y.min(*y);
            max_y = max_y.max(*y);
        }
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1.0);
    let pad = span * 0.05;
    let (min_x, min_y) = (min_x - pad, min_y - pad);
    let span = span + 2.0 * pad;
    let scale = (WIDTH - 2.0 * MARGIN) / span;
    let to_px = |x: f64, y: f64| {
        (
            MARGIN + (x - min_x) * scale,
            HEIGHT - MARGIN - (y - min_y) * scale, // svg y grows downward
        )
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    let tick = nice_step(span / 8.0);
    let mut grid = String::new();
    let mut labels = String::new();
    let mut gx = (min_x / tick).ceil() * tick;
    while gx <= min_x + span {
        let (px, _) = to_px(gx, min_y);
        grid.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{MARGIN}\" x2=\"{px:.1}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
            HEIGHT - MARGIN
        ));
        labels.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" fill=\"#555555\">{gx:.0} m</text>\n",
            HEIGHT - MARGIN + 18.0
        ));
        gx += tick;
    }
    let mut gy = (min_y / tick).ceil() * tick;
    while gy <= min_y + span {
        let (_, py) = to_px(min_x, gy);
        if (MARGIN..=HEIGHT - MARGIN).contains(&py) {
            grid.push_str(&format!(
                "<line x1=\"{MARGIN}\" y1=\"{py:.1}\" x2=\"{}\" y2=\"{py:.1}\" stroke=\"#dddddd\"/>\n",
                WIDTH - MARGIN
            ));
            labels.push_str(&format!(
                "<text x=\"{}\" y=\"{py:.1}\" font-size=\"11\" text-anchor=\"end\" fill=\"#555555\">{gy:.0} m</text>\n",
                MARGIN - 8.0
            ));
        }
        gy += tick;
    }
    svg.push_str(&grid);
    svg.push_str(&labels);
    svg.push_str(&format!(
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888888\"/>\n",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    ));

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        for (k, (x, y)) in s.points.iter().enumerate() {
            let (px, py) = to_px(*x, *y);
            path.push_str(if k == 0 { "M" } else { "L" });
            path.push_str(&format!("{px:.2},{py:.2} "));
        }
        svg.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path.trim_end()
        ));
        let ly = MARGIN + 18.0 + 18.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"3\"/>\n",
            WIDTH - MARGIN - 150.0,
            WIDTH - MARGIN - 120.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" fill=\"#222222\">{}</text>\n",
            WIDTH - MARGIN - 112.0,
            ly + 4.0,
            escape(s.name)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes the overlay to `path`.
pub fn emit_plot(series: &[PlotSeries<'_>], path: &Path) -> Result<()> {
    let svg = render_svg(series)?;
    std::fs::write(path, svg)?;
    Ok(())
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.abs().max(1e-9).log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    step * mag
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
