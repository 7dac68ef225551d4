//! Hand-rolled SVG convergence plots: best value so far against cumulative
//! evaluations, one polyline per method.

use std::path::Path;

use macopt::TraceRecord;

use crate::{io_err, HarnessError};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
const MAX_POINTS: usize = 500;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Renders one SVG with a polyline per labeled trace. The y axis uses a
/// log10 scale when every plotted value is positive, linear otherwise.
/// Traces longer than 500 points are subsampled evenly.
pub fn render_convergence_plot(
    series: &[(String, &[TraceRecord])],
    path: &Path,
) -> Result<(), HarnessError> {
    let series: Vec<(&str, Vec<(f64, f64)>)> = series
        .iter()
        .filter(|(_, trace)| !trace.is_empty())
        .map(|(label, trace)| (label.as_str(), thin(trace)))
        .collect();
    if series.is_empty() {
        return Err(HarnessError::EmptyInput("no non-empty traces to plot"));
    }

    let log_scale = series
        .iter()
        .flat_map(|(_, pts)| pts.iter())
        .all(|(_, y)| *y > 0.0);
    let ty = |y: f64| if log_scale { y.log10() } else { y };

    let mut x_max = f64::MIN;
    let mut y_min = f64::MAX;
    let mut y_max = f64::MIN;
    for (_, pts) in &series {
        for &(x, y) in pts {
            x_max = x_max.max(x);
            y_min = y_min.min(ty(y));
            y_max = y_max.max(ty(y));
        }
    }
    let x_max = x_max.max(1.0);
    if y_max - y_min < 1e-12 {
        y_min -= 1.0;
        y_max += 1.0;
    }

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + x / x_max * plot_w;
    let sy = |y: f64| MARGIN_TOP + (y_max - y) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    let title = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        escape(&title)
    ));

    // frame
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n"
    ));

    // x ticks
    for k in 0..=5 {
        let x = x_max * k as f64 / 5.0;
        let px = sx(x);
        let py = MARGIN_TOP + plot_h;
        svg.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{py}\" x2=\"{px}\" y2=\"{}\" stroke=\"black\"/>\n",
            py + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{px}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            py + 18.0,
            x.round() as u64
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\">evaluations</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    ));

    // y ticks
    let ticks = y_ticks(y_min, y_max, log_scale);
    for (value, label) in &ticks {
        let py = sy(*value);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py}\" x2=\"{MARGIN_LEFT}\" y2=\"{py}\" stroke=\"black\"/>\n",
            MARGIN_LEFT - 5.0
        ));
        svg.push_str(&format!(
            "<line x1=\"{MARGIN_LEFT}\" y1=\"{py}\" x2=\"{}\" y2=\"{py}\" \
             stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n",
            MARGIN_LEFT + plot_w
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            MARGIN_LEFT - 9.0,
            py + 4.0,
            label
        ));
    }
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">best value{}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        if log_scale { " (log)" } else { "" }
    ));

    // polylines
    for (idx, (_, pts)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(ty(y))))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
    }

    // legend
    let lx = MARGIN_LEFT + plot_w + 12.0;
    svg.push_str(&format!(
        "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect x=\"{lx}\" y=\"{MARGIN_TOP}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"#999999\"/>\n",
        MARGIN_RIGHT - 24.0,
        series.len() as f64 * 20.0 + 10.0
    ));
    for (idx, (label, _)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let y = MARGIN_TOP + 18.0 + idx as f64 * 20.0;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" \
             stroke-width=\"3\"/>\n",
            lx + 6.0,
            y - 4.0,
            lx + 26.0,
            y - 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            lx + 32.0,
            y,
            escape(label)
        ));
    }
    svg.push_str("</g>\n</svg>\n");

    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
    }
    std::fs::write(path, svg).map_err(|e| io_err(path, e))
}

fn thin(trace: &[TraceRecord]) -> Vec<(f64, f64)> {
    let pts: Vec<(f64, f64)> = trace
        .iter()
        .map(|t| (t.eval_count as f64, t.best_value))
        .collect();
    if pts.len() <= MAX_POINTS {
        return pts;
    }
    let mut thinned: Vec<(f64, f64)> = (0..MAX_POINTS - 1)
        .map(|k| pts[k * pts.len() / (MAX_POINTS - 1)])
        .collect();
    thinned.push(*pts.last().expect("non-empty"));
    thinned
}

fn y_ticks(y_min: f64, y_max: f64, log_scale: bool) -> Vec<(f64, String)> {
    if log_scale {
        let lo = y_min.floor() as i64;
        let hi = y_max.ceil() as i64;
        let span = (hi - lo).max(1);
        let step = (span as usize).div_ceil(8).max(1) as i64;
        (lo..=hi)
            .step_by(step as usize)
            .map(|e| (e as f64, format!("1e{e}")))
            .collect()
    } else {
        (0..=5)
            .map(|k| {
                let v = y_min + (y_max - y_min) * k as f64 / 5.0;
                let label = if v == 0.0 || (v.abs() >= 1e-3 && v.abs() < 1e4) {
                    format!("{v:.3}")
                } else {
                    format!("{v:.2e}")
                };
                (v, label)
            })
            .collect()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
