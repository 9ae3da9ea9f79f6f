//! Minimal SVG line plots for episode trajectories. No plotting dependency:
//! the files are simple enough to assemble by hand, and keeping the output
//! byte-deterministic matters more than styling.

use sim_engine::TrajectoryLog;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 16.0;
const MARGIN_BOTTOM: f64 = 40.0;

const PALETTE: [&str; 7] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

/// Positions and targets against time, one polyline per joint, targets
/// dashed. Long logs are downsampled to at most 2000 points per line.
pub fn trajectory_svg(log: &TrajectoryLog) -> String {
    assert!(!log.is_empty(), "cannot plot an empty log");
    let rows = log.len();
    let stride = rows.div_ceil(2000).max(1);

    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for k in (0..rows).step_by(stride) {
        for series in [&log.q[k], &log.target[k]] {
            for &v in series.iter() {
                y_min = y_min.min(v);
                y_max = y_max.max(v);
            }
        }
    }
    if !(y_max > y_min) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let t_min = log.t[0];
    let t_max = log.t[rows - 1].max(t_min + f64::EPSILON);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |t: f64| MARGIN_LEFT + (t - t_min) / (t_max - t_min) * plot_w;
    let y_of = |v: f64| MARGIN_TOP + (y_max - v) / (y_max - y_min) * plot_h;

    let mut svg = String::with_capacity(64 * 1024);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n"
    ));

    for (dim, color) in (0..log.dof).zip(PALETTE.iter().cycle()) {
        let mut points = String::new();
        for k in (0..rows).step_by(stride) {
            points.push_str(&format!("{:.2},{:.2} ", x_of(log.t[k]), y_of(log.q[k][dim])));
        }
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
            points.trim_end()
        ));

        let mut points = String::new();
        for k in (0..rows).step_by(stride) {
            points.push_str(&format!(
                "{:.2},{:.2} ",
                x_of(log.t[k]),
                y_of(log.target[k][dim])
            ));
        }
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" \
             stroke-dasharray=\"6 4\" opacity=\"0.6\" points=\"{}\"/>\n",
            points.trim_end()
        ));
    }

    for (t, anchor) in [(t_min, "start"), (t_max, "end")] {
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\" \
             text-anchor=\"{anchor}\">{t:.2}</text>\n",
            x_of(t),
            HEIGHT - MARGIN_BOTTOM + 16.0
        ));
    }
    for v in [y_min + pad, y_max - pad] {
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\" \
             text-anchor=\"end\">{v:.3}</text>\n",
            MARGIN_LEFT - 6.0,
            y_of(v) + 4.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\" \
         text-anchor=\"middle\">t [s]</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 8.0
    ));
    svg.push_str("</svg>\n");
    svg
}
