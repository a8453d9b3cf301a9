//! Self-contained SVG rendering of a traced boundary: one filled cell per
//! grid node, axis frames with tick labels, a colorbar, and contour
//! polylines extracted by marching squares. No external assets, fixed
//! decimal formatting, so identical inputs render identical bytes.

use std::fmt::Write as _;

use crate::CliError;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const TOP: f64 = 40.0;
const PLOT_W: f64 = 520.0;
const PLOT_H: f64 = 410.0;
const NAN_FILL: &str = "#b4b4b4";
const CONTOUR_LEVELS: [f64; 3] = [0.25, 0.5, 0.75];

/// Three-stop color ramp, dark violet through teal to yellow.
fn color(t: f64) -> String {
    let stops = [(68.0, 1.0, 84.0), (33.0, 145.0, 140.0), (253.0, 231.0, 37.0)];
    let t = t.clamp(0.0, 1.0) * 2.0;
    let (a, b, f) = if t <= 1.0 {
        (stops[0], stops[1], t)
    } else {
        (stops[1], stops[2], t - 1.0)
    };
    let lerp = |lo: f64, hi: f64| (lo + (hi - lo) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(a.0, b.0), lerp(a.1, b.1), lerp(a.2, b.2))
}

fn fmt(x: f64) -> String {
    format!("{x:.2}")
}

/// Renders `values` (row-major over `ys` then `xs`) as a heatmap of the
/// boundary surface. NaN cells draw gray and take no part in the color
/// scale or the contours.
pub fn heatmap(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[f64],
) -> Result<String, CliError> {
    let (nx, ny) = (xs.len(), ys.len());
    if nx == 0 || ny == 0 || values.len() != nx * ny {
        return Err(CliError::Config(format!(
            "heatmap grid is {ny} x {nx} but has {} values",
            values.len()
        )));
    }
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = |v: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };

    let cw = PLOT_W / nx as f64;
    let ch = PLOT_H / ny as f64;
    // Node (i, j) renders as a cell centered at (px(j), py(i)); the y axis
    // points up in data coordinates.
    let px = |j: f64| LEFT + (j + 0.5) * cw;
    let py = |i: f64| TOP + PLOT_H - (i + 0.5) * ch;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"monospace\" font-size=\"12\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{title}</text>",
        LEFT + PLOT_W / 2.0,
        TOP - 14.0
    );

    for i in 0..ny {
        for j in 0..nx {
            let v = values[i * nx + j];
            let fill = if v.is_finite() { color(scale(v)) } else { NAN_FILL.to_string() };
            let _ = writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"/>",
                fmt(px(j as f64) - cw / 2.0),
                fmt(py(i as f64) - ch / 2.0),
                fmt(cw),
                fmt(ch)
            );
        }
    }

    if hi > lo {
        for frac in CONTOUR_LEVELS {
            let level = lo + frac * (hi - lo);
            let mut d = String::new();
            for seg in marching_squares(values, nx, ny, level) {
                let _ = write!(
                    d,
                    "M {} {} L {} {} ",
                    fmt(px(seg[0].1)),
                    fmt(py(seg[0].0)),
                    fmt(px(seg[1].1)),
                    fmt(py(seg[1].0))
                );
            }
            if !d.is_empty() {
                let _ = writeln!(
                    s,
                    "<path d=\"{}\" fill=\"none\" stroke=\"white\" stroke-width=\"1.2\"/>",
                    d.trim_end()
                );
            }
        }
    }

    let _ = writeln!(
        s,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" \
         fill=\"none\" stroke=\"black\"/>"
    );

    // Ticks at the first, middle, and last grid node of each axis.
    for &j in &[0, nx / 2, nx - 1] {
        let x = px(j as f64);
        let _ = writeln!(
            s,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>",
            fmt(x),
            fmt(TOP + PLOT_H),
            fmt(TOP + PLOT_H + 5.0)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            fmt(x),
            fmt(TOP + PLOT_H + 18.0),
            format_args!("{:.3}", xs[j])
        );
    }
    for &i in &[0, ny / 2, ny - 1] {
        let y = py(i as f64);
        let _ = writeln!(
            s,
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"black\"/>",
            fmt(y),
            fmt(LEFT - 5.0),
            fmt(LEFT)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            fmt(LEFT - 8.0),
            fmt(y + 4.0),
            format_args!("{:.3}", ys[i])
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>",
        LEFT + PLOT_W / 2.0,
        TOP + PLOT_H + 40.0
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{y_label}</text>",
        TOP + PLOT_H / 2.0,
        TOP + PLOT_H / 2.0
    );

    // Colorbar with the data range; a gray swatch marks unreachable cells.
    let bar_x = LEFT + PLOT_W + 24.0;
    if hi > lo {
        let slabs = 32;
        let slab_h = PLOT_H / slabs as f64;
        for k in 0..slabs {
            let t = (k as f64 + 0.5) / slabs as f64;
            let _ = writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"18\" height=\"{}\" fill=\"{}\"/>",
                fmt(bar_x),
                fmt(TOP + PLOT_H - (k + 1) as f64 * slab_h),
                fmt(slab_h + 0.5),
                color(t)
            );
        }
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\">{}</text>",
            fmt(bar_x + 24.0),
            fmt(TOP + 10.0),
            format_args!("{hi:.4}")
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\">{}</text>",
            fmt(bar_x + 24.0),
            fmt(TOP + PLOT_H),
            format_args!("{lo:.4}")
        );
    }
    if values.iter().any(|v| !v.is_finite()) {
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{NAN_FILL}\"/>",
            fmt(bar_x),
            fmt(TOP + PLOT_H + 16.0)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\">n/a</text>",
            fmt(bar_x + 16.0),
            fmt(TOP + PLOT_H + 26.0)
        );
    }

    s.push_str("</svg>\n");
    Ok(s)
}

/// Level-set segments in fractional grid coordinates `(i, j)`. Squares
/// touching a non-finite corner are skipped; the two ambiguous saddle cases
/// split toward separate corners.
fn marching_squares(
    values: &[f64],
    nx: usize,
    ny: usize,
    level: f64,
) -> Vec<[(f64, f64); 2]> {
    let v = |i: usize, j: usize| values[i * nx + j];
    let mut segs = Vec::new();
    for i in 0..ny.saturating_sub(1) {
        for j in 0..nx.saturating_sub(1) {
            let corners = [v(i, j), v(i, j + 1), v(i + 1, j + 1), v(i + 1, j)];
            if corners.iter().any(|c| !c.is_finite()) {
                continue;
            }
            let mut case = 0usize;
            for (bit, c) in corners.iter().enumerate() {
                if *c >= level {
                    case |= 1 << bit;
                }
            }
            // Edge midpoints by linear interpolation. Edge k joins corner k
            // and corner (k+1) % 4; corners wind a=(i,j), b=(i,j+1),
            // c=(i+1,j+1), d=(i+1,j).
            let cut = |k: usize| -> (f64, f64) {
                let (p, q) = (k, (k + 1) % 4);
                let t = (level - corners[p]) / (corners[q] - corners[p]);
                let pos = [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)];
                let (pi, pj) = pos[p];
                let (qi, qj) = pos[q];
                (i as f64 + pi + (qi - pi) * t, j as f64 + pj + (qj - pj) * t)
            };
            let edges: &[[usize; 2]] = match case {
                0 | 15 => &[],
                1 | 14 => &[[3, 0]],
                2 | 13 => &[[0, 1]],
                3 | 12 => &[[3, 1]],
                4 | 11 => &[[1, 2]],
                5 => &[[3, 0], [1, 2]],
                6 | 9 => &[[0, 2]],
                7 | 8 => &[[2, 3]],
                10 => &[[0, 1], [2, 3]],
                _ => unreachable!(),
            };
            for e in edges {
                segs.push([cut(e[0]), cut(e[1])]);
            }
        }
    }
    segs
}
