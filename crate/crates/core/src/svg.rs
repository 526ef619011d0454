//! Minimal self-contained SVG line charts and heatmaps.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 52.0;
const MAX_HEAT_CELLS: usize = 160;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let pad = |a: f64, b: f64| if a == b { (a - 0.5, b + 0.5) } else { (a, b) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Frame { x0, x1, y0, y1 }
    }
    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }
    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn axes(out: &mut String, f: &Frame, title: &str, xlabel: &str, ylabel: &str) {
    let (l, r) = (MARGIN_L, WIDTH - MARGIN_R);
    let (t, b) = (MARGIN_T, HEIGHT - MARGIN_B);
    let _ = write!(
        out,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for i in 0..=4 {
        let fx = f.x0 + (f.x1 - f.x0) * i as f64 / 4.0;
        let fy = f.y0 + (f.y1 - f.y0) * i as f64 / 4.0;
        let _ = write!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
            f.px(fx),
            b + 16.0,
            tick(fx)
        );
        let _ = write!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#,
            l - 6.0,
            f.py(fy) + 4.0,
            tick(fy)
        );
    }
    let _ = write!(
        out,
        r#"<text x="{:.1}" y="22" font-size="14" text-anchor="middle">{}</text><text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text><text x="16" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        WIDTH / 2.0,
        escape(title),
        (l + r) / 2.0,
        HEIGHT - 12.0,
        escape(xlabel),
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(ylabel)
    );
}

fn open() -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif"><rect width="100%" height="100%" fill="white"/>"#
    )
}

pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let finite = || {
        series
            .iter()
            .flat_map(|s| s.points.iter())
            .filter(|p| p.0.is_finite() && p.1.is_finite())
    };
    let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&(f64, f64)) -> f64| finite().map(pick).fold(init, f);
    let frame = if finite().next().is_none() {
        Frame::new(0.0, 1.0, 0.0, 1.0)
    } else {
        Frame::new(
            fold(f64::min, f64::INFINITY, |p| p.0),
            fold(f64::max, f64::NEG_INFINITY, |p| p.0),
            fold(f64::min, f64::INFINITY, |p| p.1),
            fold(f64::max, f64::NEG_INFINITY, |p| p.1),
        )
    };
    let mut out = open();
    axes(&mut out, &frame, title, xlabel, ylabel);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for &(x, y) in s.points {
            if !(x.is_finite() && y.is_finite()) {
                pen_down = false;
                continue;
            }
            let _ = write!(d, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, frame.px(x), frame.py(y));
            pen_down = true;
        }
        let _ = write!(
            out,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#,
            d.trim_end()
        );
        if series.len() > 1 {
            let y = MARGIN_T + 14.0 + 14.0 * i as f64;
            let _ = write!(
                out,
                r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
                WIDTH - MARGIN_R - 120.0,
                WIDTH - MARGIN_R - 100.0,
                WIDTH - MARGIN_R - 96.0,
                y + 4.0,
                escape(s.label)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Greyscale heatmap of `cells[row][col]`; rows run along `y`, columns along
/// `x`. Large grids are coarsened by taking the block minimum, NaN cells are
/// left blank. Zero maps to white and the most negative value to black.
pub fn heatmap(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    x_range: (f64, f64),
    y_range: (f64, f64),
    cells: &[Vec<f64>],
) -> String {
    let rows = cells.len();
    let cols = cells.first().map_or(0, Vec::len);
    let step_r = rows.div_ceil(MAX_HEAT_CELLS).max(1);
    let step_c = cols.div_ceil(MAX_HEAT_CELLS).max(1);
    let coarse: Vec<Vec<f64>> = (0..rows.div_ceil(step_r))
        .map(|br| {
            (0..cols.div_ceil(step_c))
                .map(|bc| {
                    let mut v = f64::NAN;
                    for row in cells.iter().skip(br * step_r).take(step_r) {
                        for &c in row.iter().skip(bc * step_c).take(step_c) {
                            if !c.is_nan() && (v.is_nan() || c < v) {
                                v = c;
                            }
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    let lo = coarse.iter().flatten().filter(|v| !v.is_nan()).fold(0.0, |a: f64, &b| a.min(b));

    let frame = Frame::new(x_range.0, x_range.1, y_range.0, y_range.1);
    let mut out = open();
    let nr = coarse.len().max(1) as f64;
    let nc = coarse.first().map_or(1, Vec::len).max(1) as f64;
    let w = (WIDTH - MARGIN_L - MARGIN_R) / nc;
    let h = (HEIGHT - MARGIN_T - MARGIN_B) / nr;
    for (r, row) in coarse.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            let level = if lo < 0.0 { (255.0 * (1.0 - v / lo)).round() as u8 } else { 255 };
            let _ = write!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({level},{level},{level})"/>"#,
                MARGIN_L + c as f64 * w,
                HEIGHT - MARGIN_B - (r + 1) as f64 * h,
                w + 0.05,
                h + 0.05
            );
        }
    }
    axes(&mut out, &frame, title, xlabel, ylabel);
    out.push_str("</svg>\n");
    out
}
