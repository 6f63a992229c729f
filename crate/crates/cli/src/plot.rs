//! Fixed-size SVG plots. Output depends only on the data, so reruns are byte-identical.

use std::fmt::Write as _;

use floquet_core::C64;

use crate::CliError;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 5;

/// A named curve `y(x)`, drawn as one polyline per file.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    /// Per-period sup `R_n` against `n`.
    pub fn per_period(name: impl Into<String>, title: impl Into<String>, sups: &[f64]) -> Self {
        Self {
            name: name.into(),
            title: title.into(),
            x_label: "period n".into(),
            y_label: "sup norm over period".into(),
            points: sups.iter().enumerate().map(|(k, &s)| ((k + 1) as f64, s)).collect(),
        }
    }
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".into()
    } else if !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="monospace" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let d = if lo == 0.0 { 1.0 } else { lo.abs() * 0.5 };
        (lo - d, hi + d)
    }
}

/// Line plot on an 800×600 canvas with labelled axes.
pub fn polyline_svg(series: &Series) -> String {
    let finite: Vec<(f64, f64)> = series
        .points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (x0, x1) = padded(
        finite.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).min(f64::MAX),
        finite
            .iter()
            .map(|p| p.0)
            .fold(f64::NEG_INFINITY, f64::max)
            .max(f64::MIN),
    );
    let ymax = finite.iter().map(|p| p.1).fold(0.0, f64::max);
    let ymin = finite.iter().map(|p| p.1).fold(0.0, f64::min);
    let (y0, y1) = padded(ymin, ymax);
    let (x0, x1) = if finite.is_empty() { (0.0, 1.0) } else { (x0, x1) };
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut out = String::new();
    header(&mut out, &series.title);
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            out,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#ccc"/>"##,
            TOP,
            TOP + ph
        );
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ccc"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 20.0,
        escape(&series.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&series.y_label)
    );
    if finite.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">no finite data</text>"#,
            LEFT + pw / 2.0,
            TOP + ph / 2.0
        );
    } else {
        let pts: Vec<String> = finite
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1.5" points="{}"/>"##,
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Eigenvalues on the complex plane (one marker per algebraic multiplicity) with the unit circle.
pub fn eigenvalue_svg(title: &str, eigenvalues: &[(C64, usize)]) -> String {
    let reach = eigenvalues
        .iter()
        .map(|(z, _)| z.norm())
        .filter(|r| r.is_finite())
        .fold(1.0, f64::max)
        * 1.2;
    let side = (HEIGHT - TOP - BOTTOM).min(WIDTH - LEFT - RIGHT);
    let cx = WIDTH / 2.0;
    let cy = TOP + side / 2.0;
    let scale = side / (2.0 * reach);
    let px = |x: f64| cx + x * scale;
    let py = |y: f64| cy - y * scale;

    let mut out = String::new();
    header(&mut out, title);
    let _ = writeln!(
        out,
        r#"<rect x="{:.2}" y="{TOP}" width="{side}" height="{side}" fill="none" stroke="black"/>"#,
        cx - side / 2.0
    );
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{cy:.2}" x2="{:.2}" y2="{cy:.2}" stroke="#999"/>"##,
        cx - side / 2.0,
        cx + side / 2.0
    );
    let _ = writeln!(
        out,
        r##"<line x1="{cx:.2}" y1="{TOP}" x2="{cx:.2}" y2="{:.2}" stroke="#999"/>"##,
        TOP + side
    );
    let _ = writeln!(
        out,
        r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="#c0392b" stroke-dasharray="6 4"/>"##,
        scale
    );
    let _ = writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" fill="#c0392b">|z| = 1</text>"##,
        px(0.72),
        py(0.72)
    );
    for v in [-reach, reach] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(v),
            TOP + side + 18.0,
            tick(v)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            cx - side / 2.0 - 6.0,
            py(v) + 4.0,
            tick(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">Re</text>"#,
        HEIGHT - 20.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{cy:.1}" text-anchor="middle">Im</text>"#,
        cx - side / 2.0 - 50.0
    );
    for (z, mult) in eigenvalues {
        for _ in 0..*mult {
            let _ = writeln!(
                out,
                r##"<circle class="eig" cx="{:.2}" cy="{:.2}" r="5" fill="#1f4e9c" fill-opacity="0.6"/>"##,
                px(z.re),
                py(z.im)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Renders one polyline file per series; `(file stem, svg text)` pairs.
pub fn render_plots(traces: &[Series]) -> Result<Vec<(String, String)>, CliError> {
    if traces.is_empty() {
        return Err(CliError::Usage("no traces to plot".into()));
    }
    Ok(traces.iter().map(|s| (s.name.clone(), polyline_svg(s))).collect())
}
