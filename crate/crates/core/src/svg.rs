//! Minimal static SVG scatter plots.

use std::fmt::Write;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointStyle {
    /// First algorithm ahead.
    AGreater,
    /// Second algorithm ahead.
    BGreater,
    Equal,
    /// A distinguished reference point, drawn last.
    Highlight,
    Plain,
}

impl PointStyle {
    fn color(self) -> &'static str {
        match self {
            PointStyle::AGreater => "blue",
            PointStyle::BGreater => "red",
            PointStyle::Equal => "gray",
            PointStyle::Highlight => "green",
            PointStyle::Plain => "black",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub style: PointStyle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scatter {
    pub svg: String,
    /// Points dropped for non-finite coordinates.
    pub skipped: usize,
}

/// Renders a standalone SVG. Output depends only on the input, so equal
/// inputs give byte-identical documents.
pub fn emit_svg_scatter(points: &[ScatterPoint], title: &str, x_label: &str, y_label: &str, diagonal: bool) -> Scatter {
    let finite: Vec<&ScatterPoint> = points.iter().filter(|p| p.x.is_finite() && p.y.is_finite()).collect();
    let skipped = points.len() - finite.len();

    let (mut x0, mut x1, mut y0, mut y1) = finite.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.x), b.max(p.x), c.min(p.y), d.max(p.y)),
    );
    if finite.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if diagonal {
        (x0, y0) = (x0.min(y0), x0.min(y0));
        (x1, y1) = (x1.max(y1), x1.max(y1));
    }
    let pad = |lo: f64, hi: f64| {
        let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
        (lo - 0.05 * span, hi + 0.05 * span)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, "<!-- points: {} skipped: {skipped} -->", finite.len());
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(
        s,
        r#"<line x1="{left:.1}" y1="{bottom:.1}" x2="{right:.1}" y2="{bottom:.1}"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{left:.1}" y1="{bottom:.1}" x2="{left:.1}" y2="{top:.1}"/>"#
    );
    let _ = writeln!(s, "</g>");
    if diagonal {
        let lo = x0.max(y0);
        let hi = x1.min(y1);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="lightgray" stroke-dasharray="4 3"/>"#,
            sx(lo),
            sy(lo),
            sx(hi),
            sy(hi)
        );
    }
    let tick = |v: f64| format!("{v:.4}");
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="10">"#);
    let _ = writeln!(
        s,
        r#"<text x="{left:.1}" y="{:.1}" text-anchor="start">{}</text>"#,
        bottom + 14.0,
        tick(x0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{right:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
        bottom + 14.0,
        tick(x1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{bottom:.1}" text-anchor="end">{}</text>"#,
        left - 4.0,
        tick(y0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{top:.1}" text-anchor="end">{}</text>"#,
        left - 4.0,
        tick(y1)
    );
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    let ordered = finite
        .iter()
        .filter(|p| p.style != PointStyle::Highlight)
        .chain(finite.iter().filter(|p| p.style == PointStyle::Highlight));
    for p in ordered {
        let r = if p.style == PointStyle::Highlight { 5.0 } else { 3.0 };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{}" fill-opacity="0.8"/>"#,
            sx(p.x),
            sy(p.y),
            p.style.color()
        );
    }
    s.push_str("</svg>\n");
    Scatter { svg: s, skipped }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
