//! SVG plots of the `b0`-`b1` plane.
//!
//! Drawn lines: the ideal line `b0 + b1 = 1`, the cutoff line
//! `b0 + b1 = 1 - sqrt(2) * d_f` (AB), the floor `b0 + b1 = 0` (CD) and the
//! axis `b1 = 0`. Items are circles colored by region, with the item id in a
//! `<title>`. The trivial-item point `(1, 0)` gets a cross marker. All
//! coordinates are written with two decimals so output is byte-stable.

use std::fmt::Write as _;

use itemfair_core::{ItemPoint, RegionLabel};

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 640.0;
pub const MARGIN: f64 = 64.0;
pub const POINT_RADIUS: f64 = 5.0;

pub fn region_color(region: RegionLabel) -> &'static str {
    match region {
        RegionLabel::Fair => "#4c72b0",
        RegionLabel::ProposedOnly => "#c44e52",
        RegionLabel::Both => "#8172b2",
        RegionLabel::TraditionalOnly => "#dd8452",
    }
}

/// `b0 + b1 = c` for the cutoff `d_f`.
pub fn cutoff_line_constant(d_f: f64) -> f64 {
    1.0 - std::f64::consts::SQRT_2 * d_f
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn around(points: &[ItemPoint]) -> Self {
        let xs = points.iter().map(|p| p.b0).chain([0.0, 1.0]);
        let ys = points.iter().map(|p| p.b1).chain([0.0, 1.0]);
        let (x0, x1) = bounds(xs);
        let (y0, y1) = bounds(ys);
        let px = ((x1 - x0) * 0.1).max(0.1);
        let py = ((y1 - y0) * 0.1).max(0.1);
        Self {
            x0: x0 - px,
            x1: x1 + px,
            y0: y0 - py,
            y1: y1 + py,
        }
    }

    fn sx(&self, b0: f64) -> f64 {
        MARGIN + (b0 - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, b1: f64) -> f64 {
        HEIGHT - MARGIN - (b1 - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }

    /// Endpoints of `b0 + b1 = c` clipped to the frame.
    fn diagonal(&self, c: f64) -> Option<((f64, f64), (f64, f64))> {
        let lo = self.x0.max(c - self.y1);
        let hi = self.x1.min(c - self.y0);
        (lo < hi).then_some(((lo, c - lo), (hi, c - hi)))
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn line(out: &mut String, f: &Frame, a: (f64, f64), b: (f64, f64), class: &str, style: &str) {
    let _ = writeln!(
        out,
        r#"  <line class="{class}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#,
        f.sx(a.0),
        f.sy(a.1),
        f.sx(b.0),
        f.sy(b.1)
    );
}

/// Renders items, colored by `regions` (same order as `points`).
pub fn render_plane(points: &[ItemPoint], regions: &[RegionLabel], d_f: f64) -> String {
    assert_eq!(points.len(), regions.len(), "one region per point");
    let f = Frame::around(points);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r##"  <rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        out,
        r##"  <rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="#888888"/>"##,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );

    if f.y0 < 0.0 && f.y1 > 0.0 {
        line(
            &mut out,
            &f,
            (f.x0, 0.0),
            (f.x1, 0.0),
            "axis-b1-zero",
            r##"stroke="#888888" stroke-dasharray="2,3""##,
        );
    }
    let diagonals = [
        (1.0, "ideal-line", r##"stroke="#2a9d3a" stroke-width="2""##),
        (
            cutoff_line_constant(d_f),
            "cutoff-line-ab",
            r##"stroke="#c44e52" stroke-dasharray="6,4""##,
        ),
        (
            0.0,
            "floor-line-cd",
            r##"stroke="#555555" stroke-dasharray="1,3""##,
        ),
    ];
    for (c, class, style) in diagonals {
        if let Some((a, b)) = f.diagonal(c) {
            line(&mut out, &f, a, b, class, style);
        }
    }

    let (tx, ty) = (f.sx(1.0), f.sy(0.0));
    let _ = writeln!(
        out,
        r##"  <path class="trivial-marker" d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="#000000"/>"##,
        tx - 6.0,
        ty - 6.0,
        tx + 6.0,
        ty + 6.0,
        tx - 6.0,
        ty + 6.0,
        tx + 6.0,
        ty - 6.0
    );

    for (p, &region) in points.iter().zip(regions) {
        let _ = writeln!(
            out,
            r#"  <circle class="item {}" cx="{:.2}" cy="{:.2}" r="{POINT_RADIUS}" fill="{}"><title>{} (b0={:.3}, b1={:.3}, d={:.3})</title></circle>"#,
            region.as_str(),
            f.sx(p.b0),
            f.sy(p.b1),
            region_color(region),
            escape(&p.item_id),
            p.b0,
            p.b1,
            p.d
        );
    }

    let _ = writeln!(
        out,
        r#"  <text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="14">b0</text>"#,
        WIDTH / 2.0,
        HEIGHT - MARGIN / 3.0
    );
    let _ = writeln!(
        out,
        r#"  <text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 {:.2} {:.2})">b1</text>"#,
        MARGIN / 3.0,
        HEIGHT / 2.0,
        MARGIN / 3.0,
        HEIGHT / 2.0
    );
    for (x, anchor) in [(f.x0, "start"), (f.x1, "end")] {
        let _ = writeln!(
            out,
            r#"  <text x="{:.2}" y="{:.2}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{x:.2}</text>"#,
            f.sx(x),
            HEIGHT - MARGIN + 16.0
        );
    }
    for y in [f.y0, f.y1] {
        let _ = writeln!(
            out,
            r#"  <text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{y:.2}</text>"#,
            MARGIN - 6.0,
            f.sy(y)
        );
    }
    out.push_str("</svg>\n");
    out
}
