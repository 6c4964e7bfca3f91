//! ASCII and SVG plots of polygons. Every number shown is an exact rational;
//! pixel positions are rounded down to integers.

use std::fmt::Write;

use isopoly_core::polycalc::{fmt_point, ConcavePolygon};
use isopoly_core::rational::{from_usize, int, to_i64, Rational};

const GLYPHS: [char; 6] = ['N', 'H', '#', 'o', '+', 'x'];
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Frame {
    x_max: Rational,
    y_min: Rational,
    y_max: Rational,
}

impl Frame {
    fn new(polys: &[(&str, &ConcavePolygon)]) -> Self {
        let x_max = polys.iter().map(|(_, p)| p.domain_end().clone()).max().unwrap_or_else(|| int(1));
        let ys = polys.iter().flat_map(|(_, p)| p.breakpoints_with_ends().iter().map(|q| q.1.clone()));
        let (mut y_min, mut y_max) = (int(0), int(0));
        for y in ys {
            y_min = y_min.min(y.clone());
            y_max = y_max.max(y);
        }
        if y_max == y_min {
            y_max = &y_min + int(1);
        }
        let x_max = if x_max == int(0) { int(1) } else { x_max };
        Self { x_max, y_min, y_max }
    }

    /// `⌊t · (steps − 1)⌋` for `t = (v − lo)/(hi − lo)`.
    fn cell(v: &Rational, lo: &Rational, hi: &Rational, steps: usize) -> i64 {
        let t: Rational = (v - lo) / (hi - lo) * from_usize(steps - 1);
        to_i64(&t.floor()).unwrap_or(0)
    }
}

pub fn ascii(polys: &[(&str, &ConcavePolygon)]) -> String {
    const W: usize = 61;
    const H: usize = 21;
    let frame = Frame::new(polys);
    let mut grid = vec![vec![' '; W]; H];
    let xs: Vec<Rational> = (0..W).map(|col| &frame.x_max * from_usize(col) / from_usize(W - 1)).collect();
    for (k, (_, p)) in polys.iter().enumerate() {
        for (col, x) in xs.iter().enumerate() {
            let Ok(y) = p.eval(x) else { continue };
            let row = Frame::cell(&y, &frame.y_min, &frame.y_max, H) as usize;
            grid[H - 1 - row.min(H - 1)][col] = GLYPHS[k % GLYPHS.len()];
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "y = {}", frame.y_max);
    for row in grid {
        let _ = writeln!(out, "|{}", row.into_iter().collect::<String>().trim_end());
    }
    let _ = writeln!(out, "+{}", "-".repeat(W));
    let _ = writeln!(out, "y = {} at the axis, x from 0 to {}", frame.y_min, frame.x_max);
    for (k, (name, p)) in polys.iter().enumerate() {
        let _ = writeln!(out, "{} {name}: {p}", GLYPHS[k % GLYPHS.len()]);
    }
    out
}

pub fn svg(polys: &[(&str, &ConcavePolygon)]) -> String {
    const W: usize = 601;
    const H: usize = 401;
    const PAD: i64 = 40;
    let frame = Frame::new(polys);
    let px = |x: &Rational| PAD + Frame::cell(x, &int(0), &frame.x_max, W);
    let py = |y: &Rational| PAD + (H as i64 - 1) - Frame::cell(y, &frame.y_min, &frame.y_max, H);
    let mut out = String::new();
    let (total_w, total_h) = (W as i64 + 2 * PAD + 160, H as i64 + 2 * PAD);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{total_h}" viewBox="0 0 {total_w} {total_h}">"#
    );
    let _ = writeln!(out, r#"<rect width="{total_w}" height="{total_h}" fill="white"/>"#);
    let (x0, y0) = (px(&int(0)), py(&frame.y_min));
    let _ = writeln!(
        out,
        r#"<path d="M{x0} {} V{y0} H{}" stroke="black" fill="none"/>"#,
        py(&frame.y_max),
        px(&frame.x_max)
    );
    for (k, (name, p)) in polys.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = p.breakpoints_with_ends().iter().map(|(x, y)| format!("{},{}", px(x), py(y))).collect();
        let _ =
            writeln!(out, r#"<polyline points="{}" stroke="{color}" stroke-width="2" fill="none"/>"#, pts.join(" "));
        for q in p.breakpoints_with_ends() {
            let (cx, cy) = (px(&q.0), py(&q.1));
            let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
                cx + 4,
                cy - 4 - 12 * k as i64,
                fmt_point(q)
            );
        }
        let ly = PAD + 16 * k as i64;
        let lx = PAD + W as i64 + 12;
        let _ = writeln!(out, r#"<text x="{lx}" y="{ly}" font-size="13" fill="{color}">{name}</text>"#);
    }
    out.push_str("</svg>\n");
    out
}
