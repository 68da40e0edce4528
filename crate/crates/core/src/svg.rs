//! Static SVG pictures of domains and metric fields.

use crate::geometry::Point;
use crate::metrics::MetricField;
use std::fmt::Write;

const WIDTH_PX: f64 = 800.0;
const MARGIN_PX: f64 = 10.0;
/// Field pictures are binned to at most this many cells per side.
const FIELD_BINS: usize = 200;

/// World-to-pixel transform with the y axis pointing up.
#[derive(Debug, Clone, Copy)]
struct View {
    lo: Point,
    scale: f64,
    height: f64,
}

impl View {
    fn fit(lo: Point, hi: Point) -> Self {
        let span_x = (hi.x - lo.x).max(f64::MIN_POSITIVE);
        let scale = (WIDTH_PX - 2.0 * MARGIN_PX) / span_x;
        let height = ((hi.y - lo.y) * scale + 2.0 * MARGIN_PX).ceil().max(2.0 * MARGIN_PX);
        Self { lo, scale, height }
    }

    fn px(&self, p: Point) -> (f64, f64) {
        (
            MARGIN_PX + (p.x - self.lo.x) * self.scale,
            self.height - MARGIN_PX - (p.y - self.lo.y) * self.scale,
        )
    }

    fn header(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
            w = WIDTH_PX,
            h = self.height
        )
    }
}

fn bbox(points: &[Point]) -> (Point, Point) {
    points.iter().fold(
        (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), p| (Point::new(lo.x.min(p.x), lo.y.min(p.y)), Point::new(hi.x.max(p.x), hi.y.max(p.y))),
    )
}

/// Path data for a closed polyline, dropping vertices that land within a
/// quarter pixel of the previous emitted one.
fn path_data(view: &View, points: &[Point]) -> String {
    let mut d = String::new();
    let mut last: Option<(f64, f64)> = None;
    for p in points {
        let (x, y) = view.px(*p);
        if let Some((lx, ly)) = last {
            if (x - lx).hypot(y - ly) < 0.25 {
                continue;
            }
        }
        let cmd = if last.is_none() { 'M' } else { 'L' };
        let _ = write!(d, "{cmd}{x:.2},{y:.2}");
        last = Some((x, y));
    }
    d.push('Z');
    d
}

/// Filled outline of a closed polyline with an optional marked point.
pub fn domain_svg(points: &[Point], marker: Option<Point>) -> String {
    let (lo, hi) = bbox(points);
    let view = View::fit(lo, hi);
    let mut s = view.header();
    let _ = writeln!(
        s,
        "<path d=\"{}\" fill=\"#dce8f5\" stroke=\"#1f3b5c\" stroke-width=\"0.6\" fill-rule=\"evenodd\"/>",
        path_data(&view, points)
    );
    if let Some(m) = marker {
        let (x, y) = view.px(m);
        let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"#c0392b\"/>");
    }
    s.push_str("</svg>\n");
    s
}

/// Linear blue-to-yellow ramp on `[0, 1]`.
fn ramp(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    (lerp(48.0, 250.0), lerp(18.0, 230.0), lerp(120.0, 40.0))
}

/// Colormap of the field values, binned onto a coarse raster, with the
/// domain outline on top. Unreached nodes are left blank.
pub fn field_svg(field: &MetricField) -> String {
    let grid = field.grid();
    let outline = grid.domain().vertices();
    let (lo, hi) = bbox(outline);
    let view = View::fit(lo, hi);
    let span = (hi.x - lo.x).max(hi.y - lo.y);
    let bins = FIELD_BINS.min((span / grid.spacing()).ceil().max(1.0) as usize);
    let cell = span / bins as f64;
    let nx = ((hi.x - lo.x) / cell).ceil().max(1.0) as usize;
    let ny = ((hi.y - lo.y) / cell).ceil().max(1.0) as usize;
    let mut acc = vec![(0.0f64, 0usize); nx * ny];
    for (k, &v) in field.values().iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        let p = grid.position(k);
        let i = (((p.x - lo.x) / cell) as usize).min(nx - 1);
        let j = (((p.y - lo.y) / cell) as usize).min(ny - 1);
        let a = &mut acc[j * nx + i];
        a.0 += v;
        a.1 += 1;
    }
    let vmax = acc
        .iter()
        .filter(|a| a.1 > 0)
        .map(|a| a.0 / a.1 as f64)
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut s = view.header();
    let side = cell * view.scale;
    for j in 0..ny {
        for i in 0..nx {
            let (sum, n) = acc[j * nx + i];
            if n == 0 {
                continue;
            }
            let (r, g, b) = ramp(sum / n as f64 / vmax);
            let (x, y) = view.px(Point::new(lo.x + i as f64 * cell, lo.y + (j + 1) as f64 * cell));
            let _ = writeln!(
                s,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{side:.2}\" height=\"{side:.2}\" fill=\"rgb({r},{g},{b})\"/>"
            );
        }
    }
    let _ = writeln!(
        s,
        "<path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"0.8\"/>",
        path_data(&view, outline)
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::JordanDomain;
    use crate::metrics::{quasihyperbolic_field, MetricGrid};
    use std::sync::Arc;

    fn square() -> Vec<Point> {
        vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)]
    }

    #[test]
    fn outline_is_a_closed_path() {
        let s = domain_svg(&square(), Some(Point::new(0.5, 0.5)));
        assert!(s.starts_with("<svg"));
        assert!(s.contains("M10.00,790.00L790.00,790.00L790.00,10.00L10.00,10.00Z"));
        assert!(s.contains("<circle cx=\"400.00\" cy=\"400.00\""));
        assert!(s.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn field_picture_is_deterministic() {
        let d = Arc::new(JordanDomain::new(square(), 0.1).unwrap());
        let g = MetricGrid::build(d, 0.05).unwrap();
        let f = quasihyperbolic_field(&g, Point::new(0.5, 0.5)).unwrap();
        let a = field_svg(&f);
        assert_eq!(a, field_svg(&f));
        assert!(a.matches("<rect").count() > 100);
    }
}
