use super::bvh::EdgeTree;
use super::exact::{self, SplitPoint};
use super::point::{segment_distance, signed_area, Point};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Absolute tolerance used by geometric predicates unless stated otherwise.
pub const DEFAULT_EPS: f64 = 1e-9;

/// A bounded domain whose boundary is a simple counterclockwise polygon.
///
/// Vertices are normally plain doubles. Domains with features narrower than
/// the double spacing (the counterexample fingers) additionally carry the
/// exact `hi + lo` representation of every vertex; simplicity is then
/// validated against the exact values while the float queries use the
/// rounded vertices.
#[derive(Debug, Clone)]
pub struct JordanDomain {
    vertices: Vec<Point>,
    exact: Option<Vec<SplitPoint>>,
    resolution_hint: f64,
    cumulative: Vec<f64>,
    index: EdgeIndex,
    tree: EdgeTree,
}

impl JordanDomain {
    /// Builds and validates a domain from counterclockwise vertices.
    pub fn new(vertices: Vec<Point>, resolution_hint: f64) -> Result<Self> {
        Self::build(vertices, None, resolution_hint)
    }

    /// Builds a domain from exact split vertices.
    pub fn from_split(points: Vec<SplitPoint>, resolution_hint: f64) -> Result<Self> {
        let vertices = points.iter().map(|p| p.rounded()).collect();
        Self::build(vertices, Some(points), resolution_hint)
    }

    fn build(
        vertices: Vec<Point>,
        exact: Option<Vec<SplitPoint>>,
        resolution_hint: f64,
    ) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidDomain(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if !(resolution_hint > 0.0 && resolution_hint.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "resolution hint must be positive, got {resolution_hint}"
            )));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidDomain(format!("vertex {i} is not finite")));
        }
        let split: Vec<SplitPoint> = match &exact {
            Some(e) => e.clone(),
            None => vertices.iter().map(|&p| SplitPoint::exact(p)).collect(),
        };
        let n = split.len();
        for i in 0..n {
            if split[i].same_value(split[(i + 1) % n]) {
                return Err(Error::InvalidDomain(format!(
                    "vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        if let Some((a, b)) = find_self_intersection(&split) {
            return Err(Error::SelfIntersection {
                first: a,
                second: b,
            });
        }
        let area = signed_area(&vertices);
        if area <= 0.0 {
            return Err(Error::InvalidDomain(format!(
                "boundary must be counterclockwise (signed area {area:e})"
            )));
        }
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        for i in 0..n {
            let l = cumulative[i] + vertices[i].dist(vertices[(i + 1) % n]);
            cumulative.push(l);
        }
        let index = EdgeIndex::new(&vertices);
        let tree = EdgeTree::new(&vertices);
        Ok(Self {
            vertices,
            exact,
            resolution_hint,
            cumulative,
            index,
            tree,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn split_vertices(&self) -> Option<&[SplitPoint]> {
        self.exact.as_deref()
    }

    pub fn resolution_hint(&self) -> f64 {
        self.resolution_hint
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, i: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bbox(&self) -> (Point, Point) {
        (self.index.min, self.index.max)
    }

    /// Length scale of the domain: the diagonal of its bounding box.
    pub fn scale(&self) -> f64 {
        self.index.max.dist(self.index.min)
    }

    /// Strictly inside, with points within `DEFAULT_EPS` of the boundary
    /// counted as outside.
    pub fn contains(&self, p: Point) -> bool {
        self.contains_with_tol(p, DEFAULT_EPS)
    }

    pub fn contains_with_tol(&self, p: Point, eps: f64) -> bool {
        if !self.index.crossing_parity(&self.vertices, p) {
            return false;
        }
        self.dist_to_boundary(p) > eps
    }

    /// Euclidean distance from `p` to the boundary polyline.
    pub fn dist_to_boundary(&self, p: Point) -> f64 {
        self.tree.nearest(&self.vertices, p, None).1
    }

    /// Nearest boundary edge and the distance to it.
    pub fn nearest_edge(&self, p: Point) -> (usize, f64) {
        self.tree.nearest(&self.vertices, p, None)
    }

    /// `nearest_edge` seeded with the nearest edge of a nearby point.
    pub fn nearest_edge_from(&self, p: Point, seed: usize) -> (usize, f64) {
        self.tree.nearest(&self.vertices, p, Some(seed % self.len()))
    }

    /// Even-odd inside test without the boundary tolerance.
    pub fn parity(&self, p: Point) -> bool {
        self.index.crossing_parity(&self.vertices, p)
    }

    /// Boundary point at arclength `s` (taken modulo the perimeter) measured
    /// counterclockwise from vertex 0.
    pub fn point_at_arclength(&self, s: f64) -> Point {
        let total = self.perimeter();
        let mut s = s.rem_euclid(total);
        if s >= total {
            s = 0.0;
        }
        let i = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).unwrap())
        {
            Ok(i) => i.min(self.vertices.len() - 1),
            Err(i) => i - 1,
        };
        let (a, b) = self.edge(i);
        let len = self.cumulative[i + 1] - self.cumulative[i];
        if len == 0.0 {
            return a;
        }
        a.lerp(b, (s - self.cumulative[i]) / len)
    }

    /// Arclength coordinate of the boundary point nearest to `p`.
    pub fn arclength_of(&self, p: Point) -> f64 {
        let (i, _) = self.nearest_edge(p);
        let (a, b) = self.edge(i);
        let ab = b - a;
        let t = ((p - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
        self.cumulative[i] + t * (self.cumulative[i + 1] - self.cumulative[i])
    }

    /// Arclength coordinate of vertex `i`.
    pub fn vertex_arclength(&self, i: usize) -> f64 {
        self.cumulative[i]
    }

    /// Returns a copy scaled by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let v = self.vertices.iter().map(|&p| p * factor).collect();
        Self::new(v, self.resolution_hint * factor)
    }

    /// Uniform resampling of the boundary with at least `n` points; every
    /// original vertex is kept.
    pub fn resample(&self, n: usize) -> Vec<Point> {
        let total = self.perimeter();
        let step = total / n as f64;
        let mut out = Vec::with_capacity(n + self.len());
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            let len = a.dist(b);
            let pieces = ((len / step).round() as usize).max(1);
            for k in 0..pieces {
                out.push(a.lerp(b, k as f64 / pieces as f64));
            }
        }
        out
    }

    pub fn to_file(&self) -> DomainFile {
        let offsets = self.exact.as_ref().map(|e| {
            e.iter()
                .map(|p| [p.lo.x, p.lo.y])
                .collect::<Vec<_>>()
        });
        let vertices = match &self.exact {
            Some(e) => e.iter().map(|p| [p.hi.x, p.hi.y]).collect(),
            None => self.vertices.iter().map(|p| [p.x, p.y]).collect(),
        };
        DomainFile {
            vertices,
            resolution_hint: self.resolution_hint,
            offsets,
        }
    }

    pub fn from_file(file: &DomainFile) -> Result<Self> {
        let hi: Vec<Point> = file.vertices.iter().map(|v| Point::new(v[0], v[1])).collect();
        match &file.offsets {
            None => Self::new(hi, file.resolution_hint),
            Some(off) => {
                if off.len() != hi.len() {
                    return Err(Error::InvalidDomain(format!(
                        "{} offsets for {} vertices",
                        off.len(),
                        hi.len()
                    )));
                }
                let pts = hi
                    .iter()
                    .zip(off)
                    .map(|(&h, o)| SplitPoint::new(h, Point::new(o[0], o[1])))
                    .collect();
                Self::from_split(pts, file.resolution_hint)
            }
        }
    }
}

/// On-disk domain description. `offsets`, when present, holds an exact
/// low-order displacement for every vertex.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainFile {
    pub vertices: Vec<[f64; 2]>,
    pub resolution_hint: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<[f64; 2]>>,
}

/// Finds a pair of edges of the closed polyline that intersect illegally.
/// Edge `i` joins vertex `i` to vertex `i + 1`.
pub fn find_self_intersection(pts: &[SplitPoint]) -> Option<(usize, usize)> {
    let n = pts.len();
    let segs: Vec<(SplitPoint, SplitPoint)> = (0..n).map(|i| (pts[i], pts[(i + 1) % n])).collect();
    find_segment_intersection(&segs, |i, j| {
        let d = i.abs_diff(j);
        if d == 1 || d == n - 1 {
            let (a, b, c) = if (i + 1) % n == j {
                (segs[i].0, segs[i].1, segs[j].1)
            } else {
                (segs[j].0, segs[j].1, segs[i].1)
            };
            exact::adjacent_edges_overlap(a, b, c)
        } else {
            exact::segments_intersect(segs[i].0, segs[i].1, segs[j].0, segs[j].1)
        }
    })
}

/// Sweep over x of segment bounding boxes; `conflict(i, j)` (i < j) decides
/// candidate pairs exactly. Returns the first conflicting pair.
pub fn find_segment_intersection<F>(segs: &[(SplitPoint, SplitPoint)], conflict: F) -> Option<(usize, usize)>
where
    F: Fn(usize, usize) -> bool,
{
    let boxes: Vec<(Point, Point)> = segs.iter().map(|&(a, b)| padded_box(a, b)).collect();
    let mut order: Vec<usize> = (0..segs.len()).collect();
    order.sort_by(|&a, &b| boxes[a].0.x.partial_cmp(&boxes[b].0.x).unwrap());
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let (lo, hi) = boxes[i];
        active.retain(|&k| boxes[k].1.x >= lo.x);
        for &k in &active {
            let (klo, khi) = boxes[k];
            if khi.y < lo.y || klo.y > hi.y {
                continue;
            }
            let (a, b) = if i < k { (i, k) } else { (k, i) };
            if conflict(a, b) {
                return Some((a, b));
            }
        }
        active.push(i);
    }
    None
}

fn padded_box(a: SplitPoint, b: SplitPoint) -> (Point, Point) {
    let (ra, rb) = (a.rounded(), b.rounded());
    let m = ra.x.abs().max(ra.y.abs()).max(rb.x.abs()).max(rb.y.abs());
    let pad = 4.0 * f64::EPSILON * m + 1e-300;
    (
        Point::new(ra.x.min(rb.x) - pad, ra.y.min(rb.y) - pad),
        Point::new(ra.x.max(rb.x) + pad, ra.y.max(rb.y) + pad),
    )
}

/// Uniform bucket grid over the boundary edges.
#[derive(Debug, Clone)]
struct EdgeIndex {
    min: Point,
    max: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl EdgeIndex {
    fn new(v: &[Point]) -> Self {
        let n = v.len();
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in v {
            min = Point::new(min.x.min(p.x), min.y.min(p.y));
            max = Point::new(max.x.max(p.x), max.y.max(p.y));
        }
        let w = (max.x - min.x).max(1e-300);
        let h = (max.y - min.y).max(1e-300);
        let target = (n as f64).clamp(16.0, 1.0e6);
        let mut cell = (w * h / target).sqrt();
        cell = cell.max(w.max(h) / 2048.0);
        let nx = ((w / cell).ceil() as usize).max(1);
        let ny = ((h / cell).ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        let idx = |c: f64, lo: f64, cnt: usize| (((c - lo) / cell).floor().max(0.0) as usize).min(cnt - 1);
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let (x0, x1) = (idx(a.x.min(b.x), min.x, nx), idx(a.x.max(b.x), min.x, nx));
            let (y0, y1) = (idx(a.y.min(b.y), min.y, ny), idx(a.y.max(b.y), min.y, ny));
            if (x1 - x0 + 1) * (y1 - y0 + 1) <= 4 {
                for gy in y0..=y1 {
                    for gx in x0..=x1 {
                        buckets[gy * nx + gx].push(i as u32);
                    }
                }
                continue;
            }
            // Long edge: only register the cells it actually passes near.
            let half_diag = cell * std::f64::consts::SQRT_2 * 0.5 + 1e-12 * cell;
            for gy in y0..=y1 {
                for gx in x0..=x1 {
                    let c = Point::new(
                        min.x + (gx as f64 + 0.5) * cell,
                        min.y + (gy as f64 + 0.5) * cell,
                    );
                    if segment_distance(c, a, b) <= half_diag {
                        buckets[gy * nx + gx].push(i as u32);
                    }
                }
            }
        }
        Self {
            min,
            max,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    fn cell_of(&self, p: Point) -> (i64, i64) {
        (
            ((p.x - self.min.x) / self.cell).floor() as i64,
            ((p.y - self.min.y) / self.cell).floor() as i64,
        )
    }

    /// Even-odd parity of crossings of the rightward horizontal ray from `p`.
    fn crossing_parity(&self, v: &[Point], p: Point) -> bool {
        if p.x < self.min.x || p.x > self.max.x || p.y < self.min.y || p.y > self.max.y {
            return false;
        }
        let n = v.len();
        let (cx, cy) = self.cell_of(p);
        let gy = cy.clamp(0, self.ny as i64 - 1) as usize;
        let mut inside = false;
        let last = self.nx - 1;
        for gx in (cx.max(0) as usize)..self.nx {
            // A crossing is counted only in the column holding its abscissa,
            // so edges registered in several columns count once.
            let x0 = self.min.x + gx as f64 * self.cell;
            let x1 = x0 + self.cell;
            for &e in &self.buckets[gy * self.nx + gx] {
                let (a, b) = (v[e as usize], v[(e as usize + 1) % n]);
                if (a.y > p.y) != (b.y > p.y) {
                    let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                    let col = (gx == 0 || x >= x0) && (gx == last || x < x1);
                    if col && p.x < x {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn unit_square() -> JordanDomain {
        JordanDomain::new(
            vec![
                Point::new(0., 0.),
                Point::new(1., 0.),
                Point::new(1., 1.),
                Point::new(0., 1.),
            ],
            0.1,
        )
        .unwrap()
    }

    #[test]
    fn square_containment() {
        let sq = unit_square();
        assert!(sq.contains(Point::new(0.5, 0.5)));
        assert!(!sq.contains(Point::new(2.0, 2.0)));
        assert!(!sq.contains(Point::new(1.0, 0.5)));
        assert!(!sq.contains(Point::new(0.0, 0.0)));
    }

    #[test]
    fn square_distances() {
        let sq = unit_square();
        assert_eq!(sq.dist_to_boundary(Point::new(0.5, 0.5)), 0.5);
        assert_eq!(sq.dist_to_boundary(Point::new(0.25, 0.5)), 0.25);
        assert!((sq.dist_to_boundary(Point::new(2.0, 2.0)) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hexagon_apothem() {
        let hex: Vec<Point> = (0..6)
            .map(|k| Point::from_polar(1.0, k as f64 * std::f64::consts::PI / 3.0))
            .collect();
        let d = JordanDomain::new(hex.clone(), 0.1).unwrap();
        // Oracle: brute-force minimum over densely sampled edge points.
        let mut brute = f64::INFINITY;
        for k in 0..6 {
            let (a, b) = (hex[k], hex[(k + 1) % 6]);
            for s in 0..=2000 {
                brute = brute.min(a.lerp(b, s as f64 / 2000.0).norm());
            }
        }
        let got = d.dist_to_boundary(Point::ORIGIN);
        assert!((got - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((got - brute).abs() < 1e-9);
    }

    #[test]
    fn rejects_clockwise_and_bowtie() {
        let cw = vec![
            Point::new(0., 0.),
            Point::new(0., 1.),
            Point::new(1., 1.),
            Point::new(1., 0.),
        ];
        assert!(matches!(
            JordanDomain::new(cw, 0.1),
            Err(Error::InvalidDomain(_))
        ));
        let bowtie = vec![
            Point::new(0., 0.),
            Point::new(4., 0.),
            Point::new(4., 2.),
            Point::new(1., 2.),
            Point::new(3., -1.),
        ];
        match JordanDomain::new(bowtie, 0.1) {
            Err(Error::SelfIntersection { first, second }) => assert_eq!((first, second), (0, 3)),
            other => panic!("expected self-intersection, got {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicate_and_tiny() {
        let dup = vec![Point::new(0., 0.), Point::new(0., 0.), Point::new(1., 1.)];
        assert!(JordanDomain::new(dup, 0.1).is_err());
        assert!(JordanDomain::new(vec![Point::new(0., 0.), Point::new(1., 0.)], 0.1).is_err());
    }

    #[test]
    fn arclength_roundtrip() {
        let sq = unit_square();
        assert_eq!(sq.perimeter(), 4.0);
        let p = sq.point_at_arclength(1.5);
        assert!((p.x - 1.0).abs() < 1e-15 && (p.y - 0.5).abs() < 1e-15);
        assert!((sq.arclength_of(p) - 1.5).abs() < 1e-12);
        let q = sq.point_at_arclength(-0.5);
        assert!((q.y - 0.5).abs() < 1e-15 && q.x.abs() < 1e-15);
    }

    #[test]
    fn index_matches_brute_force() {
        let n = 300;
        let pts: Vec<Point> = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Point::from_polar(1.0 + 0.3 * (5.0 * t).sin(), t)
            })
            .collect();
        let d = JordanDomain::new(pts.clone(), 0.05).unwrap();
        for i in 0..200 {
            let p = Point::new(-1.4 + 0.014 * i as f64, 0.37 - 0.003 * i as f64);
            let brute = (0..n)
                .map(|e| segment_distance(p, pts[e], pts[(e + 1) % n]))
                .fold(f64::INFINITY, f64::min);
            assert!((d.dist_to_boundary(p) - brute).abs() < 1e-14);
            assert_eq!(
                d.index.crossing_parity(d.vertices(), p),
                super::super::point::point_in_polyline(p, &pts)
            );
        }
    }
}
