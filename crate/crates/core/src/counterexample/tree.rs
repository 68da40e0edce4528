use super::svc::{build_svc, SvcSet};
use crate::error::{Error, Result};
use crate::geometry::exact::{adjacent_edges_overlap, segments_intersect, SplitPoint};
use crate::geometry::polygon::find_segment_intersection;
use crate::geometry::point::Point;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Deepest tree level that can be built.
pub const MAX_TREE_DEPTH: u32 = 10;

/// Quarter-circle radius `2^{-2(k+1)-1}` used to round the corners of level `k`.
pub fn rounding_radius(k: u32) -> f64 {
    (-(2.0 * (k as f64 + 1.0) + 1.0)).exp2()
}

/// Smooth building block of the core curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Piece {
    Line { a: Point, b: Point },
    /// Circular arc starting at angle `start`, turning by `sweep` radians
    /// (positive is counterclockwise).
    Arc {
        center: Point,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Piece {
    pub fn length(&self) -> f64 {
        match *self {
            Piece::Line { a, b } => a.dist(b),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Point at arclength `s` from the start.
    pub fn point(&self, s: f64) -> Point {
        match *self {
            Piece::Line { a, b } => {
                let l = a.dist(b);
                if l == 0.0 {
                    a
                } else {
                    a.lerp(b, s / l)
                }
            }
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + Point::from_polar(radius, start + sweep.signum() * s / radius),
        }
    }

    /// Unit tangent at arclength `s`.
    pub fn tangent(&self, s: f64) -> Point {
        match *self {
            Piece::Line { a, b } => (b - a).normalized(),
            Piece::Arc {
                radius,
                start,
                sweep,
                ..
            } => {
                let phi = start + sweep.signum() * s / radius;
                Point::new(-phi.sin(), phi.cos()) * sweep.signum()
            }
        }
    }

    /// Radius of curvature, `None` on lines.
    pub fn radius(&self) -> Option<f64> {
        match *self {
            Piece::Line { .. } => None,
            Piece::Arc { radius, .. } => Some(radius),
        }
    }
}

/// Replaces every interior corner of `pts` by an internally tangent arc of
/// radius `rho` and shortens the last segment by `trim_end`.
fn round_polyline(pts: &[Point], rho: f64, trim_end: f64) -> Result<Vec<Piece>> {
    let n = pts.len();
    let mut out = Vec::new();
    let mut pos = pts[0];
    let push_line = |out: &mut Vec<Piece>, a: Point, b: Point| {
        if a != b {
            out.push(Piece::Line { a, b });
        }
    };
    for i in 1..n - 1 {
        let u_in = (pts[i] - pts[i - 1]).normalized();
        let u_out = (pts[i + 1] - pts[i]).normalized();
        let t_in = pts[i] - u_in * rho;
        let t_out = pts[i] + u_out * rho;
        if (t_in - pos).dot(u_in) < -1e-15 || (pts[i + 1] - t_out).dot(u_out) < -1e-15 {
            return Err(Error::Construction(format!("segment {i} too short for rounding")));
        }
        push_line(&mut out, pos, t_in);
        let turn = u_in.cross(u_out).signum();
        let center = t_in + u_in.perp() * (turn * rho);
        let start = (t_in - center).y.atan2((t_in - center).x);
        let sweep = turn * u_in.dot(u_out).clamp(-1.0, 1.0).acos();
        out.push(Piece::Arc {
            center,
            radius: rho,
            start,
            sweep,
        });
        pos = t_out;
    }
    let u_last = (pts[n - 1] - pts[n - 2]).normalized();
    let end = pts[n - 1] - u_last * trim_end;
    if (end - pos).dot(u_last) < -1e-15 {
        return Err(Error::Construction("last segment too short for trimming".into()));
    }
    push_line(&mut out, pos, end);
    Ok(out)
}

/// One core curve `γ_{k,j}` from `r_{k-1,⌈j/2⌉}` to `r_{k,j}`.
#[derive(Debug, Clone, Serialize)]
pub struct CorePiece {
    pub k: u32,
    pub j: usize,
    pub start: Point,
    pub end: Point,
    pub pieces: Vec<Piece>,
    pub length: f64,
    /// Horizontal displacement of the pushed snake segments.
    pub amplitude: f64,
    /// Length of the snake before its corners are rounded.
    pub unrounded_length: f64,
}

impl CorePiece {
    /// Point, unit tangent and the radius of curvature at arclength `s`.
    pub fn locate(&self, s: f64) -> (Point, Point, Option<f64>) {
        let mut acc = 0.0;
        for p in &self.pieces {
            let l = p.length();
            if s <= acc + l {
                let u = (s - acc).max(0.0);
                return (p.point(u), p.tangent(u), p.radius());
            }
            acc += l;
        }
        let last = self.pieces.last().unwrap();
        let l = last.length();
        (last.point(l), last.tangent(l), last.radius())
    }
}

/// Tree-shaped core: a root `p0` and, per level `k`, the `2^k` unit-length
/// curves ending at the branch points `r_{k,j}`.
#[derive(Debug, Clone, Serialize)]
pub struct TreeCurve {
    pub depth: u32,
    pub p0: Point,
    pub svc: SvcSet,
    levels: Vec<Vec<CorePiece>>,
}

fn level_top(k: u32) -> f64 {
    (-(k as f64)).exp2()
}

fn midpoint(iv: [f64; 2]) -> f64 {
    0.5 * (iv[0] + iv[1])
}

pub fn build_tree_curve(depth: u32) -> Result<TreeCurve> {
    if depth == 0 || depth > MAX_TREE_DEPTH {
        return Err(Error::invalid(format!(
            "tree depth must lie in 1..={MAX_TREE_DEPTH}, got {depth}"
        )));
    }
    let svc = build_svc(depth)?;
    let p0 = Point::new(0.5 * (midpoint(svc.interval(1, 1)) + midpoint(svc.interval(1, 2))), 0.5);
    let mut levels: Vec<Vec<CorePiece>> = Vec::new();
    for k in 1..=depth {
        let mut level = Vec::with_capacity(1 << k);
        for j in 1..=1usize << k {
            let piece = build_core_piece(&svc, p0, &levels, k, j)?;
            level.push(piece);
        }
        levels.push(level);
    }
    let tree = TreeCurve {
        depth,
        p0,
        svc,
        levels,
    };
    tree.check_simple()?;
    Ok(tree)
}

fn snake_corners(c: f64, k: u32, amplitude: f64) -> Vec<Point> {
    let top = level_top(k);
    let n = 1usize << (k + 1);
    let s = 0.5 * top / n as f64;
    let x = |i: usize| -> f64 {
        if i == 0 || i == n - 1 {
            c
        } else if i % 2 == 1 {
            c - amplitude
        } else {
            c + amplitude
        }
    };
    let mut pts = vec![Point::new(c, top)];
    for i in 0..n - 1 {
        let y = top - (i + 1) as f64 * s;
        pts.push(Point::new(x(i), y));
        pts.push(Point::new(x(i + 1), y));
    }
    pts.push(Point::new(c, 0.5 * top));
    pts
}

fn build_core_piece(svc: &SvcSet, p0: Point, levels: &[Vec<CorePiece>], k: u32, j: usize) -> Result<CorePiece> {
    let iv = svc.interval(k, j);
    let c = midpoint(iv);
    let rho = rounding_radius(k);
    let top = level_top(k);
    let (start, mut pieces, line_start) = if k == 1 {
        (p0, Vec::new(), p0)
    } else {
        let parent = &levels[k as usize - 2][(j + 1) / 2 - 1];
        let r = parent.end;
        let rp = rounding_radius(k - 1);
        let sigma = if j % 2 == 1 { -1.0 } else { 1.0 };
        let center = Point::new(r.x + sigma * rp, r.y);
        let arc = Piece::Arc {
            center,
            radius: rp,
            start: if sigma < 0.0 { 0.0 } else { std::f64::consts::PI },
            sweep: sigma * FRAC_PI_2,
        };
        (r, vec![arc], Point::new(center.x, top))
    };
    let m = ((1usize << (k + 1)) - 2) as f64;
    let build = |a: f64| -> Result<(Vec<Piece>, f64)> {
        let mut w = vec![line_start];
        w.extend(snake_corners(c, k, a));
        let unrounded = w.windows(2).map(|s| s[0].dist(s[1])).sum::<f64>();
        Ok((round_polyline(&w, rho, rho)?, unrounded))
    };
    let entry: f64 = pieces.iter().map(|p: &Piece| p.length()).sum();
    let guess = (-(k as f64) - 2.0).exp2();
    let (trial, _) = build(guess)?;
    let len0 = entry + trial.iter().map(|p| p.length()).sum::<f64>();
    let amplitude = guess + (1.0 - len0) / (2.0 * m);
    if amplitude < 2.0 * rho {
        return Err(Error::Construction(format!(
            "snake ({k},{j}) amplitude {amplitude} below twice the rounding radius"
        )));
    }
    // The normalized amplitude approaches the interval edge to about 0.07 rho.
    let margin = rho / 32.0;
    if c - amplitude - rho < iv[0] + margin || c + amplitude + rho > iv[1] - margin {
        return Err(Error::Construction(format!(
            "snake ({k},{j}) with amplitude {amplitude} leaves its interval"
        )));
    }
    let (rest, unrounded) = build(amplitude)?;
    pieces.extend(rest);
    let length: f64 = pieces.iter().map(|p| p.length()).sum();
    if (length - 1.0).abs() > 1e-12 {
        return Err(Error::Construction(format!(
            "core ({k},{j}) has length {length} after normalization"
        )));
    }
    Ok(CorePiece {
        k,
        j,
        start,
        end: Point::new(c, 0.5 * top + rho),
        pieces,
        length,
        amplitude,
        unrounded_length: unrounded,
    })
}

impl TreeCurve {
    /// `γ_{k,j}`.
    pub fn core(&self, k: u32, j: usize) -> &CorePiece {
        &self.levels[k as usize - 1][j - 1]
    }

    pub fn level(&self, k: u32) -> &[CorePiece] {
        &self.levels[k as usize - 1]
    }

    /// `r_{k,j}`; level 0 is the root.
    pub fn branch_point(&self, k: u32, j: usize) -> Point {
        if k == 0 {
            self.p0
        } else {
            self.core(k, j).end
        }
    }

    /// `p_{k,j}`, the top center of the level rectangle.
    pub fn p(&self, k: u32, j: usize) -> Point {
        Point::new(midpoint(self.svc.interval(k, j)), level_top(k))
    }

    /// `q_{k,j}`, the bottom center of the level rectangle.
    pub fn q(&self, k: u32, j: usize) -> Point {
        Point::new(midpoint(self.svc.interval(k, j)), 0.5 * level_top(k))
    }

    /// Polyline through the core pieces with `per_quarter` chords per
    /// quarter arc; starts and ends exactly at the branch points.
    pub fn polyline(&self, k: u32, j: usize, per_quarter: usize) -> Vec<Point> {
        let core = self.core(k, j);
        let mut pts = vec![core.start];
        for p in &core.pieces {
            let chords = match p {
                Piece::Line { .. } => 1,
                Piece::Arc { sweep, .. } => ((sweep.abs() / FRAC_PI_2) * per_quarter as f64).ceil().max(1.0) as usize,
            };
            let l = p.length();
            for i in 1..=chords {
                pts.push(p.point(l * i as f64 / chords as f64));
            }
        }
        *pts.last_mut().unwrap() = core.end;
        pts
    }

    /// Pairwise segment test over the whole tree; curves may meet only at
    /// shared branch points.
    pub fn check_simple(&self) -> Result<()> {
        let mut segs = Vec::new();
        let mut owner = Vec::new();
        for k in 1..=self.depth {
            for j in 1..=1usize << k {
                let pts = self.polyline(k, j, 4);
                for w in pts.windows(2) {
                    if w[0] != w[1] {
                        segs.push((SplitPoint::exact(w[0]), SplitPoint::exact(w[1])));
                        owner.push((k, j));
                    }
                }
            }
        }
        let hit = find_segment_intersection(&segs, |a, b| {
            let (s, t) = (segs[a], segs[b]);
            for (p, u) in [(s.0, s.1), (s.1, s.0)] {
                for (q, v) in [(t.0, t.1), (t.1, t.0)] {
                    if p.same_value(q) {
                        return adjacent_edges_overlap(u, p, v);
                    }
                }
            }
            segments_intersect(s.0, s.1, t.0, t.1)
        });
        match hit {
            None => Ok(()),
            Some((a, b)) => {
                let p = segs[a].0.rounded();
                Err(Error::Construction(format!(
                    "core curves {:?} and {:?} intersect near ({}, {})",
                    owner[a], owner[b], p.x, p.y
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitudes_match_reference_values() {
        let t = build_tree_curve(3).unwrap();
        assert!((t.core(1, 1).amplitude - 0.1407).abs() < 5e-4, "{}", t.core(1, 1).amplitude);
        assert!((t.core(2, 1).amplitude - 0.0672).abs() < 5e-4, "{}", t.core(2, 1).amplitude);
    }

    #[test]
    fn unit_lengths_and_counts() {
        let t = build_tree_curve(5).unwrap();
        for k in 1..=5 {
            assert_eq!(t.level(k).len(), 1 << k);
            for c in t.level(k) {
                assert!((c.length - 1.0).abs() < 1e-12);
                assert!((1.0..=2.0).contains(&c.unrounded_length), "{}", c.unrounded_length);
                let q = t.q(k, c.j);
                assert!(c.end.dist(q) <= rounding_radius(k) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn pieces_are_continuous_and_reach_branch_points() {
        let t = build_tree_curve(4).unwrap();
        for k in 1..=4 {
            for c in t.level(k) {
                let mut prev = c.start;
                for p in &c.pieces {
                    assert!(p.point(0.0).dist(prev) < 1e-14);
                    prev = p.point(p.length());
                }
                assert!(prev.dist(c.end) < 1e-14);
                assert_eq!(c.start, t.branch_point(k - 1, (c.j + 1) / 2));
                let (_, tan, _) = c.locate(c.length);
                assert!((tan - Point::new(0.0, -1.0)).norm() < 1e-15 / rounding_radius(k));
            }
        }
    }

    #[test]
    fn depth_guards() {
        assert!(build_tree_curve(0).is_err());
        assert!(build_tree_curve(11).is_err());
    }
}
