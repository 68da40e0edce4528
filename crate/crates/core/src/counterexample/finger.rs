use super::tree::{Piece, TreeCurve};
use crate::error::{Error, Result};
use crate::geometry::exact::SplitPoint;
use crate::geometry::point::{segment_distance, Point};
use crate::geometry::JordanDomain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Finger half-width `e^{-M} exp(-e^t)`.
pub fn width(t: f64, m: f64) -> f64 {
    (-m - t.exp()).exp()
}

/// Upper bound `2^{-(2k+6)}` for the half-width along level `k`.
pub fn injectivity_bound(k: u32) -> f64 {
    (-(2.0 * k as f64 + 6.0)).exp2()
}

/// Smallest integer `M` keeping the half-width under the injectivity bound
/// on every level up to `depth + 1`.
pub fn choose_m(depth: u32) -> u32 {
    (1..)
        .find(|&m| (1..=depth + 1).all(|k| width(k as f64 - 1.0, m as f64) <= injectivity_bound(k)))
        .unwrap()
}

/// Ratio bound between consecutive sample widths.
const WIDTH_STEP: f64 = std::f64::consts::LN_2;
/// Chords per quarter turn on arcs.
const CHORDS_PER_QUARTER: f64 = 4.0;

/// Core position and right-hand unit normal at core time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoreSample {
    pub t: f64,
    pub point: Point,
    pub normal: Point,
}

fn right_normal(tangent: Point) -> Point {
    Point::new(tangent.y, -tangent.x)
}

/// Samples of `γ_{k,j}` over `t ∈ [k-1, k]`, fine enough that the width
/// changes by at most a factor two between neighbors. The end samples sit
/// exactly on the branch points with their exact normals.
pub fn core_samples(tree: &TreeCurve, k: u32, j: usize) -> Vec<CoreSample> {
    let core = tree.core(k, j);
    let t0 = k as f64 - 1.0;
    let scale = 1.0 / core.length;
    let mut out = Vec::new();
    let mut s0 = 0.0;
    for p in &core.pieces {
        let l = p.length();
        let t_end = t0 + (s0 + l) * scale;
        let by_width = (l * scale * t_end.exp() / WIDTH_STEP).ceil();
        let by_angle = match p {
            Piece::Line { .. } => 1.0,
            Piece::Arc { sweep, .. } => (sweep.abs() / FRAC_PI_2 * CHORDS_PER_QUARTER).ceil(),
        };
        let n = by_width.max(by_angle).max(1.0) as usize;
        for i in 0..n {
            let s = l * i as f64 / n as f64;
            out.push(CoreSample {
                t: t0 + (s0 + s) * scale,
                point: p.point(s),
                normal: right_normal(p.tangent(s)),
            });
        }
        s0 += l;
    }
    let down = right_normal(Point::new(0.0, -1.0));
    out[0].t = t0;
    out[0].point = core.start;
    out[0].normal = if k == 1 {
        right_normal(Point::new(if j == 1 { -1.0 } else { 1.0 }, 0.0))
    } else {
        down
    };
    out.push(CoreSample {
        t: k as f64,
        point: core.end,
        normal: down,
    });
    out
}

/// One branch of the tree fattened to half-width `g(t)` and truncated at
/// core time `depth`.
#[derive(Debug, Clone, Serialize)]
pub struct Finger {
    /// `j_1, ..., j_depth` with `j_k = ⌈j_{k+1}/2⌉`.
    pub branch: Vec<usize>,
    pub m: f64,
    pub depth: u32,
    pub samples: Vec<CoreSample>,
}

impl Finger {
    pub fn half_width(&self, i: usize) -> f64 {
        width(self.samples[i].t, self.m)
    }

    /// Right-hand offset `x_1` at sample `i`.
    pub fn x1(&self, i: usize) -> SplitPoint {
        let s = &self.samples[i];
        SplitPoint::new(s.point, s.normal * width(s.t, self.m))
    }

    /// Left-hand offset `x_2` at sample `i`.
    pub fn x2(&self, i: usize) -> SplitPoint {
        let s = &self.samples[i];
        SplitPoint::new(s.point, s.normal * -width(s.t, self.m))
    }

    /// Counterclockwise outline: `x_1` forward, the tip segment, `x_2` back
    /// and the root segment.
    pub fn outline(&self) -> Vec<SplitPoint> {
        let n = self.samples.len();
        (0..n).map(|i| self.x1(i)).chain((0..n).rev().map(|i| self.x2(i))).collect()
    }

    /// Validates the outline as a Jordan polygon.
    pub fn to_domain(&self) -> Result<JordanDomain> {
        JordanDomain::from_split(self.outline(), width(self.depth as f64, self.m).max(1e-300))
    }

    /// Index of the last sample with `samples[i].t <= t`.
    fn locate(&self, t: f64) -> usize {
        let i = self.samples.partition_point(|s| s.t <= t);
        i.clamp(1, self.samples.len() - 1) - 1
    }
}

pub fn offset_finger(tree: &TreeCurve, branch: &[usize], m: f64) -> Result<Finger> {
    let depth = branch.len() as u32;
    if depth == 0 || depth > tree.depth {
        return Err(Error::invalid(format!(
            "branch length {depth} outside 1..={}",
            tree.depth
        )));
    }
    for (k, &j) in branch.iter().enumerate() {
        if j == 0 || j > 1 << (k + 1) {
            return Err(Error::invalid(format!("branch index {j} invalid at level {}", k + 1)));
        }
        if k > 0 && branch[k - 1] != j.div_ceil(2) {
            return Err(Error::invalid(format!(
                "branch index {j} at level {} is not a child of {}",
                k + 1,
                branch[k - 1]
            )));
        }
    }
    let mut samples: Vec<CoreSample> = Vec::new();
    for (k, &j) in branch.iter().enumerate() {
        let mut level = core_samples(tree, k as u32 + 1, j);
        if !samples.is_empty() {
            level.remove(0);
        }
        samples.extend(level);
    }
    Ok(Finger {
        branch: branch.to_vec(),
        m,
        depth,
        samples,
    })
}

/// Leftmost branch `1, 1, ..., 1` of the given depth.
pub fn leftmost_branch(depth: u32) -> Vec<usize> {
    vec![1; depth as usize]
}

/// Outcome of the two-sided comparison between the distance to the finger
/// outline and the distance to the nearer offset point.
#[derive(Debug, Clone, Serialize)]
pub struct OffsetDistanceReport {
    pub samples: usize,
    pub c_star: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Largest ratio of polygon half-width to `g(t)` between samples.
    pub max_bulge: f64,
    pub within_band: bool,
}

/// Draws `count` points `x = (t, r)` in the finger and compares the exact
/// distance to the outline with `min(|x - x_1(t)|, |x - x_2(t)|)`.
///
/// Core times are restricted to `[g(0), t_max]`: closer to the root the
/// closing segment dominates the distance, and beyond `t_max` the width is
/// not resolved by doubles around the core. The tip is kept a quarter
/// unit away so the samples see the untruncated finger.
pub fn verify_offset_distance(finger: &Finger, count: usize, c_star: f64, t_max: f64, seed: u64) -> OffsetDistanceReport {
    let t_min = width(0.0, finger.m);
    let t_max = t_max.min(finger.depth as f64 - 0.25);
    let n = finger.samples.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lo, mut hi, mut bulge) = (f64::INFINITY, 0.0f64, 0.0f64);
    for _ in 0..count {
        let t = rng.gen_range(t_min..t_max);
        let i = finger.locate(t);
        let (a, b) = (&finger.samples[i], &finger.samples[i + 1]);
        let lam = (t - a.t) / (b.t - a.t);
        let origin = a.point.lerp(b.point, lam);
        let local = |p: SplitPoint| (p.hi - origin) + p.lo;
        let interp = |side: fn(&Finger, usize) -> SplitPoint| {
            let (p, q) = (local(side(finger, i)), local(side(finger, i + 1)));
            p.lerp(q, lam)
        };
        let (p1, p2) = (interp(Finger::x1), interp(Finger::x2));
        bulge = bulge.max(0.5 * p1.dist(p2) / width(t, finger.m));
        let x = p1.lerp(p2, rng.gen_range(0.0..1.0));
        let predicted = x.dist(p1).min(x.dist(p2));
        if predicted <= 0.0 {
            continue;
        }
        let mut measured = f64::INFINITY;
        for e in i.saturating_sub(2)..(i + 3).min(n - 1) {
            for side in [Finger::x1 as fn(&Finger, usize) -> SplitPoint, Finger::x2] {
                let (p, q) = (local(side(finger, e)), local(side(finger, e + 1)));
                measured = measured.min(segment_distance(x, p, q));
            }
        }
        if i <= 2 {
            measured = measured.min(segment_distance(x, local(finger.x1(0)), local(finger.x2(0))));
        }
        let ratio = measured / predicted;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    OffsetDistanceReport {
        samples: count,
        c_star,
        t_min,
        t_max,
        min_ratio: lo,
        max_ratio: hi,
        max_bulge: bulge,
        within_band: lo >= 1.0 / c_star && hi <= c_star,
    }
}

#[cfg(test)]
mod tests {
    use super::super::tree::build_tree_curve;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn m_satisfies_the_bound() {
        let m = choose_m(8);
        assert_eq!(m, 5);
        for k in 1..=9 {
            assert!(width(k as f64 - 1.0, m as f64) <= injectivity_bound(k));
        }
        assert!(width(0.0, 4.0) > injectivity_bound(1));
    }

    #[test]
    fn single_finger_is_a_jordan_polygon() {
        let tree = build_tree_curve(4).unwrap();
        let f = offset_finger(&tree, &[2, 3, 6, 11], 5.0).unwrap();
        let d = f.to_domain().unwrap();
        assert!(d.area() > 0.0);
        let last = f.samples.last().unwrap();
        assert_eq!(last.point, tree.branch_point(4, 11));
        assert_eq!(last.t, 4.0);
    }

    #[test]
    fn invalid_branches_are_rejected() {
        let tree = build_tree_curve(3).unwrap();
        assert!(offset_finger(&tree, &[1, 3], 5.0).is_err());
        assert!(offset_finger(&tree, &[3], 5.0).is_err());
        assert!(offset_finger(&tree, &[], 5.0).is_err());
        assert!(offset_finger(&tree, &[1, 1, 1, 1], 5.0).is_err());
    }

    #[test]
    fn branches_share_their_common_prefix() {
        let tree = build_tree_curve(3).unwrap();
        let a = offset_finger(&tree, &[1, 2, 3], 5.0).unwrap();
        let b = offset_finger(&tree, &[1, 2, 4], 5.0).unwrap();
        let shared = a.samples.iter().take_while(|s| s.t <= 2.0).count();
        assert_eq!(a.samples[..shared], b.samples[..shared]);
    }

    #[test]
    fn center_distance_matches_width() {
        let tree = build_tree_curve(4).unwrap();
        let f = offset_finger(&tree, &leftmost_branch(4), 5.0).unwrap();
        let rep = verify_offset_distance(&f, 2000, 8.0, 3.0, 7);
        assert!(rep.within_band, "{rep:?}");
        assert!(rep.max_bulge < 1.2, "{rep:?}");
    }

    proptest! {
        #[test]
        fn width_is_strictly_decreasing(t in 0.0f64..6.0, dt in 1e-6f64..1.0) {
            prop_assert!(width(t + dt, 5.0) < width(t, 5.0));
        }
    }
}
