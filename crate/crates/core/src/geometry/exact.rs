//! Exact orientation predicates for points stored as an unevaluated sum
//! `hi + lo` of two `f64` points.
//!
//! The counterexample domain contains strips whose width falls far below
//! the spacing of doubles near their centerline. Such a strip is stored as
//! a centerline sample `hi` plus a tiny normal displacement `lo`; the exact
//! value `hi + lo` is a dyadic rational, so signs of determinants can be
//! decided with big-integer fixed-point arithmetic. A floating-point filter
//! decides the easy cases first.

use super::point::Point;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

/// Every finite double is an integer multiple of 2^-1074.
const FIXED_SHIFT: i64 = 1075;

/// Exact point `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SplitPoint {
    pub hi: Point,
    pub lo: Point,
}

impl SplitPoint {
    pub const fn new(hi: Point, lo: Point) -> Self {
        Self { hi, lo }
    }

    pub const fn exact(p: Point) -> Self {
        Self {
            hi: p,
            lo: Point::ORIGIN,
        }
    }

    /// Nearest double to the exact value.
    #[inline]
    pub fn rounded(self) -> Point {
        self.hi + self.lo
    }

    /// Exact equality of the represented values.
    pub fn same_value(self, o: SplitPoint) -> bool {
        if self.hi == o.hi && self.lo == o.lo {
            return true;
        }
        let (ax, ay) = self.fixed();
        let (bx, by) = o.fixed();
        ax == bx && ay == by
    }

    fn fixed(self) -> (BigInt, BigInt) {
        (
            to_fixed(self.hi.x) + to_fixed(self.lo.x),
            to_fixed(self.hi.y) + to_fixed(self.lo.y),
        )
    }
}

impl From<Point> for SplitPoint {
    fn from(p: Point) -> Self {
        SplitPoint::exact(p)
    }
}

fn to_fixed(x: f64) -> BigInt {
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & 0x000f_ffff_ffff_ffff;
    let (mantissa, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), exp_bits - 1075)
    };
    let v = BigInt::from(mantissa) << ((exp + FIXED_SHIFT) as usize);
    if sign < 0 {
        -v
    } else {
        v
    }
}

/// Sign of the orientation determinant of (a, b, c): positive when the
/// triangle is counterclockwise.
pub fn orient(a: SplitPoint, b: SplitPoint, c: SplitPoint) -> Ordering {
    let (ra, rb, rc) = (a.rounded(), b.rounded(), c.rounded());
    let d1 = rb - ra;
    let d2 = rc - ra;
    let t1 = d1.x * d2.y;
    let t2 = d1.y * d2.x;
    let det = t1 - t2;
    let m = [ra, rb, rc]
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(0.0, f64::max);
    let eps = f64::EPSILON;
    let spread = d1.x.abs() + d1.y.abs() + d2.x.abs() + d2.y.abs();
    let bound = 8.0 * eps * spread * m + 4.0 * eps * (t1.abs() + t2.abs()) + f64::MIN_POSITIVE;
    if det > bound {
        return Ordering::Greater;
    }
    if det < -bound {
        return Ordering::Less;
    }
    orient_exact(a, b, c)
}

fn orient_exact(a: SplitPoint, b: SplitPoint, c: SplitPoint) -> Ordering {
    let (ax, ay) = a.fixed();
    let (bx, by) = b.fixed();
    let (cx, cy) = c.fixed();
    let det = (&bx - &ax) * (&cy - &ay) - (&by - &ay) * (&cx - &ax);
    if det.is_zero() {
        Ordering::Equal
    } else if det.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Exact sign of the dot product (b - a) . (c - a).
fn dot_sign(a: SplitPoint, b: SplitPoint, c: SplitPoint) -> Ordering {
    let (ax, ay) = a.fixed();
    let (bx, by) = b.fixed();
    let (cx, cy) = c.fixed();
    let d = (&bx - &ax) * (&cx - &ax) + (&by - &ay) * (&cy - &ay);
    if d.is_positive() {
        Ordering::Greater
    } else if d.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// `c` collinear with `[a, b]` lies on the closed segment.
fn on_segment(a: SplitPoint, b: SplitPoint, c: SplitPoint) -> bool {
    dot_sign(c, a, b) != Ordering::Greater
}

/// Whether closed segments `[p1, p2]` and `[p3, p4]` share at least one point.
pub fn segments_intersect(p1: SplitPoint, p2: SplitPoint, p3: SplitPoint, p4: SplitPoint) -> bool {
    let o1 = orient(p1, p2, p3);
    let o2 = orient(p1, p2, p4);
    let o3 = orient(p3, p4, p1);
    let o4 = orient(p3, p4, p2);
    use Ordering::Equal;
    if o1 != o2 && o3 != o4 && o1 != Equal && o2 != Equal && o3 != Equal && o4 != Equal {
        return true;
    }
    (o1 == Equal && on_segment(p1, p2, p3))
        || (o2 == Equal && on_segment(p1, p2, p4))
        || (o3 == Equal && on_segment(p3, p4, p1))
        || (o4 == Equal && on_segment(p3, p4, p2))
}

/// Two consecutive edges `[a, b]` and `[b, c]` overlap beyond their shared
/// vertex (the path folds back onto itself).
pub fn adjacent_edges_overlap(a: SplitPoint, b: SplitPoint, c: SplitPoint) -> bool {
    orient(a, b, c) == Ordering::Equal && dot_sign(b, a, c) == Ordering::Greater
}
