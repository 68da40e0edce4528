use super::finger::{choose_m, core_samples, width, CoreSample};
use super::tree::{build_tree_curve, rounding_radius, TreeCurve};
use crate::error::{Error, Result};
use crate::geometry::exact::SplitPoint;
use crate::geometry::point::Point;
use crate::geometry::JordanDomain;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// Deepest truncation with a representable finger width for the default
/// `M`; at core time 7 the width underflows to zero.
pub const MAX_ASSEMBLY_DEPTH: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VertexKind {
    /// `x_1(0) = x_2(0)` of the two level-one fingers, `φ(-1) = φ(2)`.
    Top,
    /// Lower meeting point of two sibling fingers below their branch point.
    Crotch,
    X1,
    X2,
}

/// Provenance of an outline vertex. For `Crotch`, `(k, j)` is the branch
/// point (level 0 for the root).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VertexTag {
    pub kind: VertexKind,
    pub k: u32,
    pub j: usize,
    pub t: f64,
}

/// Outline vertex with a prescribed parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Anchor {
    pub vertex: usize,
    pub u: f64,
}

/// Piecewise constant-speed map `[-1, 2] → ∂Ω_K` through the anchors.
#[derive(Debug, Clone, Serialize)]
pub struct AnchoredParam {
    /// Anchors in traversal order; the first is the top vertex at `-1`, and
    /// the loop closes at the same vertex with parameter `2`.
    pub anchors: Vec<Anchor>,
    /// Edge lengths measured on the exact vertices.
    edge_len: Vec<f64>,
}

fn exact_len(a: SplitPoint, b: SplitPoint) -> f64 {
    ((b.hi - a.hi) + (b.lo - a.lo)).norm()
}

impl AnchoredParam {
    fn new(points: &[SplitPoint], anchors: Vec<Anchor>) -> Result<Self> {
        let n = points.len();
        for w in anchors.windows(2) {
            if !(w[1].u > w[0].u && w[1].vertex > w[0].vertex) {
                return Err(Error::Construction(format!(
                    "anchor parameters not increasing at vertex {} ({} then {})",
                    w[1].vertex, w[0].u, w[1].u
                )));
            }
        }
        let edge_len = (0..n).map(|i| exact_len(points[i], points[(i + 1) % n])).collect();
        Ok(Self { anchors, edge_len })
    }

    /// Anchors followed by the closing copy of the first one at `u = 2`.
    fn closed(&self, n: usize) -> impl Iterator<Item = Anchor> + '_ {
        self.anchors.iter().copied().chain(std::iter::once(Anchor { vertex: n, u: 2.0 }))
    }

    /// `φ(u)` as an exact point.
    pub fn eval(&self, points: &[SplitPoint], u: f64) -> Result<SplitPoint> {
        let n = points.len();
        if !(-1.0..=2.0).contains(&u) {
            return Err(Error::invalid(format!("parameter {u} outside [-1, 2]")));
        }
        let all: Vec<Anchor> = self.closed(n).collect();
        let i = all.partition_point(|a| a.u <= u).clamp(1, all.len() - 1) - 1;
        let (a, b) = (all[i], all[i + 1]);
        if u == a.u {
            return Ok(points[a.vertex % n]);
        }
        if u == b.u {
            return Ok(points[b.vertex % n]);
        }
        let total: f64 = (a.vertex..b.vertex).map(|e| self.edge_len[e]).sum();
        let mut rest = total * (u - a.u) / (b.u - a.u);
        for e in a.vertex..b.vertex {
            let l = self.edge_len[e];
            if rest <= l || e + 1 == b.vertex {
                let lam = if l > 0.0 { (rest / l).min(1.0) } else { 0.0 };
                let (p, q) = (points[e], points[(e + 1) % n]);
                return Ok(SplitPoint::new(p.hi.lerp(q.hi, lam), p.lo.lerp(q.lo, lam)));
            }
            rest -= l;
        }
        unreachable!("anchor interval has at least one edge")
    }

    /// Disk angle `2π(u + 1)/3` of parameter `u`.
    pub fn angle(u: f64) -> f64 {
        std::f64::consts::TAU * (u + 1.0) / 3.0
    }
}

/// Truncated counterexample domain `Ω_K` with its boundary map.
#[derive(Debug, Clone)]
pub struct CounterexampleDomain {
    pub depth: u32,
    pub m: f64,
    pub tree: TreeCurve,
    pub points: Vec<SplitPoint>,
    pub tags: Vec<VertexTag>,
    pub domain: Arc<JordanDomain>,
    pub param: AnchoredParam,
}

/// Core time and offset of the crotch below `r_{k,j}`: the lower meeting
/// point of the two outer offset circles of radius `ρ_k + g` around the
/// centers of the children's entry arcs.
pub fn crotch_offset(k: u32, m: f64) -> (f64, Point) {
    if k == 0 {
        return (0.0, Point::new(0.0, -width(0.0, m)));
    }
    let rho = rounding_radius(k);
    let mut g = width(k as f64, m);
    let mut theta = 0.0;
    for _ in 0..8 {
        theta = 2.0 * (g / (2.0 * (rho + g))).sqrt().asin();
        g = width(k as f64 + rho * theta, m);
    }
    (k as f64 + rho * theta, Point::new(0.0, -(rho + g) * theta.sin()))
}

/// Parameter prescribed for `x_1(k)` of finger `(k, j)`.
fn plus_anchor(tree: &TreeCurve, k: u32, j: usize) -> f64 {
    if j == 1 {
        return -(-(k as f64)).exp2();
    }
    let m = j - 1;
    let n = m.trailing_zeros() + 1;
    let (base, jj) = (k + 1 - n, (m >> (n - 1)).div_ceil(2));
    tree.svc.center(base, jj) + (1.0 - (-(n as f64)).exp2()) * super::svc::removed_radius(base)
}

/// Parameter prescribed for `x_2(k)` of finger `(k, j)`.
fn minus_anchor(tree: &TreeCurve, k: u32, j: usize) -> f64 {
    if j == 1 << k {
        return 1.0 + (-(k as f64)).exp2();
    }
    let n = j.trailing_zeros() + 1;
    let (base, jj) = (k + 1 - n, (j >> (n - 1)).div_ceil(2));
    tree.svc.center(base, jj) - (1.0 - (-(n as f64)).exp2()) * super::svc::removed_radius(base)
}

struct Builder<'a> {
    tree: &'a TreeCurve,
    depth: u32,
    m: f64,
    samples: Vec<Vec<Vec<CoreSample>>>,
    crotch: Vec<(f64, Point)>,
    points: Vec<SplitPoint>,
    tags: Vec<VertexTag>,
    anchors: Vec<Anchor>,
}

impl Builder<'_> {
    fn push(&mut self, p: SplitPoint, tag: VertexTag, u: Option<f64>) {
        if let Some(u) = u {
            self.anchors.push(Anchor {
                vertex: self.points.len(),
                u,
            });
        }
        self.points.push(p);
        self.tags.push(tag);
    }

    fn side(&mut self, k: u32, j: usize, s: CoreSample, kind: VertexKind) {
        let g = width(s.t, self.m);
        let lo = match kind {
            VertexKind::X1 => s.normal * g,
            _ => s.normal * -g,
        };
        let u = (s.t == k as f64).then(|| match kind {
            VertexKind::X1 => plus_anchor(self.tree, k, j),
            _ => minus_anchor(self.tree, k, j),
        });
        self.push(SplitPoint::new(s.point, lo), VertexTag { kind, k, j, t: s.t }, u);
    }

    fn emit(&mut self, k: u32, j: usize) {
        let left = j % 2 == 1;
        let start = k as f64 - 1.0;
        let tc = self.crotch[k as usize - 1].0;
        let samples = std::mem::take(&mut self.samples[k as usize - 1][j - 1]);
        for &s in &samples {
            if (left && s.t > start) || (!left && s.t > tc) {
                self.side(k, j, s, VertexKind::X1);
            }
        }
        if k < self.depth {
            self.emit(k + 1, 2 * j - 1);
            let (t, lo) = self.crotch[k as usize];
            let tag = VertexTag {
                kind: VertexKind::Crotch,
                k,
                j,
                t,
            };
            self.push(SplitPoint::new(self.tree.branch_point(k, j), lo), tag, None);
            self.emit(k + 1, 2 * j);
        }
        for &s in samples.iter().rev() {
            if (left && s.t > tc) || (!left && s.t > start) {
                self.side(k, j, s, VertexKind::X2);
            }
        }
    }
}

pub fn assemble_domain(depth: u32, m: Option<f64>) -> Result<CounterexampleDomain> {
    let m = m.unwrap_or_else(|| choose_m(depth) as f64);
    if depth == 0 || depth > MAX_ASSEMBLY_DEPTH || !(width(depth as f64, m) > 1e-300) {
        return Err(Error::invalid(format!(
            "truncation depth must lie in 1..={MAX_ASSEMBLY_DEPTH} with a representable finger width, got {depth}"
        )));
    }
    let tree = build_tree_curve(depth)?;
    let samples: Vec<Vec<Vec<CoreSample>>> = (1..=depth)
        .map(|k| (1..=1usize << k).into_par_iter().map(|j| core_samples(&tree, k, j)).collect())
        .collect();
    let mut b = Builder {
        tree: &tree,
        depth,
        m,
        samples,
        crotch: (0..depth).map(|k| crotch_offset(k, m)).collect(),
        points: Vec::new(),
        tags: Vec::new(),
        anchors: Vec::new(),
    };
    let top = VertexTag {
        kind: VertexKind::Top,
        k: 0,
        j: 1,
        t: 0.0,
    };
    b.push(SplitPoint::new(tree.p0, Point::new(0.0, width(0.0, m))), top, Some(-1.0));
    b.emit(1, 1);
    let (t, lo) = b.crotch[0];
    b.push(
        SplitPoint::new(tree.p0, lo),
        VertexTag {
            kind: VertexKind::Crotch,
            k: 0,
            j: 1,
            t,
        },
        None,
    );
    b.emit(1, 2);
    let (points, tags, anchors) = (b.points, b.tags, b.anchors);
    let param = AnchoredParam::new(&points, anchors)?;
    let domain = Arc::new(JordanDomain::from_split(points.clone(), width(depth as f64, m))?);
    Ok(CounterexampleDomain {
        depth,
        m,
        tree,
        points,
        tags,
        domain,
        param,
    })
}

/// Result of comparing the anchored values of `φ` with the finger offsets.
#[derive(Debug, Clone, Serialize)]
pub struct AnchorCheck {
    pub checked: usize,
    /// Anchors of the form `φ(-2^{-k}) = r^+_{k,1}`.
    pub left_chain: bool,
    /// Anchors of the form `φ(1 + 2^{-k}) = r^-_{k,2^k}`.
    pub right_chain: bool,
    /// Anchors at `R_{k,j} ± (1 - 2^{-n}) r_k`.
    pub interior: bool,
    pub top_closes: bool,
}

impl CounterexampleDomain {
    /// Evaluates `φ` at every prescribed parameter and compares bitwise
    /// with the offsets of independently built fingers.
    pub fn check_anchors(&self) -> Result<AnchorCheck> {
        use super::finger::offset_finger;
        let (mut left, mut right, mut inner, mut checked) = (true, true, true, 0);
        for k in 1..=self.depth {
            for j in 1..=1usize << k {
                let mut branch = vec![j];
                while branch.len() < k as usize {
                    let c = branch.last().unwrap().div_ceil(2);
                    branch.push(c);
                }
                branch.reverse();
                let f = offset_finger(&self.tree, &branch, self.m)?;
                let last = f.samples.len() - 1;
                for (u, want) in [(plus_anchor(&self.tree, k, j), f.x1(last)), (minus_anchor(&self.tree, k, j), f.x2(last))] {
                    let got = self.param.eval(&self.points, u)?;
                    let ok = got == want;
                    checked += 1;
                    if u < 0.0 {
                        left &= ok;
                    } else if u > 1.0 {
                        right &= ok;
                    } else {
                        inner &= ok;
                    }
                }
            }
        }
        let top = self.points[0];
        let top_closes = self.param.eval(&self.points, -1.0)? == top && self.param.eval(&self.points, 2.0)? == top;
        Ok(AnchorCheck {
            checked,
            left_chain: left,
            right_chain: right,
            interior: inner,
            top_closes,
        })
    }

    /// Parameter measure of the set mapped onto the Cantor set in the limit.
    pub fn cantor_parameter_measure(&self) -> f64 {
        1.0 - self.tree.svc.removed_measure()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_formulas_match_hand_values() {
        let tree = build_tree_curve(3).unwrap();
        let (r1, r2) = (0.125, 1.0 / 32.0);
        assert_eq!(plus_anchor(&tree, 1, 1), -0.5);
        assert_eq!(minus_anchor(&tree, 1, 2), 1.5);
        assert_eq!(minus_anchor(&tree, 1, 1), 0.5 - r1 / 2.0);
        assert_eq!(plus_anchor(&tree, 1, 2), 0.5 + r1 / 2.0);
        assert_eq!(minus_anchor(&tree, 2, 2), 0.5 - 0.75 * r1);
        assert_eq!(plus_anchor(&tree, 2, 3), 0.5 + 0.75 * r1);
        let c21 = tree.svc.center(2, 1);
        assert_eq!(minus_anchor(&tree, 2, 1), c21 - r2 / 2.0);
        assert_eq!(plus_anchor(&tree, 2, 2), c21 + r2 / 2.0);
    }

    #[test]
    fn crotch_lies_on_both_outer_circles() {
        let (t, lo) = crotch_offset(2, 3.0);
        let rho = rounding_radius(2);
        let g = width(t, 3.0);
        let d = Point::new(rho, lo.y).norm();
        assert!((d - (rho + g)).abs() < 1e-15);
        assert!(t > 2.0 && t < 2.0 + rho);
    }

    #[test]
    fn small_depths_assemble_with_exact_anchors() {
        for depth in 1..=3 {
            let cd = assemble_domain(depth, None).unwrap();
            assert!(cd.domain.contains(cd.tree.p0));
            let chk = cd.check_anchors().unwrap();
            assert_eq!(chk.checked, 2 * ((1 << (depth + 1)) - 2));
            assert!(chk.left_chain && chk.right_chain && chk.interior && chk.top_closes, "{chk:?}");
        }
    }

    #[test]
    fn parameter_is_monotone_along_the_outline() {
        let cd = assemble_domain(2, None).unwrap();
        let mut prev = -1.0;
        for a in &cd.param.anchors[1..] {
            assert!(a.u > prev);
            prev = a.u;
        }
        let p = cd.param.eval(&cd.points, 0.3).unwrap().rounded();
        assert!(cd.domain.dist_to_boundary(p) < 1e-12);
        assert!(cd.param.eval(&cd.points, 2.5).is_err());
    }

    #[test]
    fn depth_guard() {
        assert!(assemble_domain(0, None).is_err());
        assert!(assemble_domain(7, None).is_err());
    }
}
