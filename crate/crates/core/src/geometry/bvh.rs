use super::point::{segment_distance, Point};

const LEAF: usize = 4;

/// Bounding-box hierarchy over the edges of a closed polyline, built on
/// contiguous index ranges (consecutive boundary edges are spatially close).
#[derive(Debug, Clone)]
pub(crate) struct EdgeTree {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    lo: Point,
    hi: Point,
    /// Edge range `[start, end)`; children are stored at `left` and `left + 1`
    /// for internal nodes (`left == 0` marks a leaf).
    start: u32,
    end: u32,
    left: u32,
}

impl Node {
    #[inline]
    fn lower_bound(&self, p: Point) -> f64 {
        let dx = (self.lo.x - p.x).max(0.0).max(p.x - self.hi.x);
        let dy = (self.lo.y - p.y).max(0.0).max(p.y - self.hi.y);
        dx.hypot(dy)
    }
}

impl EdgeTree {
    pub(crate) fn new(v: &[Point]) -> Self {
        let mut tree = Self {
            nodes: Vec::with_capacity(2 * v.len() / LEAF + 2),
        };
        tree.nodes.push(Self::leaf(v, 0, v.len()));
        tree.split(v, 0);
        tree
    }

    fn leaf(v: &[Point], start: usize, end: usize) -> Node {
        let n = v.len();
        let mut lo = v[start];
        let mut hi = v[start];
        for i in start..end {
            let q = v[(i + 1) % n];
            lo = Point::new(lo.x.min(q.x), lo.y.min(q.y));
            hi = Point::new(hi.x.max(q.x), hi.y.max(q.y));
        }
        Node {
            lo,
            hi,
            start: start as u32,
            end: end as u32,
            left: 0,
        }
    }

    fn split(&mut self, v: &[Point], idx: usize) {
        let (start, end) = (self.nodes[idx].start as usize, self.nodes[idx].end as usize);
        if end - start <= LEAF {
            return;
        }
        let mid = start + (end - start) / 2;
        let left = self.nodes.len();
        self.nodes.push(Self::leaf(v, start, mid));
        self.nodes.push(Self::leaf(v, mid, end));
        self.nodes[idx].left = left as u32;
        self.split(v, left);
        self.split(v, left + 1);
    }

    /// Nearest edge to `p` and its distance. A `seed` edge (typically the
    /// answer for a nearby point) tightens the pruning bound from the start.
    pub(crate) fn nearest(&self, v: &[Point], p: Point, seed: Option<usize>) -> (usize, f64) {
        let n = v.len();
        let mut best = match seed {
            Some(e) => (e, segment_distance(p, v[e], v[(e + 1) % n])),
            None => (0usize, f64::INFINITY),
        };
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(0);
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i as usize];
            if node.lower_bound(p) >= best.1 {
                continue;
            }
            if node.left == 0 {
                for e in node.start as usize..node.end as usize {
                    let d = segment_distance(p, v[e], v[(e + 1) % n]);
                    if d < best.1 {
                        best = (e, d);
                    }
                }
                continue;
            }
            let (a, b) = (node.left, node.left + 1);
            let (la, lb) = (
                self.nodes[a as usize].lower_bound(p),
                self.nodes[b as usize].lower_bound(p),
            );
            // Visit the nearer child first.
            if la <= lb {
                stack.push(b);
                stack.push(a);
            } else {
                stack.push(a);
                stack.push(b);
            }
        }
        best
    }
}
