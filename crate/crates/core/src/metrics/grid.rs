use crate::error::{Error, Result};
use crate::geometry::{JordanDomain, Point};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

/// Lattice of nodes `origin + h (i, j)` restricted to the interior of a
/// domain, together with the boundary distance at every node.
///
/// Nodes are stored compactly; the lattice index lookup is either a dense
/// array over the bounding box or a hash map when only a thin part of the
/// box is populated.
#[derive(Debug, Clone)]
pub struct MetricGrid {
    domain: Arc<JordanDomain>,
    origin: Point,
    h: f64,
    nodes: Vec<[i32; 2]>,
    dist: Vec<f64>,
    lookup: NodeLookup,
}

#[derive(Debug, Clone)]
enum NodeLookup {
    Dense { nx: usize, ny: usize, ids: Vec<u32> },
    Sparse(HashMap<[i32; 2], u32>),
}

const NONE: u32 = u32::MAX;

impl MetricGrid {
    /// Dense grid over the bounding box with spacing `h`.
    pub fn build(domain: Arc<JordanDomain>, h: f64) -> Result<Self> {
        check_spacing(h)?;
        let (lo, hi) = domain.bbox();
        let nx = ((hi.x - lo.x) / h).floor() as usize + 1;
        let ny = ((hi.y - lo.y) / h).floor() as usize + 1;
        if nx.saturating_mul(ny) > 400_000_000 {
            return Err(Error::invalid(format!(
                "grid of {nx} x {ny} nodes is too large; use a sparse grid"
            )));
        }
        let rows: Vec<Vec<(i32, f64)>> = (0..ny)
            .into_par_iter()
            .map(|j| {
                let mut row = Vec::new();
                // Walking along the row, a node one step from an interior
                // node at distance > h is interior as well, and the previous
                // nearest edge seeds the distance search.
                let mut prev: Option<(usize, f64)> = None;
                for i in 0..nx {
                    let p = Point::new(lo.x + i as f64 * h, lo.y + j as f64 * h);
                    let inside = match prev {
                        Some((_, d)) if d > h * (1.0 + 1e-9) => true,
                        _ => domain.parity(p),
                    };
                    prev = None;
                    if !inside {
                        continue;
                    }
                    let (e, d) = match prev_seed(&row, i) {
                        Some(seed) => domain.nearest_edge_from(p, seed),
                        None => domain.nearest_edge(p),
                    };
                    if d > 0.0 {
                        row.push((i as i32, d, e));
                        prev = Some((e, d));
                    }
                }
                row.into_iter().map(|(i, d, _)| (i, d)).collect::<Vec<_>>()
            })
            .collect();
        let mut ids = vec![NONE; nx * ny];
        let mut nodes = Vec::new();
        let mut dist = Vec::new();
        for (j, row) in rows.into_iter().enumerate() {
            for (i, d) in row {
                ids[j * nx + i as usize] = nodes.len() as u32;
                nodes.push([i, j as i32]);
                dist.push(d);
            }
        }
        if nodes.is_empty() {
            return Err(Error::NoInteriorNodes { h });
        }
        Ok(Self {
            domain,
            origin: lo,
            h,
            nodes,
            dist,
            lookup: NodeLookup::Dense { nx, ny, ids },
        })
    }

    /// Sparse grid containing only the interior nodes among `candidates`
    /// (lattice indices relative to `origin`).
    pub fn build_sparse<I>(domain: Arc<JordanDomain>, origin: Point, h: f64, candidates: I) -> Result<Self>
    where
        I: IntoIterator<Item = [i32; 2]>,
    {
        check_spacing(h)?;
        let mut cand: Vec<[i32; 2]> = candidates.into_iter().collect();
        cand.sort_unstable_by_key(|c| (c[1], c[0]));
        cand.dedup();
        let kept: Vec<([i32; 2], f64)> = cand
            .par_iter()
            .filter_map(|&c| {
                let p = Point::new(origin.x + c[0] as f64 * h, origin.y + c[1] as f64 * h);
                interior_distance(&domain, p).map(|d| (c, d))
            })
            .collect();
        if kept.is_empty() {
            return Err(Error::NoInteriorNodes { h });
        }
        let mut map = HashMap::with_capacity(kept.len());
        let mut nodes = Vec::with_capacity(kept.len());
        let mut dist = Vec::with_capacity(kept.len());
        for (c, d) in kept {
            map.insert(c, nodes.len() as u32);
            nodes.push(c);
            dist.push(d);
        }
        Ok(Self {
            domain,
            origin,
            h,
            nodes,
            dist,
            lookup: NodeLookup::Sparse(map),
        })
    }

    pub fn domain(&self) -> &Arc<JordanDomain> {
        &self.domain
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.lookup, NodeLookup::Sparse(_))
    }

    /// Lattice index of node `k`.
    pub fn lattice(&self, k: usize) -> [i32; 2] {
        self.nodes[k]
    }

    pub fn position(&self, k: usize) -> Point {
        self.lattice_point(self.nodes[k])
    }

    pub fn lattice_point(&self, c: [i32; 2]) -> Point {
        Point::new(
            self.origin.x + c[0] as f64 * self.h,
            self.origin.y + c[1] as f64 * self.h,
        )
    }

    /// Boundary distance at node `k`.
    pub fn boundary_distance(&self, k: usize) -> f64 {
        self.dist[k]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    /// Node id at a lattice index, if that node is interior.
    pub fn node_at(&self, c: [i32; 2]) -> Option<usize> {
        match &self.lookup {
            NodeLookup::Dense { nx, ny, ids } => {
                if c[0] < 0 || c[1] < 0 || c[0] as usize >= *nx || c[1] as usize >= *ny {
                    return None;
                }
                let id = ids[c[1] as usize * nx + c[0] as usize];
                (id != NONE).then_some(id as usize)
            }
            NodeLookup::Sparse(map) => map.get(&c).map(|&id| id as usize),
        }
    }

    /// Lattice cell containing `p` (lower-left corner index).
    pub fn cell_of(&self, p: Point) -> [i32; 2] {
        [
            ((p.x - self.origin.x) / self.h).floor() as i32,
            ((p.y - self.origin.y) / self.h).floor() as i32,
        ]
    }
}

fn prev_seed(row: &[(i32, f64, usize)], i: usize) -> Option<usize> {
    row.last().filter(|r| r.0 as usize + 1 == i).map(|r| r.2)
}

fn check_spacing(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("grid spacing must be positive, got {h}")));
    }
    Ok(())
}

/// Boundary distance of an interior point, `None` for points outside or on
/// the boundary.
fn interior_distance(domain: &JordanDomain, p: Point) -> Option<f64> {
    if !domain.contains_with_tol(p, 0.0) {
        return None;
    }
    let d = domain.dist_to_boundary(p);
    (d > 0.0).then_some(d)
}
