use super::grid::MetricGrid;
use crate::error::{Error, Result};
use crate::geometry::Point;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;

/// Neighbor stencil of the grid graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    /// Axis and diagonal moves; worst-case direction error about 8%.
    Eight,
    /// Adds the knight moves (±1, ±2), (±2, ±1); worst-case error about 2.7%.
    Sixteen,
    /// Adds the moves with coordinates up to 3; worst-case error about 1.1%.
    #[default]
    ThirtyTwo,
}

impl Stencil {
    /// Moves in the upper half-plane; the graph uses each move and its negative.
    fn half_moves(self) -> &'static [[i32; 2]] {
        const EIGHT: [[i32; 2]; 4] = [[1, 0], [1, 1], [0, 1], [-1, 1]];
        const SIXTEEN: [[i32; 2]; 8] = [
            [1, 0],
            [1, 1],
            [0, 1],
            [-1, 1],
            [2, 1],
            [1, 2],
            [-1, 2],
            [-2, 1],
        ];
        const THIRTY_TWO: [[i32; 2]; 16] = [
            [1, 0],
            [1, 1],
            [0, 1],
            [-1, 1],
            [2, 1],
            [1, 2],
            [-1, 2],
            [-2, 1],
            [3, 1],
            [3, 2],
            [2, 3],
            [1, 3],
            [-1, 3],
            [-2, 3],
            [-3, 2],
            [-3, 1],
        ];
        match self {
            Stencil::Eight => &EIGHT,
            Stencil::Sixteen => &SIXTEEN,
            Stencil::ThirtyTwo => &THIRTY_TWO,
        }
    }

    pub fn moves(self) -> Vec<[i32; 2]> {
        self.half_moves()
            .iter()
            .flat_map(|&[a, b]| [[a, b], [-a, -b]])
            .collect()
    }

    /// Largest lattice coordinate of any move.
    pub fn reach(self) -> i32 {
        match self {
            Stencil::Eight => 1,
            Stencil::Sixteen => 2,
            Stencil::ThirtyTwo => 3,
        }
    }
}

/// Quasihyperbolic cost of the segment between points at boundary distances
/// `d1`, `d2` and separation `len`: length times the harmonic mean of the
/// densities. `None` when the two distance disks do not certify that the
/// segment stays inside the domain.
#[inline]
pub fn segment_cost(len: f64, d1: f64, d2: f64) -> Option<f64> {
    let s = d1 + d2;
    (s >= len).then(|| 2.0 * len / s)
}

/// Approximate quasihyperbolic distance from a source to every grid node.
#[derive(Debug, Clone)]
pub struct MetricField {
    grid: MetricGrid,
    source: Point,
    source_distance: f64,
    stencil: Stencil,
    values: Vec<f64>,
}

impl MetricField {
    pub fn grid(&self) -> &MetricGrid {
        &self.grid
    }

    pub fn source(&self) -> Point {
        self.source
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    /// Per-node values; unreached nodes hold `f64::INFINITY`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn reached(&self, k: usize) -> bool {
        self.values[k].is_finite()
    }

    pub fn reached_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_finite()).count()
    }

    /// Field value at an arbitrary interior point: the cheapest certified
    /// final step from a reached node within stencil reach.
    pub fn value_at(&self, p: Point) -> Result<f64> {
        let dom = self.grid.domain();
        if !dom.contains(p) {
            return Err(Error::OutsideDomain {
                x: p.x,
                y: p.y,
                reason: "query point is not inside the domain".into(),
            });
        }
        if p == self.source {
            return Ok(0.0);
        }
        let dp = dom.dist_to_boundary(p);
        let mut best = f64::INFINITY;
        let r = self.stencil.reach() + 1;
        // Direct segment from the source when it is as short as a grid step.
        let len0 = p.dist(self.source);
        if len0 <= r as f64 * self.grid.spacing() {
            if let Some(c) = segment_cost(len0, dp, self.source_distance) {
                best = c;
            }
        }
        let cell = self.grid.cell_of(p);
        for dj in -r + 1..=r {
            for di in -r + 1..=r {
                let Some(k) = self.grid.node_at([cell[0] + di, cell[1] + dj]) else {
                    continue;
                };
                if !self.values[k].is_finite() {
                    continue;
                }
                let q = self.grid.position(k);
                if let Some(c) = segment_cost(p.dist(q), dp, self.grid.boundary_distance(k)) {
                    best = best.min(self.values[k] + c);
                }
            }
        }
        if best.is_finite() {
            Ok(best)
        } else {
            Err(Error::OutsideDomain {
                x: p.x,
                y: p.y,
                reason: "not connected to the source at this grid spacing".into(),
            })
        }
    }

    /// Writes the CSV dump with columns x, y, d_boundary, k_value, reached.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "d_boundary", "k_value", "reached"])
            .map_err(csv_err)?;
        for k in 0..self.grid.len() {
            let p = self.grid.position(k);
            let v = self.values[k];
            w.serialize((p.x, p.y, self.grid.boundary_distance(k), v, v.is_finite()))
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

#[derive(Copy, Clone, PartialEq)]
struct Entry(f64, u32);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        // Min-heap on the cost, ties by node id for determinism.
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Single-source shortest paths over the grid graph with the default stencil.
pub fn quasihyperbolic_field(grid: &MetricGrid, z0: Point) -> Result<MetricField> {
    quasihyperbolic_field_with(grid, z0, Stencil::default())
}

/// Single-source shortest paths with edge cost `segment_cost`; edges that
/// are not certified to stay inside the domain are skipped.
pub fn quasihyperbolic_field_with(grid: &MetricGrid, z0: Point, stencil: Stencil) -> Result<MetricField> {
    let dom = grid.domain();
    if !dom.contains(z0) {
        return Err(Error::OutsideDomain {
            x: z0.x,
            y: z0.y,
            reason: "source is not inside the domain".into(),
        });
    }
    let d0 = dom.dist_to_boundary(z0);
    let n = grid.len();
    let mut values = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    let cell = grid.cell_of(z0);
    let r = stencil.reach();
    for dj in -r + 1..=r {
        for di in -r + 1..=r {
            let Some(k) = grid.node_at([cell[0] + di, cell[1] + dj]) else {
                continue;
            };
            let len = grid.position(k).dist(z0);
            if let Some(c) = segment_cost(len, d0, grid.boundary_distance(k)) {
                if c < values[k] {
                    values[k] = c;
                    heap.push(Entry(c, k as u32));
                }
            }
        }
    }
    if heap.is_empty() {
        return Err(Error::OutsideDomain {
            x: z0.x,
            y: z0.y,
            reason: "source lies in a pocket without admissible grid nodes".into(),
        });
    }
    let moves: Vec<([i32; 2], f64)> = stencil
        .moves()
        .into_iter()
        .map(|m| (m, grid.spacing() * ((m[0] * m[0] + m[1] * m[1]) as f64).sqrt()))
        .collect();
    let dist = grid.distances();
    while let Some(Entry(v, k)) = heap.pop() {
        let k = k as usize;
        if v > values[k] {
            continue;
        }
        let c = grid.lattice(k);
        let dk = dist[k];
        for &(m, len) in &moves {
            let Some(t) = grid.node_at([c[0] + m[0], c[1] + m[1]]) else {
                continue;
            };
            let Some(w) = segment_cost(len, dk, dist[t]) else {
                continue;
            };
            let nv = v + w;
            if nv < values[t] {
                values[t] = nv;
                heap.push(Entry(nv, t as u32));
            }
        }
    }
    Ok(MetricField {
        grid: grid.clone(),
        source: z0,
        source_distance: d0,
        stencil,
        values,
    })
}
