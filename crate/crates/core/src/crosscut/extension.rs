//! Candidate homeomorphic extension `Φ = f ∘ Ψ` of a boundary map.
//!
//! `Ψ` is a radial stretch of the disk, `Ψ(r e^{iθ}) = r e^{iΘ(r, θ)}`. On
//! the Whitney ring `1 - 2^{1-n} ≤ r ≤ 1 - 2^{-n}` the angle `Θ` blends the
//! piecewise linear interpolants of the lifted boundary correspondence
//! `ψ = f⁻¹ ∘ φ` at levels `n` and `n + 1`; inside the innermost ring it is
//! the level-`n0` interpolant and in the outermost layer the finest one.
//! Each `Θ(r, ·)` is increasing, so `Ψ` and `Φ` are homeomorphisms, and on
//! the unit circle `Φ` agrees with `φ` at every finest-level dyadic point.
//!
//! With `f` conformal, `|DΦ|_HS = |f′(Ψ)| (1 + r²Θ_r² + Θ_θ²)^{1/2}` and
//! `det DΦ = |f′(Ψ)|² Θ_θ`.

use super::dyadic::DyadicFamily;
use super::system::CrosscutSystem;
use crate::error::{Error, Result};
use crate::geometry::point::signed_area;
use crate::geometry::polygon::find_self_intersection;
use crate::geometry::{Point, SplitPoint};
use crate::metrics::CompensatedSum;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;
use std::io::Write;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExtensionOptions {
    /// Subdivisions of every Whitney cell in each direction.
    pub sub: usize,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        Self { sub: 1 }
    }
}

/// Quadrature sample: area weight, `|f′|` and `|DΨ|_HS`.
#[derive(Debug, Clone, Copy)]
struct Sample {
    weight: f64,
    fprime: f64,
    hs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeshCell {
    pub id: usize,
    /// Ring level; 0 for the central disk.
    pub level: u32,
    pub r: [f64; 2],
    pub theta: [f64; 2],
    /// Corners counterclockwise: `(r0,θ0), (r1,θ0), (r1,θ1), (r0,θ1)`.
    pub disk: [Point; 4],
    pub image: [Point; 4],
    /// Smallest `det DΦ` over the Gauss points.
    pub jacobian_min: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct ExtensionMesh {
    pub n0: u32,
    pub n_max: u32,
    pub sub: usize,
    pub cells: Vec<MeshCell>,
    samples: Vec<[Sample; 4]>,
    /// `sup |Φ - φ|` over boundary mesh vertices.
    pub boundary_vertex_error: f64,
    /// `sup |Φ - φ|` over midpoints of the boundary mesh edges.
    pub boundary_midpoint_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub p: f64,
    pub energy: f64,
    pub cells: usize,
    pub degenerate_cells: usize,
    /// True when degenerate cells were left out, so `energy` is a lower bound.
    pub lower_bound: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyRefinement {
    pub coarse: EnergyReport,
    pub fine: EnergyReport,
    pub drift: f64,
}

/// Piecewise linear interpolants of the lifted correspondence at all levels
/// up to `finest`.
struct Interpolants {
    finest: u32,
    offset: f64,
    psi: Vec<f64>,
}

impl Interpolants {
    /// Value and slope of the level-`n` interpolant at `theta`, which must lie
    /// in the level-`n` interval `k`.
    fn eval(&self, n: u32, k: usize, theta: f64) -> (f64, f64) {
        let stride = 1usize << (self.finest - n);
        let w = TAU / (1u64 << n) as f64;
        let (a, b) = (self.psi[k * stride], self.psi[(k + 1) * stride]);
        let t0 = self.offset + k as f64 * w;
        let slope = (b - a) / w;
        (a + slope * (theta - t0), slope)
    }
}

/// Blend of two interpolant levels over a radial range.
#[derive(Clone, Copy)]
struct Ring {
    level: u32,
    r: [f64; 2],
    inner: u32,
    outer: u32,
    /// Level of the angular cell boundaries.
    cells: u32,
}

const GAUSS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

fn rings(n0: u32, n_max: u32) -> Vec<Ring> {
    let radius = |n: u32| 1.0 - (1.0 - n as f64).exp2();
    let mut out = Vec::new();
    if radius(n0) > 0.0 {
        out.push(Ring {
            level: 0,
            r: [0.0, radius(n0)],
            inner: n0,
            outer: n0,
            cells: n0,
        });
    }
    for n in n0..=n_max {
        out.push(Ring {
            level: n,
            r: [radius(n), radius(n + 1)],
            inner: n,
            outer: n + 1,
            cells: n + 1,
        });
    }
    out.push(Ring {
        level: n_max + 1,
        r: [radius(n_max + 1), 1.0],
        inner: n_max + 1,
        outer: n_max + 1,
        cells: n_max + 1,
    });
    out
}

struct CellSpec {
    ring: Ring,
    k: usize,
    r: [f64; 2],
    theta: [f64; 2],
}

impl CellSpec {
    /// `Θ`, `Θ_r`, `Θ_θ` at a point of the cell.
    fn angle(&self, ip: &Interpolants, r: f64, theta: f64) -> (f64, f64, f64) {
        let ring = &self.ring;
        let ka = self.k >> (ring.cells - ring.inner);
        let kb = self.k >> (ring.cells - ring.outer);
        let (a, da) = ip.eval(ring.inner, ka, theta);
        let (b, db) = ip.eval(ring.outer, kb, theta);
        let width = ring.r[1] - ring.r[0];
        let lam = (r - ring.r[0]) / width;
        (a + lam * (b - a), (b - a) / width, da + lam * (db - da))
    }
}

pub fn build_extension(system: &CrosscutSystem, options: &ExtensionOptions) -> Result<ExtensionMesh> {
    let sub = options.sub;
    if sub == 0 || sub > 64 {
        return Err(Error::invalid(format!("cell subdivision must be in 1..=64, got {sub}")));
    }
    let fam = system.family();
    let (n0, n_max) = (fam.n0, fam.n_max);
    let finest = n_max + 1;
    let lift = system.lift();
    let m = DyadicFamily::arcs_at(finest);
    let probe = DyadicFamily::new(1, finest, fam.offset)?;
    let psi: Vec<f64> = (0..=m).map(|k| lift.psi(probe.endpoint(finest, k))).collect();
    if psi.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Construction("lifted boundary correspondence is not increasing".into()));
    }
    let ip = Interpolants {
        finest,
        offset: fam.offset,
        psi,
    };
    let mut specs = Vec::new();
    for ring in rings(n0, n_max) {
        let count = DyadicFamily::arcs_at(ring.cells);
        let w = TAU / count as f64;
        for k in 0..count {
            let t0 = fam.offset + k as f64 * w;
            for a in 0..sub {
                for b in 0..sub {
                    let r0 = ring.r[0] + (ring.r[1] - ring.r[0]) * a as f64 / sub as f64;
                    let r1 = ring.r[0] + (ring.r[1] - ring.r[0]) * (a + 1) as f64 / sub as f64;
                    let th0 = t0 + w * b as f64 / sub as f64;
                    let th1 = t0 + w * (b + 1) as f64 / sub as f64;
                    specs.push(CellSpec {
                        ring,
                        k,
                        r: [r0, if a + 1 == sub { ring.r[1] } else { r1 }],
                        theta: [th0, th1],
                    });
                }
            }
        }
    }
    let map = system.map();
    let phi = system.phi();
    let built: Vec<(MeshCell, [Sample; 4])> = specs
        .par_iter()
        .enumerate()
        .map(|(id, spec)| {
            let corners_rt = [
                (spec.r[0], spec.theta[0]),
                (spec.r[1], spec.theta[0]),
                (spec.r[1], spec.theta[1]),
                (spec.r[0], spec.theta[1]),
            ];
            let disk = corners_rt.map(|(r, t)| Point::from_polar(r, t));
            // Corner images, edge midpoints and Gauss points in one batch.
            let mut pts: Vec<(f64, f64)> = corners_rt.to_vec();
            for e in 0..4 {
                let (p, q) = (corners_rt[e], corners_rt[(e + 1) % 4]);
                pts.push((0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1)));
            }
            let mut gauss = Vec::with_capacity(4);
            for gr in GAUSS {
                for gt in GAUSS {
                    let r = 0.5 * (spec.r[0] + spec.r[1]) + 0.5 * (spec.r[1] - spec.r[0]) * gr;
                    let t = 0.5 * (spec.theta[0] + spec.theta[1]) + 0.5 * (spec.theta[1] - spec.theta[0]) * gt;
                    gauss.push((r, t));
                }
            }
            let on_circle = |r: f64| r >= 1.0;
            let interior: Vec<Complex64> = pts
                .iter()
                .filter(|&&(r, _)| !on_circle(r))
                .map(|&(r, t)| Complex64::from_polar(r, spec.angle(&ip, r, t).0))
                .collect();
            let mut images = map.eval_many(&interior).into_iter();
            let outline: Vec<Point> = pts
                .iter()
                .map(|&(r, t)| if on_circle(r) { phi.eval(t) } else { images.next().unwrap() })
                .collect();
            let gz: Vec<Complex64> = gauss
                .iter()
                .map(|&(r, t)| Complex64::from_polar(r, spec.angle(&ip, r, t).0))
                .collect();
            let fp = map.derivative_abs_many(&gz);
            let cell_area = 0.25 * (spec.r[1] - spec.r[0]) * (spec.theta[1] - spec.theta[0]);
            let mut samples = [Sample { weight: 0.0, fprime: 0.0, hs: 0.0 }; 4];
            let mut jacobian_min = f64::INFINITY;
            for (g, &(r, t)) in gauss.iter().enumerate() {
                let (_, th_r, th_t) = spec.angle(&ip, r, t);
                samples[g] = Sample {
                    weight: cell_area * r,
                    fprime: fp[g],
                    hs: (1.0 + r * r * th_r * th_r + th_t * th_t).sqrt(),
                };
                jacobian_min = jacobian_min.min(fp[g] * fp[g] * th_t);
            }
            let image = [outline[0], outline[1], outline[2], outline[3]];
            let degenerate = !(jacobian_min > 0.0) || !simple_outline(&outline);
            (
                MeshCell {
                    id,
                    level: spec.ring.level,
                    r: spec.r,
                    theta: spec.theta,
                    disk,
                    image,
                    jacobian_min,
                    degenerate,
                },
                samples,
            )
        })
        .collect();
    let (cells, samples): (Vec<MeshCell>, Vec<[Sample; 4]>) = built.into_iter().unzip();
    let vertex_err = cells
        .iter()
        .filter(|c| c.r[1] >= 1.0)
        .map(|c| c.image[2].dist(phi.eval(c.theta[1])).max(c.image[1].dist(phi.eval(c.theta[0]))))
        .fold(0.0, f64::max);
    // Between vertices the trace is f(e^{iΘ}) with Θ the finest interpolant.
    let mid_err = (0..m)
        .map(|k| {
            let tm = probe.endpoint(finest, k) + 0.5 * TAU / m as f64;
            map.boundary_image_angle(ip.eval(finest, k, tm).0).dist(phi.eval(tm))
        })
        .fold(0.0, f64::max);
    Ok(ExtensionMesh {
        n0,
        n_max,
        sub,
        cells,
        samples,
        boundary_vertex_error: vertex_err,
        boundary_midpoint_error: mid_err,
    })
}

/// Corner and edge-midpoint outline of a cell image is a simple,
/// positively oriented polygon. Repeated points (the center of the disk)
/// are collapsed first.
fn simple_outline(outline: &[Point]) -> bool {
    let order = [0, 4, 1, 5, 2, 6, 3, 7];
    let mut poly: Vec<Point> = Vec::with_capacity(8);
    for &i in &order {
        let p = outline[i];
        if poly.last() != Some(&p) {
            poly.push(p);
        }
    }
    while poly.len() > 1 && poly.first() == poly.last() {
        poly.pop();
    }
    if poly.len() < 3 || !(signed_area(&poly) > 0.0) {
        return false;
    }
    let split: Vec<SplitPoint> = poly.iter().map(|&p| SplitPoint::exact(p)).collect();
    find_self_intersection(&split).is_none()
}

impl ExtensionMesh {
    pub fn degenerate_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.degenerate).count()
    }

    /// Largest `|Φ(v) - v|` over mesh vertices, for comparisons with the
    /// identity.
    pub fn max_displacement(&self) -> f64 {
        self.cells
            .iter()
            .flat_map(|c| c.disk.iter().zip(&c.image))
            .map(|(d, i)| d.dist(*i))
            .fold(0.0, f64::max)
    }

    /// Writes one row per cell corner.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["disk_x", "disk_y", "image_x", "image_y", "level", "cell_id", "jacobian_min"])
            .map_err(crate::metrics::field::csv_err)?;
        for c in &self.cells {
            for (d, i) in c.disk.iter().zip(&c.image) {
                w.serialize((d.x, d.y, i.x, i.y, c.level, c.id, c.jacobian_min))
                    .map_err(crate::metrics::field::csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// `Σ_cells ∫ |DΦ|_HS^p` by 2×2 Gauss quadrature on every cell. Degenerate
/// cells are left out and reported.
pub fn sobolev_energy(mesh: &ExtensionMesh, p: f64) -> Result<EnergyReport> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::invalid(format!("exponent p must lie in [1, 2), got {p}")));
    }
    let mut sum = CompensatedSum::default();
    for (cell, s) in mesh.cells.iter().zip(&mesh.samples) {
        if cell.degenerate {
            continue;
        }
        for g in s {
            sum.add(g.weight * (g.fprime * g.hs).powf(p));
        }
    }
    let degenerate_cells = mesh.degenerate_cells();
    Ok(EnergyReport {
        p,
        energy: sum.value(),
        cells: mesh.cells.len(),
        degenerate_cells,
        lower_bound: degenerate_cells > 0,
    })
}

/// Energy on the mesh and on its uniform refinement.
pub fn energy_refinement(system: &CrosscutSystem, options: &ExtensionOptions, p: f64) -> Result<EnergyRefinement> {
    let coarse = sobolev_energy(&build_extension(system, options)?, p)?;
    let fine_opts = ExtensionOptions { sub: 2 * options.sub };
    let fine = sobolev_energy(&build_extension(system, &fine_opts)?, p)?;
    let drift = (fine.energy - coarse.energy).abs() / coarse.energy;
    Ok(EnergyRefinement { coarse, fine, drift })
}
