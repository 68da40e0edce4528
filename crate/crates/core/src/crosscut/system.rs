use super::dyadic::{endpoint_gap, endpoint_gap_bound, DyadicFamily};
use super::param::{BoundaryParam, Lift};
use crate::conformal::RiemannMap;
use crate::error::{Error, Result};
use crate::geometry::exact::segments_intersect;
use crate::geometry::point::polyline_length;
use crate::geometry::polygon::find_segment_intersection;
use crate::geometry::{disk_geodesic, DiskGeodesic, Point, SplitPoint};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CrosscutOptions {
    /// Hyperbolic arclength between consecutive geodesic samples.
    pub step: f64,
    /// Disk distance from the outermost samples to the circle.
    pub end_eps: f64,
    /// Radius, measured in the disk, of the neighborhood of a shared
    /// endpoint inside which crosscuts may touch. Geodesics ending at the
    /// same point are tangent there, so their images cannot be separated
    /// below the evaluation noise of the map.
    pub contact: f64,
    /// Run the pairwise crossing test after construction.
    pub verify: bool,
}

impl Default for CrosscutOptions {
    fn default() -> Self {
        Self {
            step: 0.15,
            end_eps: 1e-8,
            contact: 1e-4,
            verify: true,
        }
    }
}

/// The crosscut `Γ = f(γ)` for one dyadic arc.
#[derive(Debug, Clone, Serialize)]
pub struct Crosscut {
    pub n: u32,
    pub j: u32,
    /// Endpoint angles of the arc on the parameter circle.
    pub x: [f64; 2],
    /// Lifted disk angles `ξ = f⁻¹(φ(x))` of the endpoints.
    pub xi: [f64; 2],
    pub geodesic: DiskGeodesic,
    /// Disk points of the polyline, starting and ending on the circle.
    #[serde(skip)]
    pub disk: Vec<Complex64>,
    /// Image polyline; its first and last points are `φ(x)`.
    #[serde(skip)]
    pub image: Vec<Point>,
    pub length: f64,
}

impl Crosscut {
    pub fn endpoints(&self) -> (Point, Point) {
        (self.image[0], *self.image.last().unwrap())
    }

    /// Chord between the endpoint preimages on the unit circle.
    pub fn xi_gap(&self) -> f64 {
        2.0 * (0.5 * (self.xi[1] - self.xi[0])).sin().abs()
    }
}

/// Dyadic arcs with their geodesic crosscuts, ordered by level and index.
#[derive(Debug, Clone)]
pub struct CrosscutSystem {
    family: DyadicFamily,
    phi: BoundaryParam,
    map: Arc<RiemannMap>,
    options: CrosscutOptions,
    crosscuts: Vec<Crosscut>,
}

impl CrosscutSystem {
    pub fn family(&self) -> &DyadicFamily {
        &self.family
    }

    pub fn phi(&self) -> &BoundaryParam {
        &self.phi
    }

    pub fn map(&self) -> &Arc<RiemannMap> {
        &self.map
    }

    pub fn options(&self) -> &CrosscutOptions {
        &self.options
    }

    pub fn lift(&self) -> Lift<'_> {
        Lift {
            phi: &self.phi,
            map: &self.map,
        }
    }

    pub fn crosscuts(&self) -> &[Crosscut] {
        &self.crosscuts
    }

    fn level_start(&self, n: u32) -> usize {
        (self.family.n0..n).map(DyadicFamily::arcs_at).sum()
    }

    pub fn level(&self, n: u32) -> &[Crosscut] {
        assert!(self.family.levels().contains(&n), "level {n} not in the system");
        let s = self.level_start(n);
        &self.crosscuts[s..s + DyadicFamily::arcs_at(n)]
    }

    pub fn get(&self, n: u32, j: usize) -> Option<&Crosscut> {
        if !self.family.levels().contains(&n) || j >= DyadicFamily::arcs_at(n) {
            return None;
        }
        Some(&self.crosscuts[self.level_start(n) + j])
    }

    /// Closed curve `Γ ∪ φ(I)`: the crosscut followed by the boundary arc
    /// traversed back to its start.
    pub fn region_boundary(&self, n: u32, j: usize) -> Option<Vec<Point>> {
        let c = self.get(n, j)?;
        let dom = self.phi.domain();
        let s0 = self.phi.arclength_lifted(c.x[0]);
        let s1 = self.phi.arclength_lifted(c.x[1]);
        let mut pts = c.image.clone();
        // Boundary vertices strictly inside the arc, in reverse order.
        let perim = dom.perimeter();
        let tol = 1e-12 * perim;
        let mut inner: Vec<(f64, Point)> = Vec::new();
        for i in 0..dom.len() {
            let mut s = dom.vertex_arclength(i);
            while s <= s0 + tol {
                s += perim;
            }
            if s < s1 - tol {
                inner.push((s, dom.vertices()[i]));
            }
        }
        inner.sort_by(|a, b| b.0.total_cmp(&a.0));
        pts.extend(inner.into_iter().map(|v| v.1));
        Some(pts)
    }

    /// Same system with coarser or finer truncation level.
    pub fn rebuild(&self, n_max: u32) -> Result<Self> {
        build_crosscuts_with(
            self.family.with_n_max(n_max)?,
            self.phi.clone(),
            self.map.clone(),
            self.options,
        )
    }
}

/// Disk automorphism `x ↦ (ux + m)/(1 + m̄ux)` sending the diameter
/// `[-1, 1]` onto the geodesic, with `1 ↦ xi2`.
fn geodesic_chart(g: &DiskGeodesic, xi2: Complex64) -> (Complex64, Complex64) {
    let (m, dir) = match *g {
        DiskGeodesic::Diameter { .. } => (Complex64::new(0.0, 0.0), xi2),
        DiskGeodesic::Arc { center, radius, .. } => {
            let c = center.to_complex();
            let d = c / c.norm();
            (c - d * radius, d * Complex64::i())
        }
    };
    let apply = |u: Complex64, x: f64| (u * x + m) / (1.0 + m.conj() * u * x);
    let u = if (apply(dir, 1.0) - xi2).norm() <= (apply(-dir, 1.0) - xi2).norm() {
        dir
    } else {
        -dir
    };
    (m, u)
}

/// Interior geodesic samples, uniform in hyperbolic arclength.
fn geodesic_samples(g: &DiskGeodesic, xi2: Complex64, opts: &CrosscutOptions) -> Vec<Complex64> {
    let (m, u) = geodesic_chart(g, xi2);
    // |A'(±1)| = (1 - |m|²)/(1 + |m|²) because u is orthogonal to m; it sets
    // how fast the samples approach the endpoints.
    let speed = (1.0 - m.norm_sqr()) / (1.0 + m.norm_sqr());
    let t_max = (2.0 * speed / opts.end_eps).ln().max(1.0);
    let k = (2.0 * t_max / opts.step).ceil() as usize;
    (0..=k)
        .map(|i| {
            let t = -t_max + 2.0 * t_max * i as f64 / k as f64;
            let x = (0.5 * t).tanh();
            (u * x + m) / (1.0 + m.conj() * u * x)
        })
        .collect()
}

fn build_one(lift: &Lift, family: &DyadicFamily, n: u32, j: usize, opts: &CrosscutOptions) -> Result<Crosscut> {
    let (a, b) = family.arc(n, j);
    let xi = [lift.psi(a), lift.psi(b)];
    let (z1, z2) = (Complex64::from_polar(1.0, xi[0]), Complex64::from_polar(1.0, xi[1]));
    let geodesic = disk_geodesic(z1, z2)?;
    let mut image = Vec::new();
    image.push(lift.phi.eval(a));
    let samples = geodesic_samples(&geodesic, z2, opts);
    let mapped = lift.map.eval_many(&samples);
    if let Some(bad) = mapped.iter().position(|p| !p.is_finite()) {
        return Err(Error::Numerical {
            iterations: bad,
            residual: f64::NAN,
            reason: format!("map evaluation failed on crosscut ({n}, {j})"),
        });
    }
    image.extend(mapped);
    let mut disk = Vec::with_capacity(samples.len() + 2);
    disk.push(z1);
    disk.extend(samples);
    disk.push(z2);
    image.push(lift.phi.eval(b));
    Ok(Crosscut {
        n,
        j: j as u32,
        x: [a, b],
        xi,
        geodesic,
        disk,
        length: polyline_length(&image),
        image,
    })
}

pub fn build_crosscuts(
    family: DyadicFamily,
    phi: BoundaryParam,
    map: Arc<RiemannMap>,
) -> Result<CrosscutSystem> {
    build_crosscuts_with(family, phi, map, CrosscutOptions::default())
}

pub fn build_crosscuts_with(
    family: DyadicFamily,
    phi: BoundaryParam,
    map: Arc<RiemannMap>,
    options: CrosscutOptions,
) -> Result<CrosscutSystem> {
    if !(options.step > 0.0 && options.end_eps > 0.0 && options.end_eps < 1.0 && options.contact >= 0.0) {
        return Err(Error::invalid("invalid crosscut sampling options"));
    }
    let lift = Lift { phi: &phi, map: &map };
    let gap = endpoint_gap(&family, &lift, family.n0);
    if gap > endpoint_gap_bound() {
        return Err(Error::invalid(format!(
            "level {} endpoint gap {gap} exceeds 4π/(1+π²)",
            family.n0
        )));
    }
    let ids: Vec<(u32, usize)> = family
        .levels()
        .flat_map(|n| (0..DyadicFamily::arcs_at(n)).map(move |j| (n, j)))
        .collect();
    let crosscuts = ids
        .par_iter()
        .map(|&(n, j)| build_one(&lift, &family, n, j, &options))
        .collect::<Result<Vec<_>>>()?;
    let system = CrosscutSystem {
        family,
        phi,
        map,
        options,
        crosscuts,
    };
    if options.verify {
        check_disjoint(&system)?;
    }
    Ok(system)
}

/// Endpoint key in units of the finest level, so that shared endpoints
/// compare exactly.
fn endpoint_keys(c: &Crosscut, n_max: u32) -> [u64; 2] {
    let scale = 1u64 << (n_max - c.n);
    let m = 1u64 << n_max;
    let k0 = c.j as u64 * scale;
    [k0 % m, (k0 + scale) % m]
}

/// Pairwise crossing test over all polyline segments. Crosscuts sharing a
/// boundary endpoint may touch only on segments whose disk preimages reach
/// into the contact neighborhood of that endpoint.
pub fn check_disjoint(system: &CrosscutSystem) -> Result<()> {
    let cuts = &system.crosscuts;
    let n_max = system.family.n_max;
    let radius = system.options.contact;
    let mut segs = Vec::new();
    // (crosscut, index of the first polyline point of the segment)
    let mut owner: Vec<(u32, u32)> = Vec::new();
    for (ci, c) in cuts.iter().enumerate() {
        for (k, w) in c.image.windows(2).enumerate() {
            if w[0] != w[1] {
                segs.push((SplitPoint::exact(w[0]), SplitPoint::exact(w[1])));
                owner.push((ci as u32, k as u32));
            }
        }
    }
    let keys: Vec<[u64; 2]> = cuts.iter().map(|c| endpoint_keys(c, n_max)).collect();
    let near = |seg: usize, end: usize| {
        let (ci, k) = owner[seg];
        let c = &cuts[ci as usize];
        let target = if end == 0 { c.disk[0] } else { *c.disk.last().unwrap() };
        (c.disk[k as usize] - target).norm() <= radius || (c.disk[k as usize + 1] - target).norm() <= radius
    };
    let hit = find_segment_intersection(&segs, |s, t| {
        let (a, b) = (owner[s].0 as usize, owner[t].0 as usize);
        if a == b || !segments_intersect(segs[s].0, segs[s].1, segs[t].0, segs[t].1) {
            return false;
        }
        for (ea, ka) in keys[a].iter().enumerate() {
            if let Some(eb) = keys[b].iter().position(|kb| kb == ka) {
                if near(s, ea) && near(t, eb) {
                    return false;
                }
            }
        }
        true
    });
    match hit {
        None => Ok(()),
        Some((s, t)) => {
            let (a, b) = (&cuts[owner[s].0 as usize], &cuts[owner[t].0 as usize]);
            Err(Error::CrosscutIntersection {
                first: (a.n, a.j),
                second: (b.n, b.j),
            })
        }
    }
}
