use super::dyadic::endpoint_gap_bound;
use super::system::CrosscutSystem;
use crate::error::{Error, Result};
use crate::geometry::hyperbolic_dist_disk;
use crate::geometry::point::point_in_polyline;
use crate::geometry::Point;
use crate::metrics::{CompensatedSum, MetricField};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};

/// Fewer interior nodes than this make the region integral inconclusive.
pub const MIN_REGION_NODES: usize = 16;

/// Riemann zeta function for real `s > 1` by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    if !(s > 1.0) {
        return f64::INFINITY;
    }
    const N: usize = 10;
    // B_{2m} / (2m)!
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Rising factorial s (s+1) ... (s+2m-2) times N^{-s-2m+1}.
    let mut fac = s * n.powf(-s - 1.0);
    for (m, b) in B.iter().enumerate() {
        sum += b * fac;
        let k = 2.0 * m as f64;
        fac *= (s + k + 1.0) * (s + k + 2.0) / (n * n);
    }
    sum
}

/// `c₁² = 72π e^{6√2π} / (log 2)^q`.
pub fn lemma_c1_squared(q: f64) -> f64 {
    72.0 * PI * (6.0 * 2f64.sqrt() * PI).exp() / LN_2.powf(q)
}

/// `c(q) = 4 c₁² ζ(q)`.
pub fn lemma_constant(q: f64) -> f64 {
    4.0 * lemma_c1_squared(q) * zeta(q)
}

/// Distance to `f(0)` used inside the region integral.
#[derive(Clone, Copy)]
pub enum RegionMetric<'a> {
    /// Hyperbolic distance, through the inverse Riemann map.
    Hyperbolic,
    /// Quasihyperbolic distance from a field whose source is `f(0)`.
    Quasihyperbolic(&'a MetricField),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Holds,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub n: u32,
    pub j: u32,
    pub q: f64,
    pub xi_gap: f64,
    pub length: f64,
    pub length_sq: f64,
    pub integral: f64,
    pub nodes: usize,
    /// Nodes left out because the inverse map failed there.
    pub skipped: usize,
    pub spacing: f64,
    pub constant: f64,
    /// `ℓ² / ∫ h^q`, the smallest constant the arc needs.
    pub implied_constant: f64,
    pub status: BoundStatus,
}

/// Checks `ℓ(Γ)² ≤ c(q) ∫_Δ h(z, f(0))^q dz` for one crosscut, with `Δ` the
/// region between the crosscut and its boundary arc, sampled on a lattice of
/// spacing `grid_h / 4`.
pub fn lemma21_bound_check(
    system: &CrosscutSystem,
    metric: RegionMetric,
    q: f64,
    arc: (u32, usize),
    grid_h: f64,
) -> Result<LemmaReport> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::invalid(format!("exponent q must exceed 1, got {q}")));
    }
    if !(grid_h > 0.0 && grid_h.is_finite()) {
        return Err(Error::invalid(format!("grid spacing must be positive, got {grid_h}")));
    }
    let (n, j) = arc;
    let cut = system
        .get(n, j)
        .ok_or_else(|| Error::invalid(format!("arc ({n}, {j}) is not in the system")))?;
    let xi_gap = cut.xi_gap();
    if xi_gap > endpoint_gap_bound() {
        return Err(Error::invalid(format!(
            "arc ({n}, {j}) endpoint gap {xi_gap} exceeds 4π/(1+π²)"
        )));
    }
    let region = system.region_boundary(n, j).expect("arc exists");
    let dom = system.phi().domain();
    let spacing = grid_h / 4.0;
    let (origin, _) = dom.bbox();
    let (lo, hi) = region.iter().fold(
        (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(a, b), p| (Point::new(a.x.min(p.x), a.y.min(p.y)), Point::new(b.x.max(p.x), b.y.max(p.y))),
    );
    let i0 = ((lo.x - origin.x) / spacing).ceil() as i64;
    let i1 = ((hi.x - origin.x) / spacing).floor() as i64;
    let j0 = ((lo.y - origin.y) / spacing).ceil() as i64;
    let j1 = ((hi.y - origin.y) / spacing).floor() as i64;
    let map = system.map();
    // Nodes the map cannot pull back (inside the polygon but outside the
    // discretized image, within the boundary sampling error) are dropped.
    // Dropping only lowers the integral, so `Holds` stays certified.
    let rows: Vec<Result<(Vec<f64>, usize)>> = (j0..=j1)
        .into_par_iter()
        .map(|jj| {
            let mut vals = Vec::new();
            let mut skipped = 0;
            for ii in i0..=i1 {
                let p = Point::new(origin.x + ii as f64 * spacing, origin.y + jj as f64 * spacing);
                if !point_in_polyline(p, &region) || !dom.contains(p) {
                    continue;
                }
                let v = match metric {
                    RegionMetric::Hyperbolic => match map.inverse(p) {
                        Ok(z) => hyperbolic_dist_disk(z, Complex64::new(0.0, 0.0))?,
                        Err(Error::Numerical { .. }) => {
                            skipped += 1;
                            continue;
                        }
                        Err(e) => return Err(e),
                    },
                    RegionMetric::Quasihyperbolic(field) => field.value_at(p)?,
                };
                vals.push(v.powf(q));
            }
            Ok((vals, skipped))
        })
        .collect();
    let mut sum = CompensatedSum::default();
    let (mut nodes, mut skipped) = (0, 0);
    for row in rows {
        let (vals, s) = row?;
        skipped += s;
        for v in vals {
            sum.add(v);
            nodes += 1;
        }
    }
    let integral = sum.value() * spacing * spacing;
    let length_sq = cut.length * cut.length;
    let constant = lemma_constant(q);
    let status = if nodes < MIN_REGION_NODES {
        BoundStatus::Inconclusive
    } else if length_sq <= constant * integral {
        BoundStatus::Holds
    } else {
        BoundStatus::Violated
    };
    Ok(LemmaReport {
        n,
        j: j as u32,
        q,
        xi_gap,
        length: cut.length,
        length_sq,
        integral,
        nodes,
        skipped,
        spacing,
        constant,
        implied_constant: length_sq / integral,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::compute_riemann_map;
    use crate::crosscut::{build_crosscuts, BoundaryParam, DyadicFamily};
    use crate::geometry::JordanDomain;
    use std::f64::consts::TAU;
    use std::sync::Arc;

    fn system(scale: f64) -> CrosscutSystem {
        let v = (0..256)
            .map(|k| Point::from_polar(scale, TAU * k as f64 / 256.0))
            .collect();
        let d = Arc::new(JordanDomain::new(v, 0.02).unwrap());
        let map = Arc::new(compute_riemann_map(d, Point::ORIGIN, 256).unwrap());
        let phi = BoundaryParam::from_map(&map);
        build_crosscuts(DyadicFamily::new(3, 4, 0.0).unwrap(), phi, map).unwrap()
    }

    #[test]
    fn zeta_reference_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-13);
        assert!((zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-12);
        assert!(zeta(1.0 + 1e-6) > 1e5);
        assert_eq!(zeta(1.0), f64::INFINITY);
    }

    #[test]
    fn constant_is_huge_and_diverges_at_one() {
        assert!(lemma_constant(2.0) > 1e12);
        assert!(lemma_constant(1.0001) > 1e3 * lemma_constant(2.0));
    }

    #[test]
    fn disk_arcs_satisfy_the_bound() {
        let sys = system(1.0);
        for j in [0, 5, 11] {
            let r = lemma21_bound_check(&sys, RegionMetric::Hyperbolic, 2.0, (4, j), 1.0 / 32.0).unwrap();
            assert_eq!(r.status, BoundStatus::Holds);
            assert!(r.implied_constant < 1e3, "{r:?}");
        }
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let (a, b) = (system(1.0), system(2.0));
        let ra = lemma21_bound_check(&a, RegionMetric::Hyperbolic, 1.5, (4, 3), 1.0 / 32.0).unwrap();
        let rb = lemma21_bound_check(&b, RegionMetric::Hyperbolic, 1.5, (4, 3), 2.0 / 32.0).unwrap();
        assert!((rb.length_sq / ra.length_sq - 4.0).abs() < 1e-3);
        assert!((rb.integral / ra.integral - 4.0).abs() < 0.04);
        assert!((rb.implied_constant / ra.implied_constant - 1.0).abs() < 0.01);
    }

    #[test]
    fn thin_regions_are_inconclusive() {
        let sys = system(1.0);
        let r = lemma21_bound_check(&sys, RegionMetric::Hyperbolic, 2.0, (4, 0), 1.0).unwrap();
        assert_eq!(r.status, BoundStatus::Inconclusive);
        assert!(lemma21_bound_check(&sys, RegionMetric::Hyperbolic, 1.0, (4, 0), 0.1).is_err());
    }
}
