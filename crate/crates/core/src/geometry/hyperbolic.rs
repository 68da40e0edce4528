use super::mobius::UNIT_TOL;
use super::point::Point;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Hyperbolic distance in the unit disk for the density `2 / (1 - |z|²)`.
pub fn hyperbolic_dist_disk(z: Complex64, w: Complex64) -> Result<f64> {
    for p in [z, w] {
        if !(p.norm() < 1.0) {
            return Err(Error::OutsideDomain {
                x: p.re,
                y: p.im,
                reason: "not in the open unit disk".into(),
            });
        }
    }
    let q = (z - w).norm() / (Complex64::new(1.0, 0.0) - z.conj() * w).norm();
    Ok(2.0 * q.min(1.0).atanh())
}

/// Hyperbolic distance in the upper half-plane for the density `1 / Im z`.
pub fn hyperbolic_dist_halfplane(z: Complex64, w: Complex64) -> Result<f64> {
    for p in [z, w] {
        if !(p.im > 0.0) || !p.re.is_finite() || !p.im.is_finite() {
            return Err(Error::OutsideDomain {
                x: p.re,
                y: p.im,
                reason: "not in the open upper half-plane".into(),
            });
        }
    }
    // arcosh(1 + x) written as 2 asinh(sqrt(x / 2)) to keep precision near 0.
    let s = (z - w).norm() / (2.0 * (z.im * w.im).sqrt());
    Ok(2.0 * s.asinh())
}

/// Hyperbolic geodesic of the unit disk joining two boundary points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiskGeodesic {
    Diameter { from: Point, to: Point },
    Arc {
        from: Point,
        to: Point,
        center: Point,
        radius: f64,
        /// Signed angle swept around `center` going from `from` to `to`.
        sweep: f64,
    },
}

/// Endpoints whose sum is shorter than this are treated as antipodal.
const ANTIPODAL_TOL: f64 = 1e-12;

/// The geodesic from `xi1` to `xi2`.
pub fn disk_geodesic(xi1: Complex64, xi2: Complex64) -> Result<DiskGeodesic> {
    for xi in [xi1, xi2] {
        if (xi.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid(format!("endpoint {xi} is not on the unit circle")));
        }
    }
    if (xi1 - xi2).norm() < UNIT_TOL {
        return Err(Error::invalid("geodesic endpoints coincide"));
    }
    let (from, to) = (Point::from_complex(xi1), Point::from_complex(xi2));
    let sum = xi1 + xi2;
    if sum.norm() < ANTIPODAL_TOL {
        return Ok(DiskGeodesic::Diameter { from, to });
    }
    // Central angle δ between the endpoints; the orthogonal circle has its
    // center on the bisector at distance sec(δ/2) and radius tan(δ/2).
    let delta = (xi2 / xi1).arg().abs();
    let half = 0.5 * delta;
    let dir = sum / sum.norm();
    let center = dir * (1.0 / half.cos());
    let radius = half.tan();
    let a1 = (xi1 - center).arg();
    let a2 = (xi2 - center).arg();
    let mut sweep = a2 - a1;
    if sweep > PI {
        sweep -= 2.0 * PI;
    } else if sweep <= -PI {
        sweep += 2.0 * PI;
    }
    Ok(DiskGeodesic::Arc {
        from,
        to,
        center: Point::from_complex(center),
        radius,
        sweep,
    })
}

impl DiskGeodesic {
    pub fn endpoints(&self) -> (Point, Point) {
        match *self {
            DiskGeodesic::Diameter { from, to } | DiskGeodesic::Arc { from, to, .. } => (from, to),
        }
    }

    /// Euclidean length of the geodesic.
    pub fn length(&self) -> f64 {
        match *self {
            DiskGeodesic::Diameter { .. } => 2.0,
            DiskGeodesic::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Point at parameter `s ∈ [0, 1]`, uniform in arclength.
    pub fn point_at(&self, s: f64) -> Point {
        match *self {
            DiskGeodesic::Diameter { from, to } => from.lerp(to, s),
            DiskGeodesic::Arc {
                from,
                center,
                radius,
                sweep,
                ..
            } => {
                let a0 = (from - center).y.atan2((from - center).x);
                center + Point::from_polar(radius, a0 + s * sweep)
            }
        }
    }

    /// `n + 1` points uniformly spaced in arclength, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        let (from, to) = self.endpoints();
        let mut pts: Vec<Point> = (0..=n).map(|k| self.point_at(k as f64 / n as f64)).collect();
        pts[0] = from;
        pts[n] = to;
        pts
    }

    /// `n + 1` points clustered towards both endpoints (cosine spacing), which
    /// resolves the parts of the geodesic near the unit circle.
    pub fn sample_clustered(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        let (from, to) = self.endpoints();
        let mut pts: Vec<Point> = (0..=n)
            .map(|k| self.point_at(0.5 - 0.5 * (PI * k as f64 / n as f64).cos()))
            .collect();
        pts[0] = from;
        pts[n] = to;
        pts
    }
}
