use super::zipper::Zipper;
use crate::error::{Error, Result};
use crate::geometry::{DomainFile, JordanDomain, Point};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::Arc;

pub const MIN_BOUNDARY_SAMPLES: usize = 64;

/// Relative tolerance for the normalization and inverse residuals.
pub const RESIDUAL_TOL: f64 = 1e-6;

pub const MAP_SCHEMA_VERSION: u32 = 1;

/// Conformal map `f` of the unit disk onto a polygonal Jordan domain with
/// `f(0) = center`, together with its boundary correspondence.
///
/// The sample starting the boundary table is the first domain vertex and is
/// the image of angle 0.
#[derive(Debug, Clone)]
pub struct RiemannMap {
    domain: Arc<JordanDomain>,
    center: Point,
    n_boundary: usize,
    zipper: Zipper,
    /// Strictly increasing disk angles with the matching boundary arclengths.
    theta: Vec<f64>,
    arclen: Vec<f64>,
    center_residual: f64,
}

/// Serialized form of a map. The interior evaluator is rebuilt from the
/// domain and construction parameters on load; the table is checked against
/// the stored copy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapFile {
    pub schema_version: u32,
    pub domain: DomainFile,
    pub center: [f64; 2],
    pub n_boundary: usize,
    /// Pairs `[angle, arclength]`.
    pub correspondence: Vec<[f64; 2]>,
    pub center_residual: f64,
}

/// Boundary samples with their arclength coordinates; every vertex is kept
/// and the first sample is vertex 0.
fn boundary_samples(domain: &JordanDomain, n: usize) -> (Vec<Point>, Vec<f64>) {
    let step = domain.perimeter() / n as f64;
    let mut pts = Vec::with_capacity(n + domain.len());
    let mut s = Vec::with_capacity(n + domain.len());
    for i in 0..domain.len() {
        let (a, b) = domain.edge(i);
        let len = a.dist(b);
        let pieces = ((len / step).round() as usize).max(1);
        let s0 = domain.vertex_arclength(i);
        for k in 0..pieces {
            let t = k as f64 / pieces as f64;
            pts.push(a.lerp(b, t));
            s.push(s0 + t * len);
        }
    }
    (pts, s)
}

pub fn compute_riemann_map(domain: Arc<JordanDomain>, z0: Point, n_boundary: usize) -> Result<RiemannMap> {
    if n_boundary < MIN_BOUNDARY_SAMPLES {
        return Err(Error::invalid(format!(
            "n_boundary must be at least {MIN_BOUNDARY_SAMPLES}, got {n_boundary}"
        )));
    }
    if !domain.contains(z0) {
        return Err(Error::OutsideDomain {
            x: z0.x,
            y: z0.y,
            reason: "map center must be inside the domain".into(),
        });
    }
    let (pts, arclen) = boundary_samples(&domain, n_boundary);
    let samples: Vec<Complex64> = pts.iter().map(|p| p.to_complex()).collect();
    let zipper = Zipper::build(&samples, z0.to_complex())?;
    let theta = zipper.angles().to_vec();
    for k in 1..theta.len() {
        if !(theta[k] > theta[k - 1]) {
            return Err(Error::Numerical {
                iterations: k,
                residual: theta[k] - theta[k - 1],
                reason: "boundary correspondence is not strictly increasing".into(),
            });
        }
    }
    let center_residual = Point::from_complex(zipper.from_disk(Complex64::new(0.0, 0.0))).dist(z0);
    if !(center_residual <= RESIDUAL_TOL * domain.scale()) {
        return Err(Error::Numerical {
            iterations: samples.len(),
            residual: center_residual,
            reason: "f(0) does not reproduce the center".into(),
        });
    }
    Ok(RiemannMap {
        domain,
        center: z0,
        n_boundary,
        zipper,
        theta,
        arclen,
        center_residual,
    })
}

impl RiemannMap {
    pub fn domain(&self) -> &Arc<JordanDomain> {
        &self.domain
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn n_boundary(&self) -> usize {
        self.n_boundary
    }

    pub fn center_residual(&self) -> f64 {
        self.center_residual
    }

    /// `f(z)` for `|z| < 1`.
    pub fn eval(&self, z: Complex64) -> Point {
        Point::from_complex(self.zipper.from_disk(z))
    }

    /// `f` at many points at once; same values as `eval`, computed faster.
    pub fn eval_many(&self, zs: &[Complex64]) -> Vec<Point> {
        self.zipper.from_disk_many(zs).into_iter().map(Point::from_complex).collect()
    }

    /// `f⁻¹(p)`, checked by mapping back.
    pub fn inverse(&self, p: Point) -> Result<Complex64> {
        let z = self.zipper.to_disk(p.to_complex());
        let back = self.eval(z);
        let residual = back.dist(p);
        if !(residual <= RESIDUAL_TOL * self.domain.scale()) || !(z.norm() < 1.0) {
            return Err(Error::Numerical {
                iterations: 1,
                residual,
                reason: format!("inverse map failed at ({}, {})", p.x, p.y),
            });
        }
        Ok(z)
    }

    /// Inverse without the residual check, for boundary points.
    pub fn inverse_unchecked(&self, p: Point) -> Complex64 {
        self.zipper.to_disk(p.to_complex())
    }

    fn fd_step(z: Complex64) -> f64 {
        1e-5 * (1.0 - z.norm()).max(1e-6)
    }

    /// Real Jacobian `[[∂x f₁, ∂y f₁], [∂x f₂, ∂y f₂]]` by centered differences.
    pub fn jacobian(&self, z: Complex64) -> [[f64; 2]; 2] {
        let h = Self::fd_step(z);
        let dx = (self.eval(z + h) - self.eval(z - h)) * (0.5 / h);
        let ih = Complex64::new(0.0, h);
        let dy = (self.eval(z + ih) - self.eval(z - ih)) * (0.5 / h);
        [[dx.x, dy.x], [dx.y, dy.y]]
    }

    /// `|f′(z)|` by centered differences.
    pub fn derivative_abs(&self, z: Complex64) -> f64 {
        let h = Self::fd_step(z);
        let ih = Complex64::new(0.0, h);
        let dx = self.eval(z + h) - self.eval(z - h);
        let dy = self.eval(z + ih) - self.eval(z - ih);
        // Average the two directional estimates; they agree for conformal f.
        0.25 * (dx.norm() + dy.norm()) / h
    }

    /// `derivative_abs` at many points, batched through `eval_many`.
    pub fn derivative_abs_many(&self, zs: &[Complex64]) -> Vec<f64> {
        let mut probes = Vec::with_capacity(4 * zs.len());
        for &z in zs {
            let h = Self::fd_step(z);
            let ih = Complex64::new(0.0, h);
            probes.extend([z + h, z - h, z + ih, z - ih]);
        }
        let v = self.eval_many(&probes);
        zs.iter()
            .zip(v.chunks_exact(4))
            .map(|(&z, w)| 0.25 * ((w[0] - w[1]).norm() + (w[2] - w[3]).norm()) / Self::fd_step(z))
            .collect()
    }

    /// Correspondence table as `(angle, arclength)` pairs.
    pub fn table(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.theta.iter().copied().zip(self.arclen.iter().copied())
    }

    pub fn table_len(&self) -> usize {
        self.theta.len()
    }

    /// Boundary arclength of the image of the angle `theta`.
    pub fn boundary_arclength(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(TAU);
        let k = self.theta.partition_point(|&a| a <= t) - 1;
        let (t0, s0) = (self.theta[k], self.arclen[k]);
        let (t1, s1) = if k + 1 < self.theta.len() {
            (self.theta[k + 1], self.arclen[k + 1])
        } else {
            (TAU, self.domain.perimeter())
        };
        s0 + (t - t0) / (t1 - t0) * (s1 - s0)
    }

    /// Inverse of `boundary_arclength`.
    pub fn boundary_angle(&self, s: f64) -> f64 {
        let s = s.rem_euclid(self.domain.perimeter());
        let k = self.arclen.partition_point(|&a| a <= s) - 1;
        let (t0, s0) = (self.theta[k], self.arclen[k]);
        let (t1, s1) = if k + 1 < self.arclen.len() {
            (self.theta[k + 1], self.arclen[k + 1])
        } else {
            (TAU, self.domain.perimeter())
        };
        t0 + (s - s0) / (s1 - s0) * (t1 - t0)
    }

    /// Boundary extension of `f` at the unit-circle point with angle `theta`.
    pub fn boundary_image_angle(&self, theta: f64) -> Point {
        self.domain.point_at_arclength(self.boundary_arclength(theta))
    }

    /// Boundary extension of `f` at a unit-circle point.
    pub fn boundary_image(&self, xi: Complex64) -> Point {
        self.boundary_image_angle(xi.arg())
    }

    pub fn to_file(&self) -> MapFile {
        MapFile {
            schema_version: MAP_SCHEMA_VERSION,
            domain: self.domain.to_file(),
            center: [self.center.x, self.center.y],
            n_boundary: self.n_boundary,
            correspondence: self.table().map(|(t, s)| [t, s]).collect(),
            center_residual: self.center_residual,
        }
    }

    pub fn from_file(file: &MapFile) -> Result<Self> {
        if file.schema_version != MAP_SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "unsupported map schema version {}",
                file.schema_version
            )));
        }
        let domain = Arc::new(JordanDomain::from_file(&file.domain)?);
        let map = compute_riemann_map(
            domain,
            Point::new(file.center[0], file.center[1]),
            file.n_boundary,
        )?;
        let same = map.table_len() == file.correspondence.len()
            && map
                .table()
                .zip(&file.correspondence)
                .all(|((t, s), c)| t == c[0] && s == c[1]);
        if !same {
            return Err(Error::invalid(
                "stored correspondence table does not match the rebuilt map",
            ));
        }
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ngon(n: usize) -> Arc<JordanDomain> {
        let v = (0..n)
            .map(|k| Point::from_polar(1.0, TAU * k as f64 / n as f64))
            .collect();
        Arc::new(JordanDomain::new(v, 0.05).unwrap())
    }

    #[test]
    fn disk_map_is_a_rotation() {
        let m = compute_riemann_map(ngon(256), Point::ORIGIN, 256).unwrap();
        for k in 0..32 {
            let z = Complex64::from_polar(0.5, TAU * k as f64 / 32.0);
            assert!((m.eval(z).norm() - 0.5).abs() < 1e-3);
        }
        assert!(m.eval(Complex64::new(0.0, 0.0)).norm() < 1e-9);
        for k in 0..16 {
            let t = TAU * k as f64 / 16.0 + 0.1;
            let p = m.boundary_image_angle(t);
            assert!((p.norm() - 1.0).abs() < 1e-3);
            assert!((p.y.atan2(p.x).rem_euclid(TAU) - t).abs() < 1e-3);
        }
    }

    #[test]
    fn table_nodes_are_reproduced() {
        let m = compute_riemann_map(ngon(128), Point::new(0.2, 0.1), 128).unwrap();
        for (t, s) in m.table().take(20) {
            assert!((m.boundary_arclength(t) - s).abs() < 1e-12);
            assert!((m.boundary_angle(s) - t).abs() < 1e-12);
        }
        assert_eq!(m.boundary_image_angle(0.0), m.domain().vertices()[0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(compute_riemann_map(ngon(64), Point::ORIGIN, 32).is_err());
        assert!(compute_riemann_map(ngon(64), Point::new(2.0, 0.0), 64).is_err());
    }

    #[test]
    fn file_roundtrip() {
        let m = compute_riemann_map(ngon(64), Point::new(0.1, 0.0), 64).unwrap();
        let zs = [Complex64::new(0.2, 0.1), Complex64::new(-0.5, 0.6)];
        for (z, d) in zs.iter().zip(m.derivative_abs_many(&zs)) {
            assert_eq!(d, m.derivative_abs(*z));
        }
        let text = serde_json::to_string(&m.to_file()).unwrap();
        let file: MapFile = serde_json::from_str(&text).unwrap();
        let back = RiemannMap::from_file(&file).unwrap();
        let z = Complex64::new(0.3, -0.2);
        assert_eq!(back.eval(z), m.eval(z));
    }
}
