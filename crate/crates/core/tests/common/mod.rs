#![allow(dead_code)]

use jordan_ext::geometry::{JordanDomain, Point};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Regular `n`-gon inscribed in the circle of radius `r` about the origin.
pub fn disk(n: usize, r: f64) -> Arc<JordanDomain> {
    let v = (0..n).map(|k| Point::from_polar(r, TAU * k as f64 / n as f64)).collect();
    Arc::new(JordanDomain::new(v, 0.02).unwrap())
}

/// Axis-parallel rectangle `[-a/2, a/2] × [-b/2, b/2]`.
pub fn rectangle(a: f64, b: f64) -> Arc<JordanDomain> {
    let (x, y) = (0.5 * a, 0.5 * b);
    let v = vec![Point::new(-x, -y), Point::new(x, -y), Point::new(x, y), Point::new(-x, y)];
    Arc::new(JordanDomain::new(v, 0.02).unwrap())
}

pub fn square() -> Arc<JordanDomain> {
    rectangle(2.0, 2.0)
}

/// `[0, 2]² ` minus `(1, 2]²`; the point `(0.5, 0.5)` is well inside.
pub fn l_shape() -> Arc<JordanDomain> {
    let v = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)]
        .into_iter()
        .map(|(x, y)| Point::new(x, y))
        .collect();
    Arc::new(JordanDomain::new(v, 0.02).unwrap())
}
