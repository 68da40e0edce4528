use super::criterion::{integrate_values, report_from_steps, CriterionReport};
use super::grid::MetricGrid;
use crate::conformal::RiemannMap;
use crate::error::Result;
use crate::geometry::{hyperbolic_dist_disk, Point};
use rayon::prelude::*;

/// Hyperbolic distance of the domain, `h_D(f⁻¹(z), f⁻¹(w))`.
pub fn hyperbolic_dist_via_map(map: &RiemannMap, z: Point, w: Point) -> Result<f64> {
    let a = map.inverse(z)?;
    let b = map.inverse(w)?;
    hyperbolic_dist_disk(a, b)
}

/// Hyperbolic distance from `z0` at every grid node.
pub fn hyperbolic_values(map: &RiemannMap, grid: &MetricGrid, z0: Point) -> Result<Vec<f64>> {
    let a = map.inverse(z0)?;
    (0..grid.len())
        .into_par_iter()
        .map(|k| hyperbolic_dist_disk(a, map.inverse(grid.position(k))?))
        .collect()
}

/// Criterion integral for the hyperbolic distance, on spacing `h` and `h/2`.
pub fn integrate_hyperbolic_criterion(map: &RiemannMap, z0: Point, h: f64, q: f64) -> Result<CriterionReport> {
    let mut steps = Vec::new();
    for spacing in [h, h / 2.0] {
        let grid = MetricGrid::build(map.domain().clone(), spacing)?;
        let values = hyperbolic_values(map, &grid, z0)?;
        steps.push(integrate_values(&grid, &values, q)?);
    }
    Ok(report_from_steps(q, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::compute_riemann_map;
    use crate::geometry::JordanDomain;
    use std::sync::Arc;

    #[test]
    fn disk_radial_closed_form() {
        let v = (0..256)
            .map(|k| Point::from_polar(1.0, std::f64::consts::TAU * k as f64 / 256.0))
            .collect();
        let m = compute_riemann_map(Arc::new(JordanDomain::new(v, 0.1).unwrap()), Point::ORIGIN, 256).unwrap();
        for r in [0.2, 0.5, 0.8] {
            let d = hyperbolic_dist_via_map(&m, Point::ORIGIN, Point::new(r, 0.0)).unwrap();
            let exact = ((1.0 + r) / (1.0 - r)).ln();
            assert!((d - exact).abs() < 2e-3 * exact, "{r}: {d} vs {exact}");
        }
    }
}
