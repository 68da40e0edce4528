use super::map::RiemannMap;
use crate::error::Result;
use crate::geometry::hyperbolic_dist_disk;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Sample points farther out than this are excluded.
pub const KOEBE_MAX_RADIUS: f64 = 0.99;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KoebeOptions {
    pub pairs: usize,
    pub seed: u64,
    /// Optional cap on the hyperbolic distance of a pair.
    pub max_distance: Option<f64>,
}

impl Default for KoebeOptions {
    fn default() -> Self {
        Self {
            pairs: 1000,
            seed: 1,
            max_distance: None,
        }
    }
}

/// Outcome of checking `e^{-3h} ≤ |f′(z)|/|f′(w)| ≤ e^{3h}` on random pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KoebeReport {
    pub pairs: usize,
    pub violations: usize,
    /// Smallest value of `3h - |log ratio|` over all pairs (nonnegative when
    /// no pair violates the bound).
    pub min_margin: f64,
    /// Largest `|log ratio| / (3h)` over pairs with `h > 0`.
    pub max_relative_use: f64,
    pub worst_pair: Option<([f64; 2], [f64; 2])>,
}

fn random_disk_point(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * KOEBE_MAX_RADIUS;
        if z.norm() <= KOEBE_MAX_RADIUS {
            return z;
        }
    }
}

/// The two-sided distortion check for a single pair.
pub fn koebe_margin(map: &RiemannMap, z: Complex64, w: Complex64) -> Result<(f64, f64)> {
    let h = hyperbolic_dist_disk(z, w)?;
    if z == w {
        return Ok((0.0, h));
    }
    let lr = (map.derivative_abs(z) / map.derivative_abs(w)).ln().abs();
    Ok((3.0 * h - lr, h))
}

pub fn verify_koebe(map: &RiemannMap, opts: &KoebeOptions) -> Result<KoebeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = KoebeReport {
        pairs: 0,
        violations: 0,
        min_margin: f64::INFINITY,
        max_relative_use: 0.0,
        worst_pair: None,
    };
    while report.pairs < opts.pairs {
        let z = random_disk_point(&mut rng);
        let w = random_disk_point(&mut rng);
        let (margin, h) = koebe_margin(map, z, w)?;
        if let Some(cap) = opts.max_distance {
            if h > cap {
                continue;
            }
        }
        report.pairs += 1;
        if margin < 0.0 {
            report.violations += 1;
        }
        if margin < report.min_margin {
            report.min_margin = margin;
            report.worst_pair = Some(([z.re, z.im], [w.re, w.im]));
        }
        if h > 0.0 {
            report.max_relative_use = report.max_relative_use.max((3.0 * h - margin) / (3.0 * h));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::compute_riemann_map;
    use crate::geometry::{JordanDomain, Point};
    use std::sync::Arc;

    #[test]
    fn identical_points_have_unit_ratio() {
        let v = (0..128)
            .map(|k| Point::from_polar(1.0, std::f64::consts::TAU * k as f64 / 128.0))
            .collect();
        let m = compute_riemann_map(Arc::new(JordanDomain::new(v, 0.1).unwrap()), Point::ORIGIN, 128).unwrap();
        let z = Complex64::new(0.3, 0.2);
        assert_eq!(koebe_margin(&m, z, z).unwrap(), (0.0, 0.0));
        let r = verify_koebe(&m, &KoebeOptions { pairs: 200, ..Default::default() }).unwrap();
        assert_eq!(r.violations, 0);
        // On the disk the ratio is 1 up to discretization.
        assert!(r.max_relative_use < 0.05);
    }
}
