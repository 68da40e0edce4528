use super::system::CrosscutSystem;
use crate::error::{Error, Result};
use crate::metrics::CompensatedSum;
use serde::Serialize;

/// Largest ratio of consecutive level terms accepted as geometric decay.
pub const RATIO_LIMIT: f64 = 0.9;

/// Number of trailing ratios that must stay below the limit.
pub const TRAILING_RATIOS: usize = 3;

pub const SERIES_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelTerm {
    pub n: u32,
    /// `Σ_j ℓ(Γ_{n,j})^p`.
    pub sum_len_p: f64,
    /// `Σ_j ℓ(Γ_{n,j})²`.
    pub sum_len_sq: f64,
    /// `S_n = 2^{(p-2)n} Σ_j ℓ^p`.
    pub term: f64,
    pub cumulative: f64,
    /// `2^{n(p/2-1)} (Σ_j ℓ²)^{p/2}`, which dominates `S_n` by Hölder.
    pub holder_term: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesReport {
    pub schema_version: u32,
    pub p: f64,
    pub n0: u32,
    pub n_max: u32,
    pub levels: Vec<LevelTerm>,
    /// `S_{n+1} / S_n`.
    pub ratios: Vec<f64>,
    pub verdict: Verdict,
    /// Largest of the trailing ratios.
    pub ratio_bound: f64,
    /// Geometric tail `S_{n_max} r / (1 - r)`; infinite unless convergent.
    pub tail_bound: f64,
    pub total_estimate: f64,
    /// `M = max_n Σ_j ℓ²`.
    pub holder_m: f64,
    /// `Σ_{n ≥ n0} 2^{n(p/2-1)} M^{p/2}` in closed form.
    pub holder_bound: f64,
}

pub fn series_check(system: &CrosscutSystem, p: f64) -> Result<SeriesReport> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::invalid(format!("exponent p must lie in [1, 2), got {p}")));
    }
    let fam = system.family();
    let mut levels = Vec::new();
    let mut cumulative = CompensatedSum::default();
    for n in fam.levels() {
        let cuts = system.level(n);
        let sum_len_p: CompensatedSum = cuts.iter().map(|c| c.length.powf(p)).collect();
        let sum_len_sq: CompensatedSum = cuts.iter().map(|c| c.length * c.length).collect();
        let (sum_len_p, sum_len_sq) = (sum_len_p.value(), sum_len_sq.value());
        let term = ((p - 2.0) * n as f64).exp2() * sum_len_p;
        cumulative.add(term);
        levels.push(LevelTerm {
            n,
            sum_len_p,
            sum_len_sq,
            term,
            cumulative: cumulative.value(),
            holder_term: ((0.5 * p - 1.0) * n as f64).exp2() * sum_len_sq.powf(0.5 * p),
        });
    }
    let ratios: Vec<f64> = levels.windows(2).map(|w| w[1].term / w[0].term).collect();
    let (verdict, ratio_bound) = if ratios.len() < TRAILING_RATIOS {
        (Verdict::Inconclusive, f64::NAN)
    } else {
        let tail = &ratios[ratios.len() - TRAILING_RATIOS..];
        let r = tail.iter().copied().fold(0.0, f64::max);
        let verdict = if r <= RATIO_LIMIT {
            Verdict::Convergent
        } else if tail.iter().all(|&x| x >= 1.0) {
            Verdict::Divergent
        } else {
            Verdict::Inconclusive
        };
        (verdict, r)
    };
    let last = levels.last().expect("at least one level").term;
    let tail_bound = if verdict == Verdict::Convergent {
        last * ratio_bound / (1.0 - ratio_bound)
    } else {
        f64::INFINITY
    };
    let holder_m = levels.iter().map(|l| l.sum_len_sq).fold(0.0, f64::max);
    let decay = (0.5 * p - 1.0).exp2();
    let holder_bound = ((0.5 * p - 1.0) * fam.n0 as f64).exp2() * holder_m.powf(0.5 * p) / (1.0 - decay);
    Ok(SeriesReport {
        schema_version: SERIES_SCHEMA_VERSION,
        p,
        n0: fam.n0,
        n_max: fam.n_max,
        total_estimate: cumulative.value() + tail_bound,
        levels,
        ratios,
        verdict,
        ratio_bound,
        tail_bound,
        holder_m,
        holder_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::compute_riemann_map;
    use crate::crosscut::{build_crosscuts, BoundaryParam, DyadicFamily};
    use crate::geometry::{JordanDomain, Point};
    use std::f64::consts::{PI, TAU};
    use std::sync::Arc;

    fn disk_system(n_max: u32) -> CrosscutSystem {
        let v = (0..512)
            .map(|k| Point::from_polar(1.0, TAU * k as f64 / 512.0))
            .collect();
        let d = Arc::new(JordanDomain::new(v, 0.02).unwrap());
        let map = Arc::new(compute_riemann_map(d, Point::ORIGIN, 512).unwrap());
        let phi = BoundaryParam::from_map(&map);
        build_crosscuts(DyadicFamily::new(3, n_max, 0.0).unwrap(), phi, map).unwrap()
    }

    #[test]
    fn disk_terms_match_closed_form() {
        let sys = disk_system(8);
        for p in [1.0, 1.5, 1.9] {
            let r = series_check(&sys, p).unwrap();
            assert_eq!(r.verdict, Verdict::Convergent);
            for l in &r.levels {
                let delta = TAU / (1u64 << l.n) as f64;
                let len = (0.5 * delta).tan() * (PI - delta);
                let exact = ((p - 1.0) * l.n as f64).exp2() * len.powf(p);
                assert!((l.term - exact).abs() < 5e-3 * exact, "p={p} n={} {} vs {exact}", l.n, l.term);
                assert!(l.term <= l.holder_term * (1.0 + 1e-12));
            }
            for w in r.ratios.iter().rev().take(3) {
                assert!((w - 0.5).abs() < 0.03, "ratio {w}");
            }
            let cum: Vec<f64> = r.levels.iter().map(|l| l.cumulative).collect();
            assert!(cum.windows(2).all(|w| w[1] >= w[0]));
            assert!(r.total_estimate.is_finite() && r.holder_bound.is_finite());
        }
    }

    #[test]
    fn short_systems_are_inconclusive() {
        let sys = disk_system(4);
        let r = series_check(&sys, 1.5).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(series_check(&sys, 2.0).is_err());
        assert!(series_check(&sys, 0.5).is_err());
    }
}
