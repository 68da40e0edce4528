use crate::error::{Error, Result};
use serde::Serialize;

/// Deepest construction step; interval widths approach the double spacing
/// beyond it.
pub const MAX_SVC_DEPTH: u32 = 20;

/// Radius `4^{-k}/2` of the open intervals removed at step `k`.
pub fn removed_radius(k: u32) -> f64 {
    0.5 * (-2.0 * k as f64).exp2()
}

/// Smith–Volterra–Cantor construction: step `n` removes an open interval of
/// length `4^{-n}` from the middle of each of the `2^{n-1}` intervals left
/// by step `n - 1`.
#[derive(Debug, Clone, Serialize)]
pub struct SvcSet {
    pub depth: u32,
    /// `intervals[n]` holds the closed intervals `I_{n,1..2^n}`, left to right.
    pub intervals: Vec<Vec<[f64; 2]>>,
    /// `centers[k - 1]` holds `R_{k,1..2^{k-1}}`.
    pub centers: Vec<Vec<f64>>,
}

pub fn build_svc(depth: u32) -> Result<SvcSet> {
    if depth > MAX_SVC_DEPTH {
        return Err(Error::invalid(format!(
            "construction depth {depth} exceeds {MAX_SVC_DEPTH}"
        )));
    }
    let mut intervals = vec![vec![[0.0, 1.0]]];
    let mut centers = Vec::new();
    for n in 1..=depth {
        let r = removed_radius(n);
        let prev = intervals.last().unwrap();
        let mut next = Vec::with_capacity(2 * prev.len());
        let mut mids = Vec::with_capacity(prev.len());
        for &[a, b] in prev {
            let c = 0.5 * (a + b);
            next.push([a, c - r]);
            next.push([c + r, b]);
            mids.push(c);
        }
        intervals.push(next);
        centers.push(mids);
    }
    Ok(SvcSet {
        depth,
        intervals,
        centers,
    })
}

impl SvcSet {
    /// `I_{n,j}` with `1 <= j <= 2^n`.
    pub fn interval(&self, n: u32, j: usize) -> [f64; 2] {
        self.intervals[n as usize][j - 1]
    }

    /// `R_{k,j}` with `1 <= j <= 2^{k-1}`.
    pub fn center(&self, k: u32, j: usize) -> f64 {
        self.centers[k as usize - 1][j - 1]
    }

    /// Total length of the intervals removed so far, measured on the
    /// constructed intervals.
    pub fn removed_measure(&self) -> f64 {
        let kept: f64 = self.intervals[self.depth as usize]
            .iter()
            .map(|[a, b]| b - a)
            .sum();
        1.0 - kept
    }

    /// `Σ_{n <= depth} 2^{n-1} 4^{-n}`.
    pub fn removed_measure_formula(depth: u32) -> f64 {
        (1..=depth).map(|n| (-(n as f64) - 1.0).exp2()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_matches_lengths() {
        let s = build_svc(1).unwrap();
        assert_eq!(s.interval(1, 1), [0.0, 0.375]);
        assert_eq!(s.interval(1, 2), [0.625, 1.0]);
        assert_eq!(s.center(1, 1), 0.5);
        assert_eq!(build_svc(0).unwrap().intervals, vec![vec![[0.0, 1.0]]]);
    }

    #[test]
    fn interval_lengths_follow_closed_form() {
        let s = build_svc(12).unwrap();
        for n in 0..=12u32 {
            let expect = (1.0 + (-(n as f64)).exp2()) / (n as f64 + 1.0).exp2();
            for (j, &[a, b]) in s.intervals[n as usize].iter().enumerate() {
                assert!((b - a - expect).abs() < 1e-15, "n={n} j={j}");
                if j > 0 {
                    assert!(a > s.intervals[n as usize][j - 1][1]);
                }
            }
        }
        assert!(build_svc(21).is_err());
    }

    #[test]
    fn removed_measure_tends_to_half() {
        for d in [1, 5, 20] {
            let s = build_svc(d).unwrap();
            assert!((s.removed_measure() - SvcSet::removed_measure_formula(d)).abs() < 1e-12);
        }
        assert!((SvcSet::removed_measure_formula(20) - 0.5).abs() < 1e-6);
    }
}
