use super::param::{BoundaryParam, Lift};
use crate::conformal::RiemannMap;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Deepest supported level.
pub const MAX_LEVEL: u32 = 24;

/// Admissible spacing of consecutive cycle points, `2π/(1+π²)`.
pub fn cycle_spacing_bound() -> f64 {
    TAU / (1.0 + PI * PI)
}

/// Admissible chord between lifted endpoints, `4π/(1+π²)`.
pub fn endpoint_gap_bound() -> f64 {
    2.0 * cycle_spacing_bound()
}

/// Arcs `[offset + 2πj/2ⁿ, offset + 2π(j+1)/2ⁿ]` for levels `n0..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicFamily {
    pub n0: u32,
    pub n_max: u32,
    pub offset: f64,
}

impl DyadicFamily {
    pub fn new(n0: u32, n_max: u32, offset: f64) -> Result<Self> {
        if n0 == 0 || n_max < n0 || n_max > MAX_LEVEL || !offset.is_finite() {
            return Err(Error::invalid(format!(
                "invalid dyadic levels {n0}..={n_max} (need 1 <= n0 <= n_max <= {MAX_LEVEL})"
            )));
        }
        Ok(Self { n0, n_max, offset })
    }

    pub fn with_n_max(self, n_max: u32) -> Result<Self> {
        Self::new(self.n0, n_max, self.offset)
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<u32> {
        self.n0..=self.n_max
    }

    pub fn arcs_at(n: u32) -> usize {
        1usize << n
    }

    /// Angle of the `j`-th level-`n` endpoint (not reduced mod 2π).
    pub fn endpoint(&self, n: u32, j: usize) -> f64 {
        self.offset + TAU * j as f64 / Self::arcs_at(n) as f64
    }

    pub fn arc(&self, n: u32, j: usize) -> (f64, f64) {
        (self.endpoint(n, j), self.endpoint(n, j + 1))
    }

    pub fn children(n: u32, j: usize) -> [(u32, usize); 2] {
        [(n + 1, 2 * j), (n + 1, 2 * j + 1)]
    }

    /// Index of the half-open level-`n` arc `[start, end)` holding `theta`.
    /// A point on an endpoint belongs to the arc on its counterclockwise side.
    pub fn arc_index(&self, n: u32, theta: f64) -> usize {
        let m = Self::arcs_at(n);
        let t = self.offset + (theta - self.offset).rem_euclid(TAU);
        let mut j = (((t - self.offset) / TAU * m as f64).floor() as usize).min(m - 1);
        // Settle rounding against the endpoints as `arc` computes them.
        while j > 0 && t < self.endpoint(n, j) {
            j -= 1;
        }
        while j + 1 < m && t >= self.endpoint(n, j + 1) {
            j += 1;
        }
        j
    }

    pub fn total_arcs(&self) -> usize {
        self.levels().map(Self::arcs_at).sum()
    }
}

/// Points on the unit circle in strict counterclockwise order starting from
/// the first one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cycle {
    angles: Vec<f64>,
}

impl Cycle {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.len() < 2 {
            return Err(Error::invalid("a cycle needs at least two points"));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("non-finite cycle angle"));
        }
        let a0 = angles[0];
        let mut prev = 0.0;
        for (k, &a) in angles.iter().enumerate().skip(1) {
            let rel = (a - a0).rem_euclid(TAU);
            if !(rel > prev) {
                return Err(Error::invalid(format!(
                    "cycle point {k} is not in strict counterclockwise order"
                )));
            }
            prev = rel;
        }
        Ok(Self { angles })
    }

    pub fn from_points(points: &[Complex64]) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| (p.norm() - 1.0).abs() > 1e-9) {
            return Err(Error::invalid(format!("cycle point {p} is not on the unit circle")));
        }
        Self::new(points.iter().map(|p| p.arg()).collect())
    }

    /// `k` equally spaced points starting at angle 0.
    pub fn uniform(k: usize) -> Result<Self> {
        Self::new((0..k).map(|j| TAU * j as f64 / k as f64).collect())
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Largest chord between cyclically consecutive points.
    pub fn max_spacing(&self) -> f64 {
        let n = self.angles.len();
        (0..n)
            .map(|k| {
                let d = (self.angles[(k + 1) % n] - self.angles[k]).rem_euclid(TAU);
                2.0 * (0.5 * d).sin().abs()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct N0Selection {
    pub n0: u32,
    /// First level with at most one `y_j` per arc.
    pub separation_level: u32,
    /// `y_j = φ⁻¹(f(P_j))`.
    pub y: Vec<f64>,
    /// Largest chord between lifted images of consecutive level-`n0` endpoints.
    pub max_gap: f64,
    pub family: DyadicFamily,
}

fn separates(family: &DyadicFamily, n: u32, y: &[f64]) -> bool {
    let mut idx: Vec<usize> = y.iter().map(|&t| family.arc_index(n, t)).collect();
    idx.sort_unstable();
    idx.windows(2).all(|w| w[0] != w[1])
}

/// Largest chord `|e^{iξ_{j+1}} - e^{iξ_j}|` over consecutive level-`n`
/// endpoints, `ξ_j = f⁻¹(φ(x_j))`.
pub fn endpoint_gap(family: &DyadicFamily, lift: &Lift, n: u32) -> f64 {
    let m = DyadicFamily::arcs_at(n);
    let xi: Vec<f64> = (0..=m).map(|j| lift.psi(family.endpoint(n, j))).collect();
    xi.windows(2)
        .map(|w| 2.0 * (0.5 * (w[1] - w[0])).sin().abs())
        .fold(0.0, f64::max)
}

/// Chooses the starting level: the first level separating the points
/// `φ⁻¹(f(P_j))`, raised further if needed until consecutive endpoint
/// images are within `4π/(1+π²)`. Fails past `cap`.
pub fn select_n0(
    phi: &BoundaryParam,
    map: &RiemannMap,
    seed_cycle: &Cycle,
    offset: f64,
    cap: u32,
) -> Result<N0Selection> {
    let cap = cap.min(MAX_LEVEL);
    let spacing = seed_cycle.max_spacing();
    if spacing > cycle_spacing_bound() {
        return Err(Error::invalid(format!(
            "cycle spacing {spacing} exceeds 2π/(1+π²)"
        )));
    }
    let y: Vec<f64> = seed_cycle
        .angles()
        .iter()
        .map(|&t| phi.inverse_arclength(map.boundary_arclength(t)))
        .collect();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical {
            iterations: 0,
            residual: f64::NAN,
            reason: "inverse boundary parametrization failed".into(),
        });
    }
    let probe = DyadicFamily::new(1, cap.max(1), offset)?;
    let separation_level = (1..=cap)
        .find(|&n| separates(&probe, n, &y))
        .ok_or_else(|| Error::Numerical {
            iterations: cap as usize,
            residual: f64::NAN,
            reason: format!("no level up to {cap} separates the cycle images"),
        })?;
    let lift = Lift { phi, map };
    let mut n0 = separation_level;
    loop {
        let gap = endpoint_gap(&probe, &lift, n0);
        if gap <= endpoint_gap_bound() {
            return Ok(N0Selection {
                n0,
                separation_level,
                y,
                max_gap: gap,
                family: DyadicFamily::new(n0, n0, offset)?,
            });
        }
        if n0 >= cap {
            return Err(Error::Numerical {
                iterations: n0 as usize,
                residual: gap,
                reason: format!("endpoint gap still above 4π/(1+π²) at level cap {cap}"),
            });
        }
        n0 += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::compute_riemann_map;
    use crate::geometry::{JordanDomain, Point};
    use std::sync::Arc;

    fn disk_map(n: usize) -> RiemannMap {
        let v = (0..n)
            .map(|k| Point::from_polar(1.0, TAU * k as f64 / n as f64))
            .collect();
        let d = Arc::new(JordanDomain::new(v, 0.05).unwrap());
        compute_riemann_map(d, Point::ORIGIN, n).unwrap()
    }

    #[test]
    fn arcs_cover_and_nest() {
        let f = DyadicFamily::new(2, 6, 0.3).unwrap();
        for n in f.levels() {
            let m = DyadicFamily::arcs_at(n);
            let total: f64 = (0..m).map(|j| f.arc(n, j).1 - f.arc(n, j).0).sum();
            assert!((total - TAU).abs() < 1e-12);
            for j in 0..m {
                let (a, b) = f.arc(n, j);
                let [c0, c1] = DyadicFamily::children(n, j);
                assert_eq!(f.arc(c0.0, c0.1).0, a);
                assert_eq!(f.arc(c0.0, c0.1).1, f.arc(c1.0, c1.1).0);
                assert!((f.arc(c1.0, c1.1).1 - b).abs() < 1e-15);
            }
        }
        assert!(DyadicFamily::new(0, 3, 0.0).is_err());
        assert!(DyadicFamily::new(4, 3, 0.0).is_err());
    }

    #[test]
    fn endpoint_ties_go_counterclockwise() {
        let f = DyadicFamily::new(1, 3, 0.0).unwrap();
        assert_eq!(f.arc_index(2, TAU / 4.0), 1);
        assert_eq!(f.arc_index(2, 0.0), 0);
        assert_eq!(f.arc_index(2, TAU - 1e-12), 3);
    }

    #[test]
    fn cycle_validation() {
        assert!(Cycle::new(vec![0.3]).is_err());
        assert!(Cycle::new(vec![0.0, 2.0, 1.0]).is_err());
        assert!(Cycle::new(vec![5.0, 6.0, 0.5]).is_ok());
        assert!(Cycle::from_points(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.9)]).is_err());
        let c = Cycle::uniform(16).unwrap();
        assert!((c.max_spacing() - 2.0 * (PI / 16.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn n0_matches_brute_force_counts() {
        let map = disk_map(256);
        let phi = BoundaryParam::from_map(&map);
        let cycle = Cycle::uniform(16).unwrap();
        let sel = select_n0(&phi, &map, &cycle, 0.0, 20).unwrap();
        // Independent count of points per arc for levels 1..10.
        let fam = DyadicFamily::new(1, 10, 0.0).unwrap();
        let brute = (1..=10u32)
            .find(|&n| {
                (0..1usize << n).all(|j| {
                    let (a, b) = fam.arc(n, j);
                    sel.y.iter().filter(|&&t| t >= a && t < b).count() <= 1
                })
            })
            .unwrap();
        assert_eq!(sel.separation_level, brute);
        assert!(sel.n0 == 4 || sel.n0 == 5, "n0 = {}", sel.n0);
        assert!(sel.max_gap <= endpoint_gap_bound());
    }

    #[test]
    fn coarse_cycle_is_rejected() {
        let map = disk_map(128);
        let phi = BoundaryParam::from_map(&map);
        let cycle = Cycle::uniform(4).unwrap();
        assert!(select_n0(&phi, &map, &cycle, 0.0, 20).is_err());
    }
}
