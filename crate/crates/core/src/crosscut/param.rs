use crate::conformal::RiemannMap;
use crate::error::{Error, Result};
use crate::geometry::{JordanDomain, Point};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::Arc;

pub const PARAM_SCHEMA_VERSION: u32 = 1;

/// Boundary homeomorphism `φ: ∂D → ∂Ω`, stored as a monotone table of disk
/// angles against boundary arclength (measured from vertex 0) and linear in
/// between. The table is lifted: both columns increase strictly and span
/// less than one turn, and the map continues periodically.
#[derive(Debug, Clone)]
pub struct BoundaryParam {
    domain: Arc<JordanDomain>,
    theta: Vec<f64>,
    arclen: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamFile {
    pub schema_version: u32,
    /// Pairs `[angle, arclength]`.
    pub table: Vec<[f64; 2]>,
}

impl BoundaryParam {
    pub fn from_table(domain: Arc<JordanDomain>, table: &[(f64, f64)]) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::invalid("boundary parametrization table is empty"));
        }
        let perim = domain.perimeter();
        let theta: Vec<f64> = table.iter().map(|t| t.0).collect();
        let arclen: Vec<f64> = table.iter().map(|t| t.1).collect();
        if theta.iter().chain(&arclen).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite entry in parametrization table"));
        }
        for k in 1..table.len() {
            if !(theta[k] > theta[k - 1] && arclen[k] > arclen[k - 1]) {
                return Err(Error::invalid(format!(
                    "parametrization table is not strictly increasing at row {k}"
                )));
            }
        }
        let n = table.len();
        if !(theta[n - 1] - theta[0] < TAU && arclen[n - 1] - arclen[0] < perim) {
            return Err(Error::invalid("parametrization table wraps more than once"));
        }
        Ok(Self {
            domain,
            theta,
            arclen,
        })
    }

    /// Constant-speed parametrization with `φ(1)` at vertex 0.
    pub fn uniform(domain: Arc<JordanDomain>) -> Self {
        Self {
            domain,
            theta: vec![0.0],
            arclen: vec![0.0],
        }
    }

    /// The boundary values of a Riemann map.
    pub fn from_map(map: &RiemannMap) -> Self {
        let (theta, arclen) = map.table().unzip();
        Self {
            domain: map.domain().clone(),
            theta,
            arclen,
        }
    }

    pub fn domain(&self) -> &Arc<JordanDomain> {
        &self.domain
    }

    pub fn table(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.theta.iter().copied().zip(self.arclen.iter().copied())
    }

    /// Lifted arclength `S(θ)`, increasing with `S(θ + 2π) = S(θ) + perimeter`.
    pub fn arclength_lifted(&self, theta: f64) -> f64 {
        let perim = self.domain.perimeter();
        let t0 = self.theta[0];
        let turns = ((theta - t0) / TAU).floor();
        let t = theta - turns * TAU;
        let k = self.theta.partition_point(|&a| a <= t) - 1;
        let (a0, s0) = (self.theta[k], self.arclen[k]);
        let (a1, s1) = if k + 1 < self.theta.len() {
            (self.theta[k + 1], self.arclen[k + 1])
        } else {
            (t0 + TAU, self.arclen[0] + perim)
        };
        s0 + (t - a0) / (a1 - a0) * (s1 - s0) + turns * perim
    }

    /// Inverse of `arclength_lifted`.
    pub fn angle_lifted(&self, s: f64) -> f64 {
        let perim = self.domain.perimeter();
        let s0 = self.arclen[0];
        let turns = ((s - s0) / perim).floor();
        let u = s - turns * perim;
        let k = self.arclen.partition_point(|&a| a <= u) - 1;
        let (b0, a0) = (self.arclen[k], self.theta[k]);
        let (b1, a1) = if k + 1 < self.arclen.len() {
            (self.arclen[k + 1], self.theta[k + 1])
        } else {
            (s0 + perim, self.theta[0] + TAU)
        };
        a0 + (u - b0) / (b1 - b0) * (a1 - a0) + turns * TAU
    }

    /// `φ(e^{iθ})`.
    pub fn eval(&self, theta: f64) -> Point {
        self.domain.point_at_arclength(self.arclength_lifted(theta))
    }

    /// Angle in `[0, 2π)` of `φ⁻¹` at the boundary point with arclength `s`.
    pub fn inverse_arclength(&self, s: f64) -> f64 {
        self.angle_lifted(s).rem_euclid(TAU)
    }

    pub fn to_file(&self) -> ParamFile {
        ParamFile {
            schema_version: PARAM_SCHEMA_VERSION,
            table: self.table().map(|(t, s)| [t, s]).collect(),
        }
    }

    pub fn from_file(domain: Arc<JordanDomain>, file: &ParamFile) -> Result<Self> {
        if file.schema_version != PARAM_SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "unsupported parametrization schema version {}",
                file.schema_version
            )));
        }
        let table: Vec<(f64, f64)> = file.table.iter().map(|r| (r[0], r[1])).collect();
        Self::from_table(domain, &table)
    }
}

/// `ψ = f⁻¹ ∘ φ` as a lifted increasing function of the angle.
pub struct Lift<'a> {
    pub phi: &'a BoundaryParam,
    pub map: &'a RiemannMap,
}

impl Lift<'_> {
    /// Lifted disk angle of `f⁻¹(φ(e^{iθ}))`.
    pub fn psi(&self, theta: f64) -> f64 {
        let perim = self.map.domain().perimeter();
        let s = self.phi.arclength_lifted(theta);
        let turns = (s / perim).floor();
        self.map.boundary_angle(s - turns * perim) + turns * TAU
    }
}
