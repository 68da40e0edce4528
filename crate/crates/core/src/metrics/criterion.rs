use super::field::{quasihyperbolic_field_with, MetricField};
use super::grid::MetricGrid;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Relative refinement difference below which an estimate counts as converged.
pub const CONVERGENCE_TOL: f64 = 0.05;

/// One grid level of a criterion estimate.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RefinementStep {
    pub h: f64,
    pub estimate: f64,
    pub nodes: usize,
    pub unreached: usize,
}

/// Midpoint-rule estimate of the integral of `k(z, z0)^q` over the domain.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CriterionReport {
    pub q: f64,
    /// Coarsest spacing; `refinement` lists the levels in decreasing `h`.
    pub h: f64,
    /// Estimate on the finest level.
    pub estimate: f64,
    pub refinement: Vec<RefinementStep>,
    pub rel_diff: f64,
    pub converged: bool,
}

/// Neumaier-compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::invalid(format!("exponent q must be >= 1, got {q}")));
    }
    Ok(())
}

/// `h² Σ v^q` over the finite node values.
pub fn integrate_values(grid: &MetricGrid, values: &[f64], q: f64) -> Result<RefinementStep> {
    check_q(q)?;
    let h = grid.spacing();
    let s: CompensatedSum = values
        .iter()
        .filter(|v| v.is_finite())
        .map(|&v| v.powf(q))
        .collect();
    let estimate = h * h * s.value();
    if !estimate.is_finite() {
        return Err(Error::Numerical {
            iterations: values.len(),
            residual: f64::INFINITY,
            reason: "criterion sum overflowed".into(),
        });
    }
    Ok(RefinementStep {
        h,
        estimate,
        nodes: values.len(),
        unreached: values.iter().filter(|v| !v.is_finite()).count(),
    })
}

/// Integral of the field to the power `q`, on the field's grid and on a
/// grid of half the spacing.
pub fn integrate_criterion(field: &MetricField, q: f64) -> Result<CriterionReport> {
    check_q(q)?;
    let coarse = integrate_values(field.grid(), field.values(), q)?;
    let h = field.grid().spacing();
    let fine_grid = MetricGrid::build(field.grid().domain().clone(), h / 2.0)?;
    let fine_field = quasihyperbolic_field_with(&fine_grid, field.source(), field.stencil())?;
    let fine = integrate_values(&fine_grid, fine_field.values(), q)?;
    Ok(report_from_steps(q, vec![coarse, fine]))
}

pub fn report_from_steps(q: f64, refinement: Vec<RefinementStep>) -> CriterionReport {
    let n = refinement.len();
    let estimate = refinement[n - 1].estimate;
    let rel_diff = if n >= 2 {
        let prev = refinement[n - 2].estimate;
        (estimate - prev).abs() / estimate.abs().max(f64::MIN_POSITIVE)
    } else {
        f64::NAN
    };
    CriterionReport {
        q,
        h: refinement[0].h,
        estimate,
        converged: rel_diff <= CONVERGENCE_TOL,
        refinement,
        rel_diff,
    }
}
