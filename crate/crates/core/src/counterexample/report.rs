use super::assemble::{AnchorCheck, AnchoredParam, CounterexampleDomain};
use super::finger::{offset_finger, OffsetDistanceReport};
use super::finger::verify_offset_distance;
use super::svc::SvcSet;
use super::verify::{blowup_report, grid_path_check, verify_integrability, BlowupReport, IntegrabilityReport};
use crate::error::Result;
use crate::geometry::Point;
use serde::{Deserialize, Serialize};

/// Branch used for the two-sided distance check; every prefix is a valid
/// branch of the shallower trees.
pub const SAMPLE_BRANCH: [usize; 6] = [2, 3, 6, 11, 22, 43];

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReportOptions {
    pub claim2_samples: usize,
    pub c_star: f64,
    pub claim2_t_max: f64,
    /// Number of model shells evaluated for the integrability check.
    pub model_depth: u32,
    /// Runs the grid shortest-path cross-check of the level-one bound.
    pub grid_check: bool,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            claim2_samples: 10_000,
            c_star: 8.0,
            claim2_t_max: 3.0,
            model_depth: 10,
            grid_check: true,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceCheck {
    pub branch: Vec<usize>,
    #[serde(flatten)]
    pub report: OffsetDistanceReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SvcSummary {
    pub depth: u32,
    pub removed_measure: f64,
    pub closed_form: f64,
    pub abs_error: f64,
    pub limit: f64,
}

/// Every verification of the truncated domain gathered in one place.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub depth: u32,
    pub m: f64,
    pub vertices: usize,
    pub area: f64,
    pub anchors: AnchorCheck,
    pub distance_check: DistanceCheck,
    pub integrability: IntegrabilityReport,
    pub blowup: BlowupReport,
    pub svc: SvcSummary,
    pub cantor_parameter_measure: f64,
}

pub fn counterexample_report(cd: &CounterexampleDomain, opts: &ReportOptions) -> Result<CounterexampleReport> {
    let branch = SAMPLE_BRANCH[..cd.depth as usize].to_vec();
    let finger = offset_finger(&cd.tree, &branch, cd.m)?;
    let distance = verify_offset_distance(&finger, opts.claim2_samples, opts.c_star, opts.claim2_t_max, opts.seed);
    let mut blowup = blowup_report(&cd.tree, cd.m, cd.depth)?;
    if opts.grid_check {
        blowup.grid_check = Some(grid_path_check(cd, None)?);
    }
    let svc = &cd.tree.svc;
    let removed = svc.removed_measure();
    let closed_form = SvcSet::removed_measure_formula(svc.depth);
    Ok(CounterexampleReport {
        depth: cd.depth,
        m: cd.m,
        vertices: cd.points.len(),
        area: cd.domain.area(),
        anchors: cd.check_anchors()?,
        distance_check: DistanceCheck {
            branch,
            report: distance,
        },
        integrability: verify_integrability(cd, None, opts.model_depth)?,
        blowup,
        svc: SvcSummary {
            depth: svc.depth,
            removed_measure: removed,
            closed_form,
            abs_error: (removed - closed_form).abs(),
            limit: 0.5,
        },
        cantor_parameter_measure: cd.cantor_parameter_measure(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PhiAnchor {
    pub u: f64,
    pub angle: f64,
    pub vertex: usize,
    pub x: f64,
    pub y: f64,
    /// Exact low-order part of the vertex.
    pub offset: [f64; 2],
}

/// Boundary parametrization of the truncated domain: piecewise linear in
/// `u ∈ [-1, 2]` between the listed anchors, with `angle = 2π(u + 1)/3`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PhiFile {
    pub depth: u32,
    pub m: f64,
    pub angle_convention: String,
    pub anchors: Vec<PhiAnchor>,
}

pub fn phi_file(cd: &CounterexampleDomain) -> PhiFile {
    let anchors = cd
        .param
        .anchors
        .iter()
        .map(|a| {
            let p = cd.points[a.vertex];
            PhiAnchor {
                u: a.u,
                angle: AnchoredParam::angle(a.u),
                vertex: a.vertex,
                x: p.hi.x,
                y: p.hi.y,
                offset: [p.lo.x, p.lo.y],
            }
        })
        .collect();
    PhiFile {
        depth: cd.depth,
        m: cd.m,
        angle_convention: "angle = 2*pi*(u + 1)/3, u in [-1, 2]".into(),
        anchors,
    }
}

/// Rounded outline for plotting.
pub fn outline(cd: &CounterexampleDomain) -> Vec<Point> {
    cd.points.iter().map(|p| p.rounded()).collect()
}

#[cfg(test)]
mod tests {
    use super::super::assemble::assemble_domain;
    use super::*;

    #[test]
    fn shallow_report_is_consistent() {
        let cd = assemble_domain(3, None).unwrap();
        let opts = ReportOptions {
            claim2_samples: 500,
            grid_check: false,
            ..Default::default()
        };
        let r = counterexample_report(&cd, &opts).unwrap();
        assert_eq!(r.distance_check.branch, vec![2, 3, 6]);
        assert!(r.anchors.left_chain && r.anchors.right_chain && r.anchors.interior && r.anchors.top_closes);
        assert!(r.svc.abs_error < 1e-12);
        assert_eq!(r.blowup.increment, 1.0);
        let phi = phi_file(&cd);
        assert_eq!(phi.anchors.first().unwrap().u, -1.0);
        assert!(phi.anchors.windows(2).all(|w| w[0].u < w[1].u));
    }
}
