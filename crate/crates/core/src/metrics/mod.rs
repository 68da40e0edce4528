//! Grid quasihyperbolic distance fields, the integrability criterion and
//! hyperbolic distances pulled back through a Riemann map.

pub mod criterion;
pub mod field;
pub mod grid;
pub mod pullback;

pub use criterion::{integrate_criterion, integrate_values, CompensatedSum, CriterionReport, RefinementStep};
pub use field::{quasihyperbolic_field, quasihyperbolic_field_with, segment_cost, MetricField, Stencil};
pub use grid::MetricGrid;
pub use pullback::{hyperbolic_dist_via_map, hyperbolic_values, integrate_hyperbolic_criterion};
