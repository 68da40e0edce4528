//! Dyadic arc families, geodesic crosscuts and the extension built on them.

pub mod dyadic;
pub mod extension;
pub mod lemma;
pub mod param;
pub mod series;
pub mod system;

pub use dyadic::{
    cycle_spacing_bound, endpoint_gap, endpoint_gap_bound, select_n0, Cycle, DyadicFamily, N0Selection, MAX_LEVEL,
};
pub use param::{BoundaryParam, Lift, ParamFile, PARAM_SCHEMA_VERSION};
pub use system::{build_crosscuts, build_crosscuts_with, check_disjoint, Crosscut, CrosscutOptions, CrosscutSystem};
pub use lemma::{lemma21_bound_check, lemma_c1_squared, lemma_constant, zeta, BoundStatus, LemmaReport, RegionMetric};
pub use series::{series_check, LevelTerm, SeriesReport, Verdict, RATIO_LIMIT, SERIES_SCHEMA_VERSION};
pub use extension::{
    build_extension, energy_refinement, sobolev_energy, EnergyRefinement, EnergyReport, ExtensionMesh, ExtensionOptions,
    MeshCell,
};
