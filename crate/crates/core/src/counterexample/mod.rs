//! Jordan domain whose boundary admits no finite-energy harmonic-type
//! extension: a binary tree of thin fingers hanging over a fat Cantor set.

pub mod assemble;
pub mod finger;
pub mod report;
pub mod svc;
pub mod tree;
pub mod verify;

pub use svc::{build_svc, SvcSet};
pub use tree::{build_tree_curve, CorePiece, Piece, TreeCurve};
pub use finger::{choose_m, offset_finger, verify_offset_distance, width, Finger, OffsetDistanceReport};
pub use assemble::{assemble_domain, AnchorCheck, AnchoredParam, CounterexampleDomain, MAX_ASSEMBLY_DEPTH};
pub use verify::{blowup_report, grid_path_check, verify_integrability, BlowupReport, GridPathCheck, IntegrabilityReport};
pub use report::{counterexample_report, phi_file, CounterexampleReport, PhiFile, ReportOptions};
