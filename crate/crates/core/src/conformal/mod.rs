//! Numerical Riemann maps of polygonal Jordan domains.

pub mod zipper;
pub mod map;

pub use map::{compute_riemann_map, MapFile, RiemannMap};
pub mod koebe;

pub use koebe::{verify_koebe, KoebeOptions, KoebeReport};
