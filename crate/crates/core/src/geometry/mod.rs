//! Planar primitives: points, Jordan polygons, Möbius maps and the exact
//! hyperbolic geometry of the disk and the upper half-plane.

mod bvh;
pub mod exact;
pub mod hyperbolic;
pub mod mobius;
pub mod point;
pub mod polygon;

pub use exact::SplitPoint;
pub use hyperbolic::{disk_geodesic, hyperbolic_dist_disk, hyperbolic_dist_halfplane, DiskGeodesic};
pub use mobius::{disk_automorphism, mobius_for_endpoints, MobiusTransform};
pub use point::Point;
pub use polygon::{DomainFile, JordanDomain, DEFAULT_EPS};
