//! Conformal condenser capacities `cap(D, E)` for compact sets `E` in the
//! unit disk `D`, with `E` a hyperbolic polygon or a hyperbolic disk.
//!
//! The crate is split by concern:
//!
//! * [`specfun`]: complete elliptic integrals, the Grötzsch modulus `mu` and
//!   the closed-form capacities built on it.
//! * [`hypgeom`]: hyperbolic geometry of the Poincaré disk, geodesic arcs and
//!   polygon constructors.
//! * [`condenser`]: closed-form capacities of hyperbolic disks, isoarea and
//!   isoperimetric radii, equilateral-triangle capacity bounds.
//! * [`capsolve`]: numerical capacity of `D \ E` by boundary collocation.
//! * [`harness`]: experiment drivers producing serializable report rows.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capsolve;
pub mod condenser;
mod error;
pub mod harness;
pub mod hypgeom;
pub mod specfun;

pub use capsolve::{cap_disk, cap_polygon, solve_capacity, BoundarySet, SolveReport, SolverParams};
pub use error::{Error, Result};
pub use hypgeom::{DiskPoint, GeodesicArc, HypDisk, HypPolygon};
pub use num_complex::Complex64;
