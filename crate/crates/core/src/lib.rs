//! Conformal densities and distances on catalog plane domains: hyperbolic,
//! Hurwitz, generalized Hurwitz and quasihyperbolic, with certified bounds
//! where no closed form is known.

pub mod bounds;
pub mod contraction;
pub mod covering;
pub mod density;
pub mod domain;
pub mod error;
pub mod exec;
pub mod geodesic;
pub mod geometry;
pub mod sampling;
pub mod verify;

pub use domain::{DomainClass, DomainSpec};
pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{cpoint, CPoint, MobiusMap, Polyline};
