//! Bounded convex domains in C^n and their Euclidean primitives.

mod convex;
mod domain;
pub mod ellipsoid;

pub use convex::{ConvexFamily, ConvexOracle, PowerEllipsoid, UnitaryImage};
pub use domain::{DomainDescriptor, DomainKind, DomainSpec};
pub(crate) use domain::slice_disc;
