//! Complex Finsler, Bergman, Kobayashi and Carathéodory metrics on bounded
//! convex domains in C^n, with numerical checks of the curvature and
//! comparison inequalities relating them.

pub mod bergman;
pub mod directions;
pub mod equivalence;
pub mod error;
pub mod finsler;
pub mod geometry;
pub mod invariant;
pub mod jet;
pub mod kahler;
pub mod metric_spec;
pub mod optim;
pub mod point;
pub mod quadrature;
pub mod sampling;
pub mod squeezing;

pub use error::{Error, Result};
pub use geometry::{DomainKind, DomainSpec};
pub use point::{CPoint, CTangent, C64};
