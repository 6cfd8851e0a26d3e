//! Online chasing of positive bodies in weighted ℓ1.

pub mod adapters;
pub mod body;
pub mod certify;
pub mod error;
pub mod graph;
pub mod harness;
pub mod ledger;
pub mod lp;
pub mod point;
pub mod projection;
pub mod rng;
pub mod rounding;
pub mod stream;
pub mod updates;

pub use error::{Error, Result};
pub use point::{ConstraintKind, FractionalPoint, HalfspaceConstraint};
