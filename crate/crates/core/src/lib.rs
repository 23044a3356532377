//! Exact truncated Hahn series over ordered abelian groups, with a
//! workbench for automorphisms of the resulting ordered fields.

pub mod aut;
pub mod cli;
pub mod derivation;
pub mod error;
pub mod group;
pub mod report;
pub mod sample;
pub mod series;
pub mod session;
pub mod syntax;

/// Exact rational numbers used for coefficients and group coordinates.
pub type Rational = num_rational::BigRational;

pub use aut::{ApplyContext, AutClass, Automorphism};
pub use derivation::MonomialDerivation;
pub use error::{Error, Result};
pub use group::{GroupDescriptor, GroupElement};
pub use series::{Precision, Series};
pub use session::SessionConfig;
pub use syntax::Notation;
