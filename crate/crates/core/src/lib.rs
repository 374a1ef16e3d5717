//! Decides which classifiable C*-algebras have approximately inner flip from
//! their K-theory, computes K-theory of tensor products with the Künneth
//! formula, and organizes the resulting catalog as a tensor semigroup.
//!
//! Every closed-form rule for tensor products and `Tor` is backed by an
//! independent exact computation over finitely generated abelian groups
//! (see [`fgoracle`]).

pub mod abgroup;
pub mod classify;
pub mod error;
pub mod expr;
pub mod fgoracle;
pub mod kunneth;
pub mod selfcheck;
pub mod semigroup;
pub mod supernatural;
mod text;

pub use abgroup::{AbGroup, Atom};
pub use classify::{AdmissibleShape, CatalogEntry, Variant};
pub use error::{Error, Result};
pub use expr::{Expr, Report};
pub use kunneth::{FlipVerdict, GradedKTheory, KunnethResult, Violation, ViolationKind};
pub use supernatural::{Exponent, Prime, PrimeSet, SetOp, Supernatural};
