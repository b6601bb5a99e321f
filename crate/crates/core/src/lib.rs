//! Exact symbolic checks for quantum principal bundles glued from local
//! trivializations: Hopf algebras given by rewrite rules, bundles over
//! covers, gauge transformations and connections.

mod error;
mod memo;
pub mod linalg;
pub mod bundle;
pub mod calculus;
pub mod corpus;
pub mod format;
pub mod gauge;
pub mod hopf;
pub mod ncpoly;
pub mod report;
pub mod scalar;
pub mod suite;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use scalar::{Coeff, Laurent, Monomial};

/// Exact scalars: Laurent polynomials in the deformation parameters with
/// rational coefficients.
pub type Scalar = Laurent<num_rational::BigRational>;
