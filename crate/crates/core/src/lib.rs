//! Gap probabilities of unitary random matrix ensembles.
//!
//! Three independent routes are provided and cross-checked against each other:
//! exact finite-n Hankel determinants ([`orthopoly`]), Fredholm determinants of
//! the sine and Bessel kernels ([`fredholm`]) and Painlevé-derived asymptotic
//! expansions with Barnes-G constants ([`painleve`]). [`coulomb`] holds the
//! Coulomb-fluid approximations and the integral identities they rely on.

pub mod coulomb;
pub mod diff;
pub mod error;
pub mod fredholm;
mod linalg;
pub mod precision;
pub mod quadrature;
pub mod orthopoly;
pub mod painleve;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};
pub use precision::PrecisionContext;
pub use report::ResidualReport;
