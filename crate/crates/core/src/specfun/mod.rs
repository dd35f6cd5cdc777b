//! Special functions and constants: log Γ, incomplete Γ and B, Barnes G,
//! ζ′(−1) and Bessel J.

mod barnes;
mod bessel;
mod gamma;

pub use barnes::{log_barnes_g, zeta_prime_minus_one};
pub use bessel::bessel_j;
pub use gamma::{beta_incomplete, gamma_upper, log_beta, log_gamma};
