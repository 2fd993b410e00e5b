//! Independent checks of the closed-form moments: quadrature of the
//! underlying integral identities, the semi-analytic cumulant assembly and a
//! Monte-Carlo estimator.

mod integrals;
pub mod mc;

pub use integrals::*;
