//! Closed-form second and third moments of the generalized Rosenblatt
//! distribution, with numerical oracles and table/plot generation.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the `*F64`
//! aliases below name the double-precision instantiations used by the CLI.

pub mod error;
pub mod moments;
pub mod oracle;
pub mod params;
pub mod plot;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod sum;
pub mod tables;
pub mod verify;

pub use error::{Error, Result};
pub use moments::{mu2, mu3, normalization_a, report, standardized_m3, MomentReport};
pub use params::{enumerate_sigma, Amplitude, GammaPair, SigmaIndex, SigmaVector};
pub use quadrature::{QuadratureConfig, Scheme};
pub use scalar::Real;
pub use special::{beta, log_beta, log_gamma, PositiveReal};
pub use sum::{compensated_sum, CompensatedSum};

pub type GammaPairF64 = GammaPair<f64>;
pub type AmplitudeF64 = Amplitude<f64>;
pub type MomentReportF64 = MomentReport<f64>;
pub type QuadratureConfigF64 = QuadratureConfig<f64>;
