//! Numerical lab for alpha-time processes: exact samplers, stable densities,
//! PDE residual checks, exit times and subordinate killed Brownian motion.

pub mod alpha;
pub mod composition;
pub mod density;
pub mod error;
pub mod exit;
pub mod fd;
pub mod lab;
pub mod quad;
pub mod residual;
pub mod rng;
pub mod sampling;
pub mod semigroup;
pub mod skbm;
pub mod stats;

pub use alpha::AlphaIndex;
pub use error::{Error, Result};
