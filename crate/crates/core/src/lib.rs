//! Products of random elements of spherical classes in rank-one symmetric
//! pairs: analytic densities, Haar samplers, Monte Carlo comparisons and
//! Plancherel mixing sums.

pub mod densities;
pub mod error;
pub mod haar;
pub mod linalg;
pub mod montecarlo;
pub mod pairs;
pub mod plancherel;
pub mod quadrature;
pub mod stats;
pub mod tolerance;

pub use error::{Error, Result};
