//! Simulation and estimation laboratory for the integrated covariance of two
//! continuous semimartingales observed with microstructure noise at
//! endogenous, nonsynchronous sampling times.
//!
//! The crate is organised bottom-up:
//!
//! - [`paths`] simulates the latent bivariate processes on a fine grid,
//! - [`sampling`] turns them into observation epochs and refresh-time designs,
//! - [`noise`] assembles noisy observations,
//! - [`estimators`] holds the pre-averaged Hayashi–Yoshida estimator and its
//!   comparators (MRC, MSRV, RV),
//! - [`inference`] provides kernel constants, spot estimators, the feasible
//!   asymptotic-variance estimator and Studentized statistics,
//! - [`montecarlo`] runs replicated experiments and aggregates tables.

pub mod error;
pub mod estimators;
pub mod inference;
pub mod io;
pub mod montecarlo;
pub mod noise;
pub mod paths;
pub mod quadrature;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use rng::RngSeed;

/// Which of the two assets a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Asset {
    X,
    Y,
}
