//! Heavy-tailed loss aggregation under multivariate α-stable models.
//!
//! The crate covers the numerical chain from univariate stable laws to
//! portfolio capital allocation:
//!
//! - [`special`]: complex log-gamma and gamma-modulus bounds
//! - [`foxh`]: Fox H-functions evaluated by Mellin–Barnes contour inversion
//! - [`stable`]: univariate stable laws (density, distribution, sampling)
//! - [`vector`]: stable vectors with discrete spectral measures
//! - [`risk`]: VaR, tail conditional expectation and capital allocation
//! - [`gclt`]: stable approximation of Pareto-factor portfolios
//! - [`mc`]: Monte Carlo estimators used as ground truth

pub mod error;
pub mod foxh;
pub mod gclt;
pub mod mc;

pub mod quad;
pub mod risk;
pub mod rng;
pub mod special;
pub mod stable;
pub mod vector;

pub use error::{Error, Result};
pub use foxh::{ContourSpec, FoxH};
pub use gclt::{ParetoFactor, PortfolioLine, PortfolioModel};

pub use risk::AllocationReport;
pub use stable::StableParams;
pub use vector::{SpectralMeasure, SpectralPoint};
