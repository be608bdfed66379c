//! Interference estimation and avoidance without inter-cell signalling.
//!
//! A base station measures the interference it receives, infers the density
//! of active neighbours from the median of that measurement and extrapolates
//! the interference its users see. It then withholds resource blocks whose
//! predicted SIR cannot support the lowest modulation.

pub mod analytic;
pub mod avoidance;
mod error;
pub mod experiments;
pub mod phy;
pub mod quadrature;
pub mod rng;
pub mod sim;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
