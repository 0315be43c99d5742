//! Spectral data of the Dirichlet perturbed Stark operator
//! `H_q = -d²/dx² + x + q(x)` on the half-line.

pub mod airy;
pub mod asymptotics;
pub mod basis;
pub mod error;
pub mod experiment;
pub mod oracle;
pub mod potential;
pub mod quad;
pub mod spectrum;
pub mod volterra;

pub use error::{Error, Result};
