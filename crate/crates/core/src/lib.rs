//! Pseudospectral Zakharov-Kuznetsov solver on the cylinder `ℝ × 𝕋_λ`,
//! with I-method diagnostics and numerical probes of bilinear estimates.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod functionals;
pub mod multipliers;
pub mod spectral;
pub mod symbols;

pub use error::{Result, ZkError};
