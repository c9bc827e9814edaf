//! Scalar special functions: reciprocal gamma, Wright function `φ(-β, μ; z)`,
//! `₀F₁(ν; z)` and the Mittag-Leffler function.

pub mod dd;
mod f01;
mod gamma;
mod mittag;
mod table;
mod wright;

pub use f01::{f01, F01Eval};
pub use gamma::{gamma, ln_gamma, ln_recip_gamma, recip_gamma, sin_pi};
pub use mittag::mittag_leffler;
pub use table::WrightTable;
pub use wright::{decay_exponent, leading_asymptotic, WorkingPrecision, WrightEval};

use crate::error::Result;

/// `φ(-cfg.beta, μ; z)`.
pub fn wright_phi(cfg: &WrightEval, mu: f64, z: f64) -> Result<f64> {
    cfg.phi(mu, z)
}

/// `d/dz φ(-cfg.beta, μ; z)`.
pub fn wright_phi_dz(cfg: &WrightEval, mu: f64, z: f64) -> Result<f64> {
    cfg.phi_dz(mu, z)
}
