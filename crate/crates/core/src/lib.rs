//! Concentrating solutions of `(-Δ)^m u = ρ^{2m} V e^u` on bounded domains of `R^{2m}`:
//! Green functions, bubble ansatz, reduced energies, the projected linear theory and
//! the finite-dimensional reduction.
//!
//! Scalar-generic building blocks take `T: Real`; the aliases below fix `T = f64`.

pub mod bubbles;
pub mod config;
pub mod constants;
pub mod domain;
pub mod error;
pub mod greens;
pub mod grid;
pub mod jet;
pub mod linalg;
pub mod linearized;
pub mod mesh;
pub mod norms;
pub mod potential;
pub mod quadrature;
pub mod reduced;
pub mod reduction;
pub mod report;
pub mod scalar;
pub mod search;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Constants = constants::Constants<f64>;
pub type Constants32 = constants::Constants<f32>;

/// `f64` constants for order `m`.
pub fn constants(m: i64) -> Result<Constants> {
    constants::constants_for(m)
}

/// Library version.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
