//! Discrimination and certification of von Neumann measurements.
//!
//! - [`qcore`]: dense complex matrices and the channel toolkit on top of them.
//! - [`haar`]: Haar-random unitaries and closed-form Haar-averaged Choi matrices.
//! - [`discrim`]: diamond-norm bounds and the optimal discrimination strategies.
//! - [`protocol`]: outcome-level Monte Carlo simulation of the black-box games.
//! - [`verify`]: the invariant suite behind `vncert verify`.

pub mod discrim;
pub mod error;
pub mod haar;
pub mod protocol;
pub mod qcore;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
