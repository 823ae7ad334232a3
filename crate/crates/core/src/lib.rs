//! Wave-propagation analysis of the linear Parareal iteration.
//!
//! For the 1-D advection-diffusion equation `u_t + U u_x = nu u_xx`, a plane
//! wave with wave number `kappa` reduces to a scalar ODE, so every time
//! integrator becomes a complex multiplier per slice. This crate builds the
//! Parareal stability value from those multipliers and derives from it
//!
//! * the error-propagation matrix and its maximum singular value,
//! * the discrete phase speed and amplification factor per iteration,
//! * defect curves and a projected speedup for pipelined Parareal,
//! * a pseudo-spectral Gauss-peak experiment.
//!
//! The `parareal-waves` binary exposes all of these as CSV-producing
//! subcommands; see [`cli`].

// `!(x > 0.0)` style checks also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod gauss_peak;
pub mod linalg;
pub mod parareal;
pub mod propagators;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64;
