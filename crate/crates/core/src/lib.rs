//! Steady-state entanglement of a two-cavity molecular optomechanical system
//! with a spinning resonator, in the linearized Gaussian regime.
//!
//! The pipeline for one parameter point is [`params::normalize`] →
//! [`meanfield::solve_meanfield`] → [`dynamics::build_drift`] →
//! [`stability::is_stable`] → [`lyapunov::solve_lyapunov`] →
//! [`entanglement::log_negativity`]; [`point::evaluate`] runs all of it and
//! [`sweep`] runs it over grids.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod lyapunov;
pub mod meanfield;
pub mod params;
pub mod point;
pub mod stability;
pub mod sweep;

pub use error::{Error, Result};

/// Real 8×8 matrix in the quadrature order (x1, y1, x2, y2, q1, p1, q2, p2).
pub type Mat8 = nalgebra::SMatrix<f64, 8, 8>;
