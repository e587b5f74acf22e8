//! Dissipative Floquet dynamics of a quantum oscillator driven close to
//! triple its eigenfrequency, in scaled rotating-frame units.
//!
//! Modules follow the computation: [`model`] defines g(Q,P) and its fixed
//! points, [`spectrum`] diagonalizes ĝ and builds intrawell Wannier states,
//! [`orbits`] handles the classical intrawell motion and its complex-time
//! structure, [`kinetics`] turns both into transition rates and stationary
//! distributions, and [`bifurcation`] treats the classical damped dynamics
//! near the saddle-node point.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod error;
pub mod kinetics;
pub mod model;
pub mod numerics;
pub mod orbits;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{ModelParams, PhasePoint};
