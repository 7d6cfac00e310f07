//! Simulation and reconstruction toolkit for path/polarization hyperentangled
//! photon pairs, comparing coincidence-counting tomography (QST) with
//! stimulated-emission tomography (SET).
//!
//! The crate covers state construction (including the transverse-momentum
//! `kappa` model that degrades polarization purity), measurement simulation for
//! both protocols, maximum-likelihood reconstruction with resampled error bars,
//! the entanglement metrics reported per degree of freedom, and beam-splitter
//! visibility bounds on purity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod measurement;
pub mod metrics;
pub mod parallel;
pub mod pipeline;
pub mod states;
pub mod tomography;
pub mod visibility;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, PureStateVector};
