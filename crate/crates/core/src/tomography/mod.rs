//! Two-qubit state reconstruction from 36-setting record sets.
//!
//! [`linear_inversion`] is the direct Pauli-moment estimate; [`mle_reconstruct`]
//! maximizes the Poisson likelihood over a Cholesky parametrization, so its
//! output is always a valid density matrix. Error bars come from
//! [`resample_uncertainty`].

mod data;
mod linear;
mod mle;
mod optimize;
mod resample;

pub use data::TomographyData;
pub use linear::linear_inversion;
pub use mle::{
    default_init, log_likelihood, mle_reconstruct, mle_reconstruct_data, CholeskyParams, Method,
    MleOptions, Optimizer, ReconstructionJson, ReconstructionResult, CHOLESKY_PARAMS,
};
pub use optimize::{bfgs, nelder_mead, Minimum};
pub use resample::{
    resample_reconstructions, resample_records, resample_uncertainty, ResampleOptions, Uncertainty,
    DEFAULT_RESAMPLES,
};
