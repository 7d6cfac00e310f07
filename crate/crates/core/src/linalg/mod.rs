//! Small dense complex linear algebra: matrices, tensor products, partial
//! traces and Hermitian spectral routines.
//!
//! Subsystem order for every composite state in this crate is
//! `[pol1, pol2, path1, path2, kappa1, kappa2]`, with index 1 the photon at
//! wavelength λ₁.

mod eigen;
mod matrix;
mod state;

pub use eigen::{
    clamp_to_density, eig_hermitian, sqrt_psd, HermitianEigen, HERMITIAN_TOL, JACOBI_TOL,
    PSD_CLAMP_TOL, PSD_ERROR_TOL,
};
pub use matrix::{kron_vec, pauli, ComplexMatrix};
pub use state::{
    partial_trace, tensor, DensityMatrix, PureStateVector, Tensor, DENSITY_TOL, NORM_TOL,
};
