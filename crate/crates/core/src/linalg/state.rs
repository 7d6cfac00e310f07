use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::eigen::{eig_hermitian, PSD_CLAMP_TOL};
use super::matrix::{kron_vec, ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Normalization tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-12;
/// Hermiticity and trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

/// Normalized amplitude vector over a tensor-product basis with subsystem
/// dimensions `dims` (first subsystem most significant).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureStateVector {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl PureStateVector {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm = l2(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::argument(format!(
                "state vector has norm {norm}, expected 1"
            )));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(dims: Vec<usize>, mut amplitudes: Vec<C64>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm = l2(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::degenerate("cannot normalize a zero vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { dims, amplitudes })
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let n = dims.iter().product();
        if index >= n {
            return Err(Error::argument(format!(
                "basis index {index} out of range {n}"
            )));
        }
        let mut amps = vec![ZERO; n];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::dims(&self.dims, &other.dims));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// Reduced density matrix on `keep`, computed directly from the amplitudes
    /// so the full `D x D` projector is never formed.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let split = Split::new(&self.dims, keep)?;
        let mut out = ComplexMatrix::zeros(split.keep_dim, split.keep_dim);
        for group in &split.groups {
            for &(ki, i) in group {
                let a = self.amplitudes[i];
                if a == ZERO {
                    continue;
                }
                for &(kj, j) in group {
                    out[(ki, kj)] += a * self.amplitudes[j].conj();
                }
            }
        }
        Ok(DensityMatrix {
            dims: split.keep_dims,
            matrix: out,
        })
    }
}

/// Hermitian, PSD, unit-trace operator over a labeled tensor-product space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and numerical positivity.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        let d: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::argument("subsystem dimensions must be positive"));
        }
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::argument(format!(
                "dims {dims:?} need a {d}x{d} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_hermitian(DENSITY_TOL) {
            return Err(Error::argument("density matrix is not Hermitian"));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::argument(format!("density matrix has trace {tr}")));
        }
        let min = eig_hermitian(&matrix)?
            .values
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -PSD_CLAMP_TOL {
            return Err(Error::domain(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { dims, matrix })
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self {
            dims,
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// `Tr[ρ O]`.
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        self.matrix.trace_product(op)
    }

    pub fn unitary_conjugate(&self, u: &ComplexMatrix) -> Self {
        Self {
            dims: self.dims.clone(),
            matrix: self.matrix.conjugate_by(u).hermitian_part(),
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        partial_trace(self, keep)
    }
}

pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for ComplexMatrix {
    fn tensor(&self, other: &Self) -> Self {
        self.kron(other)
    }
}

impl Tensor for PureStateVector {
    fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Reduced state on the subsystems in `keep`; kept subsystems retain their
/// original relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let split = Split::new(&rho.dims, keep)?;
    let m = &rho.matrix;
    let mut out = ComplexMatrix::zeros(split.keep_dim, split.keep_dim);
    for group in &split.groups {
        for &(ki, i) in group {
            for &(kj, j) in group {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(DensityMatrix {
        dims: split.keep_dims,
        matrix: out,
    })
}

/// Full-space indices grouped by their traced-out multi-index; each entry
/// carries the kept multi-index alongside the full index.
struct Split {
    keep_dims: Vec<usize>,
    keep_dim: usize,
    groups: Vec<Vec<(usize, usize)>>,
}

impl Split {
    fn new(dims: &[usize], keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::argument(
                "partial trace needs at least one kept subsystem",
            ));
        }
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        if keep.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::argument("duplicate subsystem index in keep set"));
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
            return Err(Error::argument(format!(
                "subsystem index {bad} out of range for {} subsystems",
                dims.len()
            )));
        }
        let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
        let keep_dim: usize = keep_dims.iter().product();
        let total: usize = dims.iter().product();
        let rest_dim = total / keep_dim;
        let mut groups = vec![Vec::with_capacity(keep_dim); rest_dim];
        let mut digits = vec![0usize; dims.len()];
        for full in 0..total {
            let (mut ki, mut ri) = (0, 0);
            for (s, &digit) in digits.iter().enumerate() {
                if keep.binary_search(&s).is_ok() {
                    ki = ki * dims[s] + digit;
                } else {
                    ri = ri * dims[s] + digit;
                }
            }
            groups[ri].push((ki, full));
            // increment mixed-radix counter, last subsystem fastest
            for s in (0..dims.len()).rev() {
                digits[s] += 1;
                if digits[s] < dims[s] {
                    break;
                }
                digits[s] = 0;
            }
        }
        Ok(Self {
            keep_dims,
            keep_dim,
            groups,
        })
    }
}

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::argument("subsystem dimensions must be positive"));
    }
    let expected: usize = dims.iter().product();
    if expected != len {
        return Err(Error::argument(format!(
            "dims {dims:?} need {expected} amplitudes, got {len}"
        )));
    }
    Ok(())
}

fn l2(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}
