use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::data::TomographyData;
use super::linear::linear_inversion_data;
use super::optimize::{bfgs, nelder_mead};
use crate::error::{Error, Result};
use crate::linalg::{clamp_to_density, ComplexMatrix, DensityMatrix};
use crate::measurement::{Dof, MeasurementRecord};

const DIM: usize = 4;
pub const CHOLESKY_PARAMS: usize = DIM * DIM;

/// Lower-triangular `T` with real diagonal, flattened as
/// `[T₀₀, T₁₁, T₂₂, T₃₃, Re T₁₀, Im T₁₀, Re T₂₀, Im T₂₀, ...]` (rows ascending).
/// The state is `ρ = T†T / Tr[T†T]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CholeskyParams(pub Vec<f64>);

fn lower_pairs() -> impl Iterator<Item = (usize, usize)> {
    (1..DIM).flat_map(|i| (0..i).map(move |j| (i, j)))
}

impl CholeskyParams {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.len() != CHOLESKY_PARAMS {
            return Err(Error::argument(format!(
                "expected {CHOLESKY_PARAMS} Cholesky parameters, got {}",
                t.len()
            )));
        }
        if t.iter().any(|v| !v.is_finite()) {
            return Err(Error::argument("Cholesky parameters must be finite"));
        }
        Ok(Self(t))
    }

    pub fn t_matrix(&self) -> ComplexMatrix {
        let mut t = ComplexMatrix::zeros(DIM, DIM);
        for i in 0..DIM {
            t[(i, i)] = C64::new(self.0[i], 0.0);
        }
        for (k, (i, j)) in lower_pairs().enumerate() {
            t[(i, j)] = C64::new(self.0[DIM + 2 * k], self.0[DIM + 2 * k + 1]);
        }
        t
    }

    /// Unnormalized `T†T`.
    pub fn gram(&self) -> ComplexMatrix {
        let t = self.t_matrix();
        t.adjoint().matmul(&t)
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        let g = self.gram();
        let tr = g.trace().re;
        if !(tr > 0.0) {
            return Err(Error::degenerate("Cholesky parameters are all zero"));
        }
        DensityMatrix::new(vec![2, 2], g.scale_real(1.0 / tr).hermitian_part())
    }

    /// Parameters with `T†T = ρ`, via Cholesky of the index-reversed matrix.
    /// `ρ` must be positive definite.
    pub fn from_density(rho: &ComplexMatrix) -> Result<Self> {
        let rev = |i: usize| DIM - 1 - i;
        let flipped = ComplexMatrix::from_fn(DIM, DIM, |i, j| rho[(rev(i), rev(j))]);
        let l = cholesky(&flipped)?;
        // ρ = (J L J)(J L J)†, so T = (J L J)†
        let u = ComplexMatrix::from_fn(DIM, DIM, |i, j| l[(rev(i), rev(j))]);
        let t = u.adjoint();
        let mut p = vec![0.0; CHOLESKY_PARAMS];
        for i in 0..DIM {
            p[i] = t[(i, i)].re;
        }
        for (k, (i, j)) in lower_pairs().enumerate() {
            p[DIM + 2 * k] = t[(i, j)].re;
            p[DIM + 2 * k + 1] = t[(i, j)].im;
        }
        Self::new(p)
    }
}

fn cholesky(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::domain("matrix is not positive definite"));
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LinearInversion,
    Mle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    Bfgs,
    NelderMead,
}

#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub rho: DensityMatrix,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: Method,
    pub optimizer: Option<Optimizer>,
}

#[derive(Clone, Debug)]
pub struct MleOptions {
    pub max_iterations: usize,
    pub gradient_tol: f64,
    pub simplex_tol: f64,
    /// Mixing weight of `I/4` added to the clamped linear-inversion start so
    /// the Cholesky factor exists.
    pub init_mixing: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            gradient_tol: 1e-8,
            simplex_tol: 1e-10,
            init_mixing: 1e-6,
        }
    }
}

/// Poisson log-likelihood `Σ n log μ − μ` (dropping `log n!`) of a state.
pub fn log_likelihood(data: &TomographyData, rho: &ComplexMatrix) -> f64 {
    let mut ll = 0.0;
    for k in 0..data.observed.len() {
        let p = rho.trace_product(&data.projectors[k]).re;
        let mu = data.normalization(k) * p + data.background[k];
        let n = data.observed[k];
        if mu <= 0.0 {
            if n > 0.0 {
                return f64::NEG_INFINITY;
            }
            continue;
        }
        ll += n * mu.ln() - mu;
    }
    ll
}

/// Objective in deviance form, `−(1/N) Σ [n log(μ/n) − μ + n]`, which is ≥ 0
/// and well conditioned near the optimum; plus its gradient in `t`.
struct Objective<'a> {
    data: &'a TomographyData,
    scale: f64,
}

impl Objective<'_> {
    fn eval(&self, t: &[f64], want_grad: bool) -> (f64, Vec<f64>) {
        let params = CholeskyParams(t.to_vec());
        let tm = params.t_matrix();
        let gram = tm.adjoint().matmul(&tm);
        let g = gram.trace().re;
        if !(g > 0.0) {
            return (f64::INFINITY, vec![0.0; CHOLESKY_PARAMS]);
        }
        let d = self.data;
        let mut value = 0.0;
        let mut weights = Vec::with_capacity(d.observed.len());
        let mut probs = Vec::with_capacity(d.observed.len());
        for k in 0..d.observed.len() {
            let p = gram.trace_product(&d.projectors[k]).re / g;
            let norm = d.normalization(k);
            let mu = norm * p + d.background[k];
            let n = d.observed[k];
            if mu <= 0.0 && n > 0.0 {
                return (f64::INFINITY, vec![0.0; CHOLESKY_PARAMS]);
            }
            let term = if n > 0.0 {
                n * (mu / n).ln() - mu + n
            } else {
                -mu
            };
            value -= term;
            probs.push(p);
            weights.push(if mu > 0.0 {
                norm * (n / mu - 1.0)
            } else {
                -norm
            });
        }
        value *= self.scale;
        if !want_grad {
            return (value, Vec::new());
        }
        // dL/dG = (Σ w_s Π_s − (Σ w_s p_s) I) / g
        let c: f64 = weights.iter().zip(&probs).map(|(w, p)| w * p).sum();
        let mut m = ComplexMatrix::identity(DIM).scale_real(-c);
        for (w, proj) in weights.iter().zip(&d.projectors) {
            m = &m + &proj.scale_real(*w);
        }
        let a = tm.matmul(&m.scale_real(1.0 / g));
        let mut grad = vec![0.0; CHOLESKY_PARAMS];
        for i in 0..DIM {
            grad[i] = -2.0 * a[(i, i)].re * self.scale;
        }
        for (k, (i, j)) in lower_pairs().enumerate() {
            grad[DIM + 2 * k] = -2.0 * a[(i, j)].re * self.scale;
            grad[DIM + 2 * k + 1] = -2.0 * a[(i, j)].im * self.scale;
        }
        (value, grad)
    }
}

fn gradient_check(obj: &Objective<'_>, t: &[f64]) -> bool {
    let (_, analytic) = obj.eval(t, true);
    let h = 1e-6;
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..t.len() {
        let mut up = t.to_vec();
        let mut down = t.to_vec();
        up[i] += h;
        down[i] -= h;
        let fd = (obj.eval(&up, false).0 - obj.eval(&down, false).0) / (2.0 * h);
        if !fd.is_finite() {
            return false;
        }
        worst = worst.max((fd - analytic[i]).abs());
        scale = scale.max(fd.abs());
    }
    worst / scale < 1e-4
}

/// Clamped linear inversion, lightly mixed with `I/4`, as Cholesky parameters.
pub fn default_init(data: &TomographyData, mixing: f64) -> Result<CholeskyParams> {
    let li = linear_inversion_data(data);
    let clamped = clamp_to_density(&li)?;
    let mixed = &clamped.scale_real(1.0 - mixing)
        + &ComplexMatrix::identity(DIM).scale_real(mixing / DIM as f64);
    CholeskyParams::from_density(&mixed)
}

pub fn mle_reconstruct(
    records: &[MeasurementRecord],
    init: Option<&CholeskyParams>,
) -> Result<ReconstructionResult> {
    let data = TomographyData::from_records(records)?;
    mle_reconstruct_data(&data, init, &MleOptions::default())
}

pub fn mle_reconstruct_data(
    data: &TomographyData,
    init: Option<&CholeskyParams>,
    opts: &MleOptions,
) -> Result<ReconstructionResult> {
    let total = data.total_observed();
    if !(total > 0.0) {
        return Err(Error::argument("all records have zero counts"));
    }
    let start = match init {
        Some(p) => p.clone(),
        None => default_init(data, opts.init_mixing)?,
    };
    // keep the start at unit trace so the gradient scale is comparable across runs
    let norm = start.gram().trace().re.sqrt();
    let x0: Vec<f64> = start.0.iter().map(|v| v / norm).collect();

    let obj = Objective {
        data,
        scale: 1.0 / total,
    };
    let (minimum, optimizer) = if gradient_check(&obj, &x0) {
        let m = bfgs(
            |t| obj.eval(t, true),
            &x0,
            opts.gradient_tol,
            opts.max_iterations,
        );
        (m, Optimizer::Bfgs)
    } else {
        let m = nelder_mead(
            |t| obj.eval(t, false).0,
            &x0,
            0.1,
            opts.simplex_tol,
            opts.max_iterations,
        );
        (m, Optimizer::NelderMead)
    };

    let rho = CholeskyParams::new(minimum.x)?.density()?;
    let log_likelihood = log_likelihood(data, rho.matrix());
    Ok(ReconstructionResult {
        rho,
        log_likelihood,
        iterations: minimum.iterations,
        converged: minimum.converged,
        method: Method::Mle,
        optimizer: Some(optimizer),
    })
}

/// JSON layout of a reconstruction: matrix entries as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionJson {
    pub method: Method,
    pub dof: Dof,
    pub basis: Vec<String>,
    pub iterations: usize,
    pub converged: bool,
    pub log_likelihood: f64,
    pub seed: Option<u64>,
    pub rho: Vec<Vec<[f64; 2]>>,
}

impl ReconstructionResult {
    pub fn to_json(&self, dof: Dof, seed: Option<u64>) -> ReconstructionJson {
        let m = self.rho.matrix();
        ReconstructionJson {
            method: self.method,
            dof,
            basis: dof.basis_labels().iter().map(|s| s.to_string()).collect(),
            iterations: self.iterations,
            converged: self.converged,
            log_likelihood: self.log_likelihood,
            seed,
            rho: (0..m.rows())
                .map(|i| {
                    (0..m.cols())
                        .map(|j| [m[(i, j)].re, m[(i, j)].im])
                        .collect()
                })
                .collect(),
        }
    }
}

impl ReconstructionJson {
    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let n = self.rho.len();
        let data = self
            .rho
            .iter()
            .flat_map(|row| row.iter().map(|[re, im]| C64::new(*re, *im)))
            .collect();
        ComplexMatrix::from_vec(n, n, data)
    }
}
