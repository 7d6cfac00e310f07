//! Fidelity, purity, concurrence and tangle of reconstructed states, and the
//! four-row table they are reported in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, pauli, sqrt_psd, DensityMatrix, PureStateVector};
use crate::tomography::Uncertainty;

/// `⟨ψ|ρ|ψ⟩` against a pure target.
pub fn fidelity(rho: &DensityMatrix, target: &PureStateVector) -> Result<f64> {
    if rho.dims() != target.dims() {
        return Err(Error::dims(target.dims(), rho.dims()));
    }
    let a = target.amplitudes();
    Ok(rho.matrix().sandwich(a, a).re.clamp(0.0, 1.0))
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²` between two mixed states.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(Error::dims(rho.dims(), sigma.dims()));
    }
    let s = sqrt_psd(rho.matrix())?;
    let inner = s.matmul(sigma.matrix()).matmul(&s).hermitian_part();
    let root = sqrt_psd(&inner)?;
    Ok(root.trace().re.powi(2).clamp(0.0, 1.0))
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`, with `λᵢ` the descending
/// square roots of the eigenvalues of `ρ ρ̃`, `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::dims(&[2, 2], rho.dims()));
    }
    let yy = pauli::y().kron(&pauli::y());
    let flipped = yy.matmul(&rho.matrix().conj()).matmul(&yy);
    // √ρ ρ̃ √ρ is Hermitian and shares its spectrum with ρ ρ̃
    let s = sqrt_psd(rho.matrix())?;
    let r = s.matmul(&flipped).matmul(&s).hermitian_part();
    let eig = eig_hermitian(&r)?;
    let l: Vec<f64> = eig
        .values
        .iter()
        .map(|&v| {
            if v > -1e-10 {
                v.max(0.0).sqrt()
            } else {
                f64::NAN
            }
        })
        .collect();
    if l.iter().any(|v| v.is_nan()) {
        return Err(Error::domain("negative eigenvalue in concurrence spectrum"));
    }
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

pub fn tangle(rho: &DensityMatrix) -> Result<f64> {
    Ok(concurrence(rho)?.powi(2))
}

pub const ROW_LABELS: [&str; 4] = ["F", "Tr(rho^2)", "tau", "C"];

/// A central value with an optional one-sigma uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std: Option<f64>,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateMetrics {
    pub fidelity: Estimate,
    pub purity: Estimate,
    pub tangle: Estimate,
    pub concurrence: Estimate,
}

impl StateMetrics {
    pub fn compute(rho: &DensityMatrix, target: &PureStateVector) -> Result<Self> {
        let c = concurrence(rho)?;
        Ok(Self {
            fidelity: Estimate::exact(fidelity(rho, target)?),
            purity: Estimate::exact(purity(rho)),
            tangle: Estimate::exact(c * c),
            concurrence: Estimate::exact(c),
        })
    }

    /// Central values from `rho`, spreads from the resampled fits.
    pub fn with_resamples(
        rho: &DensityMatrix,
        target: &PureStateVector,
        resampled: &[DensityMatrix],
    ) -> Result<Self> {
        let mut out = Self::compute(rho, target)?;
        let per_fit = resampled
            .iter()
            .map(|r| Self::compute(r, target))
            .collect::<Result<Vec<_>>>()?;
        let spread = |f: fn(&StateMetrics) -> f64| -> Result<f64> {
            let xs: Vec<f64> = per_fit.iter().map(f).collect();
            Ok(Uncertainty::from_samples(&xs)?.std)
        };
        out.fidelity.std = Some(spread(|m| m.fidelity.value)?);
        out.purity.std = Some(spread(|m| m.purity.value)?);
        out.tangle.std = Some(spread(|m| m.tangle.value)?);
        out.concurrence.std = Some(spread(|m| m.concurrence.value)?);
        Ok(out)
    }

    pub fn rows(&self) -> [(&'static str, Estimate); 4] {
        [
            (ROW_LABELS[0], self.fidelity),
            (ROW_LABELS[1], self.purity),
            (ROW_LABELS[2], self.tangle),
            (ROW_LABELS[3], self.concurrence),
        ]
    }
}

/// Whether a reported `(τ ± στ, C ± σC)` pair satisfies `τ = C²` within the
/// combined one-sigma uncertainty.
pub fn tangle_matches_concurrence(tau: f64, tau_std: f64, c: f64, c_std: f64) -> bool {
    let sigma = (tau_std.powi(2) + (2.0 * c * c_std).powi(2)).sqrt();
    (tau - c * c).abs() <= sigma
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsColumn {
    pub label: String,
    pub metrics: StateMetrics,
}

/// Rows `F, Tr(rho^2), tau, C`; one column per degree of freedom and protocol.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub columns: Vec<MetricsColumn>,
}

impl MetricsTable {
    pub fn push(&mut self, label: impl Into<String>, metrics: StateMetrics) {
        self.columns.push(MetricsColumn {
            label: label.into(),
            metrics,
        });
    }

    pub fn get(&self, label: &str) -> Option<&StateMetrics> {
        self.columns
            .iter()
            .find(|c| c.label == label)
            .map(|c| &c.metrics)
    }

    /// `parameter,<col>,<col>_std,...` with one line per metric.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter");
        for c in &self.columns {
            out.push_str(&format!(",{0},{0}_std", c.label));
        }
        out.push('\n');
        for (row, label) in ROW_LABELS.iter().enumerate() {
            out.push_str(label);
            for c in &self.columns {
                let e = c.metrics.rows()[row].1;
                let std = e.std.map(|s| s.to_string()).unwrap_or_default();
                out.push_str(&format!(",{},{}", e.value, std));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::states::{mixed_state, path_state, pol_state, MixedKind, MixedStateSpec};

    #[test]
    fn bell_metrics() {
        let psi = pol_state(0.0);
        let rho = psi.to_density();
        let m = StateMetrics::compute(&rho, &psi).unwrap();
        assert!((m.fidelity.value - 1.0).abs() < 1e-12);
        assert!((m.purity.value - 1.0).abs() < 1e-12);
        assert!((m.concurrence.value - 1.0).abs() < 1e-6);
        assert!((m.tangle.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn maximally_mixed_metrics() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert!((fidelity(&rho, &pol_state(0.0)).unwrap() - 0.25).abs() < 1e-15);
        assert!((purity(&rho) - 0.25).abs() < 1e-15);
        assert!(concurrence(&rho).unwrap().abs() < 1e-12);
        assert!(tangle(&rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn fidelity_of_visibility_state() {
        for v in [0.0, 0.5, 0.9667, 1.0] {
            let rho = mixed_state(&MixedStateSpec {
                visibility: v,
                phi: 0.0,
                kind: MixedKind::TwoQubitPsi,
            })
            .unwrap();
            let f = fidelity(&rho, &path_state(0.0)).unwrap();
            assert!((f - (1.0 + v) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_ignores_global_phase() {
        let rho = DensityMatrix::new(vec![2, 2], ComplexMatrix::real_diag(&[0.4, 0.3, 0.2, 0.1]))
            .unwrap();
        let psi = pol_state(0.7);
        let amps: Vec<_> = psi
            .amplitudes()
            .iter()
            .map(|a| a * num_complex::Complex64::from_polar(1.0, 2.1))
            .collect();
        let rotated = PureStateVector::new(vec![2, 2], amps).unwrap();
        let a = fidelity(&rho, &psi).unwrap();
        let b = fidelity(&rho, &rotated).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn uhlmann_reduces_to_overlap_for_pure_target() {
        let rho = mixed_state(&MixedStateSpec {
            visibility: 0.8,
            phi: 0.3,
            kind: MixedKind::TwoQubitPsi,
        })
        .unwrap();
        let psi = path_state(0.3);
        let pure = psi.to_density();
        let u = uhlmann_fidelity(&rho, &pure).unwrap();
        assert!((u - fidelity(&rho, &psi).unwrap()).abs() < 1e-8);
        assert!((uhlmann_fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn concurrence_needs_two_qubits() {
        let rho = DensityMatrix::maximally_mixed(vec![2]);
        assert!(concurrence(&rho).is_err());
    }

    #[test]
    fn table_pairs_satisfy_tangle_relation() {
        let pairs = [
            (0.785, 0.005, 0.886, 0.003),
            (0.577, 0.026, 0.759, 0.017),
            (0.779, 0.001, 0.883, 0.001),
            (0.411, 0.022, 0.641, 0.017),
        ];
        for (t, ts, c, cs) in pairs {
            assert!(tangle_matches_concurrence(t, ts, c, cs));
        }
        assert!(!tangle_matches_concurrence(0.5, 0.001, 0.886, 0.001));
    }

    #[test]
    fn table_csv_layout() {
        let mut table = MetricsTable::default();
        let psi = pol_state(0.0);
        table.push(
            "Path QST",
            StateMetrics::compute(&psi.to_density(), &psi).unwrap(),
        );
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "parameter,Path QST,Path QST_std");
        assert!(lines[1].starts_with("F,1"));
        assert_eq!(lines.len(), 5);
    }
}
