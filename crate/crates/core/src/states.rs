//! Constructors for the source states: the ideal hyperentangled pair, the
//! `kappa`-extended pair whose polarization is correlated with transverse
//! momentum inside the mask apertures, and the visibility-parametrized mixed
//! states.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{tensor, ComplexMatrix, DensityMatrix, PureStateVector};

/// Subsystem indices in the canonical order.
pub mod subsystem {
    pub const POL1: usize = 0;
    pub const POL2: usize = 1;
    pub const PATH1: usize = 2;
    pub const PATH2: usize = 3;
    pub const KAPPA1: usize = 4;
    pub const KAPPA2: usize = 5;

    pub const POLARIZATION: [usize; 2] = [POL1, POL2];
    pub const PATH: [usize; 2] = [PATH1, PATH2];
}

pub const DEFAULT_KAPPA_BINS: usize = 21;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KappaProfile {
    #[default]
    Uniform,
    /// Gaussian in aperture units, centred on the hole.
    Gaussian { sigma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    #[serde(rename = "phi_rad", default)]
    pub phi: f64,
    #[serde(rename = "theta_rad", default)]
    pub theta: f64,
    #[serde(default = "default_bins")]
    pub kappa_bins: usize,
    /// Phase gradient α across the aperture, radians per unit `kappa`.
    #[serde(rename = "kappa_phase_gradient_rad", default)]
    pub kappa_phase_gradient: f64,
    #[serde(default)]
    pub kappa_weight_profile: KappaProfile,
}

fn default_bins() -> usize {
    DEFAULT_KAPPA_BINS
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            phi: 0.0,
            theta: 0.0,
            kappa_bins: DEFAULT_KAPPA_BINS,
            kappa_phase_gradient: 0.0,
            kappa_weight_profile: KappaProfile::Uniform,
        }
    }
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kappa_bins == 0 {
            return Err(Error::argument("kappa_bins must be at least 1"));
        }
        for (name, v) in [
            ("phi", self.phi),
            ("theta", self.theta),
            ("kappa_phase_gradient", self.kappa_phase_gradient),
        ] {
            if !v.is_finite() {
                return Err(Error::argument(format!("{name} must be finite")));
            }
        }
        if let KappaProfile::Gaussian { sigma } = self.kappa_weight_profile {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::argument("gaussian sigma must be positive"));
            }
        }
        Ok(())
    }

    /// Bin-centre coordinates in `[-1/2, 1/2]`; a single bin sits at 0.
    pub fn kappa_coordinates(&self) -> Vec<f64> {
        let k = self.kappa_bins;
        (0..k).map(|i| (i as f64 + 0.5) / k as f64 - 0.5).collect()
    }

    /// Normalized probability weight of each bin (sums to 1).
    pub fn kappa_weights(&self) -> Vec<f64> {
        let raw: Vec<f64> = match self.kappa_weight_profile {
            KappaProfile::Uniform => vec![1.0; self.kappa_bins],
            KappaProfile::Gaussian { sigma } => self
                .kappa_coordinates()
                .iter()
                .map(|x| (-x * x / (2.0 * sigma * sigma)).exp())
                .collect(),
        };
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    pub fn central_bin(&self) -> Result<usize> {
        if self.kappa_bins.is_multiple_of(2) {
            return Err(Error::argument(format!(
                "kappa_bins = {} has no central bin",
                self.kappa_bins
            )));
        }
        Ok(self.kappa_bins / 2)
    }
}

/// `(|HH> + e^{iφ}|VV>)/√2`.
pub fn pol_state(phi: f64) -> PureStateVector {
    let z = C64::new(0.0, 0.0);
    PureStateVector::new(
        vec![2, 2],
        vec![
            C64::new(FRAC_1_SQRT_2, 0.0),
            z,
            z,
            C64::from_polar(FRAC_1_SQRT_2, phi),
        ],
    )
    .expect("unit norm by construction")
}

/// `(|A B> + e^{iθ}|B A>)/√2` with `A = 0`, `B = 1`.
pub fn path_state(theta: f64) -> PureStateVector {
    let z = C64::new(0.0, 0.0);
    PureStateVector::new(
        vec![2, 2],
        vec![
            z,
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::from_polar(FRAC_1_SQRT_2, theta),
            z,
        ],
    )
    .expect("unit norm by construction")
}

/// Product of polarization and path Bell pairs, dims `[2, 2, 2, 2]`.
pub fn hyper_state(cfg: &SourceConfig) -> Result<PureStateVector> {
    cfg.validate()?;
    if cfg.kappa_bins != 1 {
        return Err(Error::argument(
            "hyper_state needs kappa_bins = 1; use hyper_state_kappa",
        ));
    }
    Ok(tensor(&pol_state(cfg.phi), &path_state(cfg.theta)))
}

/// Pair state with transverse-momentum bins, dims `[2, 2, 2, 2, K, K]`.
///
/// The path factor is exactly [`path_state`]; the polarization/momentum factor is
/// `w(κ)w(κ')(|HH> + e^{i(φ + α(κ+κ'))}|VV>)/√2 ⊗ |κ κ'>` with `w² ` the bin weights.
pub fn hyper_state_kappa(cfg: &SourceConfig) -> Result<PureStateVector> {
    cfg.validate()?;
    let k = cfg.kappa_bins;
    let coords = cfg.kappa_coordinates();
    let amp: Vec<f64> = cfg.kappa_weights().iter().map(|w| w.sqrt()).collect();
    let path = path_state(cfg.theta);

    let mut pol_kappa = vec![C64::new(0.0, 0.0); 4 * k * k];
    for k1 in 0..k {
        for k2 in 0..k {
            let w = amp[k1] * amp[k2] * FRAC_1_SQRT_2;
            let phase = cfg.phi + cfg.kappa_phase_gradient * (coords[k1] + coords[k2]);
            // HH and VV rows of the [pol1, pol2, κ1, κ2] block
            pol_kappa[k1 * k + k2] = C64::new(w, 0.0);
            pol_kappa[3 * k * k + k1 * k + k2] = C64::from_polar(w, phase);
        }
    }

    let mut amplitudes = Vec::with_capacity(16 * k * k);
    for pol in 0..4 {
        for pa in path.amplitudes() {
            for kk in 0..k * k {
                amplitudes.push(pol_kappa[pol * k * k + kk] * pa);
            }
        }
    }
    PureStateVector::normalized(vec![2, 2, 2, 2, k, k], amplitudes)
}

/// Projects both momentum subsystems onto the central bin and renormalizes,
/// returning the `[pol1, pol2, path1, path2]` state seen by a narrowband seed.
pub fn kappa_central_slice(full: &PureStateVector, cfg: &SourceConfig) -> Result<PureStateVector> {
    let k = cfg.kappa_bins;
    if full.dims() != [2, 2, 2, 2, k, k] {
        return Err(Error::dims(&[2, 2, 2, 2, k, k], full.dims()));
    }
    let centre = cfg.central_bin()?;
    let offset = centre * k + centre;
    let slice: Vec<C64> = (0..16)
        .map(|i| full.amplitudes()[i * k * k + offset])
        .collect();
    PureStateVector::normalized(vec![2, 2, 2, 2], slice)
        .map_err(|_| Error::degenerate("state has zero weight in the central kappa bin"))
}

/// Purity of the polarization state after tracing path and momentum.
pub fn traced_polarization_purity(cfg: &SourceConfig) -> Result<f64> {
    Ok(hyper_state_kappa(cfg)?
        .reduced(&subsystem::POLARIZATION)?
        .purity())
}

/// Finds the smallest non-negative phase gradient at which the traced
/// polarization purity drops to `target`.
pub fn calibrate_kappa_gradient(cfg: &SourceConfig, target: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&target) {
        return Err(Error::argument(format!(
            "target purity {target} outside [0.5, 1]"
        )));
    }
    let purity_at = |alpha: f64| {
        let mut c = cfg.clone();
        c.kappa_phase_gradient = alpha;
        traced_polarization_purity(&c)
    };
    if purity_at(0.0)? <= target + 1e-12 {
        return Ok(0.0);
    }
    // bracket the first crossing before bisecting
    let step = 0.05;
    let mut lo = 0.0;
    let mut hi = step;
    while purity_at(hi)? > target {
        lo = hi;
        hi += step;
        if hi > 200.0 * PI {
            return Err(Error::degenerate(format!(
                "polarization purity never reaches {target} for this kappa profile"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if purity_at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedKind {
    OneQubit,
    TwoQubitPsi,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedStateSpec {
    pub visibility: f64,
    pub phi: f64,
    pub kind: MixedKind,
}

/// Closed-form state with interference visibility `V`: the pure superposition
/// mixed with its dephased counterpart, weight `p = 1 - V`.
pub fn mixed_state(spec: &MixedStateSpec) -> Result<DensityMatrix> {
    let v = spec.visibility;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::argument(format!("visibility {v} outside [0, 1]")));
    }
    let coh = C64::from_polar(0.5 * v, -spec.phi);
    let half = C64::new(0.5, 0.0);
    let (dims, m) = match spec.kind {
        MixedKind::OneQubit => {
            let mut m = ComplexMatrix::zeros(2, 2);
            m[(0, 0)] = half;
            m[(1, 1)] = half;
            m[(0, 1)] = coh;
            m[(1, 0)] = coh.conj();
            (vec![2], m)
        }
        MixedKind::TwoQubitPsi => {
            let mut m = ComplexMatrix::zeros(4, 4);
            m[(1, 1)] = half;
            m[(2, 2)] = half;
            m[(1, 2)] = coh;
            m[(2, 1)] = coh.conj();
            (vec![2, 2], m)
        }
    };
    DensityMatrix::new(dims, m)
}
