use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use super::settings::{born_probability, tomography_settings, Dof, ProjectorSetting};
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, PureStateVector};
use crate::parallel::{map_indexed, mix_seed, Execution};
use crate::states::{kappa_central_slice, subsystem, SourceConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "QST")]
    Qst,
    #[serde(rename = "SET")]
    Set,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Qst => "QST",
            Protocol::Set => "SET",
        }
    }
}

/// Noise description attached to each record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseMeta {
    Qst {
        singles_rate_hz: f64,
        accidental_rate_hz: f64,
        gate_window_s: f64,
    },
    Set {
        relative_intensity_noise: f64,
        background_fraction: f64,
    },
}

/// One projective setting with its observed coincidence count (QST) or
/// stimulated intensity in arbitrary units (SET).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub setting: ProjectorSetting,
    pub value: f64,
    pub duration_s: f64,
    pub noise: NoiseMeta,
}

impl MeasurementRecord {
    pub fn protocol(&self) -> Protocol {
        match self.noise {
            NoiseMeta::Qst { .. } => Protocol::Qst,
            NoiseMeta::Set { .. } => Protocol::Set,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(Error::argument(format!(
                "record {} has non-positive duration",
                self.setting
            )));
        }
        if !(self.value >= 0.0 && self.value.is_finite()) {
            return Err(Error::argument(format!(
                "record {} has invalid value {}",
                self.setting, self.value
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProtocolConfig {
    /// Coincidence rate at the brightest setting.
    pub qst_rate_scale_hz: f64,
    pub qst_duration_per_setting_s: f64,
    /// Coincidence-to-accidental ratio.
    pub car: f64,
    pub gate_window_s: f64,
    pub set_gain: f64,
    pub set_noise_fraction: f64,
    pub set_background_fraction: f64,
    pub rng_seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            qst_rate_scale_hz: 100.0,
            qst_duration_per_setting_s: 16.7,
            car: 100.0,
            gate_window_s: 9e-9,
            set_gain: 1e4,
            set_noise_fraction: 0.01,
            set_background_fraction: 0.0,
            rng_seed: 0,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("qst_rate_scale_hz", self.qst_rate_scale_hz),
            (
                "qst_duration_per_setting_s",
                self.qst_duration_per_setting_s,
            ),
            ("car", self.car),
            ("gate_window_s", self.gate_window_s),
            ("set_gain", self.set_gain),
        ];
        for (name, v) in positive {
            // car = inf is allowed and means no accidentals
            if !(v > 0.0) || v.is_nan() || (v.is_infinite() && name != "car") {
                return Err(Error::argument(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("set_noise_fraction", self.set_noise_fraction),
            ("set_background_fraction", self.set_background_fraction),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::argument(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn accidental_rate_hz(&self) -> f64 {
        self.qst_rate_scale_hz / self.car
    }

    fn qst_noise(&self) -> NoiseMeta {
        let accidental = self.accidental_rate_hz();
        NoiseMeta::Qst {
            // symmetric singles that give the accidental rate R₁R₂τ
            singles_rate_hz: (accidental / self.gate_window_s).sqrt(),
            accidental_rate_hz: accidental,
            gate_window_s: self.gate_window_s,
        }
    }
}

/// Mean coincidence count per setting:
/// `(rate · p / p_max + rate / car) · duration`.
pub fn qst_means(state: &DensityMatrix, cfg: &ProtocolConfig, dof: Dof) -> Result<Vec<f64>> {
    cfg.validate()?;
    let settings = tomography_settings(dof);
    let probs = settings
        .iter()
        .map(|s| born_probability(state, s))
        .collect::<Result<Vec<_>>>()?;
    let p_max = probs.iter().copied().fold(0.0, f64::max);
    if p_max <= 0.0 {
        return Err(Error::degenerate(
            "state has zero probability at every setting",
        ));
    }
    let rate = cfg.qst_rate_scale_hz;
    let t = cfg.qst_duration_per_setting_s;
    Ok(probs
        .iter()
        .map(|p| (rate * p / p_max + cfg.accidental_rate_hz()) * t)
        .collect())
}

/// Records carrying the exact means instead of sampled counts.
pub fn qst_expected_records(
    state: &DensityMatrix,
    cfg: &ProtocolConfig,
    dof: Dof,
) -> Result<Vec<MeasurementRecord>> {
    let means = qst_means(state, cfg, dof)?;
    Ok(tomography_settings(dof)
        .into_iter()
        .zip(means)
        .map(|(setting, value)| MeasurementRecord {
            setting,
            value,
            duration_s: cfg.qst_duration_per_setting_s,
            noise: cfg.qst_noise(),
        })
        .collect())
}

/// Noise-free records with `counts_per_basis · p` at every setting and no
/// accidental background.
pub fn ideal_records(
    state: &DensityMatrix,
    dof: Dof,
    counts_per_basis: f64,
) -> Result<Vec<MeasurementRecord>> {
    tomography_settings(dof)
        .into_iter()
        .map(|setting| {
            Ok(MeasurementRecord {
                setting,
                value: counts_per_basis * born_probability(state, &setting)?,
                duration_s: 1.0,
                noise: NoiseMeta::Qst {
                    singles_rate_hz: 0.0,
                    accidental_rate_hz: 0.0,
                    gate_window_s: 0.0,
                },
            })
        })
        .collect()
}

/// Poisson-sampled coincidence counts for the 36 settings of `dof`.
pub fn simulate_qst(
    state: &DensityMatrix,
    cfg: &ProtocolConfig,
    dof: Dof,
) -> Result<Vec<MeasurementRecord>> {
    let expected = qst_expected_records(state, cfg, dof)?;
    let counts = map_indexed(expected.len(), Execution::Parallel, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.rng_seed, i as u64));
        sample_poisson(expected[i].value, &mut rng)
    });
    Ok(expected
        .into_iter()
        .zip(counts)
        .map(|(r, value)| MeasurementRecord { value, ..r })
        .collect())
}

pub(crate) fn sample_poisson(mean: f64, rng: &mut ChaCha8Rng) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    Poisson::new(mean)
        .expect("finite positive mean")
        .sample(rng)
}

/// Stimulated intensities for the 36 settings of `dof`.
///
/// The seed selects a narrow slice of transverse momentum, so the probed state
/// is the central-`kappa` projection of `full_state` rather than its trace.
pub fn simulate_set(
    full_state: &PureStateVector,
    cfg: &ProtocolConfig,
    dof: Dof,
    source: &SourceConfig,
) -> Result<Vec<MeasurementRecord>> {
    cfg.validate()?;
    let slice = kappa_central_slice(full_state, source)?;
    let reduced = slice.reduced(match dof {
        Dof::Polarization => &subsystem::POLARIZATION,
        Dof::Path => &subsystem::PATH,
    })?;
    let settings = tomography_settings(dof);
    let probs = settings
        .iter()
        .map(|s| born_probability(&reduced, s))
        .collect::<Result<Vec<_>>>()?;
    let background = cfg.set_background_fraction * cfg.set_gain / 4.0;
    let noise = cfg.set_noise_fraction;
    let values = map_indexed(settings.len(), Execution::Parallel, |i| {
        let eps = if noise > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.rng_seed, i as u64));
            Normal::new(0.0, noise)
                .expect("finite sigma")
                .sample(&mut rng)
        } else {
            0.0
        };
        (cfg.set_gain * probs[i] * (1.0 + eps) + background).max(0.0)
    });
    let meta = NoiseMeta::Set {
        relative_intensity_noise: noise,
        background_fraction: cfg.set_background_fraction,
    };
    Ok(settings
        .into_iter()
        .zip(values)
        .map(|(setting, value)| MeasurementRecord {
            setting,
            value,
            // the SET run splits its budget evenly like QST does
            duration_s: cfg.qst_duration_per_setting_s,
            noise: meta,
        })
        .collect())
}
