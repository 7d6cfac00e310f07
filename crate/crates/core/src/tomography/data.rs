use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::measurement::{
    tomography_settings, Dof, MeasurementRecord, NoiseMeta, ProjectorSetting, Protocol,
    BASIS_PAIRS, SETTINGS_PER_DOF,
};

/// A complete 36-setting record set arranged in canonical setting order, with
/// the background estimate and per-basis normalization the likelihood needs.
#[derive(Clone, Debug)]
pub struct TomographyData {
    pub dof: Dof,
    pub protocol: Protocol,
    pub settings: Vec<ProjectorSetting>,
    pub projectors: Vec<ComplexMatrix>,
    pub observed: Vec<f64>,
    pub background: Vec<f64>,
    /// Signal normalization of each of the nine basis pairs.
    pub basis_total: [f64; BASIS_PAIRS],
}

impl TomographyData {
    pub fn from_records(records: &[MeasurementRecord]) -> Result<Self> {
        let first = records
            .first()
            .ok_or_else(|| Error::argument("no measurement records"))?;
        let dof = first.setting.dof;
        let protocol = first.protocol();
        let mut slots: Vec<Option<&MeasurementRecord>> = vec![None; SETTINGS_PER_DOF];
        for r in records {
            r.validate()?;
            if r.setting.dof != dof || r.protocol() != protocol {
                return Err(Error::argument(
                    "records mix degrees of freedom or protocols",
                ));
            }
            let slot = &mut slots[r.setting.index()];
            if slot.is_some() {
                return Err(Error::argument(format!(
                    "duplicate record for {}",
                    r.setting
                )));
            }
            *slot = Some(r);
        }
        let missing: Vec<String> = tomography_settings(dof)
            .iter()
            .zip(&slots)
            .filter(|(_, r)| r.is_none())
            .map(|(s, _)| s.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::argument(format!(
                "incomplete setting coverage, missing {}",
                missing.join(", ")
            )));
        }
        let recs: Vec<&MeasurementRecord> = slots.into_iter().flatten().collect();
        let settings: Vec<ProjectorSetting> = recs.iter().map(|r| r.setting).collect();
        let observed: Vec<f64> = recs.iter().map(|r| r.value).collect();

        let mut raw_basis = [0.0; BASIS_PAIRS];
        for (s, n) in settings.iter().zip(&observed) {
            raw_basis[s.basis_pair()] += n;
        }
        let background: Vec<f64> = recs
            .iter()
            .map(|r| match r.noise {
                NoiseMeta::Qst {
                    accidental_rate_hz, ..
                } => accidental_rate_hz * r.duration_s,
                // per-outcome background is a fixed fraction of the mean signal
                NoiseMeta::Set {
                    background_fraction,
                    ..
                } => {
                    background_fraction * raw_basis[r.setting.basis_pair()]
                        / (4.0 * (1.0 + background_fraction))
                }
            })
            .collect();

        let mut basis_total = [0.0; BASIS_PAIRS];
        for ((s, n), a) in settings.iter().zip(&observed).zip(&background) {
            basis_total[s.basis_pair()] += n - a;
        }
        if let Some(b) = basis_total.iter().position(|&t| !(t > 0.0)) {
            return Err(Error::argument(format!(
                "basis pair {b} has no signal counts above background"
            )));
        }
        Ok(Self {
            dof,
            protocol,
            projectors: settings.iter().map(ProjectorSetting::projector).collect(),
            settings,
            observed,
            background,
            basis_total,
        })
    }

    pub fn normalization(&self, setting: usize) -> f64 {
        self.basis_total[self.settings[setting].basis_pair()]
    }

    pub fn total_observed(&self) -> f64 {
        self.observed.iter().sum()
    }
}
