//! CSV and JSON encodings of measurement records.
//!
//! Both formats use the same flat row layout. Floats are written in shortest
//! round-trip form, so decoding reproduces every record bit for bit.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::settings::{Dof, Eigenstate, ProjectorSetting};
use super::simulate::{MeasurementRecord, NoiseMeta, Protocol};
use crate::error::{Error, Result};

pub const CSV_PREAMBLE: &str = "# basis: polarization alphabet H,V,D,A,L,R (L=(H+iV)/sqrt2); \
path alphabet A,B,A+B,A-B,A+iB,A-iB; s1 = photon at lambda1, s2 = photon at lambda2\n";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub protocol: Protocol,
    pub dof: Dof,
    pub s1: String,
    pub s2: String,
    pub duration_s: f64,
    pub value: f64,
    pub singles_rate_hz: Option<f64>,
    pub accidental_rate_hz: Option<f64>,
    pub gate_window_s: Option<f64>,
    pub relative_intensity_noise: Option<f64>,
    pub background_fraction: Option<f64>,
}

impl From<&MeasurementRecord> for RecordRow {
    fn from(r: &MeasurementRecord) -> Self {
        let (s1, s2) = r.setting.labels();
        let mut row = RecordRow {
            protocol: r.protocol(),
            dof: r.setting.dof,
            s1: s1.to_owned(),
            s2: s2.to_owned(),
            duration_s: r.duration_s,
            value: r.value,
            singles_rate_hz: None,
            accidental_rate_hz: None,
            gate_window_s: None,
            relative_intensity_noise: None,
            background_fraction: None,
        };
        match r.noise {
            NoiseMeta::Qst {
                singles_rate_hz,
                accidental_rate_hz,
                gate_window_s,
            } => {
                row.singles_rate_hz = Some(singles_rate_hz);
                row.accidental_rate_hz = Some(accidental_rate_hz);
                row.gate_window_s = Some(gate_window_s);
            }
            NoiseMeta::Set {
                relative_intensity_noise,
                background_fraction,
            } => {
                row.relative_intensity_noise = Some(relative_intensity_noise);
                row.background_fraction = Some(background_fraction);
            }
        }
        row
    }
}

impl TryFrom<RecordRow> for MeasurementRecord {
    type Error = Error;

    fn try_from(row: RecordRow) -> Result<Self> {
        let setting = ProjectorSetting::new(
            row.dof,
            Eigenstate::parse(row.dof, &row.s1)?,
            Eigenstate::parse(row.dof, &row.s2)?,
        );
        let missing = |name: &str| {
            Error::argument(format!("{} record missing {name}", row.protocol.as_str()))
        };
        let noise = match row.protocol {
            Protocol::Qst => NoiseMeta::Qst {
                singles_rate_hz: row
                    .singles_rate_hz
                    .ok_or_else(|| missing("singles_rate_hz"))?,
                accidental_rate_hz: row
                    .accidental_rate_hz
                    .ok_or_else(|| missing("accidental_rate_hz"))?,
                gate_window_s: row.gate_window_s.ok_or_else(|| missing("gate_window_s"))?,
            },
            Protocol::Set => NoiseMeta::Set {
                relative_intensity_noise: row
                    .relative_intensity_noise
                    .ok_or_else(|| missing("relative_intensity_noise"))?,
                background_fraction: row
                    .background_fraction
                    .ok_or_else(|| missing("background_fraction"))?,
            },
        };
        let record = MeasurementRecord {
            setting,
            value: row.value,
            duration_s: row.duration_s,
            noise,
        };
        record.validate()?;
        Ok(record)
    }
}

pub fn write_records_csv<W: Write>(mut out: W, records: &[MeasurementRecord]) -> Result<()> {
    out.write_all(CSV_PREAMBLE.as_bytes())?;
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer.serialize(RecordRow::from(r))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<MeasurementRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    reader
        .deserialize::<RecordRow>()
        .map(|row| MeasurementRecord::try_from(row?))
        .collect()
}

pub fn records_to_json(records: &[MeasurementRecord]) -> Result<String> {
    let rows: Vec<RecordRow> = records.iter().map(RecordRow::from).collect();
    Ok(serde_json::to_string_pretty(&rows)?)
}

pub fn records_from_json(json: &str) -> Result<Vec<MeasurementRecord>> {
    let rows: Vec<RecordRow> = serde_json::from_str(json)?;
    rows.into_iter().map(MeasurementRecord::try_from).collect()
}
