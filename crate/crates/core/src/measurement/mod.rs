//! Synthetic measurement records for coincidence-counting tomography (QST)
//! and seeded stimulated-emission tomography (SET).

mod io;
mod settings;
mod simulate;

pub use io::{
    read_records_csv, records_from_json, records_to_json, write_records_csv, RecordRow,
    CSV_PREAMBLE,
};
pub use settings::{
    born_probability, tomography_settings, Dof, Eigenstate, PauliBasis, ProjectorSetting,
    BASIS_PAIRS, SETTINGS_PER_DOF,
};
pub(crate) use simulate::sample_poisson;
pub use simulate::{
    ideal_records, qst_expected_records, qst_means, simulate_qst, simulate_set, MeasurementRecord,
    NoiseMeta, Protocol, ProtocolConfig,
};
