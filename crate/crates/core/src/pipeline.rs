//! End-to-end runs driven by a JSON config: build the source state, simulate
//! QST and SET records, reconstruct, compute metrics with error bars, evaluate
//! the beam-splitter purity ceilings, and write the report.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, PureStateVector};
use crate::measurement::{
    simulate_qst, simulate_set, write_records_csv, Dof, MeasurementRecord, Protocol,
    ProtocolConfig, CSV_PREAMBLE,
};
use crate::metrics::{MetricsTable, StateMetrics};
use crate::parallel::{mix_seed, Execution};
use crate::states::{
    calibrate_kappa_gradient, hyper_state_kappa, kappa_central_slice, path_state, pol_state,
    subsystem, SourceConfig,
};
use crate::tomography::{
    mle_reconstruct_data, resample_reconstructions, MleOptions, ReconstructionResult,
    ResampleOptions, TomographyData, DEFAULT_RESAMPLES,
};
use crate::visibility::{
    check_purity_consistency, BSTable, ConsistencyReport, InputPolarization, PurityBound,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    SimulateQst,
    SimulateSet,
    Reconstruct,
    Metrics,
    Visibility,
    Report,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::SimulateQst => "simulate-qst",
            Stage::SimulateSet => "simulate-set",
            Stage::Reconstruct => "reconstruct",
            Stage::Metrics => "metrics",
            Stage::Visibility => "visibility",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.trim().to_owned()))
            .map_err(|_| Error::argument(format!("unknown stage {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    /// Traced polarization purity the momentum phase gradient is tuned to.
    pub target_pol_purity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TomographyConfig {
    pub n_resamples: usize,
    pub max_iterations: usize,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        Self {
            n_resamples: DEFAULT_RESAMPLES,
            max_iterations: MleOptions::default().max_iterations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub report_path: PathBuf,
    pub records_path: PathBuf,
    /// Directory receiving reconstruction JSON and plot-data CSV files.
    pub matrices_path: PathBuf,
}

impl Outputs {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            report_path: dir.join("report.json"),
            records_path: dir.join("records.csv"),
            matrices_path: dir.join("matrices"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub source: SourceConfig,
    #[serde(default)]
    pub calibration: Option<Calibration>,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub tomography: TomographyConfig,
    #[serde(default)]
    pub bs_table: BSTable,
    pub outputs: Outputs,
    #[serde(default)]
    pub pipeline: Vec<Stage>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Invalid(#[from] Error),
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.protocol.validate()?;
        self.bs_table.validate()?;
        if let Some(c) = &self.calibration {
            if !(0.5..=1.0).contains(&c.target_pol_purity) {
                return Err(Error::argument("target_pol_purity must lie in [0.5, 1]"));
            }
        }
        if self.tomography.n_resamples < 2 {
            return Err(Error::argument("n_resamples must be at least 2"));
        }
        if self.tomography.max_iterations == 0 {
            return Err(Error::argument("max_iterations must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
#[error("stage {stage} failed: {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

/// Keys reconstructions and metric columns, ordered path-before-polarization
/// within each protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Channel {
    pub protocol: Protocol,
    pub dof: Dof,
}

impl Channel {
    pub const ALL: [Channel; 4] = [
        Channel::new(Protocol::Qst, Dof::Path),
        Channel::new(Protocol::Qst, Dof::Polarization),
        Channel::new(Protocol::Set, Dof::Path),
        Channel::new(Protocol::Set, Dof::Polarization),
    ];

    pub const fn new(protocol: Protocol, dof: Dof) -> Self {
        Self { protocol, dof }
    }

    pub fn label(&self) -> String {
        let dof = match self.dof {
            Dof::Path => "Path",
            Dof::Polarization => "Polarization",
        };
        format!("{dof} {}", self.protocol.as_str())
    }

    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.protocol.as_str().to_lowercase(), self.dof)
    }

    /// Fidelity target: the ideal Bell pair with zero phase.
    pub fn target(&self) -> PureStateVector {
        match self.dof {
            Dof::Polarization => pol_state(0.0),
            Dof::Path => path_state(0.0),
        }
    }

    fn seed_tag(&self) -> u64 {
        let p = match self.protocol {
            Protocol::Qst => 0,
            Protocol::Set => 2,
        };
        let d = match self.dof {
            Dof::Polarization => 1,
            Dof::Path => 2,
        };
        p + d
    }

    pub fn simulation_seed(&self, run_seed: u64) -> u64 {
        mix_seed(run_seed, self.seed_tag())
    }

    pub fn resample_seed(&self, run_seed: u64) -> u64 {
        mix_seed(run_seed, 100 + self.seed_tag())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelSummary {
    pub kappa_phase_gradient_rad: f64,
    pub polarization_purity_traced: f64,
    pub polarization_purity_central_slice: f64,
    pub path_purity_traced: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VisibilitySummary {
    pub bounds: Vec<PurityBound>,
    pub checks: Vec<LabelledCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LabelledCheck {
    pub column: String,
    pub against: InputPolarization,
    pub report: ConsistencyReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitSummary {
    pub column: String,
    pub converged: bool,
    pub iterations: usize,
    pub log_likelihood: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub basis_conventions: BTreeMap<String, String>,
    pub seed: u64,
    pub stages: Vec<Stage>,
    pub source: SourceConfig,
    pub model: ModelSummary,
    pub fits: Vec<FitSummary>,
    pub table: MetricsTable,
    pub visibility: Option<VisibilitySummary>,
    pub notes: Vec<String>,
}

/// Everything a run produced, for callers that want more than the files.
#[derive(Debug, Default)]
pub struct PipelineOutput {
    pub source: Option<SourceConfig>,
    pub records: BTreeMap<Channel, Vec<MeasurementRecord>>,
    pub reconstructions: BTreeMap<Channel, ReconstructionResult>,
    pub metrics: MetricsTable,
    pub visibility: Option<VisibilitySummary>,
    pub report: Option<Report>,
}

struct Run<'a> {
    cfg: &'a RunConfig,
    source: SourceConfig,
    full_state: Option<PureStateVector>,
    out: PipelineOutput,
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineOutput, StageError> {
    if cfg.pipeline.is_empty() {
        return Ok(PipelineOutput::default());
    }
    let mut run = Run {
        cfg,
        source: cfg.source.clone(),
        full_state: None,
        out: PipelineOutput::default(),
    };
    let mut reported = false;
    for &stage in &cfg.pipeline {
        let wrap = |source| StageError { stage, source };
        match stage {
            Stage::SimulateQst => run.simulate(Protocol::Qst).map_err(wrap)?,
            Stage::SimulateSet => run.simulate(Protocol::Set).map_err(wrap)?,
            Stage::Reconstruct => run.reconstruct().map_err(wrap)?,
            Stage::Metrics => run.metrics().map_err(wrap)?,
            Stage::Visibility => run.visibility().map_err(wrap)?,
            Stage::Report => {
                run.report().map_err(wrap)?;
                reported = true;
            }
        }
    }
    if !reported {
        run.report().map_err(|source| StageError {
            stage: Stage::Report,
            source,
        })?;
    }
    run.out.source = Some(run.source.clone());
    Ok(run.out)
}

impl Run<'_> {
    fn state(&mut self) -> Result<&PureStateVector> {
        if self.full_state.is_none() {
            if let Some(c) = &self.cfg.calibration {
                self.source.kappa_phase_gradient =
                    calibrate_kappa_gradient(&self.source, c.target_pol_purity)?;
            }
            self.full_state = Some(hyper_state_kappa(&self.source)?);
        }
        Ok(self.full_state.as_ref().expect("just built"))
    }

    fn simulate(&mut self, protocol: Protocol) -> Result<()> {
        let base = self.cfg.protocol.clone();
        let source = {
            self.state()?;
            self.source.clone()
        };
        let full = self.full_state.as_ref().expect("built above");
        for dof in [Dof::Path, Dof::Polarization] {
            let channel = Channel::new(protocol, dof);
            let cfg = ProtocolConfig {
                rng_seed: channel.simulation_seed(base.rng_seed),
                ..base.clone()
            };
            let records = match protocol {
                Protocol::Qst => {
                    let reduced = full.reduced(&subsystems(dof))?;
                    simulate_qst(&reduced, &cfg, dof)?
                }
                Protocol::Set => simulate_set(full, &cfg, dof, &source)?,
            };
            self.out.records.insert(channel, records);
        }
        let all: Vec<MeasurementRecord> = self.out.records.values().flatten().copied().collect();
        let mut w = BufWriter::new(create(&self.cfg.outputs.records_path)?);
        write_records_csv(&mut w, &all)?;
        w.flush()?;
        Ok(())
    }

    fn mle_options(&self) -> MleOptions {
        MleOptions {
            max_iterations: self.cfg.tomography.max_iterations,
            ..MleOptions::default()
        }
    }

    fn reconstruct(&mut self) -> Result<()> {
        if self.out.records.is_empty() {
            return Err(Error::argument("no records; run a simulate stage first"));
        }
        let dir = &self.cfg.outputs.matrices_path;
        fs::create_dir_all(dir)?;
        let opts = self.mle_options();
        for (channel, records) in &self.out.records {
            let data = TomographyData::from_records(records)?;
            let fit = mle_reconstruct_data(&data, None, &opts)?;
            let json = fit.to_json(
                channel.dof,
                Some(channel.simulation_seed(self.cfg.protocol.rng_seed)),
            );
            fs::write(
                dir.join(format!("{}.json", channel.file_stem())),
                serde_json::to_string_pretty(&json)? + "\n",
            )?;
            export_matrix_plotdata(
                &fit.rho,
                channel.dof,
                &dir.join(format!("{}_plot.csv", channel.file_stem())),
            )?;
            self.out.reconstructions.insert(*channel, fit);
        }
        Ok(())
    }

    fn metrics(&mut self) -> Result<()> {
        if self.out.reconstructions.is_empty() {
            return Err(Error::argument("no reconstructions; run reconstruct first"));
        }
        let mut table = MetricsTable::default();
        for channel in Channel::ALL {
            let Some(fit) = self.out.reconstructions.get(&channel) else {
                continue;
            };
            let opts = ResampleOptions {
                n_resamples: self.cfg.tomography.n_resamples,
                seed: channel.resample_seed(self.cfg.protocol.rng_seed),
                execution: Execution::Parallel,
                mle: self.mle_options(),
            };
            let fits = resample_reconstructions(&self.out.records[&channel], &opts)?;
            let m = StateMetrics::with_resamples(&fit.rho, &channel.target(), &fits)?;
            table.push(channel.label(), m);
        }
        self.out.metrics = table;
        Ok(())
    }

    fn visibility(&mut self) -> Result<()> {
        let bounds = vec![
            self.cfg.bs_table.bound(InputPolarization::H)?,
            self.cfg.bs_table.bound(InputPolarization::V)?,
        ];
        let mut checks = Vec::new();
        for (channel, bound) in [
            (Channel::new(Protocol::Qst, Dof::Path), bounds[0]),
            (Channel::new(Protocol::Set, Dof::Path), bounds[1]),
        ] {
            if let Some(m) = self.out.metrics.get(&channel.label()) {
                let report = check_purity_consistency(
                    m.purity.value.clamp(0.0, 1.0),
                    m.purity.std.unwrap_or(0.0),
                    bound.max_purity,
                )?;
                checks.push(LabelledCheck {
                    column: channel.label(),
                    against: bound.polarization,
                    report,
                });
            }
        }
        self.out.visibility = Some(VisibilitySummary { bounds, checks });
        Ok(())
    }

    fn report(&mut self) -> Result<()> {
        let model = if let Some(full) = &self.full_state {
            let slice = kappa_central_slice(full, &self.source)?;
            Some(ModelSummary {
                kappa_phase_gradient_rad: self.source.kappa_phase_gradient,
                polarization_purity_traced: full.reduced(&subsystem::POLARIZATION)?.purity(),
                polarization_purity_central_slice: slice
                    .reduced(&subsystem::POLARIZATION)?
                    .purity(),
                path_purity_traced: full.reduced(&subsystem::PATH)?.purity(),
            })
        } else {
            None
        };
        let report = Report {
            basis_conventions: basis_conventions(),
            seed: self.cfg.protocol.rng_seed,
            stages: self.cfg.pipeline.clone(),
            source: self.source.clone(),
            model: model.unwrap_or(ModelSummary {
                kappa_phase_gradient_rad: self.source.kappa_phase_gradient,
                polarization_purity_traced: f64::NAN,
                polarization_purity_central_slice: f64::NAN,
                path_purity_traced: f64::NAN,
            }),
            fits: Channel::ALL
                .iter()
                .filter_map(|c| {
                    self.out.reconstructions.get(c).map(|f| FitSummary {
                        column: c.label(),
                        converged: f.converged,
                        iterations: f.iterations,
                        log_likelihood: f.log_likelihood,
                    })
                })
                .collect(),
            table: self.out.metrics.clone(),
            visibility: self.out.visibility.clone(),
            notes: vec![
                "QST columns reconstruct the state traced over transverse momentum inside the \
                 mask apertures; SET columns reconstruct the central momentum slice selected by \
                 the narrowband seed. With a nonzero momentum phase gradient the slice is purer \
                 than the trace, so simulated SET polarization purity exceeds QST. Lower SET \
                 values in an experiment point to noise sources not modeled here."
                    .to_owned(),
                "Fidelity targets: (HH+VV)/sqrt2 for polarization, (AB+BA)/sqrt2 for path."
                    .to_owned(),
            ],
        };
        let path = &self.cfg.outputs.report_path;
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        write_file(path, text.as_bytes())?;
        write_file(
            &path.with_extension("csv"),
            self.out.metrics.to_csv().as_bytes(),
        )?;
        self.out.report = Some(report);
        Ok(())
    }
}

fn subsystems(dof: Dof) -> [usize; 2] {
    match dof {
        Dof::Polarization => subsystem::POLARIZATION,
        Dof::Path => subsystem::PATH,
    }
}

fn basis_conventions() -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert(
        "subsystem_order".into(),
        "pol1, pol2, path1, path2, kappa1, kappa2 (photon 1 at lambda1)".into(),
    );
    m.insert("polarization_matrix_order".into(), "HH, HV, VH, VV".into());
    m.insert("path_matrix_order".into(), "AA, AB, BA, BB".into());
    m.insert(
        "polarization_alphabet".into(),
        "H, V, D=(H+V)/sqrt2, A=(H-V)/sqrt2, L=(H+iV)/sqrt2, R=(H-iV)/sqrt2".into(),
    );
    m.insert(
        "path_alphabet".into(),
        "A, B, (A+B)/sqrt2, (A-B)/sqrt2, (A+iB)/sqrt2, (A-iB)/sqrt2".into(),
    );
    m
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(fs::File::create(path)?)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    create(path)?.write_all(bytes)?;
    Ok(())
}

/// Writes `row_label,col_label,re,im` for every matrix entry, rows in basis order.
pub fn export_matrix_plotdata(rho: &DensityMatrix, dof: Dof, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(create(path)?);
    write_matrix_plotdata(&mut w, rho.matrix(), dof)?;
    w.flush()?;
    Ok(())
}

pub fn write_matrix_plotdata<W: Write>(mut out: W, m: &ComplexMatrix, dof: Dof) -> Result<()> {
    let labels = dof.basis_labels();
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::dims(&[4, 4], &[m.rows(), m.cols()]));
    }
    writeln!(
        out,
        "# {} density matrix, basis order {}",
        dof,
        labels.join(",")
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row_label", "col_label", "re", "im"])?;
    for (i, r) in labels.iter().enumerate() {
        for (j, c) in labels.iter().enumerate() {
            let z = m[(i, j)];
            w.serialize((r, c, z.re, z.im))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses plot data back into a matrix, using the row/column labels for placement.
pub fn read_matrix_plotdata<R: std::io::Read>(input: R, dof: Dof) -> Result<ComplexMatrix> {
    let labels = dof.basis_labels();
    let index = |l: &str| {
        labels
            .iter()
            .position(|x| *x == l)
            .ok_or_else(|| Error::argument(format!("unknown basis label {l:?}")))
    };
    let mut m = ComplexMatrix::zeros(4, 4);
    let mut seen = 0;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    for row in reader.deserialize::<(String, String, f64, f64)>() {
        let (r, c, re, im) = row?;
        m[(index(&r)?, index(&c)?)] = C64::new(re, im);
        seen += 1;
    }
    if seen != 16 {
        return Err(Error::argument(format!(
            "expected 16 matrix entries, found {seen}"
        )));
    }
    Ok(m)
}

/// Preamble shared by records files; re-exported for documentation tooling.
pub const RECORDS_PREAMBLE: &str = CSV_PREAMBLE;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_names_round_trip() {
        for s in [
            Stage::SimulateQst,
            Stage::SimulateSet,
            Stage::Reconstruct,
            Stage::Metrics,
            Stage::Visibility,
            Stage::Report,
        ] {
            assert_eq!(s.as_str().parse::<Stage>().unwrap(), s);
        }
        assert!("plot".parse::<Stage>().is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = RunConfig::from_json("{\n  \"source\": {\n    \"kappa_bins\": \"x\"\n  }\n}")
            .unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_values_rejected() {
        let text = r#"{"source": {"kappa_bins": 0},
            "outputs": {"report_path": "r.json", "records_path": "r.csv", "matrices_path": "m"}}"#;
        assert!(matches!(
            RunConfig::from_json(text),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn plotdata_for_bell_state() {
        let rho = pol_state(0.0).to_density();
        let mut buf = Vec::new();
        write_matrix_plotdata(&mut buf, rho.matrix(), Dof::Polarization).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# polarization density matrix, basis order HH,HV,VH,VV"));
        assert!(text.contains("HH,VV,0.5000000000000001,0") || text.contains("HH,VV,0.5,0"));
        let back = read_matrix_plotdata(buf.as_slice(), Dof::Polarization).unwrap();
        assert_eq!(&back, rho.matrix());
    }
}
