//! One line per acceptance criterion. Runs as a plain binary so the lines are
//! always printed, and exits non-zero if any criterion fails.

mod common;

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyperset::linalg::eig_hermitian;
use hyperset::measurement::{ideal_records, simulate_qst, Dof, ProtocolConfig};
use hyperset::metrics::{fidelity, tangle_matches_concurrence, StateMetrics};
use hyperset::pipeline::{run_pipeline, Channel, Outputs, PipelineOutput, RunConfig};
use hyperset::states::{
    calibrate_kappa_gradient, mixed_state, path_state, pol_state, traced_polarization_purity,
    MixedKind, MixedStateSpec, SourceConfig,
};
use hyperset::tomography::mle_reconstruct;
use hyperset::visibility::{
    check_purity_consistency, visibility_1q, visibility_2q, BSTable, BeamSplitter,
    InputPolarization,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let o = f();
    (o, start.elapsed())
}

fn ceilings() -> Outcome {
    let table = BSTable::default();
    let start = Instant::now();
    let h = table.bound(InputPolarization::H).unwrap().max_purity;
    let v = table.bound(InputPolarization::V).unwrap().max_purity;
    let elapsed = start.elapsed();
    let pass = (h - 0.96725).abs() < 5e-5
        && (v - 0.91833).abs() < 5e-5
        && elapsed < Duration::from_millis(1);
    outcome(pass, format!("H {h:.6}, V {v:.6} in {elapsed:?}"))
}

fn oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let r2a: f64 = rng.random();
        let r2b: f64 = rng.random();
        let a = BeamSplitter::from_intensities(r2a, 1.0 - r2a).unwrap();
        let b = BeamSplitter::from_intensities(r2b, 1.0 - r2b).unwrap();
        worst = worst.max((visibility_1q(&a) - common::sweep_visibility_1q(a.r(), a.t())).abs());
        worst = worst.max(
            (visibility_2q(&a, &b) - common::sweep_visibility_2q(a.r(), a.t(), b.r(), b.t())).abs(),
        );
    }
    outcome(worst < 1e-10, format!("max deviation {worst:.2e}"))
}

fn round_trip() -> Outcome {
    let mut lowest: f64 = 1.0;
    let mut physical = true;
    for (target, dof) in [
        (pol_state(0.0), Dof::Polarization),
        (path_state(0.0), Dof::Path),
    ] {
        let records = ideal_records(&target.to_density(), dof, 1e6).unwrap();
        let fit = mle_reconstruct(&records, None).unwrap();
        let m = fit.rho.matrix();
        physical &=
            (m.trace().re - 1.0).abs() < 1e-10 && eig_hermitian(m).unwrap().values[3] > -1e-9;
        lowest = lowest.min(fidelity(&fit.rho, &target).unwrap());
    }
    outcome(
        lowest >= 0.9999 && physical,
        format!("min fidelity {lowest:.8}, physical {physical}"),
    )
}

fn mixed_purity() -> Outcome {
    let rho = mixed_state(&MixedStateSpec {
        visibility: 0.9,
        phi: 0.0,
        kind: MixedKind::TwoQubitPsi,
    })
    .unwrap();
    let cfg = ProtocolConfig {
        qst_rate_scale_hz: 1e5,
        rng_seed: 17,
        ..ProtocolConfig::default()
    };
    let fit = mle_reconstruct(&simulate_qst(&rho, &cfg, Dof::Path).unwrap(), None).unwrap();
    let p = fit.rho.purity();
    outcome((p - 0.905).abs() <= 0.005, format!("purity {p:.5}"))
}

fn run_in(dir: &Path, seed: u64) -> PipelineOutput {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json");
    let mut cfg = RunConfig::load(&path).unwrap();
    cfg.protocol.rng_seed = seed;
    cfg.outputs = Outputs::in_dir(dir);
    run_pipeline(&cfg).unwrap()
}

fn purity_gap(out: &PipelineOutput) -> Outcome {
    let source = out.source.clone().unwrap();
    let traced = traced_polarization_purity(&source).unwrap();
    let calibrated = calibrate_kappa_gradient(&SourceConfig::default(), 0.772).unwrap();
    let purity = |label: &str| out.metrics.get(label).unwrap().purity;
    let (pq, ps) = (purity("Path QST"), purity("Path SET"));
    let (oq, os) = (purity("Polarization QST"), purity("Polarization SET"));
    let pass = (traced - 0.772).abs() <= 0.01
        && (source.kappa_phase_gradient - calibrated).abs() < 1e-12
        && pq.value >= 0.99
        && ps.value >= 0.99
        && (oq.value - 0.772).abs() <= 0.03
        && os.value > oq.value
        && out.report.as_ref().unwrap().notes[0].contains("central momentum slice");
    outcome(
        pass,
        format!(
            "alpha {:.4}, traced {traced:.4}; path QST {:.4}±{:.4}, path SET {:.4}±{:.4}, pol QST {:.4}±{:.4}, pol SET {:.4}±{:.4}",
            source.kappa_phase_gradient,
            pq.value,
            pq.std.unwrap(),
            ps.value,
            ps.std.unwrap(),
            oq.value,
            oq.std.unwrap(),
            os.value,
            os.std.unwrap()
        ),
    )
}

fn table_consistency(out: &PipelineOutput) -> Outcome {
    let mut worst: f64 = 0.0;
    for c in &out.metrics.columns {
        worst = worst.max((c.metrics.tangle.value - c.metrics.concurrence.value.powi(2)).abs());
    }
    for fit in out.reconstructions.values() {
        let m = StateMetrics::compute(&fit.rho, &pol_state(0.0)).unwrap();
        worst = worst.max((m.tangle.value - m.concurrence.value.powi(2)).abs());
    }
    let fixtures = [
        (0.785, 0.005, 0.886, 0.003),
        (0.577, 0.026, 0.759, 0.017),
        (0.779, 0.001, 0.883, 0.001),
        (0.411, 0.022, 0.641, 0.017),
    ];
    let table_ok = fixtures
        .iter()
        .all(|&(t, ts, c, cs)| tangle_matches_concurrence(t, ts, c, cs));
    outcome(
        worst < 1e-9 && table_ok,
        format!("max |tau - C^2| {worst:.1e}, published pairs consistent {table_ok}"),
    )
}

fn bound_compatibility() -> Outcome {
    let table = BSTable::default();
    let h = table.bound(InputPolarization::H).unwrap().max_purity;
    let v = table.bound(InputPolarization::V).unwrap().max_purity;
    let a = check_purity_consistency(0.909, 0.003, h).unwrap();
    let b = check_purity_consistency(0.886, 0.001, v).unwrap();
    outcome(
        a.compatible && b.compatible,
        format!(
            "QST vs H margin {:.4}, SET vs V margin {:.4}",
            a.margin, b.margin
        ),
    )
}

fn invariants_hold(out: &PipelineOutput) -> bool {
    out.reconstructions.values().all(|fit| {
        let m = fit.rho.matrix();
        (m.trace().re - 1.0).abs() < 1e-10
            && m.is_hermitian(1e-10)
            && eig_hermitian(m).unwrap().values[3] > -1e-9
    }) && out.metrics.columns.iter().all(|c| {
        let m = &c.metrics;
        (m.tangle.value - m.concurrence.value.powi(2)).abs() < 1e-9
            && (0.25 - 1e-12..=1.0 + 1e-12).contains(&m.purity.value)
    }) && out.reconstructions.len() == Channel::ALL.len()
}

fn determinism(a: &Path, b: &Path, c: &Path, first: &PipelineOutput) -> Outcome {
    let second = run_in(b, 2024);
    let other = run_in(c, 2025);
    let files = [
        "report.json",
        "report.csv",
        "records.csv",
        "matrices/qst_path.json",
        "matrices/qst_polarization_plot.csv",
        "matrices/set_path.json",
        "matrices/set_polarization_plot.csv",
    ];
    let identical = files
        .iter()
        .all(|f| fs::read(a.join(f)).unwrap() == fs::read(b.join(f)).unwrap());
    let changed =
        fs::read(a.join("records.csv")).unwrap() != fs::read(c.join("records.csv")).unwrap();
    let ok = invariants_hold(first) && invariants_hold(&second) && invariants_hold(&other);
    outcome(
        identical && changed && ok,
        format!("identical bytes {identical}, new seed changes counts {changed}, invariants {ok}"),
    )
}

fn main() -> ExitCode {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let (pipeline, pipeline_time) = {
        let start = Instant::now();
        let out = run_in(dirs[0].path(), 2024);
        (out, start.elapsed())
    };

    let mut results: Vec<(&str, Outcome, Option<Duration>)> = Vec::new();
    results.push(("1 visibility->purity ceilings", ceilings(), None));
    let (o, t) = timed(oracle_agreement);
    let o = Outcome {
        pass: o.pass && t < Duration::from_secs(1),
        ..o
    };
    results.push(("2 closed forms vs interference oracle", o, Some(t)));
    let (o, t) = timed(round_trip);
    let o = Outcome {
        pass: o.pass && t < Duration::from_secs(10),
        ..o
    };
    results.push(("3 tomography round trip", o, Some(t)));
    results.push(("4 mixed-state purity recovery", mixed_purity(), None));
    results.push((
        "5 purity gap (slice vs trace)",
        purity_gap(&pipeline),
        Some(pipeline_time),
    ));
    results.push((
        "6 metrics table internal consistency",
        table_consistency(&pipeline),
        None,
    ));
    results.push(("7 bound compatibility", bound_compatibility(), None));
    let d = determinism(dirs[0].path(), dirs[1].path(), dirs[2].path(), &pipeline);
    results.push(("8 determinism", d, None));

    let mut failed = 0;
    for (name, o, t) in &results {
        let time = t.map(|t| format!(" [{t:.2?}]")).unwrap_or_default();
        println!(
            "{} criterion {name}: {}{time}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
