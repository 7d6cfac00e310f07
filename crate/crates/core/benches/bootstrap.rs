use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperset::measurement::{simulate_qst, Dof, ProtocolConfig};
use hyperset::parallel::Execution;
use hyperset::states::{hyper_state_kappa, subsystem, SourceConfig};
use hyperset::tomography::{resample_reconstructions, ResampleOptions};

fn bootstrap(c: &mut Criterion) {
    let source = SourceConfig {
        kappa_phase_gradient: 1.5,
        ..SourceConfig::default()
    };
    let full = hyper_state_kappa(&source).unwrap();
    let pol = full.reduced(&subsystem::POLARIZATION).unwrap();
    let records = simulate_qst(&pol, &ProtocolConfig::default(), Dof::Polarization).unwrap();

    let mut group = c.benchmark_group("bootstrap_32");
    group.sample_size(10);
    for (name, execution) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        let opts = ResampleOptions {
            n_resamples: 32,
            seed: 7,
            execution,
            ..ResampleOptions::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| resample_reconstructions(&records, opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bootstrap);
criterion_main!(benches);
