//! Monte-Carlo error bars: redraw every record from its noise model, refit,
//! and summarize a metric over the refits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::data::TomographyData;
use super::mle::{mle_reconstruct_data, MleOptions};
use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::measurement::{sample_poisson, MeasurementRecord, NoiseMeta};
use crate::parallel::{map_indexed, mix_seed, Execution};

pub const DEFAULT_RESAMPLES: usize = 200;

#[derive(Clone, Debug)]
pub struct ResampleOptions {
    pub n_resamples: usize,
    pub seed: u64,
    pub execution: Execution,
    pub mle: MleOptions,
}

impl Default for ResampleOptions {
    fn default() -> Self {
        Self {
            n_resamples: DEFAULT_RESAMPLES,
            seed: 0,
            execution: Execution::Parallel,
            mle: MleOptions::default(),
        }
    }
}

/// Sample mean and (n−1) standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    pub mean: f64,
    pub std: f64,
}

impl Uncertainty {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::argument("need at least two samples for a spread"));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Ok(Self {
            mean,
            std: var.sqrt(),
        })
    }
}

/// One synthetic copy of `records`: Poisson redraws of QST counts, relative
/// Gaussian redraws of SET intensities.
pub fn resample_records(records: &[MeasurementRecord], seed: u64) -> Vec<MeasurementRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    records
        .iter()
        .map(|r| {
            let value = match r.noise {
                NoiseMeta::Qst { .. } => sample_poisson(r.value, &mut rng),
                NoiseMeta::Set {
                    relative_intensity_noise,
                    ..
                } if relative_intensity_noise > 0.0 => {
                    let eps: f64 = Normal::new(0.0, relative_intensity_noise)
                        .expect("finite sigma")
                        .sample(&mut rng);
                    (r.value * (1.0 + eps)).max(0.0)
                }
                NoiseMeta::Set { .. } => r.value,
            };
            MeasurementRecord { value, ..*r }
        })
        .collect()
}

/// Refits `n_resamples` redrawn record sets. Output order follows the resample
/// index, so it does not depend on the execution mode.
pub fn resample_reconstructions(
    records: &[MeasurementRecord],
    opts: &ResampleOptions,
) -> Result<Vec<DensityMatrix>> {
    if opts.n_resamples < 2 {
        return Err(Error::argument("n_resamples must be at least 2"));
    }
    // validate once up front so errors name the original data
    TomographyData::from_records(records)?;
    map_indexed(opts.n_resamples, opts.execution, |i| {
        let redrawn = resample_records(records, mix_seed(opts.seed, i as u64));
        let data = TomographyData::from_records(&redrawn)?;
        Ok(mle_reconstruct_data(&data, None, &opts.mle)?.rho)
    })
    .into_iter()
    .collect()
}

pub fn resample_uncertainty<F>(
    records: &[MeasurementRecord],
    opts: &ResampleOptions,
    metric: F,
) -> Result<Uncertainty>
where
    F: Fn(&DensityMatrix) -> f64,
{
    let fits = resample_reconstructions(records, opts)?;
    let values: Vec<f64> = fits.iter().map(metric).collect();
    Uncertainty::from_samples(&values)
}
