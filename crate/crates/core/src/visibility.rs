//! Interference visibility of pure states on lossless unbalanced beam
//! splitters, and the purity ceiling it implies for a state measured through
//! such a splitter.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

const LOSSLESS_TOL: f64 = 1e-12;

/// Lossless splitter with real amplitude reflectivity `r` and transmittivity `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitter {
    r: f64,
    t: f64,
}

impl BeamSplitter {
    pub fn new(r: f64, t: f64) -> Result<Self> {
        if !(r >= 0.0 && t >= 0.0) {
            return Err(Error::argument(format!(
                "splitter amplitudes must be non-negative, got r = {r}, t = {t}"
            )));
        }
        if (r * r + t * t - 1.0).abs() > LOSSLESS_TOL {
            return Err(Error::argument(format!(
                "splitter is not lossless: r² + t² = {}",
                r * r + t * t
            )));
        }
        Ok(Self { r, t })
    }

    /// From intensity reflectivity `r²` and transmittivity `t²`.
    pub fn from_intensities(r2: f64, t2: f64) -> Result<Self> {
        if !(r2 >= 0.0 && t2 >= 0.0) {
            return Err(Error::argument("splitter intensities must be non-negative"));
        }
        Self::new(r2.sqrt(), t2.sqrt())
    }

    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { r: h, t: h }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Mode transformation: `|0⟩ → t|0'⟩ + ir|1'⟩`, `|1⟩ → t|1'⟩ + ir|0'⟩`.
    pub fn unitary(&self) -> ComplexMatrix {
        let t = C64::new(self.t, 0.0);
        let ir = C64::new(0.0, self.r);
        ComplexMatrix::from_fn(2, 2, |i, j| if i == j { t } else { ir })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitterIntensities {
    pub r2: f64,
    pub t2: f64,
}

impl SplitterIntensities {
    pub fn splitter(&self) -> Result<BeamSplitter> {
        BeamSplitter::from_intensities(self.r2, self.t2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationPair {
    pub h: SplitterIntensities,
    pub v: SplitterIntensities,
}

/// Splitter parameters per wavelength (photon 1 at λ₁, photon 2 at λ₂) and
/// input polarization, as intensity fractions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BSTable {
    pub lambda1: PolarizationPair,
    pub lambda2: PolarizationPair,
}

impl Default for BSTable {
    /// The splitter used for the seeded path measurements.
    fn default() -> Self {
        let pair = |r2h, t2h, r2v, t2v| PolarizationPair {
            h: SplitterIntensities { r2: r2h, t2: t2h },
            v: SplitterIntensities { r2: r2v, t2: t2v },
        };
        Self {
            lambda1: pair(0.42, 0.58, 0.36, 0.64),
            lambda2: pair(0.45, 0.55, 0.43, 0.57),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputPolarization {
    H,
    V,
}

impl BSTable {
    pub fn validate(&self) -> Result<()> {
        for pair in [&self.lambda1, &self.lambda2] {
            pair.h.splitter()?;
            pair.v.splitter()?;
        }
        Ok(())
    }

    pub fn splitters(&self, pol: InputPolarization) -> Result<(BeamSplitter, BeamSplitter)> {
        let pick = |p: &PolarizationPair| match pol {
            InputPolarization::H => p.h,
            InputPolarization::V => p.v,
        };
        Ok((
            pick(&self.lambda1).splitter()?,
            pick(&self.lambda2).splitter()?,
        ))
    }

    /// Two-photon visibility and purity ceiling for one input polarization.
    pub fn bound(&self, pol: InputPolarization) -> Result<PurityBound> {
        let (a, b) = self.splitters(pol)?;
        let visibility = visibility_2q(&a, &b);
        Ok(PurityBound {
            polarization: pol,
            visibility,
            max_purity: purity_bound(visibility)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurityBound {
    pub polarization: InputPolarization,
    pub visibility: f64,
    pub max_purity: f64,
}

/// `V = (M − m)/(M + m) = 2rt` for an equal superposition on one splitter.
pub fn visibility_1q(bs: &BeamSplitter) -> f64 {
    (2.0 * bs.r * bs.t).min(1.0)
}

/// `V = 1 − (t₁t₂ − r₁r₂)² / (t₁²t₂² + r₁²r₂²)` for the path Bell pair, one
/// splitter per photon.
pub fn visibility_2q(bs1: &BeamSplitter, bs2: &BeamSplitter) -> f64 {
    let tt = bs1.t * bs2.t;
    let rr = bs1.r * bs2.r;
    let denom = tt * tt + rr * rr;
    if denom == 0.0 {
        return 0.0;
    }
    1.0 - (tt - rr).powi(2) / denom
}

/// Maximum purity `½ + V²/2` of a state whose interference shows visibility `V`.
pub fn purity_bound(v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::argument(format!("visibility {v} outside [0, 1]")));
    }
    Ok(0.5 + 0.5 * v * v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub measured: f64,
    pub sigma: f64,
    pub bound: f64,
    pub compatible: bool,
    /// `bound − (measured − 2σ)`; negative when the bound is violated.
    pub margin: f64,
}

/// A measured purity violates the ceiling when it exceeds it by more than 2σ.
pub fn check_purity_consistency(
    measured: f64,
    sigma: f64,
    bound: f64,
) -> Result<ConsistencyReport> {
    if !(0.0..=1.0).contains(&measured) || !(0.0..=1.0).contains(&bound) {
        return Err(Error::argument("purities must lie in [0, 1]"));
    }
    if !(sigma >= 0.0) {
        return Err(Error::argument("uncertainty must be non-negative"));
    }
    let margin = bound - (measured - 2.0 * sigma);
    Ok(ConsistencyReport {
        measured,
        sigma,
        bound,
        compatible: margin >= 0.0,
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless_condition_enforced() {
        assert!(BeamSplitter::from_intensities(0.42, 0.58).is_ok());
        assert!(BeamSplitter::from_intensities(0.42, 0.5).is_err());
        assert!(BeamSplitter::new(-0.6, 0.8).is_err());
        let mut table = BSTable::default();
        assert!(table.validate().is_ok());
        table.lambda2.v.t2 = 0.6;
        assert!(table.validate().is_err());
    }

    #[test]
    fn unitary_is_unitary() {
        let bs = BeamSplitter::from_intensities(0.36, 0.64).unwrap();
        let u = bs.unitary();
        let uu = u.adjoint().matmul(&u);
        assert!(uu.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn single_qubit_visibility() {
        assert!((visibility_1q(&BeamSplitter::balanced()) - 1.0).abs() < 1e-15);
        let bs = BeamSplitter::from_intensities(0.42, 0.58).unwrap();
        assert!((visibility_1q(&bs) - 2.0 * (0.42f64 * 0.58).sqrt()).abs() < 1e-15);
        assert_eq!(visibility_1q(&BeamSplitter::new(0.0, 1.0).unwrap()), 0.0);
    }

    #[test]
    fn equal_splitters_reduce() {
        for (r2, t2) in [(0.3, 0.7), (0.42, 0.58), (0.5, 0.5), (0.9, 0.1)] {
            let bs = BeamSplitter::from_intensities(r2, t2).unwrap();
            let expected = 1.0 - (t2 - r2).powi(2) / (t2 * t2 + r2 * r2);
            assert!((visibility_2q(&bs, &bs) - expected).abs() < 1e-14);
        }
        let b = BeamSplitter::balanced();
        assert_eq!(visibility_2q(&b, &b), 1.0);
    }

    #[test]
    fn purity_bound_domain() {
        assert_eq!(purity_bound(1.0).unwrap(), 1.0);
        assert_eq!(purity_bound(0.0).unwrap(), 0.5);
        assert!(purity_bound(1.1).is_err());
        assert!(purity_bound(-0.1).is_err());
    }

    #[test]
    fn consistency_flags() {
        assert!(
            check_purity_consistency(0.909, 0.003, 0.96725)
                .unwrap()
                .compatible
        );
        assert!(
            check_purity_consistency(0.886, 0.001, 0.91833)
                .unwrap()
                .compatible
        );
        assert!(
            !check_purity_consistency(0.99, 0.001, 0.918)
                .unwrap()
                .compatible
        );
        // within 2σ of the bound still counts as compatible
        assert!(
            check_purity_consistency(0.925, 0.005, 0.918)
                .unwrap()
                .compatible
        );
    }
}
