use num_complex::Complex64 as C64;

use super::data::TomographyData;
use crate::error::Result;
use crate::linalg::{pauli, ComplexMatrix};
use crate::measurement::{MeasurementRecord, PauliBasis};

fn pauli_slot(b: PauliBasis) -> usize {
    match b {
        PauliBasis::X => 1,
        PauliBasis::Y => 2,
        PauliBasis::Z => 3,
    }
}

/// Pauli-moment estimate `ρ = ¼ Σ ⟨σᵢ⊗σⱼ⟩ σᵢ⊗σⱼ`. Hermitian with unit trace but
/// not necessarily positive.
pub fn linear_inversion(records: &[MeasurementRecord]) -> Result<ComplexMatrix> {
    Ok(linear_inversion_data(&TomographyData::from_records(
        records,
    )?))
}

pub(crate) fn linear_inversion_data(data: &TomographyData) -> ComplexMatrix {
    // moments[i][j] = ⟨σᵢ ⊗ σⱼ⟩ with index 0 the identity
    let mut moments = [[0.0f64; 4]; 4];
    moments[0][0] = 1.0;
    for (k, s) in data.settings.iter().enumerate() {
        let p = (data.observed[k] - data.background[k]) / data.normalization(k);
        let (i, j) = (pauli_slot(s.photon1.basis), pauli_slot(s.photon2.basis));
        let (a, b) = (s.photon1.sign(), s.photon2.sign());
        moments[i][j] += a * b * p;
        // each single-qubit moment is seen by three basis pairs
        moments[i][0] += a * p / 3.0;
        moments[0][j] += b * p / 3.0;
    }
    let ops = pauli::all();
    let mut rho = ComplexMatrix::zeros(4, 4);
    for (i, oi) in ops.iter().enumerate() {
        for (j, oj) in ops.iter().enumerate() {
            let term = oi.kron(oj).scale(C64::new(0.25 * moments[i][j], 0.0));
            rho = &rho + &term;
        }
    }
    rho.hermitian_part()
}
