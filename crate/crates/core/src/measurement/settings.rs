use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix};

/// Degree of freedom a two-qubit measurement acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dof {
    Polarization,
    Path,
}

impl Dof {
    pub const ALL: [Dof; 2] = [Dof::Polarization, Dof::Path];

    pub fn as_str(self) -> &'static str {
        match self {
            Dof::Polarization => "polarization",
            Dof::Path => "path",
        }
    }

    /// Computational basis labels in matrix order, e.g. `HH, HV, VH, VV`.
    pub fn basis_labels(self) -> [&'static str; 4] {
        match self {
            Dof::Polarization => ["HH", "HV", "VH", "VV"],
            Dof::Path => ["AA", "AB", "BA", "BB"],
        }
    }
}

impl fmt::Display for Dof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Dof {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polarization" | "pol" => Ok(Dof::Polarization),
            "path" => Ok(Dof::Path),
            other => Err(Error::argument(format!(
                "unknown degree of freedom {other:?}"
            ))),
        }
    }
}

/// Pauli basis of a single-qubit projective measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliBasis {
    Z,
    X,
    Y,
}

impl PauliBasis {
    pub const ALL: [PauliBasis; 3] = [PauliBasis::Z, PauliBasis::X, PauliBasis::Y];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// One of the six single-qubit Pauli eigenstates.
///
/// Alphabet order is `Z+, Z-, X+, X-, Y+, Y-`, i.e. `H, V, D, A, L, R` for
/// polarization and `A, B, A+B, A-B, A+iB, A-iB` for path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Eigenstate {
    pub basis: PauliBasis,
    pub positive: bool,
}

const POL_LABELS: [&str; 6] = ["H", "V", "D", "A", "L", "R"];
const PATH_LABELS: [&str; 6] = ["A", "B", "A+B", "A-B", "A+iB", "A-iB"];

impl Eigenstate {
    pub const ALPHABET: [Eigenstate; 6] = [
        Eigenstate::new(PauliBasis::Z, true),
        Eigenstate::new(PauliBasis::Z, false),
        Eigenstate::new(PauliBasis::X, true),
        Eigenstate::new(PauliBasis::X, false),
        Eigenstate::new(PauliBasis::Y, true),
        Eigenstate::new(PauliBasis::Y, false),
    ];

    pub const fn new(basis: PauliBasis, positive: bool) -> Self {
        Self { basis, positive }
    }

    pub fn index(self) -> usize {
        2 * self.basis.index() + usize::from(!self.positive)
    }

    /// Eigenvalue of the basis Pauli operator, ±1.
    pub fn sign(self) -> f64 {
        if self.positive {
            1.0
        } else {
            -1.0
        }
    }

    pub fn ket(self) -> [C64; 2] {
        let h = FRAC_1_SQRT_2;
        match (self.basis, self.positive) {
            (PauliBasis::Z, true) => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            (PauliBasis::Z, false) => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            (PauliBasis::X, true) => [C64::new(h, 0.0), C64::new(h, 0.0)],
            (PauliBasis::X, false) => [C64::new(h, 0.0), C64::new(-h, 0.0)],
            (PauliBasis::Y, true) => [C64::new(h, 0.0), C64::new(0.0, h)],
            (PauliBasis::Y, false) => [C64::new(h, 0.0), C64::new(0.0, -h)],
        }
    }

    pub fn projector(self) -> ComplexMatrix {
        let k = self.ket();
        ComplexMatrix::outer(&k, &k)
    }

    pub fn label(self, dof: Dof) -> &'static str {
        match dof {
            Dof::Polarization => POL_LABELS[self.index()],
            Dof::Path => PATH_LABELS[self.index()],
        }
    }

    pub fn parse(dof: Dof, label: &str) -> Result<Self> {
        let table = match dof {
            Dof::Polarization => &POL_LABELS,
            Dof::Path => &PATH_LABELS,
        };
        table
            .iter()
            .position(|&l| l == label)
            .map(|i| Self::ALPHABET[i])
            .ok_or_else(|| Error::argument(format!("unknown {dof} state label {label:?}")))
    }
}

/// Product projector `Π₁ ⊗ Π₂` on one degree of freedom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectorSetting {
    pub dof: Dof,
    pub photon1: Eigenstate,
    pub photon2: Eigenstate,
}

pub const SETTINGS_PER_DOF: usize = 36;
pub const BASIS_PAIRS: usize = 9;

impl ProjectorSetting {
    pub fn new(dof: Dof, photon1: Eigenstate, photon2: Eigenstate) -> Self {
        Self {
            dof,
            photon1,
            photon2,
        }
    }

    /// Position in [`tomography_settings`] order.
    pub fn index(&self) -> usize {
        6 * self.photon1.index() + self.photon2.index()
    }

    /// Which of the nine `(basis₁, basis₂)` pairs this setting belongs to.
    pub fn basis_pair(&self) -> usize {
        3 * self.photon1.basis.index() + self.photon2.basis.index()
    }

    pub fn ket(&self) -> [C64; 4] {
        let a = self.photon1.ket();
        let b = self.photon2.ket();
        [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
    }

    pub fn projector(&self) -> ComplexMatrix {
        self.photon1.projector().kron(&self.photon2.projector())
    }

    pub fn labels(&self) -> (&'static str, &'static str) {
        (self.photon1.label(self.dof), self.photon2.label(self.dof))
    }
}

impl fmt::Display for ProjectorSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.labels();
        write!(f, "{}:({a},{b})", self.dof)
    }
}

/// All 36 ordered pairs of the six-state alphabet, first photon slowest.
pub fn tomography_settings(dof: Dof) -> Vec<ProjectorSetting> {
    Eigenstate::ALPHABET
        .iter()
        .flat_map(|&a| {
            Eigenstate::ALPHABET
                .iter()
                .map(move |&b| ProjectorSetting::new(dof, a, b))
        })
        .collect()
}

/// Born rule `Tr[ρ (Π₁ ⊗ Π₂)]` on a two-qubit state.
pub fn born_probability(state: &DensityMatrix, setting: &ProjectorSetting) -> Result<f64> {
    if state.dims() != [2, 2] {
        return Err(Error::dims(&[2, 2], state.dims()));
    }
    let ket = setting.ket();
    let p = state.matrix().sandwich(&ket, &ket);
    debug_assert!(p.im.abs() < 1e-12, "imaginary Born residue {}", p.im);
    Ok(p.re.clamp(0.0, 1.0))
}
