use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::eig::hermitian_eig3;
use super::matrix::{ComplexMatrix3, Vector3};
use crate::error::QbError;

/// Basis labels of the cascade qutrit, in matrix index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    G = 0,
    E = 1,
    F = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G, Level::E, Level::F];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn ket(self) -> Vector3 {
        let mut v = [C64::new(0.0, 0.0); 3];
        v[self.index()] = C64::new(1.0, 0.0);
        v
    }

    pub fn projector(self) -> ComplexMatrix3 {
        ComplexMatrix3::unit(self.index(), self.index())
    }
}

/// Bare transition frequencies; the ground level sits at zero energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryLevels {
    pub omega_e: f64,
    pub omega_f: f64,
}

impl BatteryLevels {
    pub fn new(omega_e: f64, omega_f: f64) -> Result<Self, QbError> {
        let levels = Self { omega_e, omega_f };
        levels.validate()?;
        Ok(levels)
    }

    /// ω_e = 1, ω_f = 1.7, the ratio used by every charging scenario.
    pub fn standard() -> Self {
        Self { omega_e: 1.0, omega_f: 1.7 }
    }

    pub fn validate(&self) -> Result<(), QbError> {
        if self.omega_e.is_finite() && self.omega_f.is_finite() && 0.0 < self.omega_e && self.omega_e < self.omega_f {
            Ok(())
        } else {
            Err(QbError::InvalidLevels { omega_e: self.omega_e, omega_f: self.omega_f })
        }
    }

    pub fn energies(&self) -> [f64; 3] {
        [0.0, self.omega_e, self.omega_f]
    }
}

/// H₀ = ω_e|e⟩⟨e| + ω_f|f⟩⟨f|
pub fn bare_hamiltonian(levels: &BatteryLevels) -> ComplexMatrix3 {
    ComplexMatrix3::from_diagonal(levels.energies())
}

/// Acceptance thresholds for [`DensityMatrix`] validation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl StateTolerance {
    pub const STRICT: Self = Self { hermiticity: 1e-10, trace: 1e-10, min_eigenvalue: 1e-10 };
    /// Used for states sampled from numerically integrated trajectories.
    pub const TRAJECTORY: Self = Self { hermiticity: 1e-10, trace: 1e-8, min_eigenvalue: 1e-7 };
}

/// Hermitian, unit-trace, positive-semidefinite 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(into = "DensityMatrixRepr")]
pub struct DensityMatrix(ComplexMatrix3);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix3) -> Result<Self, QbError> {
        Self::with_tolerance(m, StateTolerance::STRICT)
    }

    pub fn with_tolerance(m: ComplexMatrix3, tol: StateTolerance) -> Result<Self, QbError> {
        if !m.is_finite() {
            return Err(QbError::NonFinite("density matrix"));
        }
        let defect = m.hermiticity_defect();
        if defect > tol.hermiticity {
            return Err(QbError::InvalidState(format!("hermiticity defect {defect:e}")));
        }
        let tr = m.trace();
        if (tr - 1.0).norm() > tol.trace {
            return Err(QbError::InvalidState(format!("trace {} differs from 1", tr.re)));
        }
        let min = hermitian_eig3(&m)?.values[0];
        if min < -tol.min_eigenvalue {
            return Err(QbError::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self(m))
    }

    pub fn pure(psi: &Vector3) -> Result<Self, QbError> {
        Self::new(ComplexMatrix3::outer(psi, psi))
    }

    pub fn basis(level: Level) -> Self {
        Self(level.projector())
    }

    pub fn maximally_mixed() -> Self {
        Self(ComplexMatrix3::from_diagonal([1.0 / 3.0; 3]))
    }

    /// Diagonal state with populations (ρ_gg, ρ_ee, ρ_ff).
    pub fn from_populations(p: [f64; 3]) -> Result<Self, QbError> {
        Self::new(ComplexMatrix3::from_diagonal(p))
    }

    pub fn matrix(&self) -> &ComplexMatrix3 {
        &self.0
    }

    /// (ρ_gg, ρ_ee, ρ_ff)
    pub fn populations(&self) -> [f64; 3] {
        self.0.diagonal()
    }

    pub fn population(&self, level: Level) -> f64 {
        self.0[(level.index(), level.index())].re
    }

    pub fn coherence(&self, row: Level, col: Level) -> C64 {
        self.0[(row.index(), col.index())]
    }

    /// Largest off-diagonal magnitude.
    pub fn max_coherence(&self) -> f64 {
        [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| self.0[(i, j)].norm()).fold(0.0, f64::max)
    }

    pub fn spectrum(&self) -> [f64; 3] {
        // validated on construction, so the solver cannot reject the input
        hermitian_eig3(&self.0).map(|e| e.values).unwrap_or([f64::NAN; 3])
    }

    /// U ρ U† for a unitary `u` (unitarity defect ≤ 1e-9 required).
    pub fn transformed(&self, u: &ComplexMatrix3) -> Result<Self, QbError> {
        let defect = u.unitarity_defect();
        if defect > 1e-9 {
            return Err(QbError::NotUnitary { defect });
        }
        Self::with_tolerance(self.0.conjugate_by(u).hermitian_part(), StateTolerance::TRAJECTORY)
    }

    /// Von Neumann entropy −Tr[ρ ln ρ] in nats; eigenvalues ≤ 1e-14 contribute zero.
    pub fn entropy(&self) -> f64 {
        self.spectrum().iter().filter(|&&p| p > 1e-14).map(|&p| -p * p.ln()).sum()
    }
}

/// Re Tr[ρH₀]; the imaginary part must vanish to 1e-10.
pub fn expectation_energy(rho: &DensityMatrix, h0: &ComplexMatrix3) -> Result<f64, QbError> {
    let e = (*rho.matrix() * *h0).trace();
    if e.im.abs() > 1e-10 * h0.frobenius_norm().max(1.0) {
        return Err(QbError::NotHermitian { defect: e.im.abs() });
    }
    Ok(e.re)
}

#[derive(Serialize)]
struct DensityMatrixRepr {
    re: [[f64; 3]; 3],
    im: [[f64; 3]; 3],
}

impl From<DensityMatrix> for DensityMatrixRepr {
    fn from(rho: DensityMatrix) -> Self {
        let m = rho.0 .0;
        Self { re: m.map(|row| row.map(|z| z.re)), im: m.map(|row| row.map(|z| z.im)) }
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            re: [[f64; 3]; 3],
            im: [[f64; 3]; 3],
        }
        let r = Repr::deserialize(d)?;
        let mut m = ComplexMatrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = C64::new(r.re[i][j], r.im[i][j]);
            }
        }
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
