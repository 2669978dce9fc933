//! Dense 3×3 complex algebra and validated qutrit states.
//!
//! Basis order is (|g⟩, |e⟩, |f⟩) everywhere. All quantities are
//! dimensionless: energies and rates are expressed in a reference rate chosen
//! per scenario (γ_e while idling, Ω while charging).

mod eig;
mod matrix;
mod state;

pub use eig::{hermitian_eig3, HermitianEigen, HERMITIAN_INPUT_TOL};
pub use matrix::{ComplexMatrix3, Vector3};
pub use state::{bare_hamiltonian, expectation_energy, BatteryLevels, DensityMatrix, Level, StateTolerance};

#[cfg(test)]
pub(crate) use matrix::inner;
