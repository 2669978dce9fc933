//! Ergotropy, passive states and work-extraction unitaries.
//!
//! The general routine diagonalizes ρ and pairs its populations, sorted
//! descending, with the bare energies sorted ascending. For diagonal states the
//! piecewise closed form in [`ergotropy_diagonal`] gives the same number.

use serde::{Deserialize, Serialize};

use crate::error::QbError;
use crate::qutrit::{
    expectation_energy, hermitian_eig3, BatteryLevels, ComplexMatrix3, DensityMatrix, HermitianEigen, Vector3,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErgotropyReport {
    pub energy: f64,
    pub passive_energy: f64,
    pub ergotropy: f64,
}

/// Spectral data shared by the passive-state, ergotropy and unitary routines.
struct Pairing {
    /// Bare energies ascending with their eigenvectors.
    energies: HermitianEigen,
    /// Populations of ρ sorted descending, with eigenvectors.
    populations: [f64; 3],
    population_vectors: [Vector3; 3],
}

const DEGENERACY_GAP: f64 = 1e-12;

fn pairing(rho: &DensityMatrix, h0: &ComplexMatrix3) -> Result<Pairing, QbError> {
    let energies = hermitian_eig3(h0)?;
    let gap_scale = energies.values[2].abs().max(energies.values[0].abs()).max(1.0);
    if energies.values.windows(2).any(|w| w[1] - w[0] <= DEGENERACY_GAP * gap_scale) {
        return Err(QbError::DegenerateSpectrum);
    }
    let spec = hermitian_eig3(rho.matrix())?;
    // Stable descending sort: ties keep the eigen-solver order.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| spec.values[j].total_cmp(&spec.values[i]));
    Ok(Pairing {
        energies,
        populations: order.map(|k| spec.values[k]),
        population_vectors: order.map(|k| spec.vectors[k]),
    })
}

/// Σ_k p_k |ε_k⟩⟨ε_k| with p descending against ε ascending.
pub fn passive_state(rho: &DensityMatrix, h0: &ComplexMatrix3) -> Result<DensityMatrix, QbError> {
    let p = pairing(rho, h0)?;
    let m = (0..3).fold(ComplexMatrix3::zeros(), |acc, k| {
        let v = &p.energies.vectors[k];
        acc + ComplexMatrix3::outer(v, v) * p.populations[k].max(0.0)
    });
    let tr = m.trace().re;
    DensityMatrix::new(m * (1.0 / tr))
}

pub fn ergotropy(rho: &DensityMatrix, h0: &ComplexMatrix3) -> Result<ErgotropyReport, QbError> {
    let p = pairing(rho, h0)?;
    let energy = expectation_energy(rho, h0)?;
    let passive_energy: f64 = p.populations.iter().zip(p.energies.values).map(|(pk, ek)| pk * ek).sum();
    Ok(ErgotropyReport { energy, passive_energy, ergotropy: energy - passive_energy })
}

/// Closed-form ergotropy of a diagonal state with populations (ρ_gg, ρ_ee, ρ_ff).
///
/// The four orderings with a tabulated branch are evaluated directly. The two
/// remaining orderings (ρ_ff ≥ ρ_gg ≥ ρ_ee and ρ_gg ≥ ρ_ff ≥ ρ_ee) are computed
/// from the general sorted pairing.
pub fn ergotropy_diagonal(populations: [f64; 3], levels: &BatteryLevels) -> Result<f64, QbError> {
    let [gg, ee, ff] = populations;
    if populations.iter().any(|&p| !(p >= -1e-12)) || (gg + ee + ff - 1.0).abs() > 1e-9 {
        return Err(QbError::InvalidParameter(format!("populations {populations:?} are not a distribution")));
    }
    let (we, wf) = (levels.omega_e, levels.omega_f);
    let xi = if ff >= ee && ee >= gg {
        wf * (ff - gg)
    } else if ee >= ff && ff >= gg {
        wf * (ff - gg) + we * (ee - ff)
    } else if ee >= gg && gg >= ff {
        we * (ee - gg)
    } else if gg >= ee && ee >= ff {
        0.0
    } else {
        let mut sorted = populations;
        sorted.sort_by(|a, b| b.total_cmp(a));
        let energies = levels.energies();
        let energy: f64 = populations.iter().zip(energies).map(|(p, e)| p * e).sum();
        energy - sorted.iter().zip(energies).map(|(p, e)| p * e).sum::<f64>()
    };
    Ok(xi)
}

/// U = Σ_k |ε_k⟩⟨p_k|, mapping ρ onto its passive state.
///
/// Eigenvector phases are normalized so that the largest component is real
/// positive; for a diagonal ρ the result is a real permutation matrix.
pub fn extraction_unitary(rho: &DensityMatrix, h0: &ComplexMatrix3) -> Result<ComplexMatrix3, QbError> {
    let p = pairing(rho, h0)?;
    Ok((0..3).fold(ComplexMatrix3::zeros(), |acc, k| {
        acc + ComplexMatrix3::outer(&p.energies.vectors[k], &p.population_vectors[k])
    }))
}
