//! Counterdiabatic |g⟩↔|f⟩ coupling synthesised from a detuned probe.
//!
//! A probe at detuning δ_d from both single-photon transitions drives
//! |g⟩↔|e⟩ with Rabi frequency Ω_p and |e⟩↔|f⟩ with √2 Ω_p. Eliminating |e⟩
//! to second order leaves an effective |g⟩↔|f⟩ coupling of magnitude
//! Ω_eff = √2 Ω_p²/δ_d, together with AC-Stark shifts (−x, +3x, −2x) on
//! (g, e, f), x = Ω_p²/δ_d.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use super::{held_hamiltonian, DriveSpec, Protocol};
use crate::dynamics::{evolve, DecoherenceSpec, TimeGrid};
use crate::error::QbError;
use crate::qutrit::{ComplexMatrix3, DensityMatrix};
use crate::C64;

/// Below this δ_d / max Ω_p the second-order picture is unreliable.
pub const DISPERSIVE_RATIO_WARN: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeEnvelope {
    Constant {
        omega_p: f64,
    },
    /// Ω_p(t) = √(Ω_CD(t) δ_d/√2), so that Ω_eff reproduces the CD pulse of
    /// the given drive.
    MatchCd {
        drive: DriveSpec,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPhotonSpec {
    pub probe: ProbeEnvelope,
    pub delta_d: f64,
    /// Probe phase. With δ_d > 0 the effective coupling is
    /// −√2 Ω_p² e^{2iφ}/δ_d |g⟩⟨f|, so φ = −π/4 gives +iΩ_eff, the sign of the
    /// CD term.
    pub phase: f64,
    /// Add diag(x, −3x, 2x) to cancel the AC-Stark shifts.
    pub stark_compensation: bool,
}

impl TwoPhotonSpec {
    pub const DEFAULT_PHASE: f64 = -FRAC_PI_4;

    /// Probe matched to `drive`'s CD pulse with δ_d = `ratio` · max Ω_p.
    pub fn matching(drive: &DriveSpec, ratio: f64) -> Result<Self, QbError> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(QbError::InvalidParameter(format!("dispersive ratio must be positive, got {ratio}")));
        }
        let drive = drive.with_cd(true);
        let cd_max = max_over_window(&drive, |t| drive.raw(t).omega_cd);
        if !(cd_max > 0.0) {
            return Err(QbError::InvalidParameter("drive has no counterdiabatic term to match".into()));
        }
        let probe_max = ratio * cd_max / SQRT_2;
        Ok(Self {
            probe: ProbeEnvelope::MatchCd { drive },
            delta_d: ratio * probe_max,
            phase: Self::DEFAULT_PHASE,
            stark_compensation: true,
        })
    }

    pub fn validate(&self) -> Result<(), QbError> {
        if !(self.delta_d.is_finite() && self.delta_d > 0.0) || !self.phase.is_finite() {
            return Err(QbError::InvalidParameter(format!("probe needs finite delta_d > 0 (got {})", self.delta_d)));
        }
        match self.probe {
            ProbeEnvelope::Constant { omega_p } if !(omega_p.is_finite() && omega_p >= 0.0) => {
                Err(QbError::InvalidParameter(format!("probe amplitude must be non-negative, got {omega_p}")))
            }
            ProbeEnvelope::MatchCd { drive } => drive.validate(),
            _ => Ok(()),
        }
    }

    pub fn probe_rabi(&self, t: f64) -> f64 {
        match self.probe {
            ProbeEnvelope::Constant { omega_p } => omega_p,
            ProbeEnvelope::MatchCd { drive } => {
                if t < 0.0 || t > drive.tau_c {
                    0.0
                } else {
                    (drive.raw(t).omega_cd * self.delta_d / SQRT_2).sqrt()
                }
            }
        }
    }

    pub fn max_probe_rabi(&self) -> f64 {
        match self.probe {
            ProbeEnvelope::Constant { omega_p } => omega_p,
            ProbeEnvelope::MatchCd { drive } => max_over_window(&drive, |t| self.probe_rabi(t)),
        }
    }

    /// δ_d / max Ω_p
    pub fn dispersive_ratio(&self) -> f64 {
        self.delta_d / self.max_probe_rabi()
    }
}

fn max_over_window(drive: &DriveSpec, f: impl Fn(f64) -> f64) -> f64 {
    (0..=2000).map(|k| f(drive.tau_c * k as f64 / 2000.0)).fold(0.0, f64::max)
}

/// Ω_eff(t) = √2 Ω_p(t)²/δ_d
pub fn effective_cd(tp: &TwoPhotonSpec, t: f64) -> f64 {
    SQRT_2 * tp.probe_rabi(t).powi(2) / tp.delta_d
}

/// Probe contribution in the frame rotating with the main drive:
/// Ω_p e^{iφ}(e^{−iδ_d t}|g⟩⟨e| + √2 e^{iδ_d t}|e⟩⟨f|) + h.c., plus the
/// Stark compensation if enabled.
pub fn two_photon_hamiltonian(tp: &TwoPhotonSpec, t: f64) -> ComplexMatrix3 {
    let op = tp.probe_rabi(t);
    let ge = C64::from_polar(op, tp.phase - tp.delta_d * t);
    let ef = C64::from_polar(SQRT_2 * op, tp.phase + tp.delta_d * t);
    let mut h = ComplexMatrix3::zeros();
    h[(0, 1)] = ge;
    h[(1, 0)] = ge.conj();
    h[(1, 2)] = ef;
    h[(2, 1)] = ef.conj();
    if tp.stark_compensation {
        let x = op * op / tp.delta_d;
        h += ComplexMatrix3::from_diagonal([x, -3.0 * x, 2.0 * x]);
    }
    h
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPhotonCharge {
    pub final_state: DensityMatrix,
    pub dispersive_ratio: f64,
    pub steps: usize,
    pub warning: Option<String>,
}

/// Integrates the drive (two pulses if `with_stirap`, otherwise only its
/// detunings) plus the probe over [0, τ_c].
///
/// The step count is raised so that δ_d·dt ≤ 0.02.
pub fn charge_two_photon(
    drive: &DriveSpec,
    tp: &TwoPhotonSpec,
    with_stirap: bool,
    decoherence: &DecoherenceSpec,
    rho0: &DensityMatrix,
    min_steps: usize,
) -> Result<TwoPhotonCharge, QbError> {
    drive.validate()?;
    tp.validate()?;
    let ratio = tp.dispersive_ratio();
    let warning = (ratio < DISPERSIVE_RATIO_WARN).then(|| {
        format!("delta_d / max Omega_p = {ratio:.3} is below {DISPERSIVE_RATIO_WARN}; the two-photon picture is not dispersive")
    });
    let steps = min_steps.max((tp.delta_d * drive.tau_c / 0.02).ceil() as usize);
    let grid = TimeGrid::new(0.0, drive.tau_c, steps)?;
    let base = drive.with_cd(false);
    let bare = ComplexMatrix3::from_diagonal([0.0, drive.delta_one, drive.delta_two]);
    let hamiltonian = |t: f64| {
        let h = if with_stirap { held_hamiltonian(&base, t, Protocol::Stirap) } else { bare };
        h + two_photon_hamiltonian(tp, t)
    };
    let traj = evolve(rho0, hamiltonian, decoherence, &grid, steps)?;
    Ok(TwoPhotonCharge { final_state: *traj.final_state(), dispersive_ratio: ratio, steps, warning })
}
