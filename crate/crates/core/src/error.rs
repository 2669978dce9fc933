use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QbError {
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("non-finite values in {0}")]
    NonFinite(&'static str),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid battery levels: need 0 < omega_e ({omega_e}) < omega_f ({omega_f})")]
    InvalidLevels { omega_e: f64, omega_f: f64 },
    #[error("bare Hamiltonian has a degenerate spectrum")]
    DegenerateSpectrum,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("time {t} outside the pulse window [0, {tau_c}]")]
    OutsidePulseWindow { t: f64, tau_c: f64 },
    #[error("closed-form propagator requires an ideal counterdiabatic drive: {0}")]
    NotIdealSta(&'static str),
    #[error("integration diverged at t = {t}: trace drift {drift:e}")]
    Divergence { t: f64, drift: f64 },
    #[error("no root bracket found for {0}")]
    NoBracket(&'static str),
    #[error("postselection failed: ground population {0:e} is too small to renormalize")]
    PostselectionFailed(f64),
    #[error("closed-form and numeric propagation disagree by {0:e}")]
    PropagatorMismatch(f64),
}
