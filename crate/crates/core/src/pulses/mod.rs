//! Pulse envelopes, counterdiabatic (CD) terms and rotating-frame control
//! Hamiltonians.
//!
//! The mixing angle θ(t) is defined by tan θ = Ω₁/Ω₂ and runs from 0 to π/2
//! over the charging window [0, τ_c]. The CD pulse Ω_CD = θ̇ on the |g⟩↔|f⟩
//! transition keeps the system on the dark state of the two-pulse
//! Hamiltonian.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use serde::{Deserialize, Serialize};

use crate::error::QbError;
use crate::qutrit::ComplexMatrix3;
use crate::C64;

mod propagator;
pub mod two_photon;

pub use propagator::{bright_states, dark_state, dynamical_phase, sta_propagator, sta_propagator_closed_form};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PulseShape {
    /// Ω₁ = Ω sin(πt/2τ_c), Ω₂ = Ω cos(πt/2τ_c).
    Sine,
    /// Gaussians of width `sigma` centred at τ_c/2 + α (Ω₁) and τ_c/2 − α (Ω₂).
    Gaussian { alpha: f64, sigma: f64 },
    /// Square pulses Ω₁ = Ω₂ = Ω/√2; no CD term.
    Flat,
}

impl PulseShape {
    /// α = τ_c/10, σ = τ_c/6.
    pub fn default_gaussian(tau_c: f64) -> Self {
        Self::Gaussian { alpha: tau_c / 10.0, sigma: tau_c / 6.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Sine => "sine",
            Self::Gaussian { .. } => "gaussian",
            Self::Flat => "flat",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Two pulses plus the counterdiabatic |g⟩↔|f⟩ term.
    Sta,
    /// Two pulses only.
    Stirap,
}

/// A charging drive: pulse family, peak Rabi frequency, duration and
/// systematic errors (intensity error ε, detunings Δ on |e⟩ and δ on |f⟩).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub shape: PulseShape,
    pub omega: f64,
    pub tau_c: f64,
    pub cd_enabled: bool,
    pub epsilon: f64,
    pub delta_one: f64,
    pub delta_two: f64,
}

/// Instantaneous Rabi frequencies (Ω₁, Ω₂, Ω_CD).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelopes {
    pub omega1: f64,
    pub omega2: f64,
    pub omega_cd: f64,
}

impl Envelopes {
    /// Ω(t) = √(Ω₁² + Ω₂²)
    pub fn magnitude(&self) -> f64 {
        self.omega1.hypot(self.omega2)
    }
}

/// Required tan θ at the window edges: ≤ 1e-3 at t = 0 and ≥ 1e3 at t = τ_c.
pub const BOUNDARY_TAN_TOL: f64 = 1e-3;

const WINDOW_SLACK: f64 = 1e-12;

impl DriveSpec {
    pub fn new(shape: PulseShape, omega: f64, tau_c: f64) -> Result<Self, QbError> {
        let spec = Self { shape, omega, tau_c, cd_enabled: true, epsilon: 0.0, delta_one: 0.0, delta_two: 0.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sine(omega: f64, tau_c: f64) -> Result<Self, QbError> {
        Self::new(PulseShape::Sine, omega, tau_c)
    }

    pub fn gaussian(omega: f64, tau_c: f64) -> Result<Self, QbError> {
        Self::new(PulseShape::default_gaussian(tau_c), omega, tau_c)
    }

    pub fn flat(omega: f64, tau_c: f64) -> Result<Self, QbError> {
        Self::new(PulseShape::Flat, omega, tau_c)
    }

    pub fn with_cd(mut self, enabled: bool) -> Self {
        self.cd_enabled = enabled;
        self
    }

    pub fn with_errors(mut self, epsilon: f64, delta_one: f64, delta_two: f64) -> Self {
        self.epsilon = epsilon;
        self.delta_one = delta_one;
        self.delta_two = delta_two;
        self
    }

    pub fn has_errors(&self) -> bool {
        self.epsilon != 0.0 || self.delta_one != 0.0 || self.delta_two != 0.0
    }

    /// Whether the CD term actually present equals θ̇, i.e. the drive follows
    /// the dark state exactly.
    pub fn is_transitionless(&self) -> bool {
        self.cd_enabled || matches!(self.shape, PulseShape::Flat)
    }

    pub fn validate(&self) -> Result<(), QbError> {
        let finite =
            [self.omega, self.tau_c, self.epsilon, self.delta_one, self.delta_two].iter().all(|x| x.is_finite());
        if !finite || !(self.omega > 0.0) || !(self.tau_c > 0.0) {
            return Err(QbError::InvalidParameter(format!(
                "drive needs finite omega > 0 and tau_c > 0 (got omega = {}, tau_c = {})",
                self.omega, self.tau_c
            )));
        }
        match self.shape {
            PulseShape::Flat => Ok(()),
            PulseShape::Gaussian { alpha, sigma } if !(alpha > 0.0 && sigma > 0.0) => {
                Err(QbError::InvalidParameter(format!("gaussian needs alpha, sigma > 0 (got {alpha}, {sigma})")))
            }
            _ => {
                let (start, end) = (self.raw(0.0), self.raw(self.tau_c));
                let tan0 = start.omega1 / start.omega2;
                let tan1 = end.omega1 / end.omega2;
                if tan0 <= BOUNDARY_TAN_TOL && tan1 >= 1.0 / BOUNDARY_TAN_TOL {
                    Ok(())
                } else {
                    Err(QbError::InvalidParameter(format!(
                        "pulses miss the boundary conditions: tan(theta) = {tan0:e} at 0, {tan1:e} at tau_c"
                    )))
                }
            }
        }
    }

    fn check_window(&self, t: f64) -> Result<f64, QbError> {
        let slack = WINDOW_SLACK * self.tau_c.max(1.0);
        if t >= -slack && t <= self.tau_c + slack {
            Ok(t.clamp(0.0, self.tau_c))
        } else {
            Err(QbError::OutsidePulseWindow { t, tau_c: self.tau_c })
        }
    }

    fn gaussian_centres(&self, alpha: f64) -> (f64, f64) {
        let mid = 0.5 * self.tau_c;
        (mid + alpha, mid - alpha)
    }

    /// Envelopes without the window check.
    fn raw(&self, t: f64) -> Envelopes {
        let (omega1, omega2, cd) = match self.shape {
            PulseShape::Sine => {
                let arg = FRAC_PI_2 * (t / self.tau_c);
                (self.omega * arg.sin(), self.omega * arg.cos(), FRAC_PI_2 / self.tau_c)
            }
            PulseShape::Gaussian { alpha, sigma } => {
                let (c1, c2) = self.gaussian_centres(alpha);
                let s2 = sigma * sigma;
                let o1 = self.omega * (-(t - c1).powi(2) / s2).exp();
                let o2 = self.omega * (-(t - c2).powi(2) / s2).exp();
                let x = (4.0 * alpha * t - 2.0 * alpha * self.tau_c) / s2;
                (o1, o2, 2.0 * alpha / s2 / x.cosh())
            }
            PulseShape::Flat => (self.omega * FRAC_1_SQRT_2, self.omega * FRAC_1_SQRT_2, 0.0),
        };
        let omega_cd = if self.cd_enabled { cd } else { 0.0 };
        Envelopes { omega1, omega2, omega_cd }
    }

    /// Time derivatives (Ω̇₁, Ω̇₂).
    pub fn envelope_derivatives(&self, t: f64) -> Result<(f64, f64), QbError> {
        let t = self.check_window(t)?;
        Ok(match self.shape {
            PulseShape::Sine => {
                let k = FRAC_PI_2 / self.tau_c;
                (self.omega * k * (k * t).cos(), -self.omega * k * (k * t).sin())
            }
            PulseShape::Gaussian { alpha, sigma } => {
                let (c1, c2) = self.gaussian_centres(alpha);
                let e = self.raw(t);
                let s2 = sigma * sigma;
                (-2.0 * (t - c1) / s2 * e.omega1, -2.0 * (t - c2) / s2 * e.omega2)
            }
            PulseShape::Flat => (0.0, 0.0),
        })
    }
}

pub fn envelopes(spec: &DriveSpec, t: f64) -> Result<Envelopes, QbError> {
    let t = spec.check_window(t)?;
    Ok(spec.raw(t))
}

/// Envelopes extended past the window: for t > τ_c the drive is held at
/// Ω₁ = Ω₁(τ_c), Ω₂ = 0, Ω_CD = 0.
pub fn held_envelopes(spec: &DriveSpec, t: f64) -> Envelopes {
    if t <= spec.tau_c {
        spec.raw(t.max(0.0))
    } else {
        Envelopes { omega1: spec.raw(spec.tau_c).omega1, omega2: 0.0, omega_cd: 0.0 }
    }
}

/// (Ω̇₁Ω₂ − Ω₁Ω̇₂)/(Ω₁² + Ω₂²), the general CD amplitude.
pub fn cd_quotient(spec: &DriveSpec, t: f64) -> Result<f64, QbError> {
    let e = envelopes(spec, t)?;
    let (d1, d2) = spec.envelope_derivatives(t)?;
    Ok((d1 * e.omega2 - e.omega1 * d2) / (e.omega1 * e.omega1 + e.omega2 * e.omega2))
}

/// θ = atan2(Ω₁, Ω₂) ∈ [0, π/2].
pub fn mixing_angle(spec: &DriveSpec, t: f64) -> Result<f64, QbError> {
    let e = envelopes(spec, t)?;
    Ok(e.omega1.atan2(e.omega2))
}

/// Rotating-frame Hamiltonian
/// Δ|e⟩⟨e| + δ|f⟩⟨f| + [Ω₁(1+ε)|g⟩⟨e| + Ω₂(1−ε)|e⟩⟨f| + iΩ_CD|g⟩⟨f| + h.c.],
/// with the CD term omitted for STIRAP.
pub fn control_hamiltonian(spec: &DriveSpec, t: f64, protocol: Protocol) -> Result<ComplexMatrix3, QbError> {
    Ok(assemble(spec, &envelopes(spec, t)?, protocol))
}

/// [`control_hamiltonian`] using [`held_envelopes`], defined for any t ≥ 0.
pub fn held_hamiltonian(spec: &DriveSpec, t: f64, protocol: Protocol) -> ComplexMatrix3 {
    assemble(spec, &held_envelopes(spec, t), protocol)
}

fn assemble(spec: &DriveSpec, e: &Envelopes, protocol: Protocol) -> ComplexMatrix3 {
    let mut h = ComplexMatrix3::from_diagonal([0.0, spec.delta_one, spec.delta_two]);
    let ge = C64::new(e.omega1 * (1.0 + spec.epsilon), 0.0);
    let ef = C64::new(e.omega2 * (1.0 - spec.epsilon), 0.0);
    let gf = match protocol {
        Protocol::Sta => C64::new(0.0, e.omega_cd),
        Protocol::Stirap => C64::new(0.0, 0.0),
    };
    h[(0, 1)] = ge;
    h[(1, 0)] = ge.conj();
    h[(1, 2)] = ef;
    h[(2, 1)] = ef.conj();
    h[(0, 2)] = gf;
    h[(2, 0)] = gf.conj();
    h
}
