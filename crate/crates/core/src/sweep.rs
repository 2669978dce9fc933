//! Parameter sweeps of the final ergotropy ξ(τ_c), shared by the command line
//! and browser front ends.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::DecoherenceSpec;
use crate::error::QbError;
use crate::protocol::{post_extraction_state, recharge, RechargeMethod, RechargeOptions, RechargeRun};
use crate::pulses::{DriveSpec, Protocol};
use crate::qutrit::{BatteryLevels, DensityMatrix, Level};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Sine,
    Gaussian,
    Flat,
}

impl ShapeKind {
    pub fn drive(self, omega: f64, tau_c: f64) -> Result<DriveSpec, QbError> {
        match self {
            Self::Sine => DriveSpec::sine(omega, tau_c),
            Self::Gaussian => DriveSpec::gaussian(omega, tau_c),
            Self::Flat => DriveSpec::flat(omega, tau_c),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Sine => "sine",
            Self::Gaussian => "gaussian",
            Self::Flat => "flat",
        }
    }
}

impl FromStr for ShapeKind {
    type Err = QbError;
    fn from_str(s: &str) -> Result<Self, QbError> {
        match s {
            "sine" => Ok(Self::Sine),
            "gaussian" => Ok(Self::Gaussian),
            "flat" => Ok(Self::Flat),
            _ => Err(QbError::InvalidParameter(format!("unknown pulse shape `{s}`"))),
        }
    }
}

/// Quantities a sweep can vary. Detunings and the charging noise rate are
/// in units of Ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Epsilon,
    DeltaOne,
    DeltaTwo,
    OmegaTauC,
    NoiseGamma,
    GammaFTau,
}

impl SweepParameter {
    pub const ALL: [Self; 6] =
        [Self::Epsilon, Self::DeltaOne, Self::DeltaTwo, Self::OmegaTauC, Self::NoiseGamma, Self::GammaFTau];

    pub fn name(self) -> &'static str {
        match self {
            Self::Epsilon => "epsilon",
            Self::DeltaOne => "delta_one",
            Self::DeltaTwo => "delta_two",
            Self::OmegaTauC => "omega_tau_c",
            Self::NoiseGamma => "noise_gamma",
            Self::GammaFTau => "gamma_f_tau",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = QbError;
    fn from_str(s: &str) -> Result<Self, QbError> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| QbError::InvalidParameter(format!("unknown sweep parameter `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AxisScale {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub parameter: SweepParameter,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: AxisScale,
}

impl SweepAxis {
    pub fn validate(&self) -> Result<(), QbError> {
        if self.points < 2 {
            return Err(QbError::InvalidParameter(format!("sweep needs at least 2 points, got {}", self.points)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(QbError::InvalidParameter(format!("sweep range [{}, {}] is empty", self.min, self.max)));
        }
        if self.scale == AxisScale::Log && !(self.min > 0.0) {
            return Err(QbError::InvalidParameter("log-scaled sweep needs min > 0".into()));
        }
        Ok(())
    }

    /// Grid values, endpoints included exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|k| {
                if k == n {
                    return self.max;
                }
                let f = k as f64 / n as f64;
                match self.scale {
                    AxisScale::Linear => self.min + f * (self.max - self.min),
                    AxisScale::Log => (self.min.ln() + f * (self.max / self.min).ln()).exp(),
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variant {
    pub shape: ShapeKind,
    pub protocol: Protocol,
    pub postselect: bool,
}

impl Variant {
    pub fn label(&self) -> String {
        let protocol = match self.protocol {
            Protocol::Sta => "sta",
            Protocol::Stirap => "stirap",
        };
        let path = if self.postselect { "post" } else { "direct" };
        format!("{}_{protocol}_{path}", self.shape.name())
    }
}

impl FromStr for Variant {
    type Err = QbError;
    /// Parses labels of the form `sine_sta_post` or `gaussian_stirap_direct`.
    fn from_str(s: &str) -> Result<Self, QbError> {
        let bad = || QbError::InvalidParameter(format!("variant `{s}` is not <shape>_<sta|stirap>_<post|direct>"));
        let mut parts = s.split('_');
        let (Some(shape), Some(protocol), Some(path), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let protocol = match protocol {
            "sta" => Protocol::Sta,
            "stirap" => Protocol::Stirap,
            _ => return Err(bad()),
        };
        let postselect = match path {
            "post" => true,
            "direct" => false,
            _ => return Err(bad()),
        };
        Ok(Self { shape: shape.parse()?, protocol, postselect })
    }
}

/// Everything that fixes one recharge run apart from the pulse family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargingSetup {
    pub levels: BatteryLevels,
    pub omega: f64,
    pub omega_tau_c: f64,
    pub epsilon: f64,
    /// Δ/Ω
    pub delta_one: f64,
    /// δ/Ω
    pub delta_two: f64,
    /// γ/Ω of the standard decoherence model while charging; 0 = closed.
    pub noise_gamma: f64,
    /// γ_f τ of the self-discharge preceding extraction.
    pub gamma_f_tau: f64,
    /// Minimum RK4 steps over [0, τ_c].
    pub steps: usize,
    pub method: RechargeMethod,
}

impl Default for ChargingSetup {
    fn default() -> Self {
        Self {
            levels: BatteryLevels::standard(),
            omega: 1.0,
            omega_tau_c: std::f64::consts::PI,
            epsilon: 0.0,
            delta_one: 0.0,
            delta_two: 0.0,
            noise_gamma: 0.0,
            gamma_f_tau: 0.5,
            steps: 10_000,
            method: RechargeMethod::Auto,
        }
    }
}

impl ChargingSetup {
    pub fn with(mut self, parameter: SweepParameter, value: f64) -> Self {
        match parameter {
            SweepParameter::Epsilon => self.epsilon = value,
            SweepParameter::DeltaOne => self.delta_one = value,
            SweepParameter::DeltaTwo => self.delta_two = value,
            SweepParameter::OmegaTauC => self.omega_tau_c = value,
            SweepParameter::NoiseGamma => self.noise_gamma = value,
            SweepParameter::GammaFTau => self.gamma_f_tau = value,
        }
        self
    }

    pub fn validate(&self) -> Result<(), QbError> {
        self.levels.validate()?;
        let ok = self.omega > 0.0
            && self.omega_tau_c > 0.0
            && self.noise_gamma >= 0.0
            && self.gamma_f_tau >= 0.0
            && [
                self.omega,
                self.omega_tau_c,
                self.epsilon,
                self.delta_one,
                self.delta_two,
                self.noise_gamma,
                self.gamma_f_tau,
            ]
            .iter()
            .all(|x| x.is_finite());
        if ok {
            Ok(())
        } else {
            Err(QbError::InvalidParameter(format!("invalid charging setup {self:?}")))
        }
    }

    pub fn tau_c(&self) -> f64 {
        self.omega_tau_c / self.omega
    }

    pub fn drive(&self, shape: ShapeKind) -> Result<DriveSpec, QbError> {
        Ok(shape.drive(self.omega, self.tau_c())?.with_errors(
            self.epsilon,
            self.delta_one * self.omega,
            self.delta_two * self.omega,
        ))
    }

    pub fn noise(&self) -> Option<DecoherenceSpec> {
        (self.noise_gamma > 0.0).then(|| DecoherenceSpec::standard(self.noise_gamma * self.omega))
    }

    /// |g⟩ after a successful postselection, otherwise the passive state
    /// left by extraction after a discharge of γ_f τ.
    pub fn initial_state(&self, postselect: bool) -> Result<DensityMatrix, QbError> {
        if postselect {
            return Ok(DensityMatrix::basis(Level::G));
        }
        let spec = DecoherenceSpec::standard(1.0);
        post_extraction_state(self.gamma_f_tau / spec.gamma_f, &spec)
    }

    pub fn run(&self, variant: &Variant, samples: usize) -> Result<RechargeRun, QbError> {
        self.validate()?;
        let drive = self.drive(variant.shape)?;
        let options = RechargeOptions { samples, steps: self.steps, method: self.method };
        let rho0 = self.initial_state(variant.postselect)?;
        recharge(&rho0, &drive, variant.protocol, self.noise().as_ref(), &self.levels, &options)
    }

    /// ξ(τ_c)/ω_f
    pub fn final_ergotropy(&self, variant: &Variant) -> Result<f64, QbError> {
        Ok(self.run(variant, 1)?.final_sample().ergotropy.ergotropy / self.levels.omega_f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    /// ξ(τ_c)/ω_f per variant, in variant order.
    pub xi: Vec<f64>,
}

pub fn sweep_point(
    setup: &ChargingSetup,
    parameter: SweepParameter,
    value: f64,
    variants: &[Variant],
) -> Result<SweepRow, QbError> {
    let at = setup.with(parameter, value);
    let xi = variants.iter().map(|v| at.final_ergotropy(v)).collect::<Result<_, _>>()?;
    Ok(SweepRow { value, xi })
}

pub fn run_sweep(setup: &ChargingSetup, axis: &SweepAxis, variants: &[Variant]) -> Result<Vec<SweepRow>, QbError> {
    axis.validate()?;
    axis.values().into_iter().map(|v| sweep_point(setup, axis.parameter, v, variants)).collect()
}
