use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use qbattery::dynamics::DecoherenceSpec;
use qbattery::protocol::RechargeMethod;
use qbattery::pulses::Protocol;
use qbattery::qutrit::BatteryLevels;
use qbattery::sweep::{AxisScale, ChargingSetup, ShapeKind, SweepAxis, SweepParameter, Variant};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// One scenario file. Every key is optional; missing keys take the defaults
/// below. Rates and times are in units where Ω (charging) or γ (discharge)
/// is one unless stated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Subcommand this file is meant for. When set it must match the one invoked.
    pub command: Option<String>,
    pub omega_e: f64,
    pub omega_f: f64,

    /// γ_e of the discharge; γ_f = 1.5γ, dephasing 2γ.
    pub gamma: f64,
    /// Discharge window in units of 1/γ_e.
    pub t_max: f64,
    /// γ_f τ of the discharge preceding extraction and recharge.
    pub gamma_f_tau: f64,

    pub shape: ShapeKind,
    pub protocol: Protocol,
    pub postselect: bool,
    pub omega: f64,
    pub omega_tau_c: f64,
    pub epsilon: f64,
    /// Δ/Ω
    pub delta_one: f64,
    /// δ/Ω
    pub delta_two: f64,
    /// γ/Ω while charging.
    pub noise_gamma: f64,
    /// Thermal energy kT in the same units as ω_f.
    pub kt: f64,

    /// Output intervals (rows minus one) for time series.
    pub samples: usize,
    /// Minimum RK4 steps.
    pub steps: usize,
    /// Sweep columns as `<shape>_<sta|stirap>_<post|direct>`; empty means the
    /// single variant given by shape/protocol/postselect.
    pub variants: Vec<String>,
    pub out: Option<PathBuf>,
    pub sweep: Option<SweepTable>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepTable {
    pub parameter: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: AxisScale,
}

impl Default for Config {
    fn default() -> Self {
        let setup = ChargingSetup::default();
        Self {
            command: None,
            omega_e: setup.levels.omega_e,
            omega_f: setup.levels.omega_f,
            gamma: 1.0,
            t_max: 3.0,
            gamma_f_tau: setup.gamma_f_tau,
            shape: ShapeKind::Sine,
            protocol: Protocol::Sta,
            postselect: false,
            omega: setup.omega,
            omega_tau_c: PI,
            epsilon: 0.0,
            delta_one: 0.0,
            delta_two: 0.0,
            noise_gamma: 0.0,
            kt: 0.0,
            samples: 100,
            steps: setup.steps,
            variants: Vec::new(),
            out: None,
            sweep: None,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        self.levels()?;
        if self.samples == 0 || self.steps == 0 {
            return Err(CliError::Config("samples and steps must be positive".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite() && self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(CliError::Config(format!(
                "gamma ({}) and t_max ({}) must be positive",
                self.gamma, self.t_max
            )));
        }
        if !(self.kt >= 0.0 && self.kt.is_finite()) {
            return Err(CliError::Config(format!("kt must be non-negative, got {}", self.kt)));
        }
        self.setup(false).validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.variants()?;
        if let Some(s) = &self.sweep {
            self.axis_from(s)?;
        }
        Ok(())
    }

    pub fn ensure_command(&self, invoked: &str) -> Result<(), CliError> {
        match &self.command {
            Some(c) if c != invoked => Err(CliError::Config(format!("config is for `{c}`, not `{invoked}`"))),
            _ => Ok(()),
        }
    }

    pub fn levels(&self) -> Result<BatteryLevels, CliError> {
        BatteryLevels::new(self.omega_e, self.omega_f).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn discharge_spec(&self) -> DecoherenceSpec {
        DecoherenceSpec::standard(self.gamma)
    }

    pub fn setup(&self, numeric: bool) -> ChargingSetup {
        ChargingSetup {
            levels: BatteryLevels { omega_e: self.omega_e, omega_f: self.omega_f },
            omega: self.omega,
            omega_tau_c: self.omega_tau_c,
            epsilon: self.epsilon,
            delta_one: self.delta_one,
            delta_two: self.delta_two,
            noise_gamma: self.noise_gamma,
            gamma_f_tau: self.gamma_f_tau,
            steps: self.steps,
            method: if numeric { RechargeMethod::Numeric } else { RechargeMethod::Auto },
        }
    }

    pub fn variant(&self) -> Variant {
        Variant { shape: self.shape, protocol: self.protocol, postselect: self.postselect }
    }

    pub fn variants(&self) -> Result<Vec<Variant>, CliError> {
        if self.variants.is_empty() {
            return Ok(vec![self.variant()]);
        }
        self.variants
            .iter()
            .map(|v| v.parse().map_err(|e: qbattery::QbError| CliError::Config(e.to_string())))
            .collect()
    }

    pub fn axis(&self) -> Result<SweepAxis, CliError> {
        let table = self.sweep.as_ref().ok_or_else(|| CliError::Config("sweep needs a [sweep] table".into()))?;
        self.axis_from(table)
    }

    fn axis_from(&self, t: &SweepTable) -> Result<SweepAxis, CliError> {
        let parameter: SweepParameter =
            t.parameter.parse().map_err(|e: qbattery::QbError| CliError::Config(e.to_string()))?;
        let axis = SweepAxis { parameter, min: t.min, max: t.max, points: t.points, scale: t.scale };
        axis.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(axis)
    }

    /// SHA-256 over the canonical JSON of everything that affects the output.
    pub fn hash(&self, command: &str, numeric: bool) -> String {
        let mut canonical = self.clone();
        canonical.out = None;
        canonical.command = None;
        let json = serde_json::to_string(&(command, numeric, &canonical)).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(Config::parse("omgea = 2"), Err(CliError::Config(_))));
        assert!(matches!(Config::parse("omega_e = 2.0"), Err(CliError::Config(_))));
        assert!(matches!(Config::parse("samples = 0"), Err(CliError::Config(_))));
        assert!(matches!(Config::parse("variants = [\"sine_sta\"]"), Err(CliError::Config(_))));
        assert!(matches!(Config::parse("shape = \"square\""), Err(CliError::Config(_))));
        let bad_axis = "[sweep]\nparameter = \"noise_gamma\"\nmin = 0.0\nmax = 1.0\npoints = 5\nscale = \"log\"";
        assert!(matches!(Config::parse(bad_axis), Err(CliError::Config(_))));
    }

    #[test]
    fn parses_sweep_and_variants() {
        let cfg = Config::parse(
            "variants = [\"sine_sta_post\", \"gaussian_stirap_direct\"]\n[sweep]\nparameter = \"epsilon\"\nmin = -0.2\nmax = 0.2\npoints = 5\n",
        )
        .unwrap();
        assert_eq!(cfg.variants().unwrap().len(), 2);
        let axis = cfg.axis().unwrap();
        assert_eq!(axis.parameter, SweepParameter::Epsilon);
        assert_eq!(axis.scale, AxisScale::Linear);
    }

    #[test]
    fn hash_ignores_output_path_only() {
        let a = Config::default();
        let mut b = a.clone();
        b.out = Some("x.csv".into());
        assert_eq!(a.hash("sweep", false), b.hash("sweep", false));
        assert_ne!(a.hash("sweep", false), a.hash("sweep", true));
        assert_ne!(a.hash("sweep", false), a.hash("recharge", false));
        b.epsilon = 1e-9;
        assert_ne!(a.hash("sweep", false), b.hash("sweep", false));
        assert_eq!(a.hash("cost", false).len(), 64);
    }

    #[test]
    fn command_guard() {
        let cfg = Config::parse("command = \"discharge\"").unwrap();
        assert!(cfg.ensure_command("discharge").is_ok());
        assert!(cfg.ensure_command("sweep").is_err());
    }
}
