//! The recharging cycle: |f⟩ → self-discharge → work extraction →
//! (optional) postselection on |g⟩ → recharge, with cost bookkeeping.

use serde::{Deserialize, Serialize};

use crate::dynamics::{crossing_times, discharged_state, evolve, DecoherenceSpec, TimeGrid};
use crate::ergotropy::{ergotropy, extraction_unitary, ErgotropyReport};
use crate::error::QbError;
use crate::pulses::{held_hamiltonian, sta_propagator, DriveSpec, Protocol};
use crate::quadrature::simpson_converged;
use crate::qutrit::{bare_hamiltonian, BatteryLevels, ComplexMatrix3, DensityMatrix, Level};

/// k_B · 10 mK / ħ in units of ω_f = 2π × 10 GHz.
pub const KT_10MK_OVER_OMEGA_F: f64 = 0.0208;

/// Below this P_g there is no state to renormalize.
pub const MIN_POSTSELECTION_PROBABILITY: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RechargeScenario {
    pub levels: BatteryLevels,
    /// Self-discharge time τ.
    pub discharge_duration: f64,
    pub decoherence: DecoherenceSpec,
    pub drive: DriveSpec,
    pub protocol: Protocol,
    pub postselect: bool,
    /// Decoherence acting while the drive is on.
    pub charging_noise: Option<DecoherenceSpec>,
    /// k_B T in the same units as the level energies.
    pub kt: f64,
}

impl RechargeScenario {
    pub fn validate(&self) -> Result<(), QbError> {
        self.levels.validate()?;
        self.decoherence.validate()?;
        self.drive.validate()?;
        if let Some(noise) = &self.charging_noise {
            noise.validate()?;
        }
        if !(self.discharge_duration.is_finite() && self.discharge_duration >= 0.0) {
            return Err(QbError::InvalidParameter(format!(
                "discharge duration must be finite and non-negative, got {}",
                self.discharge_duration
            )));
        }
        if !(self.kt.is_finite() && self.kt >= 0.0) {
            return Err(QbError::InvalidParameter(format!("kT must be non-negative, got {}", self.kt)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Projector {
    #[serde(rename = "M_g")]
    Ground,
    #[serde(rename = "M_f")]
    Full,
}

impl Projector {
    fn level(self) -> Level {
        match self {
            Self::Ground => Level::G,
            Self::Full => Level::F,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub projector: Projector,
    pub probability: f64,
    pub post_state: DensityMatrix,
}

/// Projective measurement onto a single level; the post-measurement state
/// is that level's projector.
pub fn measure(rho: &DensityMatrix, projector: Projector) -> Result<MeasurementOutcome, QbError> {
    let level = projector.level();
    let p = level.projector();
    let probability = (p * *rho.matrix() * p).trace().re;
    if probability < MIN_POSTSELECTION_PROBABILITY {
        return Err(QbError::PostselectionFailed(probability));
    }
    Ok(MeasurementOutcome { projector, probability, post_state: DensityMatrix::basis(level) })
}

pub fn postselect_ground(rho: &DensityMatrix) -> Result<MeasurementOutcome, QbError> {
    measure(rho, Projector::Ground)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub state: DensityMatrix,
    pub unitary: ComplexMatrix3,
    pub work: f64,
    pub warning: Option<String>,
}

/// Discharges |f⟩ for time τ and applies the optimal extraction unitary.
///
/// Before the first crossing τ₁ the populations are ordered ρ_ff > ρ_ee > ρ_gg
/// and the unitary is the g↔f swap. Past τ₁ the result is still the passive
/// state, but it no longer has that form, so a warning is attached.
pub fn post_extraction(tau: f64, spec: &DecoherenceSpec, levels: &BatteryLevels) -> Result<Extraction, QbError> {
    let h0 = bare_hamiltonian(levels);
    let rho = discharged_state(tau, spec)?;
    let unitary = extraction_unitary(&rho, &h0)?;
    let work = ergotropy(&rho, &h0)?.ergotropy;
    let state = rho.transformed(&unitary)?;
    let warning = match crossing_times(spec) {
        Ok(c) if tau >= c.tau1 => Some(format!("discharge time {tau} is not before the first crossing {}", c.tau1)),
        _ => None,
    };
    Ok(Extraction { state, unitary, work, warning })
}

pub fn post_extraction_state(tau: f64, spec: &DecoherenceSpec) -> Result<DensityMatrix, QbError> {
    Ok(post_extraction(tau, spec, &BatteryLevels::standard())?.state)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RechargeMethod {
    /// Closed-form propagator when it is exact, RK4 otherwise.
    Auto,
    Numeric,
    /// Runs both where the propagator applies and fails on disagreement.
    CrossCheck,
}

/// Largest element-wise disagreement tolerated in cross-check mode.
pub const CROSS_CHECK_TOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RechargeOptions {
    /// Number of sampling intervals over [0, τ_c].
    pub samples: usize,
    /// Minimum RK4 steps over [0, τ_c].
    pub steps: usize,
    pub method: RechargeMethod,
}

impl Default for RechargeOptions {
    fn default() -> Self {
        Self { samples: 100, steps: 10_000, method: RechargeMethod::Auto }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RechargeSample {
    pub t: f64,
    pub state: DensityMatrix,
    pub ergotropy: ErgotropyReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integration {
    Propagator,
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RechargeRun {
    pub integration: Integration,
    pub samples: Vec<RechargeSample>,
}

impl RechargeRun {
    pub fn final_sample(&self) -> &RechargeSample {
        self.samples.last().expect("a recharge run has at least two samples")
    }
}

fn propagator_applies(drive: &DriveSpec, protocol: Protocol, noise: Option<&DecoherenceSpec>) -> bool {
    let closed = noise.is_none_or(DecoherenceSpec::is_closed);
    let transitionless = match protocol {
        Protocol::Sta => drive.is_transitionless(),
        Protocol::Stirap => matches!(drive.shape, crate::pulses::PulseShape::Flat),
    };
    closed && transitionless && !drive.has_errors()
}

fn rk4_steps(drive: &DriveSpec, requested: usize, samples: usize) -> usize {
    // keep the largest frequency times dt at or below 5e-3
    let rate = drive.omega * (1.0 + drive.epsilon.abs()) + drive.delta_one.abs() + drive.delta_two.abs();
    let needed = (200.0 * rate * drive.tau_c).ceil() as usize;
    let steps = requested.max(needed).max(samples);
    steps.div_ceil(samples) * samples
}

/// Drives `rho0` over [0, τ_c], reporting the state and ergotropy at
/// `options.samples + 1` evenly spaced times.
pub fn recharge(
    rho0: &DensityMatrix,
    drive: &DriveSpec,
    protocol: Protocol,
    noise: Option<&DecoherenceSpec>,
    levels: &BatteryLevels,
    options: &RechargeOptions,
) -> Result<RechargeRun, QbError> {
    drive.validate()?;
    levels.validate()?;
    if options.samples == 0 {
        return Err(QbError::InvalidParameter("recharge needs at least one sampling interval".into()));
    }
    let h0 = bare_hamiltonian(levels);
    let n = options.samples;
    let analytic_ok = propagator_applies(drive, protocol, noise);
    // STIRAP with flat pulses carries no CD term either way
    let prop_drive = drive.with_cd(matches!(protocol, Protocol::Sta) && drive.cd_enabled);

    let analytic = || -> Result<Vec<(f64, DensityMatrix)>, QbError> {
        (0..=n)
            .map(|k| {
                let t = if k == n { drive.tau_c } else { drive.tau_c * k as f64 / n as f64 };
                let u = sta_propagator(&prop_drive, t)?;
                Ok((t, rho0.transformed(&u)?))
            })
            .collect()
    };
    let numeric = || -> Result<Vec<(f64, DensityMatrix)>, QbError> {
        let steps = rk4_steps(drive, options.steps, n);
        let grid = TimeGrid::new(0.0, drive.tau_c, steps)?;
        let closed = DecoherenceSpec::closed();
        let spec = noise.unwrap_or(&closed);
        let traj = evolve(rho0, |t| held_hamiltonian(drive, t, protocol), spec, &grid, steps / n)?;
        Ok(traj.points)
    };

    let (integration, points) = match (options.method, analytic_ok) {
        (RechargeMethod::Auto, true) => (Integration::Propagator, analytic()?),
        (RechargeMethod::CrossCheck, true) => {
            let a = analytic()?;
            let b = numeric()?;
            let mismatch =
                a.iter().zip(&b).map(|((_, x), (_, y))| x.matrix().max_abs_diff(y.matrix())).fold(0.0, f64::max);
            if mismatch > CROSS_CHECK_TOL {
                return Err(QbError::PropagatorMismatch(mismatch));
            }
            (Integration::Propagator, a)
        }
        _ => (Integration::Rk4, numeric()?),
    };
    let samples = points
        .into_iter()
        .map(|(t, state)| Ok(RechargeSample { t, state, ergotropy: ergotropy(&state, &h0)? }))
        .collect::<Result<Vec<_>, QbError>>()?;
    Ok(RechargeRun { integration, samples })
}

/// ω_f(ρ_gg − ρ_ff), the ceiling on ξ(τ_c) reachable from a diagonal
/// post-extraction state by the transfer unitary.
pub fn max_unitary_ergotropy(rho0: &DensityMatrix, levels: &BatteryLevels) -> Result<f64, QbError> {
    if rho0.max_coherence() > 1e-9 {
        return Err(QbError::InvalidState("expected a diagonal state".into()));
    }
    let [gg, _, ff] = rho0.populations();
    Ok(levels.omega_f * (gg - ff))
}

/// C = (1/τ_c) ∫₀^τc ‖H(t)‖ dt with the Hilbert–Schmidt norm √Tr[H²] of the
/// full control Hamiltonian (CD term included when enabled).
pub fn drive_cost(drive: &DriveSpec) -> Result<f64, QbError> {
    drive.validate()?;
    let norm = |t: f64| held_hamiltonian(drive, t, Protocol::Sta).frobenius_norm();
    Ok(simpson_converged(norm, 0.0, drive.tau_c, 1e-12) / drive.tau_c)
}

/// Closed form of [`drive_cost`] for error-free sine pulses with CD:
/// √2 · √(Ω² + (π/2τ_c)²) = √(8Ω²τ_c² + 2π²)/(2τ_c).
pub fn sine_cost_closed_form(omega: f64, tau_c: f64) -> f64 {
    (8.0 * omega * omega * tau_c * tau_c + 2.0 * std::f64::consts::PI.powi(2)).sqrt() / (2.0 * tau_c)
}

/// C_M = kT [S(ρ_before) − S(ρ_after)], entropies in nats.
pub fn measurement_cost(before: &DensityMatrix, after: &DensityMatrix, kt: f64) -> Result<f64, QbError> {
    if !(kt.is_finite() && kt >= 0.0) {
        return Err(QbError::InvalidParameter(format!("kT must be non-negative, got {kt}")));
    }
    Ok(kt * (before.entropy() - after.entropy()))
}

/// η = ξ/(ξ + C + C_M).
pub fn efficiency(xi: f64, drive_cost: f64, measurement_cost: f64) -> Result<f64, QbError> {
    if drive_cost < 0.0 || measurement_cost < 0.0 || !(xi > 0.0) {
        return Err(QbError::InvalidParameter(format!(
            "efficiency needs xi > 0 and non-negative costs (xi = {xi}, C = {drive_cost}, C_M = {measurement_cost})"
        )));
    }
    Ok(xi / (xi + drive_cost + measurement_cost))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostPath {
    /// Recharge straight from the post-extraction state; ξ_final = ω_f(ρ_gg − ρ_ff).
    Direct,
    /// Postselect on |g⟩ first; ξ_final = ω_f and the measurement is charged.
    Postselected,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub path: CostPath,
    pub xi_final: f64,
    pub drive_cost: f64,
    pub measurement_cost: f64,
    pub kt: f64,
    pub eta: f64,
}

impl CostReport {
    pub fn recompute_eta(&self) -> f64 {
        self.xi_final / (self.xi_final + self.drive_cost + self.measurement_cost)
    }
}

/// Cost and efficiency of recharging the post-extraction state reached after
/// discharge time τ.
pub fn cost_report(
    tau: f64,
    spec: &DecoherenceSpec,
    levels: &BatteryLevels,
    drive: &DriveSpec,
    kt: f64,
    path: CostPath,
) -> Result<CostReport, QbError> {
    let extracted = post_extraction(tau, spec, levels)?.state;
    let c = drive_cost(drive)?;
    let (xi_final, measurement_cost) = match path {
        CostPath::Direct => (max_unitary_ergotropy(&extracted, levels)?, 0.0),
        CostPath::Postselected => {
            let outcome = postselect_ground(&extracted)?;
            (levels.omega_f, measurement_cost(&extracted, &outcome.post_state, kt)?)
        }
    };
    let eta = efficiency(xi_final, c, measurement_cost)?;
    Ok(CostReport { path, xi_final, drive_cost: c, measurement_cost, kt, eta })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub scenario: RechargeScenario,
    pub charged: DensityMatrix,
    pub discharged: DensityMatrix,
    pub discharged_ergotropy: ErgotropyReport,
    pub extracted: DensityMatrix,
    pub extracted_work: f64,
    pub measurement: Option<MeasurementOutcome>,
    pub recharge: RechargeRun,
    pub final_state: DensityMatrix,
    pub final_ergotropy: ErgotropyReport,
    /// Ceiling ω_f(ρ_gg − ρ_ff) of the recharge starting state.
    pub xi_max: f64,
    pub cost: CostReport,
    pub warnings: Vec<String>,
}

/// Runs every stage of the cycle for `scenario`. A failed postselection
/// (P_g below [`MIN_POSTSELECTION_PROBABILITY`]) ends the cycle with an error.
pub fn full_cycle(scenario: &RechargeScenario, options: &RechargeOptions) -> Result<CycleReport, QbError> {
    scenario.validate()?;
    let levels = &scenario.levels;
    let h0 = bare_hamiltonian(levels);
    let charged = DensityMatrix::basis(Level::F);
    let discharged = discharged_state(scenario.discharge_duration, &scenario.decoherence)?;
    let discharged_ergotropy = ergotropy(&discharged, &h0)?;
    let extraction = post_extraction(scenario.discharge_duration, &scenario.decoherence, levels)?;
    let mut warnings: Vec<String> = extraction.warning.iter().cloned().collect();

    let measurement = if scenario.postselect { Some(postselect_ground(&extraction.state)?) } else { None };
    let start = measurement.as_ref().map_or(extraction.state, |m| m.post_state);
    let xi_max = max_unitary_ergotropy(&start, levels)?;

    let recharge =
        recharge(&start, &scenario.drive, scenario.protocol, scenario.charging_noise.as_ref(), levels, options)?;
    let last = *recharge.final_sample();

    let c = drive_cost(&scenario.drive)?;
    let (path, c_m) = match &measurement {
        Some(m) => (CostPath::Postselected, measurement_cost(&extraction.state, &m.post_state, scenario.kt)?),
        None => (CostPath::Direct, 0.0),
    };
    let eta = if xi_max > 0.0 {
        efficiency(xi_max, c, c_m)?
    } else {
        warnings.push("nothing to recharge: the starting state has no population inversion to create".into());
        0.0
    };
    let cost = CostReport { path, xi_final: xi_max, drive_cost: c, measurement_cost: c_m, kt: scenario.kt, eta };

    Ok(CycleReport {
        scenario: *scenario,
        charged,
        discharged,
        discharged_ergotropy,
        extracted: extraction.state,
        extracted_work: extraction.work,
        measurement,
        recharge,
        final_state: last.state,
        final_ergotropy: last.ergotropy,
        xi_max,
        cost,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub hold_time: f64,
    pub initial_ergotropy: f64,
    pub max_drift: f64,
}

/// Holds `state` under the post-window drive (Ω₁ = Ω₁(τ_c), Ω₂ = Ω_CD = 0)
/// for `hold_time` and reports the largest excursion of ξ.
pub fn stability_check(
    drive: &DriveSpec,
    state: &DensityMatrix,
    hold_time: f64,
    levels: &BatteryLevels,
) -> Result<StabilityReport, QbError> {
    drive.validate()?;
    if !(hold_time.is_finite() && hold_time >= 0.0) {
        return Err(QbError::InvalidParameter(format!("hold time must be non-negative, got {hold_time}")));
    }
    let h0 = bare_hamiltonian(levels);
    let initial = ergotropy(state, &h0)?.ergotropy;
    if hold_time == 0.0 {
        return Ok(StabilityReport { hold_time, initial_ergotropy: initial, max_drift: 0.0 });
    }
    let t0 = drive.tau_c;
    let rate = held_hamiltonian(drive, t0 + hold_time, Protocol::Sta).frobenius_norm();
    let steps = ((400.0 * rate * hold_time).ceil() as usize).max(1000);
    let grid = TimeGrid::new(t0, t0 + hold_time, steps)?;
    let every = (steps / 500).max(1);
    let traj = evolve(state, |t| held_hamiltonian(drive, t, Protocol::Sta), &DecoherenceSpec::closed(), &grid, every)?;
    let mut max_drift: f64 = 0.0;
    for (_, rho) in &traj.points {
        max_drift = max_drift.max((ergotropy(rho, &h0)?.ergotropy - initial).abs());
    }
    Ok(StabilityReport { hold_time, initial_ergotropy: initial, max_drift })
}
