//! WebAssembly bindings for the single-page demo in `www/`.
//!
//! Each export returns a flat `Float64Array` of fixed-width rows so the page
//! can plot without any deserialization.

use qbattery::dynamics::{analytic_discharge, DecoherenceSpec};
use qbattery::ergotropy::ergotropy_diagonal;
use qbattery::qutrit::BatteryLevels;
use qbattery::sweep::{ChargingSetup, SweepAxis, SweepParameter, Variant};
use qbattery::QbError;
use wasm_bindgen::prelude::*;

/// Values per row in [`discharge_curve`] and [`recharge_trajectory`].
pub const STATE_ROW: usize = 5;

/// Rows of (γ_e t, ρ_gg, ρ_ee, ρ_ff, ξ/ω_f) at the standard rates.
pub fn discharge_rows(t_max: f64, samples: usize) -> Result<Vec<f64>, QbError> {
    if t_max.is_nan() || t_max <= 0.0 || samples == 0 {
        return Err(QbError::InvalidParameter(format!("t_max {t_max}, samples {samples}")));
    }
    let spec = DecoherenceSpec::standard(1.0);
    let levels = BatteryLevels::standard();
    let mut out = Vec::with_capacity((samples + 1) * STATE_ROW);
    for k in 0..=samples {
        let t = t_max * k as f64 / samples as f64;
        let p = analytic_discharge(t, &spec)?;
        out.extend([t, p[0], p[1], p[2], ergotropy_diagonal(p, &levels)? / levels.omega_f]);
    }
    Ok(out)
}

/// Rows of (t/τ_c, ρ_gg, ρ_ee, ρ_ff, ξ/ω_f) for one recharge.
pub fn recharge_rows(
    variant: &str,
    omega_tau_c: f64,
    gamma_f_tau: f64,
    noise_gamma: f64,
    samples: usize,
) -> Result<Vec<f64>, QbError> {
    let variant: Variant = variant.parse()?;
    let setup = ChargingSetup { omega_tau_c, gamma_f_tau, noise_gamma, steps: 4000, ..ChargingSetup::default() };
    let run = setup.run(&variant, samples.max(1))?;
    let mut out = Vec::with_capacity(run.samples.len() * STATE_ROW);
    for s in &run.samples {
        let p = s.state.populations();
        out.extend([s.t / setup.tau_c(), p[0], p[1], p[2], s.ergotropy.ergotropy / setup.levels.omega_f]);
    }
    Ok(out)
}

/// Rows of (value, ξ/ω_f) for a linear sweep of one error parameter.
pub fn sweep_rows(parameter: &str, min: f64, max: f64, points: usize, variant: &str) -> Result<Vec<f64>, QbError> {
    let parameter: SweepParameter = parameter.parse()?;
    let variant: Variant = variant.parse()?;
    let axis = SweepAxis { parameter, min, max, points, scale: Default::default() };
    axis.validate()?;
    let setup = ChargingSetup { steps: 2000, ..ChargingSetup::default() };
    let mut out = Vec::with_capacity(points * 2);
    for v in axis.values() {
        out.extend([v, setup.with(parameter, v).final_ergotropy(&variant)?]);
    }
    Ok(out)
}

fn js(e: QbError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn discharge_curve(t_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    discharge_rows(t_max, samples).map_err(js)
}

#[wasm_bindgen]
pub fn recharge_trajectory(
    variant: &str,
    omega_tau_c: f64,
    gamma_f_tau: f64,
    noise_gamma: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    recharge_rows(variant, omega_tau_c, gamma_f_tau, noise_gamma, samples).map_err(js)
}

#[wasm_bindgen]
pub fn robustness_sweep(
    parameter: &str,
    min: f64,
    max: f64,
    points: usize,
    variant: &str,
) -> Result<Vec<f64>, JsError> {
    sweep_rows(parameter, min, max, points, variant).map_err(js)
}
