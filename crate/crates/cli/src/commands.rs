use qbattery::dynamics::{analytic_discharge, crossing_times, evolve, TimeGrid};
use qbattery::ergotropy::ergotropy_diagonal;
use qbattery::protocol::{cost_report, post_extraction, sine_cost_closed_form, CostPath, RechargeRun};
use qbattery::pulses::{Protocol, PulseShape};
use qbattery::qutrit::{bare_hamiltonian, DensityMatrix, Level};
use qbattery::sweep::{sweep_point, SweepRow, Variant};
use rayon::prelude::*;
use serde_json::json;

use crate::output::{num, Report, Table};
use crate::{CliError, Config};

/// Populations and ξ/ω_f of |f⟩ left to decay, sampled uniformly in γ_e t.
pub fn discharge(cfg: &Config, numeric: bool) -> Result<Report, CliError> {
    let levels = cfg.levels()?;
    let spec = cfg.discharge_spec();
    let mut table =
        Table::new(&cfg.hash("discharge", numeric), &["t_gamma_e", "rho_gg", "rho_ee", "rho_ff", "xi_over_omega_f"])?;
    let mut report = Report::default();
    match crossing_times(&spec) {
        Ok(c) => {
            table.comment(format!("tau1_gamma_e={}", num(c.tau1 * spec.gamma_e)));
            table.comment(format!("tau2_gamma_e={}", num(c.tau2 * spec.gamma_e)));
            table.comment(format!("tau3_gamma_e={}", num(c.tau3 * spec.gamma_e)));
        }
        Err(e) => report.warnings.push(format!("crossing times unavailable: {e}")),
    }

    let t_end = cfg.t_max / spec.gamma_e;
    let n = cfg.samples;
    let populations: Vec<(f64, [f64; 3])> = if numeric {
        let per_sample = cfg.steps.div_ceil(n);
        let grid = TimeGrid::new(0.0, t_end, per_sample * n)?;
        let h0 = bare_hamiltonian(&levels);
        let traj = evolve(&DensityMatrix::basis(Level::F), |_| h0, &spec, &grid, per_sample)?;
        traj.points.iter().map(|(t, rho)| (*t, rho.populations())).collect()
    } else {
        (0..=n)
            .map(|k| {
                let t = t_end * k as f64 / n as f64;
                Ok((t, analytic_discharge(t, &spec)?))
            })
            .collect::<Result<_, qbattery::QbError>>()?
    };
    for (t, p) in populations {
        let xi = ergotropy_diagonal(p, &levels)? / levels.omega_f;
        table.row(&[t * spec.gamma_e, p[0], p[1], p[2], xi])?;
    }
    report.text = table.finish()?;
    Ok(report)
}

fn charging_warnings(cfg: &Config, variants: &[Variant]) -> Vec<String> {
    let mut out = Vec::new();
    if variants.iter().any(|v| !v.postselect) {
        let spec = cfg.discharge_spec();
        if let Ok(ex) = post_extraction(cfg.gamma_f_tau / spec.gamma_f, &spec, &cfg.setup(false).levels) {
            out.extend(ex.warning);
        }
    }
    out
}

fn run_variant(cfg: &Config, numeric: bool, variant: &Variant) -> Result<RechargeRun, CliError> {
    Ok(cfg.setup(numeric).run(variant, cfg.samples)?)
}

fn state_columns(rho: &DensityMatrix, xi: f64, omega_f: f64) -> [f64; 5] {
    let p = rho.populations();
    [p[0], p[1], p[2], rho.matrix().trace().re, xi / omega_f]
}

/// Trajectory of one recharge from the configured starting state.
pub fn recharge(cfg: &Config, numeric: bool) -> Result<Report, CliError> {
    let variant = cfg.variant();
    let run = run_variant(cfg, numeric, &variant)?;
    let setup = cfg.setup(numeric);
    let mut table = Table::new(
        &cfg.hash("recharge", numeric),
        &["t_over_tau_c", "rho_gg", "rho_ee", "rho_ff", "trace", "xi_over_omega_f"],
    )?;
    table.comment(format!("variant={}", variant.label()));
    table.comment(format!("integration={}", integration_name(&run)));
    for s in &run.samples {
        let mut row = vec![s.t / setup.tau_c()];
        row.extend(state_columns(&s.state, s.ergotropy.ergotropy, setup.levels.omega_f));
        table.row(&row)?;
    }
    Ok(Report { text: table.finish()?, warnings: charging_warnings(cfg, &[variant]) })
}

fn integration_name(run: &RechargeRun) -> &'static str {
    match run.integration {
        qbattery::protocol::Integration::Propagator => "propagator",
        qbattery::protocol::Integration::Rk4 => "rk4",
    }
}

/// STA and STIRAP side by side for the configured shape and path.
pub fn compare(cfg: &Config, numeric: bool) -> Result<Report, CliError> {
    let sta = Variant { protocol: Protocol::Sta, ..cfg.variant() };
    let stirap = Variant { protocol: Protocol::Stirap, ..cfg.variant() };
    let (a, b) = (run_variant(cfg, numeric, &sta)?, run_variant(cfg, numeric, &stirap)?);
    let setup = cfg.setup(numeric);
    let mut header = vec!["t_over_tau_c"];
    header.extend(["sta_rho_gg", "sta_rho_ee", "sta_rho_ff", "sta_trace", "sta_xi_over_omega_f"]);
    header.extend(["stirap_rho_gg", "stirap_rho_ee", "stirap_rho_ff", "stirap_trace", "stirap_xi_over_omega_f"]);
    let mut table = Table::new(&cfg.hash("compare", numeric), &header)?;
    table.comment(format!("variants={},{}", sta.label(), stirap.label()));
    for (x, y) in a.samples.iter().zip(&b.samples) {
        let mut row = vec![x.t / setup.tau_c()];
        row.extend(state_columns(&x.state, x.ergotropy.ergotropy, setup.levels.omega_f));
        row.extend(state_columns(&y.state, y.ergotropy.ergotropy, setup.levels.omega_f));
        table.row(&row)?;
    }
    Ok(Report { text: table.finish()?, warnings: charging_warnings(cfg, &[sta]) })
}

/// Final ξ/ω_f for every variant across the [sweep] axis. Points run in
/// parallel on the current rayon pool; rows keep axis order.
pub fn sweep(cfg: &Config, numeric: bool) -> Result<Report, CliError> {
    let axis = cfg.axis()?;
    let variants = cfg.variants()?;
    let setup = cfg.setup(numeric);
    let rows: Vec<SweepRow> = axis
        .values()
        .into_par_iter()
        .map(|v| sweep_point(&setup, axis.parameter, v, &variants))
        .collect::<Result<_, _>>()?;

    let labels: Vec<String> = variants.iter().map(Variant::label).collect();
    let mut header = vec![axis.parameter.name()];
    header.extend(labels.iter().map(String::as_str));
    let mut table = Table::new(&cfg.hash("sweep", numeric), &header)?;
    for r in rows {
        let mut row = vec![r.value];
        row.extend(r.xi);
        table.row(&row)?;
    }
    Ok(Report { text: table.finish()?, warnings: charging_warnings(cfg, &variants) })
}

/// Drive and measurement cost with efficiency for both recharge paths.
pub fn cost(cfg: &Config, numeric: bool) -> Result<Report, CliError> {
    let levels = cfg.levels()?;
    let spec = cfg.discharge_spec();
    let tau = cfg.gamma_f_tau / spec.gamma_f;
    let drive = cfg.setup(numeric).drive(cfg.shape)?;
    let direct = cost_report(tau, &spec, &levels, &drive, cfg.kt, CostPath::Direct)?;
    let post = cost_report(tau, &spec, &levels, &drive, cfg.kt, CostPath::Postselected)?;
    let closed = (matches!(drive.shape, PulseShape::Sine) && !drive.has_errors())
        .then(|| sine_cost_closed_form(drive.omega, drive.tau_c));
    let value = json!({
        "config_hash": cfg.hash("cost", numeric),
        "drive": drive,
        "drive_cost_over_omega": direct.drive_cost / drive.omega,
        "closed_form_cost": closed,
        "closed_form_relative_error": closed.map(|c| (direct.drive_cost - c).abs() / c),
        "direct": direct,
        "postselected": post,
    });
    let text = serde_json::to_string_pretty(&value).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    Ok(Report { text, warnings: charging_warnings(cfg, &[Variant { postselect: false, ..cfg.variant() }]) })
}
