//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qbattery::dynamics::{
    analytic_discharge, crossing_times, evolve, first_crossing_closed_form, propagate_unitary, DecoherenceSpec,
    TimeGrid,
};
use qbattery::ergotropy::{ergotropy, ergotropy_diagonal, extraction_unitary};
use qbattery::protocol::{
    cost_report, drive_cost, max_unitary_ergotropy, measurement_cost, post_extraction_state, postselect_ground,
    recharge, CostPath, RechargeMethod, RechargeOptions, KT_10MK_OVER_OMEGA_F,
};
use qbattery::pulses::two_photon::{charge_two_photon, TwoPhotonSpec};
use qbattery::pulses::{control_hamiltonian, envelopes, mixing_angle, sta_propagator, DriveSpec, Protocol};
use qbattery::qutrit::{bare_hamiltonian, hermitian_eig3, BatteryLevels, ComplexMatrix3, DensityMatrix, Level};
use qbattery::sweep::{ChargingSetup, ShapeKind, SweepParameter, Variant};
use qbattery::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Graphical tolerance for numbers read off plots, in units of ω_f.
const PLOT_TOL: f64 = 0.02;

struct Check {
    ok: bool,
    detail: String,
}

#[derive(Default)]
struct Outcome {
    checks: Vec<Check>,
}

impl Outcome {
    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check { ok, detail: detail.into() });
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

fn standard() -> BatteryLevels {
    BatteryLevels::standard()
}

fn variant(shape: ShapeKind, protocol: Protocol, postselect: bool) -> Variant {
    Variant { shape, protocol, postselect }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn self_discharge(out: &mut Outcome) {
    let spec = DecoherenceSpec::standard(1.0);
    let steps = 10_000;
    let grid = TimeGrid::new(0.0, 3.0, steps).unwrap();
    let traj = evolve(&DensityMatrix::basis(Level::F), |_| ComplexMatrix3::zeros(), &spec, &grid, 10).unwrap();
    let worst = traj
        .points
        .iter()
        .map(|(t, rho)| {
            let exact = analytic_discharge(*t, &spec).unwrap();
            (0..3).map(|i| (rho.populations()[i] - exact[i]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    out.check(worst <= 1e-6, format!("RK4 vs analytic {worst:.1e}"));

    let tau1 = first_crossing_closed_form(&spec).unwrap();
    let expected = 2.0 * (4.0f64 / 3.0).ln();
    let root = crossing_times(&spec).unwrap().tau1;
    out.check(
        (tau1 - expected).abs() <= 1e-9 && (root - expected).abs() <= 1e-9,
        format!("tau1 = {tau1:.10} (root finder {root:.10})"),
    );

    let p_g = postselect_ground(&post_extraction_state(tau1, &spec).unwrap()).unwrap().probability;
    out.check(p_g > 0.40 && within(p_g, 0.42, 0.005), format!("P_g(tau1) = {p_g:.4}"));
}

fn recharge_without_postselection(out: &mut Outcome) {
    let spec = DecoherenceSpec::standard(1.0);
    let start = post_extraction_state(0.5 / spec.gamma_f, &spec).unwrap();
    let drive = DriveSpec::sine(1.0, PI).unwrap();
    let opts = RechargeOptions { method: RechargeMethod::CrossCheck, ..Default::default() };
    let end = *recharge(&start, &drive, Protocol::Sta, None, &standard(), &opts).unwrap().final_sample();
    let p0 = start.populations();
    let p1 = end.state.populations();
    let swap = (p1[0] - p0[2]).abs().max((p1[2] - p0[0]).abs()).max((p1[1] - p0[1]).abs());
    out.check(swap <= 1e-6, format!("g<->f swap error {swap:.1e}"));
    // the ± 1e-4 is read in units of ω_f
    let xi = end.ergotropy.ergotropy / standard().omega_f;
    out.check(within(xi, 0.6065 - 0.0635, 1e-4), format!("xi/w_f = {xi:.5}"));
}

fn recharge_with_postselection(out: &mut Outcome) {
    let setup = ChargingSetup::default();
    for shape in [ShapeKind::Sine, ShapeKind::Gaussian] {
        let v = variant(shape, Protocol::Sta, true);
        let mut worst: f64 = 0.0;
        let mut at = None;
        for x in linspace(0.2, 10.0, 50) {
            let xi = setup.with(SweepParameter::OmegaTauC, x).final_ergotropy(&v).unwrap();
            if (1.0 - xi).abs() > worst {
                worst = (1.0 - xi).abs();
                at = Some(x);
            }
        }
        let deficit = worst * standard().omega_f;
        let place = at.map(|x| format!(" at Wt_c = {x:.2}")).unwrap_or_default();
        out.check(deficit <= 1e-6, format!("{}: max |xi - w_f| {deficit:.2e}{place}", shape.name()));
    }
}

fn periodic_maximum(out: &mut Outcome) {
    let setup = ChargingSetup::default();
    let xi_max = max_unitary_ergotropy(&setup.initial_state(false).unwrap(), &standard()).unwrap() / standard().omega_f;
    let v = variant(ShapeKind::Sine, Protocol::Sta, false);
    let at = |x: f64| setup.with(SweepParameter::OmegaTauC, x).final_ergotropy(&v).unwrap();
    for k in 1..=3 {
        let xi = at(k as f64 * PI);
        out.check(within(xi, xi_max, 1e-9), format!("k={k}: {:.1e}", xi - xi_max));
    }
    for x in [1.5 * PI, 2.5 * PI] {
        let xi = at(x);
        out.check(xi < xi_max - 1e-6, format!("dip at {:.1}pi: {xi:.4}", x / PI));
    }
}

fn intensity_error(out: &mut Outcome) {
    let setup = ChargingSetup::default();
    let gauss = variant(ShapeKind::Gaussian, Protocol::Sta, true);
    let min = linspace(-0.2, 0.2, 41)
        .into_iter()
        .map(|e| setup.with(SweepParameter::Epsilon, e).final_ergotropy(&gauss).unwrap())
        .fold(f64::INFINITY, f64::min);
    out.check(min >= 0.98, format!("gaussian min {min:.4}"));
    let flat = variant(ShapeKind::Flat, Protocol::Sta, true);
    for e in [-0.2, 0.2] {
        let xi = setup.with(SweepParameter::Epsilon, e).final_ergotropy(&flat).unwrap();
        out.check(within(xi, 0.85, PLOT_TOL), format!("flat({e:+}) {xi:.4}"));
    }
}

fn detuning(out: &mut Outcome) {
    let setup = ChargingSetup::default();
    let grid = linspace(-0.5, 0.5, 21);
    let min_over = |p: SweepParameter, shape: ShapeKind| {
        let v = variant(shape, Protocol::Sta, true);
        grid.iter().map(|&x| setup.with(p, x).final_ergotropy(&v).unwrap()).fold(f64::INFINITY, f64::min)
    };
    let g = min_over(SweepParameter::DeltaTwo, ShapeKind::Gaussian);
    let s = min_over(SweepParameter::DeltaTwo, ShapeKind::Sine);
    out.check(g >= 0.98, format!("delta: gaussian min {g:.4}"));
    out.check(s >= 0.93, format!("sine min {s:.4}"));
    for shape in [ShapeKind::Sine, ShapeKind::Gaussian] {
        let m = min_over(SweepParameter::DeltaOne, shape);
        out.check(m >= 0.99, format!("Delta: {} min {m:.4}", shape.name()));
    }
    let flat = variant(ShapeKind::Flat, Protocol::Sta, true);
    for d in [-0.5, 0.5] {
        let xi = setup.with(SweepParameter::DeltaOne, d).final_ergotropy(&flat).unwrap();
        out.check(within(xi, 0.86, PLOT_TOL), format!("flat({d:+}) {xi:.4}"));
    }
}

fn charging_decoherence(out: &mut Outcome) {
    let setup = ChargingSetup::default();
    let at = |shape: ShapeKind, gamma: f64| {
        setup.with(SweepParameter::NoiseGamma, gamma).final_ergotropy(&variant(shape, Protocol::Sta, true)).unwrap()
    };
    let s3 = at(ShapeKind::Sine, 1e-3);
    out.check((0.96..=0.99).contains(&s3), format!("sine(1e-3) {s3:.4}"));
    let s2 = at(ShapeKind::Sine, 1e-2);
    out.check(within(s2, 0.85, PLOT_TOL), format!("sine(1e-2) {s2:.4}"));
    let g_low = [1e-4, 1e-3].map(|g| at(ShapeKind::Gaussian, g));
    out.check(g_low.iter().all(|&x| x >= 0.99), format!("gaussian(<=1e-3) {:.4}", g_low[1]));
    let g2 = at(ShapeKind::Gaussian, 1e-2);
    out.check(within(g2, 0.89, PLOT_TOL), format!("gaussian(1e-2) {g2:.4}"));
}

fn cost_and_efficiency(out: &mut Outcome) {
    let levels = standard();
    let omega = 0.001 * levels.omega_f;
    let drive = DriveSpec::sine(omega, PI / omega).unwrap();
    let c = drive_cost(&drive).unwrap();
    out.check(within(c / omega, 1.5, 1e-9), format!("C = {:.6} W", c / omega));

    let spec = DecoherenceSpec::standard(1.0);
    let tau = 0.5 / spec.gamma_f;
    let kt = KT_10MK_OVER_OMEGA_F * levels.omega_f;
    let direct = cost_report(tau, &spec, &levels, &drive, kt, CostPath::Direct).unwrap();
    out.check(within(direct.eta, 0.997, 0.001), format!("eta direct {:.3}%", 100.0 * direct.eta));

    let start = post_extraction_state(tau, &spec).unwrap();
    let c_m = measurement_cost(&start, &DensityMatrix::basis(Level::G), kt).unwrap() / levels.omega_f;
    out.check(within(c_m, 0.017, 0.001), format!("C_M = {c_m:.4} w_f"));
    let post = cost_report(tau, &spec, &levels, &drive, kt, CostPath::Postselected).unwrap();
    out.check(within(post.eta, 0.982, 0.002), format!("eta post {:.3}%", 100.0 * post.eta));
}

fn sta_versus_stirap(out: &mut Outcome) {
    let setup = ChargingSetup::default().with(SweepParameter::OmegaTauC, 5.0);
    let ff = |shape, protocol| {
        setup.run(&variant(shape, protocol, true), 1).unwrap().final_sample().state.population(Level::F)
    };
    let sine = ff(ShapeKind::Sine, Protocol::Stirap);
    out.check(within(sine, 0.9, 0.03), format!("STIRAP sine rho_ff {sine:.3}"));
    let gauss = ff(ShapeKind::Gaussian, Protocol::Stirap);
    out.check(gauss < 0.1, format!("STIRAP gaussian rho_ff {gauss:.3}"));
    for shape in [ShapeKind::Sine, ShapeKind::Gaussian] {
        let p = ff(shape, Protocol::Sta);
        out.check(p >= 1.0 - 1e-6, format!("STA {} 1-rho_ff {:.1e}", shape.name(), 1.0 - p));
    }

    // STA is saturated (to the plot tolerance) at every period from 0.15 - 0.05 up
    let base = ChargingSetup::default();
    let short = [0.10, 0.15, 0.2, 0.5, 1.0, 3.0, 10.0, 30.0, 60.0];
    let sta_min = [ShapeKind::Sine, ShapeKind::Gaussian]
        .into_iter()
        .flat_map(|s| short.iter().map(move |&x| (s, x)))
        .map(|(s, x)| {
            base.with(SweepParameter::OmegaTauC, x).final_ergotropy(&variant(s, Protocol::Sta, true)).unwrap()
        })
        .fold(f64::INFINITY, f64::min);
    out.check(sta_min >= 1.0 - PLOT_TOL, format!("STA min over Wt_c >= 0.1: {sta_min:.4}"));

    // STIRAP: first period after which every shape stays at ξ ≥ 0.99 ω_f
    let grid: Vec<f64> = (1..=60).map(|k| k as f64).collect();
    let mut saturation: f64 = 0.0;
    for shape in [ShapeKind::Sine, ShapeKind::Gaussian] {
        let v = variant(shape, Protocol::Stirap, true);
        let xs: Vec<f64> =
            grid.iter().map(|&x| base.with(SweepParameter::OmegaTauC, x).final_ergotropy(&v).unwrap()).collect();
        let last_below = xs.iter().rposition(|&xi| xi < 0.99).map_or(0.0, |i| grid[i]);
        saturation = saturation.max(last_below + 1.0);
    }
    out.check((15.0..=45.0).contains(&saturation), format!("STIRAP reaches 0.99 at Wt_c = {saturation}"));
}

fn random_unitary(rng: &mut ChaCha8Rng) -> ComplexMatrix3 {
    let mut h = ComplexMatrix3::zeros();
    for i in 0..3 {
        h[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..3 {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let e = hermitian_eig3(&h).unwrap();
    // random phases on top of a random eigenbasis
    let cols = [0, 1, 2].map(|k| {
        let phase = C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
        e.vectors[k].map(|z| z * phase)
    });
    ComplexMatrix3::from_columns(&cols)
}

fn random_state(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let mut a = ComplexMatrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            a[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let m = a * a.adjoint();
    DensityMatrix::new(m * (1.0 / m.trace().re)).unwrap()
}

fn property_suites(out: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let levels = standard();
    let h0 = bare_hamiltonian(&levels);

    // every stored state of a few representative trajectories
    let mut states = 0;
    let mut worst: f64 = 0.0;
    let noisy = DecoherenceSpec::standard(1e-2);
    let runs = [
        (ShapeKind::Sine, Protocol::Sta, Some(noisy)),
        (ShapeKind::Gaussian, Protocol::Stirap, None),
        (ShapeKind::Flat, Protocol::Sta, Some(noisy)),
    ];
    for (shape, protocol, noise) in runs {
        let drive = shape.drive(1.0, 5.0).unwrap().with_errors(0.1, 0.2, -0.1);
        let start = post_extraction_state(0.3, &DecoherenceSpec::standard(1.0)).unwrap();
        let opts = RechargeOptions { samples: 500, steps: 10_000, method: RechargeMethod::Numeric };
        let run = recharge(&start, &drive, protocol, noise.as_ref(), &levels, &opts).unwrap();
        for s in &run.samples {
            let m = s.state.matrix();
            let min_eig = hermitian_eig3(m).unwrap().values[0];
            worst =
                worst.max(m.hermiticity_defect() / 1e-10).max((m.trace().re - 1.0).abs() / 1e-8).max(-min_eig / 1e-7);
            states += 1;
        }
    }
    out.check(worst <= 1.0, format!("{states} trajectory states valid"));

    let mut diag_err: f64 = 0.0;
    for _ in 0..10_000 {
        let raw: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
        let total: f64 = raw.iter().sum();
        let p = raw.map(|x| x / total);
        let general = ergotropy(&DensityMatrix::from_populations(p).unwrap(), &h0).unwrap().ergotropy;
        diag_err = diag_err.max((ergotropy_diagonal(p, &levels).unwrap() - general).abs());
    }
    out.check(diag_err <= 1e-9, format!("diagonal vs general {diag_err:.1e}"));

    let mut violations = 0;
    for _ in 0..20 {
        let rho = random_state(&mut rng);
        let u = extraction_unitary(&rho, &h0).unwrap();
        let passive = (*rho.transformed(&u).unwrap().matrix() * h0).trace().re;
        for _ in 0..200 {
            let v = random_unitary(&mut rng);
            let e = (*rho.transformed(&v).unwrap().matrix() * h0).trace().re;
            if e < passive - 1e-12 {
                violations += 1;
            }
        }
    }
    out.check(violations == 0, format!("extraction minimality violations {violations}"));

    let mut cd_err: f64 = 0.0;
    for spec in [DriveSpec::sine(1.3, 2.0).unwrap(), DriveSpec::gaussian(1.3, 2.0).unwrap()] {
        for k in 1..100 {
            let t = 2.0 * k as f64 / 100.0;
            let h = 1e-5;
            let fd = (mixing_angle(&spec, t + h).unwrap() - mixing_angle(&spec, t - h).unwrap()) / (2.0 * h);
            let cd = envelopes(&spec, t).unwrap().omega_cd;
            cd_err = cd_err.max((fd - cd).abs() / cd);
        }
    }
    out.check(cd_err <= 1e-6, format!("CD finite difference {cd_err:.1e}"));

    let mut prop_err: f64 = 0.0;
    for _ in 0..50 {
        let shape = [ShapeKind::Sine, ShapeKind::Gaussian, ShapeKind::Flat][rng.gen_range(0..3)];
        let drive = shape.drive(rng.gen_range(0.2..5.0), rng.gen_range(0.5..5.0)).unwrap();
        let steps = 4000.max((400.0 * drive.omega * drive.tau_c) as usize);
        let grid = TimeGrid::new(0.0, drive.tau_c, steps).unwrap();
        let numeric = propagate_unitary(|t| control_hamiltonian(&drive, t, Protocol::Sta).unwrap(), &grid);
        prop_err = prop_err.max(numeric.max_abs_diff(&sta_propagator(&drive, drive.tau_c).unwrap()));
    }
    out.check(prop_err <= 1e-6, format!("propagator vs RK4 {prop_err:.1e}"));

    let drive = DriveSpec::sine(1.0, PI).unwrap();
    let g = DensityMatrix::basis(Level::G);
    let closed = DecoherenceSpec::closed();
    let direct = recharge(&g, &drive, Protocol::Sta, None, &levels, &RechargeOptions::default()).unwrap();
    let direct_ff = direct.final_sample().state.population(Level::F);
    let tp = TwoPhotonSpec::matching(&drive, 20.0).unwrap();
    let two = charge_two_photon(&drive, &tp, true, &closed, &g, 10_000).unwrap();
    let ratio = two.final_state.population(Level::F) / direct_ff;
    out.check(ratio >= 0.98 && two.warning.is_none(), format!("two-photon/direct {ratio:.4}"));
}

type Criterion = (&'static str, fn(&mut Outcome), Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("self-discharge", self_discharge, Some(Duration::from_secs(1))),
        ("recharge without postselection", recharge_without_postselection, None),
        ("recharge with postselection", recharge_with_postselection, Some(Duration::from_secs(10))),
        ("periodic maximum", periodic_maximum, None),
        ("intensity-error robustness", intensity_error, None),
        ("detuning robustness", detuning, None),
        ("decoherence during charging", charging_decoherence, Some(Duration::from_secs(30))),
        ("cost and efficiency", cost_and_efficiency, None),
        ("STA vs STIRAP", sta_versus_stirap, None),
        ("property suites", property_suites, None),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let mut out = Outcome::default();
        let start = Instant::now();
        run(&mut out);
        let elapsed = start.elapsed();
        if let Some(limit) = budget {
            out.check(elapsed < *limit, format!("runtime {:.2}s < {}s", elapsed.as_secs_f64(), limit.as_secs()));
        }
        let ok = out.passed();
        failed += usize::from(!ok);
        let details: Vec<String> =
            out.checks.iter().map(|c| format!("{}{}", if c.ok { "" } else { "FAILED " }, c.detail)).collect();
        println!(
            "criterion {:>2} {} {name} [{:.2}s]: {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            details.join("; ")
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
