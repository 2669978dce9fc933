//! Lindblad master-equation integration and the analytic self-discharge
//! solution.
//!
//! Jump operators are fixed to the cascade qutrit: σ_e⁻ = |g⟩⟨e|,
//! σ_f⁻ = |e⟩⟨f|, σ_e^z = |e⟩⟨e| − |g⟩⟨g| and σ_f^z = |f⟩⟨f| − |e⟩⟨e|, with
//!
//! ```text
//! dρ/dt = −i[H, ρ] + ½ Σ_n (γ_n L[σ_n⁻] + γ_n^z L[σ_n^z]),
//! L[o] = 2 o ρ o† − o†o ρ − ρ o†o.
//! ```

use serde::{Deserialize, Serialize};

use crate::error::QbError;
use crate::qutrit::{ComplexMatrix3, DensityMatrix, StateTolerance};
use crate::C64;

/// Decay (γ_e, γ_f) and dephasing (γ_e^z, γ_f^z) rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct DecoherenceSpec {
    pub gamma_e: f64,
    pub gamma_f: f64,
    pub gamma_e_z: f64,
    pub gamma_f_z: f64,
}

impl DecoherenceSpec {
    pub fn new(gamma_e: f64, gamma_f: f64, gamma_e_z: f64, gamma_f_z: f64) -> Result<Self, QbError> {
        let spec = Self { gamma_e, gamma_f, gamma_e_z, gamma_f_z };
        spec.validate()?;
        Ok(spec)
    }

    /// Superconducting-qutrit ratios: γ_e = γ, γ_f = 1.5γ, γ_e^z = γ_f^z = 2γ.
    pub fn standard(gamma: f64) -> Self {
        Self { gamma_e: gamma, gamma_f: 1.5 * gamma, gamma_e_z: 2.0 * gamma, gamma_f_z: 2.0 * gamma }
    }

    pub fn closed() -> Self {
        Self::default()
    }

    pub fn is_closed(&self) -> bool {
        self.rates().iter().all(|&r| r == 0.0)
    }

    fn rates(&self) -> [f64; 4] {
        [self.gamma_e, self.gamma_f, self.gamma_e_z, self.gamma_f_z]
    }

    pub fn validate(&self) -> Result<(), QbError> {
        if self.rates().iter().all(|r| r.is_finite() && *r >= 0.0) {
            Ok(())
        } else {
            Err(QbError::InvalidParameter(format!("decoherence rates must be non-negative: {self:?}")))
        }
    }

    fn jump_operators(&self) -> [(f64, ComplexMatrix3); 4] {
        let d = |x: [f64; 3]| ComplexMatrix3::from_diagonal(x);
        [
            (self.gamma_e, ComplexMatrix3::unit(0, 1)),
            (self.gamma_f, ComplexMatrix3::unit(1, 2)),
            (self.gamma_e_z, d([-1.0, 1.0, 0.0])),
            (self.gamma_f_z, d([0.0, -1.0, 1.0])),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self, QbError> {
        if !(t_end > t_start) || steps == 0 || !t_start.is_finite() || !t_end.is_finite() {
            return Err(QbError::InvalidParameter(format!(
                "time grid needs t_end > t_start and steps >= 1 (got [{t_start}, {t_end}], {steps})"
            )));
        }
        Ok(Self { t_start, t_end, steps })
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / self.steps as f64
    }

    /// Time of step `k`; the last point is exactly `t_end`.
    pub fn time(&self, k: usize) -> f64 {
        if k >= self.steps {
            self.t_end
        } else {
            self.t_start + k as f64 * self.step()
        }
    }
}

/// Sampled states of an integrated trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub points: Vec<(f64, DensityMatrix)>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        &self.points.last().expect("trajectory always holds the initial state").1
    }
}

/// Right-hand side of the master equation.
pub fn lindblad_rhs(rho: &ComplexMatrix3, h: &ComplexMatrix3, spec: &DecoherenceSpec) -> ComplexMatrix3 {
    let mut out = h.commutator(rho) * C64::new(0.0, -1.0);
    for (rate, o) in spec.jump_operators() {
        if rate == 0.0 {
            continue;
        }
        let od = o.adjoint();
        let ood = od * o;
        let term = (o * *rho * od) * 2.0 - ood * *rho - *rho * ood;
        out += term * (0.5 * rate);
    }
    out
}

/// Bound on |Tr ρ − 1| beyond which integration is abandoned.
pub const DIVERGENCE_TRACE_DRIFT: f64 = 1e-6;

/// Fixed-step RK4 on the master equation.
///
/// The state is re-symmetrized after every step. Every `record_every`-th step,
/// and the final one, is validated and stored.
pub fn evolve<H>(
    rho0: &DensityMatrix,
    hamiltonian: H,
    spec: &DecoherenceSpec,
    grid: &TimeGrid,
    record_every: usize,
) -> Result<Trajectory, QbError>
where
    H: Fn(f64) -> ComplexMatrix3,
{
    spec.validate()?;
    let every = record_every.max(1);
    let dt = grid.step();
    let mut rho = *rho0.matrix();
    let mut points = Vec::with_capacity(grid.steps / every + 2);
    points.push((grid.t_start, *rho0));

    let mut h_start = hamiltonian(grid.t_start);
    for k in 0..grid.steps {
        let t = grid.time(k);
        let t_next = grid.time(k + 1);
        let h_mid = hamiltonian(0.5 * (t + t_next));
        let h_end = hamiltonian(t_next);

        let k1 = lindblad_rhs(&rho, &h_start, spec);
        let k2 = lindblad_rhs(&(rho + k1 * (0.5 * dt)), &h_mid, spec);
        let k3 = lindblad_rhs(&(rho + k2 * (0.5 * dt)), &h_mid, spec);
        let k4 = lindblad_rhs(&(rho + k3 * dt), &h_end, spec);
        rho = (rho + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)).hermitian_part();

        let drift = (rho.trace() - 1.0).norm();
        // |ρ_ij| ≤ 1 for any density matrix; larger entries mean the step is unstable
        let blown_up = rho.0.iter().flatten().any(|z| z.norm() > 1.0 + DIVERGENCE_TRACE_DRIFT);
        if !rho.is_finite() || drift > DIVERGENCE_TRACE_DRIFT || blown_up {
            return Err(QbError::Divergence { t: t_next, drift });
        }
        if (k + 1) % every == 0 || k + 1 == grid.steps {
            points.push((t_next, DensityMatrix::with_tolerance(rho, StateTolerance::TRAJECTORY)?));
        }
        h_start = h_end;
    }
    Ok(Trajectory { points })
}

/// Time-ordered propagator U(t_end, t_start) from RK4 on dU/dt = −iH(t)U.
pub fn propagate_unitary<H>(hamiltonian: H, grid: &TimeGrid) -> ComplexMatrix3
where
    H: Fn(f64) -> ComplexMatrix3,
{
    let mi = C64::new(0.0, -1.0);
    let dt = grid.step();
    let mut u = ComplexMatrix3::identity();
    let mut h_start = hamiltonian(grid.t_start);
    for k in 0..grid.steps {
        let t = grid.time(k);
        let t_next = grid.time(k + 1);
        let h_mid = hamiltonian(0.5 * (t + t_next));
        let h_end = hamiltonian(t_next);
        let k1 = h_start * u * mi;
        let k2 = h_mid * (u + k1 * (0.5 * dt)) * mi;
        let k3 = h_mid * (u + k2 * (0.5 * dt)) * mi;
        let k4 = h_end * (u + k3 * dt) * mi;
        u = u + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        h_start = h_end;
    }
    u
}

/// Populations (ρ_gg, ρ_ee, ρ_ff) of a battery fully charged at t = 0 and left
/// to decay under `spec`. Off-diagonal elements stay zero.
pub fn analytic_discharge(t: f64, spec: &DecoherenceSpec) -> Result<[f64; 3], QbError> {
    spec.validate()?;
    if !(t >= 0.0) {
        return Err(QbError::InvalidParameter(format!("discharge time must be non-negative, got {t}")));
    }
    let (ge, gf) = (spec.gamma_e, spec.gamma_f);
    let ff = (-gf * t).exp();
    let d = ge - gf;
    let ee = if gf == 0.0 {
        0.0
    } else if d == 0.0 {
        gf * t * ff
    } else if (d * t).abs() < 1.0 {
        // γ_f e^{−γ_f t} (1 − e^{−(γ_e−γ_f) t}) / (γ_e − γ_f), cancellation-free
        gf * ff * (-(-d * t).exp_m1()) / d
    } else {
        gf * (ff - (-ge * t).exp()) / d
    };
    let gg = (1.0 - ff - ee).max(0.0);
    Ok([gg, ee, ff])
}

pub fn discharged_state(t: f64, spec: &DecoherenceSpec) -> Result<DensityMatrix, QbError> {
    DensityMatrix::from_populations(analytic_discharge(t, spec)?)
}

/// The three population crossings of the discharge curve:
/// ρ_ff = ρ_ee at τ₁, ρ_ff = ρ_gg at τ₂ and ρ_ee = ρ_gg at τ₃.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingTimes {
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
}

/// Closed form τ₁ = [ln(2γ_f − γ_e) − ln γ_f] / (γ_f − γ_e).
pub fn first_crossing_closed_form(spec: &DecoherenceSpec) -> Result<f64, QbError> {
    let (ge, gf) = (spec.gamma_e, spec.gamma_f);
    if !(ge > 0.0 && gf > 0.0) || ge == gf {
        return Err(QbError::InvalidParameter(format!(
            "crossing times need distinct positive decay rates, got {ge}, {gf}"
        )));
    }
    if 2.0 * gf <= ge {
        return Err(QbError::NoBracket("rho_ff = rho_ee"));
    }
    Ok(((2.0 * gf - ge).ln() - gf.ln()) / (gf - ge))
}

pub fn crossing_times(spec: &DecoherenceSpec) -> Result<CrossingTimes, QbError> {
    let tau1 = first_crossing_closed_form(spec)?;
    let pops = |t: f64| analytic_discharge(t, spec).unwrap_or([f64::NAN; 3]);
    let tau2 = find_crossing(
        |t| {
            let p = pops(t);
            p[2] - p[0]
        },
        spec,
        "rho_ff = rho_gg",
    )?;
    let tau3 = find_crossing(
        |t| {
            let p = pops(t);
            p[1] - p[0]
        },
        spec,
        "rho_ee = rho_gg",
    )?;
    Ok(CrossingTimes { tau1, tau2, tau3 })
}

/// First positive-to-non-positive sign change of `f` on t > 0, refined by
/// bisection to 1e-13 in time.
pub(crate) fn find_crossing<F: Fn(f64) -> f64>(
    f: F,
    spec: &DecoherenceSpec,
    what: &'static str,
) -> Result<f64, QbError> {
    let fastest = spec.gamma_e.max(spec.gamma_f);
    let slowest = spec.gamma_e.min(spec.gamma_f);
    if !(slowest > 0.0) {
        return Err(QbError::NoBracket(what));
    }
    let h = 0.01 / fastest;
    let horizon = 200.0 / slowest;
    let mut lo = h;
    if !(f(lo) > 0.0) {
        return Err(QbError::NoBracket(what));
    }
    let mut hi = lo + h;
    while f(hi) > 0.0 {
        lo = hi;
        hi += h;
        if hi > horizon {
            return Err(QbError::NoBracket(what));
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
