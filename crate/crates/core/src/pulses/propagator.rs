//! Closed-form evolution for transitionless (STA) driving.

use super::{envelopes, mixing_angle, DriveSpec, PulseShape};
use crate::error::QbError;
use crate::quadrature::simpson_converged;
use crate::qutrit::{ComplexMatrix3, Vector3};
use crate::C64;

fn real(v: [f64; 3]) -> Vector3 {
    v.map(|x| C64::new(x, 0.0))
}

/// |λ₀⟩ = cos θ|g⟩ − sin θ|f⟩, the zero-energy eigenstate of the two-pulse
/// Hamiltonian.
pub fn dark_state(theta: f64) -> Vector3 {
    real([theta.cos(), 0.0, -theta.sin()])
}

/// |λ±⟩ = (sin θ|g⟩ ± |e⟩ + cos θ|f⟩)/√2 with energies ±Ω.
pub fn bright_states(theta: f64) -> (Vector3, Vector3) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (s, c) = theta.sin_cos();
    (real([r * s, r, r * c]), real([r * s, -r, r * c]))
}

/// φ(t) = ∫₀ᵗ Ω(t') dt' with Ω = √(Ω₁² + Ω₂²).
pub fn dynamical_phase(spec: &DriveSpec, t: f64) -> Result<f64, QbError> {
    envelopes(spec, t)?;
    let t = t.clamp(0.0, spec.tau_c);
    match spec.shape {
        PulseShape::Sine | PulseShape::Flat => Ok(spec.omega * t),
        PulseShape::Gaussian { .. } => {
            Ok(simpson_converged(|s| super::DriveSpec::raw(spec, s).magnitude(), 0.0, t, 1e-12))
        }
    }
}

/// U(t) = |λ₀(t)⟩⟨λ₀(0)| + e^{−iφ}|λ₊(t)⟩⟨λ₊(0)| + e^{iφ}|λ₋(t)⟩⟨λ₋(0)|.
///
/// Exact only when the drive is transitionless and error-free; otherwise
/// [`QbError::NotIdealSta`] is returned.
pub fn sta_propagator(spec: &DriveSpec, t: f64) -> Result<ComplexMatrix3, QbError> {
    if spec.has_errors() {
        return Err(QbError::NotIdealSta("systematic errors present"));
    }
    if !spec.is_transitionless() {
        return Err(QbError::NotIdealSta("counterdiabatic term disabled"));
    }
    let theta0 = mixing_angle(spec, 0.0)?;
    let theta = mixing_angle(spec, t)?;
    let phi = dynamical_phase(spec, t)?;
    let (p0, m0) = bright_states(theta0);
    let (p, m) = bright_states(theta);
    let u = ComplexMatrix3::outer(&dark_state(theta), &dark_state(theta0))
        + ComplexMatrix3::outer(&p, &p0) * C64::from_polar(1.0, -phi)
        + ComplexMatrix3::outer(&m, &m0) * C64::from_polar(1.0, phi);
    Ok(u)
}

/// The propagator written out for θ(0) = 0:
///
/// ```text
/// ⎡  cos θ     −i sin φ sin θ    cos φ sin θ ⎤
/// ⎢  0          cos φ            −i sin φ    ⎥
/// ⎣ −sin θ     −i sin φ cos θ    cos φ cos θ ⎦
/// ```
pub fn sta_propagator_closed_form(theta: f64, phi: f64) -> ComplexMatrix3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let r = |x: f64| C64::new(x, 0.0);
    let i = |x: f64| C64::new(0.0, x);
    ComplexMatrix3([[r(ct), i(-sp * st), r(cp * st)], [r(0.0), r(cp), i(-sp)], [r(-st), i(-sp * ct), r(cp * ct)]])
}
