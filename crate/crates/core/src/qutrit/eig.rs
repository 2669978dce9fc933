//! Eigendecomposition of 3×3 Hermitian matrices by cyclic complex Jacobi
//! rotations.

use num_complex::Complex64 as C64;

use super::matrix::{inner, norm, ComplexMatrix3, Vector3};
use crate::error::QbError;

/// Hermiticity tolerance accepted on input, scaled by max(1, ‖H‖).
pub const HERMITIAN_INPUT_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 64;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianEigen {
    pub values: [f64; 3],
    /// `vectors[k]` is the normalized eigenvector for `values[k]`.
    pub vectors: [Vector3; 3],
}

impl HermitianEigen {
    /// Σ λ_k v_k v_k†
    pub fn reconstruct(&self) -> ComplexMatrix3 {
        self.values
            .iter()
            .zip(&self.vectors)
            .fold(ComplexMatrix3::zeros(), |acc, (&l, v)| acc + ComplexMatrix3::outer(v, v) * l)
    }

    /// Unitary whose k-th column is `vectors[k]`.
    pub fn basis(&self) -> ComplexMatrix3 {
        ComplexMatrix3::from_columns(&self.vectors)
    }
}

pub fn hermitian_eig3(h: &ComplexMatrix3) -> Result<HermitianEigen, QbError> {
    if !h.is_finite() {
        return Err(QbError::NonFinite("hermitian_eig3 input"));
    }
    let scale = h.frobenius_norm().max(1.0);
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_INPUT_TOL * scale {
        return Err(QbError::NotHermitian { defect });
    }

    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix3::identity();
    let fro = a.frobenius_norm();
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off == 0.0 || off <= 1e-17 * fro {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            rotate(&mut a, &mut v, p, q);
        }
    }

    // Stable sort keeps the Jacobi (input) order inside degenerate clusters.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));

    let values = order.map(|k| a[(k, k)].re);
    let mut vectors = order.map(|k| v.column(k));
    gram_schmidt(&mut vectors);
    vectors.iter_mut().for_each(fix_phase);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix3) -> f64 {
    (a[(0, 1)].norm_sqr() + a[(0, 2)].norm_sqr() + a[(1, 2)].norm_sqr()).sqrt()
}

/// Zeroes a[p][q] with a phase followed by a real Givens rotation.
fn rotate(a: &mut ComplexMatrix3, v: &mut ComplexMatrix3, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let zeta = (aqq - app) / (2.0 * mag);
    let t = if zeta.is_infinite() { 0.0 } else { zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J = D·R with D = diag(1, e^{-iα}) on (p, q) and R the real rotation.
    let mut j = ComplexMatrix3::identity();
    j[(p, p)] = C64::new(c, 0.0);
    j[(p, q)] = C64::new(s, 0.0);
    j[(q, p)] = -phase.conj() * s;
    j[(q, q)] = phase.conj() * c;

    *a = j.adjoint() * *a * j;
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    for k in 0..3 {
        a[(k, k)].im = 0.0;
    }
    *v = *v * j;
}

fn gram_schmidt(vs: &mut [Vector3; 3]) {
    for k in 0..3 {
        for m in 0..k {
            let proj = inner(&vs[m], &vs[k]);
            let prev = vs[m];
            for (x, y) in vs[k].iter_mut().zip(prev) {
                *x -= proj * y;
            }
        }
        let n = norm(&vs[k]);
        vs[k].iter_mut().for_each(|x| *x /= n);
    }
}

/// Rotates the vector so its largest-magnitude component is real positive.
fn fix_phase(v: &mut Vector3) {
    let lead =
        v.iter().copied().fold(C64::new(0.0, 0.0), |best, x| if x.norm() > best.norm() + 1e-12 { x } else { best });
    if lead.norm() > 0.0 {
        let ph = lead.conj() / lead.norm();
        v.iter_mut().for_each(|x| *x *= ph);
    }
}
