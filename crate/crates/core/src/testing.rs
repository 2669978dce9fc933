//! Random fixtures shared by unit tests.

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::qutrit::{hermitian_eig3, ComplexMatrix3, DensityMatrix};

pub(crate) fn random_hermitian(rng: &mut impl Rng, scale: f64) -> ComplexMatrix3 {
    let mut m = ComplexMatrix3::zeros();
    for i in 0..3 {
        m[(i, i)] = C64::new(rng.gen_range(-scale..scale), 0.0);
        for j in (i + 1)..3 {
            let z = C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Eigenbasis of a random Hermitian matrix.
pub(crate) fn random_unitary(rng: &mut impl Rng) -> ComplexMatrix3 {
    hermitian_eig3(&random_hermitian(rng, 1.0)).unwrap().basis()
}

/// ρ = AA†/Tr[AA†] for a random complex A.
pub(crate) fn random_density_matrix(rng: &mut impl Rng) -> DensityMatrix {
    let mut a = ComplexMatrix3::zeros();
    a.0.iter_mut().flatten().for_each(|z| *z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = a * a.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new((m * (1.0 / tr)).hermitian_part()).unwrap()
}
