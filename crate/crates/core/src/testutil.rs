//! Random matrices for unit tests.

use crate::qmath::{ComplexMatrix, C64};
use crate::rng::{Domain, RngSeed, Stream};
use crate::states;

pub fn test_rng(seed: u64) -> Stream {
    RngSeed(seed).stream(Domain::Test, 0)
}

pub fn random_hermitian(rng: &mut Stream, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| rng.complex_gaussian());
    g.hermitian_part()
}

/// Full-rank density matrix `G G^dagger / Tr`.
pub fn random_density(rng: &mut Stream, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| rng.complex_gaussian());
    let p = &g * &g.adjoint();
    let tr = p.trace().re;
    p.scale_real(1.0 / tr).hermitian_part()
}

pub fn random_unitary(rng: &mut Stream, dim: usize) -> ComplexMatrix {
    states::haar_unitary(rng, dim)
}

pub fn random_ket(rng: &mut Stream, dim: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| rng.complex_gaussian()).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
    v
}
