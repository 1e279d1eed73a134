#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use trp_core::linalg::{expm_skew, ComplexMatrix, HermitianMatrix, UnitaryMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> HermitianMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng) * scale).unwrap();
    HermitianMatrix::hermitian_part(&g)
}

pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> UnitaryMatrix {
    let h = random_hermitian(rng, dim, 2.0);
    expm_skew(&h, 1.0).unwrap()
}

/// Uniformly distributed pure state.
pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}
