//! Seeded random states and unitaries.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, CMat};
use crate::qstate::{DensityMatrix, ProductState, PureState};
use crate::C64;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `k` derived from a base seed.
pub fn substream(seed: u64, k: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}

pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector in `C^d`.
pub fn unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d).map(|_| gaussian_c64(rng)).collect();
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= n);
    v
}

pub fn random_pure<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> PureState {
    let d = dims.iter().product();
    PureState::normalized(dims.to_vec(), unit_vector(d, rng)).expect("random state within caps")
}

pub fn random_product<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> ProductState {
    ProductState::from_locals_unchecked(dims.iter().map(|&d| unit_vector(d, rng)).collect())
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the phase fix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| gaussian_c64(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c(1.0) };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random density matrix of the given rank (induced measure).
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let g = CMat::from_fn(d, rank, |_, _| gaussian_c64(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new_unchecked_psd(dims.to_vec(), m / c(tr)).expect("random density within caps")
}
