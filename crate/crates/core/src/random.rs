//! Seeded random streams and Gaussian sampling helpers.
//!
//! Every random object is derived from a `(seed, stream, index)` key, so a
//! trial draws the same numbers no matter which thread runs it or in which order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::ComplexMatrix;
use crate::scalar::{c, Scalar, C};

pub type TrialRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for trial `index` of stream `stream` under master `seed`.
pub fn trial_rng(seed: u64, stream: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(stream)));
    rng.set_stream(index);
    rng
}

/// Generator for a single seeded draw.
pub fn seeded_rng(seed: u64) -> TrialRng {
    trial_rng(seed, 0, 0)
}

/// Stable 64-bit label for a stream name (FNV-1a).
pub fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
pub fn complex_gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    c(T::of(re * h), T::of(im * h))
}

pub fn gaussian_vector<T: Scalar, R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<C<T>> {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}

pub fn normalized_gaussian_vector<T: Scalar, R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<C<T>> {
    let mut v = gaussian_vector::<T, R>(rng, len);
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Haar-distributed unitary: modified Gram–Schmidt on the columns of a
/// complex Gaussian matrix. The triangular factor then has a positive real
/// diagonal, which is the phase convention that makes the result Haar.
pub fn random_unitary<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    let mut cols: Vec<Vec<C<T>>> = (0..n).map(|_| gaussian_vector(rng, n)).collect();
    for k in 0..n {
        for j in 0..k {
            let (done, rest) = cols.split_at_mut(k);
            let q = &done[j];
            let v = &mut rest[0];
            let proj = q.iter().zip(v.iter()).fold(C::<T>::new(T::zero(), T::zero()), |a, (x, y)| a + x.conj() * y);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = cols[k].iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for z in &mut cols[k] {
            *z /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |r, k| cols[k][r])
}
