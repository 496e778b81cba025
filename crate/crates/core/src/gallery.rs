//! Reference states and seeded random state constructors.

use num_traits::Zero;
use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::random::{gaussian_vector, normalized_gaussian_vector, seeded_rng};
use crate::scalar::{cr, from_usize, Scalar, C};
use crate::state::{DensityMatrix, Dims};

/// Certificate of separability: `ρ = Σ_i p_i ⊗_k |ψ_i^k⟩⟨ψ_i^k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableEnsemble<T: Scalar> {
    pub dims: Dims,
    pub weights: Vec<T>,
    /// `factors[i][k]` is the pure state of subsystem k in term i.
    pub factors: Vec<Vec<Vec<C<T>>>>,
}

impl<T: Scalar> SeparableEnsemble<T> {
    /// Checks weight normalization and factor norms against `tol`.
    pub fn validate(&self, tol: T) -> Result<()> {
        if self.weights.len() != self.factors.len() || self.weights.is_empty() {
            return Err(Error::Parameter("ensemble needs one weight per term".into()));
        }
        if self.weights.iter().any(|&p| p < T::zero()) {
            return Err(Error::Parameter("negative ensemble weight".into()));
        }
        let total: T = self.weights.iter().copied().sum();
        if (total - T::one()).abs() > tol {
            return Err(Error::Parameter(format!("ensemble weights sum to {total}")));
        }
        for term in &self.factors {
            if term.len() != self.dims.len() {
                return Err(Error::DimensionMismatch { expected: self.dims.len(), found: term.len() });
            }
            for (psi, &d) in term.iter().zip(self.dims.as_slice()) {
                if psi.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: psi.len() });
                }
                let norm = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
                if (norm - T::one()).abs() > tol {
                    return Err(Error::NotNormalized { norm: norm.as_f64() });
                }
            }
        }
        Ok(())
    }

    /// Σ_i p_i ⊗_k |ψ_i^k⟩⟨ψ_i^k|.
    pub fn assemble(&self) -> ComplexMatrix<T> {
        let d = self.dims.total();
        let mut rho = ComplexMatrix::zeros(d, d);
        for (&p, term) in self.weights.iter().zip(&self.factors) {
            let psi = term.iter().skip(1).fold(term[0].clone(), |acc, f| kron_vec(&acc, f));
            rho += &ComplexMatrix::outer(&psi).scale(p);
        }
        rho
    }
}

fn kron_vec<T: Scalar>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Projector onto (|0…0⟩ + |1…1⟩)/√2 on `n` qubits.
pub fn ghz<T: Scalar>(n: usize) -> Result<DensityMatrix<T>> {
    if n < 2 {
        return Err(Error::Parameter(format!("GHZ needs at least 2 qubits, got {n}")));
    }
    let dims = Dims::qubits(n)?;
    let d = dims.total();
    let mut psi = vec![C::zero(); d];
    psi[0] = cr(T::FRAC_1_SQRT_2());
    psi[d - 1] = cr(T::FRAC_1_SQRT_2());
    DensityMatrix::from_pure(&psi, dims)
}

/// Two-qubit Werner state `¼ I⊗I − ¼·(2Φ+1)/3 · Σ_k σ_k⊗σ_k`, for Φ ∈ [−1, 1].
pub fn werner<T: Scalar>(phi: T) -> Result<DensityMatrix<T>> {
    if !(phi >= -T::one() && phi <= T::one()) {
        return Err(Error::Parameter(format!("Werner parameter {phi} outside [-1, 1]")));
    }
    let q = T::of(0.25);
    let a = (phi * T::of(2.0) + T::one()) / T::of(3.0);
    // Σ_k σ_k⊗σ_k = [[1,0,0,0],[0,-1,2,0],[0,2,-1,0],[0,0,0,1]]
    let sum = [[1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 2.0, 0.0], [0.0, 2.0, -1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
    let m = ComplexMatrix::from_fn(4, 4, |r, s| {
        let id = if r == s { q } else { T::zero() };
        cr(id - q * a * T::of(sum[r][s]))
    });
    Ok(DensityMatrix::assume_valid(m, Dims::qubits(2)?))
}

/// I/∏N_k.
pub fn completely_mixed<T: Scalar>(dims: &Dims) -> DensityMatrix<T> {
    let d = dims.total();
    DensityMatrix::assume_valid(ComplexMatrix::identity(d).scale(T::one() / from_usize::<T>(d)), dims.clone())
}

pub fn random_pure<T: Scalar>(dims: &Dims, seed: u64) -> DensityMatrix<T> {
    random_pure_with(dims, &mut seeded_rng(seed))
}

pub fn random_pure_with<T: Scalar, R: Rng + ?Sized>(dims: &Dims, rng: &mut R) -> DensityMatrix<T> {
    let psi = normalized_gaussian_vector::<T, R>(rng, dims.total());
    DensityMatrix::assume_valid(ComplexMatrix::outer(&psi), dims.clone())
}

/// Normalized Gram matrix `G G† / tr(G G†)` of `rank` Gaussian vectors.
pub fn random_density<T: Scalar>(dims: &Dims, rank: usize, seed: u64) -> Result<DensityMatrix<T>> {
    random_density_with(dims, rank, &mut seeded_rng(seed))
}

pub fn random_density_with<T: Scalar, R: Rng + ?Sized>(
    dims: &Dims,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix<T>> {
    let d = dims.total();
    if rank == 0 || rank > d {
        return Err(Error::Parameter(format!("rank {rank} outside 1..={d}")));
    }
    if rank == 1 {
        return Ok(random_pure_with(dims, rng));
    }
    let mut m = ComplexMatrix::zeros(d, d);
    for _ in 0..rank {
        m += &ComplexMatrix::outer(&gaussian_vector::<T, R>(rng, d));
    }
    let tr = m.trace().re;
    Ok(DensityMatrix::assume_valid(m.scale(T::one() / tr), dims.clone()))
}

/// Random separable mixture of `terms` product pure states with weights
/// uniform on the simplex.
pub fn random_separable<T: Scalar>(
    dims: &Dims,
    terms: usize,
    seed: u64,
) -> Result<(DensityMatrix<T>, SeparableEnsemble<T>)> {
    random_separable_with(dims, terms, &mut seeded_rng(seed))
}

pub fn random_separable_with<T: Scalar, R: Rng + ?Sized>(
    dims: &Dims,
    terms: usize,
    rng: &mut R,
) -> Result<(DensityMatrix<T>, SeparableEnsemble<T>)> {
    if terms == 0 {
        return Err(Error::Parameter("separable ensemble needs at least one term".into()));
    }
    let raw: Vec<f64> = (0..terms).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<T> = raw.iter().map(|w| T::of(w / total)).collect();
    let factors = (0..terms)
        .map(|_| dims.as_slice().iter().map(|&d| normalized_gaussian_vector::<T, R>(rng, d)).collect())
        .collect();
    let ensemble = SeparableEnsemble { dims: dims.clone(), weights, factors };
    let rho = DensityMatrix::assume_valid(ensemble.assemble(), dims.clone());
    Ok((rho, ensemble))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{validate_density, Tolerances};

    type M = ComplexMatrix<f64>;

    fn dims(v: &[usize]) -> Dims {
        Dims::new(v.to_vec()).unwrap()
    }

    fn revalidate(rho: &DensityMatrix<f64>) {
        validate_density(rho.matrix().clone(), rho.dims().clone(), &Tolerances::default()).unwrap();
    }

    #[test]
    fn ghz_examples() {
        let g2 = ghz::<f64>(2).unwrap();
        let h = 0.5;
        let mut bell = M::zeros(4, 4);
        for (r, s) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(r, s)] = cr(h);
        }
        assert!(g2.matrix().max_abs_diff(&bell) < 1e-15);
        let g3 = ghz::<f64>(3).unwrap();
        assert!((g3.purity() - 1.0).abs() < 1e-15);
        revalidate(&g3);
        assert!(ghz::<f64>(1).is_err());
    }

    #[test]
    fn werner_examples() {
        // Φ = 1: singlet projector
        let s = 0.5f64.sqrt();
        let singlet = M::outer(&[C::zero(), cr(s), cr(-s), C::zero()]);
        assert!(werner(1.0f64).unwrap().matrix().max_abs_diff(&singlet) < 1e-15);
        // Φ = −1: triplet projector / 3
        let triplet = &M::identity(4) - &singlet;
        assert!(werner(-1.0f64).unwrap().matrix().max_abs_diff(&triplet.scale(1.0 / 3.0)) < 1e-15);
        // Φ = −1/2: completely mixed
        assert!(werner(-0.5f64).unwrap().matrix().max_abs_diff(&M::identity(4).scale(0.25)) < 1e-15);
        assert!(werner(1.01f64).is_err());
        assert!(werner(f64::NAN).is_err());
        for phi in [-1.0, -0.3, 0.0, 0.6, 1.0] {
            let w = werner(phi).unwrap();
            revalidate(&w);
            for k in [0, 1] {
                let r = w.partial_trace(&[k]).unwrap();
                assert!(r.matrix().max_abs_diff(&M::identity(2).scale(0.5)) < 1e-12);
            }
            let a: f64 = (2.0 * phi + 1.0) / 3.0;
            assert!((w.purity() - (0.25 + 0.75 * a * a)).abs() < 1e-14);
        }
    }

    #[test]
    fn completely_mixed_purity() {
        assert!((completely_mixed::<f64>(&dims(&[2])).purity() - 0.5).abs() < 1e-15);
        assert!((completely_mixed::<f64>(&dims(&[3, 3])).purity() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn random_states_valid_and_deterministic() {
        let d = dims(&[2, 3]);
        let p = random_pure::<f64>(&d, 5);
        assert!((p.purity() - 1.0).abs() < 1e-12);
        revalidate(&p);
        assert_eq!(p, random_pure::<f64>(&d, 5));
        assert_eq!(random_density::<f64>(&d, 1, 5).unwrap(), p);
        for rank in 1..=6 {
            revalidate(&random_density::<f64>(&d, rank, 11).unwrap());
        }
        assert!(random_density::<f64>(&dims(&[2, 2]), 4, 1).unwrap().purity() < 1.0);
        assert!(random_density::<f64>(&d, 0, 1).is_err());
        assert!(random_density::<f64>(&d, 7, 1).is_err());
    }

    #[test]
    fn separable_certificate() {
        let d = dims(&[2, 2]);
        let (rho, ens) = random_separable::<f64>(&d, 2, 9).unwrap();
        let (rho2, _) = random_separable::<f64>(&d, 2, 9).unwrap();
        assert_eq!(rho.matrix().as_slice(), rho2.matrix().as_slice());
        ens.validate(1e-12).unwrap();
        assert!(ens.assemble().max_abs_diff(rho.matrix()) < 1e-12);
        revalidate(&rho);
        assert!(random_separable::<f64>(&d, 0, 1).is_err());
        let (single, _) = random_separable::<f64>(&dims(&[3, 2]), 1, 4).unwrap();
        assert!((single.purity() - 1.0).abs() < 1e-12);
    }
}
