//! Validated multipartite density matrices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::eigen::hermitian_eigenvalues;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{Scalar, C};

/// Subsystem dimensions `N_1..N_n`, each at least 2.
///
/// Basis ordering is row-major with subsystem 0 most significant, matching
/// the Kronecker product `A_0 ⊗ A_1 ⊗ …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidDims(dims));
        }
        Ok(Self(dims))
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    /// Number of subsystems.
    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total Hilbert space dimension ∏N_k.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Length of the expanded coherence vector, ∏N_k².
    pub fn coherence_len(&self) -> usize {
        self.0.iter().map(|d| d * d).product()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn all_qubits(&self) -> bool {
        self.0.iter().all(|&d| d == 2)
    }

    /// Splits a computational-basis index into per-subsystem levels.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.0.len()];
        for (slot, &d) in out.iter_mut().zip(&self.0).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Dims {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Dims> for Vec<usize> {
    fn from(d: Dims) -> Self {
        d.0
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Thresholds for state validation and equality checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T: Scalar> {
    pub herm: T,
    pub trace: T,
    pub psd: T,
    pub eq: T,
}

impl<T: Scalar> Tolerances<T> {
    pub fn uniform(tol: T) -> Self {
        Self { herm: tol, trace: tol, psd: tol, eq: tol }
    }

    pub fn is_valid(&self) -> bool {
        [self.herm, self.trace, self.psd, self.eq].iter().all(|t| t.is_finite() && *t >= T::zero())
    }
}

impl<T: Scalar> Default for Tolerances<T> {
    /// 1e-9 in double precision; widened to a few hundred ulps in single precision.
    fn default() -> Self {
        Self::uniform(T::of(1e-9).max(T::epsilon() * T::of(1e3)))
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix over `dims`.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    dims: Dims,
    matrix: ComplexMatrix<T>,
}

impl<T: Scalar> fmt::Debug for DensityMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix {} {:?}", self.dims, self.matrix)
    }
}

impl<T: Scalar> DensityMatrix<T> {
    /// Same as [`validate_density`].
    pub fn new(matrix: ComplexMatrix<T>, dims: Dims, tol: &Tolerances<T>) -> Result<Self> {
        validate_density(matrix, dims, tol)
    }

    /// Projector onto a normalized state vector.
    pub fn from_pure(psi: &[C<T>], dims: Dims) -> Result<Self> {
        if psi.len() != dims.total() {
            return Err(Error::DimensionMismatch { expected: dims.total(), found: psi.len() });
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if (norm - T::one()).abs() > Tolerances::<T>::default().trace {
            return Err(Error::NotNormalized { norm: norm.as_f64() });
        }
        Ok(Self { dims, matrix: ComplexMatrix::outer(psi) })
    }

    /// Wraps a matrix already known to be a state by construction.
    pub(crate) fn assume_valid(matrix: ComplexMatrix<T>, dims: Dims) -> Self {
        debug_assert_eq!(matrix.rows(), dims.total());
        Self { dims, matrix }
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// tr ρ².
    pub fn purity(&self) -> T {
        purity(self)
    }

    /// Reduced state on the (0-based) subsystems in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        partial_trace(self, keep)
    }

    /// Tensor product ρ ⊗ σ.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.as_slice().to_vec();
        dims.extend_from_slice(other.dims.as_slice());
        Self { dims: Dims(dims), matrix: self.matrix.kron(&other.matrix) }
    }
}

/// Checks shape, Hermiticity, trace and positivity, in that order.
pub fn validate_density<T: Scalar>(
    matrix: ComplexMatrix<T>,
    dims: Dims,
    tol: &Tolerances<T>,
) -> Result<DensityMatrix<T>> {
    let d = dims.total();
    if !matrix.is_square() || matrix.rows() != d {
        return Err(Error::DimensionMismatch { expected: d, found: matrix.rows().max(matrix.cols()) });
    }
    let herm = matrix.hermiticity_defect();
    if herm > tol.herm {
        return Err(Error::NotHermitian { defect: herm.as_f64() });
    }
    let tr = matrix.trace();
    if (tr.re - T::one()).abs() > tol.trace || tr.im.abs() > tol.trace {
        return Err(Error::TraceNotOne { trace: tr.re.as_f64() });
    }
    let min_eig = hermitian_eigenvalues(&matrix).first().copied().unwrap_or_else(T::zero);
    if min_eig < -tol.psd {
        return Err(Error::NotPositive { min_eigenvalue: min_eig.as_f64() });
    }
    Ok(DensityMatrix { dims, matrix })
}

/// tr ρ² computed as Σ|ρ_rs|².
pub fn purity<T: Scalar>(rho: &DensityMatrix<T>) -> T {
    rho.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Traces out every subsystem not listed in `keep` (0-based, any order,
/// no duplicates). Kept subsystems stay in their original relative order.
pub fn partial_trace<T: Scalar>(rho: &DensityMatrix<T>, keep: &[usize]) -> Result<DensityMatrix<T>> {
    let n = rho.dims.len();
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if keep.is_empty() || sorted.len() != keep.len() || sorted.iter().any(|&k| k >= n) {
        return Err(Error::Selection { keep: keep.to_vec(), n });
    }
    let dims = rho.dims.as_slice();
    let kept_dims: Vec<usize> = sorted.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();

    let total = rho.dims.total();
    let mut kept_of = vec![0usize; total];
    let mut traced_of = vec![0usize; total];
    for (i, (k_slot, t_slot)) in kept_of.iter_mut().zip(traced_of.iter_mut()).enumerate() {
        let digits = rho.dims.digits(i);
        let (mut k_idx, mut t_idx) = (0, 0);
        for (pos, (&digit, &d)) in digits.iter().zip(dims).enumerate() {
            if sorted.binary_search(&pos).is_ok() {
                k_idx = k_idx * d + digit;
            } else {
                t_idx = t_idx * d + digit;
            }
        }
        *k_slot = k_idx;
        *t_slot = t_idx;
    }

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for i in 0..total {
        for j in 0..total {
            if traced_of[i] == traced_of[j] {
                out[(kept_of[i], kept_of[j])] += rho.matrix[(i, j)];
            }
        }
    }
    Ok(DensityMatrix { dims: Dims(kept_dims), matrix: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cr, Scalar};
    use num_traits::Zero;

    type M = ComplexMatrix<f64>;

    fn bell() -> DensityMatrix<f64> {
        let h = 0.5f64.sqrt();
        DensityMatrix::from_pure(&[cr(h), C::zero(), C::zero(), cr(h)], Dims::new([2, 2]).unwrap()).unwrap()
    }

    #[test]
    fn dims_validation() {
        assert!(Dims::new(Vec::<usize>::new()).is_err());
        assert!(Dims::new([2, 1]).is_err());
        let d = Dims::new([2, 3, 4]).unwrap();
        assert_eq!(d.total(), 24);
        assert_eq!(d.coherence_len(), 4 * 9 * 16);
        assert_eq!(d.digits(23), vec![1, 2, 3]);
        assert_eq!(d.digits(4), vec![0, 1, 0]);
    }

    #[test]
    fn validate_examples() {
        let tol = Tolerances::default();
        let d22 = Dims::new([2, 2]).unwrap();
        assert!(validate_density(M::identity(4).scale(0.25), d22.clone(), &tol).is_ok());
        let e = validate_density(M::from_real_diagonal(&[0.9, 0.0, 0.0, 0.0]), d22.clone(), &tol).unwrap_err();
        assert!(matches!(e, Error::TraceNotOne { .. }));
        let e = validate_density(M::from_real_diagonal(&[1.1, -0.1, 0.0, 0.0]), d22.clone(), &tol).unwrap_err();
        assert!(matches!(e, Error::NotPositive { .. }));
        let e = validate_density(M::identity(3).scale(1.0 / 3.0), d22.clone(), &tol).unwrap_err();
        assert!(matches!(e, Error::DimensionMismatch { .. }));
        let mut nh = M::identity(4).scale(0.25);
        nh[(0, 1)] = cr(0.1);
        let e = validate_density(nh, d22, &tol).unwrap_err();
        assert!(matches!(e, Error::NotHermitian { .. }));
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let r = bell().partial_trace(&[0]).unwrap();
        assert!(r.matrix().max_abs_diff(&M::identity(2).scale(0.5)) < 1e-15);
        let r = bell().partial_trace(&[1]).unwrap();
        assert!(r.matrix().max_abs_diff(&M::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn product_marginal() {
        let d2 = Dims::new([2]).unwrap();
        let zero = DensityMatrix::from_pure(&[cr(1.0), C::zero()], d2.clone()).unwrap();
        let other = DensityMatrix::assume_valid(M::from_real_diagonal(&[0.3, 0.7]), d2);
        let prod = zero.tensor(&other);
        let back = prod.partial_trace(&[0]).unwrap();
        assert!(back.matrix().max_abs_diff(zero.matrix()) < 1e-15);
        let back = prod.partial_trace(&[1]).unwrap();
        assert!(back.matrix().max_abs_diff(other.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_three_parties_keeps_order() {
        let d2 = Dims::new([2]).unwrap();
        let d3 = Dims::new([3]).unwrap();
        let a = DensityMatrix::assume_valid(M::from_real_diagonal(&[0.2, 0.8]), d2.clone());
        let b = DensityMatrix::assume_valid(M::from_real_diagonal(&[0.1, 0.3, 0.6]), d3);
        let c = DensityMatrix::assume_valid(M::from_real_diagonal(&[0.5, 0.5]), d2);
        let abc = a.tensor(&b).tensor(&c);
        let ac = abc.partial_trace(&[2, 0]).unwrap();
        assert_eq!(ac.dims().as_slice(), &[2, 2]);
        assert!(ac.matrix().max_abs_diff(a.tensor(&c).matrix()) < 1e-15);
    }

    #[test]
    fn selection_errors() {
        assert!(bell().partial_trace(&[]).is_err());
        assert!(bell().partial_trace(&[2]).is_err());
        assert!(bell().partial_trace(&[0, 0]).is_err());
    }

    #[test]
    fn purity_values() {
        assert!((bell().purity() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::assume_valid(M::identity(3).scale(1.0 / 3.0), Dims::new([3]).unwrap());
        assert!((mixed.purity() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn default_tolerances_by_precision() {
        assert_eq!(Tolerances::<f64>::default().herm, 1e-9);
        assert!(Tolerances::<f32>::default().herm > 1e-5);
        assert!(Tolerances::<f64>::default().is_valid());
        assert!(!Tolerances::uniform(f64::NAN).is_valid());
        assert!(f64::of(2.0).as_f64() == 2.0);
    }

    #[test]
    fn unnormalized_pure_rejected() {
        let e = DensityMatrix::<f64>::from_pure(&[cr(1.0), cr(1.0)], Dims::new([2]).unwrap()).unwrap_err();
        assert!(matches!(e, Error::NotNormalized { .. }));
    }
}
