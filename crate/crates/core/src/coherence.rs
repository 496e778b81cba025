//! Expanded coherence vectors: coefficients of a state in the product
//! Gell-Mann basis `Ω_{i_1} ⊗ … ⊗ Ω_{i_n}`.

use num_traits::Zero;

use crate::basis::sparse_basis;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{cr, from_usize, Scalar, C};
use crate::state::{validate_density, DensityMatrix, Dims, Tolerances};

/// Largest imaginary part tolerated when a trace should be real.
pub(crate) fn residue_tol<T: Scalar>() -> T {
    T::of(1e-10).max(T::epsilon() * T::of(1e3))
}

/// Real coefficient vector of length ∏N_k², indexed row-major by
/// `(i_1, …, i_n)` with `i_k ∈ [0, N_k²)` and subsystem 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedCoherenceVector<T: Scalar> {
    dims: Dims,
    data: Vec<T>,
}

impl<T: Scalar> ExpandedCoherenceVector<T> {
    /// Checks length and the identity component `1/√∏N_k` (within `tol`).
    pub fn new(dims: Dims, data: Vec<T>, tol: T) -> Result<Self> {
        if data.len() != dims.coherence_len() {
            return Err(Error::DimensionMismatch { expected: dims.coherence_len(), found: data.len() });
        }
        let expected = identity_component::<T>(&dims);
        if (data[0] - expected).abs() > tol {
            return Err(Error::Normalization { expected: expected.as_f64(), found: data[0].as_f64() });
        }
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Component at a multi-index.
    pub fn get(&self, multi: &[usize]) -> Result<T> {
        Ok(self.data[flatten_index(&self.dims, multi)?])
    }

    /// ‖m̄‖², equal to tr ρ².
    pub fn norm_sqr(&self) -> T {
        self.data.iter().map(|&x| x * x).sum()
    }

    /// Vector Kronecker product, matching the coherence vector of ρ₁ ⊗ ρ₂.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.as_slice().to_vec();
        dims.extend_from_slice(other.dims.as_slice());
        let data = self.data.iter().flat_map(|&a| other.data.iter().map(move |&b| a * b)).collect();
        Self { dims: Dims::new(dims).expect("concatenated dims are valid"), data }
    }
}

pub(crate) fn identity_component<T: Scalar>(dims: &Dims) -> T {
    T::one() / from_usize::<T>(dims.total()).sqrt()
}

/// Row-major flat position of a multi-index.
pub fn flatten_index(dims: &Dims, multi: &[usize]) -> Result<usize> {
    if multi.len() != dims.len() || multi.iter().zip(dims.as_slice()).any(|(&i, &d)| i >= d * d) {
        return Err(Error::MultiIndex { dims: dims.as_slice().to_vec(), index: multi.to_vec() });
    }
    Ok(multi.iter().zip(dims.as_slice()).fold(0, |acc, (&i, &d)| acc * d * d + i))
}

/// Inverse of [`flatten_index`].
pub fn unflatten_index(dims: &Dims, flat: usize) -> Result<Vec<usize>> {
    let len = dims.coherence_len();
    if flat >= len {
        return Err(Error::FlatIndex { flat, len });
    }
    let mut out = vec![0; dims.len()];
    let mut rest = flat;
    for (slot, &d) in out.iter_mut().zip(dims.as_slice()).rev() {
        *slot = rest % (d * d);
        rest /= d * d;
    }
    Ok(out)
}

/// Calls `f(flat, multi)` for every coherence multi-index in flat order.
pub(crate) fn for_each_multi_index(dims: &Dims, mut f: impl FnMut(usize, &[usize])) {
    let radices: Vec<usize> = dims.as_slice().iter().map(|d| d * d).collect();
    let mut multi = vec![0usize; radices.len()];
    for flat in 0..dims.coherence_len() {
        f(flat, &multi);
        for k in (0..multi.len()).rev() {
            multi[k] += 1;
            if multi[k] < radices[k] {
                break;
            }
            multi[k] = 0;
        }
    }
}

/// Walks every combination of one non-zero entry per local basis element,
/// yielding the composite (row, col) and the product of the entry values.
fn for_each_product_entry<T: Scalar>(
    locals: &[&[(usize, usize, C<T>)]],
    dims: &[usize],
    mut f: impl FnMut(usize, usize, C<T>),
) {
    let n = locals.len();
    if locals.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut choice = vec![0usize; n];
    loop {
        let (mut r, mut s, mut v) = (0usize, 0usize, cr(T::one()));
        for k in 0..n {
            let (lr, ls, lv) = locals[k][choice[k]];
            r = r * dims[k] + lr;
            s = s * dims[k] + ls;
            v *= lv;
        }
        f(r, s, v);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < locals[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// m_{i_1…i_n} = tr[ρ Ω_{i_1} ⊗ … ⊗ Ω_{i_n}].
pub fn encode<T: Scalar>(rho: &DensityMatrix<T>) -> Result<ExpandedCoherenceVector<T>> {
    let data = encode_matrix(rho.matrix(), rho.dims())?;
    Ok(ExpandedCoherenceVector { dims: rho.dims().clone(), data })
}

/// Coefficients of an arbitrary Hermitian operator; fails when any
/// coefficient carries an imaginary part above the residue tolerance.
pub(crate) fn encode_matrix<T: Scalar>(m: &ComplexMatrix<T>, dims: &Dims) -> Result<Vec<T>> {
    let (data, residue) = encode_complex(m, dims);
    if residue > residue_tol::<T>() {
        return Err(Error::ImaginaryResidue { residue: residue.as_f64() });
    }
    Ok(data)
}

/// Real parts of the product-basis coefficients and the largest imaginary part seen.
pub(crate) fn encode_complex<T: Scalar>(m: &ComplexMatrix<T>, dims: &Dims) -> (Vec<T>, T) {
    let local: Vec<_> = dims.as_slice().iter().map(|&d| sparse_basis::<T>(d)).collect();
    let ds = dims.as_slice();
    let mut data = vec![T::zero(); dims.coherence_len()];
    let mut residue = T::zero();
    for_each_multi_index(dims, |flat, multi| {
        let parts: Vec<&[(usize, usize, C<T>)]> = multi.iter().zip(&local).map(|(&i, l)| l[i].as_slice()).collect();
        let mut acc = C::<T>::zero();
        // tr(ρK) = Σ_{r,s} ρ_{s r} K_{r s}
        for_each_product_entry(&parts, ds, |r, s, v| acc += m[(s, r)] * v);
        data[flat] = acc.re;
        residue = residue.max(acc.im.abs());
    });
    (data, residue)
}

/// ρ = Σ m_{i_1…i_n} Ω_{i_1} ⊗ … ⊗ Ω_{i_n}. The result is Hermitian with
/// unit trace; positivity is not checked.
pub fn decode_matrix<T: Scalar>(v: &ExpandedCoherenceVector<T>) -> ComplexMatrix<T> {
    let local: Vec<_> = v.dims.as_slice().iter().map(|&d| sparse_basis::<T>(d)).collect();
    let ds = v.dims.as_slice();
    let d = v.dims.total();
    let mut out = ComplexMatrix::zeros(d, d);
    for_each_multi_index(&v.dims, |flat, multi| {
        let coeff = v.data[flat];
        if coeff.is_zero() {
            return;
        }
        let parts: Vec<&[(usize, usize, C<T>)]> = multi.iter().zip(&local).map(|(&i, l)| l[i].as_slice()).collect();
        for_each_product_entry(&parts, ds, |r, s, val| out[(r, s)] += val * coeff);
    });
    out
}

/// Decodes and fully validates, positivity included.
pub fn decode<T: Scalar>(v: &ExpandedCoherenceVector<T>, tol: &Tolerances<T>) -> Result<DensityMatrix<T>> {
    validate_density(decode_matrix(v), v.dims.clone(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn d(v: &[usize]) -> Dims {
        Dims::new(v.to_vec()).unwrap()
    }

    #[test]
    fn index_examples() {
        assert_eq!(flatten_index(&d(&[2, 2]), &[0, 0]).unwrap(), 0);
        assert_eq!(flatten_index(&d(&[2, 2]), &[3, 2]).unwrap(), 14);
        assert!(flatten_index(&d(&[2, 2]), &[4, 0]).is_err());
        assert!(flatten_index(&d(&[2, 2]), &[0]).is_err());
        assert!(unflatten_index(&d(&[2, 2]), 16).is_err());
    }

    #[test]
    fn index_roundtrip_exhaustive() {
        let dims = d(&[4, 9]);
        for flat in 0..dims.coherence_len() {
            let m = unflatten_index(&dims, flat).unwrap();
            assert_eq!(flatten_index(&dims, &m).unwrap(), flat);
        }
        let mut seen = 0;
        for_each_multi_index(&dims, |flat, multi| {
            assert_eq!(unflatten_index(&dims, flat).unwrap(), multi);
            seen += 1;
        });
        assert_eq!(seen, 16 * 81);
    }

    #[test]
    fn completely_mixed_two_qubits() {
        let rho = DensityMatrix::assume_valid(ComplexMatrix::<f64>::identity(4).scale(0.25), d(&[2, 2]));
        let v = encode(&rho).unwrap();
        assert!((v.as_slice()[0] - 0.5).abs() < 1e-15);
        assert!(v.as_slice()[1..].iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn ket_zero() {
        let rho = DensityMatrix::assume_valid(ComplexMatrix::<f64>::from_real_diagonal(&[1.0, 0.0]), d(&[2]));
        let v = encode(&rho).unwrap();
        let h = 0.5f64.sqrt();
        let want = [h, 0.0, 0.0, h];
        for (a, b) in v.as_slice().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn bell_components() {
        let h = 0.5f64.sqrt();
        let rho = DensityMatrix::from_pure(&[cr(h), C::zero(), C::zero(), cr(h)], d(&[2, 2])).unwrap();
        let v = encode(&rho).unwrap();
        let mut want = [0.0f64; 16];
        want[0] = 0.5; // (0,0)
        want[5] = 0.5; // (x,x)
        want[10] = -0.5; // (y,y)
        want[15] = 0.5; // (z,z)
        for (a, b) in v.as_slice().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn decode_examples() {
        let h = 0.5f64.sqrt();
        let tol = Tolerances::default();
        let v = ExpandedCoherenceVector::new(d(&[2]), vec![h, 0.0, 0.0, 0.0], 1e-9).unwrap();
        let rho = decode(&v, &tol).unwrap();
        assert!(rho.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);

        let v = ExpandedCoherenceVector::new(d(&[2]), vec![h, 0.0, 0.0, 1.0], 1e-9).unwrap();
        let m = decode_matrix(&v);
        assert!(m.hermiticity_defect() < 1e-15);
        assert!((m.trace().re - 1.0).abs() < 1e-15);
        assert!(matches!(decode(&v, &tol), Err(Error::NotPositive { .. })));

        assert!(matches!(
            ExpandedCoherenceVector::new(d(&[2]), vec![0.5, 0.0, 0.0, 0.0], 1e-9),
            Err(Error::Normalization { .. })
        ));
        assert!(ExpandedCoherenceVector::new(d(&[2]), vec![h, 0.0], 1e-9).is_err());
    }

    #[test]
    fn non_hermitian_input_has_residue() {
        let mut m = ComplexMatrix::<f64>::identity(2).scale(0.5);
        m[(0, 1)] = c(0.3, 0.0);
        assert!(matches!(encode_matrix(&m, &d(&[2])), Err(Error::ImaginaryResidue { .. })));
    }
}
