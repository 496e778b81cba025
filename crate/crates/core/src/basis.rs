//! Orthonormal Hermitian operator basis of N×N matrices: the normalized
//! identity followed by the symmetric (x), antisymmetric (y) and diagonal (z)
//! generalized Gell-Mann matrices.
//!
//! Flat ordering for dimension N, with M = N(N−1)/2 level pairs enumerated
//! lexicographically `(1,2), (1,3), …, (N−1,N)`:
//!
//! | flat            | element      |
//! |-----------------|--------------|
//! | 0               | I/√N         |
//! | 1 ..= M         | Ω^x_{ij}     |
//! | M+1 ..= 2M      | Ω^y_{ij}     |
//! | 2M+1 ..= N²−1   | Ω^z_p, p = flat − 2M + 1 |

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{c, cr, from_usize, Scalar, C};

/// What a flat index designates. Levels are 1-based as in the usual
/// physics notation; `Z { p }` has `2 <= p <= N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Identity,
    X { i: usize, j: usize },
    Y { i: usize, j: usize },
    Z { p: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    dim: usize,
    flat: usize,
}

impl BasisIndex {
    pub fn new(dim: usize, flat: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDims(vec![dim]));
        }
        if flat >= dim * dim {
            return Err(Error::BasisIndex { dim, flat });
        }
        Ok(Self { dim, flat })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn flat(&self) -> usize {
        self.flat
    }

    pub fn kind(&self) -> BasisKind {
        let n = self.dim;
        let m = n * (n - 1) / 2;
        match self.flat {
            0 => BasisKind::Identity,
            f if f <= m => {
                let (i, j) = pair_at(n, f - 1);
                BasisKind::X { i, j }
            }
            f if f <= 2 * m => {
                let (i, j) = pair_at(n, f - 1 - m);
                BasisKind::Y { i, j }
            }
            f => BasisKind::Z { p: f - 2 * m + 1 },
        }
    }

    /// Inverse of [`BasisIndex::kind`].
    pub fn from_kind(dim: usize, kind: BasisKind) -> Result<Self> {
        let m = dim * (dim.max(1) - 1) / 2;
        let flat = match kind {
            BasisKind::Identity => 0,
            BasisKind::X { i, j } => 1 + pair_rank(dim, i, j)?,
            BasisKind::Y { i, j } => 1 + m + pair_rank(dim, i, j)?,
            BasisKind::Z { p } if (2..=dim).contains(&p) => 2 * m + p - 1,
            BasisKind::Z { .. } => return Err(Error::BasisIndex { dim, flat: dim * dim }),
        };
        Self::new(dim, flat)
    }
}

/// The `rank`-th pair (i, j), 1-based, i < j, in lexicographic order.
pub(crate) fn pair_at(n: usize, mut rank: usize) -> (usize, usize) {
    for i in 1..n {
        let row = n - i;
        if rank < row {
            return (i, i + 1 + rank);
        }
        rank -= row;
    }
    unreachable!("pair rank out of range")
}

fn pair_rank(n: usize, i: usize, j: usize) -> Result<usize> {
    if i == 0 || i >= j || j > n {
        return Err(Error::LevelPair { dim: n, i, j });
    }
    Ok((1..i).map(|k| n - k).sum::<usize>() + (j - i - 1))
}

/// Non-zero entries `(row, col, value)` of a basis element, 0-based.
pub fn basis_entries<T: Scalar>(idx: BasisIndex) -> Vec<(usize, usize, C<T>)> {
    let n = idx.dim;
    let h = T::FRAC_1_SQRT_2();
    match idx.kind() {
        BasisKind::Identity => {
            let v = cr(T::one() / from_usize::<T>(n).sqrt());
            (0..n).map(|r| (r, r, v)).collect()
        }
        BasisKind::X { i, j } => vec![(i - 1, j - 1, cr(h)), (j - 1, i - 1, cr(h))],
        BasisKind::Y { i, j } => vec![(i - 1, j - 1, c(T::zero(), -h)), (j - 1, i - 1, c(T::zero(), h))],
        BasisKind::Z { p } => {
            let pf = from_usize::<T>(p);
            let upper = T::one() / (pf * (pf - T::one())).sqrt();
            let last = -((pf - T::one()) / pf).sqrt();
            (0..p).map(|r| (r, r, cr(if r + 1 < p { upper } else { last }))).collect()
        }
    }
}

pub fn basis_element<T: Scalar>(idx: BasisIndex) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(idx.dim, idx.dim);
    for (r, s, v) in basis_entries::<T>(idx) {
        m[(r, s)] = v;
    }
    m
}

/// All N² basis elements in flat order.
pub fn basis_list<T: Scalar>(dim: usize) -> Result<Vec<ComplexMatrix<T>>> {
    if dim < 2 {
        return Err(Error::InvalidDims(vec![dim]));
    }
    (0..dim * dim).map(|f| BasisIndex::new(dim, f).map(basis_element)).collect()
}

/// Sparse entries of every element for one dimension, indexed by flat index.
pub(crate) fn sparse_basis<T: Scalar>(dim: usize) -> Vec<Vec<(usize, usize, C<T>)>> {
    (0..dim * dim)
        .map(|f| basis_entries(BasisIndex { dim, flat: f }))
        .map(|mut e| {
            e.retain(|(_, _, v)| !v.is_zero());
            e
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn el(dim: usize, flat: usize) -> M {
        basis_element(BasisIndex::new(dim, flat).unwrap())
    }

    #[test]
    fn qubit_basis_is_scaled_pauli() {
        let h = 0.5f64.sqrt();
        assert!(el(2, 0).max_abs_diff(&M::identity(2).scale(h)) < 1e-15);
        let sx = M::new(2, 2, vec![C::zero(), cr(h), cr(h), C::zero()]).unwrap();
        let sy = M::new(2, 2, vec![C::zero(), c(0.0, -h), c(0.0, h), C::zero()]).unwrap();
        let sz = M::from_real_diagonal(&[h, -h]);
        assert!(el(2, 1).max_abs_diff(&sx) < 1e-15);
        assert!(el(2, 2).max_abs_diff(&sy) < 1e-15);
        assert!(el(2, 3).max_abs_diff(&sz) < 1e-15);
    }

    #[test]
    fn qutrit_examples() {
        let h = 0.5f64.sqrt();
        let z2 = basis_element::<f64>(BasisIndex::from_kind(3, BasisKind::Z { p: 2 }).unwrap());
        assert!(z2.max_abs_diff(&M::from_real_diagonal(&[h, -h, 0.0])) < 1e-15);
        let x12 = basis_element::<f64>(BasisIndex::from_kind(3, BasisKind::X { i: 1, j: 2 }).unwrap());
        let mut want = M::zeros(3, 3);
        want[(0, 1)] = cr(h);
        want[(1, 0)] = cr(h);
        assert!(x12.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn flat_layout() {
        // N = 4: M = 6 pairs
        let kinds: Vec<BasisKind> = (0..16).map(|f| BasisIndex::new(4, f).unwrap().kind()).collect();
        assert_eq!(kinds[0], BasisKind::Identity);
        assert_eq!(kinds[1], BasisKind::X { i: 1, j: 2 });
        assert_eq!(kinds[3], BasisKind::X { i: 1, j: 4 });
        assert_eq!(kinds[4], BasisKind::X { i: 2, j: 3 });
        assert_eq!(kinds[6], BasisKind::X { i: 3, j: 4 });
        assert_eq!(kinds[7], BasisKind::Y { i: 1, j: 2 });
        assert_eq!(kinds[12], BasisKind::Y { i: 3, j: 4 });
        assert_eq!(kinds[13], BasisKind::Z { p: 2 });
        assert_eq!(kinds[15], BasisKind::Z { p: 4 });
        for (f, k) in kinds.iter().enumerate() {
            assert_eq!(BasisIndex::from_kind(4, *k).unwrap().flat(), f);
        }
    }

    #[test]
    fn range_errors() {
        assert!(BasisIndex::new(2, 4).is_err());
        assert!(BasisIndex::new(1, 0).is_err());
        assert!(basis_list::<f64>(1).is_err());
        assert!(BasisIndex::from_kind(3, BasisKind::Z { p: 1 }).is_err());
        assert!(BasisIndex::from_kind(3, BasisKind::X { i: 2, j: 2 }).is_err());
    }

    #[test]
    fn orthonormal_hermitian_traceless() {
        for n in 2..=5 {
            let b = basis_list::<f64>(n).unwrap();
            assert_eq!(b.len(), n * n);
            for (i, bi) in b.iter().enumerate() {
                assert!(bi.hermiticity_defect() < 1e-15);
                if i > 0 {
                    assert!(bi.trace().norm() < 1e-14);
                }
                for (j, bj) in b.iter().enumerate() {
                    let ip = bi.trace_of_product(bj);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip.re - want).abs() < 1e-12 && ip.im.abs() < 1e-12, "N={n} ({i},{j})");
                }
            }
        }
    }
}
