//! Cyclic Jacobi diagonalization of Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot entry with a diagonal
//! unitary and then applies a real plane rotation, so the iteration stays in
//! the Hermitian class and converges quadratically once off-diagonal mass is small.

use num_traits::Zero;

use crate::matrix::ComplexMatrix;
use crate::scalar::{c, cr, Scalar, C};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = V diag(values) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Scalar> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Eigenvectors as columns, ordered like `values`.
    pub vectors: ComplexMatrix<T>,
}

/// Diagonalizes the Hermitian part of `a`. Non-square input panics.
pub fn hermitian_eigen<T: Scalar>(a: &ComplexMatrix<T>) -> HermitianEigen<T> {
    assert!(a.is_square(), "eigen-decomposition needs a square matrix");
    let n = a.rows();
    let half = T::of(0.5);
    let mut m = ComplexMatrix::from_fn(n, n, |r, s| (a[(r, s)] + a[(s, r)].conj()) * half);
    let mut v = ComplexMatrix::<T>::identity(n);

    let scale = m.frobenius_norm().max(T::min_positive_value());
    let target = T::epsilon() * scale;

    for _ in 0..MAX_SWEEPS {
        let off: T =
            (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).map(|(p, q)| m[(p, q)].norm_sqr()).sum::<T>().sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    HermitianEigen { values, vectors }
}

/// Ascending eigenvalues of the Hermitian part of `a`.
pub fn hermitian_eigenvalues<T: Scalar>(a: &ComplexMatrix<T>) -> Vec<T> {
    hermitian_eigen(a).values
}

/// Singular values of an arbitrary matrix, descending.
pub fn singular_values<T: Scalar>(a: &ComplexMatrix<T>) -> Vec<T> {
    let gram = &a.adjoint() * a;
    let mut s: Vec<T> = hermitian_eigenvalues(&gram).into_iter().map(|x| x.max(T::zero()).sqrt()).collect();
    s.reverse();
    s
}

fn rotate<T: Scalar>(m: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let b = apq.norm();
    if b <= T::min_positive_value() {
        return;
    }
    let phase = apq / b; // e^{iφ}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (b + b);
    let t = {
        let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
        if theta < T::zero() {
            -t
        } else {
            t
        }
    };
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;

    // J = diag(1, e^{-iφ}) · [[c, s], [-s, c]] restricted to (p, q)
    let j_pp = cr(cs);
    let j_pq = cr(sn);
    let j_qp = phase.conj() * (-sn);
    let j_qq = phase.conj() * cs;

    let n = m.rows();
    for r in 0..n {
        let xp = m[(r, p)];
        let xq = m[(r, q)];
        m[(r, p)] = xp * j_pp + xq * j_qp;
        m[(r, q)] = xp * j_pq + xq * j_qq;
        let yp = v[(r, p)];
        let yq = v[(r, q)];
        v[(r, p)] = yp * j_pp + yq * j_qp;
        v[(r, q)] = yp * j_pq + yq * j_qq;
    }
    for s in 0..n {
        let xp = m[(p, s)];
        let xq = m[(q, s)];
        m[(p, s)] = j_pp.conj() * xp + j_qp.conj() * xq;
        m[(q, s)] = j_pq.conj() * xp + j_qq.conj() * xq;
    }
    m[(p, q)] = C::zero();
    m[(q, p)] = C::zero();
    m[(p, p)] = c(m[(p, p)].re, T::zero());
    m[(q, q)] = c(m[(q, q)].re, T::zero());
}
