//! Flip and unflip superoperators.
//!
//! In the density picture the flip is the pair-generator sum
//! `F(ρ) = Σ (⊗σ_{i_k j_k}) ρ* (⊗σ_{i_k j_k})`. In the coherence picture both
//! superoperators are diagonal: locally the flip keeps the identity
//! component and maps every traceless component to `−1/(N−1)` times itself,
//! the unflip maps it to `+1/(N−1)` times itself. Their sum `G = S + S̄` is
//! therefore diagonal with weight `2·∏_{i_k≠0} 1/(N_k−1)` on multi-indices
//! with an even number of non-zero entries and 0 otherwise.
//!
//! The unflip here realizes that coherence action directly:
//! `F̄_k(X) = (X + (N_k−2)/N_k · tr_k(X) ⊗ I_k) / (N_k−1)` on each subsystem.
//! For qubits this coincides with the projector-pair sum
//! [`unflip_pairwise`]; for N ≥ 3 the pair sum leaves the diagonal
//! traceless components unscaled and is kept only as a diagnostic.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::basis::pair_at;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{c, cr, from_usize, Scalar, C};
use crate::state::{DensityMatrix, Dims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipKind {
    Flip,
    Unflip,
}

/// Selects `σ_{ij}` (flip) or `σ̄_{ij}` (unflip) for one subsystem of
/// dimension `dim`. Levels are 1-based with `1 <= i < j <= dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlipGeneratorIndex {
    dim: usize,
    i: usize,
    j: usize,
    kind: FlipKind,
}

impl FlipGeneratorIndex {
    pub fn new(dim: usize, i: usize, j: usize, kind: FlipKind) -> Result<Self> {
        if dim < 2 || i == 0 || i >= j || j > dim {
            return Err(Error::LevelPair { dim, i, j });
        }
        Ok(Self { dim, i, j, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn kind(&self) -> FlipKind {
        self.kind
    }
}

type Sparse<T> = Vec<(usize, usize, C<T>)>;

fn generator_entries<T: Scalar>(g: FlipGeneratorIndex) -> Sparse<T> {
    let scale = T::one() / from_usize::<T>(g.dim - 1).sqrt();
    let (i, j) = (g.i - 1, g.j - 1);
    match g.kind {
        // −i/√(N−1) (δ_ir δ_js − δ_jr δ_is)
        FlipKind::Flip => vec![(i, j, c(T::zero(), -scale)), (j, i, c(T::zero(), scale))],
        // 1/√(N−1) (δ_ir δ_is + δ_jr δ_js)
        FlipKind::Unflip => vec![(i, i, cr(scale)), (j, j, cr(scale))],
    }
}

pub fn flip_generator<T: Scalar>(g: FlipGeneratorIndex) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(g.dim, g.dim);
    for (r, s, v) in generator_entries::<T>(g) {
        m[(r, s)] = v;
    }
    m
}

/// Non-zeros of `⊗_k A_k` given the non-zeros of each factor.
fn sparse_kron<T: Scalar>(factors: &[Sparse<T>], dims: &[usize]) -> Sparse<T> {
    let mut acc: Sparse<T> = vec![(0, 0, cr(T::one()))];
    for (f, &d) in factors.iter().zip(dims) {
        acc = acc
            .iter()
            .flat_map(|&(r, s, v)| f.iter().map(move |&(fr, fs, fv)| (r * d + fr, s * d + fs, v * fv)))
            .collect();
    }
    acc
}

/// Σ over every tuple of level pairs of K X K, with K the Kronecker
/// product of the chosen generators.
fn pair_sum<T: Scalar>(x: &ComplexMatrix<T>, dims: &Dims, kind: FlipKind) -> ComplexMatrix<T> {
    let ds = dims.as_slice();
    let pair_counts: Vec<usize> = ds.iter().map(|&d| d * (d - 1) / 2).collect();
    let d = dims.total();
    let mut out = ComplexMatrix::zeros(d, d);
    let mut choice = vec![0usize; ds.len()];
    loop {
        let factors: Vec<Sparse<T>> = choice
            .iter()
            .zip(ds)
            .map(|(&rank, &dim)| {
                let (i, j) = pair_at(dim, rank);
                generator_entries(FlipGeneratorIndex { dim, i, j, kind })
            })
            .collect();
        let k = sparse_kron(&factors, ds);
        for &(a, cc, v1) in &k {
            for &(dd, b, v2) in &k {
                out[(a, b)] += v1 * x[(cc, dd)] * v2;
            }
        }
        // fixed-order odometer over pair tuples
        let mut pos = ds.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < pair_counts[pos] {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// F(ρ) = Σ (⊗σ) ρ* (⊗σ).
pub fn flip<T: Scalar>(rho: &DensityMatrix<T>) -> ComplexMatrix<T> {
    flip_matrix(rho.matrix(), rho.dims())
}

/// The flip superoperator applied to an arbitrary matrix over `dims`.
pub fn flip_matrix<T: Scalar>(x: &ComplexMatrix<T>, dims: &Dims) -> ComplexMatrix<T> {
    pair_sum(&x.conj(), dims, FlipKind::Flip)
}

/// F̄(ρ): identity component kept, traceless components scaled by
/// `∏ 1/(N_k−1)` over the subsystems they act on.
pub fn unflip<T: Scalar>(rho: &DensityMatrix<T>) -> ComplexMatrix<T> {
    unflip_matrix(rho.matrix(), rho.dims())
}

pub fn unflip_matrix<T: Scalar>(x: &ComplexMatrix<T>, dims: &Dims) -> ComplexMatrix<T> {
    let ds = dims.as_slice();
    let mut cur = x.clone();
    for k in 0..ds.len() {
        cur = local_unflip(&cur, ds, k);
    }
    cur
}

fn local_unflip<T: Scalar>(x: &ComplexMatrix<T>, ds: &[usize], k: usize) -> ComplexMatrix<T> {
    let n = ds[k];
    let stride: usize = ds[k + 1..].iter().product();
    let nf = from_usize::<T>(n);
    let mix = (nf - T::of(2.0)) / nf;
    let denom = nf - T::one();
    let level = |a: usize| (a / stride) % n;
    let d = x.rows();
    ComplexMatrix::from_fn(d, d, |a, b| {
        let (la, lb) = (level(a), level(b));
        let mut v = x[(a, b)];
        if la == lb && !mix.is_zero() {
            // (tr_k X ⊗ I_k)_{ab}
            let (a0, b0) = (a - la * stride, b - lb * stride);
            let tr = (0..n).fold(C::zero(), |acc, j| acc + x[(a0 + j * stride, b0 + j * stride)]);
            v += tr * mix;
        }
        v / denom
    })
}

/// Σ (⊗σ̄) ρ (⊗σ̄) with the diagonal projector-pair generators. Equal to
/// [`unflip`] when every subsystem is a qubit.
pub fn unflip_pairwise<T: Scalar>(rho: &DensityMatrix<T>) -> ComplexMatrix<T> {
    pair_sum(rho.matrix(), rho.dims(), FlipKind::Unflip)
}

/// Diagonal of `S = ⊗ diag(1, −I/(N_k−1))`, in coherence flat order.
pub fn s_diagonal<T: Scalar>(dims: &Dims) -> Vec<T> {
    local_diag_kron(dims, |n| -T::one() / from_usize::<T>(n - 1))
}

/// Diagonal of `S̄ = ⊗ diag(1, I/(N_k−1))`.
pub fn s_bar_diagonal<T: Scalar>(dims: &Dims) -> Vec<T> {
    local_diag_kron(dims, |n| T::one() / from_usize::<T>(n - 1))
}

fn local_diag_kron<T: Scalar>(dims: &Dims, traceless: impl Fn(usize) -> T) -> Vec<T> {
    let mut acc = vec![T::one()];
    for &n in dims.as_slice() {
        let w = traceless(n);
        let local: Vec<T> = std::iter::once(T::one()).chain(std::iter::repeat_n(w, n * n - 1)).collect();
        acc = acc.iter().flat_map(|&a| local.iter().map(move |&b| a * b)).collect();
    }
    acc
}

/// Diagonal weights of `G = S + S̄`, one per coherence component.
#[derive(Debug, Clone, PartialEq)]
pub struct GWeightTable<T: Scalar> {
    dims: Dims,
    weights: Vec<T>,
}

impl<T: Scalar> GWeightTable<T> {
    pub fn new(dims: &Dims) -> Self {
        let weights = s_diagonal::<T>(dims).into_iter().zip(s_bar_diagonal::<T>(dims)).map(|(a, b)| a + b).collect();
        Self { dims: dims.clone(), weights }
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

/// Weight of G at one multi-index: 2 at the origin, 0 for an odd number of
/// non-zero entries, `2·∏_{i_k≠0} 1/(N_k−1)` otherwise.
pub fn g_weight<T: Scalar>(dims: &Dims, multi: &[usize]) -> T {
    debug_assert_eq!(multi.len(), dims.len());
    let mut active = 0usize;
    let mut w = T::of(2.0);
    for (&i, &n) in multi.iter().zip(dims.as_slice()) {
        if i != 0 {
            active += 1;
            w /= from_usize::<T>(n - 1);
        }
    }
    if active % 2 == 1 {
        T::zero()
    } else {
        w
    }
}

/// `(tr(ρ) I⊗I − ρ₁⊗I − I⊗ρ₂ + ρ) / ((N₁−1)(N₂−1))` for a bipartite ρ.
pub fn universal_inverter<T: Scalar>(rho: &DensityMatrix<T>) -> Result<ComplexMatrix<T>> {
    let ds = rho.dims().as_slice();
    if ds.len() != 2 {
        return Err(Error::NotBipartite(ds.len()));
    }
    let (n1, n2) = (ds[0], ds[1]);
    let rho1 = rho.partial_trace(&[0])?;
    let rho2 = rho.partial_trace(&[1])?;
    let id1 = ComplexMatrix::identity(n1);
    let id2 = ComplexMatrix::identity(n2);
    let mut out = ComplexMatrix::identity(n1 * n2).scale_complex(rho.matrix().trace());
    out = &out - &rho1.matrix().kron(&id2);
    out = &out - &id1.kron(rho2.matrix());
    out += rho.matrix();
    Ok(out.scale(T::one() / from_usize::<T>((n1 - 1) * (n2 - 1))))
}
