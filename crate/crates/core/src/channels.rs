//! Local unitaries and local Kraus channels, in both the density picture
//! and as real linear maps on expanded coherence vectors.

use rand::Rng;
use serde::Serialize;

use crate::basis::sparse_basis;
use crate::coherence::encode_complex;
use crate::eigen::singular_values;
use crate::error::{Error, Result};
use crate::matrix::{kron_all, ComplexMatrix};
use crate::random::{random_unitary, seeded_rng};
use crate::scalar::{cr, Scalar};
use crate::state::{validate_density, DensityMatrix, Dims, Tolerances};

fn unitary_tol<T: Scalar>() -> T {
    T::of(1e-10).max(T::epsilon() * T::of(1e3))
}

fn channel_tol<T: Scalar>() -> T {
    T::of(1e-9).max(T::epsilon() * T::of(1e3))
}

fn check_factor_dims<T: Scalar>(dims: &Dims, k: usize, m: &ComplexMatrix<T>) -> Result<()> {
    let d = dims.as_slice()[k];
    if m.rows() != d || m.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: m.rows().max(m.cols()) });
    }
    Ok(())
}

/// U = U_1 ⊗ … ⊗ U_n.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary<T: Scalar> {
    dims: Dims,
    factors: Vec<ComplexMatrix<T>>,
}

impl<T: Scalar> LocalUnitary<T> {
    pub fn new(dims: Dims, factors: Vec<ComplexMatrix<T>>) -> Result<Self> {
        if factors.len() != dims.len() {
            return Err(Error::DimensionMismatch { expected: dims.len(), found: factors.len() });
        }
        for (k, u) in factors.iter().enumerate() {
            check_factor_dims(&dims, k, u)?;
            let defect = u.unitarity_defect();
            if defect > unitary_tol::<T>() {
                return Err(Error::NotUnitary { subsystem: k, defect: defect.as_f64() });
            }
        }
        Ok(Self { dims, factors })
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn factors(&self) -> &[ComplexMatrix<T>] {
        &self.factors
    }

    /// The full operator ⊗U_k.
    pub fn matrix(&self) -> ComplexMatrix<T> {
        kron_all(&self.factors)
    }

    /// The same map as a channel with one Kraus operator per subsystem.
    pub fn as_channel(&self) -> LocalKrausChannel<T> {
        LocalKrausChannel {
            dims: self.dims.clone(),
            kraus: self.factors.iter().map(|u| vec![u.clone()]).collect(),
            povm: true,
        }
    }
}

/// Completeness and normality defects of per-subsystem Kraus lists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PovmDiagnosis<T> {
    /// ‖Σ_j L_j†L_j − I‖_max per subsystem.
    pub completeness_defects: Vec<T>,
    /// ‖[L_j, L_j†]‖_max per subsystem and operator.
    pub normality_defects: Vec<Vec<T>>,
    pub complete: bool,
    pub povm: bool,
}

/// Diagnoses Kraus lists; never fails. Non-square or empty lists count as
/// infinitely defective.
pub fn validate_povm<T: Scalar>(kraus: &[Vec<ComplexMatrix<T>>]) -> PovmDiagnosis<T> {
    let tol = channel_tol::<T>();
    let mut completeness_defects = Vec::with_capacity(kraus.len());
    let mut normality_defects = Vec::with_capacity(kraus.len());
    for ops in kraus {
        let d = ops.first().map_or(0, |m| m.rows());
        let shapes_ok = d > 0 && ops.iter().all(|m| m.rows() == d && m.cols() == d);
        if !shapes_ok {
            completeness_defects.push(T::infinity());
            normality_defects.push(vec![T::infinity(); ops.len()]);
            continue;
        }
        let mut sum = ComplexMatrix::zeros(d, d);
        for l in ops {
            sum += &(&l.adjoint() * l);
        }
        completeness_defects.push(sum.max_abs_diff(&ComplexMatrix::identity(d)));
        normality_defects.push(ops.iter().map(|l| l.normality_defect()).collect());
    }
    let complete = !kraus.is_empty() && completeness_defects.iter().all(|&x| x <= tol);
    let povm = complete && normality_defects.iter().flatten().all(|&x| x <= tol);
    PovmDiagnosis { completeness_defects, normality_defects, complete, povm }
}

/// ε = ε_1 ⊗ … ⊗ ε_n with ε_k(X) = Σ_j L_j X L_j†.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalKrausChannel<T: Scalar> {
    dims: Dims,
    kraus: Vec<Vec<ComplexMatrix<T>>>,
    povm: bool,
}

impl<T: Scalar> LocalKrausChannel<T> {
    /// Fails when a list does not match its subsystem or is incomplete.
    pub fn new(dims: Dims, kraus: Vec<Vec<ComplexMatrix<T>>>) -> Result<Self> {
        if kraus.len() != dims.len() {
            return Err(Error::DimensionMismatch { expected: dims.len(), found: kraus.len() });
        }
        for (k, ops) in kraus.iter().enumerate() {
            if ops.is_empty() {
                return Err(Error::Incomplete { subsystem: k, defect: 1.0 });
            }
            for l in ops {
                check_factor_dims(&dims, k, l)?;
            }
        }
        let diag = validate_povm(&kraus);
        if let Some((k, &defect)) = diag.completeness_defects.iter().enumerate().find(|(_, &x)| x > channel_tol::<T>())
        {
            return Err(Error::Incomplete { subsystem: k, defect: defect.as_f64() });
        }
        Ok(Self { dims, kraus, povm: diag.povm })
    }

    /// Single-subsystem channel.
    pub fn single(kraus: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let d = kraus.first().map_or(0, |m| m.rows());
        Self::new(Dims::new([d])?, vec![kraus])
    }

    pub fn identity(dims: &Dims) -> Self {
        Self {
            dims: dims.clone(),
            kraus: dims.as_slice().iter().map(|&d| vec![ComplexMatrix::identity(d)]).collect(),
            povm: true,
        }
    }

    /// Joins single-subsystem channels into one local product channel.
    pub fn product(parts: &[LocalKrausChannel<T>]) -> Result<Self> {
        let mut dims = Vec::new();
        let mut kraus = Vec::new();
        for p in parts {
            dims.extend_from_slice(p.dims.as_slice());
            kraus.extend(p.kraus.iter().cloned());
        }
        Self::new(Dims::new(dims)?, kraus)
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn kraus(&self) -> &[Vec<ComplexMatrix<T>>] {
        &self.kraus
    }

    /// True iff every Kraus operator is normal.
    pub fn is_povm(&self) -> bool {
        self.povm
    }

    pub fn diagnosis(&self) -> PovmDiagnosis<T> {
        validate_povm(&self.kraus)
    }

    /// Restriction to subsystem `k` as a single-subsystem channel.
    pub fn local(&self, k: usize) -> Self {
        let d = self.dims.as_slice()[k];
        let kraus = vec![self.kraus[k].clone()];
        let povm = validate_povm(&kraus).povm;
        Self { dims: Dims::new([d]).expect("subsystem dimension >= 2"), kraus, povm }
    }

    /// Applies the channel to any matrix over `dims`, subsystem by subsystem.
    pub fn apply_matrix(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let ds = self.dims.as_slice();
        let mut cur = x.clone();
        for (k, ops) in self.kraus.iter().enumerate() {
            let left = ComplexMatrix::identity(ds[..k].iter().product());
            let right = ComplexMatrix::identity(ds[k + 1..].iter().product());
            let d = cur.rows();
            let mut next = ComplexMatrix::zeros(d, d);
            for l in ops {
                let full = left.kron(l).kron(&right);
                next += &full.sandwich(&cur);
            }
            cur = next;
        }
        cur
    }
}

fn check_state_dims<T: Scalar>(rho: &DensityMatrix<T>, dims: &Dims) -> Result<()> {
    if rho.dims() != dims {
        return Err(Error::DimensionMismatch { expected: dims.total(), found: rho.dims().total() });
    }
    Ok(())
}

/// UρU†, revalidated.
pub fn apply_local_unitary<T: Scalar>(rho: &DensityMatrix<T>, u: &LocalUnitary<T>) -> Result<DensityMatrix<T>> {
    check_state_dims(rho, &u.dims)?;
    let out = u.matrix().sandwich(rho.matrix());
    validate_density(out, rho.dims().clone(), &Tolerances::default())
}

/// Σ over Kraus tuples (⊗L) ρ (⊗L)†, revalidated.
pub fn apply_local_kraus<T: Scalar>(rho: &DensityMatrix<T>, ch: &LocalKrausChannel<T>) -> Result<DensityMatrix<T>> {
    check_state_dims(rho, &ch.dims)?;
    validate_density(ch.apply_matrix(rho.matrix()), rho.dims().clone(), &Tolerances::default())
}

/// Real square matrix D̄ acting on expanded coherence vectors, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceSuperoperator<T: Scalar> {
    dims: Dims,
    size: usize,
    data: Vec<T>,
}

impl<T: Scalar> CoherenceSuperoperator<T> {
    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.size + c]
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.size);
        (0..self.size)
            .map(|r| self.data[r * self.size..(r + 1) * self.size].iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Kronecker product of two coherence maps.
    pub fn kron(&self, other: &Self) -> Self {
        let size = self.size * other.size;
        let mut data = vec![T::zero(); size * size];
        for ar in 0..self.size {
            for ac in 0..self.size {
                let a = self.get(ar, ac);
                for br in 0..other.size {
                    for bc in 0..other.size {
                        data[(ar * other.size + br) * size + ac * other.size + bc] = a * other.get(br, bc);
                    }
                }
            }
        }
        let mut dims = self.dims.as_slice().to_vec();
        dims.extend_from_slice(other.dims.as_slice());
        Self { dims: Dims::new(dims).expect("valid dims"), size, data }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max)
    }

    /// Largest deviation from the block form diag(1, D): |a − 1| together with
    /// the off-diagonal row `h` and column `g`.
    pub fn block_defect(&self) -> T {
        let mut worst = (self.get(0, 0) - T::one()).abs();
        for k in 1..self.size {
            worst = worst.max(self.get(0, k).abs()).max(self.get(k, 0).abs());
        }
        worst
    }

    /// The lower-right (size−1)×(size−1) block D.
    pub fn coherence_block(&self) -> ComplexMatrix<T> {
        let n = self.size - 1;
        ComplexMatrix::from_fn(n, n, |r, c| cr(self.get(r + 1, c + 1)))
    }

    /// Largest singular value of the coherence block.
    pub fn block_norm(&self) -> T {
        singular_values(&self.coherence_block()).first().copied().unwrap_or_else(T::zero)
    }

    /// ‖OᵀO − I‖_max of the coherence block.
    pub fn orthogonality_defect(&self) -> T {
        let o = self.coherence_block();
        (&o.transpose() * &o).max_abs_diff(&ComplexMatrix::identity(o.rows()))
    }
}

/// D̄ with `encode(ε(ρ)) = D̄ · encode(ρ)`, built column by column by pushing
/// each product basis element through the channel and re-encoding.
pub fn coherence_superoperator<T: Scalar>(ch: &LocalKrausChannel<T>) -> CoherenceSuperoperator<T> {
    let dims = ch.dims().clone();
    let size = dims.coherence_len();
    let local: Vec<_> = dims.as_slice().iter().map(|&d| sparse_basis::<T>(d)).collect();
    let mut data = vec![T::zero(); size * size];
    let ds = dims.as_slice();
    let d = dims.total();
    crate::coherence::for_each_multi_index(&dims, |col, multi| {
        let mut basis = ComplexMatrix::<T>::zeros(d, d);
        // dense product basis element Ω_{i_1} ⊗ … ⊗ Ω_{i_n}
        let factors: Vec<ComplexMatrix<T>> = multi
            .iter()
            .zip(&local)
            .zip(ds)
            .map(|((&i, l), &n)| {
                let mut m = ComplexMatrix::zeros(n, n);
                for &(r, s, v) in &l[i] {
                    m[(r, s)] = v;
                }
                m
            })
            .collect();
        basis += &kron_all(&factors);
        let image = ch.apply_matrix(&basis);
        let (coeffs, _) = encode_complex(&image, &dims);
        for (row, v) in coeffs.into_iter().enumerate() {
            data[row * size + col] = v;
        }
    });
    CoherenceSuperoperator { dims, size, data }
}

/// Coherence map of a local unitary.
pub fn unitary_superoperator<T: Scalar>(u: &LocalUnitary<T>) -> CoherenceSuperoperator<T> {
    coherence_superoperator(&u.as_channel())
}

pub fn random_local_unitary<T: Scalar>(dims: &Dims, seed: u64) -> LocalUnitary<T> {
    random_local_unitary_with(dims, &mut seeded_rng(seed))
}

pub fn random_local_unitary_with<T: Scalar, R: Rng + ?Sized>(dims: &Dims, rng: &mut R) -> LocalUnitary<T> {
    let factors = dims.as_slice().iter().map(|&d| random_unitary::<T, R>(rng, d)).collect();
    LocalUnitary { dims: dims.clone(), factors }
}

/// `{√λ · V P_i V†} ∪ {√(1−λ) · I}` with `P_i` the computational-basis
/// projectors. Every operator is Hermitian, so the channel is a POVM.
pub fn projective_mixture<T: Scalar>(v: &ComplexMatrix<T>, lambda: T) -> Result<LocalKrausChannel<T>> {
    if !(lambda >= T::zero() && lambda <= T::one()) {
        return Err(Error::Parameter(format!("mixing weight {lambda} outside [0, 1]")));
    }
    let n = v.rows();
    let mut ops = Vec::with_capacity(n + 1);
    let s = lambda.sqrt();
    for i in 0..n {
        let col: Vec<_> = (0..n).map(|r| v[(r, i)]).collect();
        ops.push(ComplexMatrix::outer(&col).scale(s));
    }
    let rest = (T::one() - lambda).sqrt();
    if rest > T::zero() {
        ops.push(ComplexMatrix::identity(n).scale(rest));
    }
    LocalKrausChannel::single(ops)
}

pub fn random_povm<T: Scalar>(dim: usize, seed: u64) -> Result<LocalKrausChannel<T>> {
    random_povm_with(dim, &mut seeded_rng(seed))
}

pub fn random_povm_with<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<LocalKrausChannel<T>> {
    if dim < 2 {
        return Err(Error::InvalidDims(vec![dim]));
    }
    let v = random_unitary::<T, R>(rng, dim);
    let lambda = T::of(rng.random::<f64>());
    projective_mixture(&v, lambda)
}

/// Independent random POVM on every subsystem.
pub fn random_local_povm_with<T: Scalar, R: Rng + ?Sized>(dims: &Dims, rng: &mut R) -> LocalKrausChannel<T> {
    let parts: Vec<_> =
        dims.as_slice().iter().map(|&d| random_povm_with::<T, R>(d, rng).expect("dimension >= 2")).collect();
    LocalKrausChannel::product(&parts).expect("product of complete channels is complete")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, C};
    use num_traits::Zero;

    type M = ComplexMatrix<f64>;

    fn dims(v: &[usize]) -> Dims {
        Dims::new(v.to_vec()).unwrap()
    }

    fn sx() -> M {
        M::new(2, 2, vec![C::zero(), cr(1.0), cr(1.0), C::zero()]).unwrap()
    }

    fn proj(i: usize, n: usize) -> M {
        let mut m = M::zeros(n, n);
        m[(i, i)] = cr(1.0);
        m
    }

    #[test]
    fn x_on_first_qubit() {
        let d = dims(&[2, 2]);
        let rho = DensityMatrix::assume_valid(proj(0, 4), d.clone());
        let u = LocalUnitary::new(d, vec![sx(), M::identity(2)]).unwrap();
        let out = apply_local_unitary(&rho, &u).unwrap();
        assert!(out.matrix().max_abs_diff(&proj(2, 4)) < 1e-15);
    }

    #[test]
    fn hadamard_fixes_mixed() {
        let d = dims(&[2, 2]);
        let h = 0.5f64.sqrt();
        let had = M::new(2, 2, vec![cr(h), cr(h), cr(h), cr(-h)]).unwrap();
        let rho = DensityMatrix::assume_valid(M::identity(4).scale(0.25), d.clone());
        let u = LocalUnitary::new(d, vec![had.clone(), had]).unwrap();
        assert!(apply_local_unitary(&rho, &u).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn unitary_errors() {
        let d = dims(&[2, 2]);
        assert!(matches!(
            LocalUnitary::new(d.clone(), vec![sx().scale(2.0), M::identity(2)]),
            Err(Error::NotUnitary { subsystem: 0, .. })
        ));
        assert!(LocalUnitary::new(d.clone(), vec![sx()]).is_err());
        assert!(LocalUnitary::new(d, vec![sx(), M::identity(3)]).is_err());
        let u = LocalUnitary::new(dims(&[2]), vec![sx()]).unwrap();
        let rho = DensityMatrix::assume_valid(M::identity(4).scale(0.25), dims(&[2, 2]));
        assert!(apply_local_unitary(&rho, &u).is_err());
    }

    #[test]
    fn z_measurement_dephases_bell() {
        let d = dims(&[2, 2]);
        let h = 0.5f64.sqrt();
        let bell = DensityMatrix::from_pure(&[cr(h), C::zero(), C::zero(), cr(h)], d.clone()).unwrap();
        let ch = LocalKrausChannel::new(d, vec![vec![proj(0, 2), proj(1, 2)], vec![M::identity(2)]]).unwrap();
        assert!(ch.is_povm());
        let out = apply_local_kraus(&bell, &ch).unwrap();
        assert!(out.matrix().max_abs_diff(&M::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5])) < 1e-15);
        let id = LocalKrausChannel::identity(bell.dims());
        assert!(apply_local_kraus(&bell, &id).unwrap().matrix().max_abs_diff(bell.matrix()) < 1e-15);
    }

    #[test]
    fn incomplete_channel_rejected() {
        let e = LocalKrausChannel::<f64>::single(vec![proj(0, 2)]).unwrap_err();
        assert!(matches!(e, Error::Incomplete { subsystem: 0, .. }));
        assert!(LocalKrausChannel::<f64>::new(dims(&[2]), vec![vec![]]).is_err());
    }

    #[test]
    fn povm_diagnoses() {
        let d = validate_povm(&[vec![proj(0, 2), proj(1, 2)]]);
        assert!(d.complete && d.povm);
        let d = validate_povm(&[vec![M::identity(2)]]);
        assert!(d.complete && d.povm);
        let gamma: f64 = 0.3;
        let k0 = M::from_real_diagonal(&[1.0, (1.0 - gamma).sqrt()]);
        let mut k1 = M::zeros(2, 2);
        k1[(0, 1)] = cr(gamma.sqrt());
        let d = validate_povm(&[vec![k0, k1]]);
        assert!(d.complete);
        assert!(!d.povm);
        assert!(d.normality_defects[0][1] > 0.1);
        let d = validate_povm(&[vec![proj(0, 2)]]);
        assert!(!d.complete && !d.povm);
        let d = validate_povm::<f64>(&[]);
        assert!(!d.complete);
    }

    #[test]
    fn z_measurement_superoperator() {
        let ch = LocalKrausChannel::single(vec![proj(0, 2), proj(1, 2)]).unwrap();
        let sup = coherence_superoperator(&ch);
        let want = [1.0, 0.0, 0.0, 1.0];
        for (r, &diag) in want.iter().enumerate() {
            for col in 0..4 {
                let w = if r == col { diag } else { 0.0 };
                assert!((sup.get(r, col) - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn z_rotation_superoperator() {
        let theta: f64 = 0.7;
        let u = M::new(
            2,
            2,
            vec![
                c((theta / 2.0).cos(), -(theta / 2.0).sin()),
                C::zero(),
                C::zero(),
                c((theta / 2.0).cos(), (theta / 2.0).sin()),
            ],
        )
        .unwrap();
        let sup = unitary_superoperator(&LocalUnitary::new(dims(&[2]), vec![u]).unwrap());
        assert!(sup.block_defect() < 1e-15);
        // (x, y) block is a planar rotation by θ, z untouched
        let (cs, sn) = (theta.cos(), theta.sin());
        assert!((sup.get(1, 1) - cs).abs() < 1e-14 && (sup.get(2, 2) - cs).abs() < 1e-14);
        assert!((sup.get(2, 1) - sn).abs() < 1e-14 && (sup.get(1, 2) + sn).abs() < 1e-14);
        assert!((sup.get(3, 3) - 1.0).abs() < 1e-14);
        assert!(sup.orthogonality_defect() < 1e-14);
    }

    #[test]
    fn non_povm_superoperator_is_affine() {
        let mut l = M::zeros(2, 2);
        l[(0, 1)] = cr(1.0);
        let ch = LocalKrausChannel::single(vec![l, proj(0, 2)]).unwrap();
        assert!(!ch.is_povm());
        let sup = coherence_superoperator(&ch);
        assert!((sup.get(0, 0) - 1.0).abs() < 1e-15);
        // g ≠ 0: the maximally mixed state is pushed to |0⟩⟨0|
        assert!(sup.block_defect() > 0.5);
        assert!((sup.get(3, 0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projective_mixture_edges() {
        let id = projective_mixture(&M::identity(2), 0.0).unwrap();
        let rho = DensityMatrix::assume_valid(M::from_fn(2, 2, |_, _| cr(0.5)), dims(&[2]));
        assert!(apply_local_kraus(&rho, &id).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let zm = projective_mixture(&M::identity(2), 1.0).unwrap();
        assert_eq!(zm.kraus()[0].len(), 2);
        let out = apply_local_kraus(&rho, &zm).unwrap();
        assert!(out.matrix().max_abs_diff(&M::identity(2).scale(0.5)) < 1e-15);
        assert!(projective_mixture(&M::identity(2), 1.5).is_err());
    }

    #[test]
    fn random_povms_are_povms() {
        for seed in 0..100 {
            for n in [2, 3] {
                let ch = random_povm::<f64>(n, seed).unwrap();
                assert!(ch.is_povm(), "seed {seed} N={n}");
            }
        }
        assert!(random_povm::<f64>(1, 0).is_err());
    }

    #[test]
    fn random_unitary_deterministic() {
        let d = dims(&[2, 3]);
        let a = random_local_unitary::<f64>(&d, 8);
        assert_eq!(a, random_local_unitary::<f64>(&d, 8));
        assert!(a.factors().iter().all(|u| u.unitarity_defect() < 1e-10));
    }
}
