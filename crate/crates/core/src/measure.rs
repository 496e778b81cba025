//! The quadratic quasi entanglement measure
//! `E_q(ρ) = max{f(ρ), 0}`, `f(ρ) = tr ρF(ρ) + tr ρF̄(ρ) − 2ⁿ/∏N_k`,
//! evaluated through several independent routes.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coherence::{encode, residue_tol, ExpandedCoherenceVector};
use crate::error::{Error, Result};
use crate::flip::{flip, s_bar_diagonal, s_diagonal, unflip, universal_inverter};
use crate::scalar::{c, from_usize, Scalar, C};
use crate::state::{DensityMatrix, Dims};

/// Which computation route produced a [`MeasureReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    /// Flip/unflip superoperators applied to the density matrix.
    Density,
    /// Diagonal weighted sum over the expanded coherence vector.
    Coherence,
    /// All-qubit shortcut: `tr ρσ_y^{⊗n}ρ*σ_y^{⊗n} − (1 − tr ρ²)`.
    QubitFast,
    /// Bipartite shortcut through the mixedness of ρ and its marginals.
    BipartiteMixedness,
}

impl Picture {
    pub const ALL: [Picture; 4] =
        [Picture::Density, Picture::Coherence, Picture::QubitFast, Picture::BipartiteMixedness];

    pub fn name(self) -> &'static str {
        match self {
            Picture::Density => "density",
            Picture::Coherence => "coherence",
            Picture::QubitFast => "qubit-fast",
            Picture::BipartiteMixedness => "bipartite-mixedness",
        }
    }

    pub fn applies_to(self, dims: &Dims) -> bool {
        match self {
            Picture::Density | Picture::Coherence => true,
            Picture::QubitFast => dims.all_qubits(),
            Picture::BipartiteMixedness => dims.len() == 2,
        }
    }
}

impl fmt::Display for Picture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Picture {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "density" => Ok(Picture::Density),
            "coherence" => Ok(Picture::Coherence),
            "qubit-fast" => Ok(Picture::QubitFast),
            "bipartite-mixedness" => Ok(Picture::BipartiteMixedness),
            other => Err(Error::Parameter(format!("unknown picture '{other}'"))),
        }
    }
}

/// All scalars behind one evaluation of the measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport<T> {
    /// tr ρF(ρ)
    pub gross: T,
    /// tr ρF̄(ρ)
    pub unflip_term: T,
    /// 2ⁿ/∏N_k
    pub offset: T,
    pub f: T,
    /// max{f, 0}
    pub eq: T,
    pub purity: T,
    /// 1 − tr ρ²
    pub mixedness: T,
    pub picture: Picture,
}

impl<T: Scalar> MeasureReport<T> {
    fn assemble(gross: T, unflip_term: T, offset: T, purity: T, picture: Picture) -> Self {
        let f = gross + unflip_term - offset;
        Self { gross, unflip_term, offset, f, eq: f.max(T::zero()), purity, mixedness: T::one() - purity, picture }
    }

    pub fn to_f64(&self) -> MeasureReport<f64> {
        MeasureReport {
            gross: self.gross.as_f64(),
            unflip_term: self.unflip_term.as_f64(),
            offset: self.offset.as_f64(),
            f: self.f.as_f64(),
            eq: self.eq.as_f64(),
            purity: self.purity.as_f64(),
            mixedness: self.mixedness.as_f64(),
            picture: self.picture,
        }
    }
}

/// 2ⁿ/∏N_k.
pub fn offset<T: Scalar>(dims: &Dims) -> T {
    T::of(2.0).powi(dims.len() as i32) / from_usize::<T>(dims.total())
}

fn real_trace<T: Scalar>(z: C<T>) -> Result<T> {
    if z.im.abs() > residue_tol::<T>() {
        return Err(Error::ImaginaryResidue { residue: z.im.abs().as_f64() });
    }
    Ok(z.re)
}

/// Gross entanglement tr ρF(ρ), the flip-only part of f.
pub fn gross_entanglement<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    real_trace(rho.matrix().trace_of_product(&flip(rho)))
}

/// f computed entirely with density-picture superoperators.
pub fn f_density<T: Scalar>(rho: &DensityMatrix<T>) -> Result<MeasureReport<T>> {
    let gross = gross_entanglement(rho)?;
    let unflip_term = real_trace(rho.matrix().trace_of_product(&unflip(rho)))?;
    Ok(MeasureReport::assemble(gross, unflip_term, offset(rho.dims()), rho.purity(), Picture::Density))
}

/// f as the diagonal quadratic form `m̄ᵀ(S + S̄)m̄ − 2ⁿ/∏N_k`.
pub fn f_coherence<T: Scalar>(v: &ExpandedCoherenceVector<T>) -> MeasureReport<T> {
    let s = s_diagonal::<T>(v.dims());
    let s_bar = s_bar_diagonal::<T>(v.dims());
    f_coherence_with(v, &s, &s_bar)
}

/// Same as [`f_coherence`] with caller-supplied S and S̄ diagonals.
pub fn f_coherence_with<T: Scalar>(v: &ExpandedCoherenceVector<T>, s: &[T], s_bar: &[T]) -> MeasureReport<T> {
    assert_eq!(s.len(), v.len());
    assert_eq!(s_bar.len(), v.len());
    let (mut gross, mut unflip_term, mut purity) = (T::zero(), T::zero(), T::zero());
    for ((&m, &ws), &wb) in v.as_slice().iter().zip(s).zip(s_bar) {
        let sq = m * m;
        gross += ws * sq;
        unflip_term += wb * sq;
        purity += sq;
    }
    MeasureReport::assemble(gross, unflip_term, offset(v.dims()), purity, Picture::Coherence)
}

/// n-qubit shortcut; fails unless every subsystem is a qubit.
pub fn f_qubits_fast<T: Scalar>(rho: &DensityMatrix<T>) -> Result<MeasureReport<T>> {
    let dims = rho.dims();
    if !dims.all_qubits() {
        return Err(Error::NotAllQubits(dims.as_slice().to_vec()));
    }
    let n = dims.len();
    let d = dims.total();
    let mask = d - 1;
    // σ_y^{⊗n} has a single entry per row a, at column a ^ mask, equal to
    // ∏_k (−i if bit_k(a) = 0 else i).
    let y: Vec<C<T>> = (0..d)
        .map(|a| {
            let ones = a.count_ones() as usize;
            let zeros = n - ones;
            let mut v = c(T::one(), T::zero());
            for _ in 0..zeros {
                v *= c(T::zero(), -T::one());
            }
            for _ in 0..ones {
                v *= c(T::zero(), T::one());
            }
            v
        })
        .collect();
    let m = rho.matrix();
    let mut acc = C::<T>::zero();
    for a in 0..d {
        for b in 0..d {
            // (Y ρ* Y)_{ba} = y_b · conj(ρ_{b̄ ā}) · y_{ā}
            let inner = y[b] * m[(b ^ mask, a ^ mask)].conj() * y[a ^ mask];
            acc += m[(a, b)] * inner;
        }
    }
    let gross = real_trace(acc)?;
    let purity = rho.purity();
    Ok(MeasureReport::assemble(gross, purity, T::one(), purity, Picture::QubitFast))
}

/// Bipartite shortcut:
/// `f = 2(N₁M(ρ₁) + N₂M(ρ₂) − N₁N₂M(ρ)) / ((N₁−1)(N₂−1)N₁N₂)`, `M(μ) = 1 − tr μ²`.
/// The gross term is taken from the closed-form bipartite flip.
pub fn f_bipartite_mixedness<T: Scalar>(rho: &DensityMatrix<T>) -> Result<MeasureReport<T>> {
    let ds = rho.dims().as_slice();
    if ds.len() != 2 {
        return Err(Error::NotBipartite(ds.len()));
    }
    let (n1, n2) = (from_usize::<T>(ds[0]), from_usize::<T>(ds[1]));
    let mixedness = |mu: &DensityMatrix<T>| T::one() - mu.purity();
    let m1 = mixedness(&rho.partial_trace(&[0])?);
    let m2 = mixedness(&rho.partial_trace(&[1])?);
    let m = mixedness(rho);
    let two = T::of(2.0);
    let f = two * (n1 * m1 + n2 * m2 - n1 * n2 * m) / ((n1 - T::one()) * (n2 - T::one()) * n1 * n2);
    let gross = real_trace(rho.matrix().trace_of_product(&universal_inverter(rho)?))?;
    let off = offset::<T>(rho.dims());
    let unflip_term = f + off - gross;
    let mut report = MeasureReport::assemble(gross, unflip_term, off, T::one() - m, Picture::BipartiteMixedness);
    report.f = f;
    report.eq = f.max(T::zero());
    Ok(report)
}

/// Evaluates `E_q` with the requested picture, or the coherence picture by default.
pub fn eq_measure<T: Scalar>(rho: &DensityMatrix<T>, picture: Option<Picture>) -> Result<MeasureReport<T>> {
    let picture = picture.unwrap_or(Picture::Coherence);
    if !picture.applies_to(rho.dims()) {
        let reason = match picture {
            Picture::QubitFast => format!("dims {} are not all qubits", rho.dims()),
            _ => format!("dims {} are not bipartite", rho.dims()),
        };
        return Err(Error::Picture { picture: picture.name(), reason });
    }
    match picture {
        Picture::Density => f_density(rho),
        Picture::Coherence => Ok(f_coherence(&encode(rho)?)),
        Picture::QubitFast => f_qubits_fast(rho),
        Picture::BipartiteMixedness => f_bipartite_mixedness(rho),
    }
}

/// |⟨ψ| σ_y⊗σ_y |ψ*⟩|² for a normalized two-qubit vector.
pub fn concurrence_sq_pure_two_qubit<T: Scalar>(psi: &[C<T>]) -> Result<T> {
    if psi.len() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: psi.len() });
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if (norm - T::one()).abs() > T::of(1e-9).max(T::epsilon() * T::of(1e3)) {
        return Err(Error::NotNormalized { norm: norm.as_f64() });
    }
    // σ_y⊗σ_y = antidiag(−1, 1, 1, −1)
    let sign = [-T::one(), T::one(), T::one(), -T::one()];
    let amp = (0..4).fold(C::<T>::zero(), |acc, a| acc + psi[a].conj() * psi[3 - a].conj() * sign[a]);
    Ok(amp.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;
    use crate::scalar::cr;

    type M = ComplexMatrix<f64>;

    fn dims(v: &[usize]) -> Dims {
        Dims::new(v.to_vec()).unwrap()
    }

    fn bell() -> DensityMatrix<f64> {
        let h = 0.5f64.sqrt();
        DensityMatrix::from_pure(&[cr(h), C::zero(), C::zero(), cr(h)], dims(&[2, 2])).unwrap()
    }

    #[test]
    fn bell_everywhere_one() {
        let rho = bell();
        assert!((gross_entanglement(&rho).unwrap() - 1.0).abs() < 1e-14);
        for p in Picture::ALL {
            let r = eq_measure(&rho, Some(p)).unwrap();
            assert!((r.f - 1.0).abs() < 1e-12, "{p}");
            assert_eq!(r.picture, p);
        }
    }

    #[test]
    fn report_identities() {
        let rho = DensityMatrix::assume_valid(M::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]), dims(&[2, 2]));
        for p in Picture::ALL {
            let r = eq_measure(&rho, Some(p)).unwrap();
            assert!((r.f - (r.gross + r.unflip_term - r.offset)).abs() < 1e-12);
            assert_eq!(r.eq, r.f.max(0.0));
            assert!((r.mixedness - (1.0 - r.purity)).abs() < 1e-15);
            assert!(r.f.abs() < 1e-12, "{p}: f = {}", r.f);
        }
    }

    #[test]
    fn picture_capability_errors() {
        let q = DensityMatrix::assume_valid(M::identity(6).scale(1.0 / 6.0), dims(&[2, 3]));
        assert!(matches!(eq_measure(&q, Some(Picture::QubitFast)), Err(Error::Picture { .. })));
        assert!(matches!(f_qubits_fast(&q), Err(Error::NotAllQubits(_))));
        let t = DensityMatrix::assume_valid(M::identity(8).scale(0.125), dims(&[2, 2, 2]));
        assert!(matches!(eq_measure(&t, Some(Picture::BipartiteMixedness)), Err(Error::Picture { .. })));
        assert!(matches!(f_bipartite_mixedness(&t), Err(Error::NotBipartite(3))));
    }

    #[test]
    fn picture_parsing() {
        for p in Picture::ALL {
            assert_eq!(p.name().parse::<Picture>().unwrap(), p);
        }
        assert_eq!("qubit_fast".parse::<Picture>().unwrap(), Picture::QubitFast);
        assert!("nope".parse::<Picture>().is_err());
        assert_eq!(serde_json::to_string(&Picture::BipartiteMixedness).unwrap(), "\"bipartite_mixedness\"");
    }

    #[test]
    fn concurrence_examples() {
        let h = 0.5f64.sqrt();
        let bell = [cr(h), C::zero(), C::zero(), cr(h)];
        assert!((concurrence_sq_pure_two_qubit(&bell).unwrap() - 1.0).abs() < 1e-15);
        let zz = [cr(1.0f64), C::zero(), C::zero(), C::zero()];
        assert!(concurrence_sq_pure_two_qubit(&zz).unwrap().abs() < 1e-15);
        for theta in [0.1f64, 0.4, 0.7, 1.3] {
            let psi = [cr(theta.cos()), C::zero(), C::zero(), cr(theta.sin())];
            let want = (2.0 * theta).sin().powi(2);
            assert!((concurrence_sq_pure_two_qubit(&psi).unwrap() - want).abs() < 1e-14);
        }
        assert!(concurrence_sq_pure_two_qubit(&[cr(1.0), cr(1.0), C::zero(), C::zero()]).is_err());
        assert!(concurrence_sq_pure_two_qubit(&[cr(1.0)]).is_err());
    }

    #[test]
    fn qutrit_maximally_entangled() {
        let a = 1.0 / 3f64.sqrt();
        let mut psi = vec![C::zero(); 9];
        psi[0] = cr(a);
        psi[4] = cr(a);
        psi[8] = cr(a);
        let rho = DensityMatrix::from_pure(&psi, dims(&[3, 3])).unwrap();
        let r = f_bipartite_mixedness(&rho).unwrap();
        assert!((r.f - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn offset_values() {
        assert_eq!(offset::<f64>(&dims(&[2, 2])), 1.0);
        assert!((offset::<f64>(&dims(&[3, 3])) - 4.0 / 9.0).abs() < 1e-16);
    }
}
