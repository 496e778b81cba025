//! Quadratic quasi entanglement measure for multipartite states of arbitrary
//! local dimension.
//!
//! The measure is `E_q(ρ) = max{f(ρ), 0}` with
//! `f(ρ) = tr ρF(ρ) + tr ρF̄(ρ) − 2ⁿ/∏N_k`, where `F` and `F̄` are the flip and
//! unflip superoperators. It can be evaluated on density matrices directly or
//! as a diagonal quadratic form over the expanded coherence vector in the
//! generalized Gell-Mann basis.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the aliases
//! below fix it to `f64`, with `*32` variants for single precision.
//!
//! ```
//! use qem_core::{gallery, measure};
//!
//! let rho = gallery::ghz::<f64>(4).unwrap();
//! let report = measure::eq_measure(&rho, None).unwrap();
//! assert!((report.eq - 1.0).abs() < 1e-10);
//! ```

mod scalar;

pub mod basis;
pub mod channels;
pub mod coherence;
pub mod eigen;
pub mod error;
pub mod flip;
pub mod gallery;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod measure;
pub mod random;
pub mod state;

pub use basis::{basis_element, basis_list, BasisIndex, BasisKind};
pub use channels::{
    apply_local_kraus, apply_local_unitary, coherence_superoperator, validate_povm, CoherenceSuperoperator,
    LocalKrausChannel, LocalUnitary, PovmDiagnosis,
};
pub use coherence::{decode, encode, ExpandedCoherenceVector};
pub use error::{Error, Result};
pub use flip::{flip, unflip, universal_inverter, FlipGeneratorIndex, FlipKind};
pub use harness::{run_suite, werner_sweep, SuiteConfig, SuiteReport};
pub use matrix::ComplexMatrix;
pub use measure::{eq_measure, MeasureReport, Picture};
pub use scalar::{Scalar, C};
pub use state::{partial_trace, purity, validate_density, DensityMatrix, Dims, Tolerances};

pub type Complex64 = C<f64>;
pub type CMatrix = ComplexMatrix<f64>;
pub type Density = DensityMatrix<f64>;
pub type CoherenceVector = ExpandedCoherenceVector<f64>;
pub type Report = MeasureReport<f64>;
pub type Unitary = LocalUnitary<f64>;
pub type Channel = LocalKrausChannel<f64>;

pub type Complex32 = C<f32>;
pub type CMatrix32 = ComplexMatrix<f32>;
pub type Density32 = DensityMatrix<f32>;
pub type CoherenceVector32 = ExpandedCoherenceVector<f32>;
pub type Report32 = MeasureReport<f32>;
