//! JSON interchange formats for states, channels and separability certificates.
//!
//! Complex entries are `[re, im]` pairs and matrices are lists of rows.

use serde::{Deserialize, Serialize};

use crate::channels::{LocalKrausChannel, LocalUnitary};
use crate::error::{Error, Result};
use crate::gallery::SeparableEnsemble;
use crate::matrix::ComplexMatrix;
use crate::scalar::{c, Scalar, C};
use crate::state::{validate_density, DensityMatrix, Dims, Tolerances};

pub type Entry = [f64; 2];
pub type MatrixRows = Vec<Vec<Entry>>;

fn entry<T: Scalar>(z: C<T>) -> Entry {
    [z.re.as_f64(), z.im.as_f64()]
}

pub fn matrix_to_rows<T: Scalar>(m: &ComplexMatrix<T>) -> MatrixRows {
    (0..m.rows()).map(|r| m.row(r).iter().map(|&z| entry(z)).collect()).collect()
}

pub fn rows_to_matrix<T: Scalar>(rows: &MatrixRows) -> Result<ComplexMatrix<T>> {
    let converted: Vec<Vec<C<T>>> =
        rows.iter().map(|row| row.iter().map(|&[re, im]| c(T::of(re), T::of(im))).collect()).collect();
    ComplexMatrix::from_rows(&converted)
}

/// `{"dims": [...], "rows": [[[re, im], ...], ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub rows: MatrixRows,
}

impl StateFile {
    pub fn from_density<T: Scalar>(rho: &DensityMatrix<T>) -> Self {
        Self { dims: rho.dims().as_slice().to_vec(), rows: matrix_to_rows(rho.matrix()) }
    }

    /// Matrix and dims with shape checks only.
    pub fn to_matrix<T: Scalar>(&self) -> Result<(ComplexMatrix<T>, Dims)> {
        let dims = Dims::new(self.dims.clone())?;
        let m = rows_to_matrix::<T>(&self.rows)?;
        if !m.is_square() || m.rows() != dims.total() {
            return Err(Error::DimensionMismatch { expected: dims.total(), found: m.rows().max(m.cols()) });
        }
        Ok((m, dims))
    }

    pub fn to_density<T: Scalar>(&self, tol: &Tolerances<T>) -> Result<DensityMatrix<T>> {
        let (m, dims) = self.to_matrix()?;
        validate_density(m, dims, tol)
    }

    /// Skips Hermiticity, trace and positivity checks.
    pub fn to_density_unchecked<T: Scalar>(&self) -> Result<DensityMatrix<T>> {
        let (m, dims) = self.to_matrix()?;
        Ok(DensityMatrix::assume_valid(m, dims))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausFactor {
    pub kraus: Vec<MatrixRows>,
}

/// `{"dims": [...], "factors": [{"kraus": [matrix, ...]}, ...]}`, one factor
/// per subsystem. A unitary is a factor with a single Kraus operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub dims: Vec<usize>,
    pub factors: Vec<KrausFactor>,
}

impl ChannelFile {
    pub fn from_channel<T: Scalar>(ch: &LocalKrausChannel<T>) -> Self {
        Self {
            dims: ch.dims().as_slice().to_vec(),
            factors: ch
                .kraus()
                .iter()
                .map(|ops| KrausFactor { kraus: ops.iter().map(matrix_to_rows).collect() })
                .collect(),
        }
    }

    pub fn from_unitary<T: Scalar>(u: &LocalUnitary<T>) -> Self {
        Self::from_channel(&u.as_channel())
    }

    fn lists<T: Scalar>(&self) -> Result<(Dims, Vec<Vec<ComplexMatrix<T>>>)> {
        let dims = Dims::new(self.dims.clone())?;
        let lists = self
            .factors
            .iter()
            .map(|f| f.kraus.iter().map(rows_to_matrix::<T>).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok((dims, lists))
    }

    pub fn to_channel<T: Scalar>(&self) -> Result<LocalKrausChannel<T>> {
        let (dims, lists) = self.lists()?;
        LocalKrausChannel::new(dims, lists)
    }

    /// Fails unless every factor holds exactly one operator.
    pub fn to_unitary<T: Scalar>(&self) -> Result<LocalUnitary<T>> {
        let (dims, lists) = self.lists::<T>()?;
        let mut factors = Vec::with_capacity(lists.len());
        for (k, mut ops) in lists.into_iter().enumerate() {
            if ops.len() != 1 {
                return Err(Error::Parameter(format!("factor {k} has {} operators, a unitary needs 1", ops.len())));
            }
            factors.push(ops.remove(0));
        }
        LocalUnitary::new(dims, factors)
    }
}

/// Separability certificate: weights and per-term product factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub dims: Vec<usize>,
    pub weights: Vec<f64>,
    /// `factors[i][k]` is the state vector of subsystem k in term i.
    pub factors: Vec<Vec<Vec<Entry>>>,
}

impl CertificateFile {
    pub fn from_ensemble<T: Scalar>(e: &SeparableEnsemble<T>) -> Self {
        Self {
            dims: e.dims.as_slice().to_vec(),
            weights: e.weights.iter().map(|w| w.as_f64()).collect(),
            factors: e
                .factors
                .iter()
                .map(|term| term.iter().map(|v| v.iter().map(|&z| entry(z)).collect()).collect())
                .collect(),
        }
    }

    pub fn to_ensemble<T: Scalar>(&self) -> Result<SeparableEnsemble<T>> {
        Ok(SeparableEnsemble {
            dims: Dims::new(self.dims.clone())?,
            weights: self.weights.iter().map(|&w| T::of(w)).collect(),
            factors: self
                .factors
                .iter()
                .map(|term| term.iter().map(|v| v.iter().map(|&[re, im]| c(T::of(re), T::of(im))).collect()).collect())
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{ghz, random_separable};

    #[test]
    fn state_round_trip_is_exact() {
        let g = ghz::<f64>(2).unwrap();
        let json = serde_json::to_string(&StateFile::from_density(&g)).unwrap();
        let back: StateFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_density::<f64>(&Tolerances::default()).unwrap(), g);
    }

    #[test]
    fn state_shape_errors() {
        let f = StateFile { dims: vec![2], rows: vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0]]] };
        assert!(matches!(f.to_matrix::<f64>(), Err(Error::Shape { .. })));
        let f = StateFile { dims: vec![2, 2], rows: vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]] };
        assert!(matches!(f.to_matrix::<f64>(), Err(Error::DimensionMismatch { .. })));
        let f = StateFile { dims: vec![2], rows: vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]] };
        assert!(matches!(f.to_density::<f64>(&Tolerances::default()), Err(Error::TraceNotOne { .. })));
        assert!(f.to_density_unchecked::<f64>().is_ok());
        assert!(serde_json::from_str::<StateFile>(r#"{"dims":[2],"rows":[],"x":1}"#).is_err());
    }

    #[test]
    fn channel_round_trip() {
        let json =
            r#"{"dims":[2],"factors":[{"kraus":[[[[1,0],[0,0]],[[0,0],[0,0]]],[[[0,0],[0,0]],[[0,0],[1,0]]]]}]}"#;
        let f: ChannelFile = serde_json::from_str(json).unwrap();
        let ch = f.to_channel::<f64>().unwrap();
        assert!(ch.is_povm());
        assert_eq!(ChannelFile::from_channel(&ch), f);
        assert!(f.to_unitary::<f64>().is_err());
    }

    #[test]
    fn certificate_round_trip() {
        let d = Dims::new([2, 3]).unwrap();
        let (rho, ens) = random_separable::<f64>(&d, 3, 1).unwrap();
        let cert = CertificateFile::from_ensemble(&ens);
        let back = cert.to_ensemble::<f64>().unwrap();
        assert_eq!(back, ens);
        assert!(back.assemble().max_abs_diff(rho.matrix()) < 1e-12);
    }
}
