use serde::{Deserialize, Serialize};

use super::eigen::hermitian_eigenvalues;
use super::matrix::{inner, kron_vec, vec_norm, ComplexMatrix, C64};
use super::subsystems;
use crate::error::{Error, Result};
use crate::tol;

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > tol::STRUCTURAL {
            return Err(Error::NotNormalized(format!("norm {norm}")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized(format!("cannot normalize vector of norm {norm}")));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    /// Complex conjugate in the computational basis.
    pub fn conj(&self) -> PureState {
        PureState {
            amplitudes: self.amplitudes.iter().map(|a| a.conj()).collect(),
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on a labeled tensor
/// factorization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityWire", into = "DensityWire")]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

/// The matrix JSON object with an added `"dims"` array.
#[derive(Serialize, Deserialize)]
struct DensityWire {
    dims: Vec<usize>,
    #[serde(flatten)]
    matrix: ComplexMatrix,
}

impl TryFrom<DensityWire> for DensityMatrix {
    type Error = Error;

    fn try_from(w: DensityWire) -> Result<Self> {
        DensityMatrix::new(w.dims, w.matrix)
    }
}

impl From<DensityMatrix> for DensityWire {
    fn from(d: DensityMatrix) -> Self {
        DensityWire {
            dims: d.dims,
            matrix: d.matrix,
        }
    }
}

fn check_dims(dims: &[usize], m: &ComplexMatrix) -> Result<()> {
    let n: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix does not match dims {dims:?}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        check_dims(&dims, &matrix)?;
        let herm = matrix.hermiticity_deviation();
        if herm > tol::STRUCTURAL {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol::STRUCTURAL || tr.im.abs() > tol::STRUCTURAL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = hermitian_eigenvalues(&matrix)?[0];
        if min < -tol::PSD {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { dims, matrix })
    }

    /// For results of operations that preserve validity (partial traces,
    /// measurements, convex combinations); only the shape is checked.
    pub(crate) fn from_trusted(dims: Vec<usize>, matrix: ComplexMatrix) -> Self {
        debug_assert!(check_dims(&dims, &matrix).is_ok());
        Self { dims, matrix }
    }

    pub fn from_pure(state: &PureState) -> Self {
        Self {
            dims: vec![state.dim()],
            matrix: state.projector(),
        }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Self {
            dims,
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Same matrix, different factorization (total dimension must agree).
    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, &self.matrix)?;
        Ok(Self { dims, ..self })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            matrix: subsystems::tensor(&self.matrix, &other.matrix),
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let matrix = subsystems::partial_trace(&self.matrix, &self.dims, keep)?;
        let dims = (0..self.dims.len())
            .filter(|i| keep.contains(i))
            .map(|i| self.dims[i])
            .collect();
        Ok(Self { dims, matrix })
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// Tr(ρ²), computed as the squared Frobenius norm of a Hermitian matrix.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix.data().iter().map(|z| z.norm_sqr()).sum()
}
