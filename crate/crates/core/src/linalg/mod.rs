//! Dense complex linear algebra for small density matrices.

mod eigen;
mod matrix;
mod state;
mod subsystems;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, EigenDecomposition};
pub use matrix::{inner, kron_vec, vec_norm, ComplexMatrix, C64};
pub use state::{purity, DensityMatrix, PureState};
pub use subsystems::{embed, partial_trace, partial_transpose, tensor, tensor_all};
