//! Dense complex linear algebra for few-qubit systems.

mod channel;
mod density;
mod eigen;
mod haar;
mod matrix;

pub use channel::{apply_channel, KrausChannel};
pub(crate) use density::{conjugate_local, normalize_party_set};
pub use density::{partial_trace, DensityMatrix, DensityMatrixFile};
pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen};
pub(crate) use haar::gaussian_matrix;
pub use haar::haar_random_unitary;
pub use matrix::{pauli, tensor_all, tensor_product, ComplexMatrix};
