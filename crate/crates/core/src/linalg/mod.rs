//! Dense and sparse kernels: storage, factorizations, orthogonalization,
//! eigensolvers and singular values.

pub mod dense;
pub mod eig;
pub mod io;
pub mod lu;
pub mod operator;
pub mod ortho;
pub mod sparse;
pub mod svd;

pub use dense::{axpy, dot, norm2, DenseMatrix};
pub use eig::{general_eig_real, sym_eig, sym_eigvals, RealSpectrum, SymEigDecomposition};
pub use io::{
    parse_dense_csv, parse_matrix_market, read_dense_csv, read_matrix_market, write_dense_csv, write_dense_csv_string,
    write_matrix_market, write_matrix_market_string,
};
pub use lu::{ilu0_factor, ilu0_solve, lu_factor, lu_solve, BandLu, Ilu0Factors, LuFactors};
pub use operator::{Identity, LinearOperator};
pub use ortho::{complete_basis, orthonormalize, Orthonormalized};
pub use sparse::SparseMatrix;
pub use svd::{operator_norm, singular_values, spectral_norm};
