//! Dense real linear algebra used by every other module.
//!
//! Nothing here computes eigenvalues of general matrices; spectra are
//! obtained elsewhere through cone fixed points, and the independent
//! referee lives in [`crate::oracle`].

mod charpoly;
mod decomp;
mod matrix;
mod subspace;
mod symmetric;
pub mod vector;

pub use charpoly::{char_poly, CHAR_POLY_MAX_DIM};
pub use decomp::{
    cholesky, cholesky_with_tol, default_cholesky_tol, default_singular_tol, inverse,
    kernel_basis, min_singular_pair, min_singular_value, psd_within, solve_linear,
    solve_linear_with_tol, Lu,
};
pub(crate) use decomp::span_and_complement;
pub use matrix::Matrix;
pub use subspace::Subspace;
pub use symmetric::{asymmetry, svec_len, svec_trace, SymmetricMatrix};
