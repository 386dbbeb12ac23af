//! Persistent relative homology barcodes with relative cycle representatives.
//!
//! Given a cell complex `X` with two nested filtrations `G_t ⊆ F_t`, the
//! [`prh`] pipeline computes the barcode of `t ↦ H_*(F_t, G_t)` from two
//! U-match factorizations. For lag filtrations (`G_t = F_{t-l}`) the
//! [`lagfast`] pipeline needs only one. Everything is exact over GF(p), and
//! the dense [`oracle`] recomputes the same invariants from first principles
//! for cross-checking.

pub mod complex;
pub mod field;
pub mod format;
pub mod lagfast;
pub mod oracle;
pub mod prh;
pub mod random;
pub mod sparse;
pub mod svg;
pub mod umatch;

pub use complex::{apply_lag, boundary_matrix, build_rips, validate_pair, Cell, Chain, FilteredPair, Filtration};
pub use field::{FieldError, FieldScalar, PrimeField};
pub use lagfast::{compute_prh_lag, lag_decompose, LagFactors};
pub use prh::{betti_curve, compute_prh, Bar, Barcode, Pipeline, PrhError};
pub use sparse::{MatrixError, Permutation, SparseMatrix};
pub use umatch::{umatch_decompose, UmatchFactors};
