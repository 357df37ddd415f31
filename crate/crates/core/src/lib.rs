//! Finite sections of infinite matrices whose entries are operators on `H = C^d`.
//!
//! The crate works with the leading `N x N` block truncation `A^(N)` of a matrix
//! `A = (T_kj)` with `T_kj` in `B(C^d)`. Identities that hold exactly for every
//! truncation (Schur products, modulation by unitary diagonals, rank-one norms)
//! are computed exactly; statements about the infinite matrix become
//! convergence statements in `N`.
//!
//! Module map:
//!
//! * [`hilbert`]: operator blocks, block vectors, dense complex matrices and the
//!   singular value decomposition every norm rests on.
//! * [`matrices`]: structured block matrices (dense, Toeplitz, banded) and the
//!   Schur algebra on them.
//! * [`kernels`]: scalar symbols, summability kernels, masks and smoothing.
//! * [`norms`]: operator, Wiener, symbol and multiplier norms.
//! * [`analysis`]: modulation `f_A(t)`, convergence profiles, Toeplitz symbols,
//!   the pairing operator `Phi_A` and the analytic extension `F_A(z)`.
//!
//! Indexing is 0-based throughout the API: `entry(k, j)` with `0 <= k, j < N`
//! corresponds to `T_{k+1, j+1}` in 1-based notation. Diagonal offsets
//! `l = j - k` are the same in both conventions.

pub mod analysis;
pub mod error;
pub mod hilbert;
pub mod kernels;
pub mod matrices;
pub mod norms;
pub mod quadrature;
pub mod random;

pub use error::{Error, Result};
pub use hilbert::{BlockVector, CMatrix, OperatorBlock, C64};
pub use matrices::{BlockMatrix, Structure};

/// Twelve significant digits in scientific notation; the one float format
/// used by every table.
pub fn format_sig(x: f64) -> String {
    format!("{x:.11e}")
}
