//! Linear algebra over `K` with valuation-aware pivoting, bounded complexes,
//! towers of complexes, homotopy limits and stabilised Betti tables.

mod betti;
mod complex;
mod matrix;
pub mod lattice;

pub use betti::{BettiCell, BettiReport, Certificate, StableValue};
pub use complex::{cohomology_tower, holim, holim_bookkeeping, lim_lim1, FiniteComplex, LimReport, ProComplex};
pub use matrix::{rank, rank_kernel_image, solve, HomalgError, Matrix, RankReport};
