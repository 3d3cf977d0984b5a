//! Exact arithmetic over the rationals: univariate polynomials, residue
//! rings `Q[y]/(P)`, truncated power series over those rings and dense
//! rational matrices.

mod matrix;
mod quotient;
mod series;
mod unipoly;

pub use matrix::{left_kernel_basis, reduced_row_echelon, solve_affine_system, RatMatrix, Rref};
pub use quotient::{QuotElem, QuotRing};
pub use series::TruncSeries;
pub use unipoly::{power_sums, UniPoly};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// Arbitrary precision rational number, always kept in lowest terms.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("series has a zero constant term")]
    ZeroConstantTerm,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("element is not invertible modulo {0}")]
    NotInvertible(String),
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("linear system has {free} free unknowns")]
    Underdetermined { free: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Bit-length of numerator plus denominator; used as a cost measure for pivoting.
pub(crate) fn rat_size(r: &Rat) -> u64 {
    r.numer().bits() + r.denom().bits()
}
