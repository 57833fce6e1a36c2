//! Exact algebra: the scalar ring `Q[sqrt q]`, Laurent polynomials in `mu`,
//! rational polynomials in `lambda = sqrt(q) mu`, determinants and roots.

mod det;
mod laurent;
mod modp;
mod poly;
mod roots;
mod scalar;

pub use det::{laurent_det, laurent_det_bareiss, laurent_det_cofactor, poly_det, poly_det_bareiss, to_lambda};
pub use modp::is_prime_u64;
pub use laurent::LaurentPoly;
pub use poly::{divides, LambdaPoly, Poly};
pub(crate) use poly::write_poly;
pub use roots::{poly_roots, Root, DEFAULT_ROOT_TOL};
pub(crate) use roots::conjugate_symmetrize;
pub use scalar::{isqrt, rat, SqrtQScalar};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare { row: usize, len: usize, expected: usize },
    #[error("polynomial has residual sqrt(q)-irrational part at mu^{exponent}")]
    IrrationalResidue { exponent: i64 },
    #[error("cannot normalise the zero polynomial")]
    ZeroPolynomial,
    #[error("root finding needs degree >= 1")]
    ConstantPolynomial,
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("scalars from different rings: q = {0} and q = {1}")]
    RingMismatch(u64, u64),
}
