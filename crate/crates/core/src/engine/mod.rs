//! The resonance matrix
//! `H(mu) = (A_L + B(mu)) / (2 sqrt q) - z(mu) I`,
//! `B_vv = c_v sqrt(q)/mu + f_v/(sqrt(q) mu)`, and everything computed from
//! it: the resonance polynomial, resonances with kernel data, resonant
//! states and their outgoing extensions, l^2 classification, and the
//! continued resolvent on core-supported data.
//!
//! Throughout, `lambda = sqrt(q) mu`. Multiplying `H` entrywise by `2 q mu`
//! gives a matrix with integer-polynomial entries in `lambda` whenever the
//! graph data are integral: `a_vw lambda` off the diagonal and
//! `a_vv lambda + q c_v + f_v - lambda^2 - q` on it.

mod matrix;
mod resolvent;
mod resonances;
mod states;

pub use matrix::{build_h, ResonanceMatrix};
pub use resolvent::{absorb_cusp, absorb_funnel, apply_resolvent, resolvent_residual};
pub use resonances::{
    check_bounds, find_resonances, resonance_polynomial, resonances_of, BoundsReport, Resonance,
};
pub use states::{
    classify_l2, extend_outgoing, kernel_basis, l2_kernel_dim, resonant_states, verify_eigen_equation,
    EndProfile, EndRatio, EndWitness, L2Classification, OutgoingExtension, ResonantState,
};

use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::graph::{EndKind, GraphError, VertexId, Violation};

/// Default tolerance for root clustering and numerical rank decisions.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("graph is not (q+1)-regular: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("mu = {mu} is not a resonance{}", nearest_note(.nearest))]
    NotAResonance { mu: Complex64, nearest: Option<Complex64> },
    #[error("H(mu) is numerically singular at mu = {mu}{}", nearest_note(.nearest))]
    Singular { mu: Complex64, nearest: Option<Complex64> },
    #[error("source has {got} entries but the core has {expected} vertices")]
    SourceLength { expected: usize, got: usize },
    #[error("vertex {vertex} has no {kind} attached")]
    NoEnd { vertex: VertexId, kind: EndKind },
    #[error("mu must be nonzero and finite")]
    BadMu,
}

fn join(v: &[Violation]) -> alloc::string::String {
    use core::fmt::Write;
    let mut s = alloc::string::String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push_str("; ");
        }
        let _ = write!(s, "{x}");
    }
    s
}

fn nearest_note(n: &Option<Complex64>) -> alloc::string::String {
    match n {
        Some(r) => alloc::format!(" (nearest resonance {} {:+}i)", r.re, r.im),
        None => alloc::string::String::new(),
    }
}

fn check_tol(tol: f64) -> Result<(), EngineError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(EngineError::BadTolerance(tol))
    }
}

fn check_mu(mu: Complex64) -> Result<(), EngineError> {
    if mu.norm() > 0.0 && mu.re.is_finite() && mu.im.is_finite() {
        Ok(())
    } else {
        Err(EngineError::BadMu)
    }
}
