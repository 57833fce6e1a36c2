//! Resonances of geometrically finite `(q+1)`-regular graphs of groups.
//!
//! A geometrically finite graph is stored as a finite *core* (a graph whose
//! vertices and edges carry positive rational stabilizer sizes) together with
//! per-vertex attachment weights for standard cusps and funnels. Everything
//! spectral is read off from that data:
//!
//! * [`graph`] — the data model, regularity validation and the weighted
//!   adjacency operator.
//! * [`algebra`] — exact arithmetic in `Q[sqrt q]`, Laurent and ordinary
//!   polynomials, determinants and root extraction.
//! * [`kernels`] — closed-form resolvent kernels on the regular tree and the
//!   idealized parabolic cylinder.
//! * [`engine`] — the resonance matrix `H(mu)`, resonances, resonant states,
//!   outgoing extensions and the continued resolvent.
//! * [`zeta`] — point counting over finite fields and Hasse–Weil numerators.
//! * [`random`] — seeded random regular graphs and cusp/funnel surgery.
//! * [`fixtures`] — the standard worked examples.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod engine;
pub mod fixtures;
pub mod graph;
pub mod kernels;
pub mod random;
pub mod zeta;

pub use num_complex::Complex64;
pub use num_rational::BigRational as Rational;

pub use graph::{GeomFiniteGraph, StabilizerGraph};
