//! Phase-space observables: polynomials in `z, z*`, their calculus, and the
//! Poisson bracket.

mod polynomial;
mod spin;
mod text;

pub use polynomial::{Monomial, PhasePoint, Polynomial, Var};
pub use spin::{schwinger_bilinears, spin_vector, Axis, SpinPolynomial};
