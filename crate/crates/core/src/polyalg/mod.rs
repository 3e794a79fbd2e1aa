//! Sparse polynomials, monomial orders, a Gröbner engine with cofactors and
//! finitely presented commutative algebras.

mod algebra;
mod groebner;
mod monomial;
mod parse;
mod poly;

pub use algebra::{AlgebraError, PresentedAlgebra};
pub use groebner::{groebner, groebner_in, ideal_power_generators, lift_in_ideal, multisets, Budget, GroebnerBasis, GroebnerError};
pub use monomial::{Monomial, MonomialOrder};
pub use parse::{parse_poly, parse_rational, ParseError};
pub use poly::{integer, primitive_integer_multiple, SparsePoly};
