//! Exact scalar and polynomial arithmetic.

pub mod mpoly;
pub mod rational;
pub mod resultant;
pub mod upoly;

pub use mpoly::{MPoly, Monomial};
pub use rational::{format_rational, parse_rational, rat, Rational};
pub use resultant::{discriminant, principal_subresultant_coeffs, resultant, sylvester_resultant};
pub use upoly::UPoly;
