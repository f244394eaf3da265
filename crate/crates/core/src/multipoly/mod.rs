//! Sparse multivariate polynomials over exact fields.

pub mod graded;
pub mod monomial;
pub mod poly;
pub mod text;

pub use graded::{graded_piece_basis, monomial_count, monomials_of_degree, GradedPiece, MonomialIndex};
pub use monomial::{Monomial, MonomialOrder, MAX_VARS};
pub use poly::{MultiPoly, PolyRing};
pub use text::{format_poly, parse_poly};
