//! Exact algebra and birational-geometry checks for Fano fourfolds of
//! genus 7 to 10: prime fields and rationals, sparse polynomials, Gröbner
//! bases, linked surfaces, intersection tables and Cremona cylinders.

pub mod error;
pub mod exactalg;
pub mod groebner;
pub mod linalg;
pub mod multipoly;
pub mod par;
pub mod varieties;
pub mod chow;
pub mod report;
pub mod cremona;
pub mod scenario;

pub use error::{Error, Result};
