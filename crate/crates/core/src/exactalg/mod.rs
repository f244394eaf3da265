//! Exact scalars: prime fields, rationals and truncated jets.

pub mod field;
pub mod jet;

pub use field::{Field, PrimeField, Rationals, DEFAULT_PRIME};
pub use jet::{JetElement, JetRing};
