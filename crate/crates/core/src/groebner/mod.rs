//! Gröbner bases and the ideal operations built on them.

pub mod buchberger;
pub mod emptiness;
pub mod hilbert;
pub mod ideal;
pub mod ops;
pub mod quotient;
pub mod syzygy;

pub use buchberger::buchberger;
pub use emptiness::{is_empty_projective, sweep_emptiness, Emptiness, SweepStep};
pub use hilbert::{hilbert_data, hilbert_numerator, regularity, HilbertData};
pub use ideal::{GroebnerBasis, IdealHandle};
pub use ops::{eliminate, intersect, quotient, quotient_by_poly, saturate};
pub use quotient::{DegreeTable, QuotientRing};
pub use syzygy::{betti_table, koszul_betti, minimal_generators, minimal_syzygies, BettiTable, ModuleElement};
