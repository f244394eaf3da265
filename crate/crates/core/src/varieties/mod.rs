//! Geometric constructions over exact fields.

pub mod sampling;
pub mod interpolation;
pub mod rational_map;

pub use interpolation::{implicitize_by_interpolation, Interpolation};
pub use rational_map::RationalMap;
pub mod surfaces;
pub mod linear_system;
pub mod mukai;
