//! Exact geometry of polygonal Carnot-Carathéodory metrics on the
//! Heisenberg group, and lattice oracles for the word metrics that
//! converge to them.
//!
//! Rationals are `num::BigRational`; distances that are not rational are
//! [`numbers::AlgebraicScalar`] values `p + q√d`.

pub mod atlas;
pub mod counting;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod mesh;
pub mod metric;
pub mod monte_carlo;
pub mod numbers;
pub mod par;
pub mod serde_rational;
pub mod verify;
pub mod volumes;

pub use error::{Error, Result};
