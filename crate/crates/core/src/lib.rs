//! Exact Fedosov star products of Wick type on Kähler charts.

pub mod error;
pub mod fedosov;
pub mod geometry;
pub mod jet;
pub mod matrix;
pub mod scalar;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use jet::{Jet, Monomial, Order};
pub use matrix::{Endo, JetMatrix, Section};
pub use scalar::{GaussianRational, Rational};
