//! Maximal-entropy interpolation for noncommutative analytic Toeplitz algebras on truncated Fock spaces.

pub mod entropy;
pub mod error;
pub mod fock;
pub mod grammian;
pub mod interpolate;
pub mod lifting;
pub mod linalg;
pub mod series;
pub mod toeplitz;
pub mod words;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
pub use words::{GradedIndex, Word};
