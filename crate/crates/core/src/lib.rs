//! Joint numerical ranges of tuples of Hermitian operators.

pub mod bands;
pub mod direction;
pub mod error;
pub mod fixtures;
pub mod flat;
pub mod herm;
pub mod hull;
pub mod linalg;
pub mod optimize;
pub mod photonic;
pub mod range;

pub use error::{Error, Result};
