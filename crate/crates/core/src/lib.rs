//! Computations in the derived category of the dual numbers `A = k[ε]/(ε²)`.

pub mod complexes;
pub mod decomp;
pub mod endofunctors;
pub mod error;
pub mod homspace;
pub mod io;
pub mod linalg;
pub mod selftest;
pub mod stability;

pub use error::{Error, FormatError, Result};
