//! Exact computations with local systems of chain complexes over finite
//! groupoids.

pub mod chain;
pub mod codec;
pub mod error;
pub mod groupoid;
pub mod integral;
pub mod linalg;
pub mod local;
pub mod simplicial;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Field, Matrix, Scalar};
