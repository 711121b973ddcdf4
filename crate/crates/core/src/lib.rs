//! Generalized Yang-Baxter solutions built from supersymmetric charges.

pub mod battery;
pub mod baxter;
pub mod catalog;
pub mod error;
pub mod sis;
pub mod slocc;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use tensor::{DenseOperator, StateVector};
