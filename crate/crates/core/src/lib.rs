#[cfg(feature = "cli")]
pub mod cli;
pub mod eigen;
pub mod error;
pub mod genericity;
pub mod matrix;
pub mod pattern;
pub mod perplectic;
pub mod product;
pub mod symplectic;
pub mod testkit;

pub use error::{Error, Result};
pub use matrix::{c64, Matrix, C64};
pub use pattern::Pattern;
pub use product::{ProductKind, ScalarProduct, DEFAULT_TOL};
