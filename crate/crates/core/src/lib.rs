//! Exact and fixed-precision linear elimination in the styles of historical
//! hand computers.

pub mod compact;
pub mod cracovian;
pub mod eliminate;
pub mod error;
pub mod ldu;
pub mod leastsq;
pub mod matrix;
pub mod ops;
pub mod scalar;
pub mod workbench;

pub use error::{Error, Result};
pub use matrix::{mat_mul, residual, transpose, ColumnVector, Matrix};
pub use ops::{Arith, OpCounter};
pub use scalar::{DigitMode, FixedDec, PrecisionSpec, Rational, Scalar, ScalarKind};
