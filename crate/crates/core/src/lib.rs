//! Isolated and simple points of determinantal systems by symbolic
//! homotopy continuation over a word-size prime field.

pub mod detstart;
pub mod error;
pub mod field;
pub mod homotopy;
pub mod linalg;
pub mod localdim;
pub mod oracle;
pub mod problem;
pub mod quotient;
pub mod ring;
pub mod series;
pub mod slp;
pub mod solve;
pub mod upoly;
pub mod zdp;

pub use error::{Error, Result, ZeroDivisor};
pub use field::{Fp, PrimeField, RngKey};
pub use upoly::UPoly;
pub use zdp::ZeroDimParam;
