//! Dissipative qubit dynamics with structured-bath decay rates, and the
//! Kolmogorov-consistency, non-Markovianity, thermodynamic and quasi-probability
//! quantities built on top of them.

pub mod bath;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod kcc;
pub mod nonmarkov;
pub mod operator;
pub mod profile;
pub mod quadrature;
pub mod thermo;
pub mod witnesses;

pub use error::{Error, Result};
