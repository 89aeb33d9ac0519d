//! Numerical toolkit for the shifted cubic moment of Hardy's function.

pub mod cli;
pub mod dd;
pub mod divisor;
pub mod error;
pub mod explicit;
pub mod expsum;
pub mod quadrature;
pub mod report;
pub mod saddle;
pub mod suite;
pub mod summation;
pub mod zeta;

pub use error::{Error, Result};

/// Complex values returned throughout the crate.
pub type ComplexValue = num_complex::Complex64;
