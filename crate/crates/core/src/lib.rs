//! Numerical laboratory for weighted mean values of Dirichlet polynomials:
//! sieve-backed coefficient series, Gaussian-window quadrature, exact diagonal
//! sums, exact rational closed forms, inequality-chain reports, and zeta-zero
//! table diagnostics.

pub mod arith;
pub mod error;
pub mod bounds;
pub mod closed;
pub mod grid;
pub mod measure;
pub mod oracle;
pub mod zeros;

pub use error::{Error, Result};

pub use num::complex::Complex64;
