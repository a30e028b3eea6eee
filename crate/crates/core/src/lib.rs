//! Exact computational objects for the bias/rank theory of low-degree
//! polynomials over small prime fields: discrete derivatives, character sums,
//! quadratic-form rank, regular quadratic families and their zero sets, and
//! iterated sumsets.
//!
//! Everything is exact. Floating point appears only in reported magnitudes
//! and in the optional Fourier-transform route for sumset convolutions, which
//! is always cross-checked against integer arithmetic.

pub mod charsum;
pub mod error;
pub mod family;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod quadform;
pub mod sumset;

pub use error::{Budget, Error, Result};
pub use family::QuadFamily;
pub use field::{PrimeModulus, Scalar};
pub use linalg::{AffineSubspace, LinearForm, Subspace};
pub use poly::{Polynomial, ValueTable};
pub use quadform::QuadraticPoly;
pub use sumset::GroupSubset;
