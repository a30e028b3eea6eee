use thiserror::Error;

/// Errors raised by the exact finite-field machinery.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid modulus {0}: expected a prime in [3, 31]")]
    InvalidModulus(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("enumeration of {requested} items exceeds the budget of {budget}")]
    BudgetExceeded { requested: u128, budget: u64 },
    #[error("degree {degree} exceeds the limit {limit}")]
    DegreeLimit { degree: i32, limit: i32 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Upper bound on the number of points (or candidate objects) a single call may enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Budget(pub u64);

impl Budget {
    pub const DEFAULT: Budget = Budget(2_000_000);

    pub fn check(self, requested: u128) -> Result<()> {
        if requested <= self.0 as u128 {
            Ok(())
        } else {
            Err(Error::BudgetExceeded { requested, budget: self.0 })
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::DEFAULT
    }
}
