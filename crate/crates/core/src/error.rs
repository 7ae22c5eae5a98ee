use num_bigint::{BigInt, BigUint};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pole at t = {at}")]
    Pole { at: BigInt },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("B_{k} is over the exact Bernoulli budget {budget}")]
    Budget { k: BigUint, budget: usize },

    #[error(
        "precision unattainable for weight {k} at p = {p}: reduction modulus {modulus} \
         leaves a representative above the Bernoulli budget {budget}"
    )]
    PrecisionUnattainable {
        k: BigInt,
        p: u64,
        modulus: BigUint,
        budget: usize,
    },

    #[error("insufficient precision: need {needed} p-adic digits, have {available}")]
    Precision { needed: i64, available: i64 },

    #[error("not a p-adic unit modulo {p}^{prec}")]
    NotUnit { p: u64, prec: u32 },

    #[error("weight {k} is not in branch {l} mod {modulus}")]
    WrongBranch { k: BigInt, l: u64, modulus: u64 },

    #[error("prime {p} does not exceed the bound P = {bound}")]
    BoundViolation { p: u64, bound: BigInt },

    #[error("preset rejected: {0}")]
    Preset(String),
}

impl Error {
    /// True for the precision and budget failures (CLI exit code 3).
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::Budget { .. } | Error::PrecisionUnattainable { .. } | Error::Precision { .. }
        )
    }
}
