use thiserror::Error;

/// Errors raised by the number-theoretic kernels and the experiments built on them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus {0} must be odd and positive")]
    EvenModulus(i64),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("sieve limit {limit} is below the minimum {min}")]
    LimitTooSmall { limit: u64, min: u64 },

    #[error("sieve limit {0} exceeds the 32-bit table capacity")]
    LimitTooLarge(u64),

    #[error("table covers n <= {have} but {need} is required")]
    TableTooSmall { have: u64, need: u64 },

    #[error("gcd({residue}, {modulus}) > 1: no prime in that residue class beyond finitely many")]
    ResidueNotCoprime { residue: i64, modulus: u64 },

    #[error("no prime found above {bound} in class {residue} mod {modulus} before the search ceiling {ceiling}")]
    SearchExhausted {
        bound: f64,
        residue: i64,
        modulus: u64,
        ceiling: u64,
    },

    #[error("moduli {0} and {1} are not coprime")]
    ModuliNotCoprime(u64, u64),

    #[error("character mod {modulus} has {found} parity but {expected} parity is required")]
    WrongParity {
        modulus: u64,
        expected: &'static str,
        found: &'static str,
    },

    #[error("value f({prime}) = {value} lies outside [-1, 1]")]
    ValueOutOfRange { prime: u64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
