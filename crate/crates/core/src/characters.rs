//! Real primitive Dirichlet characters of odd squarefree modulus.
//!
//! Every character here is a product of distinct Legendre symbols, so it is
//! primitive with conductor equal to its modulus and takes values in
//! `{-1, 0, 1}`. Evaluation is a single Jacobi symbol `(n / modulus)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{self, SpfTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }

    /// Value of the character at `-1`.
    pub fn sign(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    fn times(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A real primitive character `χ mod q` with `q` odd and squarefree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCharacter")]
pub struct QuadraticCharacter {
    modulus: u64,
    factors: Vec<u64>,
    parity: Parity,
}

#[derive(Deserialize)]
struct RawCharacter {
    modulus: u64,
    factors: Vec<u64>,
    parity: Parity,
}

impl TryFrom<RawCharacter> for QuadraticCharacter {
    type Error = Error;

    fn try_from(raw: RawCharacter) -> Result<Self> {
        let mut factors = raw.factors.into_iter();
        let first = factors
            .next()
            .ok_or_else(|| Error::InvalidArgument("character needs at least one prime factor".into()))?;
        let mut chi = legendre_character(first)?;
        for p in factors {
            chi = product_character(&chi, &legendre_character(p)?)?;
        }
        if chi.modulus != raw.modulus || chi.parity != raw.parity {
            return Err(Error::InvalidArgument(format!(
                "inconsistent character record: modulus {} parity {}",
                raw.modulus, raw.parity
            )));
        }
        Ok(chi)
    }
}

impl QuadraticCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Distinct prime factors of the modulus, ascending.
    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Euler's totient of the modulus.
    pub fn phi(&self) -> u64 {
        self.factors.iter().map(|p| p - 1).product()
    }

    #[inline]
    pub fn evaluate(&self, n: i64) -> i8 {
        let r = (n as i128).rem_euclid(self.modulus as i128) as u64;
        arith::jacobi(r, self.modulus)
    }

    #[inline]
    pub(crate) fn evaluate_u64(&self, n: u64) -> i8 {
        arith::jacobi(n, self.modulus)
    }

    /// `χ(n)` for `1 <= n <= limit`; entry `i` holds `χ(i + 1)`.
    pub fn bulk_values(&self, limit: u64, spf: &SpfTable) -> Result<Vec<i8>> {
        let mut v = self.values_from_one(limit, spf)?;
        v.remove(0);
        Ok(v)
    }

    /// `χ(n)` indexed directly by `n`, with a zero in slot 0.
    pub(crate) fn values_from_one(&self, limit: u64, spf: &SpfTable) -> Result<Vec<i8>> {
        spf.propagate(limit, 1i8, 0i8, |p| self.evaluate_u64(p))
    }
}

impl fmt::Display for QuadraticCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "χ mod {} ({})", self.modulus, self.parity)
    }
}

/// The Legendre symbol `(· / p)` as a character mod `p`.
pub fn legendre_character(p: u64) -> Result<QuadraticCharacter> {
    if p % 2 == 0 || !arith::is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let parity = if p % 4 == 3 { Parity::Odd } else { Parity::Even };
    Ok(QuadraticCharacter {
        modulus: p,
        factors: vec![p],
        parity,
    })
}

/// Pointwise product of two characters of coprime modulus.
pub fn product_character(xi: &QuadraticCharacter, psi: &QuadraticCharacter) -> Result<QuadraticCharacter> {
    if xi.factors.iter().any(|p| psi.factors.contains(p)) {
        return Err(Error::ModuliNotCoprime(xi.modulus, psi.modulus));
    }
    let modulus = xi
        .modulus
        .checked_mul(psi.modulus)
        .ok_or_else(|| Error::InvalidArgument("product modulus overflows u64".into()))?;
    let mut factors: Vec<u64> = xi.factors.iter().chain(&psi.factors).copied().collect();
    factors.sort_unstable();
    Ok(QuadraticCharacter {
        modulus,
        factors,
        parity: xi.parity.times(psi.parity),
    })
}
