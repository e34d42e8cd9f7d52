//! Number-theoretic kernels: prime sieves, smallest-prime-factor tables, the
//! Jacobi symbol, the Liouville function and prime search in residue classes.
//!
//! Point queries of the symbol go through [`kronecker`], which runs the
//! binary reciprocity algorithm (strip powers of two, apply the supplementary
//! law, flip and reduce). Bulk evaluation of any completely multiplicative
//! function goes through an [`SpfTable`]: once the value at every prime is
//! known, `f(n) = f(spf(n)) * f(n / spf(n))` fills the rest in one pass.

use crate::error::{Error, Result};

/// Smallest-prime-factor table for `2 <= n <= limit`, one 32-bit entry per integer.
#[derive(Debug, Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SpfTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n`, or `None` outside `2..=limit`.
    #[inline]
    pub fn spf(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            None
        } else {
            Some(self.spf[n as usize] as u64)
        }
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        self.spf(n) == Some(n)
    }

    /// All primes up to the table limit, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Prime factors of `n` with multiplicity, ascending. Empty for `n = 1`.
    pub fn factorize(&self, n: u64) -> Result<Vec<u64>> {
        if n == 0 {
            return Err(Error::InvalidArgument("cannot factor 0".into()));
        }
        self.require(n)?;
        let mut out = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            out.push(p);
            m /= p;
        }
        Ok(out)
    }

    /// Fails unless the table covers `n`.
    pub fn require(&self, n: u64) -> Result<()> {
        if n > self.limit {
            Err(Error::TableTooSmall {
                have: self.limit,
                need: n,
            })
        } else {
            Ok(())
        }
    }

    /// Extends values given at primes to every `n <= limit` by complete
    /// multiplicativity. Index 0 of the result is unused and holds `zero`.
    pub(crate) fn propagate<T, F>(&self, limit: u64, one: T, zero: T, mut at_prime: F) -> Result<Vec<T>>
    where
        T: Copy + std::ops::Mul<Output = T>,
        F: FnMut(u64) -> T,
    {
        self.require(limit)?;
        let len = limit as usize + 1;
        let mut values = vec![zero; len];
        if len > 1 {
            values[1] = one;
        }
        for n in 2..len {
            let p = self.spf[n] as usize;
            values[n] = if p == n {
                at_prime(n as u64)
            } else {
                values[p] * values[n / p]
            };
        }
        Ok(values)
    }
}

/// Linear sieve producing the smallest prime factor of every `n <= limit`.
pub fn build_spf(limit: u64) -> Result<SpfTable> {
    if limit < 2 {
        return Err(Error::LimitTooSmall { limit, min: 2 });
    }
    if limit > u32::MAX as u64 {
        return Err(Error::LimitTooLarge(limit));
    }
    let len = limit as usize + 1;
    let mut spf = vec![0u32; len];
    let mut primes: Vec<u32> = Vec::with_capacity(prime_count_estimate(limit));
    for n in 2..len {
        if spf[n] == 0 {
            spf[n] = n as u32;
            primes.push(n as u32);
        }
        let s = spf[n];
        for &p in &primes {
            if p > s {
                break;
            }
            let m = n * p as usize;
            if m >= len {
                break;
            }
            spf[m] = p;
        }
    }
    Ok(SpfTable { limit, spf, primes })
}

fn prime_count_estimate(limit: u64) -> usize {
    let x = limit as f64;
    if x < 17.0 {
        8
    } else {
        (1.26 * x / x.ln()) as usize
    }
}

/// All primes `<= limit`, ascending (sieve of Eratosthenes over odd numbers).
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    // composite[i] describes the odd number 2i + 1
    let half = (limit - 1) / 2 + 1;
    let mut composite = vec![false; half];
    let mut out = vec![2u64];
    let mut i = 1;
    while i < half {
        if !composite[i] {
            let p = 2 * i + 1;
            out.push(p as u64);
            let mut j = (p * p - 1) / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    out
}

/// Jacobi symbol `(a/n)` for odd `n >= 1`. For an odd prime `n` this is the
/// Legendre symbol.
pub fn kronecker(a: i64, n: i64) -> Result<i8> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::EvenModulus(n));
    }
    let n = n as u64;
    let a = (a as i128).rem_euclid(n as i128) as u64;
    Ok(jacobi(a, n))
}

/// Unchecked Jacobi symbol; `n` must be odd and positive.
#[inline]
pub(crate) fn jacobi(a: u64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = a % n;
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Liouville function `λ(n) = (-1)^Ω(n)` for `1 <= n <= limit`; entry `i`
/// holds `λ(i + 1)`.
pub fn liouville(limit: u64) -> Result<Vec<i8>> {
    if limit == 0 {
        return Err(Error::LimitTooSmall { limit, min: 1 });
    }
    let spf = build_spf(limit.max(2))?;
    liouville_with(&spf, limit)
}

/// As [`liouville`], reusing an existing table.
pub fn liouville_with(spf: &SpfTable, limit: u64) -> Result<Vec<i8>> {
    let mut values = spf.propagate(limit, 1i8, 0i8, |_| -1)?;
    values.remove(0);
    Ok(values)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Number of residue-class steps examined before giving up.
const SEARCH_STEPS: u64 = 10_000_000;

/// Least prime `p > bound` with `p ≡ residue (mod modulus)`.
pub fn smallest_prime_above(bound: f64, residue: i64, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    if !bound.is_finite() {
        return Err(Error::InvalidArgument(format!("bound {bound} is not finite")));
    }
    let r = (residue as i128).rem_euclid(modulus as i128) as u64;
    if gcd(r, modulus) != 1 {
        return Err(Error::ResidueNotCoprime { residue, modulus });
    }
    if bound >= u64::MAX as f64 / 2.0 {
        return Err(Error::InvalidArgument(format!("bound {bound} out of range")));
    }
    let start = if bound < 2.0 { 2 } else { bound.floor() as u64 + 1 };
    let mut n = start + (r + modulus - start % modulus) % modulus;
    let ceiling = n.saturating_add(modulus.saturating_mul(SEARCH_STEPS));
    while n <= ceiling {
        if is_prime(n) {
            return Ok(n);
        }
        n = match n.checked_add(modulus) {
            Some(next) => next,
            None => break,
        };
    }
    Err(Error::SearchExhausted {
        bound,
        residue,
        modulus,
        ceiling,
    })
}
