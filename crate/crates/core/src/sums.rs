//! Character partial sums, mean values of completely multiplicative
//! functions, and the quantities used to compare the mean with the
//! logarithmic mean.
//!
//! Partial sums of real characters are exact `i64`s. Every sum of the shape
//! `Σ f(n)/n` or `Σ f(n)` with real `f` goes through [`CompensatedSum`].
//! Real thresholds `t` are honoured as `n <= floor(t)`.

use serde::{Deserialize, Serialize};

use crate::arith::{self, SpfTable};
use crate::characters::QuadraticCharacter;
use crate::error::{Error, Result};

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Hall–Tenenbaum decay exponent in `|M_f(x)| ≪ exp(-κ u)`.
pub const HALL_TENENBAUM_KAPPA: f64 = 0.32;

/// Numerical constants used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub kappa: f64,
    pub euler_gamma: f64,
    /// Conjectured constant `e^γ/π` for odd characters.
    pub c_odd: f64,
    /// Conjectured constant `e^γ/(π√3)` for even characters.
    pub c_even: f64,
}

impl Constants {
    pub fn new() -> Self {
        let c_odd = EULER_GAMMA.exp() / std::f64::consts::PI;
        Constants {
            kappa: HALL_TENENBAUM_KAPPA,
            euler_gamma: EULER_GAMMA,
            c_odd,
            c_even: c_odd / 3f64.sqrt(),
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::new()
    }
}

/// A completely multiplicative `f : ℤ⁺ → [-1, 1]`, fixed by its values at
/// the primes up to `limit` and expanded eagerly to every `n <= limit`.
#[derive(Debug, Clone)]
pub struct CompletelyMultiplicativeFunction {
    limit: u64,
    values: Vec<f64>,
    primes: Vec<u32>,
}

impl CompletelyMultiplicativeFunction {
    /// Builds `f` from its prime values; each must lie in `[-1, 1]`.
    pub fn from_prime_values<F>(spf: &SpfTable, limit: u64, mut at_prime: F) -> Result<Self>
    where
        F: FnMut(u64) -> f64,
    {
        if limit == 0 {
            return Err(Error::LimitTooSmall { limit, min: 1 });
        }
        let mut bad = None;
        let values = spf.propagate(limit, 1.0f64, 0.0f64, |p| {
            let v = at_prime(p);
            if !(-1.0..=1.0).contains(&v) && bad.is_none() {
                bad = Some((p, v));
            }
            v
        })?;
        if let Some((prime, value)) = bad {
            return Err(Error::ValueOutOfRange { prime, value });
        }
        let primes = spf
            .primes()
            .iter()
            .copied()
            .take_while(|&p| p as u64 <= limit)
            .collect();
        Ok(CompletelyMultiplicativeFunction { limit, values, primes })
    }

    /// As [`Self::from_prime_values`] with a freshly built table.
    pub fn from_fn<F>(limit: u64, at_prime: F) -> Result<Self>
    where
        F: FnMut(u64) -> f64,
    {
        let spf = arith::build_spf(limit.max(2))?;
        Self::from_prime_values(&spf, limit, at_prime)
    }

    pub fn constant_one(limit: u64) -> Result<Self> {
        Self::from_fn(limit, |_| 1.0)
    }

    pub fn liouville(limit: u64) -> Result<Self> {
        Self::from_fn(limit, |_| -1.0)
    }

    pub fn from_character(chi: &QuadraticCharacter, limit: u64, spf: &SpfTable) -> Result<Self> {
        Self::from_prime_values(spf, limit, |p| chi.evaluate_u64(p) as f64)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `f(n)` for `1 <= n <= limit`.
    pub fn value(&self, n: u64) -> Option<f64> {
        if n == 0 || n > self.limit {
            None
        } else {
            Some(self.values[n as usize])
        }
    }

    /// `(p, f(p))` for every prime `p <= limit`.
    pub fn prime_values(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.primes
            .iter()
            .map(move |&p| (p as u64, self.values[p as usize]))
    }

    /// Values indexed by `n`, slot 0 unused.
    pub(crate) fn raw_values(&self) -> &[f64] {
        &self.values
    }

    fn covering(&self, x: f64) -> Result<u64> {
        let n = floor_arg(x)?;
        if n > self.limit {
            return Err(Error::TableTooSmall {
                have: self.limit,
                need: n,
            });
        }
        Ok(n)
    }
}

fn floor_arg(x: f64) -> Result<u64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidArgument(format!("threshold {x} must be finite and nonnegative")));
    }
    if x >= u64::MAX as f64 {
        return Err(Error::InvalidArgument(format!("threshold {x} out of range")));
    }
    Ok(x.floor() as u64)
}

/// Running maximum of `|S_χ(N)|` over one full period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumProfile {
    pub modulus: u64,
    pub max_abs: u64,
    /// Smallest `N` attaining the maximum.
    pub argmax: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<(u64, i64)>>,
}

/// `S_χ(t) = Σ_{n ≤ t} χ(n)`, exact.
pub fn partial_sum(chi: &QuadraticCharacter, t: f64) -> Result<i64> {
    let n = floor_arg(t)?;
    // whole periods contribute nothing
    let r = n % chi.modulus();
    Ok((1..=r).map(|k| chi.evaluate_u64(k) as i64).sum())
}

/// `max_{N ≤ q} |S_χ(N)|` in one streaming pass.
pub fn max_partial_sum(chi: &QuadraticCharacter, spf: &SpfTable) -> Result<SumProfile> {
    scan_profile(chi, spf, None)
}

/// As [`max_partial_sum`], also recording `(N, S_χ(N))` every `stride` steps
/// and at `N = q`.
pub fn max_partial_sum_sampled(chi: &QuadraticCharacter, spf: &SpfTable, stride: u64) -> Result<SumProfile> {
    if stride == 0 {
        return Err(Error::InvalidArgument("sample stride must be positive".into()));
    }
    scan_profile(chi, spf, Some(stride))
}

fn scan_profile(chi: &QuadraticCharacter, spf: &SpfTable, stride: Option<u64>) -> Result<SumProfile> {
    let q = chi.modulus();
    let values = chi.values_from_one(q, spf)?;
    let mut samples = stride.map(|_| Vec::new());
    let mut running = 0i64;
    let mut max_abs = 0u64;
    let mut argmax = 1u64;
    for (n, &v) in values.iter().enumerate().skip(1) {
        running += v as i64;
        let a = running.unsigned_abs();
        if a > max_abs {
            max_abs = a;
            argmax = n as u64;
        }
        if let (Some(s), Some(k)) = (samples.as_mut(), stride) {
            if n as u64 % k == 0 || n as u64 == q {
                s.push((n as u64, running));
            }
        }
    }
    Ok(SumProfile {
        modulus: q,
        max_abs,
        argmax,
        samples,
    })
}

/// `M_f(x) = (1/x) Σ_{n ≤ x} f(n)`.
pub fn mean(f: &CompletelyMultiplicativeFunction, x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::InvalidArgument(format!("mean needs x >= 1, got {x}")));
    }
    let n = f.covering(x)?;
    let s: CompensatedSum = f.raw_values()[1..=n as usize].iter().copied().collect();
    Ok(s.value() / x)
}

/// `Σ_{n ≤ x} f(n)/n`.
pub fn log_weighted_sum(f: &CompletelyMultiplicativeFunction, x: f64) -> Result<f64> {
    let n = f.covering(x)?;
    let s: CompensatedSum = f.raw_values()[1..=n as usize]
        .iter()
        .enumerate()
        .map(|(i, &v)| v / (i + 1) as f64)
        .collect();
    Ok(s.value())
}

/// `L_f(x) = (1/log x) Σ_{n ≤ x} f(n)/n`, for `x >= 2`.
pub fn log_mean(f: &CompletelyMultiplicativeFunction, x: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(Error::InvalidArgument(format!("log mean needs x >= 2, got {x}")));
    }
    Ok(log_weighted_sum(f, x)? / x.ln())
}

/// `Σ_{n ≤ t} χ(n)/n`, evaluated pointwise.
pub fn character_log_sum(chi: &QuadraticCharacter, t: f64) -> Result<f64> {
    let n = floor_arg(t)?;
    let s: CompensatedSum = (1..=n)
        .map(|k| chi.evaluate_u64(k) as f64 / k as f64)
        .collect();
    Ok(s.value())
}

/// `Σ_{n ≤ t, ℓ ∤ n} ξ(n)/n` for a prime `ℓ`.
pub fn restricted_log_sum(xi: &QuadraticCharacter, t: f64, ell: u64) -> Result<f64> {
    if ell % 2 == 0 || !arith::is_prime(ell) {
        return Err(Error::NotOddPrime(ell));
    }
    if !(t >= 1.0) {
        return Err(Error::InvalidArgument(format!("restricted sum needs t >= 1, got {t}")));
    }
    let n = floor_arg(t)?;
    let s: CompensatedSum = (1..=n)
        .filter(|k| k % ell != 0)
        .map(|k| xi.evaluate_u64(k) as f64 / k as f64)
        .collect();
    Ok(s.value())
}

/// `(1/x) Σ_{n ≤ x} (1 ∗ f)(n)`, computed as `(1/x) Σ_{d ≤ x} f(d) ⌊x/d⌋`.
pub fn conv_mean(f: &CompletelyMultiplicativeFunction, x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::InvalidArgument(format!("convolution mean needs x >= 1, got {x}")));
    }
    let n = f.covering(x)?;
    let s: CompensatedSum = f.raw_values()[1..=n as usize]
        .iter()
        .enumerate()
        .map(|(i, &v)| v * (n / (i as u64 + 1)) as f64)
        .collect();
    Ok(s.value() / x)
}

/// `u = Σ_{p ≤ x} (1 - f(p))/p`.
pub fn ht_u(f: &CompletelyMultiplicativeFunction, x: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(Error::InvalidArgument(format!("u needs x >= 2, got {x}")));
    }
    let n = f.covering(x)?;
    let s: CompensatedSum = f
        .prime_values()
        .take_while(|&(p, _)| p <= n)
        .map(|(p, v)| (1.0 - v) / p as f64)
        .collect();
    // each term is >= 0; clamp away a signed zero
    Ok(s.value().max(0.0))
}

/// Main term `exp(-u e^{u/2}) log x` of the lower bound for the convolution mean.
pub fn gs_bound(u: f64, x: f64) -> Result<f64> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("bound needs x >= 2, got {x}")));
    }
    if !(u >= 0.0) {
        return Err(Error::InvalidArgument(format!("u must be nonnegative, got {u}")));
    }
    Ok((-u * (u / 2.0).exp()).exp() * x.ln())
}

/// Normalized size of a character-sum maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvRatios {
    /// `max|S_χ| / (√q log q)`
    pub ratio_log: f64,
    /// `max|S_χ| / (√q log log q)`, present only once `log log q >= 1` (q >= 16).
    pub ratio_loglog: Option<f64>,
}

pub fn pv_ratios(profile: &SumProfile) -> Result<PvRatios> {
    let q = profile.modulus;
    if q < 3 {
        return Err(Error::InvalidArgument(format!("ratios need modulus >= 3, got {q}")));
    }
    let qf = q as f64;
    let m = profile.max_abs as f64;
    let ratio_log = m / (qf.sqrt() * qf.ln());
    let ratio_loglog = (q >= 16).then(|| m / (qf.sqrt() * qf.ln().ln()));
    Ok(PvRatios {
        ratio_log,
        ratio_loglog,
    })
}

/// Mean-value quantities for a single `(f, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeansReport {
    pub x: f64,
    pub mean: f64,
    pub log_mean: f64,
    pub u: f64,
    pub conv_mean: f64,
    pub gs_bound: f64,
    /// `exp(-κ u)`
    pub ht_envelope: f64,
    /// Empirical constant `|M_f(x)| e^{κu}`; recorded, never bounded.
    pub ht_constant: f64,
    /// Set when `x` lies below the configured minimum scale.
    pub below_min_x: bool,
}
