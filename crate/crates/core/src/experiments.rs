//! Finite, checkable instances of the character-sum arguments: the lower
//! bound for sums of a product of two odd characters, the construction that
//! turns a large mean of an odd character into a large even character sum,
//! empirical study of the mean versus logarithmic-mean comparison, and the
//! least-nonresidue and short-interval scans.
//!
//! Nothing here proves anything. Every routine computes the quantities on a
//! concrete input, records them, and raises flags where the standing
//! hypotheses of the argument fail for that input.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{self, SpfTable};
use crate::characters::{legendre_character, product_character, Parity, QuadraticCharacter};
use crate::error::{Error, Result};
use crate::sums::{
    self, character_log_sum, partial_sum, restricted_log_sum, CompensatedSum, CompletelyMultiplicativeFunction,
    MeansReport, EULER_GAMMA, HALL_TENENBAUM_KAPPA,
};

/// Scale below which a means report is flagged as outside the large-`x` regime.
pub const DEFAULT_MIN_X: f64 = 100.0;

/// Exponent `1/(4√e)` of the unconditional least-nonresidue bound.
pub fn nonresidue_exponent_barrier() -> f64 {
    0.25 / 0.5f64.exp()
}

/// Smallest prime `ℓ > 2/δ` with `ℓ ≡ 3 (mod 4)`.
pub fn choose_ell(delta: f64) -> Result<u64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    arith::smallest_prime_above(2.0 / delta, 3, 4)
}

/// As [`choose_ell`], passing over `avoid` so the product modulus stays squarefree.
fn choose_ell_avoiding(delta: f64, avoid: u64) -> Result<(u64, bool)> {
    let ell = choose_ell(delta)?;
    if ell != avoid {
        return Ok((ell, false));
    }
    Ok((arith::smallest_prime_above(ell as f64, 3, 4)?, true))
}

/// Both sides of the lower bound
/// `max_N |S_{ξψ}(N)| / √q ≥ √ℓ/(π φ(ℓ)) · max_{t ≤ q} |Σ_{n ≤ t, (n,ℓ)=1} ξ(n)/n| + O(1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaBgAudit {
    pub k: u64,
    pub ell: u64,
    pub q: u64,
    pub max_abs: u64,
    pub argmax: u64,
    pub restricted_max: f64,
    pub restricted_argmax: u64,
    pub lhs: f64,
    pub rhs_main: f64,
    /// `lhs - rhs_main`; the unspecified `O(1)` shows up here.
    pub gap: f64,
}

pub fn verify_lemma_bg(xi: &QuadraticCharacter, psi: &QuadraticCharacter, spf: &SpfTable) -> Result<LemmaBgAudit> {
    for chi in [xi, psi] {
        if chi.parity() != Parity::Odd {
            return Err(Error::WrongParity {
                modulus: chi.modulus(),
                expected: "odd",
                found: chi.parity().as_str(),
            });
        }
    }
    let chi = product_character(xi, psi)?;
    let q = chi.modulus();
    spf.require(q)?;

    let profile = sums::max_partial_sum(&chi, spf)?;

    let xi_values = xi.values_from_one(q, spf)?;
    let ell_factors = psi.factors();
    let mut acc = CompensatedSum::new();
    let mut restricted_max = 0.0f64;
    let mut restricted_argmax = 1u64;
    for n in 1..=q {
        let v = xi_values[n as usize];
        if v != 0 && ell_factors.iter().all(|p| n % p != 0) {
            acc.add(v as f64 / n as f64);
        }
        let a = acc.value().abs();
        if a > restricted_max {
            restricted_max = a;
            restricted_argmax = n;
        }
    }

    let ell = psi.modulus() as f64;
    let lhs = profile.max_abs as f64 / (q as f64).sqrt();
    let rhs_main = ell.sqrt() / (std::f64::consts::PI * psi.phi() as f64) * restricted_max;
    Ok(LemmaBgAudit {
        k: xi.modulus(),
        ell: psi.modulus(),
        q,
        max_abs: profile.max_abs,
        argmax: profile.argmax,
        restricted_max,
        restricted_argmax,
        lhs,
        rhs_main,
        gap: lhs - rhs_main,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLine {
    pub label: String,
    pub value: f64,
}

impl ChainLine {
    fn new(label: &str, value: f64) -> Self {
        ChainLine {
            label: label.to_string(),
            value,
        }
    }
}

pub const FLAG_MEAN_BELOW_C: &str = "mean_hypothesis_not_met";
pub const FLAG_LOG_MEAN_NONPOSITIVE: &str = "log_mean_nonpositive_delta_fallback_to_c";
pub const FLAG_BELOW_MIN_X: &str = "t_p_below_min_x";
pub const FLAG_ELL_SKIPPED: &str = "ell_equal_to_p_skipped";

/// The cheap half of the construction: everything up to the choice of `ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelinePlan {
    pub p: u64,
    pub epsilon: f64,
    pub c: f64,
    pub t_p: f64,
    pub mean_xi: f64,
    pub log_mean_xi: f64,
    pub delta: f64,
    pub ell: u64,
    pub q: u64,
    pub flags: Vec<String>,
}

/// Full record of one run of the construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub c: f64,
    pub epsilon: f64,
    pub p: u64,
    pub t_p: f64,
    pub min_x: f64,
    pub mean_xi: f64,
    /// `L_ξ(t_p)`
    pub log_mean_xi: f64,
    /// `δ` used to pick `ℓ`: `L_ξ(t_p)` when positive, else `c`.
    pub delta: f64,
    pub ell: u64,
    pub q: u64,
    pub product: QuadraticCharacter,
    pub restricted_sum: f64,
    pub lemma_bg_lhs: f64,
    pub lemma_bg_rhs_main: f64,
    pub lemma_bg_gap: f64,
    /// Display lines in order; each later line is a lower bound for the
    /// previous one once the matching entry of `o_terms` is allowed for.
    pub chain_lines: Vec<ChainLine>,
    /// Scale of the error term dropped when passing to each line.
    pub o_terms: Vec<ChainLine>,
    pub final_ratio: f64,
    pub hypothesis_met: bool,
    pub flags: Vec<String>,
}

fn check_pipeline_args(p: u64, epsilon: f64, c: f64) -> Result<QuadraticCharacter> {
    let xi = legendre_character(p)?;
    if xi.parity() != Parity::Odd {
        return Err(Error::WrongParity {
            modulus: p,
            expected: "odd",
            found: xi.parity().as_str(),
        });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidArgument(format!("c must lie in (0, 1], got {c}")));
    }
    Ok(xi)
}

/// Computes `t_p`, both means of `ξ` at `t_p`, `δ` and `ℓ`. Pointwise, no table needed.
pub fn plan_theorem_a(p: u64, epsilon: f64, c: f64) -> Result<PipelinePlan> {
    let xi = check_pipeline_args(p, epsilon, c)?;
    let t_p = (p as f64).powf(epsilon);
    let mut flags = Vec::new();

    let mean_xi = partial_sum(&xi, t_p)? as f64 / t_p;
    if mean_xi.abs() < c {
        flags.push(FLAG_MEAN_BELOW_C.to_string());
    }
    if t_p < DEFAULT_MIN_X {
        flags.push(FLAG_BELOW_MIN_X.to_string());
    }
    // t_p > 1 always, so log t_p > 0
    let log_mean_xi = character_log_sum(&xi, t_p)? / t_p.ln();
    let delta = if log_mean_xi > 0.0 {
        log_mean_xi
    } else {
        flags.push(FLAG_LOG_MEAN_NONPOSITIVE.to_string());
        c
    };
    let (ell, skipped) = choose_ell_avoiding(delta, p)?;
    if skipped {
        flags.push(FLAG_ELL_SKIPPED.to_string());
    }
    let q = p
        .checked_mul(ell)
        .ok_or_else(|| Error::InvalidArgument("conductor p·ℓ overflows".into()))?;
    Ok(PipelinePlan {
        p,
        epsilon,
        c,
        t_p,
        mean_xi,
        log_mean_xi,
        delta,
        ell,
        q,
        flags,
    })
}

/// Runs the construction for one prime `p ≡ 3 (mod 4)`; `spf` must cover `p·ℓ`.
pub fn theorem_a_pipeline(p: u64, epsilon: f64, c: f64, spf: &SpfTable) -> Result<WitnessReport> {
    let plan = plan_theorem_a(p, epsilon, c)?;
    spf.require(plan.q)?;
    let xi = legendre_character(p)?;
    let psi = legendre_character(plan.ell)?;
    let chi = product_character(&xi, &psi)?;

    let t = plan.t_p;
    let ell = plan.ell as f64;
    let delta = plan.delta;
    let (pf, qf) = (p as f64, plan.q as f64);

    let restricted_sum = restricted_log_sum(&xi, t, plan.ell)?;
    let full = character_log_sum(&xi, t)?;
    let tail = character_log_sum(&xi, t / ell)?;
    let split = full - xi.evaluate(plan.ell as i64) as f64 / ell * tail;
    let log_mean_lower = plan.log_mean_xi * t.ln() - ((t / ell).ln() + EULER_GAMMA) / ell;
    let collected = (delta - 1.0 / ell) * t.ln() + (ell.ln() - EULER_GAMMA) / ell;
    let half = delta * epsilon / 2.0;
    let eps_log_p = half * pf.ln();
    let eps_log_q = half * qf.ln() - half * ell.ln();

    let chain_lines = vec![
        ChainLine::new("split", split),
        ChainLine::new("log_mean_lower", log_mean_lower),
        ChainLine::new("collected", collected),
        ChainLine::new("epsilon_log_p", eps_log_p),
        ChainLine::new("epsilon_log_q", eps_log_q),
    ];
    let o_terms = vec![
        ChainLine::new("split", 0.0),
        ChainLine::new("log_mean_lower", ell / t),
        ChainLine::new("collected", 1.0 / t),
        ChainLine::new("epsilon_log_p", pf.powf(-epsilon)),
        ChainLine::new("epsilon_log_q", pf.powf(-epsilon)),
    ];

    let audit = verify_lemma_bg(&xi, &psi, spf)?;
    let final_ratio = audit.max_abs as f64 / (qf.sqrt() * qf.ln());

    Ok(WitnessReport {
        c,
        epsilon,
        p,
        t_p: t,
        min_x: DEFAULT_MIN_X,
        mean_xi: plan.mean_xi,
        log_mean_xi: plan.log_mean_xi,
        delta,
        ell: plan.ell,
        q: plan.q,
        product: chi,
        restricted_sum,
        lemma_bg_lhs: audit.lhs,
        lemma_bg_rhs_main: audit.rhs_main,
        lemma_bg_gap: audit.gap,
        chain_lines,
        o_terms,
        final_ratio,
        hypothesis_met: !plan.flags.iter().any(|f| f == FLAG_MEAN_BELOW_C),
        flags: plan.flags,
    })
}

/// Every [`MeansReport`] field for one `(f, x)`, flagged below [`DEFAULT_MIN_X`].
pub fn lemma_b_report(f: &CompletelyMultiplicativeFunction, x: f64) -> Result<MeansReport> {
    lemma_b_report_with_min_x(f, x, DEFAULT_MIN_X)
}

pub fn lemma_b_report_with_min_x(f: &CompletelyMultiplicativeFunction, x: f64, min_x: f64) -> Result<MeansReport> {
    if !(x >= 2.0) {
        return Err(Error::InvalidArgument(format!("report needs x >= 2, got {x}")));
    }
    let mean = sums::mean(f, x)?;
    let log_mean = sums::log_mean(f, x)?;
    let u = sums::ht_u(f, x)?;
    let ht_envelope = (-HALL_TENENBAUM_KAPPA * u).exp();
    Ok(MeansReport {
        x,
        mean,
        log_mean,
        u,
        conv_mean: sums::conv_mean(f, x)?,
        gs_bound: sums::gs_bound(u, x)?,
        ht_envelope,
        ht_constant: mean.abs() / ht_envelope,
        below_min_x: x < min_x,
    })
}

/// One member of the sample explored by [`estimate_delta`].
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub description: String,
    pub f: CompletelyMultiplicativeFunction,
}

/// Number of single-prime sign flips of `f ≡ 1` included in every sample.
const FLIP_VARIANTS: u32 = 32;

/// The deterministic extremes followed by `trials` seeded random functions.
///
/// Random trial `i` draws a cutoff `y = x^θ` with `θ` uniform in `[0, 1)`,
/// keeps `f(p) = 1` for `p < y` and draws `f(p)` uniformly from `[-1, 1]`
/// for `y <= p <= x`.
pub fn delta_sample(x: f64, trials: usize, seed: u64) -> Result<Vec<SampledFunction>> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("sample needs x >= 2, got {x}")));
    }
    let limit = x.floor() as u64;
    let spf = arith::build_spf(limit)?;
    let mut out = vec![SampledFunction {
        description: "one".into(),
        f: CompletelyMultiplicativeFunction::from_prime_values(&spf, limit, |_| 1.0)?,
    }];

    let mut flips: Vec<u64> = (0..=FLIP_VARIANTS)
        .filter_map(|k| {
            let target = x.powf(k as f64 / FLIP_VARIANTS as f64).floor() as u64;
            let i = spf.primes().partition_point(|&p| p as u64 <= target);
            (i > 0).then(|| spf.primes()[i - 1] as u64)
        })
        .collect();
    flips.dedup();
    for q in flips {
        out.push(SampledFunction {
            description: format!("flip({q})"),
            f: CompletelyMultiplicativeFunction::from_prime_values(&spf, limit, |p| if p == q { -1.0 } else { 1.0 })?,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..trials {
        let theta: f64 = rng.gen_range(0.0..1.0);
        let cutoff = x.powf(theta);
        let f = CompletelyMultiplicativeFunction::from_prime_values(&spf, limit, |p| {
            if (p as f64) < cutoff {
                1.0
            } else {
                rng.gen_range(-1.0..=1.0)
            }
        })?;
        out.push(SampledFunction {
            description: format!("random({i}, cutoff={cutoff:.3})"),
            f,
        });
    }
    Ok(out)
}

/// Smallest observed `L_f(x)` among sampled `f` with `|M_f(x)| >= c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub c: f64,
    pub x: f64,
    pub trials: usize,
    pub seed: u64,
    pub sampled: usize,
    pub qualifying: usize,
    /// `None` when no sampled function satisfies the hypothesis.
    pub delta_hat: Option<f64>,
    pub worst_f: Option<String>,
    pub worst_mean: Option<f64>,
}

pub fn estimate_delta(c: f64, x: f64, trials: usize, seed: u64) -> Result<DeltaEstimate> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidArgument(format!("c must lie in (0, 1], got {c}")));
    }
    let sample = delta_sample(x, trials, seed)?;
    let mut qualifying = 0;
    let mut worst: Option<(f64, f64, &str)> = None;
    for s in &sample {
        let m = sums::mean(&s.f, x)?;
        if m.abs() < c {
            continue;
        }
        qualifying += 1;
        let l = sums::log_mean(&s.f, x)?;
        if worst.map_or(true, |(w, _, _)| l < w) {
            worst = Some((l, m, &s.description));
        }
    }
    Ok(DeltaEstimate {
        c,
        x,
        trials,
        seed,
        sampled: sample.len(),
        qualifying,
        delta_hat: worst.map(|w| w.0),
        worst_f: worst.map(|w| w.2.to_string()),
        worst_mean: worst.map(|w| w.1),
    })
}

/// A point where the logarithmic mean is smaller in size than the mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    /// Primes at which `f(p) = +1` instead of `λ(p) = -1`.
    pub flipped_primes: Vec<u64>,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "mean_at_N")]
    pub mean_at_n: f64,
    #[serde(rename = "log_mean_at_N")]
    pub log_mean_at_n: f64,
}

impl CounterexampleRecord {
    pub fn ratio(&self) -> f64 {
        self.log_mean_at_n.abs() / self.mean_at_n.abs()
    }
}

/// Primes eligible for sign flips in [`counterexample_search`].
pub const FLIP_CANDIDATES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Scans `f = λ` with the sign at up to `flip_budget` small primes flipped,
/// keeping every `2 <= N <= x_max` where `0 < |M_f(N)|`,
/// `|L_f(N)| <= threshold·|M_f(N)|` and `|L_f(N)| < |M_f(N)|`.
/// Hits are ordered by `|L_f(N)|/|M_f(N)|`.
pub fn counterexample_search(x_max: f64, flip_budget: usize, threshold: f64) -> Result<Vec<CounterexampleRecord>> {
    if !(x_max >= 100.0) || !x_max.is_finite() {
        return Err(Error::InvalidArgument(format!("x_max must be >= 100, got {x_max}")));
    }
    if flip_budget > FLIP_CANDIDATES.len() {
        return Err(Error::InvalidArgument(format!(
            "flip budget {flip_budget} exceeds the {} candidate primes",
            FLIP_CANDIDATES.len()
        )));
    }
    if !(threshold >= 0.0) || !threshold.is_finite() {
        return Err(Error::InvalidArgument(format!("threshold must be >= 0, got {threshold}")));
    }
    let limit = x_max.floor() as u64;
    let spf = arith::build_spf(limit)?;
    let mut hits = Vec::new();
    for subset in subsets_up_to(&FLIP_CANDIDATES, flip_budget) {
        let f = CompletelyMultiplicativeFunction::from_prime_values(&spf, limit, |p| {
            if subset.contains(&p) {
                1.0
            } else {
                -1.0
            }
        })?;
        let mut running = CompensatedSum::new();
        let mut running_log = CompensatedSum::new();
        for n in 1..=limit {
            let v = f.value(n).unwrap_or(0.0);
            running.add(v);
            running_log.add(v / n as f64);
            if n < 2 {
                continue;
            }
            let m = running.value() / n as f64;
            let l = running_log.value() / (n as f64).ln();
            if m != 0.0 && l.abs() <= threshold * m.abs() && l.abs() < m.abs() {
                hits.push(CounterexampleRecord {
                    flipped_primes: subset.clone(),
                    n,
                    mean_at_n: m,
                    log_mean_at_n: l,
                });
            }
        }
    }
    hits.sort_by(|a, b| {
        a.ratio()
            .total_cmp(&b.ratio())
            .then_with(|| a.flipped_primes.cmp(&b.flipped_primes))
            .then(a.n.cmp(&b.n))
    });
    Ok(hits)
}

fn subsets_up_to(items: &[u64], max_size: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for size in 1..=max_size {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i]).collect());
            // advance to the next combination in lexicographic order
            let mut i = size;
            while i > 0 && idx[i - 1] == items.len() - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// Smallest `n >= 2` with `(n/p) = -1`.
pub fn least_nonresidue(p: u64) -> Result<u64> {
    let xi = legendre_character(p)?;
    Ok((2..p).find(|&n| xi.evaluate_u64(n) == -1).expect("odd primes have nonresidues"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonresidueRow {
    pub p: u64,
    pub n: u64,
    /// `log n / log p`
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonresidueScan {
    pub rows: Vec<NonresidueRow>,
    pub max_exponent: f64,
    pub argmax_p: u64,
    /// `1/(4√e)`, for comparison.
    pub barrier: f64,
}

/// Least nonresidue of every odd prime `p <= p_max`.
pub fn nonresidue_scan(p_max: u64) -> Result<NonresidueScan> {
    let mut rows = Vec::new();
    for p in arith::sieve_primes(p_max).into_iter().skip(1) {
        let n = least_nonresidue(p)?;
        rows.push(NonresidueRow {
            p,
            n,
            exponent: (n as f64).ln() / (p as f64).ln(),
        });
    }
    let (max_exponent, argmax_p) = rows
        .iter()
        .fold((0.0, 0), |acc, r| if r.exponent > acc.0 { (r.exponent, r.p) } else { acc });
    Ok(NonresidueScan {
        rows,
        max_exponent,
        argmax_p,
        barrier: nonresidue_exponent_barrier(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurgessRecord {
    pub theta: f64,
    pub t: f64,
    pub s: i64,
    /// `|S_ξ(t)| / t`
    pub ratio: f64,
}

/// `S_ξ(p^θ)` for each `θ` in `(0, 1]`; `spf` must cover `p^θ` for the largest `θ`.
pub fn burgess_scan(p: u64, thetas: &[f64], spf: &SpfTable) -> Result<Vec<BurgessRecord>> {
    let xi = legendre_character(p)?;
    if xi.parity() != Parity::Odd {
        return Err(Error::WrongParity {
            modulus: p,
            expected: "odd",
            found: xi.parity().as_str(),
        });
    }
    if thetas.is_empty() {
        return Err(Error::InvalidArgument("at least one theta is required".into()));
    }
    if let Some(bad) = thetas.iter().find(|&&th| !(th > 0.0 && th <= 1.0)) {
        return Err(Error::InvalidArgument(format!("theta {bad} outside (0, 1]")));
    }
    let ts: Vec<f64> = thetas.iter().map(|&th| (p as f64).powf(th)).collect();
    let top = ts.iter().fold(0.0f64, |a, &b| a.max(b)).floor() as u64;
    let values = xi.values_from_one(top.max(1), spf)?;
    let mut prefix = Vec::with_capacity(values.len());
    let mut running = 0i64;
    for &v in &values {
        running += v as i64;
        prefix.push(running);
    }
    Ok(thetas
        .iter()
        .zip(&ts)
        .map(|(&theta, &t)| {
            let s = prefix[t.floor() as usize];
            BurgessRecord {
                theta,
                t,
                s,
                ratio: s.unsigned_abs() as f64 / t,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_spf;

    #[test]
    fn choose_ell_examples() {
        assert_eq!(choose_ell(1.0), Ok(3));
        assert_eq!(choose_ell(0.1), Ok(23));
        assert_eq!(choose_ell(0.5), Ok(7));
        assert!(choose_ell(0.0).is_err());
        assert!(choose_ell(-1.0).is_err());
    }

    #[test]
    fn lemma_bg_rejects_bad_inputs() {
        let spf = build_spf(1000).unwrap();
        let x3 = legendre_character(3).unwrap();
        let x5 = legendre_character(5).unwrap();
        assert_eq!(
            verify_lemma_bg(&x3, &x3, &spf).unwrap_err(),
            Error::ModuliNotCoprime(3, 3)
        );
        assert!(matches!(
            verify_lemma_bg(&x3, &x5, &spf),
            Err(Error::WrongParity { modulus: 5, .. })
        ));
    }

    #[test]
    fn lemma_bg_swap_keeps_lhs() {
        let spf = build_spf(1000).unwrap();
        let a = legendre_character(3).unwrap();
        let b = legendre_character(7).unwrap();
        let ab = verify_lemma_bg(&a, &b, &spf).unwrap();
        let ba = verify_lemma_bg(&b, &a, &spf).unwrap();
        assert_eq!(ab.lhs, ba.lhs);
        assert_ne!(ab.rhs_main, ba.rhs_main);
        assert_eq!(ab.q, 21);
        assert!((ab.gap - (ab.lhs - ab.rhs_main)).abs() < 1e-15);
    }

    #[test]
    fn tiny_pipeline_case() {
        // t_p = √3: M = 1, L = 1/log √3, 2/δ = log √3 < 3 but ℓ = 3 = p is skipped
        let spf = build_spf(1000).unwrap();
        let r = theorem_a_pipeline(3, 0.5, 0.5, &spf).unwrap();
        assert!((r.t_p - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.mean_xi, 1.0 / 3f64.sqrt());
        assert!((r.log_mean_xi - 1.0 / 3f64.sqrt().ln()).abs() < 1e-12);
        assert_eq!(r.ell, 7);
        assert_eq!(r.q, 21);
        assert!(r.flags.iter().any(|f| f == FLAG_ELL_SKIPPED));
        assert!(r.flags.iter().any(|f| f == FLAG_BELOW_MIN_X));
        assert!(r.hypothesis_met);
        assert_eq!(r.product.parity(), Parity::Even);
        assert!((r.chain_lines[0].value - r.restricted_sum).abs() <= 1e-9);
    }

    #[test]
    fn pipeline_rejects_even_xi() {
        let spf = build_spf(1000).unwrap();
        assert!(matches!(
            theorem_a_pipeline(5, 0.3, 0.1, &spf),
            Err(Error::WrongParity { modulus: 5, .. })
        ));
        assert!(theorem_a_pipeline(7, 0.0, 0.1, &spf).is_err());
        assert!(theorem_a_pipeline(7, 0.3, 1.5, &spf).is_err());
        assert!(matches!(
            theorem_a_pipeline(10007, 0.3, 0.1, &spf),
            Err(Error::TableTooSmall { .. })
        ));
    }

    #[test]
    fn means_report_for_one() {
        let f = CompletelyMultiplicativeFunction::constant_one(1000).unwrap();
        let r = lemma_b_report(&f, 1000.0).unwrap();
        assert_eq!(r.mean, 1.0);
        assert_eq!(r.u, 0.0);
        assert_eq!(r.gs_bound, 1000f64.ln());
        assert_eq!(r.ht_envelope, 1.0);
        assert!(!r.below_min_x);
        assert!(lemma_b_report(&f, 50.0).unwrap().below_min_x);
    }

    #[test]
    fn delta_with_c_one_is_log_mean_of_one() {
        let est = estimate_delta(1.0, 1000.0, 20, 7).unwrap();
        let one = CompletelyMultiplicativeFunction::constant_one(1000).unwrap();
        assert_eq!(est.qualifying, 1);
        assert_eq!(est.worst_f.as_deref(), Some("one"));
        assert_eq!(est.delta_hat, Some(sums::log_mean(&one, 1000.0).unwrap()));
    }

    #[test]
    fn delta_is_seed_deterministic() {
        let a = estimate_delta(0.5, 500.0, 50, 42).unwrap();
        let b = estimate_delta(0.5, 500.0, 50, 42).unwrap();
        assert_eq!(a, b);
        assert!(estimate_delta(0.0, 500.0, 5, 1).is_err());
    }

    #[test]
    fn subsets_enumerated() {
        let s = subsets_up_to(&FLIP_CANDIDATES, 2);
        assert_eq!(s.len(), 1 + 8 + 28);
        assert_eq!(s[1], vec![2]);
        assert_eq!(s.last().unwrap(), &vec![17, 19]);
        assert_eq!(subsets_up_to(&FLIP_CANDIDATES, 8).len(), 256);
    }

    #[test]
    fn counterexample_thresholds() {
        assert!(counterexample_search(100.0, 1, 0.0).unwrap().is_empty());
        assert!(counterexample_search(99.0, 1, 0.5).is_err());
        assert!(counterexample_search(100.0, 9, 0.5).is_err());
        for r in counterexample_search(1000.0, 1, 1.0).unwrap() {
            assert!(r.log_mean_at_n.abs() < r.mean_at_n.abs());
        }
    }

    #[test]
    fn nonresidue_examples() {
        assert_eq!(least_nonresidue(3), Ok(2));
        assert_eq!(least_nonresidue(7), Ok(3));
        assert_eq!(least_nonresidue(71), Ok(7));
        assert_eq!(least_nonresidue(4), Err(Error::NotOddPrime(4)));
        let scan = nonresidue_scan(1000).unwrap();
        assert_eq!(scan.rows.len(), 167);
        assert!((scan.barrier - 0.151_632).abs() < 1e-6);
    }

    #[test]
    fn burgess_examples() {
        let spf = build_spf(10_000).unwrap();
        let rows = burgess_scan(7919, &[0.25, 0.5, 1.0], &spf).unwrap();
        assert_eq!(rows[2].s, 0);
        assert_eq!(rows[2].ratio, 0.0);
        for r in &rows {
            assert!(r.ratio <= 1.0);
            assert_eq!(r.s, partial_sum(&legendre_character(7919).unwrap(), r.t).unwrap());
        }
        assert!(burgess_scan(7919, &[], &spf).is_err());
        assert!(burgess_scan(7919, &[0.0], &spf).is_err());
        assert!(burgess_scan(13, &[0.5], &spf).is_err());
    }
}
