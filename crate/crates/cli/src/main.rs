//! `charscan`: scans and audits of quadratic character sums.
//!
//! Exit codes: 0 success, 2 argument error, 3 precondition or hypothesis
//! error, 4 I/O error.

mod cache;
mod emit;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use charscan_core::arith::{self, build_spf};
use charscan_core::experiments::{self, WitnessReport};
use charscan_core::sums::{self, CompletelyMultiplicativeFunction, Constants};
use charscan_core::{legendre_character, product_character, Error};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use cache::ScanRecord;
use emit::Format;

#[derive(Debug, Parser)]
#[command(name = "charscan", version, about = "Quadratic character sum scans and audits")]
struct Cli {
    /// Output path (cache file for pv-scan, report file for thm-a, data file otherwise)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for scans
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1024))]
    workers: u64,

    /// Largest conductor a command may build tables for
    #[arg(long, global = true, default_value_t = 100_000_000, value_parser = clap::value_parser!(u64).range(2..=u32::MAX as u64))]
    limit: u64,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Recompute conductors already present in the cache
    #[arg(long, global = true)]
    force: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FunctionKind {
    One,
    Liouville,
    Random,
    Legendre,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximum character sums over a range of prime (or product) conductors
    PvScan {
        #[arg(long)]
        p_min: u64,
        #[arg(long)]
        p_max: u64,
        /// Keep only primes congruent to this value mod 4 (1 or 3)
        #[arg(long)]
        residue_class: Option<u64>,
        /// Scan products ξ_p · (·/ell) instead of Legendre characters
        #[arg(long)]
        ell: Option<u64>,
    },
    /// S_ξ(p^θ) for a list of exponents θ
    BurgessScan {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        thetas: Vec<f64>,
    },
    /// Mean-value report for one function at one x
    Means {
        #[arg(long)]
        x: f64,
        #[arg(long, value_enum, default_value_t = FunctionKind::Liouville)]
        function: FunctionKind,
        /// Modulus for --function legendre
        #[arg(long)]
        p: Option<u64>,
    },
    /// Empirical δ(c): least logarithmic mean among sampled f with |M_f(x)| >= c
    LemmaB {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Run the even-character construction for one prime p ≡ 3 (mod 4)
    ThmA {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        c: f64,
    },
    /// Least quadratic nonresidue of every odd prime up to --pmax
    Nonresidue {
        #[arg(long)]
        pmax: u64,
    },
    /// Points where the logarithmic mean of a perturbed Liouville function is smaller than its mean
    Counterexample {
        #[arg(long)]
        x_max: f64,
        #[arg(long, default_value_t = 2)]
        flip_budget: usize,
        #[arg(long, default_value_t = 1.0)]
        threshold: f64,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Precondition(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "argument error: {m}"),
            CliError::Precondition(m) => write!(f, "precondition failed: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::WrongParity { .. } => CliError::Precondition(format!("parity hypothesis violated: {e}")),
            Error::ModuliNotCoprime(..) => CliError::Precondition(format!("coprimality hypothesis violated: {e}")),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("charscan: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::PvScan {
            p_min,
            p_max,
            residue_class,
            ell,
        } => pv_scan(cli, *p_min, *p_max, *residue_class, *ell),
        Command::BurgessScan { p, thetas } => burgess(cli, *p, thetas),
        Command::Means { x, function, p } => means(cli, *x, *function, *p),
        Command::LemmaB { c, x, trials } => lemma_b(cli, *c, *x, *trials),
        Command::ThmA { p, epsilon, c } => thm_a(cli, *p, *epsilon, *c),
        Command::Nonresidue { pmax } => nonresidue(cli, *pmax),
        Command::Counterexample {
            x_max,
            flip_budget,
            threshold,
        } => counterexample(cli, *x_max, *flip_budget, *threshold),
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn check_x(name: &str, x: f64, min: f64) -> CliResult<()> {
    if x.is_finite() && x >= min {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must be a finite number >= {min}, got {x}")))
    }
}

fn check_unit(name: &str, v: f64, closed_top: bool) -> CliResult<()> {
    let ok = v > 0.0 && (v < 1.0 || closed_top && v == 1.0);
    if ok {
        Ok(())
    } else {
        let range = if closed_top { "(0, 1]" } else { "(0, 1)" };
        Err(CliError::Usage(format!("--{name} must lie in {range}, got {v}")))
    }
}

fn check_capacity(cli: &Cli, needed: u64) -> CliResult<()> {
    if needed > cli.limit {
        Err(CliError::Precondition(format!(
            "capacity exceeded: conductor {needed} is above --limit {}",
            cli.limit
        )))
    } else {
        Ok(())
    }
}

fn pool(cli: &Cli) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers as usize)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start workers: {e}")))
}

#[derive(Debug, Serialize)]
struct PvSummary {
    records_in_range: usize,
    new_records: usize,
    skipped: usize,
    max_ratio_log: Option<f64>,
    max_ratio_log_conductor: Option<u64>,
    max_ratio_loglog: Option<f64>,
    max_ratio_loglog_conductor: Option<u64>,
    c_odd: f64,
    c_even: f64,
}

fn pv_scan(cli: &Cli, p_min: u64, p_max: u64, residue_class: Option<u64>, ell: Option<u64>) -> CliResult<()> {
    if p_min > p_max {
        return Err(CliError::Usage(format!("--p-min {p_min} exceeds --p-max {p_max}")));
    }
    if let Some(r) = residue_class {
        if r != 1 && r != 3 {
            return Err(CliError::Usage(format!("--residue-class must be 1 or 3, got {r}")));
        }
    }
    let psi = ell.map(legendre_character).transpose()?;
    let family = if psi.is_some() { "product" } else { "legendre" };

    let primes: Vec<u64> = arith::sieve_primes(p_max)
        .into_iter()
        .filter(|&p| p >= p_min && p % 2 == 1)
        .filter(|&p| residue_class.map_or(true, |r| p % 4 == r))
        .filter(|&p| Some(p) != ell)
        .collect();
    let conductor = |p: u64| p * ell.unwrap_or(1);
    let top = primes.last().map_or(2, |&p| conductor(p));
    check_capacity(cli, top)?;

    let path = cache::cache_path(cli.out.as_deref());
    let _lock = cache::CacheLock::acquire(&path)?;
    let existing = cache::read_records(&path)?;
    let seen = cache::keys(&existing);
    let todo: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| cli.force || !seen.contains(&(conductor(p), family.to_string())))
        .collect();
    let skipped = primes.len() - todo.len();

    let spf = build_spf(todo.last().map_or(2, |&p| conductor(p)).max(2))?;
    let stamp = now();
    let records: Vec<ScanRecord> = pool(cli)?.install(|| {
        todo.par_iter()
            .map(|&p| -> CliResult<ScanRecord> {
                let xi = legendre_character(p)?;
                let chi = match &psi {
                    Some(psi) => product_character(&xi, psi)?,
                    None => xi,
                };
                let profile = sums::max_partial_sum(&chi, &spf)?;
                let ratios = sums::pv_ratios(&profile)?;
                Ok(ScanRecord {
                    conductor: chi.modulus(),
                    family: family.to_string(),
                    max_abs: profile.max_abs,
                    argmax: profile.argmax,
                    ratio_log: ratios.ratio_log,
                    ratio_loglog: ratios.ratio_loglog,
                    timestamp: stamp,
                })
            })
            .collect::<CliResult<Vec<_>>>()
    })?;

    let fresh = cache::keys(&records);
    let wanted: std::collections::HashSet<(u64, String)> =
        primes.iter().map(|&p| (conductor(p), family.to_string())).collect();
    let mut in_range: Vec<ScanRecord> = existing
        .iter()
        .filter(|r| !fresh.contains(&r.key()) && wanted.contains(&r.key()))
        .cloned()
        .collect();
    in_range.extend(records.iter().cloned());

    if cli.force && !records.is_empty() {
        let mut kept: Vec<ScanRecord> = existing.into_iter().filter(|r| !fresh.contains(&r.key())).collect();
        kept.extend(records.iter().cloned());
        cache::rewrite_records(&path, &kept)?;
    } else {
        cache::append_records(&path, &records)?;
    }

    let best_log = in_range.iter().max_by(|a, b| a.ratio_log.total_cmp(&b.ratio_log));
    let best_loglog = in_range
        .iter()
        .filter_map(|r| r.ratio_loglog.map(|v| (v, r.conductor)))
        .max_by(|a, b| a.0.total_cmp(&b.0));
    let k = Constants::new();
    let summary = PvSummary {
        records_in_range: in_range.len(),
        new_records: records.len(),
        skipped,
        max_ratio_log: best_log.map(|r| r.ratio_log),
        max_ratio_log_conductor: best_log.map(|r| r.conductor),
        max_ratio_loglog: best_loglog.map(|b| b.0),
        max_ratio_loglog_conductor: best_loglog.map(|b| b.1),
        c_odd: k.c_odd,
        c_even: k.c_even,
    };
    emit::write_rows(&[summary], cli.format, None)?;
    Ok(())
}

fn burgess(cli: &Cli, p: u64, thetas: &[f64]) -> CliResult<()> {
    for &th in thetas {
        check_unit("thetas", th, true)?;
    }
    let xi = legendre_character(p)?;
    if xi.parity().sign() != -1 {
        return Err(Error::WrongParity {
            modulus: p,
            expected: "odd",
            found: xi.parity().as_str(),
        }
        .into());
    }
    let top = thetas.iter().map(|&th| (p as f64).powf(th)).fold(2.0, f64::max) as u64;
    check_capacity(cli, top)?;
    let spf = build_spf(top.max(2))?;
    let rows = experiments::burgess_scan(p, thetas, &spf)?;
    emit::write_rows(&rows, cli.format, cli.out.as_deref())?;
    Ok(())
}

fn means(cli: &Cli, x: f64, function: FunctionKind, p: Option<u64>) -> CliResult<()> {
    check_x("x", x, 2.0)?;
    let limit = x.floor() as u64;
    check_capacity(cli, limit)?;
    if function == FunctionKind::Legendre && p.is_none() {
        return Err(CliError::Usage("--function legendre needs --p".into()));
    }
    let spf = build_spf(limit)?;
    let f = match function {
        FunctionKind::One => CompletelyMultiplicativeFunction::from_prime_values(&spf, limit, |_| 1.0)?,
        FunctionKind::Liouville => CompletelyMultiplicativeFunction::from_prime_values(&spf, limit, |_| -1.0)?,
        FunctionKind::Random => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
            CompletelyMultiplicativeFunction::from_prime_values(&spf, limit, |_| rng.gen_range(-1.0..=1.0))?
        }
        FunctionKind::Legendre => {
            let chi = legendre_character(p.unwrap_or_default())?;
            CompletelyMultiplicativeFunction::from_character(&chi, limit, &spf)?
        }
    };
    let report = experiments::lemma_b_report(&f, x)?;
    emit::write_rows(&[report], cli.format, cli.out.as_deref())?;
    Ok(())
}

fn lemma_b(cli: &Cli, c: f64, x: f64, trials: usize) -> CliResult<()> {
    check_unit("c", c, true)?;
    check_x("x", x, 2.0)?;
    check_capacity(cli, x.floor() as u64)?;
    let est = experiments::estimate_delta(c, x, trials, cli.seed)?;
    if est.delta_hat.is_none() {
        eprintln!("lemma-b: no sampled function satisfies |M_f(x)| >= {c}");
    }
    emit::write_rows(&[est], cli.format, cli.out.as_deref())?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct StampedWitness<'a> {
    #[serde(flatten)]
    report: &'a WitnessReport,
    timestamp: u64,
}

fn thm_a(cli: &Cli, p: u64, epsilon: f64, c: f64) -> CliResult<()> {
    check_unit("epsilon", epsilon, false)?;
    check_unit("c", c, true)?;
    if cli.format != Format::Json {
        return Err(CliError::Usage("thm-a writes JSON only".into()));
    }
    let out = cli
        .out
        .as_deref()
        .ok_or_else(|| CliError::Usage("thm-a needs --out PATH for the report".into()))?;
    let plan = experiments::plan_theorem_a(p, epsilon, c)?;
    check_capacity(cli, plan.q)?;
    let spf = build_spf(plan.q)?;
    let report = experiments::theorem_a_pipeline(p, epsilon, c, &spf)?;

    let json = serde_json::to_string_pretty(&StampedWitness {
        report: &report,
        timestamp: now(),
    })
    .map_err(|e| CliError::Io(e.to_string()))?;
    write_file(out, &(json + "\n"))?;
    print!("{}", chain_audit(&report));
    Ok(())
}

fn chain_audit(r: &WitnessReport) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "p = {}, epsilon = {}, c = {}, t_p = {:.6}", r.p, r.epsilon, r.c, r.t_p);
    let _ = writeln!(s, "M_xi(t_p) = {:.6}, L_xi(t_p) = {:.6}, delta = {:.6}", r.mean_xi, r.log_mean_xi, r.delta);
    let _ = writeln!(s, "ell = {}, q = {}, product parity = {}", r.ell, r.q, r.product.parity());
    let _ = writeln!(s, "restricted sum = {:.12}", r.restricted_sum);
    for (i, (line, o)) in r.chain_lines.iter().zip(&r.o_terms).enumerate() {
        let _ = writeln!(s, "  line {}: {:<16} {:>16.12}   (dropped O-term scale {:.3e})", i + 1, line.label, line.value, o.value);
    }
    let _ = writeln!(
        s,
        "lower bound audit: lhs = {:.6}, rhs main term = {:.6}, gap = {:.6}",
        r.lemma_bg_lhs, r.lemma_bg_rhs_main, r.lemma_bg_gap
    );
    let _ = writeln!(s, "max|S_chi| / (sqrt(q) log q) = {:.6}", r.final_ratio);
    let flags = if r.flags.is_empty() { "none".to_string() } else { r.flags.join(", ") };
    let _ = writeln!(s, "flags: {flags}");
    s
}

fn nonresidue(cli: &Cli, pmax: u64) -> CliResult<()> {
    if pmax < 3 {
        return Err(CliError::Usage(format!("--pmax must be >= 3, got {pmax}")));
    }
    check_capacity(cli, pmax)?;
    let scan = experiments::nonresidue_scan(pmax)?;
    eprintln!(
        "nonresidue: {} primes, max log(n_p)/log(p) = {:.6} at p = {} (reference exponent {:.6})",
        scan.rows.len(),
        scan.max_exponent,
        scan.argmax_p,
        scan.barrier
    );
    emit::write_rows(&scan.rows, cli.format, cli.out.as_deref())?;
    Ok(())
}

fn counterexample(cli: &Cli, x_max: f64, flip_budget: usize, threshold: f64) -> CliResult<()> {
    check_x("x-max", x_max, 100.0)?;
    check_capacity(cli, x_max.floor() as u64)?;
    if flip_budget > experiments::FLIP_CANDIDATES.len() {
        return Err(CliError::Usage(format!(
            "--flip-budget must be at most {}",
            experiments::FLIP_CANDIDATES.len()
        )));
    }
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(CliError::Usage(format!("--threshold must be >= 0, got {threshold}")));
    }
    let hits = experiments::counterexample_search(x_max, flip_budget, threshold)?;
    eprintln!("counterexample: {} hits", hits.len());
    match cli.format {
        Format::Json => emit::write_rows(&hits, cli.format, cli.out.as_deref())?,
        Format::Csv => {
            let rows: Vec<emit::CounterexampleRow> = hits.iter().map(Into::into).collect();
            emit::write_rows(&rows, cli.format, cli.out.as_deref())?
        }
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
