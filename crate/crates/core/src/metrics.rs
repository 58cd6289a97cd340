//! Error characterization of approximate operators against exact oracles.
//!
//! Inputs are tuples of unsigned operands described by a [`Domain`].
//! [`evaluate`] either enumerates the whole domain or draws a seeded
//! Monte Carlo sample, and reduces the error distances into an
//! [`ErrorReport`].
//!
//! Work is split into fixed blocks of [`BLOCK_SIZE`] trials. Each Monte
//! Carlo block owns its own ChaCha8 stream (`stream = block index`), and
//! block partials are combined in block order, so a report is
//! bit-identical for any number of worker threads.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chains::mask;
use crate::error::{Error, Result};

pub const BLOCK_SIZE: u64 = 4096;
pub const MAX_EXHAUSTIVE_LOG2: u32 = 26;
pub const RNG_ALGORITHM: &str = "chacha8-seed_from_u64/stream-per-4096-block";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exhaustive,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exhaustive => "exhaustive",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exhaustive" => Ok(Method::Exhaustive),
            "monte-carlo" | "monte_carlo" | "mc" => Ok(Method::MonteCarlo),
            _ => Err(format!("unknown method `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub method: Method,
    /// Ignored for exhaustive plans.
    pub trials: u64,
    pub seed: u64,
    /// Result width `N`; NMED is normalized by `2^N - 1`.
    pub width: u32,
    /// Measure `ed` as the signed residue of `approx - exact` modulo
    /// `2^N`, for operators whose results wrap (two's-complement
    /// subtraction). The sample's `approx` is lifted to `exact + ed`.
    #[serde(default)]
    pub modular_ed: bool,
}

impl TrialPlan {
    pub fn exhaustive(width: u32) -> Self {
        TrialPlan { method: Method::Exhaustive, trials: 0, seed: 0, width, modular_ed: false }
    }

    /// Monte Carlo with the default `2^(N+1)` trials.
    pub fn monte_carlo(width: u32, seed: u64) -> Self {
        TrialPlan {
            method: Method::MonteCarlo,
            trials: Self::default_trials(width),
            seed,
            width,
            modular_ed: false,
        }
    }

    pub fn with_modular_ed(mut self, modular: bool) -> Self {
        self.modular_ed = modular;
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn default_trials(width: u32) -> u64 {
        1u64.checked_shl(width + 1).unwrap_or(u64::MAX)
    }
}

/// Operand widths of an operator's input tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    widths: Vec<u32>,
}

impl Domain {
    pub fn new(widths: Vec<u32>) -> Result<Self> {
        if widths.is_empty() {
            return Err(Error::Config("domain needs at least one operand".into()));
        }
        if let Some(&w) = widths.iter().find(|&&w| w == 0 || w > 64) {
            return Err(Error::InvalidWidth(w));
        }
        Ok(Domain { widths })
    }

    pub fn widths(&self) -> &[u32] {
        &self.widths
    }

    pub fn arity(&self) -> usize {
        self.widths.len()
    }

    /// log2 of the number of distinct input tuples.
    pub fn log2_size(&self) -> u32 {
        self.widths.iter().sum()
    }

    /// Tuple at position `index` of the exhaustive order. The first
    /// operand is the most significant digit.
    pub fn decode(&self, mut index: u64, out: &mut [u64]) {
        for (slot, &w) in out.iter_mut().zip(&self.widths).rev() {
            *slot = index & mask(w);
            index = index.checked_shr(w).unwrap_or(0);
        }
    }

    pub fn sample(&self, rng: &mut impl RngCore, out: &mut [u64]) {
        for (slot, &w) in out.iter_mut().zip(&self.widths) {
            *slot = rng.next_u64() & mask(w);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub exact: i128,
    pub approx: i128,
    pub ed: i128,
}

impl ErrorSample {
    pub fn new(exact: i128, approx: i128) -> Self {
        ErrorSample { exact, approx, ed: approx - exact }
    }

    /// Sample whose distance is the residue of `approx - exact` modulo
    /// `2^bits`, taken in `[-2^(bits-1), 2^(bits-1))`.
    pub fn modular(exact: i128, approx: i128, bits: u32) -> Self {
        let modulus = 1i128 << bits;
        let mut ed = (approx - exact).rem_euclid(modulus);
        if ed >= modulus / 2 {
            ed -= modulus;
        }
        ErrorSample { exact, approx: exact + ed, ed }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    n: u64,
    errors: u64,
    sum_ed: i128,
    sum_abs: u128,
    sum_sq: u128,
    max_abs: u128,
    sum_rel: f64,
}

impl Accumulator {
    fn push(&mut self, s: &ErrorSample) {
        let abs = s.ed.unsigned_abs();
        self.n += 1;
        self.errors += (s.ed != 0) as u64;
        self.sum_ed += s.ed;
        self.sum_abs += abs;
        self.sum_sq += abs * abs;
        self.max_abs = self.max_abs.max(abs);
        self.sum_rel += abs as f64 / s.exact.unsigned_abs().max(1) as f64;
    }

    fn merge(mut self, o: &Accumulator) -> Self {
        self.n += o.n;
        self.errors += o.errors;
        self.sum_ed += o.sum_ed;
        self.sum_abs += o.sum_abs;
        self.sum_sq += o.sum_sq;
        self.max_abs = self.max_abs.max(o.max_abs);
        self.sum_rel += o.sum_rel;
        self
    }

    fn report(&self, plan: &TrialPlan) -> ErrorReport {
        let n = self.n.max(1) as f64;
        let med = self.sum_abs as f64 / n;
        ErrorReport {
            width: plan.width,
            method: plan.method,
            seed: (plan.method == Method::MonteCarlo).then_some(plan.seed),
            n_samples: self.n,
            mse: self.sum_sq as f64 / n,
            mean_signed_error: self.sum_ed as f64 / n,
            med,
            nmed: med / mask(plan.width) as f64,
            mred: self.sum_rel / n,
            error_rate: self.errors as f64 / n,
            max_abs_ed: u64::try_from(self.max_abs).unwrap_or(u64::MAX),
            rng: (plan.method == Method::MonteCarlo).then(|| RNG_ALGORITHM.to_string()),
        }
    }
}

/// Aggregate error statistics. `ed = approx - exact`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub width: u32,
    pub method: Method,
    pub seed: Option<u64>,
    pub n_samples: u64,
    /// Mean of `ed^2`.
    pub mse: f64,
    /// Mean of `ed`; negative for underestimating operators.
    pub mean_signed_error: f64,
    /// Mean of `|ed|`.
    pub med: f64,
    /// `med / (2^N - 1)`.
    pub nmed: f64,
    /// Mean of `|ed| / max(|exact|, 1)`.
    pub mred: f64,
    pub error_rate: f64,
    pub max_abs_ed: u64,
    /// Generator identifier for Monte Carlo runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
}

impl ErrorReport {
    pub const CSV_COLUMNS: [&'static str; 11] = [
        "width",
        "method",
        "seed",
        "n_samples",
        "mse",
        "mean_signed_error",
        "med",
        "nmed",
        "mred",
        "error_rate",
        "max_abs_ed",
    ];

    /// Fields in [`Self::CSV_COLUMNS`] order. An absent seed is empty.
    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.width.to_string(),
            self.method.to_string(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.n_samples.to_string(),
            self.mse.to_string(),
            self.mean_signed_error.to_string(),
            self.med.to_string(),
            self.nmed.to_string(),
            self.mred.to_string(),
            self.error_rate.to_string(),
            self.max_abs_ed.to_string(),
        ]
    }

    /// Report over stored samples, reduced in the same block order as
    /// [`evaluate`] so the two agree bit for bit.
    pub fn from_samples(samples: &[ErrorSample], plan: &TrialPlan) -> Self {
        samples
            .chunks(BLOCK_SIZE as usize)
            .map(|chunk| {
                chunk.iter().fold(Accumulator::default(), |mut acc, s| {
                    acc.push(s);
                    acc
                })
            })
            .fold(Accumulator::default(), |a, b| a.merge(&b))
            .report(plan)
    }

    /// Estimated standard error of `med` (sample standard deviation of
    /// `|ed|` over `sqrt(n)`).
    pub fn med_standard_error(&self) -> f64 {
        let n = self.n_samples as f64;
        if n < 2.0 {
            return 0.0;
        }
        let var = (self.mse - self.med * self.med).max(0.0) * n / (n - 1.0);
        (var / n).sqrt()
    }
}

fn block_count(plan: &TrialPlan, domain: &Domain) -> Result<(u64, u64)> {
    match plan.method {
        Method::Exhaustive => {
            let log2 = domain.log2_size();
            if log2 > MAX_EXHAUSTIVE_LOG2 {
                return Err(Error::DomainTooLarge { log2_size: log2 });
            }
            let total = 1u64 << log2;
            Ok((total, total.div_ceil(BLOCK_SIZE)))
        }
        Method::MonteCarlo => {
            if plan.trials == 0 {
                return Err(Error::Config("Monte Carlo needs at least one trial".into()));
            }
            Ok((plan.trials, plan.trials.div_ceil(BLOCK_SIZE)))
        }
    }
}

fn run_block<Op, Or>(
    op: &Op,
    oracle: &Or,
    domain: &Domain,
    plan: &TrialPlan,
    total: u64,
    block: u64,
    mut sink: impl FnMut(ErrorSample),
) -> Result<()>
where
    Op: Fn(&[u64]) -> Result<i128>,
    Or: Fn(&[u64]) -> Result<i128>,
{
    let start = block * BLOCK_SIZE;
    let end = (start + BLOCK_SIZE).min(total);
    let mut inputs = vec![0u64; domain.arity()];
    let mut rng = (plan.method == Method::MonteCarlo).then(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
        rng.set_stream(block);
        rng
    });
    for index in start..end {
        match rng.as_mut() {
            Some(rng) => domain.sample(rng, &mut inputs),
            None => domain.decode(index, &mut inputs),
        }
        let (exact, approx) = (oracle(&inputs)?, op(&inputs)?);
        sink(if plan.modular_ed {
            ErrorSample::modular(exact, approx, plan.width)
        } else {
            ErrorSample::new(exact, approx)
        });
    }
    Ok(())
}

/// Characterizes `op` against `oracle` over `domain` per `plan`, using
/// the global rayon pool.
pub fn evaluate<Op, Or>(op: Op, oracle: Or, domain: &Domain, plan: &TrialPlan) -> Result<ErrorReport>
where
    Op: Fn(&[u64]) -> Result<i128> + Sync,
    Or: Fn(&[u64]) -> Result<i128> + Sync,
{
    let (total, blocks) = block_count(plan, domain)?;
    let partials = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut acc = Accumulator::default();
            run_block(&op, &oracle, domain, plan, total, block, |s| acc.push(&s))?;
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let acc = partials.iter().fold(Accumulator::default(), |a, b| a.merge(b));
    Ok(acc.report(plan))
}

/// [`evaluate`] on a dedicated pool of `workers` threads.
pub fn evaluate_with_workers<Op, Or>(
    op: Op,
    oracle: Or,
    domain: &Domain,
    plan: &TrialPlan,
    workers: usize,
) -> Result<ErrorReport>
where
    Op: Fn(&[u64]) -> Result<i128> + Sync + Send,
    Or: Fn(&[u64]) -> Result<i128> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    pool.install(|| evaluate(op, oracle, domain, plan))
}

/// Raw samples in the same order `evaluate` visits them.
pub fn collect_samples<Op, Or>(
    op: Op,
    oracle: Or,
    domain: &Domain,
    plan: &TrialPlan,
) -> Result<Vec<ErrorSample>>
where
    Op: Fn(&[u64]) -> Result<i128>,
    Or: Fn(&[u64]) -> Result<i128>,
{
    let (total, blocks) = block_count(plan, domain)?;
    let mut samples = Vec::with_capacity(total.min(1 << 24) as usize);
    for block in 0..blocks {
        run_block(&op, &oracle, domain, plan, total, block, |s| samples.push(s))?;
    }
    Ok(samples)
}

/// Absolute per-field tolerances for [`compare_reports`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub mse: f64,
    pub mean_signed_error: f64,
    pub med: f64,
    pub nmed: f64,
    pub mred: f64,
    pub error_rate: f64,
    pub max_abs_ed: f64,
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            mse: tol,
            mean_signed_error: tol,
            med: tol,
            nmed: tol,
            mred: tol,
            error_rate: tol,
            max_abs_ed: tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldComparison {
    pub field: String,
    pub left: f64,
    pub right: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    pub fields: Vec<FieldComparison>,
    pub pass: bool,
}

pub fn compare_reports(a: &ErrorReport, b: &ErrorReport, tol: &Tolerances) -> Result<ComparisonVerdict> {
    if a.width != b.width {
        return Err(Error::WidthMismatch { left: a.width, right: b.width });
    }
    let rows = [
        ("mse", a.mse, b.mse, tol.mse),
        ("mean_signed_error", a.mean_signed_error, b.mean_signed_error, tol.mean_signed_error),
        ("med", a.med, b.med, tol.med),
        ("nmed", a.nmed, b.nmed, tol.nmed),
        ("mred", a.mred, b.mred, tol.mred),
        ("error_rate", a.error_rate, b.error_rate, tol.error_rate),
        ("max_abs_ed", a.max_abs_ed as f64, b.max_abs_ed as f64, tol.max_abs_ed),
    ];
    let fields: Vec<_> = rows
        .into_iter()
        .map(|(field, left, right, tolerance)| FieldComparison {
            field: field.to_string(),
            left,
            right,
            tolerance,
            pass: (left - right).abs() <= tolerance,
        })
        .collect();
    let pass = fields.iter().all(|f| f.pass);
    Ok(ComparisonVerdict { fields, pass })
}
