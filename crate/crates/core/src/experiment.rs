//! Monte Carlo harness: generates mempools from a utility distribution,
//! packs each one with every procedure, sweeps block sizes, and emits
//! per-trial records as CSV.
//!
//! Every trial is a pure function of the configuration: sub-seeds are
//! derived by mixing the master seed with the distribution family,
//! block-size index, and trial index, so trials can run in parallel and
//! still reproduce bit-identical output in deterministic order.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::compute_gap_bounds;
use crate::dists::{sample_gas, DistError, UtilityDistribution};
use crate::model::{build_instance, BlockParams, ModelError, ProblemInstance, Transaction};
use crate::packing::{exact_pack, fifo_pack, greedy_pack, permute, solve_relaxation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("n_transactions must be at least 1")]
    NoTransactions,
    #[error("trials_per_size must be at least 1")]
    NoTrials,
    #[error("block_sizes must be nonempty and positive, got {0:?}")]
    BadBlockSizes(Vec<f64>),
    #[error("block size index {index} out of range ({count} sizes)")]
    BlockIndexOutOfRange { index: usize, count: usize },
    #[error("cannot aggregate an empty record list")]
    EmptyAggregation,
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Block sizes used by the reference experiment, spanning roughly 10
/// transactions per block up to the whole mempool.
pub const DEFAULT_BLOCK_SIZES: [f64; 7] = [20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0];

/// Configuration of one experiment sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub distribution: UtilityDistribution,
    /// Mempool size per trial.
    pub n_transactions: usize,
    /// Transaction gas is uniform on `[gas_lo, gas_hi]`.
    pub gas_lo: f64,
    pub gas_hi: f64,
    /// Per-unit gas price subtracted from gross utilities.
    pub gas_price: f64,
    pub block_sizes: Vec<f64>,
    pub trials_per_size: usize,
    pub master_seed: u64,
    /// Run the exact solver only when the instance has at most this
    /// many transactions.
    pub exact_solver_limit: usize,
    /// When set, all trials of a block size share one sampled mempool
    /// and differ only in arrival order.
    pub fixed_mempool: bool,
}

impl ExperimentConfig {
    /// Reference configuration: 1000 transactions, gas uniform on
    /// `[1, 3]`, block sizes from 20 to 2000, 100 trials per size.
    pub fn reference(distribution: UtilityDistribution, master_seed: u64) -> Self {
        Self {
            distribution,
            n_transactions: 1000,
            gas_lo: 1.0,
            gas_hi: 3.0,
            gas_price: 0.0,
            block_sizes: DEFAULT_BLOCK_SIZES.to_vec(),
            trials_per_size: 100,
            master_seed,
            exact_solver_limit: crate::packing::DEFAULT_EXACT_LIMIT,
            fixed_mempool: false,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.n_transactions == 0 {
            return Err(ExperimentError::NoTransactions);
        }
        if self.trials_per_size == 0 {
            return Err(ExperimentError::NoTrials);
        }
        if self.block_sizes.is_empty()
            || self
                .block_sizes
                .iter()
                .any(|&b| !b.is_finite() || b <= 0.0)
        {
            return Err(ExperimentError::BadBlockSizes(self.block_sizes.clone()));
        }
        if !self.gas_lo.is_finite()
            || !self.gas_hi.is_finite()
            || self.gas_lo <= 0.0
            || self.gas_hi < self.gas_lo
        {
            return Err(ModelError::InvalidGasBounds {
                lo: self.gas_lo,
                hi: self.gas_hi,
            }
            .into());
        }
        if !self.gas_price.is_finite() || self.gas_price < 0.0 {
            return Err(ModelError::InvalidGasPrice(self.gas_price).into());
        }
        Ok(())
    }
}

/// One (distribution, block size, trial) result row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub distribution: String,
    pub block_size: f64,
    pub trial: usize,
    pub sub_seed: u64,
    /// Effective mempool size after dropping negative-net transactions.
    pub n: usize,
    /// Greedy-rounded objective.
    pub p0: f64,
    /// Relaxation objective.
    pub r_star: f64,
    /// Best-prefix (FIFO) objective.
    pub p_fifo: f64,
    /// Exact optimum, present only when the exact solver ran.
    pub p_star: Option<f64>,
    /// Transactions fully included by the greedy packing.
    pub k_bar: usize,
    /// Certificate divisor: largest integer with all gas at most
    /// `block_size / m`.
    pub m: Option<u64>,
    /// Analytic gap lower bound `L - U`.
    pub gap_lower: f64,
    /// `p0 / p_fifo`; `None` when FIFO packs nothing.
    pub ratio_lb: Option<f64>,
    /// `r_star / p_fifo`; `None` when FIFO packs nothing.
    pub ratio_ub: Option<f64>,
    /// Analytic ratio bound `L / U`; `None` when `U` is zero.
    pub bound_ratio: Option<f64>,
    pub condition_holds: bool,
}

/// Avalanche mixer (splitmix64 finalizer): every input bit affects
/// every output bit.
fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent 64-bit seed from a master seed and a tuple of
/// stream coordinates, by folding each coordinate through the avalanche
/// mixer.
pub fn derive_seed(master_seed: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix64(master_seed);
    for &part in parts {
        state = splitmix64(state ^ part);
    }
    state
}

fn trial_seed(cfg: &ExperimentConfig, block_index: usize, trial: usize) -> u64 {
    derive_seed(
        cfg.master_seed,
        &[
            cfg.distribution.kind_id(),
            block_index as u64,
            trial as u64,
        ],
    )
}

const SAMPLE_STREAM: u64 = 0;
const ARRIVAL_STREAM: u64 = 1;

fn relative_slack(x: f64) -> f64 {
    1e-9 * (1.0 + x.abs())
}

/// Reconstructs the (already permuted) problem instance a trial
/// operates on, together with the trial's sub-seed. Pure function of
/// the configuration and coordinates.
pub fn trial_instance(
    cfg: &ExperimentConfig,
    block_index: usize,
    trial: usize,
) -> Result<(u64, ProblemInstance), ExperimentError> {
    cfg.validate()?;
    if block_index >= cfg.block_sizes.len() {
        return Err(ExperimentError::BlockIndexOutOfRange {
            index: block_index,
            count: cfg.block_sizes.len(),
        });
    }
    let block_size = cfg.block_sizes[block_index];
    let sub_seed = trial_seed(cfg, block_index, trial);
    let sample_trial = if cfg.fixed_mempool { 0 } else { trial };
    let sample_seed = derive_seed(
        trial_seed(cfg, block_index, sample_trial),
        &[SAMPLE_STREAM],
    );
    let arrival_seed = derive_seed(sub_seed, &[ARRIVAL_STREAM]);

    let mut sample_rng = ChaCha8Rng::seed_from_u64(sample_seed);
    let utilities = cfg.distribution.sample(cfg.n_transactions, &mut sample_rng);
    let gas = sample_gas(cfg.gas_lo, cfg.gas_hi, cfg.n_transactions, &mut sample_rng)?;
    let txs: Vec<Transaction> = utilities
        .iter()
        .zip(&gas)
        .map(|(&q, &a)| Transaction::new(q, a))
        .collect();
    let params = BlockParams::new(block_size, cfg.gas_price, cfg.gas_lo, cfg.gas_hi)?;
    let instance = build_instance(&txs, params)?;

    let mut arrival_rng = ChaCha8Rng::seed_from_u64(arrival_seed);
    Ok((sub_seed, permute(&instance, &mut arrival_rng)))
}

/// Runs a single trial: sample a mempool, apply a fresh uniform arrival
/// permutation, pack it with every procedure, and compute the gap
/// bounds. The exact solver runs only when the instance is within
/// `exact_solver_limit`.
pub fn run_trial(
    cfg: &ExperimentConfig,
    block_index: usize,
    trial: usize,
) -> Result<TrialRecord, ExperimentError> {
    let (sub_seed, instance) = trial_instance(cfg, block_index, trial)?;
    let block_size = cfg.block_sizes[block_index];

    let relax = solve_relaxation(&instance);
    let (greedy, cert) = greedy_pack(&instance);
    let fifo = fifo_pack(&instance);
    let exact = if instance.len() <= cfg.exact_solver_limit {
        Some(exact_pack(&instance, cfg.exact_solver_limit).expect("within solver limit"))
    } else {
        None
    };

    let p0 = greedy.objective;
    let r_star = relax.objective;
    let p_fifo = fifo.objective;
    let p_star = exact.as_ref().map(|p| p.objective);

    // Ordering invariants are structural; a violation means a solver
    // bug, not bad data.
    assert!(
        p0 <= r_star + relative_slack(r_star),
        "greedy objective {p0} exceeds relaxation {r_star}"
    );
    assert!(
        p_fifo <= r_star + relative_slack(r_star),
        "FIFO objective {p_fifo} exceeds relaxation {r_star}"
    );
    if let Some(p_star) = p_star {
        assert!(
            p0 <= p_star + relative_slack(p_star) && p_star <= r_star + relative_slack(r_star),
            "exact objective {p_star} outside greedy/relaxation bracket [{p0}, {r_star}]"
        );
        assert!(
            p_fifo <= p_star + relative_slack(p_star),
            "FIFO objective {p_fifo} exceeds exact optimum {p_star}"
        );
    }

    let (gap_lower, bound_ratio, condition_holds, k_bar) = if instance.is_empty() {
        (0.0, None, false, 0)
    } else {
        let gb = compute_gap_bounds(&instance, &greedy).expect("nonempty instance");
        (gb.gap_lower, gb.ratio_bound, gb.condition_holds, gb.k_bar)
    };

    let ratio = |num: f64| if p_fifo > 0.0 { Some(num / p_fifo) } else { None };
    Ok(TrialRecord {
        distribution: cfg.distribution.to_string(),
        block_size,
        trial,
        sub_seed,
        n: instance.len(),
        p0,
        r_star,
        p_fifo,
        p_star,
        k_bar,
        m: cert.m,
        gap_lower,
        ratio_lb: ratio(p0),
        ratio_ub: ratio(r_star),
        bound_ratio,
        condition_holds,
    })
}

/// Runs the full cross product of block sizes and trials. Trials
/// execute in parallel but the returned records are always ordered by
/// (block size index, trial index).
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>, ExperimentError> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.block_sizes.len())
        .flat_map(|bi| (0..cfg.trials_per_size).map(move |t| (bi, t)))
        .collect();
    jobs.par_iter()
        .map(|&(block_index, trial)| run_trial(cfg, block_index, trial))
        .collect()
}

/// Mean and sample standard deviation of the defined values of one
/// statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStat {
    pub mean: f64,
    pub std_dev: f64,
    /// Number of defined samples the mean is over.
    pub count: usize,
}

fn summarize(values: &[f64]) -> Option<SummaryStat> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std_dev = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Some(SummaryStat {
        mean,
        std_dev,
        count: values.len(),
    })
}

/// Per-(distribution, block size) aggregate of trial records.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSummary {
    pub distribution: String,
    pub block_size: f64,
    /// Total records aggregated.
    pub trials: usize,
    /// Records whose FIFO packing was empty, making the realized ratios
    /// undefined; excluded from the ratio means.
    pub undefined_ratios: usize,
    pub ratio_lb: Option<SummaryStat>,
    pub ratio_ub: Option<SummaryStat>,
    pub bound_ratio: Option<SummaryStat>,
    pub gap_lower: Option<SummaryStat>,
}

/// Aggregates records per (distribution, block size), preserving first
/// appearance order.
pub fn aggregate(records: &[TrialRecord]) -> Result<Vec<BlockSummary>, ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::EmptyAggregation);
    }
    let mut keys: Vec<(String, u64)> = Vec::new();
    for r in records {
        let key = (r.distribution.clone(), r.block_size.to_bits());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let summaries = keys
        .into_iter()
        .map(|(dist, bits)| {
            let block_size = f64::from_bits(bits);
            let group: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.distribution == dist && r.block_size.to_bits() == bits)
                .collect();
            let defined = |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> Vec<f64> {
                group.iter().filter_map(|r| f(r)).collect()
            };
            BlockSummary {
                trials: group.len(),
                undefined_ratios: group.iter().filter(|r| r.ratio_lb.is_none()).count(),
                ratio_lb: summarize(&defined(&|r| r.ratio_lb)),
                ratio_ub: summarize(&defined(&|r| r.ratio_ub)),
                bound_ratio: summarize(&defined(&|r| r.bound_ratio)),
                gap_lower: summarize(&defined(&|r| Some(r.gap_lower))),
                distribution: dist,
                block_size,
            }
        })
        .collect();
    Ok(summaries)
}

/// CSV header, fixed column order.
pub const CSV_HEADER: &str = "distribution,block_size,trial,sub_seed,n,p0,r_star,p_fifo,p_star,k_bar,m,gap_lower,ratio_lb,ratio_ub,bound_ratio,condition_holds";

/// Formats a float with 17 significant digits, enough to round-trip
/// exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

// Distribution labels like `lognormal(1,1)` contain commas and must be
// quoted.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes records as UTF-8 CSV with a header row. Missing values
/// serialize as empty fields. Output bytes are a pure function of the
/// records.
pub fn write_csv<W: Write>(records: &[TrialRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&r.distribution),
            format_float(r.block_size),
            r.trial,
            r.sub_seed,
            r.n,
            format_float(r.p0),
            format_float(r.r_star),
            format_float(r.p_fifo),
            format_opt(r.p_star),
            r.k_bar,
            r.m.map(|m| m.to_string()).unwrap_or_default(),
            format_float(r.gap_lower),
            format_opt(r.ratio_lb),
            format_opt(r.ratio_ub),
            format_opt(r.bound_ratio),
            r.condition_holds,
        )?;
    }
    Ok(())
}
