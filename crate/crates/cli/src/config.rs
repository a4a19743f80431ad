//! Flat key-value sweep configuration files.
//!
//! One `key = value` per line; `#` starts a comment. The `distribution`
//! key may repeat to sweep several distributions in one run; all other
//! keys default to the reference experiment when omitted.

use std::path::PathBuf;

use fifogap::{ExperimentConfig, UtilityDistribution};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct CliConfig {
    pub distributions: Vec<UtilityDistribution>,
    pub n_transactions: usize,
    pub gas_lo: f64,
    pub gas_hi: f64,
    pub gas_price: f64,
    pub block_sizes: Vec<f64>,
    pub trials_per_size: usize,
    pub master_seed: u64,
    pub exact_solver_limit: usize,
    pub fixed_mempool: bool,
    pub output: PathBuf,
}

impl CliConfig {
    /// The experiment configuration for one of the configured
    /// distributions.
    pub fn experiment(&self, distribution: UtilityDistribution) -> ExperimentConfig {
        ExperimentConfig {
            distribution,
            n_transactions: self.n_transactions,
            gas_lo: self.gas_lo,
            gas_hi: self.gas_hi,
            gas_price: self.gas_price,
            block_sizes: self.block_sizes.clone(),
            trials_per_size: self.trials_per_size,
            master_seed: self.master_seed,
            exact_solver_limit: self.exact_solver_limit,
            fixed_mempool: self.fixed_mempool,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for &dist in &self.distributions {
            self.experiment(dist)
                .validate()
                .map_err(|e| CliError::input(e.to_string()))?;
        }
        Ok(())
    }
}

fn parse_value<T: std::str::FromStr>(
    value: &str,
    key: &str,
    line_no: usize,
) -> Result<T, CliError> {
    value.trim().parse::<T>().map_err(|_| {
        CliError::input(format!("line {line_no}: invalid value {value:?} for {key}"))
    })
}

pub fn parse_config(text: &str) -> Result<CliConfig, CliError> {
    let reference = ExperimentConfig::reference(
        UtilityDistribution::exponential(1.0).expect("valid placeholder"),
        0,
    );
    let mut cfg = CliConfig {
        distributions: Vec::new(),
        n_transactions: reference.n_transactions,
        gas_lo: reference.gas_lo,
        gas_hi: reference.gas_hi,
        gas_price: reference.gas_price,
        block_sizes: reference.block_sizes,
        trials_per_size: reference.trials_per_size,
        master_seed: reference.master_seed,
        exact_solver_limit: reference.exact_solver_limit,
        fixed_mempool: reference.fixed_mempool,
        output: PathBuf::from("sweep.csv"),
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::input(format!("line {line_no}: expected `key = value`, got {line:?}"))
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "distribution" => cfg.distributions.push(
                value
                    .parse::<UtilityDistribution>()
                    .map_err(|e| CliError::input(format!("line {line_no}: {e}")))?,
            ),
            "n_transactions" => cfg.n_transactions = parse_value(value, key, line_no)?,
            "gas_lo" => cfg.gas_lo = parse_value(value, key, line_no)?,
            "gas_hi" => cfg.gas_hi = parse_value(value, key, line_no)?,
            "gas_price" => cfg.gas_price = parse_value(value, key, line_no)?,
            "block_sizes" => {
                cfg.block_sizes = value
                    .split(',')
                    .filter(|v| !v.trim().is_empty())
                    .map(|v| parse_value(v, key, line_no))
                    .collect::<Result<_, _>>()?;
            }
            "trials_per_size" => cfg.trials_per_size = parse_value(value, key, line_no)?,
            "master_seed" => cfg.master_seed = parse_value(value, key, line_no)?,
            "exact_solver_limit" => cfg.exact_solver_limit = parse_value(value, key, line_no)?,
            "fixed_mempool" => cfg.fixed_mempool = parse_value(value, key, line_no)?,
            "output" => cfg.output = PathBuf::from(value),
            _ => {
                return Err(CliError::input(format!(
                    "line {line_no}: unknown key {key:?}"
                )))
            }
        }
    }

    if cfg.distributions.is_empty() {
        return Err(CliError::input(
            "config must name at least one `distribution = name(params)`",
        ));
    }
    cfg.validate()?;
    Ok(cfg)
}
