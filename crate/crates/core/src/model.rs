//! Domain types for the block packing problem: transactions, block
//! parameters, problem instances, and packing results.
//!
//! All types are immutable after construction and validate their
//! invariants up front, so downstream algorithms never re-check them.

use thiserror::Error;

/// Validation errors raised while building model types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("transaction {index}: gas {gas} outside configured bounds [{lo}, {hi}]")]
    GasOutOfBounds {
        index: usize,
        gas: f64,
        lo: f64,
        hi: f64,
    },
    #[error("transaction {index}: gas must be positive and finite, got {gas}")]
    InvalidGas { index: usize, gas: f64 },
    #[error("transaction {index}: utility must be nonnegative and finite, got {utility}")]
    InvalidUtility { index: usize, utility: f64 },
    #[error("gas limit must be positive and finite, got {0}")]
    InvalidGasLimit(f64),
    #[error("gas price must be nonnegative and finite, got {0}")]
    InvalidGasPrice(f64),
    #[error("transaction gas bounds must satisfy 0 < min <= max, got [{lo}, {hi}]")]
    InvalidGasBounds { lo: f64, hi: f64 },
    #[error("utility and gas vectors must have equal length ({utilities} vs {gas})")]
    LengthMismatch { utilities: usize, gas: usize },
}

/// One mempool entry: a gross utility (before gas fees) and the gas it
/// consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transaction {
    /// Gross utility in numeraire units. Must be nonnegative.
    pub gross_utility: f64,
    /// Gas consumed. Must be strictly positive.
    pub gas: f64,
}

impl Transaction {
    pub fn new(gross_utility: f64, gas: f64) -> Self {
        Self { gross_utility, gas }
    }
}

/// Per-block parameters: the gas limit, the gas price, and the assumed
/// per-transaction gas bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockParams {
    /// Gas limit per block.
    pub gas_limit: f64,
    /// Price per unit of gas, in the same numeraire as utilities.
    pub gas_price: f64,
    /// Smallest gas any transaction may consume.
    pub min_tx_gas: f64,
    /// Largest gas any transaction may consume.
    pub max_tx_gas: f64,
}

impl BlockParams {
    pub fn new(
        gas_limit: f64,
        gas_price: f64,
        min_tx_gas: f64,
        max_tx_gas: f64,
    ) -> Result<Self, ModelError> {
        let params = Self {
            gas_limit,
            gas_price,
            min_tx_gas,
            max_tx_gas,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.gas_limit.is_finite() || self.gas_limit <= 0.0 {
            return Err(ModelError::InvalidGasLimit(self.gas_limit));
        }
        if !self.gas_price.is_finite() || self.gas_price < 0.0 {
            return Err(ModelError::InvalidGasPrice(self.gas_price));
        }
        if !self.min_tx_gas.is_finite()
            || !self.max_tx_gas.is_finite()
            || self.min_tx_gas <= 0.0
            || self.min_tx_gas > self.max_tx_gas
        {
            return Err(ModelError::InvalidGasBounds {
                lo: self.min_tx_gas,
                hi: self.max_tx_gas,
            });
        }
        Ok(())
    }

    /// Ratio of the largest to the smallest permissible transaction gas.
    pub fn gas_ratio(&self) -> f64 {
        self.max_tx_gas / self.min_tx_gas
    }
}

/// One block building problem: net utilities, gas consumption, and block
/// parameters. Index order is arrival order (index 0 = earliest).
///
/// Fields are private so every instance in circulation satisfies the
/// invariants checked by [`ProblemInstance::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    net_utilities: Vec<f64>,
    gas: Vec<f64>,
    params: BlockParams,
}

impl ProblemInstance {
    /// Builds an instance from already-net utilities, validating that
    /// utilities are nonnegative and every gas value lies within the
    /// configured bounds.
    pub fn new(
        net_utilities: Vec<f64>,
        gas: Vec<f64>,
        params: BlockParams,
    ) -> Result<Self, ModelError> {
        params.validate()?;
        if net_utilities.len() != gas.len() {
            return Err(ModelError::LengthMismatch {
                utilities: net_utilities.len(),
                gas: gas.len(),
            });
        }
        for (i, &q) in net_utilities.iter().enumerate() {
            if !q.is_finite() || q < 0.0 {
                return Err(ModelError::InvalidUtility {
                    index: i,
                    utility: q,
                });
            }
        }
        for (i, &a) in gas.iter().enumerate() {
            if !a.is_finite() || a <= 0.0 {
                return Err(ModelError::InvalidGas { index: i, gas: a });
            }
            if a < params.min_tx_gas || a > params.max_tx_gas {
                return Err(ModelError::GasOutOfBounds {
                    index: i,
                    gas: a,
                    lo: params.min_tx_gas,
                    hi: params.max_tx_gas,
                });
            }
        }
        Ok(Self {
            net_utilities,
            gas,
            params,
        })
    }

    pub fn net_utilities(&self) -> &[f64] {
        &self.net_utilities
    }

    pub fn gas(&self) -> &[f64] {
        &self.gas
    }

    pub fn params(&self) -> &BlockParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.net_utilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.net_utilities.is_empty()
    }

    pub fn gas_limit(&self) -> f64 {
        self.params.gas_limit
    }

    pub fn total_gas(&self) -> f64 {
        self.gas.iter().fold(0.0, |acc, a| acc + a)
    }

    pub fn total_utility(&self) -> f64 {
        self.net_utilities.iter().fold(0.0, |acc, q| acc + q)
    }
}

/// Which procedure produced a packing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PackingKind {
    /// Exact optimum of the 0-1 problem.
    Exact,
    /// Relaxation solution with the fractional entry rounded to zero.
    GreedyRounded,
    /// Best feasible arrival-order prefix.
    Fifo,
    /// Relaxed solution; may carry one fractional entry.
    RelaxationFractional,
}

/// Output of a packing procedure: the inclusion vector, its objective
/// value, and the gas it consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct Packing {
    /// Inclusion decision per transaction, aligned with instance indices.
    pub included: Vec<bool>,
    /// Total net utility of the packing, including any fractional
    /// contribution for [`PackingKind::RelaxationFractional`].
    pub objective: f64,
    /// Total gas consumed, including any fractional contribution.
    pub gas_used: f64,
    pub kind: PackingKind,
    /// Index of the single fractional entry, if any. Only
    /// [`PackingKind::RelaxationFractional`] packings may carry one.
    pub fractional_index: Option<usize>,
    /// Value of the fractional entry, in (0, 1).
    pub fractional_value: Option<f64>,
}

impl Packing {
    /// Number of fully included transactions.
    pub fn included_count(&self) -> usize {
        self.included.iter().filter(|&&x| x).count()
    }
}

/// Builds a [`ProblemInstance`] from raw mempool transactions.
///
/// Net utility is gross utility minus gas fees (`gas_price * gas`).
/// Transactions whose net utility is negative are dropped; the survivors
/// keep their relative arrival order. Zero net utility is kept.
///
/// Fails if any transaction's gas lies outside the configured bounds or
/// if the parameters themselves are invalid.
pub fn build_instance(
    txs: &[Transaction],
    params: BlockParams,
) -> Result<ProblemInstance, ModelError> {
    params.validate()?;
    for (i, tx) in txs.iter().enumerate() {
        if !tx.gas.is_finite() || tx.gas <= 0.0 {
            return Err(ModelError::InvalidGas {
                index: i,
                gas: tx.gas,
            });
        }
        if !tx.gross_utility.is_finite() || tx.gross_utility < 0.0 {
            return Err(ModelError::InvalidUtility {
                index: i,
                utility: tx.gross_utility,
            });
        }
        if tx.gas < params.min_tx_gas || tx.gas > params.max_tx_gas {
            return Err(ModelError::GasOutOfBounds {
                index: i,
                gas: tx.gas,
                lo: params.min_tx_gas,
                hi: params.max_tx_gas,
            });
        }
    }
    let mut net_utilities = Vec::with_capacity(txs.len());
    let mut gas = Vec::with_capacity(txs.len());
    for tx in txs {
        let net = tx.gross_utility - params.gas_price * tx.gas;
        if net < 0.0 {
            continue;
        }
        net_utilities.push(net);
        gas.push(tx.gas);
    }
    ProblemInstance::new(net_utilities, gas, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(b: f64, g: f64, lo: f64, hi: f64) -> BlockParams {
        BlockParams::new(b, g, lo, hi).unwrap()
    }

    #[test]
    fn net_utility_is_gross_minus_fees() {
        let inst = build_instance(&[Transaction::new(5.0, 2.0)], params(10.0, 1.0, 1.0, 3.0))
            .unwrap();
        assert_eq!(inst.net_utilities(), &[3.0]);
        assert_eq!(inst.gas(), &[2.0]);
    }

    #[test]
    fn negative_net_transactions_are_dropped() {
        let inst = build_instance(&[Transaction::new(1.0, 2.0)], params(10.0, 1.0, 1.0, 3.0))
            .unwrap();
        assert!(inst.is_empty());
    }

    #[test]
    fn zero_gas_price_keeps_gross_utilities() {
        let txs = [Transaction::new(4.0, 2.0), Transaction::new(6.0, 3.0)];
        let inst = build_instance(&txs, params(10.0, 0.0, 1.0, 3.0)).unwrap();
        assert_eq!(inst.net_utilities(), &[4.0, 6.0]);
        assert_eq!(inst.gas(), &[2.0, 3.0]);
    }

    #[test]
    fn zero_net_utility_is_kept() {
        let inst = build_instance(&[Transaction::new(2.0, 2.0)], params(10.0, 1.0, 1.0, 3.0))
            .unwrap();
        assert_eq!(inst.net_utilities(), &[0.0]);
    }

    #[test]
    fn gas_outside_bounds_is_rejected() {
        let err = build_instance(&[Transaction::new(5.0, 4.0)], params(10.0, 0.0, 1.0, 3.0))
            .unwrap_err();
        assert!(matches!(err, ModelError::GasOutOfBounds { index: 0, .. }));
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(BlockParams::new(0.0, 0.0, 1.0, 3.0).is_err());
        assert!(BlockParams::new(-1.0, 0.0, 1.0, 3.0).is_err());
        assert!(BlockParams::new(10.0, -0.5, 1.0, 3.0).is_err());
        assert!(BlockParams::new(10.0, 0.0, 0.0, 3.0).is_err());
        assert!(BlockParams::new(10.0, 0.0, 3.0, 1.0).is_err());
    }

    #[test]
    fn instance_rejects_negative_utility_and_length_mismatch() {
        let p = params(10.0, 0.0, 1.0, 3.0);
        assert!(matches!(
            ProblemInstance::new(vec![-1.0], vec![1.0], p),
            Err(ModelError::InvalidUtility { index: 0, .. })
        ));
        assert!(matches!(
            ProblemInstance::new(vec![1.0, 2.0], vec![1.0], p),
            Err(ModelError::LengthMismatch { .. })
        ));
    }
}
