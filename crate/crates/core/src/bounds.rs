//! Analytic welfare-gap bounds comparing greedy/optimal packing against
//! FIFO inclusion under random arrival order.
//!
//! The transaction gas bounds imply that at least `b/B+` transactions
//! fit in a full block and at most `b/B-` ever fit. Combining these
//! counts with the mean utility of the greedily included set (`q+`) and
//! of the excluded tail (`q-`) yields:
//!
//! * a lower bound `L = (b/B+) * q+` on the utility of an optimally
//!   packed full block, and
//! * an upper bound `U = (b/B-) * ((k/n) q+ + (1-k/n) q-)` on the
//!   *expected* utility of FIFO inclusion when arrivals are uniformly
//!   permuted.
//!
//! `L > U` certifies a positive expected gap; the strict inequality
//! `q+ (1 - k eta / n) > eta q- (1 - k/n)` (with `eta = B+/B-`) is the
//! same condition rearranged, and `L/U` lower-bounds the ratio of
//! optimal to expected FIFO utility.
//!
//! `U` bounds an expectation over arrival orders, not any single
//! realization, so soundness checks compare it against the Monte Carlo
//! (or exhaustive) mean of FIFO utility rather than per-draw values.

use rand::Rng;
use thiserror::Error;

use crate::model::{Packing, PackingKind, ProblemInstance};
use crate::packing::{fifo_pack, greedy_pack, permute};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("gap bounds require a nonempty instance")]
    EmptyInstance,
    #[error("gap bounds require a greedy-rounded packing, got {0:?}")]
    WrongPackingKind(PackingKind),
    #[error("packing length {packing} does not match instance length {instance}")]
    LengthMismatch { packing: usize, instance: usize },
}

/// Gap bounds for one instance/greedy-packing pair.
#[derive(Debug, Clone, PartialEq)]
pub struct GapBounds {
    /// Number of transactions fully included by the greedy packing.
    pub k_bar: usize,
    /// Mean net utility of the greedily included transactions (0 when
    /// none are included).
    pub q_plus: f64,
    /// Mean net utility of the excluded tail (0 when everything is
    /// included).
    pub q_minus: f64,
    /// Configured ratio of largest to smallest transaction gas,
    /// `B+/B-`.
    pub eta: f64,
    /// Analytic lower bound on optimal block utility,
    /// `(gas_limit / B+) * q_plus`.
    pub optimal_lower_bound: f64,
    /// Total utility actually packed by the greedy heuristic; equals
    /// the greedy objective exactly.
    pub greedy_total: f64,
    /// Analytic upper bound on expected FIFO utility under uniformly
    /// random arrival order.
    pub fifo_upper_bound: f64,
    /// `optimal_lower_bound - fifo_upper_bound`; positive iff the gap
    /// condition holds.
    pub gap_lower: f64,
    /// Verdict of the positive-gap condition
    /// `q+ (1 - k eta / n) > eta q- (1 - k/n)`.
    pub condition_holds: bool,
    /// `optimal_lower_bound / fifo_upper_bound`, a lower bound on the
    /// optimal-to-FIFO utility ratio. `None` when the upper bound is
    /// zero.
    pub ratio_bound: Option<f64>,
    /// Smallest gas actually present in the sample (diagnostic; the
    /// bounds use the configured `B-`/`B+`).
    pub realized_min_gas: f64,
    /// Largest gas actually present in the sample.
    pub realized_max_gas: f64,
}

/// Computes the analytic gap bounds for an instance from its greedy
/// packing.
pub fn compute_gap_bounds(inst: &ProblemInstance, greedy: &Packing) -> Result<GapBounds, BoundsError> {
    let n = inst.len();
    if n == 0 {
        return Err(BoundsError::EmptyInstance);
    }
    if greedy.kind != PackingKind::GreedyRounded {
        return Err(BoundsError::WrongPackingKind(greedy.kind));
    }
    if greedy.included.len() != n {
        return Err(BoundsError::LengthMismatch {
            packing: greedy.included.len(),
            instance: n,
        });
    }

    let q = inst.net_utilities();
    let k_bar = greedy.included_count();
    // Folds from +0.0 so the empty side of the split stays positive
    // zero; the included fold also matches the greedy objective's
    // summation order exactly.
    let included_total: f64 = q
        .iter()
        .zip(&greedy.included)
        .filter(|(_, &inc)| inc)
        .fold(0.0, |acc, (qi, _)| acc + qi);
    let excluded_total: f64 = q
        .iter()
        .zip(&greedy.included)
        .filter(|(_, &inc)| !inc)
        .fold(0.0, |acc, (qi, _)| acc + qi);
    let q_plus = if k_bar == 0 {
        0.0
    } else {
        included_total / k_bar as f64
    };
    let q_minus = if k_bar == n {
        0.0
    } else {
        excluded_total / (n - k_bar) as f64
    };

    let params = inst.params();
    let eta = params.gas_ratio();
    let b = params.gas_limit;
    let k_frac = k_bar as f64 / n as f64;
    let optimal_lower_bound = b / params.max_tx_gas * q_plus;
    let fifo_upper_bound = b / params.min_tx_gas * (k_frac * q_plus + (1.0 - k_frac) * q_minus);
    let condition_holds =
        q_plus * (1.0 - k_frac * eta) > eta * q_minus * (1.0 - k_frac);
    let ratio_bound = if fifo_upper_bound > 0.0 {
        Some(optimal_lower_bound / fifo_upper_bound)
    } else {
        None
    };

    let realized_min_gas = inst.gas().iter().cloned().fold(f64::INFINITY, f64::min);
    let realized_max_gas = inst.gas().iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    Ok(GapBounds {
        k_bar,
        q_plus,
        q_minus,
        eta,
        optimal_lower_bound,
        greedy_total: included_total,
        fifo_upper_bound,
        gap_lower: optimal_lower_bound - fifo_upper_bound,
        condition_holds,
        ratio_bound,
        realized_min_gas,
        realized_max_gas,
    })
}

/// Monte Carlo soundness check of the FIFO upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SoundnessReport {
    pub bounds: GapBounds,
    pub num_permutations: usize,
    /// Sample mean of FIFO utility over uniformly permuted arrivals.
    pub fifo_mean: f64,
    /// Standard error of the mean (0 when fewer than two samples).
    pub fifo_std_err: f64,
    /// Whether `fifo_mean - 3 * fifo_std_err <= fifo_upper_bound`.
    pub fifo_within_bound: bool,
    /// Greedy objective, for comparison against `greedy_total`.
    pub greedy_objective: f64,
    /// Whether the greedy objective is at least the greedy total (these
    /// are equal by construction).
    pub greedy_at_least_total: bool,
}

/// Estimates the expected FIFO utility over uniform arrival
/// permutations and reports whether it is consistent with the analytic
/// upper bound (to within three standard errors), and whether the
/// greedy objective attains its own lower bound.
pub fn check_gap_soundness<R: Rng + ?Sized>(
    inst: &ProblemInstance,
    num_permutations: usize,
    rng: &mut R,
) -> Result<SoundnessReport, BoundsError> {
    if inst.is_empty() {
        return Err(BoundsError::EmptyInstance);
    }
    let (greedy, _) = greedy_pack(inst);
    let bounds = compute_gap_bounds(inst, &greedy)?;

    let samples: Vec<f64> = (0..num_permutations)
        .map(|_| fifo_pack(&permute(inst, rng)).objective)
        .collect();
    let count = samples.len().max(1) as f64;
    let fifo_mean = samples.iter().sum::<f64>() / count;
    let fifo_std_err = if samples.len() < 2 {
        0.0
    } else {
        let var = samples
            .iter()
            .map(|s| (s - fifo_mean).powi(2))
            .sum::<f64>()
            / (count - 1.0);
        (var / count).sqrt()
    };

    Ok(SoundnessReport {
        fifo_within_bound: fifo_mean - 3.0 * fifo_std_err <= bounds.fifo_upper_bound,
        greedy_objective: greedy.objective,
        greedy_at_least_total: greedy.objective >= bounds.greedy_total,
        bounds,
        num_permutations,
        fifo_mean,
        fifo_std_err,
    })
}
