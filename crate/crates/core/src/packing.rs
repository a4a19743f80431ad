//! Packing procedures for the block building problem: the interval
//! relaxation in closed form, greedy rounding with its approximation
//! certificate, exact branch-and-bound, and arrival-order (FIFO) prefix
//! packing.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::model::{Packing, PackingKind, ProblemInstance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PackingError {
    #[error("exact solver limited to {limit} transactions, instance has {n}")]
    InstanceTooLarge { n: usize, limit: usize },
}

/// Default size cap for [`exact_pack`]; beyond this the caller should
/// fall back on the greedy bracket.
pub const DEFAULT_EXACT_LIMIT: usize = 30;

/// Relative tolerance used when pruning branch-and-bound nodes against
/// the incumbent, so rounding noise cannot discard a true optimum.
const PRUNE_RELATIVE_TOL: f64 = 1e-9;

/// Solution of the interval relaxation of the packing problem.
///
/// The inclusion vector is fractional in at most one entry; every other
/// entry is exactly 0 or 1, and the packed gas equals
/// `min(gas_limit, total gas)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationSolution {
    /// Relaxed inclusion values in `[0, 1]`, aligned with instance
    /// indices.
    pub x: Vec<f64>,
    /// Objective value of the relaxed problem (an upper bound on the
    /// exact optimum).
    pub objective: f64,
    /// Welfare per unit resource, `gas_limit * utility / gas`, aligned
    /// with instance indices.
    pub efficiencies: Vec<f64>,
    /// Instance indices sorted by nonincreasing efficiency; ties broken
    /// by ascending index.
    pub sort_order: Vec<usize>,
}

impl RelaxationSolution {
    /// The single fractional entry `(index, value)` if one exists.
    pub fn fractional_entry(&self) -> Option<(usize, f64)> {
        self.x
            .iter()
            .enumerate()
            .find(|(_, &v)| v > 0.0 && v < 1.0)
            .map(|(i, &v)| (i, v))
    }

    /// Gas consumed by the relaxed solution, including the fractional
    /// share.
    pub fn gas_used(&self, inst: &ProblemInstance) -> f64 {
        self.x
            .iter()
            .zip(inst.gas())
            .fold(0.0, |acc, (xi, ai)| acc + xi * ai)
    }

    /// Views the relaxed solution as a [`Packing`] of kind
    /// [`PackingKind::RelaxationFractional`].
    pub fn to_packing(&self, inst: &ProblemInstance) -> Packing {
        let frac = self.fractional_entry();
        Packing {
            included: self.x.iter().map(|&v| v == 1.0).collect(),
            objective: self.objective,
            gas_used: self.gas_used(inst),
            kind: PackingKind::RelaxationFractional,
            fractional_index: frac.map(|(i, _)| i),
            fractional_value: frac.map(|(_, v)| v),
        }
    }
}

/// Approximation certificate attached to a greedy packing.
///
/// `m` is the largest integer such that every transaction consumes gas
/// at most `gas_limit / m` (`None` for an empty instance). When
/// `m >= 2` the exact optimum is at most `m/(m-1)` times the greedy
/// objective; otherwise the certificate is inapplicable and
/// `upper_bound` is infinite, so callers fall back on the relaxation
/// objective.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxCertificate {
    pub m: Option<u64>,
    /// Objective of the greedy-rounded packing.
    pub p0: f64,
    /// Certified upper bound on the exact optimum: `m/(m-1) * p0` when
    /// `m >= 2`, `0` for an empty instance, infinite otherwise.
    pub upper_bound: f64,
}

fn efficiency_order(efficiencies: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..efficiencies.len()).collect();
    order.sort_by(|&i, &j| {
        efficiencies[j]
            .partial_cmp(&efficiencies[i])
            .expect("efficiencies are finite")
            .then(i.cmp(&j))
    });
    order
}

// Folds from +0.0: the std empty sum is -0.0, which would leak a "-0"
// into reports and CSV output.
fn dot_selected(values: &[f64], included: &[bool]) -> f64 {
    values
        .iter()
        .zip(included)
        .filter(|(_, &inc)| inc)
        .fold(0.0, |acc, (v, _)| acc + v)
}

/// Solves the interval relaxation in closed form: fill transactions in
/// nonincreasing efficiency order until the gas budget is met, giving
/// the boundary transaction the largest fractional share that lands on
/// the budget exactly. If everything fits, everything is included.
pub fn solve_relaxation(inst: &ProblemInstance) -> RelaxationSolution {
    let n = inst.len();
    let b = inst.gas_limit();
    let q = inst.net_utilities();
    let a = inst.gas();

    let efficiencies: Vec<f64> = q.iter().zip(a).map(|(qi, ai)| b * qi / ai).collect();
    let sort_order = efficiency_order(&efficiencies);

    let mut x = vec![0.0; n];
    let mut remaining = b;
    for &i in &sort_order {
        if remaining <= 0.0 {
            break;
        }
        if a[i] <= remaining {
            x[i] = 1.0;
            remaining -= a[i];
        } else {
            x[i] = remaining / a[i];
            break;
        }
    }
    let objective = x.iter().zip(q).fold(0.0, |acc, (xi, qi)| acc + xi * qi);
    RelaxationSolution {
        x,
        objective,
        efficiencies,
        sort_order,
    }
}

/// Rounds the relaxation's fractional entry down to zero, producing a
/// feasible packing together with its approximation certificate.
pub fn greedy_pack(inst: &ProblemInstance) -> (Packing, ApproxCertificate) {
    let relax = solve_relaxation(inst);
    let included: Vec<bool> = relax.x.iter().map(|&v| v == 1.0).collect();
    let objective = dot_selected(inst.net_utilities(), &included);
    let gas_used = dot_selected(inst.gas(), &included);

    let m = inst
        .gas()
        .iter()
        .cloned()
        .reduce(f64::max)
        .map(|max_gas| (inst.gas_limit() / max_gas).floor() as u64);
    let upper_bound = match m {
        None => 0.0,
        Some(m) if m >= 2 => m as f64 / (m as f64 - 1.0) * objective,
        Some(_) => f64::INFINITY,
    };

    (
        Packing {
            included,
            objective,
            gas_used,
            kind: PackingKind::GreedyRounded,
            fractional_index: None,
            fractional_value: None,
        },
        ApproxCertificate {
            m,
            p0: objective,
            upper_bound,
        },
    )
}

/// Best feasible arrival-order prefix: the maximum over k of the total
/// utility of the first k transactions whose total gas fits the limit.
pub fn fifo_pack(inst: &ProblemInstance) -> Packing {
    let b = inst.gas_limit();
    let mut best_k = 0usize;
    let mut best_utility = 0.0;
    let mut utility = 0.0;
    let mut gas = 0.0;
    for (k, (&qi, &ai)) in inst.net_utilities().iter().zip(inst.gas()).enumerate() {
        gas += ai;
        if gas > b {
            break;
        }
        utility += qi;
        if utility > best_utility {
            best_utility = utility;
            best_k = k + 1;
        }
    }
    let included: Vec<bool> = (0..inst.len()).map(|i| i < best_k).collect();
    let gas_used = dot_selected(inst.gas(), &included);
    let objective = dot_selected(inst.net_utilities(), &included);
    Packing {
        included,
        objective,
        gas_used,
        kind: PackingKind::Fifo,
        fractional_index: None,
        fractional_value: None,
    }
}

struct BranchState<'a> {
    utilities: &'a [f64],
    gas: &'a [f64],
    best_objective: f64,
    best_choice: Vec<bool>,
    choice: Vec<bool>,
}

impl BranchState<'_> {
    fn prune_tol(&self) -> f64 {
        PRUNE_RELATIVE_TOL * (1.0 + self.best_objective.abs())
    }

    /// Relaxation bound of the subproblem on items `depth..`, which are
    /// already in nonincreasing efficiency order.
    fn suffix_bound(&self, depth: usize, capacity: f64) -> f64 {
        let mut bound = 0.0;
        let mut remaining = capacity;
        for i in depth..self.gas.len() {
            if remaining <= 0.0 {
                break;
            }
            if self.gas[i] <= remaining {
                bound += self.utilities[i];
                remaining -= self.gas[i];
            } else {
                bound += self.utilities[i] * remaining / self.gas[i];
                break;
            }
        }
        bound
    }

    fn search(&mut self, depth: usize, value: f64, capacity: f64) {
        if depth == self.gas.len() {
            if value > self.best_objective {
                self.best_objective = value;
                self.best_choice.copy_from_slice(&self.choice);
            }
            return;
        }
        if value + self.suffix_bound(depth, capacity) <= self.best_objective + self.prune_tol() {
            return;
        }
        if self.gas[depth] <= capacity {
            self.choice[depth] = true;
            self.search(depth + 1, value + self.utilities[depth], capacity - self.gas[depth]);
            self.choice[depth] = false;
        }
        self.search(depth + 1, value, capacity);
    }
}

/// Exact optimum of the 0-1 packing problem via depth-first
/// branch-and-bound, bounded by the interval relaxation and seeded with
/// the greedy incumbent. Branches in nonincreasing efficiency order.
///
/// Fails with [`PackingError::InstanceTooLarge`] when the instance
/// exceeds `limit_n`, signalling the caller to use the greedy bracket
/// instead.
pub fn exact_pack(inst: &ProblemInstance, limit_n: usize) -> Result<Packing, PackingError> {
    let n = inst.len();
    if n > limit_n {
        return Err(PackingError::InstanceTooLarge { n, limit: limit_n });
    }

    let relax = solve_relaxation(inst);
    let order = &relax.sort_order;
    let utilities: Vec<f64> = order.iter().map(|&i| inst.net_utilities()[i]).collect();
    let gas: Vec<f64> = order.iter().map(|&i| inst.gas()[i]).collect();

    let (greedy, _) = greedy_pack(inst);
    let mut state = BranchState {
        utilities: &utilities,
        gas: &gas,
        best_objective: greedy.objective,
        best_choice: order.iter().map(|&i| greedy.included[i]).collect(),
        choice: vec![false; n],
    };
    state.search(0, 0.0, inst.gas_limit());

    let mut included = vec![false; n];
    for (sorted_pos, &original) in order.iter().enumerate() {
        included[original] = state.best_choice[sorted_pos];
    }
    let objective = dot_selected(inst.net_utilities(), &included);
    let gas_used = dot_selected(inst.gas(), &included);
    Ok(Packing {
        included,
        objective,
        gas_used,
        kind: PackingKind::Exact,
        fractional_index: None,
        fractional_value: None,
    })
}

/// Returns a copy of the instance with utilities and gas jointly
/// reordered by a uniform random permutation from the given stream.
pub fn permute<R: Rng + ?Sized>(inst: &ProblemInstance, rng: &mut R) -> ProblemInstance {
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.shuffle(rng);
    let q = order.iter().map(|&i| inst.net_utilities()[i]).collect();
    let a = order.iter().map(|&i| inst.gas()[i]).collect();
    ProblemInstance::new(q, a, *inst.params()).expect("permutation preserves instance validity")
}
