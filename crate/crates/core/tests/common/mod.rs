//! Shared oracles for the integration suites: exhaustive reference
//! solvers and seeded instance generators. Everything here is
//! independent of the library's solver paths.

#![allow(dead_code)]

use fifogap::{BlockParams, ProblemInstance, UtilityDistribution};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GAS_LO: f64 = 1.0;
pub const GAS_HI: f64 = 3.0;

pub fn all_distributions() -> Vec<UtilityDistribution> {
    vec![
        UtilityDistribution::exponential(2.5).unwrap(),
        UtilityDistribution::log_normal(1.0, 1.0).unwrap(),
        UtilityDistribution::rayleigh(1.0).unwrap(),
        UtilityDistribution::levy(0.0, 1.0).unwrap(),
        UtilityDistribution::pareto(0.5).unwrap(),
    ]
}

/// Exhaustive optimum of the 0-1 problem over all 2^n inclusion
/// vectors, by depth-first enumeration. Utility sums accumulate in
/// ascending index order.
pub fn brute_force_exact(inst: &ProblemInstance) -> f64 {
    fn visit(q: &[f64], a: &[f64], i: usize, value: f64, capacity: f64, best: &mut f64) {
        if i == q.len() {
            if value > *best {
                *best = value;
            }
            return;
        }
        if a[i] <= capacity {
            visit(q, a, i + 1, value + q[i], capacity - a[i], best);
        }
        visit(q, a, i + 1, value, capacity, best);
    }
    let mut best = 0.0;
    visit(
        inst.net_utilities(),
        inst.gas(),
        0,
        0.0,
        inst.gas_limit(),
        &mut best,
    );
    best
}

/// Exhaustive optimum of the interval relaxation: every subset of fully
/// included transactions combined with every choice of a single
/// fractional index. Quadratic in 2^n, so keep instances small.
pub fn brute_force_relaxation(inst: &ProblemInstance) -> f64 {
    let n = inst.len();
    assert!(n <= 16, "relaxation oracle is exponential");
    let q = inst.net_utilities();
    let a = inst.gas();
    let b = inst.gas_limit();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << n) {
        let mut gas = 0.0;
        let mut value = 0.0;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                gas += a[i];
                value += q[i];
            }
        }
        if gas > b {
            continue;
        }
        best = best.max(value);
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let frac = ((b - gas) / a[j]).min(1.0);
                best = best.max(value + frac * q[j]);
            }
        }
    }
    best
}

/// Best feasible arrival-order prefix value, computed directly.
pub fn prefix_pack_value(q: &[f64], a: &[f64], b: f64) -> f64 {
    let mut best = 0.0f64;
    let mut gas = 0.0;
    let mut value = 0.0;
    for i in 0..q.len() {
        gas += a[i];
        if gas > b {
            break;
        }
        value += q[i];
        best = best.max(value);
    }
    best
}

/// Exact expected FIFO value over all n! arrival orders, by Heap's
/// permutation enumeration. Only sensible for n <= 8.
pub fn exhaustive_fifo_mean(inst: &ProblemInstance) -> f64 {
    let n = inst.len();
    assert!(n <= 8, "permutation oracle is factorial");
    let b = inst.gas_limit();
    let mut q: Vec<f64> = inst.net_utilities().to_vec();
    let mut a: Vec<f64> = inst.gas().to_vec();

    let mut total = 0.0;
    let mut count = 0u64;
    let mut counters = vec![0usize; n];
    total += prefix_pack_value(&q, &a, b);
    count += 1;
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            let swap = if i % 2 == 0 { 0 } else { counters[i] };
            q.swap(swap, i);
            a.swap(swap, i);
            total += prefix_pack_value(&q, &a, b);
            count += 1;
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    total / count as f64
}

/// One seeded random instance: utilities from the given distribution,
/// gas uniform on `[GAS_LO, GAS_HI]`, and a gas limit spanning from
/// heavily constrained (~5% of total gas) to unconstrained (~130%).
pub fn random_instance(
    dist: &UtilityDistribution,
    max_n: usize,
    rng: &mut ChaCha8Rng,
) -> ProblemInstance {
    let n = rng.random_range(1..=max_n);
    let utilities = dist.sample(n, rng);
    let gas = fifogap::sample_gas(GAS_LO, GAS_HI, n, rng).unwrap();
    let total: f64 = gas.iter().sum();
    let b = total * (0.05 + 1.25 * rng.random::<f64>());
    let params = BlockParams::new(b, 0.0, GAS_LO, GAS_HI).unwrap();
    ProblemInstance::new(utilities, gas, params).unwrap()
}

/// Instance generator with randomized gas bounds as well, exercising
/// `eta > 1` regimes for the gap-bound algebra.
pub fn random_instance_any_bounds(max_n: usize, rng: &mut ChaCha8Rng) -> ProblemInstance {
    let dists = all_distributions();
    let dist = dists[rng.random_range(0..dists.len())];
    let n = rng.random_range(1..=max_n);
    let lo = rng.random_range(0.5..2.0);
    let hi = lo * rng.random_range(1.0..4.0);
    let utilities = dist.sample(n, rng);
    let gas = fifogap::sample_gas(lo, hi, n, rng).unwrap();
    let total: f64 = gas.iter().sum();
    let b = total * (0.05 + 1.25 * rng.random::<f64>());
    let params = BlockParams::new(b, 0.0, lo, hi).unwrap();
    ProblemInstance::new(utilities, gas, params).unwrap()
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Relative closeness check used throughout the suites.
pub fn within_relative(actual: f64, reference: f64, tol: f64) -> bool {
    (actual - reference).abs() <= tol * (1.0 + reference.abs())
}
