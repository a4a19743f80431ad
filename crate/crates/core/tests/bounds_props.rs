//! Properties of the analytic gap bounds.

mod common;

use common::*;
use fifogap::packing::DEFAULT_EXACT_LIMIT;
use fifogap::{compute_gap_bounds, exact_pack, fifo_pack, greedy_pack};

#[test]
fn gap_condition_is_equivalent_to_bound_ordering() {
    let mut rng = seeded_rng(0xA11CE);
    for _ in 0..2000 {
        let inst = random_instance_any_bounds(50, &mut rng);
        let (greedy, _) = greedy_pack(&inst);
        let gb = compute_gap_bounds(&inst, &greedy).unwrap();
        assert_eq!(
            gb.condition_holds,
            gb.optimal_lower_bound > gb.fifo_upper_bound,
            "condition verdict disagrees with L > U: {gb:?}"
        );
    }
}

#[test]
fn realized_gap_is_never_negative() {
    let mut rng = seeded_rng(0xD0C);
    let dists = all_distributions();
    for round in 0..300 {
        let inst = random_instance(&dists[round % dists.len()], 16, &mut rng);
        let exact = exact_pack(&inst, DEFAULT_EXACT_LIMIT).unwrap();
        let fifo = fifo_pack(&inst);
        assert!(
            exact.objective >= fifo.objective - 1e-12 * (1.0 + exact.objective.abs()),
            "FIFO exceeded the optimum: {} > {}",
            fifo.objective,
            exact.objective
        );
    }
}

#[test]
fn exhaustive_mean_equals_bound_on_uniform_pairs_example() {
    // Two high-utility and two low-utility transactions of unit gas in
    // a two-slot block: every arrival order packs exactly two, so the
    // exact mean over all 24 orders is 2 * mean(q) = 11, which is also
    // the analytic bound.
    let params = fifogap::BlockParams::new(2.0, 0.0, 1.0, 1.0).unwrap();
    let inst = fifogap::ProblemInstance::new(
        vec![10.0, 10.0, 1.0, 1.0],
        vec![1.0, 1.0, 1.0, 1.0],
        params,
    )
    .unwrap();
    let (greedy, _) = greedy_pack(&inst);
    let gb = compute_gap_bounds(&inst, &greedy).unwrap();
    let mean = exhaustive_fifo_mean(&inst);
    assert_eq!(mean, 11.0);
    assert_eq!(gb.fifo_upper_bound, 11.0);
    assert!(mean <= gb.fifo_upper_bound);
}

#[test]
fn exhaustive_permutation_mean_respects_upper_bound() {
    let mut rng = seeded_rng(0xFACADE);
    for _ in 0..250 {
        let inst = random_instance_any_bounds(8, &mut rng);
        let (greedy, _) = greedy_pack(&inst);
        let gb = compute_gap_bounds(&inst, &greedy).unwrap();
        let mean = exhaustive_fifo_mean(&inst);
        assert!(
            mean <= gb.fifo_upper_bound,
            "exact mean FIFO value {} exceeds bound {}",
            mean,
            gb.fifo_upper_bound
        );
    }
}

#[test]
fn ratio_bound_matches_mean_utility_form() {
    let mut rng = seeded_rng(0xBEAD);
    for _ in 0..2000 {
        let inst = random_instance_any_bounds(40, &mut rng);
        let (greedy, _) = greedy_pack(&inst);
        let gb = compute_gap_bounds(&inst, &greedy).unwrap();
        let Some(ratio) = gb.ratio_bound else {
            continue;
        };
        let k_frac = gb.k_bar as f64 / inst.len() as f64;
        let reference =
            (gb.q_plus / gb.eta) / ((gb.q_plus - gb.q_minus) * k_frac + gb.q_minus);
        assert!(
            within_relative(ratio, reference, 1e-12),
            "ratio bound {ratio} vs mean-utility form {reference}"
        );
    }
}

#[test]
fn condition_implies_ratio_above_one() {
    let mut rng = seeded_rng(0x90210);
    for _ in 0..2000 {
        let inst = random_instance_any_bounds(40, &mut rng);
        let (greedy, _) = greedy_pack(&inst);
        let gb = compute_gap_bounds(&inst, &greedy).unwrap();
        if gb.condition_holds {
            if let Some(ratio) = gb.ratio_bound {
                assert!(ratio > 1.0, "certified gap but ratio bound {ratio} <= 1");
            }
        }
    }
}
