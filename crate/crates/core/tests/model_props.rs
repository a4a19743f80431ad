//! Property tests for instance construction.

mod common;

use fifogap::{build_instance, BlockParams, Transaction};
use proptest::prelude::*;

fn tx_strategy() -> impl Strategy<Value = Transaction> {
    (0.0f64..50.0, 1.0f64..3.0).prop_map(|(q, a)| Transaction::new(q, a))
}

proptest! {
    #[test]
    fn built_instances_satisfy_all_invariants(
        txs in prop::collection::vec(tx_strategy(), 0..40),
        gas_price in 0.0f64..10.0,
        gas_limit in 0.1f64..100.0,
    ) {
        let params = BlockParams::new(gas_limit, gas_price, 1.0, 3.0).unwrap();
        let inst = build_instance(&txs, params).unwrap();

        prop_assert_eq!(inst.net_utilities().len(), inst.gas().len());
        prop_assert!(inst.net_utilities().iter().all(|&q| q >= 0.0 && q.is_finite()));
        prop_assert!(inst.gas().iter().all(|&a| (1.0..=3.0).contains(&a)));
        prop_assert!(inst.len() <= txs.len());
    }

    #[test]
    fn survivors_keep_arrival_order(
        txs in prop::collection::vec(tx_strategy(), 0..40),
        gas_price in 0.0f64..10.0,
    ) {
        let params = BlockParams::new(10.0, gas_price, 1.0, 3.0).unwrap();
        let inst = build_instance(&txs, params).unwrap();

        // The surviving (utility, gas) pairs must be the subsequence of
        // inputs with nonnegative net utility, in input order.
        let expected: Vec<(f64, f64)> = txs
            .iter()
            .filter_map(|tx| {
                let net = tx.gross_utility - gas_price * tx.gas;
                (net >= 0.0).then_some((net, tx.gas))
            })
            .collect();
        let actual: Vec<(f64, f64)> = inst
            .net_utilities()
            .iter()
            .cloned()
            .zip(inst.gas().iter().cloned())
            .collect();
        prop_assert_eq!(actual, expected);
    }
}
