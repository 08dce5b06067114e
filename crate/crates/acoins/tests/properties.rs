//! Property tests for the structural invariants.

use proptest::prelude::*;

use acoins::discrete::{zero_one_cost, zero_one_cost_factored};
use acoins::simple::{sequence_cost, sequence_cost_rate_form};
use acoins::{DiscreteCoin, Penalty, SimpleCoin, ZeroOneInstance};

fn arb_coin() -> impl Strategy<Value = SimpleCoin> {
    (0.001f64..=1.0, 0.0f64..8.0)
        .prop_map(|(p, fee)| SimpleCoin::new("c", p, fee).unwrap())
}

fn arb_penalty() -> impl Strategy<Value = Penalty> {
    (0.001f64..40.0).prop_map(|e| Penalty::new(e).unwrap())
}

fn arb_menu() -> impl Strategy<Value = DiscreteCoin> {
    proptest::collection::vec((0.01f64..=1.0, 0.0f64..6.0), 1..10).prop_filter_map(
        "distinct probabilities",
        |entries| {
            let mut sorted = entries;
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            sorted.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-9);
            DiscreteCoin::new("d", &sorted).ok()
        },
    )
}

proptest! {
    #[test]
    fn cost_plus_benefit_equals_penalty(c in arb_coin(), e in arb_penalty()) {
        let residual = c.expected_cost(e) + c.benefit(e) - e.value();
        prop_assert!(residual.abs() <= 1e-12 * e.value().max(1.0));
    }

    #[test]
    fn pruning_is_idempotent(menu in arb_menu()) {
        let once = menu.prune_to_efficient();
        let twice = once.prune_to_efficient();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn pruned_menus_have_increasing_rates_and_slopes(menu in arb_menu()) {
        let pruned = menu.prune_to_efficient();
        let kept = pruned.entries();
        prop_assert!(!kept.is_empty());
        for pair in kept.windows(2) {
            prop_assert!(pair[0].rate() < pair[1].rate());
        }
        for triple in kept.windows(3) {
            let s01 = (triple[1].fee() - triple[0].fee()) / (triple[1].p() - triple[0].p());
            let s12 = (triple[2].fee() - triple[1].fee()) / (triple[2].p() - triple[1].p());
            prop_assert!(s01 < s12);
        }
    }

    #[test]
    fn pruning_preserves_game_value(menu in arb_menu(), e in arb_penalty()) {
        let pruned = menu.prune_to_efficient();
        let raw = menu.cost(e).0;
        let kept = pruned.cost(e).0;
        let raw_value = raw.min(e.value());
        let kept_value = kept.min(e.value());
        prop_assert!((raw_value - kept_value).abs() <= 1e-12 * raw_value.max(1.0));
        if raw < e.value() {
            prop_assert!((raw - kept).abs() <= 1e-12 * raw.max(1.0));
        }
    }

    #[test]
    fn sequence_cost_forms_agree(
        seq in proptest::collection::vec((0.01f64..=1.0, 0.0f64..6.0), 0..12),
        e in arb_penalty(),
    ) {
        let coins: Vec<SimpleCoin> = seq
            .into_iter()
            .enumerate()
            .map(|(i, (p, fee))| SimpleCoin::new(format!("c{i}"), p, fee).unwrap())
            .collect();
        let grouped = sequence_cost(&coins, e);
        let rates = sequence_cost_rate_form(&coins, e);
        prop_assert!((grouped - rates).abs() <= 1e-12 * grouped.abs().max(1.0));
    }

    #[test]
    fn zero_one_cost_forms_agree(
        pairs in proptest::collection::vec((0.05f64..0.95, 0.05f64..0.95), 1..9),
        d in 0.1f64..40.0,
        selector in any::<u64>(),
    ) {
        let h: Vec<f64> = pairs.iter().map(|(h, _)| *h).collect();
        let ell: Vec<f64> = pairs.iter().map(|(h, frac)| h * frac).collect();
        let inst = ZeroOneInstance::new(h, ell, d).unwrap();
        let chosen: Vec<usize> =
            (0..inst.len()).filter(|i| selector & (1 << i) != 0).collect();
        let direct = zero_one_cost(&inst, &chosen);
        let factored = zero_one_cost_factored(&inst, &chosen);
        prop_assert!((direct - factored).abs() <= 1e-12 * direct.abs().max(1.0));
    }
}
