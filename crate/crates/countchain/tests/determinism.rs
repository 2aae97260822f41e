//! Determinism properties over randomized scenarios: a spec pins every
//! observable output, however the run is driven.

use proptest::prelude::*;

use countchain::csv::sweep_to_csv;
use countchain::sim::{run_scenario, run_sweep};
use countchain::{DishonestAction, ScenarioSpec, Simulation};

fn arb_spec() -> impl Strategy<Value = ScenarioSpec> {
    (
        5u32..40,
        0.0f64..1.0,
        0.0f64..=1.0,
        0.0f64..=1.0,
        1u32..40,
        any::<u64>(),
        0.0f64..0.5,
        any::<bool>(),
    )
        .prop_map(
            |(total, vfrac, honesty, corrupted, events, seed, loss, abstain)| {
                let verifiers = 1 + (vfrac * (total - 1) as f64) as u32;
                ScenarioSpec::builder(total, verifiers)
                    .honesty_rate(honesty)
                    .corrupted_fraction(corrupted)
                    .num_events(events)
                    .seed(seed)
                    .delivery_loss(loss)
                    .dishonest_action(if abstain {
                        DishonestAction::Abstain
                    } else {
                        DishonestAction::VoteFalse
                    })
                    .build()
                    .expect("generated specs are in-domain")
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn a_spec_replays_bit_identically(spec in arb_spec()) {
        let oneshot = run_scenario(&spec).unwrap();

        let mut first = Simulation::new(&spec).unwrap();
        while first.step().is_some() {}
        let mut second = Simulation::new(&spec).unwrap();
        while second.step().is_some() {}

        prop_assert_eq!(&oneshot, &first.metrics());
        prop_assert_eq!(&first.metrics(), &second.metrics());
        prop_assert_eq!(
            first.host().ledger().export_csv(),
            second.host().ledger().export_csv()
        );

        prop_assert_eq!(oneshot.counter, u64::from(oneshot.decided_true));
        prop_assert_eq!(
            oneshot.propositions_raised + oneshot.events_unraised,
            spec.num_events
        );
        prop_assert!(first.host().ledger().conservation_holds());
    }

    #[test]
    fn a_single_point_sweep_reproduces_the_scenario(spec in arb_spec()) {
        let direct = run_scenario(&spec).unwrap();
        let sweep = || {
            run_sweep(
                &spec,
                &[spec.honesty_rate],
                &[spec.config.num_verifiers],
                &[spec.config.total_nodes],
            )
            .unwrap()
        };
        let rows = sweep();
        prop_assert_eq!(rows.len(), 1);
        prop_assert_eq!(rows[0].seed, spec.seed);
        prop_assert_eq!(&rows[0].metrics, &direct);
        prop_assert_eq!(sweep_to_csv(&rows), sweep_to_csv(&sweep()));
    }
}
