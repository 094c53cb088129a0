use proptest::prelude::*;

use rcjs_core::construct::single_pass_construct;
use rcjs_core::experiment::default_selector;
use rcjs_core::instance::{
    format_instance, generate_instance, parse_instance, total_weighted_tardiness, validate_schedule,
};
use rcjs_core::oracle::brute_force_optimum;
use rcjs_core::selector::{format_selector, parse_selector, priorities_for};
use rcjs_core::{solve, GenConfig, Model, SolveStatus, SolverConfig};

fn config() -> impl Strategy<Value = GenConfig> {
    (
        1usize..=4,
        0.0f64..=1.0,
        0.05f64..=1.0,
        any::<u64>(),
        1usize..=4,
    )
        .prop_map(|(m, p, u, seed, jobs)| {
            GenConfig::new(m, p, u, seed).with_jobs_per_machine(1, jobs)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn generated_instances_round_trip(cfg in config()) {
        let inst = generate_instance(&cfg).unwrap();
        let text = format_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(format_instance(&back), text);
        prop_assert_eq!(back.len(), inst.len());
    }

    #[test]
    fn cp_and_single_pass_schedules_are_valid(cfg in config()) {
        let inst = generate_instance(&cfg).unwrap();
        let model = Model::build(&inst).unwrap();
        let res = solve(&model, &SolverConfig::with_budget(500));
        let schedule = res.best_schedule.expect("generated horizons admit a serial schedule");
        prop_assert!(validate_schedule(&inst, &schedule).is_empty());
        prop_assert_eq!(res.best_objective, Some(total_weighted_tardiness(&inst, &schedule)));
        let single = single_pass_construct(&inst, &default_selector());
        prop_assert!(validate_schedule(&inst, &single).is_empty());
    }

    #[test]
    fn cp_matches_oracle_on_tiny_instances(seed in any::<u64>(), m in 1usize..=3) {
        let inst = generate_instance(&GenConfig::new(m, 0.4, 0.6, seed).with_jobs_per_machine(1, 6 / m)).unwrap();
        let oracle = brute_force_optimum(&inst).unwrap();
        let res = solve(&Model::build(&inst).unwrap(), &SolverConfig::with_budget(2_000_000));
        prop_assert_eq!(res.status, SolveStatus::Optimal);
        prop_assert_eq!(res.best_objective, Some(oracle.optimal_objective));
        prop_assert!(validate_schedule(&inst, &oracle.optimal_schedule).is_empty());
    }
}

#[test]
fn default_selector_gives_zero_priorities_and_stable_results() {
    let inst = generate_instance(&GenConfig::new(3, 0.3, 0.5, 9)).unwrap();
    assert!(priorities_for(&default_selector(), &inst)
        .iter()
        .all(|&p| p == 0.0));
    assert_eq!(format_selector(&default_selector()), "(- PT PT)");
    let model = Model::build(&inst).unwrap();
    let cfg = SolverConfig::with_budget(3_000).selector(default_selector());
    let a = solve(&model, &cfg);
    let b = solve(&model, &cfg);
    assert_eq!(a.best_objective, b.best_objective);
    assert_eq!(a.stats.nodes, b.stats.nodes);
}

#[test]
fn selector_text_survives_a_round_trip() {
    for text in [
        "ES",
        "(% W (max DD PT))",
        "(- (* WLSUC NPREC) (min maxWL (+ WLPREC NSUC)))",
    ] {
        assert_eq!(format_selector(&parse_selector(text).unwrap()), text);
    }
}
