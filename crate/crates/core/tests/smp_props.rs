use latlin::framework::{forbidden_nodes, Algorithm};
use latlin::scheduler::{run, run_all_schedules, Daemon, DaemonKind, Outcome};
use latlin::smp::{Smp, SmpInstance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instances() -> impl Strategy<Value = (Smp, u64)> {
    (1usize..6, any::<u64>()).prop_map(|(n, seed)| {
        let inst = SmpInstance::random(n, &mut ChaCha8Rng::seed_from_u64(seed));
        (Smp::new(inst), seed)
    })
}

proptest! {
    #[test]
    fn executions_are_monotone_and_bounded((alg, seed) in instances(), kind in prop::sample::select(DaemonKind::ALL.to_vec())) {
        let n = alg.instance().size();
        let init = alg.domain().random_state(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
        let trace = run(&alg, &init, Daemon::new(kind, seed), 4 * n * n).unwrap();
        for mv in &trace.moves {
            prop_assert_eq!(mv.to.values()[0], mv.from.values()[0] + 1);
        }
        prop_assert!(trace.move_count() <= n * (n - 1));
        for (a, b) in init.values().iter().zip(trace.final_state.values()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn first_choices_reach_the_man_optimal_matching((alg, seed) in instances()) {
        let inst = alg.instance();
        let start = alg.domain().minimum();
        let trace = run(&alg, &start, Daemon::new(DaemonKind::CentralRandom, seed), 4 * inst.size().pow(2)).unwrap();
        prop_assert_eq!(trace.outcome, Outcome::Converged);
        let matching = inst.matching(&trace.final_state).unwrap();
        prop_assert!(inst.is_stable(&matching));
        prop_assert_eq!(matching, inst.gale_shapley());
    }

    #[test]
    fn terminal_iff_distinct_targets((alg, seed) in instances()) {
        let s = alg.domain().random_state(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(forbidden_nodes(&alg, &s).is_empty(), alg.instance().satisfies_psmp(&s));
    }
}

#[test]
fn exhaustive_schedules_on_the_worked_instance() {
    let alg = Smp::new(SmpInstance::three_by_three());
    let summary = run_all_schedules(&alg, &alg.domain().minimum(), 24).unwrap();
    assert_eq!(summary.terminals.len(), 1);
    let t = summary.terminals.keys().next().unwrap();
    assert_eq!(alg.format_state(&t.state), "1,2,2");
    assert!(summary.max_moves <= 6);
}
