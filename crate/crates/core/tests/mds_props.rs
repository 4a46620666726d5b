//! Guard and execution properties of the dominating-set rules on random
//! connected graphs.

use latlin::framework::{forbidden_nodes, Algorithm, GlobalState};
use latlin::graph::Graph;
use latlin::mds::{self, Mds, IN};
use latlin::scheduler::{run, run_all_schedules, Daemon, DaemonKind, Outcome};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instances() -> impl Strategy<Value = (Mds, GlobalState, u64)> {
    (1usize..9, 0.0f64..0.6, any::<u64>()).prop_map(|(n, p, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Graph::random_connected(n, p, &mut rng).unwrap();
        let alg = Mds::new(g);
        let s = alg.domain().random_state(&mut rng);
        (alg, s, seed)
    })
}

/// Brute-force minimality over every subset, independent of the library
/// oracle.
fn minimal_by_subsets(g: &Graph, s: &GlobalState) -> bool {
    let n = g.node_count();
    let members: Vec<usize> = (0..n).filter(|&v| s.values()[v] == IN).collect();
    let dominates = |set: &[bool]| {
        (0..n).all(|v| {
            set[v]
                || g.edges()
                    .iter()
                    .any(|&(a, b)| (a.index() == v && set[b.index()]) || (b.index() == v && set[a.index()]))
        })
    };
    let mut set = vec![false; n];
    for &m in &members {
        set[m] = true;
    }
    if !dominates(&set) {
        return false;
    }
    members.iter().all(|&m| {
        let mut smaller = set.clone();
        smaller[m] = false;
        !dominates(&smaller)
    })
}

proptest! {
    #[test]
    fn guard_structure((alg, s, _) in instances()) {
        let g = alg.graph();
        let forbidden = forbidden_nodes(&alg, &s);
        for &i in &forbidden {
            prop_assert!(mds::unsatisfied(g, &s, i));
            for j in g.k_hop(i, 2).unwrap() {
                prop_assert!(!forbidden.contains(&j));
            }
        }
        let terminal = forbidden.is_empty();
        prop_assert_eq!(terminal, mds::is_minimal_dominating(g, &s));
        prop_assert_eq!(terminal, minimal_by_subsets(g, &s));
        prop_assert_eq!(terminal, mds::rank_ds(g, &s) == 0);
    }

    #[test]
    fn flip_touches_one_node((alg, s, _) in instances()) {
        for i in alg.graph().nodes() {
            let t = mds::flip(&s, i);
            let changed: Vec<usize> = (0..s.node_count()).filter(|&v| s.values()[v] != t.values()[v]).collect();
            prop_assert_eq!(changed, vec![i.index()]);
        }
    }

    #[test]
    fn guards_read_only_their_radius((alg, s, _) in instances()) {
        let g = alg.graph();
        for i in g.nodes() {
            let ball = g.k_hop(i, alg.read_radius()).unwrap();
            let before = alg.is_forbidden(&s, i);
            for j in g.nodes().filter(|j| *j != i && !ball.contains(j)) {
                prop_assert_eq!(alg.is_forbidden(&mds::flip(&s, j), i), before);
            }
        }
    }

    #[test]
    fn every_daemon_stabilizes_without_revisits((alg, s, seed) in instances()) {
        let n = alg.graph().node_count();
        for kind in DaemonKind::ALL {
            let trace = run(&alg, &s, Daemon::new(kind, seed), 4 * n).unwrap();
            prop_assert_eq!(trace.outcome, Outcome::Converged);
            prop_assert!(trace.move_count() <= n);
            prop_assert!(trace.repeated_mover().is_none(), "{:?}", kind);
            prop_assert!(minimal_by_subsets(alg.graph(), &trace.final_state));
            prop_assert_eq!(trace.replay().unwrap(), trace.final_state.clone());
        }
    }

    #[test]
    fn stale_reads_still_reach_a_minimal_set((alg, s, seed) in instances(), b in prop::sample::select(vec![1u32, 2, 4])) {
        let n = alg.graph().node_count();
        let trace = run(&alg, &s, Daemon::stale(seed, b), 4 * n).unwrap();
        prop_assert!(minimal_by_subsets(alg.graph(), &trace.final_state));
    }

    #[test]
    fn all_schedules_respect_the_move_bound((alg, s, _) in instances()) {
        let n = alg.graph().node_count();
        let summary = run_all_schedules(&alg, &s, 4 * n).unwrap();
        prop_assert!(summary.max_moves <= n);
        prop_assert!(summary.revisit.is_none());
        for t in summary.terminals.keys() {
            prop_assert!(mds::is_minimal_dominating(alg.graph(), &t.state));
        }
    }
}

/// The unsatisfied-count variant does not decrease on every move: on the
/// path 1-2-3-4, node 1 joining makes node 3 removable.
#[test]
fn rank_plateau_on_a_path() {
    let alg = Mds::new(Graph::path(4).unwrap());
    let s = alg.parse_state("OUT,OUT,IN,IN").unwrap();
    assert!(alg.is_forbidden(&s, latlin::NodeId(1)));
    let t = mds::flip(&s, latlin::NodeId(1));
    assert_eq!(mds::rank_ds(alg.graph(), &s), 2);
    assert_eq!(mds::rank_ds(alg.graph(), &t), 2);
}

#[test]
fn g4_rank_strictly_decreases_on_every_move() {
    let alg = Mds::new(Graph::new(4, &[(1, 2), (3, 4)]).unwrap());
    for idx in 0..16 {
        let s = alg.domain().state_at(idx);
        for i in forbidden_nodes(&alg, &s) {
            assert!(mds::rank_ds(alg.graph(), &mds::flip(&s, i)) < mds::rank_ds(alg.graph(), &s));
        }
    }
}
