use latlin::graph::{Graph, NodeId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graphs() -> impl Strategy<Value = Graph> {
    (1usize..10, 0.0f64..0.7, any::<u64>())
        .prop_map(|(n, p, seed)| Graph::random_connected(n, p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap())
}

proptest! {
    #[test]
    fn one_hop_is_adjacency(g in graphs()) {
        for i in g.nodes() {
            prop_assert_eq!(g.k_hop(i, 1).unwrap(), g.adjacency(i).unwrap());
        }
    }

    #[test]
    fn k_hop_grows_and_excludes_self(g in graphs(), x in 1usize..6) {
        for i in g.nodes() {
            let inner = g.k_hop(i, x).unwrap();
            let outer = g.k_hop(i, x + 1).unwrap();
            prop_assert!(inner.is_subset(&outer));
            prop_assert!(!outer.contains(&i));
        }
    }

    #[test]
    fn k_hop_matches_distance_oracle(g in graphs(), x in 1usize..5) {
        // Floyd-Warshall distances as an independent reference.
        let n = g.node_count();
        let inf = usize::MAX / 2;
        let mut d = vec![vec![inf; n]; n];
        for (v, row) in d.iter_mut().enumerate() {
            row[v] = 0;
        }
        for &(u, v) in g.edges() {
            d[u.index()][v.index()] = 1;
            d[v.index()][u.index()] = 1;
        }
        for k in 0..n {
            for a in 0..n {
                for b in 0..n {
                    d[a][b] = d[a][b].min(d[a][k] + d[k][b]);
                }
            }
        }
        for i in g.nodes() {
            let expected: Vec<NodeId> =
                (0..n).filter(|&j| j != i.index() && d[i.index()][j] <= x).map(NodeId::from_index).collect();
            let got: Vec<NodeId> = g.k_hop(i, x).unwrap().into_iter().collect();
            prop_assert_eq!(got, expected);
        }
    }

    #[test]
    fn text_round_trip(g in graphs()) {
        let text = g.to_string();
        prop_assert_eq!(Graph::parse(&text).unwrap(), g);
    }
}

#[test]
fn random_connected_is_seed_stable() {
    let a = Graph::random_connected(8, 0.3, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
    let b = Graph::random_connected(8, 0.3, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
    assert_eq!(a, b);
}
