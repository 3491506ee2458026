use orientcorr::graph::{emit_edge_list, emit_graph6, parse_edge_list, parse_graph6, Graph};
use proptest::prelude::*;

fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..=20).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |keep| {
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if keep[i] {
                        edges.push((u, v));
                    }
                    i += 1;
                }
            }
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn graph6_round_trip(g in arb_graph()) {
        let text = emit_graph6(&g);
        prop_assert_eq!(parse_graph6(&text).unwrap(), g);
    }

    #[test]
    fn edge_list_round_trip(g in arb_graph()) {
        prop_assert_eq!(parse_edge_list(&emit_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn adjacency_agrees_with_edges(g in arb_graph()) {
        let degree_sum: u32 = (0..g.n()).map(|v| g.degree(v)).sum();
        prop_assert_eq!(degree_sum as usize, 2 * g.m());
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            prop_assert!(u < v);
            prop_assert!(g.has_edge(u, v) && g.has_edge(v, u));
            prop_assert_eq!(g.edge_index(u, v), Some(i));
        }
        prop_assert!(g.edges().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn graph6_rejects_trailing_bytes(g in arb_graph()) {
        let text = format!("{}A", emit_graph6(&g));
        prop_assert!(parse_graph6(&text).is_err());
    }
}

#[test]
fn header_is_accepted() {
    let g = parse_graph6(">>graph6<<Bw").unwrap();
    assert_eq!(g.m(), 3);
}

#[test]
fn malformed_inputs() {
    for bad in ["", "?", "B", "Bw~", "C\x20"] {
        assert!(parse_graph6(bad).is_err(), "{bad:?}");
    }
    assert!(parse_edge_list("3\n0 0\n").is_err());
    assert!(parse_edge_list("3\n0 1\n1 0\n").is_err());
    assert!(parse_edge_list("3\n0 5\n").is_err());
}
