#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeSet;

use arrival_core::graph::{parse, serialize, to_dot};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn serialize_then_parse_is_identity(g in common::switch_graph(12)) {
        let text = serialize(&g);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serialize(&back), text);
    }

    #[test]
    fn reverse_reachability_matches_closure(g in common::switch_graph(5), target in 0usize..5) {
        let target = target % g.n();
        let r = common::reach_matrix(&g);
        let expected: BTreeSet<usize> = (0..g.n()).filter(|&v| r[v][target]).collect();
        let got = g.reverse_reachable(target).unwrap();
        prop_assert!(got.contains(&target));
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn two_slots_per_vertex(g in common::switch_graph(12)) {
        prop_assert_eq!(g.slots().count(), 2 * g.n());
        let mut out_degree = vec![0usize; g.n()];
        for s in g.slots() {
            out_degree[s.tail] += 1;
        }
        prop_assert!(out_degree.iter().all(|&d| d == 2));
        let dot = to_dot(&g);
        prop_assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 2 * g.n());
    }
}

#[test]
fn fixture_document_parses_to_t1() {
    let text = include_str!("fixtures/t1.json");
    let g = parse(text).unwrap();
    let t1 = arrival_core::SwitchGraph::new(vec![1, 1], vec![1, 1], 0, 1).unwrap();
    assert_eq!(g, t1);
    assert_eq!(serialize(&g), text.trim_end());
}

#[test]
fn exhaustive_reachability_for_three_vertices() {
    // Every successor table over three vertices.
    for code in 0..3usize.pow(6) {
        let digits: Vec<usize> = (0..6).map(|i| code / 3usize.pow(i) % 3).collect();
        let g = arrival_core::SwitchGraph::new(digits[..3].to_vec(), digits[3..].to_vec(), 0, 2).unwrap();
        let r = common::reach_matrix(&g);
        for t in 0..3 {
            let expected: BTreeSet<usize> = (0..3).filter(|&v| r[v][t]).collect();
            assert_eq!(g.reverse_reachable(t).unwrap(), expected);
        }
    }
}
