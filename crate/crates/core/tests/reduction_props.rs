#![allow(clippy::needless_range_loop)]

mod common;

use arrival_core::graph::{serialize, validate};
use arrival_core::reduction::{augment, check_duality, Terminal};
use arrival_core::simulator::{decide_arrival, default_budget, Runner, SwitchConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn duality_holds(g in common::switch_graph(10)) {
        let r = check_duality(&g).unwrap();
        prop_assert!(r.pass, "{:?}", r);
        prop_assert_ne!(r.h_to_dest, r.h_to_dest_bar);
    }

    #[test]
    fn augmented_graph_follows_the_case_table(g in common::switch_graph(10)) {
        let aug = augment(&g);
        let h = &aug.h;
        let (n, d) = (g.n(), g.dest());
        prop_assert_eq!(h.n(), n + 2);
        prop_assert!(validate(&h.to_spec()).is_empty());
        prop_assert_eq!((aug.o_bar, aug.d_bar), (n, n + 1));
        prop_assert_eq!((h.even_succ(aug.o_bar), h.odd_succ(aug.o_bar)), (g.origin(), g.origin()));
        prop_assert_eq!((h.even_succ(aug.d_bar), h.odd_succ(aug.d_bar)), (aug.d_bar, aug.d_bar));
        let r = common::reach_matrix(&g);
        for v in 0..n {
            prop_assert_eq!(aug.x_d.contains(&v), !r[v][d]);
            let expected = if v == d {
                (d, d)
            } else if !r[v][d] {
                (aug.d_bar, aug.d_bar)
            } else {
                (g.even_succ(v), g.odd_succ(v))
            };
            prop_assert_eq!((h.even_succ(v), h.odd_succ(v)), expected);
        }
        prop_assert_eq!(serialize(&augment(&g).h), serialize(h));
    }

    #[test]
    fn runs_on_h_visit_the_fresh_origin_once(g in common::switch_graph(10)) {
        let aug = augment(&g);
        let mut r = Runner::from_state(&aug.h, aug.o_bar, SwitchConfig::zeros(aug.m()), vec![aug.source_dest, aug.d_bar]);
        let mut visits = 1;
        while !r.at_terminal() && r.steps() < default_budget(aug.m()) {
            r.step().unwrap();
            visits += usize::from(r.vertex() == aug.o_bar);
        }
        prop_assert_eq!(visits, 1);
        let reached = aug.terminal_of(r.vertex()).unwrap();
        let expected = match decide_arrival(&g).unwrap() {
            arrival_core::Decision::Terminates => Terminal::Dest,
            arrival_core::Decision::DoesNotTerminate => Terminal::DestBar,
        };
        prop_assert_eq!(reached, expected);
    }
}
