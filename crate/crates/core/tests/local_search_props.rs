mod common;

use arrival_core::flows::verify;
use arrival_core::local_search::{
    build_instance, default_walk_budget, walk_localopt, walk_sink_of_path, BitLevel, BitString, LocalOpt,
    SearchState, SinkOfPath,
};
use arrival_core::reduction::{augment, augment_raw};
use arrival_core::simulator::{Runner, SwitchConfig};
use arrival_core::FlowVector;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn walk_retraces_run_on_h(g in common::switch_graph(9)) {
        let inst = build_instance(augment(&g)).unwrap();
        let aug = inst.augmented();
        let walk = walk_localopt(&inst, inst.reset_state(), default_walk_budget(inst.m()), true).unwrap();
        let trace = walk.trace.unwrap();
        let mut r = Runner::from_state(&aug.h, aug.o_bar, SwitchConfig::zeros(inst.m()), vec![aug.source_dest, aug.d_bar]);
        for s in &trace {
            prop_assert_eq!(s.vertex, r.vertex());
            prop_assert_eq!(&s.flow, r.profile());
            r.step().unwrap();
        }
        prop_assert!(aug.is_terminal(walk.solution.vertex));
        prop_assert_eq!(walk.steps as usize + 1, trace.len());
    }

    #[test]
    fn valid_steps_ascend_by_one_and_stay_valid(g in common::switch_graph(9)) {
        let inst = build_instance(augment(&g)).unwrap();
        let aug = inst.augmented();
        let mut s = inst.reset_state();
        loop {
            prop_assert!(inst.is_valid(&s));
            if aug.is_terminal(s.vertex) {
                break;
            }
            // Range safety: the slot about to be incremented is below 2^m.
            let slot = arrival_core::EdgeSlot::new(s.vertex, s.flow.next_parity(s.vertex));
            prop_assert!(s.flow.get(slot) < inst.entry_cap());
            let next = inst.neighbor(&s);
            prop_assert!(verify(inst.h(), aug.o_bar, next.vertex, &next.flow).unwrap().valid);
            prop_assert_eq!(inst.potential(&next), inst.potential(&s) + 1);
            s = next;
        }
    }

    #[test]
    fn encode_decode_round_trip(g in common::switch_graph(6), raw in prop::collection::vec(0u64..=256, 16), v in 0usize..8) {
        let inst = build_instance(augment(&g)).unwrap();
        let m = inst.m();
        let counts: Vec<u64> = raw.iter().cycle().take(2 * m).map(|&c| c.min(inst.entry_cap())).collect();
        let s = SearchState { vertex: v % m, flow: FlowVector::from_counts(counts) };
        let bits = inst.encode(&s).unwrap();
        prop_assert_eq!(bits.len(), inst.encoded_len());
        prop_assert_eq!(inst.decode(&bits), s.clone());
        let hex = bits.to_hex();
        prop_assert_eq!(BitString::from_hex(&hex, bits.len()).unwrap(), bits);
    }

    #[test]
    fn decode_is_total(g in common::switch_graph(4), raw in prop::collection::vec(any::<bool>(), 0..120)) {
        let inst = build_instance(augment(&g)).unwrap();
        let s = inst.decode(&BitString::from_bits(raw));
        // Either a domain element or the designated malformed state.
        prop_assert!(s.vertex < inst.m());
        prop_assert!(s.flow.counts().iter().all(|&c| c <= inst.entry_cap()));
    }

    #[test]
    fn walkers_agree(g in common::switch_graph(9)) {
        let inst = build_instance(augment(&g)).unwrap();
        let budget = default_walk_budget(inst.m());
        let lo = walk_localopt(&inst, inst.reset_state(), budget, false).unwrap();
        let (sol, r) = walk_sink_of_path(&SinkOfPath { instance: &inst, start: inst.reset_state() }, budget).unwrap();
        prop_assert_eq!(sol, lo.solution.clone());
        prop_assert_eq!(r, lo.steps);

        let bl = BitLevel(&inst);
        let start = inst.encode(&inst.reset_state()).unwrap();
        let bits = walk_localopt(&bl, start, budget, false).unwrap();
        prop_assert_eq!(inst.decode(&bits.solution), lo.solution);
        prop_assert_eq!(bits.steps, lo.steps);
    }
}

/// Every state of the domain `[m] x [0, 2^m]^(2m)` for the augmented
/// one-vertex game (m = 3), evaluated by brute force.
#[test]
fn local_optima_are_exactly_sink_flows_for_m3() {
    let inst = build_instance(augment_raw(vec![0], vec![0], 0, 0).unwrap()).unwrap();
    let aug = inst.augmented();
    let m = inst.m();
    assert_eq!(m, 3);
    let cap = inst.entry_cap();
    let slots = 2 * m;
    let base = cap + 1;
    let mut optima = 0u64;
    for v in 0..m {
        for code in 0..base.pow(slots as u32) {
            let counts: Vec<u64> = (0..slots).map(|i| code / base.pow(i as u32) % base).collect();
            let s = SearchState { vertex: v, flow: FlowVector::from_counts(counts) };
            let valid = verify(inst.h(), aug.o_bar, v, &s.flow).unwrap().valid;
            let is_opt = inst.potential(&s) >= inst.potential(&inst.neighbor(&s));
            assert_eq!(is_opt, valid && aug.is_terminal(v), "state {s:?}");
            optima += u64::from(is_opt);
        }
    }
    assert!(optima > 0);
}
