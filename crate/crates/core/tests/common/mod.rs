#![allow(dead_code)]

use arrival_core::SwitchGraph;
use proptest::prelude::*;

/// Random valid switch graphs with `2..=max_n` vertices and distinct
/// origin and destination.
pub fn switch_graph(max_n: usize) -> impl Strategy<Value = SwitchGraph> {
    (2..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0..n, n),
            prop::collection::vec(0..n, n),
            0..n,
            1..n,
        )
            .prop_map(move |(even, odd, origin, shift)| {
                let dest = (origin + shift) % n;
                SwitchGraph::new(even, odd, origin, dest).unwrap()
            })
    })
}

/// Transitive closure by Warshall's algorithm over the slot adjacency.
#[allow(clippy::needless_range_loop)]
pub fn reach_matrix(g: &SwitchGraph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut r = vec![vec![false; n]; n];
    for v in 0..n {
        r[v][v] = true;
        r[v][g.even_succ(v)] = true;
        r[v][g.odd_succ(v)] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Switching-flow conditions evaluated from explicit out/in edge lists.
pub fn is_switching_flow_naive(g: &SwitchGraph, origin: usize, dest: usize, x: &[u64]) -> bool {
    let n = g.n();
    let edges: Vec<(usize, usize, u64)> = (0..n)
        .flat_map(|v| [(v, g.even_succ(v), x[2 * v]), (v, g.odd_succ(v), x[2 * v + 1])])
        .collect();
    (0..n).all(|v| {
        let out: i128 = edges.iter().filter(|e| e.0 == v).map(|e| e.2 as i128).sum();
        let inn: i128 = edges.iter().filter(|e| e.1 == v).map(|e| e.2 as i128).sum();
        let need = if origin == dest {
            0
        } else if v == origin {
            1
        } else if v == dest {
            -1
        } else {
            0
        };
        let (e, o) = (x[2 * v], x[2 * v + 1]);
        out - inn == need && o <= e && e <= o + 1
    })
}
