//! The augmented instance `H`: a fresh origin `ō` feeding the original
//! origin, a fresh sink `d̄` absorbing every vertex that cannot reach `d`,
//! and self-loops on both `d` and `d̄`.
//!
//! Exactly one of `(H, ō, d)` and `(H, ō, d̄)` terminates, and which one
//! tells whether the original game does.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::SwitchGraph;
use crate::simulator::{decide_arrival, Decision};

/// Which of the two sinks of `H` a run or flow ends at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terminal {
    /// The original destination `d`.
    #[serde(rename = "d")]
    Dest,
    /// The added sink `d̄`.
    #[serde(rename = "d-bar")]
    DestBar,
}

impl Terminal {
    pub fn as_str(self) -> &'static str {
        match self {
            Terminal::Dest => "d",
            Terminal::DestBar => "d-bar",
        }
    }

    pub fn other(self) -> Terminal {
        match self {
            Terminal::Dest => Terminal::DestBar,
            Terminal::DestBar => Terminal::Dest,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedInstance {
    /// `H` over `n + 2` vertices; `h.origin()` is `ō` and `h.dest()` is the
    /// original `d`.
    pub h: SwitchGraph,
    pub o_bar: usize,
    pub d_bar: usize,
    /// Original vertices with no directed path to `d`.
    pub x_d: BTreeSet<usize>,
    pub source_origin: usize,
    pub source_dest: usize,
}

/// Sidecar document emitted next to `H` by the `reduce` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentationSidecar {
    pub o_bar: usize,
    pub d_bar: usize,
    pub x_d: Vec<usize>,
}

impl AugmentedInstance {
    /// Number of vertices of `H`.
    pub fn m(&self) -> usize {
        self.h.n()
    }

    pub fn terminal_vertex(&self, t: Terminal) -> usize {
        match t {
            Terminal::Dest => self.source_dest,
            Terminal::DestBar => self.d_bar,
        }
    }

    pub fn terminal_of(&self, v: usize) -> Option<Terminal> {
        if v == self.source_dest {
            Some(Terminal::Dest)
        } else if v == self.d_bar {
            Some(Terminal::DestBar)
        } else {
            None
        }
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.terminal_of(v).is_some()
    }

    /// `H` with the given sink as destination.
    pub fn instance_to(&self, t: Terminal) -> SwitchGraph {
        self.h
            .with_terminals(self.o_bar, self.terminal_vertex(t))
            .expect("ō differs from both sinks")
    }

    pub fn sidecar(&self) -> AugmentationSidecar {
        AugmentationSidecar { o_bar: self.o_bar, d_bar: self.d_bar, x_d: self.x_d.iter().copied().collect() }
    }
}

pub fn augment(g: &SwitchGraph) -> AugmentedInstance {
    build(g).expect("augmenting a valid graph yields a valid graph")
}

/// Augments a successor table whose origin may coincide with its
/// destination. This covers the one-vertex game, which a [`SwitchGraph`]
/// cannot represent but whose augmentation is well formed.
pub fn augment_raw(
    even: Vec<usize>,
    odd: Vec<usize>,
    origin: usize,
    dest: usize,
) -> Result<AugmentedInstance> {
    let g = SwitchGraph::from_parts_unchecked_terminals(even, odd, origin, dest)?;
    build(&g)
}

fn build(g: &SwitchGraph) -> Result<AugmentedInstance> {
    let n = g.n();
    let (o, d) = (g.origin(), g.dest());
    let o_bar = n;
    let d_bar = n + 1;
    let reaches_d = g.distances_to(d);
    let x_d: BTreeSet<usize> = (0..n).filter(|&v| reaches_d[v].is_none()).collect();

    let mut even = Vec::with_capacity(n + 2);
    let mut odd = Vec::with_capacity(n + 2);
    for v in 0..n {
        let (e, od) = if v == d {
            (v, v)
        } else if x_d.contains(&v) {
            (d_bar, d_bar)
        } else {
            (g.even_succ(v), g.odd_succ(v))
        };
        even.push(e);
        odd.push(od);
    }
    // ō feeds the original origin on both slots; d̄ absorbs.
    even.extend([o, d_bar]);
    odd.extend([o, d_bar]);

    let h = SwitchGraph::new(even, odd, o_bar, d)?;
    Ok(AugmentedInstance { h, o_bar, d_bar, x_d, source_origin: o, source_dest: d })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub g: Decision,
    pub h_to_dest: Decision,
    pub h_to_dest_bar: Decision,
    pub pass: bool,
}

/// Decides the original game and both augmented games and checks that they
/// line up: `G` terminates iff `(H, ō, d)` does iff `(H, ō, d̄)` does not.
pub fn check_duality(g: &SwitchGraph) -> Result<DualityReport> {
    let aug = augment(g);
    let g_verdict = decide_arrival(g)?;
    let h_to_dest = decide_arrival(&aug.instance_to(Terminal::Dest))?;
    let h_to_dest_bar = decide_arrival(&aug.instance_to(Terminal::DestBar))?;
    let pass = match g_verdict {
        Decision::Terminates => {
            h_to_dest == Decision::Terminates && h_to_dest_bar == Decision::DoesNotTerminate
        }
        Decision::DoesNotTerminate => {
            h_to_dest == Decision::DoesNotTerminate && h_to_dest_bar == Decision::Terminates
        }
    };
    Ok(DualityReport { g: g_verdict, h_to_dest, h_to_dest_bar, pass })
}
