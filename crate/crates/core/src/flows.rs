//! Switching flows: verification, desperation, and flow completion with its
//! bound audit.
//!
//! A switching flow of `(G, o, d)` assigns a count to every edge slot so
//! that (1) net outflow is `+1` at `o`, `-1` at `d` and `0` elsewhere, and
//! (2) at every vertex `0 <= x_odd <= x_even <= x_odd + 1`. Every run profile
//! is one, which makes it a termination certificate.

use serde::{Deserialize, Serialize};

use crate::error::{ArrivalError, Result};
use crate::flow_vector::FlowVector;
use crate::graph::{EdgeSlot, Parity, SwitchGraph};
use crate::local_search::CertificateKind;
use crate::reduction::{AugmentedInstance, Terminal};
use crate::simulator::{pow2, Runner, SwitchConfig};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConservationViolation {
    pub vertex: usize,
    /// Outflow minus inflow found in the flow.
    pub found: i128,
    pub required: i128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityViolation {
    pub vertex: usize,
    pub even: u64,
    pub odd: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowCheckReport {
    pub valid: bool,
    pub conservation_violations: Vec<ConservationViolation>,
    pub parity_violations: Vec<ParityViolation>,
}

/// Net outflow required at `v`. When `origin == dest` every vertex must
/// balance, which makes the all-zero flow valid.
fn required_net(v: usize, origin: usize, dest: usize) -> i128 {
    if origin == dest {
        0
    } else if v == origin {
        1
    } else if v == dest {
        -1
    } else {
        0
    }
}

/// The flow file format: `{"origin": .., "dest": .., "counts": [..]}`,
/// optionally tagged with a certificate `kind`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowDocument {
    pub origin: usize,
    pub dest: usize,
    pub counts: FlowVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<CertificateKind>,
}

/// Checks both switching-flow conditions and lists every violation.
pub fn verify(g: &SwitchGraph, origin: usize, dest: usize, x: &FlowVector) -> Result<FlowCheckReport> {
    g.check_vertex(origin)?;
    g.check_vertex(dest)?;
    if x.len() != g.slot_count() {
        return Err(ArrivalError::DimensionMismatch { expected: g.slot_count(), found: x.len() });
    }
    let mut net = vec![0i128; g.n()];
    for (slot, count) in x.iter() {
        let c = i128::from(count);
        net[slot.tail] += c;
        net[g.head(slot)] -= c;
    }
    let conservation_violations = net
        .iter()
        .enumerate()
        .filter_map(|(v, &found)| {
            let required = required_net(v, origin, dest);
            (found != required).then_some(ConservationViolation { vertex: v, found, required })
        })
        .collect::<Vec<_>>();
    let parity_violations = (0..g.n())
        .filter_map(|v| {
            let (even, odd) = (x.even(v), x.odd(v));
            let ok = odd <= even && even - odd <= 1;
            (!ok).then_some(ParityViolation { vertex: v, even, odd })
        })
        .collect::<Vec<_>>();
    Ok(FlowCheckReport {
        valid: conservation_violations.is_empty() && parity_violations.is_empty(),
        conservation_violations,
        parity_violations,
    })
}

/// Shorthand for `verify(..)?.valid`.
pub fn is_switching_flow(g: &SwitchGraph, origin: usize, dest: usize, x: &FlowVector) -> Result<bool> {
    Ok(verify(g, origin, dest, x)?.valid)
}

/// Per slot, the shortest path length from the slot's head to the
/// destination, or `None` when the head cannot reach it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Desperation {
    pub dest: usize,
    pub per_slot: Vec<Option<u32>>,
}

impl Desperation {
    pub fn get(&self, slot: EdgeSlot) -> Option<u32> {
        self.per_slot[slot.index()]
    }
}

pub fn desperation(g: &SwitchGraph, dest: usize) -> Result<Desperation> {
    g.check_vertex(dest)?;
    let dist = g.distances_to(dest);
    Ok(Desperation { dest, per_slot: g.slots().map(|s| dist[g.head(s)]).collect() })
}

/// Result of completing a partial switching flow to one of `H`'s sinks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub reached: Terminal,
    pub reached_vertex: usize,
    /// The input flow with the self-loop counts of `d` and `d̄` zeroed.
    pub zeroed: FlowVector,
    /// Run profile of the continuation, in `H`'s slot labelling.
    pub continuation: FlowVector,
    /// `zeroed + continuation`, a switching flow of `(H, ō, reached)`.
    pub z: FlowVector,
}

fn zero_terminal_loops(aug: &AugmentedInstance, x: &FlowVector) -> FlowVector {
    let mut x = x.clone();
    for t in [aug.source_dest, aug.d_bar] {
        for p in Parity::BOTH {
            x.set(EdgeSlot::new(t, p), 0);
        }
    }
    x
}

/// Vertices at which `x` has used the even slot once more than the odd one.
/// The next exit from such a vertex takes the odd slot.
fn pending_odd(x: &FlowVector) -> Vec<bool> {
    (0..x.vertex_count()).map(|v| x.even(v) > x.odd(v)).collect()
}

/// The flipped graph `I`: `H` with both successors of `v` exchanged wherever
/// `x` has one more even than odd traversal at `v`. A fresh run on `I`
/// continues where the flow `x` left off on `H`.
pub fn flipped_graph(aug: &AugmentedInstance, x: &FlowVector) -> Result<SwitchGraph> {
    if x.len() != aug.h.slot_count() {
        return Err(ArrivalError::DimensionMismatch { expected: aug.h.slot_count(), found: x.len() });
    }
    let flip = pending_odd(x);
    let h = &aug.h;
    let (even, odd): (Vec<_>, Vec<_>) = (0..h.n())
        .map(|v| {
            if flip[v] {
                (h.odd_succ(v), h.even_succ(v))
            } else {
                (h.even_succ(v), h.odd_succ(v))
            }
        })
        .unzip();
    SwitchGraph::new(even, odd, aug.o_bar, aug.source_dest)
}

/// Extends a switching flow of `(H, ō, u)` to one of `(H, ō, d)` or
/// `(H, ō, d̄)` by continuing RUN from `u` on the flipped graph.
pub fn complete(aug: &AugmentedInstance, u: usize, x: &FlowVector) -> Result<Completion> {
    let h = &aug.h;
    h.check_vertex(u)?;
    if u == aug.o_bar {
        return Err(ArrivalError::Precondition("the completion start must differ from ō".into()));
    }
    let report = verify(h, aug.o_bar, u, x)?;
    if !report.valid {
        return Err(ArrivalError::Precondition(format!(
            "input is not a switching flow of (H, ō, {u})"
        )));
    }

    let zeroed = zero_terminal_loops(aug, x);

    if let Some(reached) = aug.terminal_of(u) {
        return Ok(Completion {
            reached,
            reached_vertex: u,
            continuation: FlowVector::zeros(h.n()),
            z: zeroed.clone(),
            zeroed,
        });
    }

    let flip = pending_odd(&zeroed);
    let flipped = flipped_graph(aug, &zeroed)?;
    let budget = pow2(h.n())
        .and_then(|p| p.checked_mul(h.n() as u64))
        .ok_or(ArrivalError::Overflow("completion budget m * 2^m"))?;
    let mut runner = Runner::from_state(
        &flipped,
        u,
        SwitchConfig::zeros(h.n()),
        vec![aug.source_dest, aug.d_bar],
    );
    while !runner.at_terminal() {
        if runner.steps() >= budget {
            return Err(ArrivalError::CompletionDidNotTerminate { budget });
        }
        runner.step()?;
    }
    let (reached_vertex, flipped_profile, _, _) = runner.into_parts();
    let reached = aug.terminal_of(reached_vertex).expect("runner stops only at sinks");

    // Back to H's labelling: I's even slot at a flipped vertex is H's odd one.
    let mut continuation = FlowVector::zeros(h.n());
    for (slot, count) in flipped_profile.iter() {
        let parity = if flip[slot.tail] { slot.parity.flip() } else { slot.parity };
        continuation.set(EdgeSlot::new(slot.tail, parity), count);
    }

    let into_sink: Vec<u64> = h
        .slots()
        .filter(|&s| h.head(s) == reached_vertex)
        .map(|s| continuation.get(s))
        .collect();
    if into_sink.iter().filter(|&&c| c == 1).count() != 1 || into_sink.iter().any(|&c| c > 1) {
        return Err(ArrivalError::Internal(format!(
            "continuation must enter the reached sink through exactly one slot, got {into_sink:?}"
        )));
    }

    let z = zeroed.checked_add(&continuation)?;
    if !verify(h, aug.o_bar, reached_vertex, &z)?.valid {
        return Err(ArrivalError::Internal(format!(
            "completed flow does not verify against (H, ō, {reached_vertex})"
        )));
    }
    Ok(Completion { reached, reached_vertex, zeroed, continuation, z })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundViolation {
    /// A slot outside the sinks carries `2^m` or more.
    ExponentialBound { slot: (usize, Parity), value: u64 },
    /// A slot of `ō` carries more than one unit.
    OriginSlot { slot: (usize, Parity), value: u64 },
    /// A slot that no flow to the reached sink can use is nonzero.
    ForcedZero { slot: (usize, Parity), value: u64 },
    /// A slot of desperation `k` exceeds `2^(k+1) - 1`.
    Desperation { slot: (usize, Parity), value: u64, desperation: u32, limit: u64 },
}

/// A sink's own slot above `2^m`. Reported, not counted as a failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundFlag {
    pub slot: (usize, Parity),
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub m: usize,
    pub reached: Terminal,
    pub pass: bool,
    pub violations: Vec<BoundViolation>,
    pub flags: Vec<BoundFlag>,
}

/// Audits a switching flow of `(H, ō, reached)` against the exponential
/// bound, the `ō` bound, forced zeros, and the desperation bounds.
pub fn check_bounds(aug: &AugmentedInstance, z: &FlowVector, reached: usize) -> Result<BoundReport> {
    let h = &aug.h;
    h.check_vertex(reached)?;
    let terminal = aug.terminal_of(reached).ok_or_else(|| {
        ArrivalError::Precondition(format!("vertex {reached} is neither d nor d̄"))
    })?;
    if !verify(h, aug.o_bar, reached, z)?.valid {
        return Err(ArrivalError::Precondition(format!(
            "input is not a switching flow of (H, ō, {reached})"
        )));
    }
    let m = aug.m();
    let limit = pow2(m);
    let desp = desperation(h, reached)?;
    let forced_zero_head = |w: usize| match terminal {
        Terminal::Dest => w == aug.d_bar || aug.x_d.contains(&w),
        Terminal::DestBar => w == aug.source_dest,
    };

    let mut violations = Vec::new();
    let mut flags = Vec::new();
    for (slot, value) in z.iter() {
        let key = (slot.tail, slot.parity);
        let over_limit = limit.is_some_and(|l| value >= l);
        if aug.is_terminal(slot.tail) {
            if over_limit {
                flags.push(BoundFlag { slot: key, value });
            }
            continue;
        }
        if over_limit {
            violations.push(BoundViolation::ExponentialBound { slot: key, value });
        }
        if slot.tail == aug.o_bar && value > 1 {
            violations.push(BoundViolation::OriginSlot { slot: key, value });
        }
        if forced_zero_head(h.head(slot)) && value != 0 {
            violations.push(BoundViolation::ForcedZero { slot: key, value });
        }
        if let Some(k) = desp.get(slot) {
            let cap = pow2(k as usize + 1).map(|p| p - 1).unwrap_or(u64::MAX);
            if value > cap {
                violations.push(BoundViolation::Desperation { slot: key, value, desperation: k, limit: cap });
            }
        }
    }
    Ok(BoundReport { m, reached: terminal, pass: violations.is_empty(), violations, flags })
}
