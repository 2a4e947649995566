//! S-ARRIVAL as a LOCALOPT instance.
//!
//! A search state is a vertex `v` of `H` together with a candidate switching
//! flow of `(H, ō, v)`. The neighbor function advances a valid state by one
//! RUN step (incrementing the slot the switch at `v` points to) and sends
//! every invalid state, and every state sitting at a sink, to the reset
//! state `(ō, 0)`. The potential is the flow's 1-norm, or `-1` for invalid
//! states, so it rises by exactly one per valid step and the only local
//! optima are switching flows ending at `d` or `d̄`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ArrivalError, Result};
use crate::flow_vector::FlowVector;
use crate::flows::is_switching_flow;
use crate::graph::{EdgeSlot, SwitchGraph};
use crate::reduction::{augment, AugmentedInstance, Terminal};
use crate::simulator::pow2;

/// A neighborhood function with a potential; a solution is any state whose
/// potential is at least its neighbor's.
pub trait LocalOpt {
    type State: Clone + PartialEq + fmt::Debug;

    fn neighbor(&self, state: &Self::State) -> Self::State;

    fn potential(&self, state: &Self::State) -> i64;

    fn is_local_optimum(&self, state: &Self::State) -> bool {
        self.potential(state) >= self.potential(&self.neighbor(state))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchState {
    pub vertex: usize,
    pub flow: FlowVector,
}

/// A fixed-width bit string, most significant bit first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        BitString(vec![true; len])
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn push_uint(&mut self, value: u64, width: usize) {
        for i in (0..width).rev() {
            self.0.push(i < 64 && (value >> i) & 1 == 1);
        }
    }

    /// Reads `width` bits as an unsigned integer; `None` if it does not fit
    /// in 64 bits.
    fn read_uint(&self, offset: usize, width: usize) -> Option<u64> {
        let mut v: u64 = 0;
        for &b in &self.0[offset..offset + width] {
            if v >> 63 != 0 {
                return None;
            }
            v = (v << 1) | u64::from(b);
        }
        Some(v)
    }

    /// Lowercase hex, four bits per digit, last digit zero-padded on the right.
    pub fn to_hex(&self) -> String {
        self.0
            .chunks(4)
            .map(|chunk| {
                let nibble = (0..4).fold(0u32, |acc, i| (acc << 1) | u32::from(*chunk.get(i).unwrap_or(&false)));
                char::from_digit(nibble, 16).expect("nibble is a hex digit")
            })
            .collect()
    }

    /// Parses `ceil(len / 4)` hex digits; padding bits must be zero.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let hex = hex.trim();
        let hex = hex.strip_prefix("0x").unwrap_or(hex);
        if hex.len() != len.div_ceil(4) {
            return Err(ArrivalError::BitString(format!(
                "expected {} hex digits for {len} bits, found {}",
                len.div_ceil(4),
                hex.len()
            )));
        }
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let d = c
                .to_digit(16)
                .ok_or_else(|| ArrivalError::BitString(format!("invalid hex digit {c:?}")))?;
            bits.extend((0..4).rev().map(|i| (d >> i) & 1 == 1));
        }
        if bits[len..].iter().any(|&b| b) {
            return Err(ArrivalError::BitString("nonzero padding bits".into()));
        }
        bits.truncate(len);
        Ok(BitString(bits))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// The S/V pair built from an augmented instance.
#[derive(Clone, Debug)]
pub struct ArrivalLocalOpt {
    aug: AugmentedInstance,
    /// `2^m`, the largest value a flow entry of a search state may hold.
    entry_cap: u64,
}

/// Builds the neighbor/potential pair for `H`.
/// Largest `H` whose potentials `2m * 2^m` fit in an `i64`.
pub const MAX_SEARCH_VERTICES: usize = 56;

/// Fails only when `H` has more than [`MAX_SEARCH_VERTICES`] vertices.
pub fn build_instance(aug: AugmentedInstance) -> Result<ArrivalLocalOpt> {
    if aug.m() > MAX_SEARCH_VERTICES {
        return Err(ArrivalError::Overflow("potentials of H do not fit in 64 bits"));
    }
    let entry_cap = 1u64 << aug.m();
    Ok(ArrivalLocalOpt { aug, entry_cap })
}

impl ArrivalLocalOpt {
    pub fn augmented(&self) -> &AugmentedInstance {
        &self.aug
    }

    pub fn h(&self) -> &SwitchGraph {
        &self.aug.h
    }

    pub fn m(&self) -> usize {
        self.aug.m()
    }

    pub fn entry_cap(&self) -> u64 {
        self.entry_cap
    }

    /// `(ō, 0)`, the image of every dead end.
    pub fn reset_state(&self) -> SearchState {
        SearchState { vertex: self.aug.o_bar, flow: FlowVector::zeros(self.m()) }
    }

    /// The state every malformed bit string decodes to: a flow with one odd
    /// traversal out of `ō` and no even one, which fails the parity condition
    /// whatever the destination.
    pub fn malformed_state(&self) -> SearchState {
        let mut flow = FlowVector::zeros(self.m());
        flow.set(EdgeSlot::odd(self.aug.o_bar), 1);
        SearchState { vertex: self.aug.o_bar, flow }
    }

    /// True when the state's flow is a switching flow of `(H, ō, vertex)`
    /// and lies in the domain.
    pub fn is_valid(&self, s: &SearchState) -> bool {
        s.vertex < self.m()
            && s.flow.len() == self.h().slot_count()
            && s.flow.counts().iter().all(|&c| c <= self.entry_cap)
            && is_switching_flow(self.h(), self.aug.o_bar, s.vertex, &s.flow).expect("dimensions checked")
    }

    pub fn vertex_bits(&self) -> usize {
        let m = self.m();
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }

    pub fn field_bits(&self) -> usize {
        self.m() + 1
    }

    pub fn encoded_len(&self) -> usize {
        self.vertex_bits() + 2 * self.m() * self.field_bits()
    }

    /// Vertex index in `ceil(log2 m)` bits, then one `(m + 1)`-bit field per
    /// slot in slot order, all big-endian.
    pub fn encode(&self, s: &SearchState) -> Result<BitString> {
        if s.vertex >= self.m() {
            return Err(ArrivalError::VertexOutOfRange { vertex: s.vertex, n: self.m() });
        }
        if s.flow.len() != self.h().slot_count() {
            return Err(ArrivalError::DimensionMismatch { expected: self.h().slot_count(), found: s.flow.len() });
        }
        if let Some(c) = s.flow.counts().iter().find(|&&c| c > self.entry_cap) {
            return Err(ArrivalError::BitString(format!("entry {c} exceeds 2^m = {}", self.entry_cap)));
        }
        let mut bits = BitString(Vec::with_capacity(self.encoded_len()));
        bits.push_uint(s.vertex as u64, self.vertex_bits());
        for &c in s.flow.counts() {
            bits.push_uint(c, self.field_bits());
        }
        Ok(bits)
    }

    /// Total: anything that is not the encoding of a domain element maps to
    /// [`ArrivalLocalOpt::malformed_state`].
    pub fn decode(&self, bits: &BitString) -> SearchState {
        if bits.len() != self.encoded_len() {
            return self.malformed_state();
        }
        let vb = self.vertex_bits();
        let fb = self.field_bits();
        let vertex = match bits.read_uint(0, vb) {
            Some(v) if (v as usize) < self.m() => v as usize,
            _ => return self.malformed_state(),
        };
        let mut counts = Vec::with_capacity(2 * self.m());
        for i in 0..2 * self.m() {
            match bits.read_uint(vb + i * fb, fb) {
                Some(c) if c <= self.entry_cap => counts.push(c),
                _ => return self.malformed_state(),
            }
        }
        SearchState { vertex, flow: FlowVector::from_counts(counts) }
    }
}

impl LocalOpt for ArrivalLocalOpt {
    type State = SearchState;

    fn neighbor(&self, s: &SearchState) -> SearchState {
        if !self.is_valid(s) || self.aug.is_terminal(s.vertex) {
            return self.reset_state();
        }
        let v = s.vertex;
        let parity = s.flow.next_parity(v);
        let slot = EdgeSlot::new(v, parity);
        assert!(
            s.flow.get(slot) < self.entry_cap,
            "slot {slot} of a valid flow holds {} >= 2^m; the exponential flow bound is violated",
            s.flow.get(slot)
        );
        let mut flow = s.flow.clone();
        flow.set(slot, s.flow.get(slot) + 1);
        SearchState { vertex: self.h().succ(v, parity), flow }
    }

    fn potential(&self, s: &SearchState) -> i64 {
        if !self.is_valid(s) {
            return -1;
        }
        // Entries are at most 2^m over 2m slots, m + 1 + log2(2m) < 63 bits.
        s.flow.total().expect("bounded entries") as i64
    }
}

/// The same instance over raw bit strings, with the potential shifted up by
/// one (invalid states score 0) so that it is nonnegative. The shift
/// preserves every comparison, hence every local optimum.
#[derive(Clone, Copy, Debug)]
pub struct BitLevel<'a>(pub &'a ArrivalLocalOpt);

impl LocalOpt for BitLevel<'_> {
    type State = BitString;

    fn neighbor(&self, bits: &BitString) -> BitString {
        let next = self.0.neighbor(&self.0.decode(bits));
        self.0.encode(&next).expect("neighbor stays in the domain")
    }

    fn potential(&self, bits: &BitString) -> i64 {
        self.0.potential(&self.0.decode(bits)) + 1
    }
}

/// `2m * 2^m + 2`: the largest potential plus one reset step, plus the
/// final optimality check.
pub fn default_walk_budget(m: usize) -> u64 {
    pow2(m)
        .and_then(|p| p.checked_mul(2 * m as u64))
        .and_then(|b| b.checked_add(2))
        .unwrap_or(u64::MAX)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkOutcome<S> {
    pub solution: S,
    /// Applications of the neighbor function before reaching the solution.
    pub steps: u64,
    /// Every visited state, starting with the start state, when requested.
    pub trace: Option<Vec<S>>,
}

fn iterate<I: LocalOpt>(
    inst: &I,
    start: I::State,
    budget: u64,
    record_trace: bool,
) -> Result<WalkOutcome<I::State>> {
    let mut trace = record_trace.then(|| vec![start.clone()]);
    let mut current = start;
    let mut steps = 0u64;
    loop {
        let next = inst.neighbor(&current);
        if inst.potential(&current) >= inst.potential(&next) {
            return Ok(WalkOutcome { solution: current, steps, trace });
        }
        if steps >= budget {
            return Err(ArrivalError::WalkBudgetExhausted { budget });
        }
        if let Some(t) = trace.as_mut() {
            t.push(next.clone());
        }
        current = next;
        steps += 1;
    }
}

/// Follows the neighbor function from `start` until the potential stops
/// increasing.
pub fn walk_localopt<I: LocalOpt>(
    inst: &I,
    start: I::State,
    budget: u64,
    record_trace: bool,
) -> Result<WalkOutcome<I::State>> {
    iterate(inst, start, budget, record_trace)
}

/// A LOCALOPT instance with a designated start; solutions must lie on the
/// path from the start.
#[derive(Clone, Debug)]
pub struct SinkOfPath<'a, I: LocalOpt> {
    pub instance: &'a I,
    pub start: I::State,
}

/// Returns the first local optimum on the path from the start together with
/// `r`, the number of neighbor applications that reach it.
pub fn walk_sink_of_path<I: LocalOpt>(inst: &SinkOfPath<'_, I>, budget: u64) -> Result<(I::State, u64)> {
    let out = iterate(inst.instance, inst.start.clone(), budget, false)?;
    Ok((out.solution, out.steps))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    /// A switching flow of `(H, ō, d)`: the original game terminates.
    Termination,
    /// A switching flow of `(H, ō, d̄)`: the original game runs forever.
    NonTermination,
}

impl CertificateKind {
    pub fn terminal(self) -> Terminal {
        match self {
            CertificateKind::Termination => Terminal::Dest,
            CertificateKind::NonTermination => Terminal::DestBar,
        }
    }
}

/// Solution of S-ARRIVAL. Serializes as a flow document plus `kind`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub origin: usize,
    pub dest: usize,
    pub counts: FlowVector,
    pub kind: CertificateKind,
}

/// Turns a local optimum into a certificate. Fails if the state is not a
/// local optimum, or if it is one but not a switching flow ending at a sink.
pub fn extract_certificate(inst: &ArrivalLocalOpt, solution: &SearchState) -> Result<Certificate> {
    if !inst.is_local_optimum(solution) {
        return Err(ArrivalError::Precondition(format!(
            "state at vertex {} is not a local optimum",
            solution.vertex
        )));
    }
    let aug = inst.augmented();
    let kind = match aug.terminal_of(solution.vertex) {
        Some(Terminal::Dest) => CertificateKind::Termination,
        Some(Terminal::DestBar) => CertificateKind::NonTermination,
        None => {
            return Err(ArrivalError::NonConformingOptimum {
                vertex: solution.vertex,
                reason: "vertex is neither d nor d̄".into(),
            })
        }
    };
    if !inst.is_valid(solution) {
        return Err(ArrivalError::NonConformingOptimum {
            vertex: solution.vertex,
            reason: "flow is not a switching flow".into(),
        });
    }
    Ok(Certificate { origin: aug.o_bar, dest: solution.vertex, counts: solution.flow.clone(), kind })
}

/// Augment, build S/V, walk from the reset state, and read off the
/// certificate.
pub fn solve_s_arrival(g: &SwitchGraph) -> Result<Certificate> {
    let inst = build_instance(augment(g))?;
    let out = walk_localopt(&inst, inst.reset_state(), default_walk_budget(inst.m()), false)?;
    extract_certificate(&inst, &out.solution)
}
