//! Switch graphs: every vertex owns exactly two outgoing edge slots, an even
//! and an odd successor, and the train alternates between them.
//!
//! Vertices are dense ids `0..n`. Edges are never stored as pairs; they are
//! addressed by [`EdgeSlot`] so that parallel edges (`even(v) == odd(v)`)
//! stay distinct coordinates of every flow vector.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{ArrivalError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];

    pub fn index(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_bit(bit: bool) -> Parity {
        if bit {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One of the `2n` outgoing edge slots of a switch graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSlot {
    pub tail: usize,
    pub parity: Parity,
}

impl EdgeSlot {
    pub fn new(tail: usize, parity: Parity) -> Self {
        EdgeSlot { tail, parity }
    }

    pub fn even(tail: usize) -> Self {
        EdgeSlot::new(tail, Parity::Even)
    }

    pub fn odd(tail: usize) -> Self {
        EdgeSlot::new(tail, Parity::Odd)
    }

    /// Position of this slot in flow vectors: vertex 0 even, vertex 0 odd,
    /// vertex 1 even, ...
    pub fn index(self) -> usize {
        2 * self.tail + self.parity.index()
    }

    pub fn from_index(index: usize) -> Self {
        EdgeSlot::new(index / 2, Parity::from_bit(index % 2 == 1))
    }
}

impl fmt::Display for EdgeSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.tail, self.parity)
    }
}

/// A single invariant violation found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyGraph,
    LengthMismatch { field: &'static str, expected: usize, found: usize },
    SuccessorOutOfRange { parity: Parity, vertex: usize, target: usize, n: usize },
    OriginOutOfRange { origin: usize, n: usize },
    DestOutOfRange { dest: usize, n: usize },
    OriginEqualsDest { vertex: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyGraph => write!(f, "vertex count must be positive"),
            Violation::LengthMismatch { field, expected, found } => {
                write!(f, "bad vertex count: `{field}` has {found} entries, expected {expected}")
            }
            Violation::SuccessorOutOfRange { parity, vertex, target, n } => write!(
                f,
                "successor out of range: {parity}[{vertex}] = {target}, but n = {n}"
            ),
            Violation::OriginOutOfRange { origin, n } => {
                write!(f, "origin {origin} out of range (n = {n})")
            }
            Violation::DestOutOfRange { dest, n } => write!(f, "dest {dest} out of range (n = {n})"),
            Violation::OriginEqualsDest { vertex } => {
                write!(f, "origin equals dest (both are vertex {vertex})")
            }
        }
    }
}

/// The raw, unvalidated graph record; this is also the JSON document shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub n: usize,
    pub origin: usize,
    pub dest: usize,
    pub even: Vec<usize>,
    pub odd: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Checks every invariant of a switch graph record and returns all violations.
/// An empty result means the record describes a legal switch graph.
pub fn validate(spec: &GraphSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = spec.n;
    if n == 0 {
        out.push(Violation::EmptyGraph);
    }
    for (field, len) in [("even", spec.even.len()), ("odd", spec.odd.len())] {
        if len != n {
            out.push(Violation::LengthMismatch { field, expected: n, found: len });
        }
    }
    if let Some(labels) = &spec.labels {
        if labels.len() != n {
            out.push(Violation::LengthMismatch { field: "labels", expected: n, found: labels.len() });
        }
    }
    for (parity, succ) in [(Parity::Even, &spec.even), (Parity::Odd, &spec.odd)] {
        for (vertex, &target) in succ.iter().enumerate() {
            if target >= n {
                out.push(Violation::SuccessorOutOfRange { parity, vertex, target, n });
            }
        }
    }
    if spec.origin >= n {
        out.push(Violation::OriginOutOfRange { origin: spec.origin, n });
    }
    if spec.dest >= n {
        out.push(Violation::DestOutOfRange { dest: spec.dest, n });
    }
    if spec.origin == spec.dest {
        out.push(Violation::OriginEqualsDest { vertex: spec.origin });
    }
    out
}

/// A validated switch graph together with its origin and destination.
///
/// Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SwitchGraph {
    even: Vec<usize>,
    odd: Vec<usize>,
    origin: usize,
    dest: usize,
    labels: Option<Vec<String>>,
}

impl SwitchGraph {
    pub fn new(even: Vec<usize>, odd: Vec<usize>, origin: usize, dest: usize) -> Result<Self> {
        Self::from_spec(GraphSpec { n: even.len(), origin, dest, even, odd, labels: None })
    }

    pub fn from_spec(spec: GraphSpec) -> Result<Self> {
        let violations = validate(&spec);
        if !violations.is_empty() {
            return Err(ArrivalError::InvalidGraph(violations));
        }
        Ok(SwitchGraph {
            even: spec.even,
            odd: spec.odd,
            origin: spec.origin,
            dest: spec.dest,
            labels: spec.labels,
        })
    }

    /// Builds a graph without the `origin != dest` requirement. Successor
    /// ranges are still checked. Only used for the degenerate one-vertex game
    /// and for flipped copies used during flow completion.
    pub(crate) fn from_parts_unchecked_terminals(
        even: Vec<usize>,
        odd: Vec<usize>,
        origin: usize,
        dest: usize,
    ) -> Result<Self> {
        let spec = GraphSpec { n: even.len(), origin, dest, even, odd, labels: None };
        let violations: Vec<_> = validate(&spec)
            .into_iter()
            .filter(|v| !matches!(v, Violation::OriginEqualsDest { .. }))
            .collect();
        if !violations.is_empty() {
            return Err(ArrivalError::InvalidGraph(violations));
        }
        Ok(SwitchGraph { even: spec.even, odd: spec.odd, origin, dest, labels: None })
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            n: self.n(),
            origin: self.origin,
            dest: self.dest,
            even: self.even.clone(),
            odd: self.odd.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.even.len()
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn dest(&self) -> usize {
        self.dest
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn even_succ(&self, v: usize) -> usize {
        self.even[v]
    }

    pub fn odd_succ(&self, v: usize) -> usize {
        self.odd[v]
    }

    pub fn succ(&self, v: usize, parity: Parity) -> usize {
        match parity {
            Parity::Even => self.even[v],
            Parity::Odd => self.odd[v],
        }
    }

    pub fn head(&self, slot: EdgeSlot) -> usize {
        self.succ(slot.tail, slot.parity)
    }

    pub fn slot_count(&self) -> usize {
        2 * self.n()
    }

    pub fn slots(&self) -> impl Iterator<Item = EdgeSlot> + '_ {
        (0..self.slot_count()).map(EdgeSlot::from_index)
    }

    /// Same successors, different terminals.
    pub fn with_terminals(&self, origin: usize, dest: usize) -> Result<Self> {
        let mut spec = self.to_spec();
        spec.origin = origin;
        spec.dest = dest;
        Self::from_spec(spec)
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(ArrivalError::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    /// Incoming slots per vertex, in slot order.
    pub fn predecessor_slots(&self) -> Vec<Vec<EdgeSlot>> {
        let mut preds = vec![Vec::new(); self.n()];
        for slot in self.slots() {
            preds[self.head(slot)].push(slot);
        }
        preds
    }

    /// Shortest path length from every vertex to `target` along edge slots,
    /// or `None` when `target` is unreachable.
    pub fn distances_to(&self, target: usize) -> Vec<Option<u32>> {
        let preds = self.predecessor_slots();
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[target] = Some(0);
        queue.push_back(target);
        while let Some(w) = queue.pop_front() {
            let dw = dist[w].expect("queued vertices have a distance");
            for slot in &preds[w] {
                if dist[slot.tail].is_none() {
                    dist[slot.tail] = Some(dw + 1);
                    queue.push_back(slot.tail);
                }
            }
        }
        dist
    }

    /// All vertices with a directed path (possibly empty) to `target`.
    pub fn reverse_reachable(&self, target: usize) -> Result<BTreeSet<usize>> {
        self.check_vertex(target)?;
        Ok(self
            .distances_to(target)
            .iter()
            .enumerate()
            .filter_map(|(v, d)| d.map(|_| v))
            .collect())
    }
}

/// Parses a graph document. Unknown fields and invariant violations are
/// rejected; syntax errors carry line and column.
pub fn parse(text: &str) -> Result<SwitchGraph> {
    let spec: GraphSpec = serde_json::from_str(text).map_err(|e| ArrivalError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    SwitchGraph::from_spec(spec)
}

/// Canonical compact JSON; keys appear in the fixed order
/// `n, origin, dest, even, odd, labels`.
pub fn serialize(g: &SwitchGraph) -> String {
    serde_json::to_string(&g.to_spec()).expect("graph spec serializes")
}

pub fn to_dot(g: &SwitchGraph) -> String {
    let mut out = String::from("digraph switch_graph {\n");
    for v in 0..g.n() {
        let label = g.labels().map(|l| l[v].as_str());
        let role = if v == g.origin() {
            ", role=\"origin\""
        } else if v == g.dest() {
            ", role=\"dest\""
        } else {
            ""
        };
        match label {
            Some(l) => writeln!(out, "  {v} [label={}{role}];", dot_quote(l)),
            None => writeln!(out, "  {v} [label=\"{v}\"{role}];"),
        }
        .expect("writing to a String");
    }
    for slot in g.slots() {
        writeln!(out, "  {} -> {} [parity=\"{}\"];", slot.tail, g.head(slot), slot.parity)
            .expect("writing to a String");
    }
    out.push_str("}\n");
    out
}

fn dot_quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            q.push('\\');
        }
        q.push(c);
    }
    q.push('"');
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, even: Vec<usize>, odd: Vec<usize>, origin: usize, dest: usize) -> GraphSpec {
        GraphSpec { n, origin, dest, even, odd, labels: None }
    }

    #[test]
    fn minimal_graph_is_valid() {
        assert!(validate(&spec(2, vec![1, 1], vec![1, 1], 0, 1)).is_empty());
    }

    #[test]
    fn origin_equal_to_dest_is_reported() {
        let v = validate(&spec(2, vec![1, 1], vec![1, 1], 1, 1));
        assert_eq!(v, vec![Violation::OriginEqualsDest { vertex: 1 }]);
        assert!(v[0].to_string().contains("origin equals dest"));
    }

    #[test]
    fn out_of_range_successor_is_reported() {
        let v = validate(&spec(2, vec![5, 1], vec![1, 1], 0, 1));
        assert_eq!(
            v,
            vec![Violation::SuccessorOutOfRange { parity: Parity::Even, vertex: 0, target: 5, n: 2 }]
        );
        assert!(v[0].to_string().contains("successor out of range"));
    }

    #[test]
    fn every_violation_is_collected() {
        let v = validate(&spec(3, vec![0, 9], vec![0, 0, 7], 4, 4));
        assert!(v.contains(&Violation::LengthMismatch { field: "even", expected: 3, found: 2 }));
        assert!(v.iter().any(|x| matches!(x, Violation::SuccessorOutOfRange { target: 9, .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::SuccessorOutOfRange { target: 7, .. })));
        assert!(v.contains(&Violation::OriginOutOfRange { origin: 4, n: 3 }));
        assert!(v.contains(&Violation::DestOutOfRange { dest: 4, n: 3 }));
        assert!(v.contains(&Violation::OriginEqualsDest { vertex: 4 }));
        assert_eq!(validate(&spec(0, vec![], vec![], 0, 1))[0], Violation::EmptyGraph);
    }

    #[test]
    fn reverse_reachability_examples() {
        let t1 = SwitchGraph::new(vec![1, 1], vec![1, 1], 0, 1).unwrap();
        assert_eq!(t1.reverse_reachable(1).unwrap(), BTreeSet::from([0, 1]));
        let t3 = SwitchGraph::new(vec![1, 0, 2], vec![1, 0, 2], 0, 2).unwrap();
        assert_eq!(t3.reverse_reachable(2).unwrap(), BTreeSet::from([2]));
        assert!(t3.reverse_reachable(0).unwrap().contains(&0));
        assert!(t3.reverse_reachable(3).is_err());
    }

    #[test]
    fn slots_cover_both_parities_even_when_parallel() {
        let g = SwitchGraph::new(vec![1, 1], vec![1, 1], 0, 1).unwrap();
        let slots: Vec<_> = g.slots().collect();
        assert_eq!(slots.len(), 4);
        assert_eq!(slots[1], EdgeSlot::odd(0));
        assert_eq!(g.head(slots[0]), g.head(slots[1]));
        for (i, s) in slots.iter().enumerate() {
            assert_eq!(s.index(), i);
        }
    }

    #[test]
    fn parse_rejects_unknown_fields_with_position() {
        let err = parse(r#"{"n":2,"origin":0,"dest":1,"even":[1,1],"odd":[1,1],"extra":3}"#)
            .unwrap_err();
        match err {
            ArrivalError::Parse { line, column, message } => {
                assert_eq!(line, 1);
                assert!(column > 0);
                assert!(message.contains("extra"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_invariant_violations() {
        let err = parse(r#"{"n":2,"origin":0,"dest":0,"even":[1,1],"odd":[1,1]}"#).unwrap_err();
        assert!(matches!(err, ArrivalError::InvalidGraph(_)));
    }

    #[test]
    fn canonical_document_round_trips() {
        let text = r#"{"n":2,"origin":0,"dest":1,"even":[1,1],"odd":[1,1]}"#;
        assert_eq!(serialize(&parse(text).unwrap()), text);
        let labelled = r#"{"n":2,"origin":0,"dest":1,"even":[1,1],"odd":[0,1],"labels":["a","b"]}"#;
        assert_eq!(serialize(&parse(labelled).unwrap()), labelled);
    }

    #[test]
    fn dot_has_one_edge_line_per_slot() {
        let g = SwitchGraph::new(vec![1, 0, 2], vec![1, 0, 2], 0, 2).unwrap();
        let dot = to_dot(&g);
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 6);
        assert!(dot.contains("0 -> 1 [parity=\"odd\"];"));
        assert_eq!(dot, to_dot(&g));
    }
}
