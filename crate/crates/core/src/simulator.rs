//! Exact execution of the RUN procedure.
//!
//! The train starts at the origin with every switch pointing to its even
//! successor. Each step leaves the current vertex through the slot the switch
//! points to and then flips that switch. The swap of `s_curr`/`s_next` is a
//! single bit flip in [`SwitchConfig`]; the graph itself is never mutated.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{ArrivalError, Result};
use crate::flow_vector::FlowVector;
use crate::graph::{EdgeSlot, Parity, SwitchGraph};

/// Default vertex count up to which runs keep a visited-state table.
pub const DEFAULT_CYCLE_THRESHOLD: usize = 20;

/// Switch positions, one bit per vertex. Bit `v` clear means the next exit
/// from `v` uses the even slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SwitchConfig {
    words: Vec<u64>,
    len: usize,
}

impl SwitchConfig {
    pub fn zeros(len: usize) -> Self {
        SwitchConfig { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, v: usize) -> bool {
        assert!(v < self.len, "switch {v} out of range");
        self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn set(&mut self, v: usize, bit: bool) {
        assert!(v < self.len, "switch {v} out of range");
        let mask = 1u64 << (v % 64);
        if bit {
            self.words[v / 64] |= mask;
        } else {
            self.words[v / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, v: usize) {
        assert!(v < self.len, "switch {v} out of range");
        self.words[v / 64] ^= 1u64 << (v % 64);
    }

    pub fn parity(&self, v: usize) -> Parity {
        Parity::from_bit(self.get(v))
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut c = SwitchConfig::zeros(bits.len());
        for (v, &b) in bits.iter().enumerate() {
            c.set(v, b);
        }
        c
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len).map(|v| self.get(v)).collect()
    }
}

impl fmt::Display for SwitchConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in 0..self.len {
            f.write_str(if self.get(v) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for SwitchConfig {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SwitchConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(serde::de::Error::custom(format!("bad switch bit {other:?}"))),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(SwitchConfig::from_bits(&bits))
    }
}

/// One traversal of an edge slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub from: usize,
    pub parity: Parity,
    pub to: usize,
}

impl Step {
    pub fn slot(&self) -> EdgeSlot {
        EdgeSlot::new(self.from, self.parity)
    }

    /// `step <i>: <v> -<parity>-> <w>`, with `index` counting from 1.
    pub fn trace_line(&self, index: u64) -> String {
        format!("step {index}: {} -{}-> {}", self.from, self.parity, self.to)
    }
}

/// Incremental RUN executor. Stops at any vertex in its terminal set.
#[derive(Clone, Debug)]
pub struct Runner<'g> {
    graph: &'g SwitchGraph,
    terminals: Vec<usize>,
    vertex: usize,
    config: SwitchConfig,
    profile: FlowVector,
    steps: u64,
}

impl<'g> Runner<'g> {
    /// RUN from the graph's origin toward its destination.
    pub fn new(graph: &'g SwitchGraph) -> Self {
        Runner::from_state(graph, graph.origin(), SwitchConfig::zeros(graph.n()), vec![graph.dest()])
    }

    /// RUN from an arbitrary vertex and switch configuration, stopping at
    /// the first vertex in `terminals`.
    pub fn from_state(
        graph: &'g SwitchGraph,
        start: usize,
        config: SwitchConfig,
        terminals: Vec<usize>,
    ) -> Self {
        assert_eq!(config.len(), graph.n(), "configuration length must match the graph");
        Runner {
            graph,
            terminals,
            vertex: start,
            config,
            profile: FlowVector::zeros(graph.n()),
            steps: 0,
        }
    }

    pub fn vertex(&self) -> usize {
        self.vertex
    }

    pub fn config(&self) -> &SwitchConfig {
        &self.config
    }

    pub fn profile(&self) -> &FlowVector {
        &self.profile
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn at_terminal(&self) -> bool {
        self.terminals.contains(&self.vertex)
    }

    /// Executes one iteration of the loop body, or returns `None` when the
    /// current vertex is terminal.
    pub fn step(&mut self) -> Result<Option<Step>> {
        if self.at_terminal() {
            return Ok(None);
        }
        let v = self.vertex;
        let parity = self.config.parity(v);
        let w = self.graph.succ(v, parity);
        let next_steps = self.steps.checked_add(1).ok_or(ArrivalError::Overflow("step count"))?;
        self.profile.increment(EdgeSlot::new(v, parity))?;
        self.config.flip(v);
        self.vertex = w;
        self.steps = next_steps;
        Ok(Some(Step { from: v, parity, to: w }))
    }

    pub fn into_parts(self) -> (usize, FlowVector, SwitchConfig, u64) {
        (self.vertex, self.profile, self.config, self.steps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Terminated,
    NonTerminating,
    BudgetExhausted,
}

/// A state that repeated, with the two step counts at which it was current.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleWitness {
    pub vertex: usize,
    pub config: SwitchConfig,
    pub first_step: u64,
    pub second_step: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub profile: FlowVector,
    pub steps: u64,
    pub final_vertex: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_witness: Option<CycleWitness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Step cap; `None` selects [`default_budget`].
    pub budget: Option<u64>,
    /// Largest vertex count for which visited states are recorded.
    pub cycle_threshold: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { budget: None, cycle_threshold: DEFAULT_CYCLE_THRESHOLD }
    }
}

/// `2n * 2^n`, saturating. A terminating run never needs more steps, since
/// each of the `2n` slots is traversed fewer than `2^n` times.
pub fn default_budget(n: usize) -> u64 {
    pow2(n).and_then(|p| p.checked_mul(2 * n as u64)).unwrap_or(u64::MAX)
}

pub(crate) fn pow2(k: usize) -> Option<u64> {
    if k < 64 {
        Some(1u64 << k)
    } else {
        None
    }
}

pub fn run(g: &SwitchGraph, budget: Option<u64>) -> Result<RunOutcome> {
    run_with(g, &RunOptions { budget, ..RunOptions::default() })
}

pub fn run_with(g: &SwitchGraph, opts: &RunOptions) -> Result<RunOutcome> {
    run_observed(g, opts, |_, _| {})
}

/// Like [`run_with`], calling `observe` with every step and its 1-based index.
pub fn run_observed(
    g: &SwitchGraph,
    opts: &RunOptions,
    mut observe: impl FnMut(u64, &Step),
) -> Result<RunOutcome> {
    let budget = opts.budget.unwrap_or_else(|| default_budget(g.n()));
    let mut seen: Option<HashMap<(usize, SwitchConfig), u64>> =
        (g.n() <= opts.cycle_threshold).then(HashMap::new);
    let mut runner = Runner::new(g);
    let mut witness = None;
    loop {
        if runner.at_terminal() {
            break;
        }
        if let Some(seen) = seen.as_mut() {
            let key = (runner.vertex(), runner.config().clone());
            if let Some(&first_step) = seen.get(&key) {
                witness = Some(CycleWitness {
                    vertex: key.0,
                    config: key.1,
                    first_step,
                    second_step: runner.steps(),
                });
                break;
            }
            seen.insert(key, runner.steps());
        }
        if runner.steps() >= budget {
            break;
        }
        let step = runner.step()?.expect("non-terminal vertex always steps");
        observe(runner.steps(), &step);
    }
    let verdict = if runner.at_terminal() {
        Verdict::Terminated
    } else if witness.is_some() {
        Verdict::NonTerminating
    } else {
        Verdict::BudgetExhausted
    };
    let (final_vertex, profile, _, steps) = runner.into_parts();
    Ok(RunOutcome { verdict, profile, steps, final_vertex, cycle_witness: witness })
}

/// The state after exactly `t` iterations of the loop body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixState {
    pub vertex: usize,
    pub profile: FlowVector,
    pub config: SwitchConfig,
}

/// Re-simulates from the origin for exactly `t` steps. `t` may not exceed
/// the step count of a terminating run, nor the default budget.
pub fn run_prefix(g: &SwitchGraph, t: u64) -> Result<PrefixState> {
    let budget = default_budget(g.n());
    if t > budget {
        return Err(ArrivalError::PrefixBeyondBudget { requested: t, budget });
    }
    let mut runner = Runner::new(g);
    while runner.steps() < t {
        if runner.step()?.is_none() {
            return Err(ArrivalError::PrefixBeyondTermination { requested: t, steps: runner.steps() });
        }
    }
    let (vertex, profile, config, _) = runner.into_parts();
    Ok(PrefixState { vertex, profile, config })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Terminates,
    DoesNotTerminate,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Terminates => "terminates",
            Decision::DoesNotTerminate => "does-not-terminate",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Decides ARRIVAL. There are only `n * 2^n` (vertex, configuration)
/// states, so within `n * 2^n + 1` transitions either the destination is
/// reached or some state has repeated.
pub fn decide_arrival(g: &SwitchGraph) -> Result<Decision> {
    decide_arrival_with(g, DEFAULT_CYCLE_THRESHOLD)
}

pub fn decide_arrival_with(g: &SwitchGraph, cycle_threshold: usize) -> Result<Decision> {
    let budget = pow2(g.n())
        .and_then(|p| p.checked_mul(g.n() as u64))
        .and_then(|s| s.checked_add(1))
        .ok_or(ArrivalError::Overflow("state-space bound n * 2^n"))?;
    let outcome = run_with(g, &RunOptions { budget: Some(budget), cycle_threshold })?;
    Ok(match outcome.verdict {
        Verdict::Terminated => Decision::Terminates,
        // Past the state-space bound a repeat is certain even when states
        // were not recorded.
        Verdict::NonTerminating | Verdict::BudgetExhausted => Decision::DoesNotTerminate,
    })
}
