//! End-to-end property suite over seeded random instances.
//!
//! Each instance is checked for: duality of the augmented games, run
//! profiles and run prefixes being switching flows, the exponential and
//! desperation bounds, flow completion, walk/run trace equivalence with
//! strict potential ascent, certificate agreement, and agreement of the two
//! walkers. Instances are evaluated in parallel; results are merged in
//! instance order so reports are byte-identical across runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::flow_vector::FlowVector;
use crate::flows::{check_bounds, complete, verify};
use crate::generator::{generate, GeneratorSpec, Model};
use crate::graph::{serialize, SwitchGraph};
use crate::local_search::{
    build_instance, default_walk_budget, extract_certificate, solve_s_arrival, walk_localopt,
    walk_sink_of_path, CertificateKind, LocalOpt, SinkOfPath,
};
use crate::reduction::{augment, check_duality, AugmentedInstance, Terminal};
use crate::simulator::{default_budget, run, Decision, Runner, SwitchConfig, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Duality,
    RunProfiles,
    PrefixFlows,
    FlowBounds,
    Completion,
    TraceEquivalence,
    StrictAscent,
    EndToEnd,
    SinkOfPath,
    Execution,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::Duality,
        Property::RunProfiles,
        Property::PrefixFlows,
        Property::FlowBounds,
        Property::Completion,
        Property::TraceEquivalence,
        Property::StrictAscent,
        Property::EndToEnd,
        Property::SinkOfPath,
        Property::Execution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Duality => "duality",
            Property::RunProfiles => "run-profiles",
            Property::PrefixFlows => "prefix-flows",
            Property::FlowBounds => "flow-bounds",
            Property::Completion => "completion",
            Property::TraceEquivalence => "trace-equivalence",
            Property::StrictAscent => "strict-ascent",
            Property::EndToEnd => "end-to-end",
            Property::SinkOfPath => "sink-of-path",
            Property::Execution => "execution",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub n_max: usize,
    pub count: usize,
    pub seed: u64,
    /// Random prefix cutoffs completed per instance.
    pub completions_per_instance: usize,
    /// Checks prefix flows with origin and destination swapped, a
    /// deliberately broken verifier that the suite must catch.
    pub mutate: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { n_max: 8, count: 200, seed: 7, completions_per_instance: 3, mutate: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub property: Property,
    pub checks: u64,
    pub failures: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub property: Property,
    pub instance: usize,
    /// Replays with `gen --n <n> --seed <seed> --model <model>`.
    pub generator: GeneratorSpec,
    pub graph: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub instances: usize,
    pub terminating: usize,
    pub tallies: Vec<Tally>,
    pub pass: bool,
    pub first_failure: Option<Failure>,
}

impl CheckReport {
    pub fn tally(&self, p: Property) -> &Tally {
        self.tallies.iter().find(|t| t.property == p).expect("every property is tallied")
    }
}

/// The generator specs of a suite run: sizes uniform in `2..=n_max`,
/// alternating uniform and layered models.
pub fn suite_instances(cfg: &CheckConfig) -> Vec<GeneratorSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_max = cfg.n_max.max(2) as u32;
    (0..cfg.count)
        .map(|i| GeneratorSpec {
            n: rng.gen_range(2..=n_max) as usize,
            seed: rng.gen(),
            model: if i % 2 == 0 { Model::Uniform } else { Model::Layered },
        })
        .collect()
}

pub fn run_suite(cfg: &CheckConfig) -> CheckReport {
    let specs = suite_instances(cfg);
    let results: Vec<InstanceResult> = specs.par_iter().map(|spec| check_instance(spec, cfg)).collect();

    let mut tallies: Vec<Tally> =
        Property::ALL.iter().map(|&property| Tally { property, checks: 0, failures: 0 }).collect();
    let mut first_failure = None;
    let mut terminating = 0;
    for (i, (spec, r)) in specs.iter().zip(results).enumerate() {
        terminating += usize::from(r.terminates);
        for (t, (c, f)) in tallies.iter_mut().zip(r.counts) {
            t.checks += c;
            t.failures += f;
        }
        if first_failure.is_none() {
            if let Some((property, detail)) = r.first_failure {
                first_failure = Some(Failure {
                    property,
                    instance: i,
                    generator: *spec,
                    graph: generate(spec).map(|g| serialize(&g)).unwrap_or_default(),
                    detail,
                });
            }
        }
    }
    CheckReport {
        instances: specs.len(),
        terminating,
        pass: first_failure.is_none(),
        tallies,
        first_failure,
    }
}

/// Per-instance counters, indexed like [`Property::ALL`].
struct InstanceResult {
    counts: [(u64, u64); 10],
    first_failure: Option<(Property, String)>,
    terminates: bool,
}

impl InstanceResult {
    fn record(&mut self, p: Property, ok: bool, detail: impl FnOnce() -> String) {
        let slot = &mut self.counts[p as usize];
        slot.0 += 1;
        if !ok {
            slot.1 += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some((p, detail()));
            }
        }
    }
}

fn check_instance(spec: &GeneratorSpec, cfg: &CheckConfig) -> InstanceResult {
    let mut r = InstanceResult { counts: [(0, 0); 10], first_failure: None, terminates: false };
    let outcome = generate(spec).and_then(|g| check_graph(&g, cfg, spec.seed, &mut r));
    if let Err(e) = outcome {
        r.record(Property::Execution, false, || e.to_string());
    }
    r
}

fn prefix_valid(g: &SwitchGraph, origin: usize, current: usize, x: &FlowVector, mutate: bool) -> Result<bool> {
    let (o, d) = if mutate { (current, origin) } else { (origin, current) };
    Ok(verify(g, o, d, x)?.valid)
}

/// Every non-sink slot below `2^m`, and at most one unit out of `ō`.
fn within_exponential_bound(aug: &AugmentedInstance, x: &FlowVector) -> bool {
    let cap = 1u64 << aug.m();
    x.iter().all(|(slot, c)| {
        aug.is_terminal(slot.tail) || (c < cap && (slot.tail != aug.o_bar || c <= 1))
    })
}

fn check_graph(g: &SwitchGraph, cfg: &CheckConfig, completion_seed: u64, r: &mut InstanceResult) -> Result<()> {
    let duality = check_duality(g)?;
    r.terminates = duality.g == Decision::Terminates;
    r.record(Property::Duality, duality.pass, || format!("duality table violated: {duality:?}"));

    // Runs and prefixes on G, up to termination or the first repeated state.
    let outcome = run(g, None)?;
    let mut runner = Runner::new(g);
    loop {
        let ok = prefix_valid(g, g.origin(), runner.vertex(), runner.profile(), cfg.mutate)?;
        let t = runner.steps();
        r.record(Property::PrefixFlows, ok, || format!("prefix of G at step {t} is not a switching flow"));
        if runner.steps() >= outcome.steps || runner.step()?.is_none() {
            break;
        }
    }
    if outcome.verdict == Verdict::Terminated {
        let ok = verify(g, g.origin(), g.dest(), &outcome.profile)?.valid;
        r.record(Property::RunProfiles, ok, || "run profile of G is not a switching flow".into());
    }

    // RUN on H until either sink.
    let aug = augment(g);
    let m = aug.m();
    let mut hr = Runner::from_state(&aug.h, aug.o_bar, SwitchConfig::zeros(m), vec![aug.source_dest, aug.d_bar]);
    let mut prefixes = vec![(hr.vertex(), hr.profile().clone())];
    let budget = default_budget(m);
    while !hr.at_terminal() && hr.steps() < budget {
        hr.step()?;
        prefixes.push((hr.vertex(), hr.profile().clone()));
    }
    let reached = aug.terminal_of(hr.vertex());
    let expected = if r.terminates { Terminal::Dest } else { Terminal::DestBar };
    r.record(Property::Duality, reached == Some(expected), || {
        format!("RUN on H from ō ended at {:?}, expected {expected:?}", reached)
    });
    let Some(reached) = reached else { return Ok(()) };
    let reached_vertex = aug.terminal_vertex(reached);
    let full = prefixes.last().expect("at least the start").1.clone();

    for (t, (v, x)) in prefixes.iter().enumerate() {
        let ok = prefix_valid(&aug.h, aug.o_bar, *v, x, cfg.mutate)?;
        r.record(Property::PrefixFlows, ok, || format!("prefix of H at step {t} is not a switching flow"));
        r.record(Property::FlowBounds, within_exponential_bound(&aug, x), || {
            format!("prefix of H at step {t} exceeds the exponential bound")
        });
    }
    let ok = verify(&aug.h, aug.o_bar, reached_vertex, &full)?.valid;
    r.record(Property::RunProfiles, ok, || "run profile of H is not a switching flow".into());
    let bounds = check_bounds(&aug, &full, reached_vertex)?;
    r.record(Property::FlowBounds, bounds.pass, || format!("run profile of H: {:?}", bounds.violations));

    // Completion from random cutoffs.
    let last = (prefixes.len() - 1) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(completion_seed ^ 0x5eed_c0de);
    for _ in 0..cfg.completions_per_instance {
        let t = rng.gen_range(1..=last) as usize;
        let (u, x) = &prefixes[t];
        let c = complete(&aug, *u, x)?;
        let verifies = verify(&aug.h, aug.o_bar, c.reached_vertex, &c.z)?.valid;
        let monotone = c.z.iter().all(|(slot, z)| aug.is_terminal(slot.tail) || z >= x.get(slot));
        let into_sink: u64 = aug
            .h
            .slots()
            .filter(|&s| s.tail != c.reached_vertex && aug.h.head(s) == c.reached_vertex)
            .map(|s| c.z.get(s))
            .sum();
        r.record(Property::Completion, verifies && monotone && into_sink == 1, || {
            format!("completion from step {t}: verifies={verifies} monotone={monotone} into_sink={into_sink}")
        });
        r.record(Property::Completion, c.reached == reached && c.z == full, || {
            format!("completion from step {t} disagrees with the full run")
        });
        let b = check_bounds(&aug, &c.z, c.reached_vertex)?;
        r.record(Property::FlowBounds, b.pass, || format!("completion from step {t}: {:?}", b.violations));
    }

    // The walk from the reset state retraces RUN on H.
    let inst = build_instance(aug.clone())?;
    let walk = walk_localopt(&inst, inst.reset_state(), default_walk_budget(m), true)?;
    let trace = walk.trace.as_ref().expect("trace requested");
    let same = trace.len() == prefixes.len()
        && trace.iter().zip(&prefixes).all(|(s, (v, x))| s.vertex == *v && &s.flow == x);
    r.record(Property::TraceEquivalence, same, || {
        format!("walk of {} states differs from RUN prefixes ({} states)", trace.len(), prefixes.len())
    });
    for (i, pair) in trace.windows(2).enumerate() {
        let (p0, p1) = (inst.potential(&pair[0]), inst.potential(&pair[1]));
        r.record(Property::StrictAscent, p0 >= 0 && p1 == p0 + 1, || {
            format!("potential went from {p0} to {p1} at walk step {i}")
        });
    }

    let cert = extract_certificate(&inst, &walk.solution)?;
    let solved = solve_s_arrival(g)?;
    let want = if r.terminates { CertificateKind::Termination } else { CertificateKind::NonTermination };
    let cert_ok = verify(&aug.h, cert.origin, cert.dest, &cert.counts)?.valid;
    r.record(Property::EndToEnd, cert.kind == want && solved == cert && cert_ok, || {
        format!("certificate {:?} vs decision {:?}", cert.kind, duality.g)
    });

    let sop = SinkOfPath { instance: &inst, start: inst.reset_state() };
    let (sol, steps) = walk_sink_of_path(&sop, default_walk_budget(m))?;
    r.record(Property::SinkOfPath, sol == walk.solution && steps == walk.steps, || {
        format!("sink-of-path returned r = {steps}, LOCALOPT trace length {}", walk.steps)
    });

    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let cfg = CheckConfig { n_max: 6, count: 40, seed: 3, ..CheckConfig::default() };
        let a = run_suite(&cfg);
        assert!(a.pass, "{:?}", a.first_failure);
        assert_eq!(a, run_suite(&cfg));
        assert!(a.tally(Property::PrefixFlows).checks > 0);
    }

    #[test]
    fn mutation_is_caught() {
        let cfg = CheckConfig { n_max: 5, count: 10, seed: 1, mutate: true, ..CheckConfig::default() };
        let report = run_suite(&cfg);
        assert!(!report.pass);
        let f = report.first_failure.unwrap();
        assert_eq!(f.property, Property::PrefixFlows);
        let replay = generate(&f.generator).unwrap();
        assert_eq!(serialize(&replay), f.graph);
    }
}
