//! ARRIVAL on switch graphs and its search version S-ARRIVAL.
//!
//! * [`graph`]: switch graphs, edge slots, JSON and DOT formats.
//! * [`simulator`]: the RUN procedure, run prefixes, and a decisive
//!   termination test by state-cycle detection.
//! * [`reduction`]: the augmented graph `H` with fresh origin `ō` and sink `d̄`.
//! * [`flows`]: switching-flow verification, desperation, flow completion
//!   and its bound audit.
//! * [`local_search`]: the LOCALOPT instance whose local optima are
//!   S-ARRIVAL certificates, plus LOCALOPT and SINK-OF-PATH walkers.
//! * [`generator`] and [`check`]: seeded instances and the property suite.

pub mod check;
pub mod error;
pub mod flow_vector;
pub mod flows;
pub mod generator;
pub mod graph;
pub mod local_search;
pub mod reduction;
pub mod simulator;

pub use error::{ArrivalError, Result};
pub use flow_vector::FlowVector;
pub use flows::{check_bounds, complete, desperation, verify, FlowCheckReport, FlowDocument};
pub use generator::{generate, GeneratorSpec, Model};
pub use graph::{EdgeSlot, Parity, SwitchGraph};
pub use local_search::{
    build_instance, solve_s_arrival, walk_localopt, walk_sink_of_path, ArrivalLocalOpt, Certificate,
    CertificateKind, LocalOpt, SearchState,
};
pub use reduction::{augment, check_duality, AugmentedInstance, Terminal};
pub use simulator::{decide_arrival, run, run_prefix, Decision, RunOutcome, Runner, SwitchConfig, Verdict};
