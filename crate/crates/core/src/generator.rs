//! Seeded random switch graphs. Output depends only on the spec: the PRNG is
//! ChaCha8 and every draw goes through `u32` ranges, so results agree across
//! platforms.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ArrivalError, Result};
use crate::graph::SwitchGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Every successor independently uniform over all vertices.
    Uniform,
    /// Successors lean toward higher ids, so most runs reach the last vertex.
    Layered,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Uniform => "uniform",
            Model::Layered => "layered",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(Model::Uniform),
            "layered" => Ok(Model::Layered),
            other => Err(format!("unknown model {other:?} (expected uniform or layered)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub seed: u64,
    pub model: Model,
}

/// Origin is vertex 0 and destination is vertex `n - 1`.
pub fn generate(spec: &GeneratorSpec) -> Result<SwitchGraph> {
    let n = spec.n;
    if n < 2 {
        return Err(ArrivalError::Precondition(format!("need at least 2 vertices, got {n}")));
    }
    let n32 = u32::try_from(n).map_err(|_| ArrivalError::Precondition(format!("n = {n} too large")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut even = Vec::with_capacity(n);
    let mut odd = Vec::with_capacity(n);
    for v in 0..n32 {
        for succ in [&mut even, &mut odd] {
            let w = match spec.model {
                Model::Uniform => rng.gen_range(0..n32),
                Model::Layered if v + 1 < n32 && rng.gen_range(0..4u32) != 0 => rng.gen_range(v + 1..n32),
                Model::Layered => rng.gen_range(0..n32),
            };
            succ.push(w as usize);
        }
    }
    SwitchGraph::new(even, odd, 0, n - 1)
}
