//! Solver outcome records, serializable to JSON.

use serde::{Deserialize, Serialize, Serializer};

use crate::hypergraph::{Bipartition, Hypergraph, Side, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Elem,
    Reg,
    Fano,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Elem => "elem",
            Algo::Reg => "reg",
            Algo::Fano => "fano",
        }
    }
}

impl std::str::FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "elem" => Ok(Algo::Elem),
            "reg" => Ok(Algo::Reg),
            "fano" => Ok(Algo::Fano),
            other => Err(format!("unknown algorithm `{other}` (expected elem, reg or fano)")),
        }
    }
}

/// Which step produced the answer: the polynomial candidate (3(i)), the
/// exhaustive bipartition search (3(ii)) or the smallest-partition search (3(iii)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Path {
    Step3i,
    Step3ii,
    Step3iii,
    Error,
}

impl Path {
    pub fn name(self) -> &'static str {
        match self {
            Path::Step3i => "step3i",
            Path::Step3ii => "step3ii",
            Path::Step3iii => "step3iii",
            Path::Error => "error",
        }
    }
}

impl std::str::FromStr for Path {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "step3i" => Ok(Path::Step3i),
            "step3ii" => Ok(Path::Step3ii),
            "step3iii" => Ok(Path::Step3iii),
            "error" => Ok(Path::Error),
            other => Err(format!("unknown path `{other}`")),
        }
    }
}

/// Input class for the Fano-free composite: `1` σ-standard (answered by the
/// candidate), `2` bipartite otherwise, `3` not bipartite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FanoCase {
    Case1,
    Case2,
    Case3,
}

/// Stage wall times in nanoseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StageTimings {
    pub stage1_ns: u64,
    pub stage2_ns: u64,
    pub stage3_ns: u64,
}

impl StageTimings {
    pub fn total_ns(&self) -> u64 {
        self.stage1_ns + self.stage2_ns + self.stage3_ns
    }
}

/// Outcome of one link set `J` in the regularity solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JRecord {
    /// 1-based.
    #[serde(serialize_with = "one_based")]
    pub j: Vec<Vertex>,
    pub t: usize,
    pub regular_pairs: usize,
    pub cap_exceeded: bool,
    pub approx_x_size: usize,
    /// `|X^≈ △ X^ed|`, the number of labels the edit step changed.
    pub edit_changes: usize,
    pub independent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub algo: Algo,
    pub path_taken: Path,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    #[serde(serialize_with = "partition_sides")]
    pub partition: Option<Bipartition>,
    /// Number of independent classes in the answer; 2 for a bipartition.
    pub r: Option<usize>,
    /// 1-based classes when the answer is not a bipartition.
    #[serde(serialize_with = "one_based_classes")]
    pub classes: Option<Vec<Vec<Vertex>>>,
    pub fano_case: Option<FanoCase>,
    pub timings: StageTimings,
    pub total_ns: u64,
    pub j_records: Vec<JRecord>,
}

impl SolveReport {
    pub fn new(algo: Algo, h: &Hypergraph) -> Self {
        SolveReport {
            algo,
            path_taken: Path::Error,
            n: h.n(),
            k: h.k(),
            m: h.num_edges(),
            partition: None,
            r: None,
            classes: None,
            fano_case: None,
            timings: StageTimings::default(),
            total_ns: 0,
            j_records: Vec::new(),
        }
    }

    pub(crate) fn finish(mut self) -> Self {
        self.total_ns = self.timings.total_ns();
        self
    }
}

fn one_based<S: Serializer>(vs: &[Vertex], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(vs.iter().map(|v| v + 1))
}

fn one_based_classes<S: Serializer>(classes: &Option<Vec<Vec<Vertex>>>, s: S) -> Result<S::Ok, S::Error> {
    match classes {
        None => s.serialize_none(),
        Some(cs) => s.collect_seq(cs.iter().map(|c| c.iter().map(|v| v + 1).collect::<Vec<_>>())),
    }
}

#[derive(Serialize)]
struct Sides {
    x: Vec<Vertex>,
    y: Vec<Vertex>,
}

fn partition_sides<S: Serializer>(p: &Option<Bipartition>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        None => s.serialize_none(),
        Some(p) => {
            let side = |side| p.members(side).into_iter().map(|v| v + 1).collect();
            s.serialize_some(&Sides { x: side(Side::X), y: side(Side::Y) })
        }
    }
}

pub(crate) fn elapsed_ns(start: std::time::Instant) -> u64 {
    start.elapsed().as_nanos().min(u64::MAX as u128) as u64
}

/// Execution settings shared by the solvers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub exec: crate::par::Exec,
    pub limits: crate::exhaustive::SearchLimits,
}
