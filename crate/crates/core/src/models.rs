//! Seeded random instance generators.
//!
//! All randomness comes from ChaCha8 (`rand_chacha`), which is portable and
//! produces the same stream on every platform. One seed drives independent
//! streams:
//!
//! * stream [`PARTITION_STREAM`] draws the planted partition;
//! * stream [`EDGE_STREAM`] decides candidate edges: the k-set of
//!   lexicographic rank `r` among all `C(n, k)` k-sets reads the 32-bit word
//!   at position `r` and is an edge iff it is crossing and the word's top bit
//!   is set;
//! * stream [`TRIAL_STREAM`] derives per-trial seeds, see [`derive_seed`].

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{for_each_subset, Bipartition, Hypergraph, Side};
use crate::verify::check_gamma_equitable;

pub const PARTITION_STREAM: u64 = 0;
pub const EDGE_STREAM: u64 = 1;
pub const TRIAL_STREAM: u64 = 2;
pub const SAMPLE_STREAM: u64 = 3;

/// Retry limit for the rejection samplers.
pub const REJECTION_CAP: usize = 10_000;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed for trial `trial` at size `n`: the 64-bit value at word position
/// `2 * (n * 2^32 + trial)` of stream [`TRIAL_STREAM`] under `base`.
pub fn derive_seed(base: u64, n: usize, trial: usize) -> u64 {
    let mut rng = stream_rng(base, TRIAL_STREAM);
    rng.set_word_pos(2 * (((n as u128) << 32) + trial as u128));
    rng.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PartitionSpec {
    /// Uniformly random split with sizes `⌊n/2⌋` / `⌈n/2⌉` (`X` gets the floor).
    ExactBalanced,
    /// Every vertex picks a side by a fair coin; empty sides are rejected.
    Binomial,
    /// Binomial draws rejected until `(1-γ)n/2 <= |smaller| <= |larger| <= (1+γ)n/2`.
    GammaEquitable(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    Planted,
    NearUniform,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Planted => "planted",
            Model::NearUniform => "near-uniform",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "planted" => Ok(Model::Planted),
            "near-uniform" => Ok(Model::NearUniform),
            other => Err(format!("unknown model `{other}` (expected planted or near-uniform)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub hypergraph: Hypergraph,
    pub planted: Bipartition,
    pub seed: u64,
    pub model: Model,
}

pub fn sample_partition(n: usize, spec: PartitionSpec, seed: u64) -> Result<Bipartition> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("partition needs n >= 2, got {n}")));
    }
    let mut rng = stream_rng(seed, PARTITION_STREAM);
    match spec {
        PartitionSpec::ExactBalanced => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            Ok(Bipartition::from_x_members(n, order[..n / 2].iter().copied()))
        }
        PartitionSpec::Binomial => {
            for _ in 0..REJECTION_CAP {
                let p = coin_partition(n, &mut rng);
                let (x, y) = p.sizes();
                if x > 0 && y > 0 {
                    return Ok(p);
                }
            }
            Err(Error::RejectionCap(REJECTION_CAP))
        }
        PartitionSpec::GammaEquitable(gamma) => {
            if !(gamma > 0.0 && gamma < 1.0) {
                return Err(Error::InvalidConfig(format!("gamma must lie in (0, 1), got {gamma}")));
            }
            for _ in 0..REJECTION_CAP {
                let p = coin_partition(n, &mut rng);
                let (x, y) = p.sizes();
                if x > 0 && y > 0 && check_gamma_equitable(&p, gamma) {
                    return Ok(p);
                }
            }
            Err(Error::RejectionCap(REJECTION_CAP))
        }
    }
}

fn coin_partition(n: usize, rng: &mut ChaCha8Rng) -> Bipartition {
    Bipartition::from_labels((0..n).map(|_| if rng.random::<bool>() { Side::X } else { Side::Y }).collect())
}

/// Draws `H_{X,Y}`: every crossing k-set is an edge independently with probability 1/2.
pub fn sample_planted(n: usize, k: usize, planted: &Bipartition, seed: u64) -> Result<PlantedInstance> {
    if planted.len() != n {
        return Err(Error::PartitionLength { expected: n, found: planted.len() });
    }
    let (x, y) = planted.sizes();
    if x == 0 || y == 0 {
        return Err(Error::DegeneratePartition);
    }
    if k < 2 {
        return Err(Error::UniformityTooSmall(k));
    }
    if n < k {
        return Err(Error::TooFewVertices { n, k });
    }
    let mut rng = stream_rng(seed, EDGE_STREAM);
    let labels = planted.labels();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    for_each_subset(n, k, |s| {
        let word = rng.next_u32();
        let first = labels[s[0]];
        let crossing = s[1..].iter().any(|&v| labels[v] != first);
        if crossing && word >> 31 == 1 {
            edges.push(s.to_vec());
        }
    });
    Ok(PlantedInstance {
        hypergraph: Hypergraph::new(n, k, edges)?,
        planted: planted.clone(),
        seed,
        model: Model::Planted,
    })
}

/// Proxy for uniform sampling over bipartite k-graphs: draw a partition by
/// `spec`, then the planted model on it.
///
/// This weights each hypergraph by its number of bipartitions. All but an
/// exponentially small fraction of bipartite k-graphs have exactly one, so the
/// bias is ignored rather than corrected.
pub fn sample_near_uniform(n: usize, k: usize, spec: PartitionSpec, seed: u64) -> Result<PlantedInstance> {
    let partition = sample_partition(n, spec, seed)?;
    let mut inst = sample_planted(n, k, &partition, seed)?;
    inst.model = Model::NearUniform;
    Ok(inst)
}

/// The benchmark's instance draw for `model`: exact-balanced planted, or
/// near-uniform with binomial sides.
pub fn sample_instance(model: Model, n: usize, k: usize, seed: u64) -> Result<PlantedInstance> {
    match model {
        Model::Planted => {
            let partition = sample_partition(n, PartitionSpec::ExactBalanced, seed)?;
            sample_planted(n, k, &partition, seed)
        }
        Model::NearUniform => sample_near_uniform(n, k, PartitionSpec::Binomial, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_candidate_edge() {
        let planted = Bipartition::from_x_members(3, [0]);
        let mut present = 0;
        for seed in 0..400 {
            let inst = sample_planted(3, 3, &planted, seed).unwrap();
            assert!(inst.hypergraph.num_edges() <= 1);
            present += inst.hypergraph.num_edges();
        }
        assert!((150..250).contains(&present), "{present}");
    }

    #[test]
    fn deterministic_per_seed() {
        let p = sample_partition(20, PartitionSpec::ExactBalanced, 9).unwrap();
        let a = sample_planted(20, 3, &p, 9).unwrap();
        let b = sample_planted(20, 3, &p, 9).unwrap();
        assert_eq!(a.hypergraph, b.hypergraph);
        let c = sample_planted(20, 3, &p, 10).unwrap();
        assert_ne!(a.hypergraph, c.hypergraph);
        let u = sample_near_uniform(20, 3, PartitionSpec::Binomial, 4).unwrap();
        let v = sample_near_uniform(20, 3, PartitionSpec::Binomial, 4).unwrap();
        assert_eq!(u.hypergraph, v.hypergraph);
        assert_eq!(u.planted, v.planted);
        assert_eq!(u.model, Model::NearUniform);
    }

    #[test]
    fn partitions_by_spec() {
        assert_eq!(sample_partition(10, PartitionSpec::ExactBalanced, 1).unwrap().sizes(), (5, 5));
        assert_eq!(sample_partition(11, PartitionSpec::ExactBalanced, 1).unwrap().sizes(), (5, 6));
        for seed in 0..50 {
            let p = sample_partition(100, PartitionSpec::GammaEquitable(0.1), seed).unwrap();
            let (x, y) = p.sizes();
            let (small, large) = (x.min(y), x.max(y));
            assert!(45 <= small && large <= 55, "{x}/{y}");
            let two = sample_partition(2, PartitionSpec::Binomial, seed).unwrap();
            assert_eq!(two.sizes(), (1, 1));
        }
        assert!(sample_partition(1, PartitionSpec::Binomial, 0).is_err());
        assert!(sample_partition(10, PartitionSpec::GammaEquitable(1.5), 0).is_err());
    }

    #[test]
    fn degenerate_planted_partition_is_rejected() {
        let all_x = Bipartition::from_x_members(5, 0..5);
        assert_eq!(sample_planted(5, 3, &all_x, 0).unwrap_err(), Error::DegeneratePartition);
    }

    #[test]
    fn no_edge_inside_a_side() {
        let inst = sample_near_uniform(4, 3, PartitionSpec::ExactBalanced, 17).unwrap();
        let x = inst.planted.side_set(Side::X);
        let y = inst.planted.side_set(Side::Y);
        assert!(inst.hypergraph.is_independent(&x));
        assert!(inst.hypergraph.is_independent(&y));
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let mut seeds: Vec<u64> =
            (0..50).flat_map(|t| [derive_seed(7, 40, t), derive_seed(7, 60, t)]).collect();
        let before = seeds.len();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), before);
        assert_eq!(derive_seed(7, 40, 3), derive_seed(7, 40, 3));
    }
}
