//! The regularity-based solver.
//!
//! For each `(k-2)`-set `J` drawn from `L = [2k-5]`, the `J`-link graph is
//! regularized; classes of high cluster degree are split into sparse and
//! dense ones, giving an approximate bipartition `X^≈ ∪ Y^≈` that a degree
//! vote then corrects. The first `J` (in lexicographic order) whose
//! corrected sides are independent wins; otherwise the exhaustive search
//! decides.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exhaustive::{exhaustive_bipartition_with, SearchLimits};
use crate::hypergraph::{for_each_subset, Bipartition, Hypergraph, Side, Vertex};
use crate::par::Exec;
use crate::regularity::{
    cluster_degree_split, regularize, EquitablePartition, Graph, RegConfig, Regularization, StopStatus,
};
use crate::report::{elapsed_ns, Algo, JRecord, Path, SolveReport};

#[derive(Debug, Clone, PartialEq)]
pub struct RegBipConfig {
    /// Used both for regularizing and for the cluster-degree cutoff; it
    /// overrides `reg.epsilon`.
    pub epsilon: f64,
    pub reg: RegConfig,
    /// Replaces `L = [2k-5]` (0-based ids).
    pub l_override: Option<Vec<Vertex>>,
    /// The initial partition of a link graph on `N` vertices has
    /// `min(reg.t0, max(2, N / min_class_size))` classes.
    pub min_class_size: usize,
    pub limits: SearchLimits,
}

pub const MIN_CLASS_SIZE: usize = 32;

impl Default for RegBipConfig {
    fn default() -> Self {
        RegBipConfig {
            epsilon: 0.1,
            reg: RegConfig::default(),
            l_override: None,
            min_class_size: MIN_CLASS_SIZE,
            limits: SearchLimits::default(),
        }
    }
}

impl RegBipConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        RegBipConfig { epsilon, ..RegBipConfig::default() }
    }

    pub fn exec(&self) -> Exec {
        self.reg.exec
    }

    pub fn validate(&self) -> Result<()> {
        RegConfig { epsilon: self.epsilon, ..self.reg.clone() }.validate()
    }

    /// `L`, either the override or `[2k-5]`.
    pub fn index_set(&self, k: usize) -> Vec<Vertex> {
        match &self.l_override {
            Some(l) => l.clone(),
            None => (0..(2 * k).saturating_sub(5)).collect(),
        }
    }
}

/// Splits `plus` into sparse classes (`e(V_i) < |V_i|²/100`) and dense ones.
pub fn dense_sparse_split(g: &Graph, partition: &EquitablePartition, plus: &[usize]) -> (Vec<usize>, Vec<usize>) {
    plus.iter().partition(|&&i| {
        let class = partition.class(i);
        let mut bits = fixedbitset::FixedBitSet::with_capacity(g.n());
        class.iter().for_each(|&v| bits.insert(v));
        let inside = g.edges_within(class, &bits) as u128;
        let size = class.len() as u128;
        100 * inside < size * size
    })
}

/// Where an approximate bipartition came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// Classes over the original vertex ids (`J` excluded).
    pub classes: Vec<Vec<Vertex>>,
    pub minus: Vec<usize>,
    pub plus_minus: Vec<usize>,
    pub plus_plus: Vec<usize>,
    pub t: usize,
    pub regular_pairs: usize,
    pub status: StopStatus,
    pub cap_exceeded: bool,
}

impl Provenance {
    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    /// `[t]_+` in increasing order.
    pub fn plus(&self) -> Vec<usize> {
        let mut plus: Vec<usize> = self.plus_minus.iter().chain(&self.plus_plus).copied().collect();
        plus.sort_unstable();
        plus
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxCandidate {
    pub j: Vec<Vertex>,
    /// `X^≈` on [`Side::X`], `Y^≈` on [`Side::Y`].
    pub partition: Bipartition,
    pub provenance: Provenance,
}

/// A regularized `J`-link graph on `[n] \ J`.
#[derive(Debug, Clone)]
pub struct LinkRegularization {
    pub graph: Graph,
    /// `to_original[i]` is the hypergraph id of link vertex `i`.
    pub to_original: Vec<Vertex>,
    pub regularization: Regularization,
}

/// Builds the `J`-link graph and regularizes it.
pub fn regularize_link(h: &Hypergraph, j: &[Vertex], cfg: &RegBipConfig) -> Result<LinkRegularization> {
    cfg.validate()?;
    if h.k() < 3 {
        return Err(Error::InvalidConfig(format!("the regularity solver needs k >= 3, got k = {}", h.k())));
    }
    let link = h.link(j)?;
    let graph = Graph::from_hypergraph(&link.hypergraph)?;
    let size = graph.n();
    if size == 0 {
        return Err(Error::TooFewVertices { n: h.n(), k: h.k() });
    }
    let t0 = cfg.reg.t0.min((size / cfg.min_class_size.max(1)).max(2)).min(size);
    let reg_cfg = RegConfig { epsilon: cfg.epsilon, t0, t_cap: cfg.reg.t_cap.max(t0), ..cfg.reg.clone() };
    let regularization = regularize(&graph, &reg_cfg)?;
    Ok(LinkRegularization { graph, to_original: link.to_original, regularization })
}

/// Builds `X^≈`, `Y^≈` from a regular partition of the `J`-link graph.
pub fn approx_bipartition(h: &Hypergraph, j: &[Vertex], cfg: &RegBipConfig) -> Result<ApproxCandidate> {
    let LinkRegularization { graph: g, to_original, regularization } = regularize_link(h, j, cfg)?;
    let Regularization { partition, cluster, status, .. } = regularization;
    let (plus, minus) = cluster_degree_split(&cluster, cfg.epsilon);
    let (plus_minus, plus_plus) = dense_sparse_split(&g, &partition, &plus);

    let mut labels = vec![Side::X; h.n()];
    for &i in &plus_plus {
        for &v in partition.class(i) {
            labels[to_original[v]] = Side::Y;
        }
    }
    let classes = partition
        .classes()
        .iter()
        .map(|c| c.iter().map(|&v| to_original[v]).collect())
        .collect();
    let mut j_sorted = j.to_vec();
    j_sorted.sort_unstable();
    Ok(ApproxCandidate {
        j: j_sorted,
        partition: Bipartition::from_labels(labels),
        provenance: Provenance {
            classes,
            minus,
            plus_minus,
            plus_plus,
            t: partition.t(),
            regular_pairs: cluster.num_pairs(),
            status,
            cap_exceeded: status != StopStatus::Budget,
        },
    })
}

/// Degree vote: `u` goes to `X^ed` iff `deg(u, X \ {u}) <= deg(u, Y \ {u})`.
pub fn edit(h: &Hypergraph, candidate: &Bipartition) -> Result<Bipartition> {
    edit_with(h, candidate, Exec::default())
}

pub fn edit_with(h: &Hypergraph, candidate: &Bipartition, exec: Exec) -> Result<Bipartition> {
    if candidate.len() != h.n() {
        return Err(Error::PartitionLength { expected: h.n(), found: candidate.len() });
    }
    let labels = exec.map_range(h.n(), |u| {
        let (mut into_x, mut into_y) = (0u64, 0u64);
        for &id in h.incidence(u) {
            let mut others = h.edge(id as usize).iter().map(|&w| w as usize).filter(|&w| w != u);
            let first = candidate.side(others.next().expect("k >= 2"));
            if others.all(|w| candidate.side(w) == first) {
                match first {
                    Side::X => into_x += 1,
                    Side::Y => into_y += 1,
                }
            }
        }
        if into_x <= into_y {
            Side::X
        } else {
            Side::Y
        }
    });
    Ok(Bipartition::from_labels(labels))
}

/// The sets `J` tried, in order: `C(L, k-2)` lexicographically.
pub fn link_sets(l: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    for_each_subset(l.len(), k - 2, |s| out.push(s.iter().map(|&i| l[i]).collect()));
    out
}

pub fn solve_reg(h: &Hypergraph, cfg: &RegBipConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let (n, k) = (h.n(), h.k());
    if k < 3 {
        return Err(Error::InvalidConfig(format!("the regularity solver needs k >= 3, got k = {k}")));
    }
    let mut report = SolveReport::new(Algo::Reg, h);
    let l = cfg.index_set(k);
    let in_range = l.iter().all(|&v| v < n) && l.len() >= k - 2;

    let mut found = None;
    if n > 2 * k && in_range {
        let exec = cfg.exec();
        let sets = link_sets(&l, k);

        let start = Instant::now();
        let approx = exec.map_slice(&sets, |j| approx_bipartition(h, j, cfg));
        let approx: Vec<ApproxCandidate> = approx.into_iter().collect::<Result<_>>()?;
        report.timings.stage1_ns = elapsed_ns(start);

        let start = Instant::now();
        let edited = exec.map_slice(&approx, |a| edit_with(h, &a.partition, Exec::Sequential));
        let edited: Vec<Bipartition> = edited.into_iter().collect::<Result<_>>()?;
        report.timings.stage2_ns = elapsed_ns(start);

        let start = Instant::now();
        let independent = exec.map_slice(&edited, |p| h.is_bipartition(p));
        for ((a, p), ok) in approx.iter().zip(&edited).zip(&independent) {
            let changes = a.partition.labels().iter().zip(p.labels()).filter(|(x, y)| x != y).count();
            report.j_records.push(JRecord {
                j: a.j.clone(),
                t: a.provenance.t,
                regular_pairs: a.provenance.regular_pairs,
                cap_exceeded: a.provenance.cap_exceeded,
                approx_x_size: a.partition.sizes().0,
                edit_changes: changes,
                independent: *ok,
            });
        }
        found = edited.into_iter().zip(independent).find(|(_, ok)| *ok).map(|(p, _)| p);
        report.timings.stage3_ns = elapsed_ns(start);
    }

    let start = Instant::now();
    let outcome = match found {
        Some(p) => Ok((Path::Step3i, p)),
        None => match exhaustive_bipartition_with(h, &cfg.limits) {
            Ok(Some(p)) => Ok((Path::Step3ii, p)),
            Ok(None) => Err(Error::NotBipartite),
            Err(e) => Err(e),
        },
    };
    report.timings.stage3_ns += elapsed_ns(start);
    let (path, partition) = outcome?;
    report.path_taken = path;
    report.partition = Some(partition);
    report.r = Some(2);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{complete_bipartite, fano_plane};

    #[test]
    fn sparse_dense_cutoff() {
        // One class of 20 vertices (0..20) with 3 or 4 internal edges.
        let p = EquitablePartition::new(20, vec![(0..20).collect()]).unwrap();
        let three = Graph::from_edges(20, [(0, 1), (2, 3), (4, 5)]).unwrap();
        assert_eq!(dense_sparse_split(&three, &p, &[0]), (vec![0], vec![]));
        let four = Graph::from_edges(20, [(0, 1), (2, 3), (4, 5), (6, 7)]).unwrap();
        assert_eq!(dense_sparse_split(&four, &p, &[0]), (vec![], vec![0]));
        assert_eq!(dense_sparse_split(&Graph::edgeless(20), &p, &[0]), (vec![0], vec![]));
    }

    #[test]
    fn link_set_order() {
        assert_eq!(link_sets(&[0], 3), vec![vec![0]]);
        assert_eq!(link_sets(&[0, 1, 2], 4), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(RegBipConfig::default().index_set(5), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn edit_examples() {
        let kb = complete_bipartite(3, 3, 3).unwrap();
        let planted = Bipartition::from_x_members(6, 0..3);
        assert_eq!(edit(&kb, &planted).unwrap(), planted);
        let edgeless = Hypergraph::edgeless(6, 3).unwrap();
        assert_eq!(edit(&edgeless, &planted).unwrap().sizes(), (6, 0));
    }

    #[test]
    fn edgeless_approximation_is_all_x() {
        let h = Hypergraph::edgeless(30, 3).unwrap();
        let a = approx_bipartition(&h, &[0], &RegBipConfig::default()).unwrap();
        assert_eq!(a.partition.sizes(), (30, 0));
        assert!(a.provenance.plus_plus.is_empty());
    }

    #[test]
    fn small_inputs_fall_back() {
        let kb = complete_bipartite(3, 3, 3).unwrap();
        let r = solve_reg(&kb, &RegBipConfig::default()).unwrap();
        assert_eq!(r.path_taken, Path::Step3ii);
        assert!(r.j_records.is_empty());
        assert_eq!(solve_reg(&fano_plane(), &RegBipConfig::default()).unwrap_err(), Error::NotBipartite);
    }
}
