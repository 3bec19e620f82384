//! Constructive ε-regular, t-equitable partitions of graphs.
//!
//! Regularity of a pair is co-NP-hard to decide in general, so pair checks
//! are either exact by enumeration (both classes of size at most
//! [`EXHAUSTIVE_LIMIT`]) or a witness search over degree-split subsets.
//! [`regularize`] refines an equitable partition until at most `εt²` pairs
//! lack a certificate or the class cap is reached.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Dyadic, FLOAT_GUARD};
use crate::hypergraph::{Hypergraph, Vertex, VertexSet};
use crate::par::Exec;

/// Largest class size for exact pair checks.
pub const EXHAUSTIVE_LIMIT: usize = 16;

/// Simple undirected graph with bit-set adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<FixedBitSet>,
    m: usize,
}

impl Graph {
    pub fn edgeless(n: usize) -> Self {
        Graph { adj: vec![FixedBitSet::with_capacity(n); n], m: 0 }
    }

    /// Duplicate edges are merged.
    pub fn from_edges<I: IntoIterator<Item = (Vertex, Vertex)>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Graph::edgeless(n);
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w + 1, n });
                }
            }
            if u == v {
                return Err(Error::RepeatedVertex(u + 1));
            }
            if !g.adj[u].contains(v) {
                g.adj[u].insert(v);
                g.adj[v].insert(u);
                g.m += 1;
            }
        }
        Ok(g)
    }

    /// Reads a 2-uniform hypergraph (such as a `(k-2)`-link) as a graph.
    pub fn from_hypergraph(h: &Hypergraph) -> Result<Self> {
        if h.k() != 2 {
            return Err(Error::WrongUniformity { expected: 2, found: h.k() });
        }
        Graph::from_edges(h.n(), h.edges().map(|e| (e[0] as usize, e[1] as usize)))
    }

    /// The `J`-link of `h` for `|J| = k - 2`, keeping the original vertex ids;
    /// the vertices of `J` are isolated.
    pub fn link_of(h: &Hypergraph, j: &[Vertex]) -> Result<Self> {
        if h.k() < 3 || j.len() != h.k() - 2 {
            return Err(Error::BadLinkSize { found: j.len(), allowed: h.k().saturating_sub(2) });
        }
        if let Some(&v) = j.iter().find(|&&v| v >= h.n()) {
            return Err(Error::VertexOutOfRange { vertex: v + 1, n: h.n() });
        }
        let pairs = h.incidence(j[0]).iter().filter_map(|&id| {
            let e = h.edge(id as usize);
            if !j.iter().all(|&v| e.contains(&(v as u32))) {
                return None;
            }
            let mut rest = e.iter().map(|&w| w as usize).filter(|w| !j.contains(w));
            Some((rest.next()?, rest.next()?))
        });
        Graph::from_edges(h.n(), pairs)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.m
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].contains(v)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn neighbors(&self, v: Vertex) -> &FixedBitSet {
        &self.adj[v]
    }

    /// `e(A, B)` for disjoint `A`, `B`.
    pub fn edges_between(&self, a: &[Vertex], b: &FixedBitSet) -> u64 {
        a.iter().map(|&v| self.adj[v].intersection_count(b) as u64).sum()
    }

    /// `e(A)`: edges with both ends in `A`.
    pub fn edges_within(&self, a: &[Vertex], a_bits: &FixedBitSet) -> u64 {
        self.edges_between(a, a_bits) / 2
    }
}

fn check_sets(a: &VertexSet, b: &VertexSet) -> Result<()> {
    if a.is_empty() || b.is_empty() || !a.is_disjoint(b) {
        return Err(Error::EmptyOrOverlappingSets);
    }
    Ok(())
}

/// `d(A, B) = e(A, B) / (|A| |B|)`.
pub fn pair_density(g: &Graph, a: &VertexSet, b: &VertexSet) -> Result<f64> {
    check_sets(a, b)?;
    let e = g.edges_between(&a.to_vec(), b.bits());
    Ok(e as f64 / (a.len() * b.len()) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum CertificateMode {
    /// Exact enumeration when both classes have at most [`EXHAUSTIVE_LIMIT`]
    /// vertices; otherwise the witness search, with `Unknown` when it finds none.
    ExhaustiveSmall,
    /// Witness search only; a pair with no witness counts as regular.
    #[default]
    WitnessHeuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Certificate {
    /// Density 0 or 1: every subpair has the same density.
    Homogeneous,
    /// All qualifying subpairs were enumerated.
    Exhaustive,
    /// The witness search came back empty.
    NoWitness,
}

/// Subpair `(A', B')` with `|A'| > ε|A|`, `|B'| > ε|B|` and
/// `|d(A', B') - d(A, B)| >= ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub a: Vec<Vertex>,
    pub b: Vec<Vertex>,
    pub density: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verdict {
    CertifiedRegular(Certificate),
    Irregular(Witness),
    Unknown,
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::CertifiedRegular(_))
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidConfig(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

pub fn check_regular_pair(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    epsilon: f64,
    mode: CertificateMode,
) -> Result<Verdict> {
    check_sets(a, b)?;
    check_epsilon(epsilon)?;
    Ok(check_pair(g, &a.to_vec(), a.bits(), &b.to_vec(), b.bits(), Dyadic::new(epsilon), mode))
}

fn check_pair(
    g: &Graph,
    a: &[Vertex],
    a_bits: &FixedBitSet,
    b: &[Vertex],
    b_bits: &FixedBitSet,
    eps: Dyadic,
    mode: CertificateMode,
) -> Verdict {
    let deg_a: Vec<u64> = a.iter().map(|&v| g.adj[v].intersection_count(b_bits) as u64).collect();
    let e: u64 = deg_a.iter().sum();
    let (p, q) = (a.len() as u64, b.len() as u64);
    if e == 0 || e == p * q {
        return Verdict::CertifiedRegular(Certificate::Homogeneous);
    }
    let small = a.len() <= EXHAUSTIVE_LIMIT && b.len() <= EXHAUSTIVE_LIMIT;
    if mode == CertificateMode::ExhaustiveSmall && small {
        return exhaustive_check(g, a, b, e, eps);
    }
    let deg_b: Vec<u64> = b.iter().map(|&v| g.adj[v].intersection_count(a_bits) as u64).collect();
    let from_a = split_witness(a, &deg_a, e, b.len(), eps);
    let from_b = split_witness(b, &deg_b, e, a.len(), eps);
    let best = match (from_a, from_b) {
        (Some(x), Some(y)) => Some(if y.deviation > x.deviation { (y, true) } else { (x, false) }),
        (Some(x), None) => Some((x, false)),
        (None, Some(y)) => Some((y, true)),
        (None, None) => None,
    };
    match best {
        Some((w, false)) => Verdict::Irregular(Witness { a: w.subset, b: b.to_vec(), density: w.density, deviation: w.deviation }),
        Some((w, true)) => Verdict::Irregular(Witness { a: a.to_vec(), b: w.subset, density: w.density, deviation: w.deviation }),
        None if mode == CertificateMode::ExhaustiveSmall => Verdict::Unknown,
        None => Verdict::CertifiedRegular(Certificate::NoWitness),
    }
}

struct SideWitness {
    subset: Vec<Vertex>,
    density: f64,
    deviation: f64,
}

/// Splits `side` at its mean degree into the other side and tests both halves
/// against the full other side.
fn split_witness(side: &[Vertex], degs: &[u64], e: u64, other: usize, eps: Dyadic) -> Option<SideWitness> {
    let p = side.len() as u64;
    let q = other as u64;
    let min_size = eps.min_count_above(side.len());
    let mut best: Option<SideWitness> = None;
    for low in [true, false] {
        let members: Vec<usize> = (0..side.len()).filter(|&i| (degs[i] * p < e) == low).collect();
        let s = members.len() as u64;
        if s == 0 || s == p || members.len() < min_size {
            continue;
        }
        let e_s: u64 = members.iter().map(|&i| degs[i]).sum();
        let num = (e_s as u128 * p as u128).abs_diff(e as u128 * s as u128);
        let den = s as u128 * p as u128 * q as u128;
        if eps.reached_by(num, den) {
            let deviation = num as f64 / den as f64;
            if best.as_ref().is_none_or(|w| deviation > w.deviation) {
                best = Some(SideWitness {
                    subset: members.iter().map(|&i| side[i]).collect(),
                    density: e_s as f64 / (s * q) as f64,
                    deviation,
                });
            }
        }
    }
    best
}

/// Exact decision for two classes of at most [`EXHAUSTIVE_LIMIT`] vertices.
///
/// For each `A'` the extreme densities over `|B'| = s` are attained by the
/// `s` vertices of largest or smallest degree into `A'`.
fn exhaustive_check(g: &Graph, a: &[Vertex], b: &[Vertex], e: u64, eps: Dyadic) -> Verdict {
    let (p, q) = (a.len(), b.len());
    let masks: Vec<u32> = b
        .iter()
        .map(|&w| a.iter().enumerate().filter(|&(_, &v)| g.adj[w].contains(v)).fold(0u32, |m, (i, _)| m | 1 << i))
        .collect();
    let min_a = eps.min_count_above(p).max(1);
    let min_b = eps.min_count_above(q).max(1);
    let pq = (p * q) as u128;
    let mut degs: Vec<(u32, usize)> = Vec::with_capacity(q);
    for sub in 1u32..(1u32 << p) {
        let a_size = sub.count_ones() as usize;
        if a_size < min_a {
            continue;
        }
        degs.clear();
        degs.extend(masks.iter().enumerate().map(|(j, &m)| ((m & sub).count_ones(), j)));
        degs.sort_unstable();
        let mut low = 0u128;
        let mut high = 0u128;
        for s in 1..=q {
            low += degs[s - 1].0 as u128;
            high += degs[q - s].0 as u128;
            if s < min_b {
                continue;
            }
            let base = e as u128 * (a_size * s) as u128;
            let den = (a_size * s) as u128 * pq;
            for (edges, top) in [(high, true), (low, false)] {
                let num = (edges * pq).abs_diff(base);
                if eps.reached_by(num, den) {
                    let a_sub: Vec<Vertex> = (0..p).filter(|&i| sub >> i & 1 == 1).map(|i| a[i]).collect();
                    let mut b_sub: Vec<Vertex> = if top {
                        degs[q - s..].iter().map(|&(_, j)| b[j]).collect()
                    } else {
                        degs[..s].iter().map(|&(_, j)| b[j]).collect()
                    };
                    b_sub.sort_unstable();
                    return Verdict::Irregular(Witness {
                        a: a_sub,
                        b: b_sub,
                        density: edges as f64 / (a_size * s) as f64,
                        deviation: num as f64 / den as f64,
                    });
                }
            }
        }
    }
    Verdict::CertifiedRegular(Certificate::Exhaustive)
}

/// Partition of `[n]` into `t` classes whose sizes differ by at most one.
/// Classes are ordered by size, then by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquitablePartition {
    classes: Vec<Vec<Vertex>>,
    assignment: Vec<usize>,
}

impl EquitablePartition {
    pub fn new(n: usize, mut classes: Vec<Vec<Vertex>>) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for class in &mut classes {
            if class.is_empty() {
                return Err(Error::InvalidConfig("empty class".into()));
            }
            class.sort_unstable();
        }
        classes.sort_by_key(|c| (c.len(), c[0]));
        for (id, class) in classes.iter().enumerate() {
            for &v in class {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v + 1, n });
                }
                if assignment[v] != usize::MAX {
                    return Err(Error::RepeatedVertex(v + 1));
                }
                assignment[v] = id;
            }
        }
        if let Some(v) = assignment.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidConfig(format!("vertex {} is in no class", v + 1)));
        }
        let p = EquitablePartition { classes, assignment };
        if !p.is_equitable() {
            return Err(Error::InvalidConfig("class sizes differ by more than one".into()));
        }
        Ok(p)
    }

    /// Contiguous blocks in vertex order; the `n mod t` larger classes come last.
    pub fn initial(n: usize, t: usize) -> Result<Self> {
        if t == 0 || t > n {
            return Err(Error::InvalidConfig(format!("cannot split {n} vertices into {t} classes")));
        }
        let (q, r) = (n / t, n % t);
        let mut classes = Vec::with_capacity(t);
        let mut next = 0;
        for i in 0..t {
            let size = if i < t - r { q } else { q + 1 };
            classes.push((next..next + size).collect());
            next += size;
        }
        EquitablePartition::new(n, classes)
    }

    pub fn t(&self) -> usize {
        self.classes.len()
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn classes(&self) -> &[Vec<Vertex>] {
        &self.classes
    }

    pub fn class(&self, id: usize) -> &[Vertex] {
        &self.classes[id]
    }

    pub fn class_of(&self, v: Vertex) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    pub fn is_equitable(&self) -> bool {
        let min = self.classes.iter().map(Vec::len).min().unwrap_or(0);
        let max = self.classes.iter().map(Vec::len).max().unwrap_or(0);
        max <= min + 1
    }

    fn class_bits(&self) -> Vec<FixedBitSet> {
        let n = self.n();
        self.classes
            .iter()
            .map(|c| {
                let mut bits = FixedBitSet::with_capacity(n);
                c.iter().for_each(|&v| bits.insert(v));
                bits
            })
            .collect()
    }
}

/// Graph on class ids whose edges are the certified-regular pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterGraph {
    t: usize,
    pairs: Vec<(usize, usize)>,
    degrees: Vec<usize>,
}

impl ClusterGraph {
    /// Pairs are 0-based class ids in either order.
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(t: usize, pairs: I) -> Result<Self> {
        let mut list = Vec::new();
        for (i, j) in pairs {
            if i == j || i >= t || j >= t {
                return Err(Error::InvalidConfig(format!("bad cluster pair ({i}, {j}) for t = {t}")));
            }
            list.push((i.min(j), i.max(j)));
        }
        list.sort_unstable();
        list.dedup();
        let mut degrees = vec![0; t];
        for &(i, j) in &list {
            degrees[i] += 1;
            degrees[j] += 1;
        }
        Ok(ClusterGraph { t, pairs: list, degrees })
    }

    pub fn complete(t: usize) -> Self {
        let pairs = (0..t).flat_map(|i| (i + 1..t).map(move |j| (i, j)));
        ClusterGraph::new(t, pairs).expect("complete pairs are valid")
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn regular_pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.binary_search(&(i.min(j), i.max(j))).is_ok()
    }
}

/// Splits `[t]` into `[t]_+` (cluster degree at least `(1 - 2√ε)t`) and `[t]_-`.
pub fn cluster_degree_split(c: &ClusterGraph, epsilon: f64) -> (Vec<usize>, Vec<usize>) {
    // deg >= (1 - 2√ε)t  <=>  (t - deg)^2 <= 4εt^2, as t - deg > 0.
    let eps = Dyadic::new(epsilon);
    let t = c.t as u128;
    (0..c.t).partition(|&i| {
        let gap = t - c.degree(i) as u128;
        !eps.exceeded_by(gap * gap, 4 * t * t)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegConfig {
    pub epsilon: f64,
    pub t0: usize,
    pub t_cap: usize,
    pub max_iterations: usize,
    pub certificate_mode: CertificateMode,
    pub exec: Exec,
}

impl Default for RegConfig {
    fn default() -> Self {
        RegConfig {
            epsilon: 0.1,
            t0: 8,
            t_cap: 64,
            max_iterations: 12,
            certificate_mode: CertificateMode::WitnessHeuristic,
            exec: Exec::Parallel,
        }
    }
}

impl RegConfig {
    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if self.t0 == 0 || self.t_cap < self.t0 || self.max_iterations == 0 {
            return Err(Error::InvalidConfig(format!(
                "need t0 >= 1, t_cap >= t0 and max_iterations >= 1 (t0 = {}, t_cap = {}, max_iterations = {})",
                self.t0, self.t_cap, self.max_iterations
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopStatus {
    /// At most `εt²` pairs lack a certificate.
    Budget,
    /// Refinement would need more than `t_cap` classes.
    CapExceeded,
    IterationCap,
    /// Refinement would lower the index.
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundStats {
    pub t: usize,
    pub irregular: usize,
    pub index: f64,
}

#[derive(Debug, Clone)]
pub struct Regularization {
    pub partition: EquitablePartition,
    pub cluster: ClusterGraph,
    pub status: StopStatus,
    /// One entry per evaluated partition, in order.
    pub rounds: Vec<RoundStats>,
    /// Index into `rounds` of the returned partition.
    pub chosen_round: usize,
}

impl Regularization {
    /// True when the `εt²` budget was not met; the partition is then the
    /// round with the fewest uncertified pairs beyond the budget.
    pub fn cap_exceeded(&self) -> bool {
        self.status != StopStatus::Budget
    }
}

/// Mean-square density `Σ_{i<j} |V_i||V_j| d(V_i, V_j)² / n²`.
pub fn partition_index(g: &Graph, p: &EquitablePartition) -> f64 {
    index_from_counts(p, &pair_counts(g, p, &p.class_bits()))
}

/// `counts[i * t + j] = e(V_i, V_j)` for `i != j`.
fn pair_counts(g: &Graph, p: &EquitablePartition, bits: &[FixedBitSet]) -> Vec<u64> {
    let t = p.t();
    let mut counts = vec![0u64; t * t];
    for (i, class) in p.classes().iter().enumerate() {
        for (j, b) in bits.iter().enumerate() {
            if i != j {
                counts[i * t + j] = g.edges_between(class, b);
            }
        }
    }
    counts
}

fn index_from_counts(p: &EquitablePartition, counts: &[u64]) -> f64 {
    let t = p.t();
    let n = p.n() as f64;
    let mut sum = 0.0;
    for i in 0..t {
        for j in i + 1..t {
            let e = counts[i * t + j] as f64;
            sum += e * e / (p.classes[i].len() * p.classes[j].len()) as f64;
        }
    }
    sum / (n * n)
}

struct RoundEval {
    counts: Vec<u64>,
    irregular_partners: Vec<Vec<usize>>,
    cluster: ClusterGraph,
    irregular: usize,
    index: f64,
}

fn evaluate(g: &Graph, p: &EquitablePartition, eps: Dyadic, cfg: &RegConfig) -> RoundEval {
    let t = p.t();
    let bits = p.class_bits();
    let counts = pair_counts(g, p, &bits);
    let pairs: Vec<(usize, usize)> = (0..t).flat_map(|i| (i + 1..t).map(move |j| (i, j))).collect();
    let verdicts = cfg.exec.map_slice(&pairs, |&(i, j)| {
        check_pair(g, p.class(i), &bits[i], p.class(j), &bits[j], eps, cfg.certificate_mode).is_certified()
    });
    let mut irregular_partners = vec![Vec::new(); t];
    let mut certified = Vec::new();
    for (&(i, j), &ok) in pairs.iter().zip(&verdicts) {
        if ok {
            certified.push((i, j));
        } else {
            irregular_partners[i].push(j);
            irregular_partners[j].push(i);
        }
    }
    let irregular = pairs.len() - certified.len();
    let index = index_from_counts(p, &counts);
    RoundEval {
        counts,
        irregular_partners,
        cluster: ClusterGraph::new(t, certified).expect("pairs come from the partition"),
        irregular,
        index,
    }
}

/// Bisects every class by majority vote over its irregular partners (a
/// vertex is "low" for partner `j` when its degree into `V_j` is below the
/// class mean), orders the pieces by mean vertex degree and cuts the
/// sequence into `t_new` equitable blocks aligned to piece boundaries.
fn refine(g: &Graph, p: &EquitablePartition, eval: &RoundEval, t_new: usize) -> EquitablePartition {
    let t = p.t();
    let bits = p.class_bits();
    let mut pieces: Vec<Vec<Vertex>> = Vec::new();
    for (i, class) in p.classes().iter().enumerate() {
        let partners = &eval.irregular_partners[i];
        if partners.is_empty() {
            pieces.push(class.clone());
            continue;
        }
        let size = class.len() as u64;
        let (low, high): (Vec<Vertex>, Vec<Vertex>) = class.iter().partition(|&&v| {
            let votes = partners
                .iter()
                .filter(|&&j| g.adj[v].intersection_count(&bits[j]) as u64 * size < eval.counts[i * t + j])
                .count();
            2 * votes > partners.len()
        });
        pieces.extend([low, high].into_iter().filter(|piece| !piece.is_empty()));
    }

    let degree_sum = |piece: &[Vertex]| piece.iter().map(|&v| g.degree(v) as u64).sum::<u64>();
    let mut keyed: Vec<(u64, u64, Vec<Vertex>)> =
        pieces.into_iter().map(|piece| (degree_sum(&piece), piece.len() as u64, piece)).collect();
    keyed.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)).then(a.2[0].cmp(&b.2[0])));

    let mut order: Vec<Vertex> = Vec::with_capacity(p.n());
    let mut keys: Vec<f64> = Vec::with_capacity(p.n());
    for (sum, len, piece) in &keyed {
        let mean = *sum as f64 / *len as f64;
        order.extend_from_slice(piece);
        keys.extend(std::iter::repeat_n(mean, piece.len()));
    }
    let cuts = aligned_cuts(&keys, t_new);
    let classes = cuts.windows(2).map(|w| order[w[0]..w[1]].to_vec()).collect();
    EquitablePartition::new(p.n(), classes).expect("cuts form an equitable partition")
}

/// Boundaries `0 = c_0 < ... < c_t = len` of `t` blocks of sizes `⌊len/t⌋`
/// or `⌈len/t⌉`, minimizing the summed key spread inside blocks.
fn aligned_cuts(keys: &[f64], t: usize) -> Vec<usize> {
    let len = keys.len();
    let (q, r) = (len / t, len % t);
    let spread = |start: usize, end: usize| keys[end - 1] - keys[start];
    // cost[b][g]: first b blocks, g of them large; they end at b*q + g.
    let mut cost = vec![vec![f64::INFINITY; r + 1]; t + 1];
    let mut from_large = vec![vec![false; r + 1]; t + 1];
    cost[0][0] = 0.0;
    for b in 1..=t {
        for big in 0..=r.min(b) {
            let end = b * q + big;
            if big < b {
                let c = cost[b - 1][big] + spread(end - q, end);
                cost[b][big] = c;
            }
            if big > 0 {
                let c = cost[b - 1][big - 1] + spread(end - q - 1, end);
                if c < cost[b][big] {
                    cost[b][big] = c;
                    from_large[b][big] = true;
                }
            }
        }
    }
    let mut cuts = vec![len];
    let mut big = r;
    for b in (1..=t).rev() {
        if from_large[b][big] {
            big -= 1;
        }
        cuts.push((b - 1) * q + big);
    }
    cuts.reverse();
    cuts
}

/// Iterative refinement from the contiguous `t0`-partition.
///
/// Each round checks all class pairs (in parallel under `cfg.exec`). When
/// more than `εt²` pairs lack a certificate the partition is refined: first
/// regrouped at the same `t`, and if that does not raise the index, at
/// `min(2t, t_cap)` classes. A refinement that would lower the index is
/// rejected, so the index never decreases across rounds.
pub fn regularize(g: &Graph, cfg: &RegConfig) -> Result<Regularization> {
    cfg.validate()?;
    let n = g.n();
    if n < cfg.t0 {
        return Err(Error::InvalidConfig(format!("graph has {n} vertices, fewer than t0 = {}", cfg.t0)));
    }
    let eps = Dyadic::new(cfg.epsilon);
    let mut partition = EquitablePartition::initial(n, cfg.t0)?;
    let mut rounds: Vec<RoundStats> = Vec::new();
    let mut best: Option<(f64, usize, EquitablePartition, ClusterGraph)> = None;

    let status = loop {
        let eval = evaluate(g, &partition, eps, cfg);
        let t = partition.t();
        let t_sq = (t * t) as u128;
        rounds.push(RoundStats { t, irregular: eval.irregular, index: eval.index });
        if !eps.exceeded_by(eval.irregular as u128, t_sq) {
            return Ok(Regularization {
                partition,
                cluster: eval.cluster,
                status: StopStatus::Budget,
                chosen_round: rounds.len() - 1,
                rounds,
            });
        }
        let excess = eval.irregular as f64 - cfg.epsilon * t_sq as f64;
        if best.as_ref().is_none_or(|b| excess < b.0) {
            best = Some((excess, rounds.len() - 1, partition.clone(), eval.cluster.clone()));
        }
        if rounds.len() >= cfg.max_iterations {
            break StopStatus::IterationCap;
        }
        let regrouped = refine(g, &partition, &eval, t);
        if regrouped != partition && partition_index(g, &regrouped) > eval.index + FLOAT_GUARD {
            partition = regrouped;
            continue;
        }
        let t_new = (2 * t).min(cfg.t_cap).min(n);
        if t_new <= t {
            break StopStatus::CapExceeded;
        }
        let finer = refine(g, &partition, &eval, t_new);
        if partition_index(g, &finer) < eval.index - FLOAT_GUARD {
            break StopStatus::Stalled;
        }
        partition = finer;
    };
    let (_, chosen_round, partition, cluster) = best.expect("at least one round ran");
    Ok(Regularization { partition, cluster, status, rounds, chosen_round })
}
