//! Immutable k-uniform hypergraphs and the degree primitives the solvers use.
//!
//! Vertices are 0-based `usize` ids inside the library. The text formats in
//! [`crate::io`] and the CLI are 1-based and convert once at the boundary.

use fixedbitset::FixedBitSet;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;

/// Largest supported uniformity; edge keys are packed into a `u128`.
pub const MAX_UNIFORMITY: usize = 16;

/// One of the two sides of a 2-partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }
}

/// A set of vertices of `[n]`, stored as a bit set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    bits: FixedBitSet,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet { bits: FixedBitSet::with_capacity(n) }
    }

    /// Panics if a member is `>= n`.
    pub fn from_iter<I: IntoIterator<Item = Vertex>>(n: usize, members: I) -> Self {
        let mut set = VertexSet::new(n);
        for v in members {
            set.insert(v);
        }
        set
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        VertexSet { bits }
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, v: Vertex) {
        assert!(v < self.bits.len(), "vertex {v} outside universe {}", self.bits.len());
        self.bits.insert(v);
    }

    pub fn remove(&mut self, v: Vertex) {
        if v < self.bits.len() {
            self.bits.set(v, false);
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.bits.contains(v)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn intersection_count(&self, other: &VertexSet) -> usize {
        self.bits.intersection_count(&other.bits)
    }

    pub fn symmetric_difference_count(&self, other: &VertexSet) -> usize {
        self.bits.symmetric_difference_count(&other.bits)
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }
}

/// A two-label assignment of every vertex of `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    labels: Vec<Side>,
}

impl Bipartition {
    pub fn from_labels(labels: Vec<Side>) -> Self {
        Bipartition { labels }
    }

    /// `x_members` on [`Side::X`], everything else on [`Side::Y`].
    pub fn from_x_members<I: IntoIterator<Item = Vertex>>(n: usize, x_members: I) -> Self {
        let mut labels = vec![Side::Y; n];
        for v in x_members {
            labels[v] = Side::X;
        }
        Bipartition { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn side(&self, v: Vertex) -> Side {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Side] {
        &self.labels
    }

    pub fn members(&self, side: Side) -> Vec<Vertex> {
        (0..self.labels.len()).filter(|&v| self.labels[v] == side).collect()
    }

    pub fn side_set(&self, side: Side) -> VertexSet {
        VertexSet::from_iter(self.labels.len(), self.members(side))
    }

    /// `(|X|, |Y|)`.
    pub fn sizes(&self) -> (usize, usize) {
        let x = self.labels.iter().filter(|&&s| s == Side::X).count();
        (x, self.labels.len() - x)
    }

    pub fn flipped(&self) -> Bipartition {
        Bipartition { labels: self.labels.iter().map(|s| s.flip()).collect() }
    }

    /// Equal as unordered pairs of sides.
    pub fn eq_up_to_swap(&self, other: &Bipartition) -> bool {
        if self.labels.len() != other.labels.len() {
            return false;
        }
        let same = self.labels.iter().zip(&other.labels).all(|(a, b)| a == b);
        same || self.labels.iter().zip(&other.labels).all(|(a, b)| a != b)
    }

    /// Re-labels so that vertex 0 lies on [`Side::X`].
    pub fn normalized(&self) -> Bipartition {
        match self.labels.first() {
            Some(Side::Y) => self.flipped(),
            _ => self.clone(),
        }
    }
}

/// The `J`-link of a hypergraph together with the map back to original ids.
#[derive(Debug, Clone)]
pub struct Link {
    pub hypergraph: Hypergraph,
    /// `to_original[i]` is the original id of link vertex `i`.
    pub to_original: Vec<Vertex>,
}

/// Immutable k-uniform hypergraph on `[n]` with canonical edge order.
#[derive(Debug, Clone)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    /// `m * k` vertex ids; each edge strictly increasing, edges lexicographically sorted.
    edges: Vec<u32>,
    incidence: Vec<Vec<u32>>,
    keys: FxHashSet<u128>,
    key_bits: u32,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.edges == other.edges
    }
}

impl Eq for Hypergraph {}

fn key_bits_for(n: usize) -> u32 {
    (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1)
}

impl Hypergraph {
    /// Builds a hypergraph from 0-based edges in any vertex order; duplicates are merged.
    pub fn new<I, E>(n: usize, k: usize, raw_edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[Vertex]>,
    {
        if k < 2 {
            return Err(Error::UniformityTooSmall(k));
        }
        if n < k {
            return Err(Error::TooFewVertices { n, k });
        }
        let key_bits = key_bits_for(n);
        if k > MAX_UNIFORMITY || key_bits as usize * k > 128 || n > u32::MAX as usize {
            return Err(Error::TooLarge { n, k });
        }
        let mut tuples: Vec<Vec<u32>> = Vec::new();
        for raw in raw_edges {
            let raw = raw.as_ref();
            if raw.len() != k {
                return Err(Error::WrongArity { expected: k, found: raw.len() });
            }
            if let Some(&v) = raw.iter().find(|&&v| v >= n) {
                return Err(Error::VertexOutOfRange { vertex: v + 1, n });
            }
            let mut t: Vec<u32> = raw.iter().map(|&v| v as u32).collect();
            t.sort_unstable();
            if let Some(w) = t.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::RepeatedVertex(w[0] as usize + 1));
            }
            tuples.push(t);
        }
        tuples.sort_unstable();
        tuples.dedup();
        Ok(Self::from_canonical(n, k, key_bits, tuples))
    }

    /// Builds from 1-based edges, as written in the text formats.
    pub fn from_one_based<I, E>(n: usize, k: usize, raw_edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[Vertex]>,
    {
        let mut shifted = Vec::new();
        for e in raw_edges {
            let e = e.as_ref();
            if let Some(&v) = e.iter().find(|&&v| v == 0 || v > n) {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            shifted.push(e.iter().map(|&v| v - 1).collect::<Vec<_>>());
        }
        Self::new(n, k, shifted)
    }

    pub fn edgeless(n: usize, k: usize) -> Result<Self> {
        Self::new(n, k, std::iter::empty::<Vec<Vertex>>())
    }

    fn from_canonical(n: usize, k: usize, key_bits: u32, tuples: Vec<Vec<u32>>) -> Self {
        let mut edges = Vec::with_capacity(tuples.len() * k);
        let mut incidence = vec![Vec::new(); n];
        let mut keys = FxHashSet::default();
        keys.reserve(tuples.len());
        for (id, t) in tuples.iter().enumerate() {
            for &v in t {
                incidence[v as usize].push(id as u32);
            }
            keys.insert(pack(t, key_bits));
            edges.extend_from_slice(t);
        }
        Hypergraph { n, k, edges, incidence, keys, key_bits }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len() / self.k
    }

    pub fn edge(&self, id: usize) -> &[u32] {
        &self.edges[id * self.k..(id + 1) * self.k]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.edges.chunks_exact(self.k)
    }

    /// Edge ids containing `v`, ascending.
    pub fn incidence(&self, v: Vertex) -> &[u32] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.incidence[v].len()
    }

    /// Membership test for a vertex tuple in any order.
    pub fn contains_edge(&self, vertices: &[Vertex]) -> bool {
        if vertices.len() != self.k || vertices.iter().any(|&v| v >= self.n) {
            return false;
        }
        let mut buf = [0u32; MAX_UNIFORMITY];
        for (slot, &v) in buf.iter_mut().zip(vertices) {
            *slot = v as u32;
        }
        let t = &mut buf[..self.k];
        t.sort_unstable();
        self.keys.contains(&pack(t, self.key_bits))
    }

    fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange { vertex: v + 1, n: self.n })
        } else {
            Ok(())
        }
    }

    /// `N_H(u)`: the `(k-1)`-sets `J` with `{u} ∪ J` an edge, in canonical order.
    pub fn neighborhood(&self, u: Vertex) -> Result<Vec<Vec<Vertex>>> {
        self.check_vertex(u)?;
        Ok(self.incidence[u]
            .iter()
            .map(|&id| {
                self.edge(id as usize)
                    .iter()
                    .filter(|&&w| w as usize != u)
                    .map(|&w| w as usize)
                    .collect()
            })
            .collect())
    }

    /// Joint degree `|N_H(u) ∩ N_H(v)|`.
    ///
    /// Edges are stored in lexicographic order, and deleting a common vertex
    /// keeps that order, so both neighborhoods come out of the incidence
    /// lists already sorted and are intersected by a merge.
    pub fn joint_degree(&self, u: Vertex, v: Vertex) -> Result<u64> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SameVertex(u + 1));
        }
        let mut a = self.link_keys(u as u32, v as u32);
        let mut b = self.link_keys(v as u32, u as u32);
        let (mut x, mut y) = (a.next(), b.next());
        let mut count = 0u64;
        while let (Some(p), Some(q)) = (x, y) {
            match p.cmp(&q) {
                std::cmp::Ordering::Less => x = a.next(),
                std::cmp::Ordering::Greater => y = b.next(),
                std::cmp::Ordering::Equal => {
                    count += 1;
                    x = a.next();
                    y = b.next();
                }
            }
        }
        Ok(count)
    }

    /// Packed `e \ {u}` for the edges `e` at `u` avoiding `other`, in increasing order.
    fn link_keys(&self, u: u32, other: u32) -> impl Iterator<Item = u128> + '_ {
        self.incidence[u as usize].iter().filter_map(move |&id| {
            let e = self.edge(id as usize);
            let mut key = 0u128;
            for &w in e {
                if w == other {
                    return None;
                }
                if w != u {
                    key = (key << self.key_bits) | w as u128;
                }
            }
            Some(key)
        })
    }

    /// All joint degrees at once, by grouping edges on their `(k-1)`-subsets.
    pub fn joint_degree_table(&self) -> JointDegreeTable {
        let mut groups: FxHashMap<u128, Vec<u32>> = FxHashMap::default();
        let mut buf = [0u32; MAX_UNIFORMITY];
        for e in self.edges() {
            for skip in 0..self.k {
                let mut len = 0;
                for (i, &w) in e.iter().enumerate() {
                    if i != skip {
                        buf[len] = w;
                        len += 1;
                    }
                }
                groups.entry(pack(&buf[..len], self.key_bits)).or_default().push(e[skip]);
            }
        }
        let n = self.n;
        let mut counts = vec![0u32; n * n];
        for members in groups.values() {
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    counts[a as usize * n + b as usize] += 1;
                    counts[b as usize * n + a as usize] += 1;
                }
            }
        }
        JointDegreeTable { n, counts }
    }

    /// The `J`-link hypergraph on `[n] \ J`; `|J|` must be `1` or `k - 2`.
    pub fn link(&self, j: &[Vertex]) -> Result<Link> {
        let allowed = self.k - 2;
        let size_ok = j.len() == allowed || (j.len() == 1 && self.k >= 3);
        if !size_ok {
            return Err(Error::BadLinkSize { found: j.len(), allowed });
        }
        for &v in j {
            self.check_vertex(v)?;
        }
        let mut sorted: Vec<Vertex> = j.to_vec();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::RepeatedVertex(w[0] + 1));
        }
        let mut relabel = vec![usize::MAX; self.n];
        let mut to_original = Vec::with_capacity(self.n - sorted.len());
        for (v, slot) in relabel.iter_mut().enumerate() {
            if sorted.binary_search(&v).is_err() {
                *slot = to_original.len();
                to_original.push(v);
            }
        }
        let link_edges: Vec<Vec<Vertex>> = match sorted.first() {
            None => self.edges().map(|e| e.iter().map(|&w| relabel[w as usize]).collect()).collect(),
            Some(&anchor) => self.incidence[anchor]
                .iter()
                .map(|&id| self.edge(id as usize))
                .filter(|e| sorted.iter().all(|&v| e.contains(&(v as u32))))
                .map(|e| {
                    e.iter()
                        .filter(|&&w| relabel[w as usize] != usize::MAX)
                        .map(|&w| relabel[w as usize])
                        .collect()
                })
                .collect(),
        };
        let hypergraph = Hypergraph::new(to_original.len(), self.k - sorted.len(), link_edges)?;
        Ok(Link { hypergraph, to_original })
    }

    /// `deg_H(v, U)`: edges `{v} ∪ J` with `J ⊆ U`.
    pub fn degree_into(&self, v: Vertex, target: &VertexSet) -> Result<u64> {
        self.check_vertex(v)?;
        if target.contains(v) {
            return Err(Error::VertexInSet(v + 1));
        }
        Ok(self.incidence[v]
            .iter()
            .filter(|&&id| {
                self.edge(id as usize)
                    .iter()
                    .all(|&w| w as usize == v || target.contains(w as usize))
            })
            .count() as u64)
    }

    /// No edge lies entirely inside `set`.
    pub fn is_independent(&self, set: &VertexSet) -> bool {
        self.edges().all(|e| e.iter().any(|&w| !set.contains(w as usize)))
    }

    /// Some edge has all its vertices on one side.
    pub fn has_monochromatic_edge(&self, partition: &Bipartition) -> bool {
        self.edges().any(|e| {
            let first = partition.side(e[0] as usize);
            e[1..].iter().all(|&w| partition.side(w as usize) == first)
        })
    }

    /// Both sides independent and, for `n >= 2`, both nonempty.
    pub fn is_bipartition(&self, partition: &Bipartition) -> bool {
        if partition.len() != self.n {
            return false;
        }
        if self.n >= 2 {
            let (x, y) = partition.sizes();
            if x == 0 || y == 0 {
                return false;
            }
        }
        !self.has_monochromatic_edge(partition)
    }
}

fn pack(sorted: &[u32], bits: u32) -> u128 {
    sorted.iter().fold(0u128, |acc, &v| (acc << bits) | v as u128)
}

/// Symmetric table of all joint degrees.
#[derive(Debug, Clone)]
pub struct JointDegreeTable {
    n: usize,
    counts: Vec<u32>,
}

impl JointDegreeTable {
    pub fn get(&self, u: Vertex, v: Vertex) -> u64 {
        self.counts[u * self.n + v] as u64
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// The seven lines of the Fano plane on points `0..7`.
pub const FANO_LINES: [[Vertex; 3]; 7] =
    [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];

pub fn fano_plane() -> Hypergraph {
    Hypergraph::new(7, 3, FANO_LINES).expect("Fano lines are valid")
}

/// Complete bipartite k-graph with sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize, k: usize) -> Result<Hypergraph> {
    let n = a + b;
    let mut edges = Vec::new();
    for_each_subset(n, k, |s| {
        let in_x = s.iter().filter(|&&v| v < a).count();
        if in_x > 0 && in_x < k {
            edges.push(s.to_vec());
        }
    });
    Hypergraph::new(n, k, edges)
}

/// Calls `f` on every `r`-subset of `0..n` in lexicographic order.
pub fn for_each_subset<F: FnMut(&[Vertex])>(n: usize, r: usize, mut f: F) {
    if r > n {
        return;
    }
    let mut idx: Vec<Vertex> = (0..r).collect();
    loop {
        f(&idx);
        let mut i = r;
        while i > 0 && idx[i - 1] == i - 1 + n - r {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
