//! Exponential fallbacks: bipartition search, smallest partition into
//! independent classes, and Fano-plane containment.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{Bipartition, Hypergraph, Side, Vertex, FANO_LINES};

pub const BIPARTITION_CAP: usize = 30;
pub const CHROMATIC_CAP: usize = 15;
pub const FANO_CAP: usize = 10;

/// How often (in search nodes) the deadline is polled.
const DEADLINE_POLL: u64 = 1 << 14;

/// Limits for the exhaustive stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub bipartition_cap: usize,
    pub chromatic_cap: usize,
    pub deadline: Option<Instant>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { bipartition_cap: BIPARTITION_CAP, chromatic_cap: CHROMATIC_CAP, deadline: None }
    }
}

struct Clock {
    deadline: Option<Instant>,
    nodes: u64,
}

impl Clock {
    fn tick(&mut self, what: &'static str) -> Result<()> {
        self.nodes += 1;
        if let Some(d) = self.deadline {
            if self.nodes.is_multiple_of(DEADLINE_POLL) && Instant::now() >= d {
                return Err(Error::BudgetExceeded(what));
            }
        }
        Ok(())
    }
}

/// First valid bipartition in code order, or `None` if `H` has none.
///
/// Vertex 1 is pinned to `X`. The other vertices form a binary code with
/// vertex `v` at bit `v - 2` (1-based), bit set meaning `X`, so vertex `n` is
/// the most significant bit; codes are tried from 0 upwards.
pub fn exhaustive_bipartition(h: &Hypergraph) -> Result<Option<Bipartition>> {
    exhaustive_bipartition_with(h, &SearchLimits::default())
}

pub fn exhaustive_bipartition_with(h: &Hypergraph, limits: &SearchLimits) -> Result<Option<Bipartition>> {
    let n = h.n();
    if n > limits.bipartition_cap {
        return Err(Error::CapExceeded { what: "exhaustive bipartition", n, cap: limits.bipartition_cap });
    }
    // Vertices are assigned from n-1 down to 1 (0-based), so an edge is
    // complete once its smallest vertex other than 0 is assigned.
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (id, e) in h.edges().enumerate() {
        let last = if e[0] == 0 { e[1] } else { e[0] };
        closing[last as usize].push(id);
    }
    let mut labels = vec![Side::Y; n];
    labels[0] = Side::X;
    let mut clock = Clock { deadline: limits.deadline, nodes: 0 };
    let found = assign_bipartition(h, &closing, &mut labels, n - 1, 0, &mut clock)?;
    Ok(found.then(|| Bipartition::from_labels(labels)))
}

fn assign_bipartition(
    h: &Hypergraph,
    closing: &[Vec<usize>],
    labels: &mut [Side],
    v: Vertex,
    y_count: usize,
    clock: &mut Clock,
) -> Result<bool> {
    if v == 0 {
        return Ok(y_count > 0);
    }
    for side in [Side::Y, Side::X] {
        clock.tick("exhaustive bipartition")?;
        labels[v] = side;
        let ok = closing[v].iter().all(|&id| {
            let e = h.edge(id);
            let first = labels[e[0] as usize];
            e[1..].iter().any(|&w| labels[w as usize] != first)
        });
        let y_next = y_count + usize::from(side == Side::Y);
        if ok && assign_bipartition(h, closing, labels, v - 1, y_next, clock)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A partition into `r` independent classes with `r` minimal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChromaticPartition {
    pub r: usize,
    /// 0-based class id per vertex; vertex 0 is in class 0 and ids appear in
    /// first-use order.
    pub assignment: Vec<usize>,
    /// Every `r' < r` was searched to completion without success.
    pub certified_minimal: bool,
}

impl ChromaticPartition {
    pub fn classes(&self) -> Vec<Vec<Vertex>> {
        let mut classes = vec![Vec::new(); self.r];
        for (v, &c) in self.assignment.iter().enumerate() {
            classes[c].push(v);
        }
        classes
    }
}

/// Smallest `r <= r_cap` admitting a partition into `r` independent classes.
pub fn smallest_partition(h: &Hypergraph, r_cap: usize) -> Result<ChromaticPartition> {
    smallest_partition_with(h, r_cap, &SearchLimits::default())
}

pub fn smallest_partition_with(h: &Hypergraph, r_cap: usize, limits: &SearchLimits) -> Result<ChromaticPartition> {
    let n = h.n();
    if n > limits.chromatic_cap {
        return Err(Error::CapExceeded { what: "smallest partition", n, cap: limits.chromatic_cap });
    }
    // Vertices are assigned in increasing order; an edge closes at its largest vertex.
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (id, e) in h.edges().enumerate() {
        closing[e[h.k() - 1] as usize].push(id);
    }
    let mut clock = Clock { deadline: limits.deadline, nodes: 0 };
    for r in 1..=r_cap.min(n) {
        let mut assignment = vec![0usize; n];
        if assign_classes(h, &closing, &mut assignment, 1, 1, r, &mut clock)? {
            return Ok(ChromaticPartition { r, assignment, certified_minimal: true });
        }
    }
    Err(Error::NoPartitionWithinCap { r_cap })
}

fn assign_classes(
    h: &Hypergraph,
    closing: &[Vec<usize>],
    assignment: &mut [usize],
    v: Vertex,
    used: usize,
    r: usize,
    clock: &mut Clock,
) -> Result<bool> {
    if v == assignment.len() {
        return Ok(true);
    }
    for class in 0..(used + 1).min(r) {
        clock.tick("smallest partition")?;
        assignment[v] = class;
        let ok = closing[v].iter().all(|&id| {
            let e = h.edge(id);
            e.iter().any(|&w| assignment[w as usize] != class)
        });
        if ok && assign_classes(h, closing, assignment, v + 1, used.max(class + 1), r, clock)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether some injection of the seven Fano points maps every line to an edge.
pub fn contains_fano(h: &Hypergraph) -> Result<bool> {
    if h.k() != 3 {
        return Err(Error::WrongUniformity { expected: 3, found: h.k() });
    }
    if h.n() > FANO_CAP {
        return Err(Error::CapExceeded { what: "Fano search", n: h.n(), cap: FANO_CAP });
    }
    if h.n() < 7 || h.num_edges() < 7 {
        return Ok(false);
    }
    let mut image = [usize::MAX; 7];
    let mut used = vec![false; h.n()];
    Ok(place_point(h, &mut image, &mut used, 0))
}

fn place_point(h: &Hypergraph, image: &mut [usize; 7], used: &mut [bool], point: usize) -> bool {
    if point == 7 {
        return true;
    }
    for v in 0..h.n() {
        if used[v] || h.degree(v) < 3 {
            continue;
        }
        image[point] = v;
        // Lines are increasing, so a line is complete when its last point is placed.
        let ok = FANO_LINES
            .iter()
            .filter(|line| line[2] == point)
            .all(|line| h.contains_edge(&[image[line[0]], image[line[1]], image[line[2]]]));
        if ok {
            used[v] = true;
            if place_point(h, image, used, point + 1) {
                return true;
            }
            used[v] = false;
        }
    }
    false
}
