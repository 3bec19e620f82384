//! Checkable versions of the structural definitions: σ-standard joint
//! degrees, δ-typicality, γ-equitable sizes, and joint-degree statistics
//! against their planted-model expectations.
//!
//! All band checks are exact: the parameters are read as dyadic rationals
//! (see [`crate::exact`]) and compared against integer counts.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{binomial, binomial_i128, Dyadic, Rational};
use crate::hypergraph::{for_each_subset, Bipartition, Hypergraph, Side, Vertex, VertexSet};
use crate::models::{stream_rng, SAMPLE_STREAM};
use crate::par::Exec;
use crate::regularity::Graph;

/// Largest `n` for [`check_sigma_standard`].
pub const SIGMA_CAP: usize = 2000;
/// Largest `n` for which (R) is checked by full enumeration.
pub const TYPICALITY_EXACT_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairCase {
    SameX,
    SameY,
    Cross,
}

impl PairCase {
    pub fn of(p: &Bipartition, u: Vertex, v: Vertex) -> PairCase {
        match (p.side(u), p.side(v)) {
            (Side::X, Side::X) => PairCase::SameX,
            (Side::Y, Side::Y) => PairCase::SameY,
            _ => PairCase::Cross,
        }
    }
}

/// Exact `E[deg(u, v)]` in the planted model with side sizes `(|X|, |Y|)`.
pub fn expected_joint_degree(n: usize, k: usize, sizes: (usize, usize), case: PairCase) -> Result<Rational> {
    let (x, y) = sizes;
    if x + y != n {
        return Err(Error::PartitionLength { expected: n, found: x + y });
    }
    if k < 2 {
        return Err(Error::UniformityTooSmall(k));
    }
    let needs = match case {
        PairCase::SameX => x >= 2,
        PairCase::SameY => y >= 2,
        PairCase::Cross => x >= 1 && y >= 1,
    };
    if !needs {
        return Err(Error::InvalidConfig(format!("sides {x}/{y} too small for {case:?}")));
    }
    let c = |a: usize| binomial_i128(a as u64, (k - 1) as u64);
    let total = c(n - 2);
    let missing = match case {
        PairCase::SameX => c(x - 2),
        PairCase::SameY => c(y - 2),
        PairCase::Cross => c(x - 1) + c(y - 1),
    };
    Ok(Rational::new(total - missing, 4))
}

/// Leading-order expectation `(1/4) C(n, k-1) (1 - m / 2^(k-1))` with `m = 1`
/// for same-side pairs and `m = 2` for crossing pairs.
pub fn leading_joint_degree(n: usize, k: usize, same_side: bool) -> Rational {
    let pow = 1i128 << (k - 1);
    let m = if same_side { 1 } else { 2 };
    Rational::new(binomial_i128(n as u64, (k - 1) as u64) * (pow - m), 4 * pow)
}

/// `(1 - γ) n/2 <= |smaller side| <= |larger side| <= (1 + γ) n/2`.
pub fn check_gamma_equitable(p: &Bipartition, gamma: f64) -> bool {
    let (x, y) = p.sizes();
    let n = (x + y) as u128;
    // Both inequalities reduce to | |X| - |Y| | <= γ n.
    !Dyadic::new(gamma.max(0.0)).exceeded_by(x.abs_diff(y) as u128, n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaViolation {
    /// 0-based vertex ids.
    pub u: Vertex,
    pub v: Vertex,
    pub observed: u64,
    pub center: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaReport {
    pub sigma: f64,
    /// Whether `0 < σ < 2^-k`, the range the definition assumes.
    pub sigma_in_range: bool,
    pub pairs_checked: usize,
    pub violations: Vec<SigmaViolation>,
    pub pass: bool,
}

/// Tests every pair against `(1/4) C(n, k-1) (1 - m/2^(k-1) ± σ)`.
pub fn check_sigma_standard(h: &Hypergraph, p: &Bipartition, sigma: f64, exec: Exec) -> Result<SigmaReport> {
    let (n, k) = (h.n(), h.k());
    if p.len() != n {
        return Err(Error::PartitionLength { expected: n, found: p.len() });
    }
    if n > SIGMA_CAP {
        return Err(Error::CapExceeded { what: "sigma check", n, cap: SIGMA_CAP });
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidConfig(format!("sigma must be >= 0, got {sigma}")));
    }
    let sig = Dyadic::new(sigma);
    let pow = 1u128 << (k - 1);
    let c = binomial(n as u64, (k - 1) as u64);
    let table = h.joint_degree_table();
    // |4 deg 2^(k-1) - C (2^(k-1) - m)| <= σ C 2^(k-1)
    let rows = exec.map_range(n, |u| {
        let mut out = Vec::new();
        for v in u + 1..n {
            let m = if p.side(u) == p.side(v) { 1 } else { 2 };
            let d = table.get(u, v);
            let gap = (4 * d as u128 * pow).abs_diff(c * (pow - m));
            if sig.exceeded_by(gap, c * pow) {
                let center = c as f64 * (pow - m) as f64 / (4 * pow) as f64;
                out.push(SigmaViolation { u, v, observed: d, center, half_width: c as f64 * sigma / 4.0 });
            }
        }
        out
    });
    let violations: Vec<SigmaViolation> = rows.into_iter().flatten().collect();
    Ok(SigmaReport {
        sigma,
        sigma_in_range: sigma > 0.0 && sigma < 1.0 / pow as f64 / 2.0,
        pairs_checked: n * n.saturating_sub(1) / 2,
        pass: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TypicalityMode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RProperty {
    R1,
    R2,
    R3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QViolation {
    pub vertex: Vertex,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RViolation {
    pub property: RProperty,
    pub j: Vec<Vertex>,
    pub x0_size: usize,
    pub y0_size: usize,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypicalityReport {
    pub delta: f64,
    pub p_pass: bool,
    pub sizes: (usize, usize),
    pub q_pass: bool,
    pub q_violations: Vec<QViolation>,
    pub mode: TypicalityMode,
    pub r_samples: usize,
    pub r_seed: u64,
    pub r_violations: Vec<RViolation>,
    pub pass: bool,
}

/// `|2 observed - target| <= δ target`, i.e. `observed = (1 ± δ) target / 2`.
fn within_half_band(delta: Dyadic, observed: u64, target: u128) -> bool {
    !delta.exceeded_by((2 * observed as u128).abs_diff(target), target)
}

/// Checks (P), (Q) and (R) for the given bipartition.
///
/// (R) is enumerated exactly for `n <= 12`; beyond that, `samples` triples
/// `(J, X_0, Y_0)` are drawn: `J` uniform among `(k-2)`-sets, then each of
/// `X_0 ⊆ X \ J`, `Y_0 ⊆ Y \ J` uniform among subsets of a size drawn
/// uniformly from the admissible range `(δn, |side \ J|]`.
pub fn check_delta_typical(h: &Hypergraph, p: &Bipartition, delta: f64, samples: usize, seed: u64) -> Result<TypicalityReport> {
    let (n, k) = (h.n(), h.k());
    if p.len() != n {
        return Err(Error::PartitionLength { expected: n, found: p.len() });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidConfig(format!("delta must be > 0, got {delta}")));
    }
    if k < 3 {
        return Err(Error::UniformityTooSmall(k));
    }
    let d = Dyadic::new(delta);
    let (x, y) = p.sizes();
    let p_pass = within_half_band(d, x as u64, n as u128) && within_half_band(d, y as u64, n as u128);

    let x_set = p.side_set(Side::X);
    let y_set = p.side_set(Side::Y);
    let mut q_violations = Vec::new();
    for v in 0..n {
        let (other, size) = match p.side(v) {
            Side::X => (&y_set, y),
            Side::Y => (&x_set, x),
        };
        let target = binomial(size as u64, (k - 1) as u64);
        let observed = h.degree_into(v, other)?;
        if !within_half_band(d, observed, target) {
            q_violations.push(QViolation { vertex: v, observed, expected: target as f64 / 2.0 });
        }
    }

    let min_size = d.min_count_above(n);
    let mut links: FxHashMap<Vec<Vertex>, Graph> = FxHashMap::default();
    let mut r_violations = Vec::new();
    let mut check_triple = |j: &[Vertex], x0: &[Vertex], y0: &[Vertex], out: &mut Vec<RViolation>| -> Result<()> {
        if !links.contains_key(j) {
            links.insert(j.to_vec(), Graph::link_of(h, j)?);
        }
        let g = &links[j];
        let x0_set = VertexSet::from_iter(n, x0.iter().copied());
        let y0_set = VertexSet::from_iter(n, y0.iter().copied());
        let (a, b) = (x0.len(), y0.len());
        let mut push = |property, observed, target: u128| {
            out.push(RViolation { property, j: j.to_vec(), x0_size: a, y0_size: b, observed, expected: target as f64 / 2.0 })
        };
        let cross = g.edges_between(x0, y0_set.bits());
        if !within_half_band(d, cross, (a * b) as u128) {
            push(RProperty::R1, cross, (a * b) as u128);
        }
        for (set, bits, side, prop) in [(x0, &x0_set, Side::X, RProperty::R2), (y0, &y0_set, Side::Y, RProperty::R3)] {
            let inside = g.edges_within(set, bits.bits());
            let j_inside = j.iter().all(|&v| p.side(v) == side);
            let pairs = binomial(set.len() as u64, 2);
            let ok = if j_inside { inside == 0 } else { within_half_band(d, inside, pairs) };
            if !ok {
                push(prop, inside, if j_inside { 0 } else { pairs });
            }
        }
        Ok(())
    };

    let (mode, r_samples) = if n <= TYPICALITY_EXACT_CAP {
        let mut js = Vec::new();
        for_each_subset(n, k - 2, |j| js.push(j.to_vec()));
        let mut count = 0;
        for j in &js {
            let xs: Vec<Vertex> = (0..n).filter(|v| p.side(*v) == Side::X && !j.contains(v)).collect();
            let ys: Vec<Vertex> = (0..n).filter(|v| p.side(*v) == Side::Y && !j.contains(v)).collect();
            for x0 in subsets_at_least(&xs, min_size) {
                for y0 in subsets_at_least(&ys, min_size) {
                    check_triple(j, &x0, &y0, &mut r_violations)?;
                    count += 1;
                }
            }
        }
        (TypicalityMode::Exact, count)
    } else {
        let mut rng = stream_rng(seed, SAMPLE_STREAM);
        let all: Vec<Vertex> = (0..n).collect();
        let mut count = 0;
        for _ in 0..samples {
            let mut j: Vec<Vertex> = all.choose_multiple(&mut rng, k - 2).copied().collect();
            j.sort_unstable();
            let mut xs: Vec<Vertex> = x_set.iter().filter(|v| !j.contains(v)).collect();
            let mut ys: Vec<Vertex> = y_set.iter().filter(|v| !j.contains(v)).collect();
            if xs.len() < min_size || ys.len() < min_size {
                continue;
            }
            let a = rng.random_range(min_size.max(1)..=xs.len());
            let b = rng.random_range(min_size.max(1)..=ys.len());
            xs.shuffle(&mut rng);
            ys.shuffle(&mut rng);
            check_triple(&j, &xs[..a], &ys[..b], &mut r_violations)?;
            count += 1;
        }
        (TypicalityMode::Sampled, count)
    };

    let q_pass = q_violations.is_empty();
    Ok(TypicalityReport {
        delta,
        p_pass,
        sizes: (x, y),
        q_pass,
        q_violations,
        mode,
        r_samples,
        r_seed: seed,
        pass: p_pass && q_pass && r_violations.is_empty(),
        r_violations,
    })
}

/// All subsets of `items` with at least `min` elements (and at least one).
fn subsets_at_least(items: &[Vertex], min: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << items.len()) {
        if (mask.count_ones() as usize) >= min {
            out.push((0..items.len()).filter(|&i| mask >> i & 1 == 1).map(|i| items[i]).collect());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseStats {
    pub pairs: usize,
    pub mean: f64,
    pub min: u64,
    pub max: u64,
    /// Exact planted-model expectation, when the sides are large enough.
    pub expected: Option<f64>,
    /// `(mean - expected) / expected`.
    pub relative_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDegreeStats {
    pub same_x: CaseStats,
    pub same_y: CaseStats,
    pub cross: CaseStats,
}

impl JointDegreeStats {
    pub fn case(&self, case: PairCase) -> &CaseStats {
        match case {
            PairCase::SameX => &self.same_x,
            PairCase::SameY => &self.same_y,
            PairCase::Cross => &self.cross,
        }
    }
}

/// Aggregates all joint degrees by pair case.
pub fn joint_degree_stats(h: &Hypergraph, p: &Bipartition, exec: Exec) -> Result<JointDegreeStats> {
    let n = h.n();
    if p.len() != n {
        return Err(Error::PartitionLength { expected: n, found: p.len() });
    }
    let table = h.joint_degree_table();
    #[derive(Clone, Copy)]
    struct Acc {
        pairs: usize,
        sum: u64,
        min: u64,
        max: u64,
    }
    let empty = Acc { pairs: 0, sum: 0, min: u64::MAX, max: 0 };
    let merge = |a: Acc, b: Acc| Acc { pairs: a.pairs + b.pairs, sum: a.sum + b.sum, min: a.min.min(b.min), max: a.max.max(b.max) };
    let rows = exec.map_range(n, |u| {
        let mut acc = [empty; 3];
        for v in u + 1..n {
            let d = table.get(u, v);
            let slot = &mut acc[PairCase::of(p, u, v) as usize];
            *slot = merge(*slot, Acc { pairs: 1, sum: d, min: d, max: d });
        }
        acc
    });
    let totals = rows.into_iter().fold([empty; 3], |t, r| [merge(t[0], r[0]), merge(t[1], r[1]), merge(t[2], r[2])]);
    let sizes = p.sizes();
    let stats = |case: PairCase| {
        let acc = totals[case as usize];
        let mean = if acc.pairs == 0 { 0.0 } else { acc.sum as f64 / acc.pairs as f64 };
        let expected = expected_joint_degree(n, h.k(), sizes, case)
            .ok()
            .map(|r| *r.numer() as f64 / *r.denom() as f64);
        CaseStats {
            pairs: acc.pairs,
            mean,
            min: if acc.pairs == 0 { 0 } else { acc.min },
            max: acc.max,
            expected,
            relative_deviation: expected.filter(|&e| e > 0.0).map(|e| (mean - e) / e),
        }
    };
    Ok(JointDegreeStats { same_x: stats(PairCase::SameX), same_y: stats(PairCase::SameY), cross: stats(PairCase::Cross) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::complete_bipartite;
    use crate::models::{sample_partition, sample_planted, PartitionSpec};

    #[test]
    fn expected_degrees() {
        let same = expected_joint_degree(100, 3, (50, 50), PairCase::SameX).unwrap();
        assert_eq!(same, Rational::new(3625, 4));
        let cross = expected_joint_degree(100, 3, (50, 50), PairCase::Cross).unwrap();
        assert_eq!(cross, Rational::new(2401, 4));
        assert!(expected_joint_degree(100, 3, (50, 49), PairCase::Cross).is_err());
        assert!(expected_joint_degree(3, 3, (1, 2), PairCase::SameX).is_err());
        // Leading-term ratios at k = 3.
        assert_eq!(leading_joint_degree(100, 3, true), Rational::new(4950 * 3, 16));
        assert_eq!(leading_joint_degree(100, 3, false), Rational::new(4950 * 2, 16));
    }

    #[test]
    fn gamma_equitable_examples() {
        let split = |x: usize| Bipartition::from_x_members(100, 0..x);
        assert!(check_gamma_equitable(&split(50), 0.01));
        assert!(!check_gamma_equitable(&split(40), 0.1));
        assert!(check_gamma_equitable(&split(45), 0.1));
        assert!(check_gamma_equitable(&split(55), 0.1));
    }

    #[test]
    fn sigma_examples() {
        let edgeless = Hypergraph::edgeless(50, 3).unwrap();
        let half = Bipartition::from_x_members(50, 0..25);
        assert!(!check_sigma_standard(&edgeless, &half, 0.1, Exec::Sequential).unwrap().pass);
        let kb = complete_bipartite(3, 3, 3).unwrap();
        let planted = Bipartition::from_x_members(6, 0..3);
        let report = check_sigma_standard(&kb, &planted, 0.03, Exec::Sequential).unwrap();
        assert!(!report.pass);
        assert!(report.violations.iter().any(|v| v.u == 2 && v.v == 3 && v.observed == 4));
    }

    #[test]
    fn stats_on_small_cases() {
        let edgeless = Hypergraph::edgeless(10, 3).unwrap();
        let p = Bipartition::from_x_members(10, 0..5);
        let s = joint_degree_stats(&edgeless, &p, Exec::Parallel).unwrap();
        assert_eq!((s.same_x.mean, s.same_y.mean, s.cross.mean), (0.0, 0.0, 0.0));
        let kb = complete_bipartite(3, 3, 3).unwrap();
        let s = joint_degree_stats(&kb, &Bipartition::from_x_members(6, 0..3), Exec::Sequential).unwrap();
        assert_eq!((s.same_x.min, s.same_x.max, s.same_x.pairs), (6, 6, 3));
        assert_eq!((s.cross.min, s.cross.max, s.cross.pairs), (4, 4, 9));
        // Exact expectation at |X| = |Y| = 3, k = 3: (C(4,2) - C(1,2)) / 4 = 3/2 for same side.
        assert_eq!(s.same_x.expected, Some(1.5));
    }

    #[test]
    fn typicality_zero_cases_and_edgeless() {
        let p = sample_partition(40, PartitionSpec::ExactBalanced, 3).unwrap();
        let inst = sample_planted(40, 3, &p, 3).unwrap();
        let report = check_delta_typical(&inst.hypergraph, &p, 0.1, 200, 1).unwrap();
        assert_eq!(report.mode, TypicalityMode::Sampled);
        assert!(report.p_pass);
        assert!(report.r_violations.iter().all(|v| v.expected > 0.0), "zero cases must hold exactly");
        let edgeless = Hypergraph::edgeless(10, 3).unwrap();
        let half = Bipartition::from_x_members(10, 0..5);
        let report = check_delta_typical(&edgeless, &half, 0.1, 0, 0).unwrap();
        assert!(!report.q_pass);
        assert_eq!(report.mode, TypicalityMode::Exact);
        assert!(report.r_samples > 0);
    }
}
