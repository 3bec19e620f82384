//! The joint-degree threshold solver.
//!
//! Step 1 computes the `n - 1` joint degrees `deg(i, i+1)`; step 2 walks the
//! path `1, 2, ..., n`, keeping a vertex on its predecessor's side exactly
//! when their joint degree reaches the threshold; step 3 accepts the
//! candidate if both sides are independent and falls back to exhaustive
//! search otherwise.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::exact::{binomial_i128, int_at_least, Rational};
use crate::exhaustive::{exhaustive_bipartition_with, smallest_partition_with};
use crate::hypergraph::{Bipartition, Hypergraph, Side};
use crate::par::Exec;
use crate::report::{elapsed_ns, Algo, FanoCase, Path, SolveOptions, SolveReport};

/// `(1/4) C(n, k-1) (1 - 3/2^k)`, the midpoint of the same-side and crossing
/// leading-order joint degrees.
pub fn elem_threshold(n: usize, k: usize) -> Rational {
    let pow = 1i128 << k;
    Rational::new(binomial_i128(n as u64, (k - 1) as u64) * (pow - 3), 4 * pow)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElemTrace {
    pub threshold: Rational,
    /// `degrees[i] = deg(i, i+1)` (0-based), length `n - 1`.
    pub degrees: Vec<u64>,
    /// Vertex 0 is always on [`Side::X`].
    pub candidate: Bipartition,
}

fn check_uniformity(h: &Hypergraph) -> Result<()> {
    if h.k() < 3 {
        return Err(Error::InvalidConfig(format!("the joint-degree solver needs k >= 3, got k = {}", h.k())));
    }
    Ok(())
}

/// Step 1: the consecutive joint degrees.
pub fn consecutive_joint_degrees(h: &Hypergraph, exec: Exec) -> Vec<u64> {
    exec.map_range(h.n().saturating_sub(1), |i| h.joint_degree(i, i + 1).expect("distinct in-range vertices"))
}

/// Step 2: the candidate from precomputed degrees.
pub fn candidate_from_degrees(degrees: &[u64], threshold: &Rational) -> Bipartition {
    let mut labels = Vec::with_capacity(degrees.len() + 1);
    labels.push(Side::X);
    for &d in degrees {
        let prev = *labels.last().expect("nonempty");
        labels.push(if int_at_least(d, threshold) { prev } else { prev.flip() });
    }
    Bipartition::from_labels(labels)
}

/// Steps 1 and 2.
pub fn build_candidate_elem(h: &Hypergraph, exec: Exec) -> Result<ElemTrace> {
    check_uniformity(h)?;
    let threshold = elem_threshold(h.n(), h.k());
    let degrees = consecutive_joint_degrees(h, exec);
    let candidate = candidate_from_degrees(&degrees, &threshold);
    Ok(ElemTrace { threshold, degrees, candidate })
}

pub fn solve_elem(h: &Hypergraph) -> Result<SolveReport> {
    solve_elem_with(h, &SolveOptions::default())
}

pub fn solve_elem_with(h: &Hypergraph, opts: &SolveOptions) -> Result<SolveReport> {
    check_uniformity(h)?;
    let mut report = SolveReport::new(Algo::Elem, h);
    let candidate = run_steps_1_2(h, opts, &mut report);

    let start = Instant::now();
    let outcome = if h.is_bipartition(&candidate) {
        Ok((Path::Step3i, candidate))
    } else {
        match exhaustive_bipartition_with(h, &opts.limits) {
            Ok(Some(p)) => Ok((Path::Step3ii, p)),
            Ok(None) => Err(Error::NotBipartite),
            Err(e) => Err(e),
        }
    };
    report.timings.stage3_ns = elapsed_ns(start);
    let (path, partition) = outcome?;
    report.path_taken = path;
    report.partition = Some(partition);
    report.r = Some(2);
    Ok(report.finish())
}

fn run_steps_1_2(h: &Hypergraph, opts: &SolveOptions, report: &mut SolveReport) -> Bipartition {
    let start = Instant::now();
    let degrees = consecutive_joint_degrees(h, opts.exec);
    report.timings.stage1_ns = elapsed_ns(start);
    let start = Instant::now();
    let candidate = candidate_from_degrees(&degrees, &elem_threshold(h.n(), h.k()));
    report.timings.stage2_ns = elapsed_ns(start);
    candidate
}

/// The joint-degree solver followed by a smallest-partition search when no
/// bipartition exists, for 3-graphs.
pub fn solve_fano(h: &Hypergraph) -> Result<SolveReport> {
    solve_fano_with(h, &SolveOptions::default())
}

pub fn solve_fano_with(h: &Hypergraph, opts: &SolveOptions) -> Result<SolveReport> {
    if h.k() != 3 {
        return Err(Error::WrongUniformity { expected: 3, found: h.k() });
    }
    let mut report = SolveReport::new(Algo::Fano, h);
    let candidate = run_steps_1_2(h, opts, &mut report);

    let start = Instant::now();
    let outcome = fano_step_3(h, candidate, opts, &mut report);
    report.timings.stage3_ns = elapsed_ns(start);
    outcome?;
    Ok(report.finish())
}

fn fano_step_3(h: &Hypergraph, candidate: Bipartition, opts: &SolveOptions, report: &mut SolveReport) -> Result<()> {
    if h.num_edges() == 0 {
        // [n] itself is independent.
        report.path_taken = Path::Step3ii;
        report.fano_case = Some(FanoCase::Case2);
        report.r = Some(1);
        report.classes = Some(vec![(0..h.n()).collect()]);
        return Ok(());
    }
    if h.is_bipartition(&candidate) {
        report.path_taken = Path::Step3i;
        report.fano_case = Some(FanoCase::Case1);
        report.r = Some(2);
        report.partition = Some(candidate);
        return Ok(());
    }
    if let Some(p) = exhaustive_bipartition_with(h, &opts.limits)? {
        report.path_taken = Path::Step3ii;
        report.fano_case = Some(FanoCase::Case2);
        report.r = Some(2);
        report.partition = Some(p);
        return Ok(());
    }
    let chromatic = smallest_partition_with(h, h.n(), &opts.limits)?;
    report.path_taken = Path::Step3iii;
    report.fano_case = Some(FanoCase::Case3);
    report.r = Some(chromatic.r);
    report.classes = Some(chromatic.classes());
    Ok(())
}
