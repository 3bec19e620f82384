//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p hyperbip --test acceptance`.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use hyperbip::bench::{fit_scaling, run_bench, EnsembleConfig};
use hyperbip::elem::{elem_threshold, solve_elem, solve_fano};
use hyperbip::exact::Rational;
use hyperbip::exhaustive::{exhaustive_bipartition, smallest_partition};
use hyperbip::hypergraph::{complete_bipartite, fano_plane};
use hyperbip::io::parse_khg;
use hyperbip::models::{derive_seed, sample_instance, sample_planted, sample_partition, Model, PartitionSpec};
use hyperbip::regbip::{approx_bipartition, edit, solve_reg, RegBipConfig};
use hyperbip::regularity::{
    check_regular_pair, regularize, CertificateMode, Graph, RegConfig, Regularization, EXHAUSTIVE_LIMIT,
};
use hyperbip::report::{Algo, Path};
use hyperbip::verify::{check_sigma_standard, joint_degree_stats, PairCase};
use hyperbip::{Bipartition, Error, Exec, Hypergraph, Side, VertexSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn binom(n: u64, r: u64) -> i128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// Every valid bipartition of `h`, found by plain enumeration with vertex 0 on X.
fn all_bipartitions(h: &Hypergraph) -> Vec<Bipartition> {
    let n = h.n();
    (0u64..1 << (n - 1))
        .map(|code| {
            Bipartition::from_labels(
                (0..n).map(|v| if v == 0 || code >> (v - 1) & 1 == 1 { Side::X } else { Side::Y }).collect(),
            )
        })
        .filter(|p| h.is_bipartition(p))
        .collect()
}

fn validity_suite() -> Outcome {
    let start = Instant::now();
    let (mut outputs, mut failures, mut errors) = (0, 0, 0);
    for i in 0..1000usize {
        let n = 8 + i % 53;
        let model = if i % 2 == 0 { Model::Planted } else { Model::NearUniform };
        let inst = sample_instance(model, n, 3, derive_seed(101, n, i)).unwrap();
        let h = &inst.hypergraph;
        for result in [solve_elem(h), solve_reg(h, &RegBipConfig::default()), solve_fano(h)] {
            match result {
                Ok(r) => {
                    outputs += 1;
                    let ok = match &r.partition {
                        Some(p) => h.is_bipartition(p),
                        None => r.algo == Algo::Fano,
                    };
                    failures += usize::from(!ok);
                }
                Err(_) => errors += 1,
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures == 0 && elapsed < Duration::from_secs(120);
    outcome(pass, format!("{outputs} outputs, {failures} invalid, {errors} errors, {elapsed:.1?}"))
}

fn threshold_identity() -> Outcome {
    let mut mismatches = 0;
    for k in 3..=8u32 {
        for n in 10..=100u64 {
            // Leading terms of the same-side and crossing joint degrees.
            let c = binom(n, u64::from(k) - 1);
            let half = 1i128 << (k - 1);
            let same = Rational::new(c * (half - 1), 4 * half);
            let cross = Rational::new(c * (half - 2), 4 * half);
            let mean = (same + cross) / Rational::from_integer(2);
            if elem_threshold(n as usize, k as usize) != mean {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches over k in 3..=8, n in 10..=100"))
}

fn concentration() -> Outcome {
    // Exact expectations for n = 100 with 50/50 sides: J ranges over 2-sets
    // of the other 98 vertices, each needed edge is present with probability 1/2.
    let same = (binom(98, 2) - binom(48, 2)) as f64 / 4.0;
    let cross = (binom(98, 2) - 2 * binom(49, 2)) as f64 / 4.0;
    assert_eq!((same, cross), (906.25, 600.25));
    let seeds = 30;
    let (mut means_ok, mut clean) = (0, 0);
    let mut worst = 0.0f64;
    for s in 0..seeds {
        let p = sample_partition(100, PartitionSpec::ExactBalanced, 3000 + s).unwrap();
        let inst = sample_planted(100, 3, &p, 3000 + s).unwrap();
        let stats = joint_degree_stats(&inst.hypergraph, &p, Exec::Parallel).unwrap();
        let devs = [
            (stats.case(PairCase::SameX).mean - same).abs() / same,
            (stats.case(PairCase::SameY).mean - same).abs() / same,
            (stats.case(PairCase::Cross).mean - cross).abs() / cross,
        ];
        worst = devs.iter().copied().fold(worst, f64::max);
        means_ok += usize::from(devs.iter().all(|&d| d <= 0.03));
        let sigma = check_sigma_standard(&inst.hypergraph, &p, 0.1, Exec::Parallel).unwrap();
        clean += usize::from(sigma.violations.is_empty());
    }
    let frac = clean as f64 / seeds as f64;
    let pass = means_ok == seeds as usize && frac >= 0.95;
    outcome(
        pass,
        format!("means within 3% in {means_ok}/{seeds} seeds (worst {:.2}%); violation-free at sigma=0.1 in {clean}/{seeds} = {frac:.3}", worst * 100.0),
    )
}

fn elem_recovery() -> Outcome {
    let start = Instant::now();
    let mut cfg = EnsembleConfig::new(3, vec![60, 100], 200, Algo::Elem);
    cfg.seed = 4;
    let records = run_bench(&cfg).unwrap();
    let rate = |n: usize| {
        let rs: Vec<_> = records.iter().filter(|r| r.n == n).collect();
        rs.iter().filter(|r| r.path == Path::Step3i && r.recovered_planted).count() as f64 / rs.len() as f64
    };
    let (r60, r100) = (rate(60), rate(100));
    let elapsed = start.elapsed();
    let pass = r60 >= 0.95 && r100 >= 0.99 && elapsed < Duration::from_secs(60);
    outcome(pass, format!("n=60: {r60:.3} (need 0.95), n=100: {r100:.3} (need 0.99), {elapsed:.1?}"))
}

fn uniqueness() -> Outcome {
    // σ-standard: every bipartition keeps all joint degrees in the band.
    let sigma = 0.3;
    let (mut found, mut exceptions, mut drawn) = (0, 0, 0);
    'outer: for n in [12usize, 13, 14] {
        for trial in 0..2000 {
            if found == 100 {
                break 'outer;
            }
            drawn += 1;
            let inst = sample_instance(Model::Planted, n, 3, derive_seed(55, n, trial)).unwrap();
            let h = &inst.hypergraph;
            let parts = all_bipartitions(h);
            let standard = parts
                .iter()
                .all(|p| check_sigma_standard(h, p, sigma, Exec::Sequential).unwrap().pass);
            if !standard {
                continue;
            }
            found += 1;
            if parts.len() != 1 || !parts[0].eq_up_to_swap(&inst.planted) {
                exceptions += 1;
            }
        }
    }
    let pass = found == 100 && exceptions == 0;
    outcome(pass, format!("{found} sigma-standard instances (sigma={sigma}) from {drawn} draws, {exceptions} with more than one bipartition"))
}

fn corpus() -> Vec<(String, Hypergraph)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e == "khg"))
        .map(|p| {
            let h = parse_khg(&std::fs::read_to_string(&p).unwrap()).unwrap();
            (p.file_name().unwrap().to_string_lossy().into_owned(), h)
        })
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let mut mismatches = Vec::new();
    let mut instances = corpus();
    instances.push(("fano (built in)".into(), fano_plane()));
    instances.push(("K(3,3) (built in)".into(), complete_bipartite(3, 3, 3).unwrap()));
    let mut checked = 0;
    for (name, h) in instances.iter().filter(|(_, h)| h.n() <= 12) {
        checked += 1;
        let exists = exhaustive_bipartition(h).unwrap().is_some();
        let results = [("elem", solve_elem(h)), ("reg", solve_reg(h, &RegBipConfig::default()))];
        for (algo, result) in results {
            let ok = match (&result, exists) {
                (Ok(r), true) => h.is_bipartition(r.partition.as_ref().unwrap()),
                (Err(Error::NotBipartite), false) => true,
                _ => false,
            };
            if !ok {
                mismatches.push(format!("{name}/{algo}"));
            }
        }
        if h.k() == 3 && !exists {
            let r = solve_fano(h).unwrap();
            if r.r.is_none_or(|r| r < 3) {
                mismatches.push(format!("{name}/fano"));
            }
        }
    }
    outcome(mismatches.is_empty(), format!("{checked} instances, mismatches: {mismatches:?}"))
}

fn edit_correction() -> Outcome {
    let (mut exact, mut total) = (0, 0);
    for n in [100usize, 200] {
        for s in 0..50u64 {
            let inst = sample_instance(Model::Planted, n, 3, derive_seed(77, n, s as usize)).unwrap();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
            let mut labels = inst.planted.labels().to_vec();
            for &v in &order[..n / 20] {
                labels[v] = labels[v].flip();
            }
            let corrupted = Bipartition::from_labels(labels);
            total += 1;
            exact += usize::from(edit(&inst.hypergraph, &corrupted).unwrap() == inst.planted);
        }
    }
    outcome(exact == total, format!("{exact}/{total} corrected exactly"))
}

fn proximity() -> Outcome {
    let n = 300;
    let cfg = RegBipConfig::with_epsilon(0.1);
    let bound = 5.0 * 0.1f64.sqrt() * n as f64;
    let (mut close, mut pure_runs, mut worst_purity) = (0, 0, 1.0f64);
    let seeds = 20;
    for s in 0..seeds {
        let inst = sample_instance(Model::Planted, n, 3, derive_seed(88, n, s)).unwrap();
        let x = inst.planted.members(Side::X)[0];
        let a = approx_bipartition(&inst.hypergraph, &[x], &cfg).unwrap();
        let diff = (0..n).filter(|&v| a.partition.side(v) != inst.planted.side(v)).count();
        close += usize::from(diff as f64 <= bound);
        let plus = a.provenance.plus();
        let pure = plus
            .iter()
            .filter(|&&i| {
                let class = &a.provenance.classes[i];
                let in_x = class.iter().filter(|&&v| inst.planted.side(v) == Side::X).count();
                (in_x.min(class.len() - in_x) as f64) < 0.1 * class.len() as f64
            })
            .count();
        let purity = if plus.is_empty() { 0.0 } else { pure as f64 / plus.len() as f64 };
        worst_purity = worst_purity.min(purity);
        pure_runs += usize::from(purity >= 0.95);
    }
    let frac = close as f64 / seeds as f64;
    let pass = frac >= 0.9 && pure_runs == seeds;
    outcome(
        pass,
        format!("within {bound:.1}: {close}/{seeds}; runs with >= 95% pure [t]_+ classes: {pure_runs}/{seeds} (worst {worst_purity:.3})"),
    )
}

fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.random_bool(p)).collect();
    Graph::from_edges(n, edges).unwrap()
}

fn regularity_engine() -> Outcome {
    let heuristic = RegConfig::default();
    let exhaustive = RegConfig { certificate_mode: CertificateMode::ExhaustiveSmall, t0: 4, t_cap: 8, ..RegConfig::default() };
    let mut runs: Vec<(String, Graph, RegConfig)> = Vec::new();
    for s in 0..3u64 {
        let inst = sample_instance(Model::Planted, 200, 3, derive_seed(99, 200, s as usize)).unwrap();
        runs.push((format!("link {s}"), Graph::link_of(&inst.hypergraph, &[0]).unwrap(), heuristic.clone()));
        let small = sample_instance(Model::Planted, 49, 3, derive_seed(99, 49, s as usize)).unwrap();
        let link = small.hypergraph.link(&[0]).unwrap();
        runs.push((format!("small link {s}"), Graph::from_hypergraph(&link.hypergraph).unwrap(), exhaustive.clone()));
        runs.push((format!("gnp {s}"), random_graph(150, 0.3, s), heuristic.clone()));
        runs.push((format!("small gnp {s}"), random_graph(48, 0.5, s), exhaustive.clone()));
    }
    let split = Graph::from_edges(80, (0..80).flat_map(|u| (u + 1..80).map(move |v| (u, v))).filter(|&(u, v)| u % 2 == 1 || v % 2 == 1)).unwrap();
    runs.push(("independent plus clique".into(), split, RegConfig { t0: 4, ..heuristic.clone() }));
    runs.push(("edgeless".into(), Graph::edgeless(50), heuristic.clone()));

    let mut problems = Vec::new();
    let mut pairs_checked = 0;
    for (name, g, cfg) in &runs {
        let Regularization { partition, cluster, rounds, .. } = regularize(g, cfg).unwrap();
        let sizes = partition.sizes();
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        let covered: usize = sizes.iter().sum();
        if hi - lo > 1 || covered != g.n() {
            problems.push(format!("{name}: sizes {lo}..{hi}, cover {covered}"));
        }
        if rounds.windows(2).any(|w| w[1].index < w[0].index - 1e-12) {
            problems.push(format!("{name}: index decreased"));
        }
        for &(i, j) in cluster.regular_pairs() {
            let a = VertexSet::from_iter(g.n(), partition.class(i).iter().copied());
            let b = VertexSet::from_iter(g.n(), partition.class(j).iter().copied());
            let small = a.len() <= EXHAUSTIVE_LIMIT && b.len() <= EXHAUSTIVE_LIMIT;
            let mode = if cfg.certificate_mode == CertificateMode::ExhaustiveSmall && small {
                CertificateMode::ExhaustiveSmall
            } else {
                cfg.certificate_mode
            };
            pairs_checked += 1;
            if !check_regular_pair(g, &a, &b, cfg.epsilon, mode).unwrap().is_certified() {
                problems.push(format!("{name}: pair ({i}, {j}) fails re-verification"));
            }
        }
    }
    outcome(problems.is_empty(), format!("{} runs, {pairs_checked} certified pairs re-verified, problems: {problems:?}", runs.len()))
}

fn fano_extension() -> Outcome {
    let mut problems = Vec::new();
    let chi = smallest_partition(&fano_plane(), 7).unwrap();
    if chi.r != 3 || !chi.certified_minimal {
        problems.push(format!("chi(Fano) = {}", chi.r));
    }
    let cases: Vec<(&str, Hypergraph, usize)> = vec![
        ("Fano", fano_plane(), 3),
        ("edgeless", Hypergraph::edgeless(9, 3).unwrap(), 1),
        ("K(3,3)", complete_bipartite(3, 3, 3).unwrap(), 2),
        ("K(4,5)", complete_bipartite(4, 5, 3).unwrap(), 2),
        ("planted 12", sample_instance(Model::Planted, 12, 3, 1).unwrap().hypergraph, 2),
        ("planted 40", sample_instance(Model::Planted, 40, 3, 2).unwrap().hypergraph, 2),
    ];
    for (name, h, want) in cases {
        match solve_fano(&h) {
            Ok(r) if r.r == Some(want) => {}
            other => problems.push(format!("{name}: {:?}", other.map(|r| r.r))),
        }
    }
    outcome(problems.is_empty(), format!("chi(Fano) = {}, problems: {problems:?}", chi.r))
}

fn scaling() -> Outcome {
    let start = Instant::now();
    let mut cfg = EnsembleConfig::new(3, vec![40, 60, 80, 120, 160], 30, Algo::Elem);
    cfg.seed = 11;
    cfg.exec = Exec::Sequential;
    let records = run_bench(&cfg).unwrap();
    let elapsed = start.elapsed();
    match fit_scaling(&records) {
        Ok(fit) => {
            let pass = (2.5..=3.5).contains(&fit.slope) && elapsed < Duration::from_secs(300);
            outcome(pass, format!("slope {:.3} (95% CI {:.3}..{:.3}), {elapsed:.1?}", fit.slope, fit.ci_low, fit.ci_high))
        }
        Err(e) => outcome(false, format!("fit failed: {e}")),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("validity suite", validity_suite),
        ("threshold identity", threshold_identity),
        ("joint-degree concentration", concentration),
        ("elem recovery", elem_recovery),
        ("uniqueness", uniqueness),
        ("oracle equivalence", oracle_equivalence),
        ("edit correction", edit_correction),
        ("approximate bipartition proximity", proximity),
        ("regularity engine", regularity_engine),
        ("Fano extension", fano_extension),
        ("scaling", scaling),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!("{} criterion {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
