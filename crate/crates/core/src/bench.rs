//! Ensemble benchmark harness: seeded instance streams, per-stage timing,
//! CSV emission and a log-log scaling fit.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::elem::{solve_elem_with, solve_fano_with};
use crate::error::{Error, Result};
use crate::exhaustive::SearchLimits;
use crate::hypergraph::Hypergraph;
use crate::models::{derive_seed, sample_instance, stream_rng, Model, SAMPLE_STREAM};
use crate::par::Exec;
use crate::regbip::{solve_reg, RegBipConfig};
use crate::report::{elapsed_ns, Algo, Path, SolveOptions, SolveReport};

pub const CSV_HEADER: &str = "n,k,seed,algo,path,stage1_ns,stage2_ns,stage3_ns,total_ns,success,recovered_planted";

/// Bootstrap resamples used by [`fit_scaling`].
pub const BOOTSTRAP_ROUNDS: usize = 1000;

/// Solver choice plus its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub algo: Algo,
    pub epsilon: f64,
    pub t_cap: usize,
    pub exec: Exec,
    pub limits: SearchLimits,
}

impl SolverParams {
    pub fn new(algo: Algo) -> Self {
        let reg = RegBipConfig::default();
        SolverParams { algo, epsilon: reg.epsilon, t_cap: reg.reg.t_cap, exec: Exec::default(), limits: SearchLimits::default() }
    }

    pub fn reg_config(&self) -> RegBipConfig {
        let mut cfg = RegBipConfig::with_epsilon(self.epsilon);
        cfg.reg.epsilon = self.epsilon;
        cfg.reg.t_cap = self.t_cap;
        cfg.reg.t0 = cfg.reg.t0.min(self.t_cap);
        cfg.reg.exec = self.exec;
        cfg.limits = self.limits;
        cfg
    }
}

pub fn run_solver(h: &Hypergraph, params: &SolverParams) -> Result<SolveReport> {
    let opts = SolveOptions { exec: params.exec, limits: params.limits };
    match params.algo {
        Algo::Elem => solve_elem_with(h, &opts),
        Algo::Reg => solve_reg(h, &params.reg_config()),
        Algo::Fano => solve_fano_with(h, &opts),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub k: usize,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub model: Model,
    pub algo: Algo,
    pub epsilon: f64,
    pub t_cap: usize,
    /// Wall-clock limit for the exhaustive stages of one trial.
    pub time_budget: Option<Duration>,
    /// Trials of one size run concurrently under `Parallel`; each solver
    /// call itself is sequential.
    pub exec: Exec,
}

impl EnsembleConfig {
    pub fn new(k: usize, n_list: Vec<usize>, trials: usize, algo: Algo) -> Self {
        let reg = RegBipConfig::default();
        EnsembleConfig {
            k,
            n_list,
            trials,
            seed: 0,
            model: Model::Planted,
            algo,
            epsilon: reg.epsilon,
            t_cap: reg.reg.t_cap,
            time_budget: None,
            exec: Exec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("n_list must be nonempty and strictly increasing".into()));
        }
        if self.k < 3 {
            return Err(Error::InvalidConfig(format!("benchmarks need k >= 3, got {}", self.k)));
        }
        if self.algo == Algo::Fano && self.k != 3 {
            return Err(Error::WrongUniformity { expected: 3, found: self.k });
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n <= self.k) {
            return Err(Error::TooFewVertices { n, k: self.k });
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub algo: Algo,
    pub path: Path,
    pub stage1_ns: u64,
    pub stage2_ns: u64,
    pub stage3_ns: u64,
    pub total_ns: u64,
    pub success: bool,
    pub recovered_planted: bool,
}

impl BenchRecord {
    /// The record with all timing fields zeroed, for determinism checks.
    pub fn without_timings(&self) -> BenchRecord {
        BenchRecord { stage1_ns: 0, stage2_ns: 0, stage3_ns: 0, total_ns: 0, ..self.clone() }
    }
}

fn run_trial(cfg: &EnsembleConfig, n: usize, trial: usize) -> Result<BenchRecord> {
    let seed = derive_seed(cfg.seed, n, trial);
    let inst = sample_instance(cfg.model, n, cfg.k, seed)?;
    let limits = SearchLimits { deadline: cfg.time_budget.map(|b| Instant::now() + b), ..SearchLimits::default() };
    let params =
        SolverParams { algo: cfg.algo, epsilon: cfg.epsilon, t_cap: cfg.t_cap, exec: Exec::Sequential, limits };
    let start = Instant::now();
    let outcome = run_solver(&inst.hypergraph, &params);
    let wall = elapsed_ns(start);
    let mut record = BenchRecord {
        n,
        k: cfg.k,
        seed,
        algo: cfg.algo,
        path: Path::Error,
        stage1_ns: 0,
        stage2_ns: 0,
        stage3_ns: 0,
        total_ns: wall,
        success: false,
        recovered_planted: false,
    };
    if let Ok(report) = outcome {
        record.path = report.path_taken;
        record.stage1_ns = report.timings.stage1_ns;
        record.stage2_ns = report.timings.stage2_ns;
        record.stage3_ns = report.timings.stage3_ns;
        record.total_ns = report.total_ns;
        match &report.partition {
            Some(p) => {
                record.success = inst.hypergraph.is_bipartition(p);
                record.recovered_planted = p.eq_up_to_swap(&inst.planted);
            }
            // Only the composite answers without a bipartition.
            None => record.success = report.classes.is_some(),
        }
    }
    Ok(record)
}

/// All records in `(n, trial)` order.
pub fn run_bench(cfg: &EnsembleConfig) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    run_bench_with(cfg, |r| {
        out.push(r.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Runs the ensemble, handing records to `sink` in `(n, trial)` order as
/// each size completes.
pub fn run_bench_with<F: FnMut(&BenchRecord) -> Result<()>>(cfg: &EnsembleConfig, mut sink: F) -> Result<()> {
    cfg.validate()?;
    for &n in &cfg.n_list {
        let records = cfg.exec.map_range(cfg.trials, |trial| run_trial(cfg, n, trial));
        for r in records {
            sink(&r?)?;
        }
    }
    Ok(())
}

/// Runs the ensemble and streams CSV (with header) to `out`.
pub fn run_bench_csv<W: Write>(cfg: &EnsembleConfig, out: W) -> Result<Vec<BenchRecord>> {
    let mut writer = csv::Writer::from_writer(out);
    let mut records = Vec::new();
    run_bench_with(cfg, |r| {
        writer.serialize(r).map_err(csv_error)?;
        writer.flush().map_err(|e| Error::Io(e.to_string()))?;
        records.push(r.clone());
        Ok(())
    })?;
    Ok(records)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse { line, message: e.to_string() }
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    if records.is_empty() {
        writer.write_record(CSV_HEADER.split(',')).map_err(csv_error)?;
    }
    for r in records {
        writer.serialize(r).map_err(csv_error)?;
    }
    writer.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Parse { line: 1, message: format!("unexpected header `{}`", header.join(",")) });
    }
    reader.deserialize().map(|r| r.map_err(csv_error)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% percentile bootstrap interval for the slope.
    pub ci_low: f64,
    pub ci_high: f64,
    /// `(n, mean step3i time in ns, trials)`.
    pub points: Vec<(usize, f64, usize)>,
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn log_mean(times: &[u64]) -> f64 {
    let mean = times.iter().map(|&t| t as f64).sum::<f64>() / times.len() as f64;
    mean.max(1.0).ln()
}

/// Least-squares slope of `log(mean step3i time)` against `log n`.
///
/// Needs at least 3 sizes with at least 10 successful step3i records each.
pub fn fit_scaling(records: &[BenchRecord]) -> Result<ScalingFit> {
    let mut by_n: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.path == Path::Step3i && r.success) {
        by_n.entry(r.n).or_default().push(r.total_ns);
    }
    by_n.retain(|_, v| v.len() >= 10);
    if by_n.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need 3 sizes with at least 10 step3i records each, found {}",
            by_n.len()
        )));
    }
    let logs: Vec<(f64, f64)> = by_n.iter().map(|(&n, ts)| ((n as f64).ln(), log_mean(ts))).collect();
    let (slope, intercept) = least_squares(&logs);

    let mut rng = stream_rng(0, SAMPLE_STREAM);
    let mut slopes: Vec<f64> = (0..BOOTSTRAP_ROUNDS)
        .map(|_| {
            let resampled: Vec<(f64, f64)> = by_n
                .iter()
                .map(|(&n, ts)| {
                    let draw: Vec<u64> = (0..ts.len()).map(|_| ts[rng.random_range(0..ts.len())]).collect();
                    ((n as f64).ln(), log_mean(&draw))
                })
                .collect();
            least_squares(&resampled).0
        })
        .collect();
    slopes.sort_by(f64::total_cmp);
    let at = |q: f64| slopes[((q * (slopes.len() - 1) as f64).round()) as usize];
    let points = by_n
        .iter()
        .map(|(&n, ts)| (n, ts.iter().map(|&t| t as f64).sum::<f64>() / ts.len() as f64, ts.len()))
        .collect();
    Ok(ScalingFit { slope, intercept, ci_low: at(0.025), ci_high: at(0.975), points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(n: usize, t: u64, trials: usize) -> Vec<BenchRecord> {
        (0..trials)
            .map(|i| BenchRecord {
                n,
                k: 3,
                seed: i as u64,
                algo: Algo::Elem,
                path: Path::Step3i,
                stage1_ns: t,
                stage2_ns: 0,
                stage3_ns: 0,
                total_ns: t,
                success: true,
                recovered_planted: true,
            })
            .collect()
    }

    #[test]
    fn record_count_and_determinism() {
        let mut cfg = EnsembleConfig::new(3, vec![40, 60], 2, Algo::Elem);
        cfg.seed = 5;
        let a = run_bench(&cfg).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a.iter().map(|r| r.n).collect::<Vec<_>>(), vec![40, 40, 60, 60]);
        cfg.exec = Exec::Sequential;
        let b = run_bench(&cfg).unwrap();
        let strip = |rs: &[BenchRecord]| rs.iter().map(BenchRecord::without_timings).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn csv_round_trip() {
        let records = synthetic(40, 123_456, 3);
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert!(text.contains("40,3,0,elem,step3i,123456,0,0,123456,true,true"));
        assert_eq!(parse_csv(buf.as_slice()).unwrap(), records);
        assert!(parse_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn fits() {
        let cubic: Vec<BenchRecord> = [40, 60, 80].iter().flat_map(|&n| synthetic(n, 7 * (n as u64).pow(3), 10)).collect();
        let fit = fit_scaling(&cubic).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-6, "{}", fit.slope);
        assert!((fit.ci_low - 3.0).abs() < 1e-6 && (fit.ci_high - 3.0).abs() < 1e-6);
        let flat: Vec<BenchRecord> = [40, 60, 80].iter().flat_map(|&n| synthetic(n, 5000, 10)).collect();
        assert!(fit_scaling(&flat).unwrap().slope.abs() < 1e-9);
        let short: Vec<BenchRecord> = [40, 60, 80].iter().flat_map(|&n| synthetic(n, 5000, 9)).collect();
        assert!(matches!(fit_scaling(&short), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn config_validation() {
        assert!(EnsembleConfig::new(3, vec![60, 40], 2, Algo::Elem).validate().is_err());
        assert!(EnsembleConfig::new(3, vec![40], 0, Algo::Elem).validate().is_err());
        assert!(EnsembleConfig::new(4, vec![40], 1, Algo::Fano).validate().is_err());
    }
}
