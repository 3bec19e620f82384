//! `hyperbip`: generate, solve, verify and benchmark bipartite k-graphs.
//!
//! Exit codes: 0 success, 1 validation error (bad input, failed check),
//! 2 not bipartite, 3 a size cap or time budget was exceeded.

use std::fs;
use std::io::{self, Write};
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use hyperbip::bench::{fit_scaling, run_bench_csv, run_solver, EnsembleConfig, SolverParams};
use hyperbip::exhaustive::{smallest_partition, CHROMATIC_CAP};
use hyperbip::io::{parse_khg, parse_part, write_khg, write_part, write_partition_dump};
use hyperbip::models::{sample_near_uniform, sample_planted, sample_partition, Model, PartitionSpec};
use hyperbip::regbip::regularize_link;
use hyperbip::report::{Algo, SolveReport};
use hyperbip::verify::{check_delta_typical, check_sigma_standard};
use hyperbip::{Error, Exec, Hypergraph};

#[derive(Parser, Debug)]
#[command(name = "hyperbip", version, about = "Average-case 2-coloring of bipartite k-uniform hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output file (stdout when omitted).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Emit JSON instead of the text formats.
    #[arg(long, global = true)]
    json: bool,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
}

impl Common {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a planted or near-uniform instance; the planted partition goes to a `.part` sidecar.
    Gen {
        #[arg(short, long)]
        n: usize,
        #[arg(short, long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "planted")]
        model: Model,
        /// Near-uniform only: reject sides outside (1 ± γ)n/2.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Find a bipartition (or, with `fano`, a smallest partition into independent sets).
    Solve {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value = "elem")]
        algo: Algo,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 64)]
        t_cap: usize,
        /// Write the regular partition of the chosen link graph here (`--algo reg`).
        #[arg(long)]
        dump_partition: Option<PathBuf>,
        /// Accepted for symmetry with the other subcommands; solving is deterministic.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Check a partition for σ-standardness or δ-typicality.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, conflicts_with = "delta", required_unless_present = "delta")]
        sigma: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run a seeded ensemble and write one CSV row per trial.
    Bench {
        #[arg(short, long, default_value_t = 3)]
        k: usize,
        /// Comma-separated, strictly increasing sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value = "elem")]
        algo: Algo,
        #[arg(long, default_value = "planted")]
        model: Model,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 64)]
        t_cap: usize,
        /// Per-trial limit for the exhaustive stages, in milliseconds.
        #[arg(long)]
        time_budget_ms: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print a log-log fit of step3i time against n to stderr.
        #[arg(long)]
        fit: bool,
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Smallest partition into independent sets.
    Chromatic {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = CHROMATIC_CAP)]
        r_cap: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
}

fn read_instance(path: &FsPath) -> anyhow::Result<Hypergraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_khg(&text).map_err(|e| anyhow!(e).context(format!("parsing {}", path.display())))
}

fn emit(output: Option<&FsPath>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn one_based(vs: &[usize]) -> String {
    vs.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ")
}

fn classes_text(r: usize, classes: &[Vec<usize>]) -> String {
    let mut out = format!("r: {r}\n");
    for (i, c) in classes.iter().enumerate() {
        out += &format!("class {}: {}\n", i + 1, one_based(c));
    }
    out
}

fn gen(n: usize, k: usize, model: Model, gamma: Option<f64>, seed: u64, common: &Common) -> anyhow::Result<()> {
    let inst = match (model, gamma) {
        (Model::Planted, None) => {
            let p = sample_partition(n, PartitionSpec::ExactBalanced, seed)?;
            sample_planted(n, k, &p, seed)?
        }
        (Model::Planted, Some(_)) => return Err(anyhow!(Error::InvalidConfig("--gamma applies to near-uniform only".into()))),
        (Model::NearUniform, None) => sample_near_uniform(n, k, PartitionSpec::Binomial, seed)?,
        (Model::NearUniform, Some(g)) => sample_near_uniform(n, k, PartitionSpec::GammaEquitable(g), seed)?,
    };
    let part = write_part(&inst.planted);
    if common.json {
        let value = serde_json::json!({
            "n": n,
            "k": k,
            "m": inst.hypergraph.num_edges(),
            "seed": seed,
            "model": model.name(),
            "khg": write_khg(&inst.hypergraph),
            "part": part,
        });
        return emit(common.output.as_deref(), &to_json(&value)?);
    }
    match &common.output {
        Some(path) => {
            emit(Some(path), &write_khg(&inst.hypergraph))?;
            emit(Some(&path.with_extension("part")), &part)
        }
        None => emit(None, &write_khg(&inst.hypergraph)),
    }
}

fn solve(
    input: &FsPath,
    algo: Algo,
    epsilon: f64,
    t_cap: usize,
    dump: Option<&FsPath>,
    common: &Common,
) -> anyhow::Result<()> {
    let h = read_instance(input)?;
    let mut params = SolverParams::new(algo);
    params.epsilon = epsilon;
    params.t_cap = t_cap;
    params.exec = common.exec();
    if let Some(path) = dump {
        if algo != Algo::Reg {
            return Err(anyhow!(Error::InvalidConfig("--dump-partition needs --algo reg".into())));
        }
        let cfg = params.reg_config();
        let j: Vec<usize> = cfg.index_set(h.k()).into_iter().take(h.k().saturating_sub(2)).collect();
        let link = regularize_link(&h, &j, &cfg)?;
        let r = &link.regularization;
        emit(Some(path), &write_partition_dump(&r.partition, &r.cluster, &link.to_original))?;
    }
    let report = run_solver(&h, &params)?;
    emit(common.output.as_deref(), &render_report(&report, common.json)?)
}

fn render_report(report: &SolveReport, json: bool) -> anyhow::Result<String> {
    if json {
        return to_json(report);
    }
    Ok(match (&report.partition, &report.classes) {
        (Some(p), _) => write_part(p),
        (None, Some(classes)) => classes_text(classes.len(), classes),
        (None, None) => String::new(),
    })
}

struct Failed;

#[allow(clippy::too_many_arguments)]
fn verify(
    input: &FsPath,
    partition: &FsPath,
    sigma: Option<f64>,
    delta: Option<f64>,
    samples: usize,
    seed: u64,
    common: &Common,
) -> anyhow::Result<Option<Failed>> {
    let h = read_instance(input)?;
    let text = fs::read_to_string(partition).with_context(|| format!("reading {}", partition.display()))?;
    let p = parse_part(&text, h.n())?;
    let (pass, body) = match (sigma, delta) {
        (Some(s), _) => {
            let report = check_sigma_standard(&h, &p, s, common.exec())?;
            let text = if common.json {
                to_json(&report)?
            } else {
                format!(
                    "sigma {s}: {} ({} of {} pairs outside the band)\n",
                    if report.pass { "pass" } else { "fail" },
                    report.violations.len(),
                    report.pairs_checked
                )
            };
            (report.pass, text)
        }
        (None, Some(d)) => {
            let report = check_delta_typical(&h, &p, d, samples, seed)?;
            let text = if common.json {
                to_json(&report)?
            } else {
                format!(
                    "delta {d}: {} (P {}, Q {}, R {} violations over {} samples)\n",
                    if report.pass { "pass" } else { "fail" },
                    report.p_pass,
                    report.q_pass,
                    report.r_violations.len(),
                    report.r_samples
                )
            };
            (report.pass, text)
        }
        (None, None) => unreachable!("clap requires --sigma or --delta"),
    };
    emit(common.output.as_deref(), &body)?;
    Ok((!pass).then_some(Failed))
}

#[allow(clippy::too_many_arguments)]
fn bench(
    k: usize,
    n_list: Vec<usize>,
    trials: usize,
    algo: Algo,
    model: Model,
    epsilon: f64,
    t_cap: usize,
    time_budget_ms: Option<u64>,
    seed: u64,
    fit: bool,
    common: &Common,
) -> anyhow::Result<()> {
    let mut cfg = EnsembleConfig::new(k, n_list, trials, algo);
    cfg.model = model;
    cfg.epsilon = epsilon;
    cfg.t_cap = t_cap;
    cfg.time_budget = time_budget_ms.map(Duration::from_millis);
    cfg.seed = seed;
    cfg.exec = common.exec();
    let records = match &common.output {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            run_bench_csv(&cfg, io::BufWriter::new(file))?
        }
        None => run_bench_csv(&cfg, io::stdout().lock())?,
    };
    if fit {
        match fit_scaling(&records) {
            Ok(f) if common.json => eprintln!("{}", serde_json::to_string(&f)?),
            Ok(f) => eprintln!("slope {:.3} (95% CI {:.3}..{:.3})", f.slope, f.ci_low, f.ci_high),
            Err(e) => eprintln!("fit: {e}"),
        }
    }
    Ok(())
}

fn chromatic(input: &FsPath, r_cap: usize, common: &Common) -> anyhow::Result<()> {
    let h = read_instance(input)?;
    let c = smallest_partition(&h, r_cap)?;
    let classes = c.classes();
    let body = if common.json {
        let one_based: Vec<Vec<usize>> = classes.iter().map(|c| c.iter().map(|v| v + 1).collect()).collect();
        to_json(&serde_json::json!({ "r": c.r, "classes": one_based, "certified_minimal": c.certified_minimal }))?
    } else {
        classes_text(c.r, &classes)
    };
    emit(common.output.as_deref(), &body)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::NotBipartite) => 2,
        Some(Error::CapExceeded { .. } | Error::BudgetExceeded(_)) => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<Option<Failed>> {
    match cli.command {
        Command::Gen { n, k, model, gamma, seed, common } => gen(n, k, model, gamma, seed, &common)?,
        Command::Solve { input, algo, epsilon, t_cap, dump_partition, seed: _, common } => {
            solve(&input, algo, epsilon, t_cap, dump_partition.as_deref(), &common)?
        }
        Command::Verify { input, partition, sigma, delta, samples, seed, common } => {
            return verify(&input, &partition, sigma, delta, samples, seed, &common);
        }
        Command::Bench { k, n_list, trials, algo, model, epsilon, t_cap, time_budget_ms, seed, fit, input, common } => {
            if input.is_some() {
                return Err(anyhow!(Error::InvalidConfig("bench generates its own instances; --input is not used".into())));
            }
            bench(k, n_list, trials, algo, model, epsilon, t_cap, time_budget_ms, seed, fit, &common)?
        }
        Command::Chromatic { input, r_cap, seed: _, common } => chromatic(&input, r_cap, &common)?,
    }
    Ok(None)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Failed)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
