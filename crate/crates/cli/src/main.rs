use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use vsb_core::chainexp::{chain_accuracy_study, write_chain_rows, ChainRule, ChainStudy, Regime};
use vsb_core::contlearn::{landscape_study, LandscapeStudyRow};
use vsb_core::exec::with_thread_cap;
use vsb_core::graphs::edgelist::{format_edge_list, read_edge_list, write_edge_list};
use vsb_core::graphs::{sample_dag, GraphModel, GraphSpec, DEFAULT_MEC_CAP};
use vsb_core::harness::{
    load_dataset_csv, realdata_study, run_benchmark_with, varsortability_summary, write_benchmark_outputs,
    write_records_csv, write_records_json, ExperimentConfig, LearnerKind, LearnerSpec,
};
use vsb_core::metrics::evaluate;
use vsb_core::scm::{sample_linear_scm, NoiseKind, NoiseLaw, SigmaLaw, WeightLaw};
use vsb_core::varsort::{population_varsortability, varsortability, VarsortReport};
use vsb_core::{Execution, LinearScm, Result};

#[derive(Parser)]
#[command(name = "vsb", version, about = "Varsortability benchmarks for linear causal structure learning")]
struct Cli {
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and linear SCM and simulate data.
    Simulate(SimulateArgs),
    /// Varsortability of data (or of an SCM's population variances) against a graph.
    Varsort(VarsortArgs),
    /// Fit one learner to a CSV dataset.
    Learn(LearnArgs),
    /// Compare an estimated edge list with the ground truth.
    Evaluate(EvaluateArgs),
    /// Run a benchmark configuration.
    Bench(BenchArgs),
    /// Chain orientation accuracies.
    Chain(ChainArgs),
    /// Score landscape over all 3-node DAGs.
    Landscape(LandscapeArgs),
    /// Bootstrap study on observational data with a known graph.
    Realdata(RealdataArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Er,
    Sf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Noise {
    Gaussian,
    Exponential,
    Gumbel,
}

impl From<Noise> for NoiseKind {
    fn from(n: Noise) -> Self {
        match n {
            Noise::Gaussian => NoiseKind::Gaussian,
            Noise::Exponential => NoiseKind::Exponential,
            Noise::Gumbel => NoiseKind::Gumbel,
        }
    }
}

#[derive(Args)]
struct WeightArgs {
    /// Lower end of the weight magnitude range.
    #[arg(long, default_value_t = 0.5)]
    weight_lo: f64,
    #[arg(long, default_value_t = 2.0)]
    weight_hi: f64,
}

impl WeightArgs {
    fn law(&self) -> WeightLaw {
        WeightLaw::symmetric(self.weight_lo, self.weight_hi)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Model::Er)]
    model: Model,
    #[arg(long, default_value_t = 10)]
    d: usize,
    /// Expected degree parameter (ER-k, SF-k).
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Noise::Gaussian)]
    noise: Noise,
    /// Fixed noise scale for every node; scales are drawn from Unif(0.5, 2) when absent.
    #[arg(long)]
    sigma: Option<f64>,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for data.csv, truth.txt and scm.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VarsortArgs {
    /// Ground-truth edge list.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// CSV dataset; empirical variances are used.
    #[arg(long)]
    data: Option<PathBuf>,
    /// SCM JSON as written by `simulate`; population variances are used.
    #[arg(long, conflicts_with_all = ["data", "truth"])]
    scm: Option<PathBuf>,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long)]
    data: PathBuf,
    /// One of sortnregress, randomregress, varsort-full, mse-gds, notears, golem-ev, golem-nv.
    #[arg(long)]
    learner: String,
    /// JSON optimizer settings for continuous learners.
    #[arg(long)]
    settings: Option<PathBuf>,
    /// Edge threshold for continuous learners; defaults to the settings value.
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    standardize: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the estimated edge list here.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Write raw weights and support as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the optimizer trace as CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    estimate: PathBuf,
    /// Also report CPDAG SHD and MEC SID bounds.
    #[arg(long)]
    mec: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[command(flatten)]
    weights: WeightArgs,
    /// Regimes to run; all three when absent.
    #[arg(long, value_enum)]
    regime: Vec<RegimeArg>,
    /// Rules to run; both when absent.
    #[arg(long, value_enum)]
    rule: Vec<RuleArg>,
    #[arg(long, default_value_t = 100_000)]
    reps: usize,
    /// Simulate this many rows per instance instead of using population covariances.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = Noise::Gaussian)]
    noise: Noise,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Raw,
    Standardized,
    Harmonized,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Coefficients,
    Variance,
}

#[derive(Args)]
struct LandscapeArgs {
    #[arg(long, default_value_t = 0.1)]
    lambda1: f64,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Full 2 x 25 x 25 table as CSV; only the summary is printed when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RealdataArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Experiment configuration for learners, thresholds and bootstrap count.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let threads = std::env::var("VSB_THREADS").ok().and_then(|v| v.parse().ok());
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match with_thread_cap(threads, || run(cli.command, exec)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(vsb_core::Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command, exec: Execution) -> Result<()> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Varsort(a) => varsort(a),
        Command::Learn(a) => learn(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Bench(a) => bench(a, exec),
        Command::Chain(a) => chain(a, exec),
        Command::Landscape(a) => landscape(a),
        Command::Realdata(a) => realdata(a),
    }
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let model = match a.model {
        Model::Er => GraphModel::Er,
        Model::Sf => GraphModel::Sf,
    };
    let spec = GraphSpec { model, d: a.d, k: a.k };
    let sigma = a.sigma.map_or(SigmaLaw::default(), |value| SigmaLaw::Fixed { value });
    let g = sample_dag(&spec, a.seed)?.dag;
    let scm = sample_linear_scm(&g, &a.weights.law(), &NoiseLaw::new(a.noise.into(), sigma), a.seed)?;
    let data = scm.simulate(a.n, a.seed)?;
    std::fs::create_dir_all(&a.out)?;
    data.save_csv(a.out.join("data.csv"))?;
    write_edge_list(a.out.join("truth.txt"), &g)?;
    std::fs::write(a.out.join("scm.json"), serde_json::to_vec_pretty(&scm.export())?)?;
    let v = varsortability(&g, &data.variances()).ok().map(|r| r.v);
    print_json(&json!({ "graph": spec.label(), "d": a.d, "edges": g.n_edges(), "n": a.n, "varsortability": v }))
}

fn report_json(r: &VarsortReport) -> serde_json::Value {
    json!({
        "varsortability": r.v,
        "source": format!("{:?}", r.variance_source).to_lowercase(),
        "per_path_length": r.per_path_length.iter().enumerate()
            .map(|(l, (v, pairs))| json!({ "length": l + 1, "v": v, "pairs": pairs }))
            .collect::<Vec<_>>(),
    })
}

fn varsort(a: VarsortArgs) -> Result<()> {
    let report = match (a.scm, a.data, a.truth) {
        (Some(path), _, _) => {
            let export = serde_json::from_slice(&std::fs::read(path)?)?;
            population_varsortability(&LinearScm::from_export(&export)?)?
        }
        (None, Some(data), Some(truth)) => {
            let data = load_dataset_csv(data)?;
            let g = read_edge_list(truth, Some(data.d()))?;
            varsortability(&g, &data.variances())?
        }
        _ => return Err(vsb_core::Error::Config("pass --scm, or both --data and --truth".into())),
    };
    print_json(&report_json(&report))
}

fn learn(a: LearnArgs) -> Result<()> {
    let mut data = load_dataset_csv(&a.data)?;
    if a.standardize {
        data = data.standardize()?;
    }
    let mut spec = LearnerSpec::named(&a.learner);
    let kind: LearnerKind = spec.kind()?;
    if let Some(path) = &a.settings {
        spec.settings = Some(kind.settings_from_json(&serde_json::from_slice(&std::fs::read(path)?)?)?);
    }
    spec.validate()?;
    let fit = spec.fit(&data, a.seed)?;
    let omega = a.omega.or(spec.optimizer_settings().map(|s| s.omega)).unwrap_or(0.0);
    let g = fit.graph_at(kind, omega);
    if let Some(path) = &a.edges {
        write_edge_list(path, &g)?;
    }
    if let Some(path) = &a.trace {
        if let Some(t) = &fit.trace {
            t.save_csv(path)?;
        }
    }
    let weights = fit.weights.as_ref().map(|w| {
        let m = w.matrix();
        (0..m.nrows()).map(|r| m.row(r).iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>()
    });
    let summary = json!({
        "learner": kind.name(),
        "d": data.d(),
        "omega": kind.is_continuous().then_some(omega),
        "edges": g.edges(),
        "weights": weights,
        "converged": fit.trace.as_ref().map(|t| t.converged),
    });
    if let Some(path) = &a.out {
        std::fs::write(path, serde_json::to_vec_pretty(&summary)?)?;
    }
    if a.edges.is_none() && a.out.is_none() {
        print!("{}", format_edge_list(&g));
    }
    Ok(())
}

fn evaluate_cmd(a: EvaluateArgs) -> Result<()> {
    let truth = read_edge_list(&a.truth, None)?;
    let est = read_edge_list(&a.estimate, Some(truth.n_nodes()))?;
    let m = evaluate(&truth, &est, a.mec.then_some(DEFAULT_MEC_CAP))?;
    print_json(&serde_json::to_value(&m)?)
}

fn bench(a: BenchArgs, exec: Execution) -> Result<()> {
    let cfg = ExperimentConfig::load(&a.config)?;
    let out = run_benchmark_with(&cfg, exec)?;
    write_benchmark_outputs(&a.out, &cfg, &out)?;
    let errors = out.records.iter().filter(|r| r.error.is_some()).count();
    eprintln!("{} records ({errors} errors) written to {}", out.records.len(), a.out.display());
    Ok(())
}

fn chain(a: ChainArgs, exec: Execution) -> Result<()> {
    let regimes: Vec<Regime> = if a.regime.is_empty() {
        Regime::ALL.to_vec()
    } else {
        a.regime
            .iter()
            .map(|r| match r {
                RegimeArg::Raw => Regime::Raw,
                RegimeArg::Standardized => Regime::Standardized,
                RegimeArg::Harmonized => Regime::Harmonized,
            })
            .collect()
    };
    let rules: Vec<ChainRule> = if a.rule.is_empty() {
        vec![ChainRule::Variance, ChainRule::Coefficients]
    } else {
        a.rule
            .iter()
            .map(|r| match r {
                RuleArg::Coefficients => ChainRule::Coefficients,
                RuleArg::Variance => ChainRule::Variance,
            })
            .collect()
    };
    let mut rows = Vec::new();
    for &rule in &rules {
        for &regime in &regimes {
            let mut study = ChainStudy::population(a.d, a.weights.law(), regime, rule, a.reps);
            study.noise = a.noise.into();
            if let Some(n) = a.n {
                study = study.with_samples(n);
            }
            rows.push(chain_accuracy_study(&study, a.seed, exec)?);
        }
    }
    match &a.out {
        Some(path) => write_chain_rows(&rows, std::fs::File::create(path)?),
        None => write_chain_rows(&rows, std::io::stdout().lock()),
    }
}

fn landscape(a: LandscapeArgs) -> Result<()> {
    let noise = NoiseLaw::new(NoiseKind::Gaussian, SigmaLaw::default());
    let rows = landscape_study(&a.weights.law(), &noise, a.lambda1, a.seed)?;
    if let Some(path) = &a.out {
        write_landscape(path, &rows)?;
    }
    let raw = rows.iter().filter(|r| r.raw_wins()).count();
    let std = rows.iter().filter(|r| r.standardized_wins()).count();
    print_json(&json!({ "lambda1": a.lambda1, "truths": rows.len(), "truth_optimal_raw": raw, "truth_optimal_standardized": std }))
}

fn write_landscape(path: &Path, rows: &[LandscapeStudyRow]) -> Result<()> {
    let edges = |g: &vsb_core::Dag| match g.n_edges() {
        0 => "empty".to_string(),
        _ => g.edges().iter().map(|(a, b)| format!("{a}>{b}")).collect::<Vec<_>>().join(" "),
    };
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "truth,regime,candidate,loss,shd,sid,is_truth,is_argmin")?;
    for row in rows {
        for (regime, recs) in [("raw", &row.raw), ("standardized", &row.standardized)] {
            for r in recs.iter() {
                writeln!(
                    out,
                    "{},{regime},{},{},{},{},{},{}",
                    edges(&row.truth),
                    edges(&r.candidate),
                    r.loss,
                    r.shd,
                    r.sid,
                    r.is_truth,
                    r.is_argmin
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn realdata(a: RealdataArgs) -> Result<()> {
    let cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig { learners: LearnerKind::ALL.iter().map(|k| LearnerSpec::named(k.name())).collect(), ..Default::default() },
    };
    let records = realdata_study(&a.data, &a.truth, &cfg)?;
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir)?;
        write_records_csv(&records, std::fs::File::create(dir.join("records.csv"))?)?;
        write_records_json(&records, std::fs::File::create(dir.join("records.json"))?)?;
    } else {
        write_records_csv(&records, std::io::stdout().lock())?;
    }
    if let Some((m, s)) = varsortability_summary(&records) {
        eprintln!("varsortability over {} bootstrap samples: {m:.3} +/- {s:.3}", cfg.repetitions);
    }
    Ok(())
}
