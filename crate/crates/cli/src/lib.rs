//! Command logic for the `synclouvain` binary.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::warn;
use synclouvain::bench_gen::{generate, BenchSpec};
use synclouvain::graph::read_edge_list;
use synclouvain::louvain::flat_modularity;
use synclouvain::perf::{self, amdahl, measure, Detector};
use synclouvain::{Error, Graph, RunConfig};

/// Read when `--threads` is not given.
pub const THREADS_ENV: &str = "SYNCLOUVAIN_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "synclouvain",
    version,
    about = "Community detection on directed weighted graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect communities in an edge list.
    Detect(DetectArgs),
    /// Generate a planted-partition benchmark graph.
    Generate(GenerateArgs),
    /// Time detection across thread counts.
    Bench(BenchArgs),
    /// Print Amdahl's law predictions.
    Amdahl(AmdahlArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Random seed for correction acceptance.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Probability of considering a maximal-correction candidate.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Edge list: `src dst [weight]` per line.
    pub input: PathBuf,
    /// Directory for `level_<t>.txt` and `flat.txt`.
    #[arg(long, short, default_value = "communities")]
    pub out_dir: PathBuf,
    /// Worker threads [default: $SYNCLOUVAIN_THREADS or 1].
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Number of nodes.
    #[arg(long = "N", default_value_t = 1000)]
    pub nodes: usize,
    /// Target mean out-degree.
    #[arg(long, default_value_t = 50.0)]
    pub k: f64,
    /// Maximum out-degree.
    #[arg(long, default_value_t = 100)]
    pub kmax: usize,
    /// Topology mixing: fraction of edges leaving a community.
    #[arg(long = "mut", default_value_t = 0.2)]
    pub mu_t: f64,
    /// Weight mixing: fraction of strength leaving a community.
    #[arg(long = "muw", default_value_t = 0.1)]
    pub mu_w: f64,
    #[arg(long, default_value_t = 10)]
    pub cmin: usize,
    #[arg(long, default_value_t = 100)]
    pub cmax: usize,
}

impl SpecArgs {
    fn spec(&self, seed: u64) -> BenchSpec {
        BenchSpec {
            nodes: self.nodes,
            mean_degree: self.k,
            max_degree: self.kmax,
            mu_t: self.mu_t,
            mu_w: self.mu_w,
            cmin: self.cmin,
            cmax: self.cmax,
            seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Generator seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Edge list output.
    #[arg(long, short, default_value = "bench.edges")]
    pub output: PathBuf,
    /// Planted partition output.
    #[arg(long, default_value = "bench.truth")]
    pub truth: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Edge list to time; a graph is generated from the spec flags if absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Generator seed when no input is given.
    #[arg(long, default_value_t = 1)]
    pub graph_seed: u64,
    /// Comma-separated thread counts; must include 1
    /// [default: $SYNCLOUVAIN_THREADS or 1,2,4].
    #[arg(long, value_delimiter = ',')]
    pub threads: Option<Vec<usize>>,
    #[arg(long, default_value_t = 2)]
    pub repeats: usize,
    #[command(flatten)]
    pub run: RunArgs,
    /// Parallel fraction for the Amdahl overlay.
    #[arg(long, default_value_t = 0.95)]
    pub amdahl_p: f64,
    /// Directory for runs.csv, phases.csv, summary.csv and speedup.tsv.
    #[arg(long, short, default_value = "bench_out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct AmdahlArgs {
    /// Parallel fraction.
    #[arg(long = "amdahl-p", default_value_t = 0.95)]
    pub p: f64,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,12")]
    pub threads: Vec<usize>,
}

#[derive(Debug)]
pub struct CliError {
    pub error: Error,
    /// File the error refers to, when the error itself does not say.
    pub path: Option<PathBuf>,
}

impl CliError {
    /// 3 for a determinism breach, 2 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self.error {
            Error::DeterminismBreach { .. } => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.path {
            Some(path) => write!(f, "{}: {}", path.display(), self.error),
            None => self.error.fmt(f),
        }
    }
}

impl From<Error> for CliError {
    fn from(error: Error) -> Self {
        CliError { error, path: None }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

/// Runs one command with the given detector, writing the summary to `out`.
pub fn execute(cli: &Cli, detector: &dyn Detector, out: &mut dyn Write) -> CliResult {
    match &cli.command {
        Command::Detect(args) => detect(args, detector, out),
        Command::Generate(args) => generate_cmd(args, out),
        Command::Bench(args) => bench(args, detector, out),
        Command::Amdahl(args) => amdahl_cmd(args, out),
    }
}

fn env_threads() -> CliResult<Option<Vec<usize>>> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    value
        .split(',')
        .map(|t| {
            t.trim().parse().map_err(|_| {
                CliError::from(Error::InvalidConfig(format!(
                    "{THREADS_ENV}={value} is not a thread list"
                )))
            })
        })
        .collect::<CliResult<Vec<usize>>>()
        .map(Some)
}

fn run_config(threads: usize, run: &RunArgs) -> CliResult<RunConfig> {
    let config = RunConfig {
        threads,
        seed: run.seed,
        accept_prob: run.p,
        ..RunConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn load_graph(path: &Path) -> CliResult<Graph> {
    let file = File::open(path).map_err(|e| Error::from(e).with_path(path))?;
    read_edge_list(BufReader::new(file)).map_err(|e| match e {
        Error::Io(_) => e.with_path(path).into(),
        other => CliError {
            error: other,
            path: Some(path.to_path_buf()),
        },
    })
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::from(e).with_path(dir))?;
    }
    let file = File::create(path).map_err(|e| Error::from(e).with_path(path))?;
    Ok(BufWriter::new(file))
}

fn detect(args: &DetectArgs, detector: &dyn Detector, out: &mut dyn Write) -> CliResult {
    let threads = match args.threads {
        Some(t) => t,
        None => match env_threads()? {
            Some(list) if list.len() == 1 => list[0],
            Some(_) => {
                return Err(Error::InvalidConfig(format!(
                    "{THREADS_ENV} must be a single number for detect"
                ))
                .into())
            }
            None => 1,
        },
    };
    let config = run_config(threads, &args.run)?;
    let graph = load_graph(&args.input)?;
    let start = Instant::now();
    let hierarchy = detector.detect(&graph, &config)?;
    let wall = start.elapsed();
    hierarchy.write_to_dir(&args.out_dir)?;
    writeln!(
        out,
        "modularity={:.12} levels={} communities={} nodes={} edges={} threads={} wall_seconds={:.6}",
        flat_modularity(&graph, &hierarchy),
        hierarchy.depth(),
        hierarchy.flat.count(),
        graph.node_count(),
        graph.edge_count(),
        threads,
        wall.as_secs_f64()
    )?;
    Ok(())
}

fn checked_spec(spec: &SpecArgs, seed: u64) -> CliResult<BenchSpec> {
    let spec = spec.spec(seed);
    for w in spec.validate()? {
        warn!("{w}");
    }
    Ok(spec)
}

fn generate_cmd(args: &GenerateArgs, out: &mut dyn Write) -> CliResult {
    let spec = checked_spec(&args.spec, args.seed)?;
    let planted = generate(&spec)?;
    let mut edges = create(&args.output)?;
    let mut truth = create(&args.truth)?;
    planted
        .write(&spec, &mut edges, &mut truth)
        .map_err(|e| e.with_path(&args.output))?;
    writeln!(
        out,
        "nodes={} edges={} communities={} graph={} truth={}",
        planted.graph.node_count(),
        planted.graph.edge_count(),
        planted.truth.count(),
        args.output.display(),
        args.truth.display()
    )?;
    Ok(())
}

fn bench(args: &BenchArgs, detector: &dyn Detector, out: &mut dyn Write) -> CliResult {
    let threads = match &args.threads {
        Some(list) => list.clone(),
        None => env_threads()?.unwrap_or_else(|| vec![1, 2, 4]),
    };
    let config = run_config(1, &args.run)?;
    amdahl(args.amdahl_p, 1)?;
    let graph = match &args.input {
        Some(path) => load_graph(path)?,
        None => generate(&checked_spec(&args.spec, args.graph_seed)?)?.graph,
    };
    let m = measure(detector, &graph, &threads, args.repeats, &config)?;
    let dir = &args.out_dir;
    let with = |e: Error, name: &str| CliError::from(e.with_path(dir.join(name)));
    perf::write_csv(&m.records, create(&dir.join("runs.csv"))?).map_err(|e| with(e, "runs.csv"))?;
    perf::write_phase_csv(&m.records, &m.phase_times, create(&dir.join("phases.csv"))?)
        .map_err(|e| with(e, "phases.csv"))?;
    perf::write_summary(&m.curve, create(&dir.join("summary.csv"))?)
        .map_err(|e| with(e, "summary.csv"))?;
    perf::write_plot_data(&m.curve, args.amdahl_p, create(&dir.join("speedup.tsv"))?)
        .map_err(|e| with(e, "speedup.tsv"))?;
    for p in &m.curve.points {
        writeln!(
            out,
            "threads={} mean_seconds={:.6} median_seconds={:.6} speedup={:.3} amdahl={:.3}",
            p.threads,
            p.mean_seconds,
            p.median_seconds,
            p.speedup,
            amdahl(args.amdahl_p, p.threads)?
        )?;
    }
    Ok(())
}

fn amdahl_cmd(args: &AmdahlArgs, out: &mut dyn Write) -> CliResult {
    writeln!(out, "threads\tamdahl")?;
    for &t in &args.threads {
        writeln!(out, "{t}\t{:.6}", amdahl(args.p, t)?)?;
    }
    Ok(())
}
