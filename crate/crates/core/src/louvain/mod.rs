//! Synchronized Louvain method.
//!
//! Each level builds an assignment forest from best neighbours, splits
//! communities holding nodes with negative local gain, then alternates
//! maximal and positive corrections until no tail move gains. The
//! communities are then collapsed into super nodes and the next level
//! starts on the aggregated graph. The run stops once a level leaves every
//! super node on its own.
//!
//! Work inside a phase is a read-only parallel map followed by a serial
//! commit in ascending id order, and random draws are keyed by
//! `(seed, level, sweep, node)`. The result is therefore identical for
//! every thread count.

mod forest;
mod maximal;
mod positive;
pub mod rng;

use std::fs;
use std::io::BufWriter;
use std::path::Path;
use std::time::{Duration, Instant};

use log::warn;

pub use forest::{extract_components, find_assignment, AssignmentForest, Children};
pub use maximal::{best_targets, maximal_correction, SweepOutcome};
pub use positive::{positive_correction, DEFAULT_SCC_CUT_CAP};

use crate::error::{Error, Result};
use crate::graph::{Graph, Strengths};
use crate::partition::Partition;
use crate::quality::{modularity, CommunityAggregates};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub threads: usize,
    pub seed: u64,
    /// Probability of considering a maximal-correction candidate in a sweep.
    pub accept_prob: f64,
    /// Maximal sweeps allowed per level.
    pub max_sweeps: usize,
    /// Aggregation levels allowed before giving up.
    pub max_levels: usize,
    /// Cycles longer than this skip the exhaustive two-cut search.
    pub scc_cut_cap: usize,
    /// Re-derive labels and aggregates after every phase and panic on drift.
    pub verify: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            threads: 1,
            seed: 0,
            accept_prob: 0.5,
            max_sweeps: 100,
            max_levels: 64,
            scc_cut_cap: DEFAULT_SCC_CUT_CAP,
            verify: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::config("threads must be at least 1"));
        }
        if !(self.accept_prob > 0.0 && self.accept_prob <= 1.0) {
            return Err(Error::config(format!(
                "acceptance probability {} is outside (0, 1]",
                self.accept_prob
            )));
        }
        if self.max_sweeps == 0 || self.max_levels == 0 {
            return Err(Error::config("sweep and level caps must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Assign,
    Positive,
    Maximal,
}

/// Progress notifications, delivered on the controlling thread.
pub enum Event<'a> {
    /// A phase finished; `forest` is its canonical output.
    PhaseDone {
        level: usize,
        phase: Phase,
        graph: &'a Graph,
        forest: &'a AssignmentForest,
    },
    /// One correction was committed. `labels` is the level's labeling right
    /// after the commit (not necessarily dense).
    Accepted {
        level: usize,
        phase: Phase,
        gain: f64,
        graph: &'a Graph,
        labels: &'a [u32],
    },
    /// A level converged with `partition` over `graph`.
    LevelDone {
        level: usize,
        graph: &'a Graph,
        partition: &'a Partition,
    },
}

pub trait Observer: Send {
    fn on_event(&mut self, event: &Event<'_>);
}

pub struct NoopObserver;

impl Observer for NoopObserver {
    fn on_event(&mut self, _: &Event<'_>) {}
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhaseTimes {
    pub assign: Duration,
    pub components: Duration,
    pub positive: Duration,
    pub maximal: Duration,
    pub aggregate: Duration,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub phase_times: PhaseTimes,
    pub sweeps_per_level: Vec<usize>,
    pub positive_splits: usize,
    pub maximal_moves: usize,
    pub warnings: Vec<String>,
}

impl RunStats {
    pub(crate) fn warn(&mut self, message: String) {
        warn!("{message}");
        self.warnings.push(message);
    }
}

/// Result of a run: one partition per level and their composition.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    /// `levels[t]` labels the nodes of the level-`t` graph.
    pub levels: Vec<Partition>,
    /// Final community of every input node.
    pub flat: Partition,
    pub stats: RunStats,
}

impl Hierarchy {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Composes the levels from scratch.
    pub fn compose_levels(&self) -> Result<Partition> {
        let mut flat = Partition::identity(self.flat.len());
        for level in &self.levels {
            flat = flat.compose(level)?;
        }
        Ok(flat)
    }

    /// Writes `level_<t>.txt` for every level and `flat.txt` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::from(e).with_path(dir))?;
        for (t, level) in self.levels.iter().enumerate() {
            write_partition(level, &dir.join(format!("level_{t}.txt")))?;
        }
        write_partition(&self.flat, &dir.join("flat.txt"))
    }
}

fn write_partition(p: &Partition, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::from(e).with_path(path))?;
    p.write(BufWriter::new(file)).map_err(|e| e.with_path(path))
}

/// Detects communities with the configured number of threads.
pub fn run(graph: &Graph, config: &RunConfig) -> Result<Hierarchy> {
    run_observed(graph, config, &mut NoopObserver)
}

pub fn run_observed(
    graph: &Graph,
    config: &RunConfig,
    observer: &mut dyn Observer,
) -> Result<Hierarchy> {
    config.validate()?;
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::config(format!("cannot start {} threads: {e}", config.threads)))?;
    pool.install(|| run_levels(graph, config, observer))
}

fn run_levels(graph: &Graph, config: &RunConfig, observer: &mut dyn Observer) -> Result<Hierarchy> {
    let mut stats = RunStats::default();
    let mut levels = Vec::new();
    let mut flat = Partition::identity(graph.node_count());
    let mut aggregated: Option<Graph> = None;

    for level in 0..config.max_levels {
        let g = aggregated.as_ref().unwrap_or(graph);
        let strengths = Strengths::new(g);
        let partition = run_level(g, &strengths, config, level, observer, &mut stats);
        observer.on_event(&Event::LevelDone {
            level,
            graph: g,
            partition: &partition,
        });
        flat = flat.compose(&partition)?;
        let done = partition.is_identity();
        if !done {
            let t = Instant::now();
            let next = g.aggregate(&partition)?;
            stats.phase_times.aggregate += t.elapsed();
            aggregated = Some(next);
        }
        levels.push(partition);
        if done {
            return Ok(Hierarchy {
                levels,
                flat,
                stats,
            });
        }
    }
    stats.warn(format!(
        "stopped after {} levels without reaching a fixed point",
        config.max_levels
    ));
    Ok(Hierarchy {
        levels,
        flat,
        stats,
    })
}

fn run_level(
    g: &Graph,
    strengths: &Strengths,
    config: &RunConfig,
    level: usize,
    observer: &mut dyn Observer,
    stats: &mut RunStats,
) -> Partition {
    let t = Instant::now();
    let assign = forest::best_neighbors(g, strengths);
    stats.phase_times.assign += t.elapsed();
    let t = Instant::now();
    let mut forest = AssignmentForest::from_valid(assign);
    stats.phase_times.components += t.elapsed();
    observer.on_event(&Event::PhaseDone {
        level,
        phase: Phase::Assign,
        graph: g,
        forest: &forest,
    });

    forest = positive_step(g, strengths, forest, config, level, observer, stats);

    let mut sweep = 0;
    loop {
        if sweep == config.max_sweeps {
            stats.warn(format!(
                "level {level}: sweep cap of {} reached before convergence",
                config.max_sweeps
            ));
            break;
        }
        let t = Instant::now();
        let (next, outcome) =
            maximal::maximal_sweep(g, strengths, forest, config, level, sweep, observer, stats);
        stats.phase_times.maximal += t.elapsed();
        forest = next;
        sweep += 1;
        observer.on_event(&Event::PhaseDone {
            level,
            phase: Phase::Maximal,
            graph: g,
            forest: &forest,
        });
        forest = positive_step(g, strengths, forest, config, level, observer, stats);
        if outcome.accepted == 0 {
            let t = Instant::now();
            let pending = outcome.deferred + outcome.invalidated > 0
                && maximal::has_improving_move(g, strengths, &forest);
            stats.phase_times.maximal += t.elapsed();
            if !pending {
                break;
            }
        }
    }
    stats.sweeps_per_level.push(sweep);
    forest.partition().clone()
}

fn positive_step(
    g: &Graph,
    strengths: &Strengths,
    forest: AssignmentForest,
    config: &RunConfig,
    level: usize,
    observer: &mut dyn Observer,
    stats: &mut RunStats,
) -> AssignmentForest {
    let t = Instant::now();
    let forest = positive::positive_pass(
        g,
        strengths,
        forest,
        config.scc_cut_cap,
        level,
        config.verify,
        observer,
        stats,
    );
    stats.phase_times.positive += t.elapsed();
    observer.on_event(&Event::PhaseDone {
        level,
        phase: Phase::Positive,
        graph: g,
        forest: &forest,
    });
    forest
}

/// Checks incrementally maintained labels and aggregates against the
/// forest they should describe.
pub(crate) fn verify_state(
    strengths: &Strengths,
    forest: &AssignmentForest,
    live_labels: &[u32],
    live_aggs: &CommunityAggregates,
) {
    let live = Partition::from_labels(live_labels.to_vec());
    assert_eq!(
        &live,
        forest.partition(),
        "incremental labels disagree with the assignment forest"
    );
    let fresh = CommunityAggregates::new(strengths, live_labels, live_aggs.len());
    assert!(
        fresh.approx_eq(live_aggs, 1e-9),
        "incremental community aggregates drifted"
    );
}

/// Modularity of the flat partition on the input graph.
pub fn flat_modularity(graph: &Graph, hierarchy: &Hierarchy) -> f64 {
    modularity(graph, &Strengths::new(graph), hierarchy.flat.labels())
}
