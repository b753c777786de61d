//! Thread-scaling measurements and Amdahl's law.

use std::io::{BufRead, Write};
use std::time::{Duration, Instant};

use log::warn;

use crate::error::{Error, Result};
use crate::fmt::format_g17;
use crate::graph::Graph;
use crate::louvain::{flat_modularity, run, Hierarchy, PhaseTimes, RunConfig};
use crate::partition::Partition;

/// Predicted speedup on `threads` workers when a fraction
/// `parallel_fraction` of the work parallelizes perfectly.
pub fn amdahl(parallel_fraction: f64, threads: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&parallel_fraction) {
        return Err(Error::config(format!(
            "parallel fraction {parallel_fraction} is outside [0, 1]"
        )));
    }
    if threads == 0 {
        return Err(Error::config("thread count must be at least 1"));
    }
    Ok(1.0 / ((1.0 - parallel_fraction) + parallel_fraction / threads as f64))
}

/// Anything that turns a graph into a hierarchy. The harness only relies on
/// the flat partition and the phase timings.
pub trait Detector {
    fn detect(&self, graph: &Graph, config: &RunConfig) -> Result<Hierarchy>;
}

/// The synchronized Louvain method.
#[derive(Debug, Clone, Copy, Default)]
pub struct SyncLouvain;

impl Detector for SyncLouvain {
    fn detect(&self, graph: &Graph, config: &RunConfig) -> Result<Hierarchy> {
        run(graph, config)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub threads: usize,
    pub repeat: usize,
    pub wall_seconds: f64,
    pub score: f64,
    pub levels: usize,
    pub seed: u64,
    pub p: f64,
}

pub const CSV_HEADER: &str = "threads,repeat,wall_seconds,score,levels,seed,p";

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupPoint {
    pub threads: usize,
    pub mean_seconds: f64,
    pub median_seconds: f64,
    /// Single-thread mean wall time over this point's mean wall time.
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupCurve {
    pub points: Vec<SpeedupPoint>,
}

impl SpeedupCurve {
    /// Aggregates records per thread count, in order of first appearance.
    /// A single-thread record is required as the baseline.
    pub fn from_records(records: &[RunRecord]) -> Result<SpeedupCurve> {
        let mut order: Vec<usize> = Vec::new();
        for r in records {
            if !order.contains(&r.threads) {
                order.push(r.threads);
            }
        }
        let times = |t: usize| -> Vec<f64> {
            records
                .iter()
                .filter(|r| r.threads == t)
                .map(|r| r.wall_seconds)
                .collect()
        };
        if !order.contains(&1) {
            return Err(Error::config("thread list must include 1 for the baseline"));
        }
        let baseline = mean(&times(1));
        let points = order
            .into_iter()
            .map(|t| {
                let ts = times(t);
                let m = mean(&ts);
                SpeedupPoint {
                    threads: t,
                    mean_seconds: m,
                    median_seconds: median(&ts),
                    speedup: baseline / m,
                }
            })
            .collect();
        Ok(SpeedupCurve { points })
    }

    pub fn speedup(&self, threads: usize) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.threads == threads)
            .map(|p| p.speedup)
    }

    /// Points whose empirical speedup exceeds the thread count.
    pub fn superlinear_warnings(&self) -> Vec<String> {
        self.points
            .iter()
            .filter(|p| p.speedup > p.threads as f64)
            .map(|p| {
                format!(
                    "speedup {:.3} on {} threads is superlinear",
                    p.speedup, p.threads
                )
            })
            .collect()
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[derive(Debug, Clone)]
pub struct Measurement {
    pub records: Vec<RunRecord>,
    /// Phase timings, parallel to `records`.
    pub phase_times: Vec<PhaseTimes>,
    pub curve: SpeedupCurve,
    /// The partition every run agreed on.
    pub partition: Partition,
}

/// Runs `detector` `repeats` times per thread count after one untimed
/// warm-up run. Every run must return the warm-up's flat partition; any
/// difference is reported as [`Error::DeterminismBreach`].
pub fn measure(
    detector: &dyn Detector,
    graph: &Graph,
    threads: &[usize],
    repeats: usize,
    config: &RunConfig,
) -> Result<Measurement> {
    if !threads.contains(&1) {
        return Err(Error::config("thread list must include 1 for the baseline"));
    }
    if threads.contains(&0) {
        return Err(Error::config("thread counts must be at least 1"));
    }
    if repeats == 0 {
        return Err(Error::config("repeats must be at least 1"));
    }
    // An untimed single-thread run warms caches and fixes the reference
    // partition; the timed baseline then runs first.
    let warmup = detector.detect(graph, &RunConfig { threads: 1, ..config.clone() })?;
    let reference = warmup.flat;
    let mut schedule = vec![1];
    schedule.extend(threads.iter().copied().filter(|&t| t != 1));

    let mut runs: Vec<(RunRecord, PhaseTimes)> = Vec::new();
    for &t in &schedule {
        let cfg = RunConfig {
            threads: t,
            ..config.clone()
        };
        for repeat in 0..repeats {
            let start = Instant::now();
            let hierarchy = detector.detect(graph, &cfg)?;
            let wall = start.elapsed();
            if hierarchy.flat != reference {
                return Err(Error::DeterminismBreach { threads: t });
            }
            let record = RunRecord {
                threads: t,
                repeat,
                wall_seconds: wall.as_secs_f64(),
                score: flat_modularity(graph, &hierarchy),
                levels: hierarchy.depth(),
                seed: cfg.seed,
                p: cfg.accept_prob,
            };
            runs.push((record, hierarchy.stats.phase_times));
        }
    }
    // Report in the caller's thread order.
    runs.sort_by_key(|(r, _)| (threads.iter().position(|&t| t == r.threads), r.repeat));
    let (records, phase_times): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let curve = SpeedupCurve::from_records(&records)?;
    for w in curve.superlinear_warnings() {
        warn!("{w}");
    }
    Ok(Measurement {
        records,
        phase_times,
        curve,
        partition: reference,
    })
}

pub fn write_csv<W: Write>(records: &[RunRecord], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.threads,
            r.repeat,
            format_g17(r.wall_seconds),
            format_g17(r.score),
            r.levels,
            r.seed,
            format_g17(r.p)
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: BufRead>(reader: R) -> Result<Vec<RunRecord>> {
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != CSV_HEADER {
        return Err(Error::parse(1, format!("expected header `{CSV_HEADER}`")));
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let lineno = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 7 {
            return Err(Error::parse(
                lineno,
                format!("expected 7 fields, found {}", fields.len()),
            ));
        }
        let bad = |name: &str| Error::parse(lineno, format!("bad {name} value"));
        records.push(RunRecord {
            threads: fields[0].parse().map_err(|_| bad("threads"))?,
            repeat: fields[1].parse().map_err(|_| bad("repeat"))?,
            wall_seconds: fields[2].parse().map_err(|_| bad("wall_seconds"))?,
            score: fields[3].parse().map_err(|_| bad("score"))?,
            levels: fields[4].parse().map_err(|_| bad("levels"))?,
            seed: fields[5].parse().map_err(|_| bad("seed"))?,
            p: fields[6].parse().map_err(|_| bad("p"))?,
        });
    }
    Ok(records)
}

/// Tab-separated `threads empirical amdahl` rows for plotting.
pub fn write_plot_data<W: Write>(
    curve: &SpeedupCurve,
    parallel_fraction: f64,
    mut out: W,
) -> Result<()> {
    writeln!(out, "threads\tempirical\tamdahl")?;
    for p in &curve.points {
        let predicted = amdahl(parallel_fraction, p.threads)?;
        writeln!(out, "{}\t{:.6}\t{:.6}", p.threads, p.speedup, predicted)?;
    }
    out.flush()?;
    Ok(())
}

/// Per-run phase breakdown in seconds.
pub fn write_phase_csv<W: Write>(
    records: &[RunRecord],
    times: &[PhaseTimes],
    mut out: W,
) -> Result<()> {
    writeln!(
        out,
        "threads,repeat,assign,components,positive,maximal,aggregate"
    )?;
    let s = |d: Duration| format_g17(d.as_secs_f64());
    for (r, t) in records.iter().zip(times) {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.threads,
            r.repeat,
            s(t.assign),
            s(t.components),
            s(t.positive),
            s(t.maximal),
            s(t.aggregate)
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Mean and median wall time per thread count.
pub fn write_summary<W: Write>(curve: &SpeedupCurve, mut out: W) -> Result<()> {
    writeln!(out, "threads,mean_seconds,median_seconds,speedup")?;
    for p in &curve.points {
        writeln!(
            out,
            "{},{},{},{}",
            p.threads,
            format_g17(p.mean_seconds),
            format_g17(p.median_seconds),
            format_g17(p.speedup)
        )?;
    }
    out.flush()?;
    Ok(())
}
