use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use synclouvain::louvain::Hierarchy;
use synclouvain::perf::Detector;
use synclouvain::{run, Graph, Partition, Result, RunConfig};
use synclouvain_cli::{execute, Cli, THREADS_ENV};

const TRIANGLES: &str = "# two directed 3-cycles\n0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n";

fn synclouvain(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synclouvain"))
        .args(args)
        .current_dir(dir)
        .env_remove(THREADS_ENV)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn detect_two_triangles() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), TRIANGLES).unwrap();
    let o = synclouvain(&["detect", "g.txt", "--out-dir", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let flat = fs::read_to_string(dir.path().join("out/flat.txt")).unwrap();
    assert_eq!(flat, "0 0\n1 0\n2 0\n3 1\n4 1\n5 1\n");
    assert!(dir.path().join("out/level_0.txt").exists());
    assert!(dir.path().join("out/level_1.txt").exists());
    let summary = String::from_utf8(o.stdout).unwrap();
    assert!(
        summary.contains("modularity=0.500000000000 levels=2 communities=2"),
        "{summary}"
    );
}

#[test]
fn detect_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let gen = synclouvain(
        &[
            "generate", "--N", "500", "--k", "20", "--kmax", "40", "--cmin", "40",
        ],
        dir.path(),
    );
    assert!(gen.status.success(), "{}", stderr(&gen));
    for out in ["a", "b"] {
        let o = synclouvain(
            &[
                "detect",
                "bench.edges",
                "--threads",
                "4",
                "--seed",
                "7",
                "--out-dir",
                out,
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let names: Vec<_> = fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert!(names.len() >= 2);
    for name in names {
        assert_eq!(
            fs::read(dir.path().join("a").join(&name)).unwrap(),
            fs::read(dir.path().join("b").join(&name)).unwrap()
        );
    }
}

#[test]
fn missing_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = synclouvain(&["detect", "nope.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.txt"), "{}", stderr(&o));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.txt"), "0 1\n0 1 -3\n").unwrap();
    let o = synclouvain(&["detect", "bad.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.txt") && err.contains("line 2"), "{err}");
}

#[test]
fn empty_graph_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.txt"), "# nothing\n").unwrap();
    let o = synclouvain(&["detect", "empty.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generate_writes_header_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--N", "1000", "--k", "50", "--kmax", "100", "--mut", "0.2", "--muw", "0.1", "--seed", "1",
    ];
    let mut first = vec!["generate", "-o", "a.edges", "--truth", "a.truth"];
    first.extend(args);
    let mut second = vec!["generate", "-o", "b.edges", "--truth", "b.truth"];
    second.extend(args);
    assert!(synclouvain(&first, dir.path()).status.success());
    assert!(synclouvain(&second, dir.path()).status.success());
    let a = fs::read(dir.path().join("a.edges")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.edges")).unwrap());
    assert_eq!(
        fs::read(dir.path().join("a.truth")).unwrap(),
        fs::read(dir.path().join("b.truth")).unwrap()
    );
    let text = String::from_utf8(a).unwrap();
    for key in [
        "# N=1000",
        "# k=50",
        "# kmax=100",
        "# mu_t=0.20000000000000001",
        "# mu_w=0.10000000000000001",
        "# seed=1",
    ] {
        assert!(text.contains(key), "missing {key}");
    }
}

#[test]
fn generate_rejects_weight_mixing_above_topology_mixing() {
    let dir = tempfile::tempdir().unwrap();
    let o = synclouvain(&["generate", "--mut", "0.1", "--muw", "0.4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mu_t"), "{}", stderr(&o));
    assert!(!dir.path().join("bench.edges").exists());
}

#[test]
fn bench_writes_one_row_per_run_with_overlay() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), TRIANGLES).unwrap();
    let o = synclouvain(
        &[
            "bench",
            "--input",
            "g.txt",
            "--threads",
            "1,2,4",
            "--repeats",
            "2",
            "--amdahl-p",
            "0.95",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("bench_out/runs.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "threads,repeat,wall_seconds,score,levels,seed,p");
    assert_eq!(lines.len(), 7);
    let plot = fs::read_to_string(dir.path().join("bench_out/speedup.tsv")).unwrap();
    let rows: Vec<_> = plot.lines().collect();
    assert_eq!(rows[0], "threads\tempirical\tamdahl");
    assert!(rows[1].starts_with("1\t1.000000\t1.000000"));
    assert!(rows[3].ends_with("\t3.478261"));
    assert!(dir.path().join("bench_out/phases.csv").exists());
    assert!(dir.path().join("bench_out/summary.csv").exists());
}

#[test]
fn bench_requires_single_thread_baseline() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), TRIANGLES).unwrap();
    let o = synclouvain(
        &["bench", "--input", "g.txt", "--threads", "2,4"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn threads_env_applies_only_without_flag() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), TRIANGLES).unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["detect", "g.txt"];
        args.extend(extra);
        let o = Command::new(env!("CARGO_BIN_EXE_synclouvain"))
            .args(&args)
            .current_dir(dir.path())
            .env(THREADS_ENV, "3")
            .output()
            .unwrap();
        String::from_utf8(o.stdout).unwrap()
    };
    assert!(run(&[]).contains("threads=3"));
    assert!(run(&["--threads", "2"]).contains("threads=2"));
    let o = synclouvain(&["detect", "g.txt"], dir.path());
    assert!(String::from_utf8(o.stdout).unwrap().contains("threads=1"));
}

#[test]
fn amdahl_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = synclouvain(
        &["amdahl", "--amdahl-p", "0.95", "--threads", "1,12"],
        dir.path(),
    );
    assert!(o.status.success());
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "threads\tamdahl\n1\t1.000000\n12\t7.741935\n"
    );
}

/// Returns a different partition whenever more than one thread is used.
struct Breaking;

impl Detector for Breaking {
    fn detect(&self, graph: &Graph, config: &RunConfig) -> Result<Hierarchy> {
        let mut h = run(
            graph,
            &RunConfig {
                threads: 1,
                ..config.clone()
            },
        )?;
        if config.threads > 1 {
            h.flat = Partition::identity(graph.node_count());
        }
        Ok(h)
    }
}

#[test]
fn determinism_breach_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.txt");
    fs::write(&input, TRIANGLES).unwrap();
    let out_dir = dir.path().join("out");
    let cli = Cli::parse_from([
        "synclouvain",
        "bench",
        "--input",
        input.to_str().unwrap(),
        "--threads",
        "1,2",
        "--repeats",
        "1",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let err = execute(&cli, &Breaking, &mut Vec::new()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(!out_dir.join("runs.csv").exists());
}
