//! Drives the compiled binary end to end: generate, solve, verify, bench,
//! and the error exits.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> PathBuf {
    let mut p = PathBuf::from(env!("CARGO_BIN_EXE_apnp"));
    assert!(p.is_file(), "missing binary at {}", p.display());
    p = p.canonicalize().unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn apnp")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn gen_output_is_deterministic_and_parses() {
    let a = stdout_of(&run(&["gen", "--n", "8", "--m", "14", "--directed", "--seed", "42"]));
    let b = stdout_of(&run(&["gen", "--n", "8", "--m", "14", "--directed", "--seed", "42"]));
    assert_eq!(a, b);
    let c = stdout_of(&run(&["gen", "--n", "8", "--m", "14", "--directed", "--seed", "43"]));
    assert_ne!(a, c);

    let header = a.lines().next().unwrap();
    assert_eq!(header, "8 14 directed");
    assert_eq!(a.lines().count(), 15);
}

#[test]
fn solve_agrees_across_algorithms_and_writes_stats() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let stats = dir.path().join("stats.txt");

    let out = run(&[
        "gen", "--n", "9", "--m", "30", "--directed", "--seed", "7", "--output",
        graph.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let fast = stdout_of(&run(&[
        "solve", "--input", graph.to_str().unwrap(), "--algo", "fast", "--t-param", "0.9",
        "--check-products", "--stats", stats.to_str().unwrap(),
    ]));
    let sweep = stdout_of(&run(&["solve", "--input", graph.to_str().unwrap(), "--algo", "sweep"]));
    let naive = stdout_of(&run(&["solve", "--input", graph.to_str().unwrap(), "--algo", "naive"]));
    assert_eq!(fast, sweep);
    assert_eq!(fast, naive);

    let stats_text = std::fs::read_to_string(&stats).unwrap();
    let mut names = Vec::new();
    for line in stats_text.lines() {
        let (name, value) = line.split_once(' ').expect("name value");
        value.parse::<u64>().expect("numeric counter");
        names.push(name.to_owned());
    }
    assert_eq!(names[..4], ["n", "m", "width", "threshold"]);
    assert_eq!(names.len(), 15);
}

#[test]
fn undirected_pipeline_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("u.txt");
    let answer = dir.path().join("ans.txt");
    let stats = dir.path().join("ustats.txt");

    assert!(run(&[
        "gen", "--n", "10", "--m", "18", "--undirected", "--weights", "ties:4", "--multi",
        "--seed", "11", "--output", graph.to_str().unwrap(),
    ])
    .status
    .success());

    let out = run(&[
        "solve", "--input", graph.to_str().unwrap(), "--algo", "undirected-fast", "--seed", "2",
        "--stats", stats.to_str().unwrap(), "--output", answer.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "answer went to the file, not stdout");

    let basic = stdout_of(&run(&[
        "solve", "--input", graph.to_str().unwrap(), "--algo", "undirected-basic",
    ]));
    assert_eq!(std::fs::read_to_string(&answer).unwrap(), basic);

    let stats_text = std::fs::read_to_string(&stats).unwrap();
    assert!(stats_text.starts_with("n 10\nm 18\n"));
    assert!(stats_text.contains("\nbit_flips "));
}

#[test]
fn dense_output_covers_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    assert!(run(&[
        "gen", "--n", "5", "--m", "4", "--directed", "--seed", "3", "--output",
        graph.to_str().unwrap(),
    ])
    .status
    .success());
    let dense = stdout_of(&run(&[
        "solve", "--input", graph.to_str().unwrap(), "--algo", "fast", "--dense",
    ]));
    assert_eq!(dense.lines().count(), 25);
    assert!(dense.lines().all(|l| l.split_whitespace().count() == 3));
}

#[test]
fn verify_passes_on_default_settings() {
    let out = run(&["verify", "--trials", "40", "--seed", "123"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verified 40 instances"), "got: {text}");
}

#[test]
fn bench_emits_csv_rows() {
    let out = run(&[
        "bench", "--sizes", "16", "--algos", "fast,sweep", "--reps", "1", "--csv", "--seed", "2",
    ]);
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,m,algo,best_ms,mean_ms");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("16,240,fast,"));
    assert!(lines[2].starts_with("16,240,sweep,"));
}

#[test]
fn usage_and_input_failures_exit_two() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", "--input", "/definitely/not/here.txt"],
        vec!["solve", "--input", "-", "--algo", "bogus"],
        vec!["gen", "--n", "4", "--m", "99", "--directed"],
        vec!["gen", "--n", "4", "--m", "2"],
        vec!["gen", "--n", "4", "--m", "2", "--directed", "--weights", "ties:zero"],
        vec!["bench", "--sizes", "16", "--algos", "quantum"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }

    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("d.txt");
    assert!(run(&[
        "gen", "--n", "4", "--m", "3", "--directed", "--seed", "1", "--output",
        graph.to_str().unwrap(),
    ])
    .status
    .success());
    let out = run(&["solve", "--input", graph.to_str().unwrap(), "--algo", "undirected-fast"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["solve", "--input", graph.to_str().unwrap(), "--algo", "sweep", "--stats", "/tmp/s"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_graph_text_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "3 1 sideways\n0 1 5\n").unwrap();
    let out = run(&["solve", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 1"), "got: {err}");
}
