//! Command-line front end: solve single instances, generate seeded random
//! ones, cross-check the fast solvers against the reference ones with
//! automatic counterexample shrinking, and time everything side by side.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a divergence, 2 for
//! usage, parse, or IO failures.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use apnp_core::boolmat::MulKernel;
use apnp_core::gen::{generate, GenSpec, WeightMode};
use apnp_core::graph::{emit_graph, emit_result, parse_graph, rank_weights};
use apnp_core::oracle::{naive_apnp, reference_apnp, sweep_apnp, undirected_basic};
use apnp_core::reduce::{lift_answers, reduce_directed, reduce_undirected};
use apnp_core::rng::SplitMix64;
use apnp_core::solver::{check_witnesses, solve_directed_with_stats};
use apnp_core::undirected::solve_undirected_with_stats;
use apnp_core::{ApnpMatrix, Graph, SolverConfig};

#[derive(Parser)]
#[command(
    name = "apnp",
    version,
    about = "All-pairs non-decreasing paths on weighted graphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance and print its answer matrix
    Solve(SolveArgs),
    /// Generate a seeded random instance
    Gen(GenArgs),
    /// Cross-check fast solvers against references on random instances
    Verify(VerifyArgs),
    /// Time solvers on generated instances
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    /// Partition-based directed solver
    Fast,
    /// Ascending reachability sweep, directed reference
    Sweep,
    /// Bucketed relaxation, directed reference
    Naive,
    /// Fingerprinted-string undirected solver
    UndirectedFast,
    /// Per-edge reachability closure, undirected reference
    UndirectedBasic,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Fast => "fast",
            Algo::Sweep => "sweep",
            Algo::Naive => "naive",
            Algo::UndirectedFast => "undirected-fast",
            Algo::UndirectedBasic => "undirected-basic",
        }
    }

    fn wants_directed(self) -> bool {
        matches!(self, Algo::Fast | Algo::Sweep | Algo::Naive)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Packed,
    Strassen,
}

#[derive(Args)]
struct SolveArgs {
    /// Graph file; `-` reads stdin
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Fast)]
    algo: Algo,
    /// Degree threshold exponent in [0, 1]; derived from the kernel when absent
    #[arg(long)]
    t_param: Option<f64>,
    /// Effective exponent override for the threshold derivation
    #[arg(long)]
    omega_eff: Option<f64>,
    #[arg(long, value_enum, default_value_t = KernelArg::Packed)]
    kernel: KernelArg,
    /// Recompute incremental counting products at teardown and compare
    #[arg(long)]
    check_products: bool,
    /// Seed for the string-based undirected solver
    #[arg(long, default_value_t = 0x6170_6e70)]
    seed: u64,
    /// Write solver counters here, one `name value` per line
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Write the matrix here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Emit the full grid with `inf` markers instead of sparse triples
    #[arg(long)]
    dense: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u32,
    #[arg(long, conflicts_with = "undirected")]
    directed: bool,
    #[arg(long)]
    undirected: bool,
    /// Allow parallel edges
    #[arg(long)]
    multi: bool,
    /// `distinct` or `ties:K` for exactly K weight classes
    #[arg(long, default_value = "distinct")]
    weights: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the graph here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Random instances to check
    #[arg(long, default_value_t = 200)]
    trials: u32,
    /// Largest vertex count drawn
    #[arg(long, default_value_t = 12)]
    max_n: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated vertex counts
    #[arg(long, default_value = "128,256")]
    sizes: String,
    /// Comma-separated algorithm names
    #[arg(long, default_value = "fast,sweep")]
    algos: String,
    /// Edge density as a fraction of all possible pairs
    #[arg(long, default_value_t = 1.0)]
    density: f64,
    #[arg(long, default_value_t = 3)]
    reps: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Machine-readable `n,m,algo,best_ms,mean_ms` lines
    #[arg(long)]
    csv: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Solve(args) => run_solve(args).map(|()| ExitCode::SUCCESS),
        Cmd::Gen(args) => run_gen(args).map(|()| ExitCode::SUCCESS),
        Cmd::Verify(args) => run_verify(args),
        Cmd::Bench(args) => run_bench(args).map(|()| ExitCode::SUCCESS),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading stdin")?;
        Ok(buf)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_solve(args: SolveArgs) -> Result<()> {
    let g = parse_graph(&read_input(&args.input)?)
        .map_err(|e| anyhow::anyhow!("{}: {e}", args.input.display()))?;
    let cfg = SolverConfig {
        kernel: match args.kernel {
            KernelArg::Packed => MulKernel::Packed,
            KernelArg::Strassen => MulKernel::Strassen,
        },
        omega_eff: args.omega_eff,
        t_param: args.t_param,
        check_products: args.check_products,
    };
    let (matrix, stats) = solve_one(&g, args.algo, &cfg, args.seed)?;
    match (&args.stats, stats) {
        (Some(path), Some(lines)) => {
            fs::write(path, lines).with_context(|| format!("writing {}", path.display()))?;
        }
        (Some(_), None) => {
            bail!("--stats needs --algo fast or undirected-fast; the references keep no counters")
        }
        (None, _) => {}
    }
    write_output(args.output.as_deref(), &emit_result(&matrix, args.dense))
}

/// Runs one algorithm on one instance, rewriting duplicate weights away and
/// lifting the answers back when the algorithm requires distinct weights.
fn solve_one(g: &Graph, algo: Algo, cfg: &SolverConfig, seed: u64) -> Result<(ApnpMatrix, Option<String>)> {
    if algo.wants_directed() != g.directed() {
        bail!(
            "--algo {} needs {} graph",
            algo.name(),
            if algo.wants_directed() { "a directed" } else { "an undirected" }
        );
    }
    match algo {
        Algo::Fast | Algo::Sweep | Algo::Naive => {
            let run = |rg: &apnp_core::RankedGraph| -> (ApnpMatrix, Option<String>) {
                match algo {
                    Algo::Fast => {
                        let (m, st) = solve_directed_with_stats(rg, cfg);
                        (m, Some(st.lines()))
                    }
                    Algo::Sweep => (sweep_apnp(rg), None),
                    _ => (naive_apnp(rg), None),
                }
            };
            if g.has_duplicate_weights() {
                let (reduced, map) = reduce_directed(g)?;
                let rg = rank_weights(reduced)?;
                let (m, stats) = run(&rg);
                Ok((lift_answers(&m, &map)?, stats))
            } else {
                let rg = rank_weights(g.clone())?;
                Ok(run(&rg))
            }
        }
        Algo::UndirectedFast => {
            let (m, st) = solve_undirected_with_stats(g, seed)?;
            Ok((m, Some(st.lines())))
        }
        Algo::UndirectedBasic => {
            if g.has_duplicate_weights() {
                let (reduced, map) = reduce_undirected(g)?;
                let rg = rank_weights(reduced)?;
                Ok((lift_answers(&undirected_basic(&rg), &map)?, None))
            } else {
                let rg = rank_weights(g.clone())?;
                Ok((undirected_basic(&rg), None))
            }
        }
    }
}

fn run_gen(args: GenArgs) -> Result<()> {
    if !args.directed && !args.undirected {
        bail!("pick --directed or --undirected");
    }
    let weights = parse_weights(&args.weights)?;
    let spec = GenSpec {
        n: args.n,
        m: args.m,
        directed: args.directed,
        multi: args.multi,
        weights,
    };
    let g = generate(&spec, args.seed)?;
    write_output(args.output.as_deref(), &emit_graph(&g))
}

fn parse_weights(s: &str) -> Result<WeightMode> {
    if s == "distinct" {
        return Ok(WeightMode::Distinct);
    }
    if let Some(k) = s.strip_prefix("ties:") {
        let classes: u32 = k.parse().with_context(|| format!("bad class count {k:?}"))?;
        return Ok(WeightMode::Ties { classes });
    }
    bail!("--weights wants distinct or ties:K, got {s:?}")
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode> {
    let mut rng = SplitMix64::new(args.seed);
    let mut directed_runs = 0u32;
    let mut undirected_runs = 0u32;
    for trial in 0..args.trials {
        let directed = trial % 2 == 0;
        let tied = trial % 3 == 0;
        let n = 2 + rng.next_below(args.max_n.max(2) as u64 - 1) as u32;
        let max_m = if directed { n * (n - 1) } else { n * (n - 1) / 2 };
        let seed = rng.next_u64();
        let m = (1 + rng.next_below(max_m as u64) as u32).min(if tied { 3 * n } else { max_m });
        let weights = if tied {
            WeightMode::Ties { classes: 1 + rng.next_below(4.min(m as u64)) as u32 }
        } else {
            WeightMode::Distinct
        };
        let spec = GenSpec { n, m, directed, multi: tied, weights };
        let g = generate(&spec, seed)?;
        let t = [0.0, 0.3, 0.5, 0.8, 1.0][trial as usize % 5];
        if directed {
            directed_runs += 1;
        } else {
            undirected_runs += 1;
        }
        if let Some(report) = divergence(&g, t, seed) {
            let small = shrink(g, t, seed);
            eprintln!("divergence: {report}");
            eprintln!("trial {trial}, t {t}, solver seed {seed}, shrunk instance:");
            eprint!("{}", emit_graph(&small));
            return Ok(ExitCode::from(1));
        }
    }
    println!(
        "verified {} instances ({directed_runs} directed, {undirected_runs} undirected): fast and reference agree",
        args.trials
    );
    Ok(ExitCode::SUCCESS)
}

/// Says how the fast solver disagrees with the reference on this instance,
/// if it does. Also audits witness chains on distinct-weight inputs.
fn divergence(g: &Graph, t: f64, seed: u64) -> Option<String> {
    let want = reference_apnp(g);
    let cfg = SolverConfig { t_param: Some(t), check_products: true, ..SolverConfig::default() };
    let got = match solve_one(g, if g.directed() { Algo::Fast } else { Algo::UndirectedFast }, &cfg, seed) {
        Ok((m, _)) => m,
        Err(e) => return Some(format!("solver refused the instance: {e}")),
    };
    if !got.same_values(&want) {
        return Some("fast and reference matrices differ".into());
    }
    if g.directed() && !g.has_duplicate_weights() {
        let rg = rank_weights(g.clone()).ok()?;
        check_witnesses(&rg, &got);
    }
    None
}

/// Greedy shrink: drop edges one at a time while the divergence survives.
fn shrink(mut g: Graph, t: f64, seed: u64) -> Graph {
    loop {
        let mut reduced = false;
        for skip in 0..g.m() {
            let mut smaller = if g.multi() {
                Graph::new_multi(g.n(), g.directed())
            } else {
                Graph::new(g.n(), g.directed())
            };
            for (id, e) in g.edges().iter().enumerate() {
                if id as u32 != skip {
                    smaller.add_edge(e.src, e.dst, e.weight);
                }
            }
            if divergence(&smaller, t, seed).is_some() {
                g = smaller;
                reduced = true;
                break;
            }
        }
        if !reduced {
            return g;
        }
    }
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let sizes: Vec<u32> = args
        .sizes
        .split(',')
        .map(|s| s.trim().parse().with_context(|| format!("bad size {s:?}")))
        .collect::<Result<_>>()?;
    let algos: Vec<Algo> = args
        .algos
        .split(',')
        .map(|s| match s.trim() {
            "fast" => Ok(Algo::Fast),
            "sweep" => Ok(Algo::Sweep),
            "naive" => Ok(Algo::Naive),
            "undirected-fast" => Ok(Algo::UndirectedFast),
            "undirected-basic" => Ok(Algo::UndirectedBasic),
            other => bail!("unknown algorithm {other:?}"),
        })
        .collect::<Result<_>>()?;
    if !(0.0..=1.0).contains(&args.density) {
        bail!("--density wants a fraction in [0, 1]");
    }

    if args.csv {
        println!("n,m,algo,best_ms,mean_ms");
    } else {
        println!("{:>6} {:>10} {:>18} {:>10} {:>10}", "n", "m", "algo", "best_ms", "mean_ms");
    }
    for &n in &sizes {
        for &algo in &algos {
            let directed = algo.wants_directed();
            let max_m = if directed { n * (n - 1) } else { n * (n - 1) / 2 };
            let m = ((args.density * max_m as f64) as u32).clamp(1, max_m);
            let spec = GenSpec { n, m, directed, multi: false, weights: WeightMode::Distinct };
            let g = generate(&spec, args.seed)?;
            let cfg = SolverConfig::default();
            let mut total = 0.0f64;
            let mut best = f64::INFINITY;
            for rep in 0..args.reps.max(1) {
                let start = Instant::now();
                let (matrix, _) = solve_one(&g, algo, &cfg, args.seed + rep as u64)?;
                let ms = start.elapsed().as_secs_f64() * 1e3;
                std::hint::black_box(matrix.present());
                total += ms;
                best = best.min(ms);
            }
            let mean = total / args.reps.max(1) as f64;
            if args.csv {
                println!("{n},{m},{},{best:.3},{mean:.3}", algo.name());
            } else {
                println!("{:>6} {:>10} {:>18} {:>10.2} {:>10.2}", n, m, algo.name(), best, mean);
            }
        }
    }
    Ok(())
}
