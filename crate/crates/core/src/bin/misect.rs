use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use misect::instance::{generate, FamilyPair, InstanceFile};
use misect::report::BenchRow;
use misect::solver::{certify_optimality, solve, SolveConfig};
use misect::verify::{brute_force_best, BRUTE_FORCE_LIMIT};

/// Exact weighted matroid intersection through rank oracles.
#[derive(Parser)]
#[command(name = "misect", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and print the solution, weight and query
    /// totals.
    Solve(SolveArgs),
    /// Generate a deterministic instance.
    Gen(GenArgs),
    /// Run a benchmark sweep and write one CSV row per solve.
    Bench(BenchArgs),
    /// Solve and cross-check against brute-force enumeration (small
    /// instances only).
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Re-verify the optimality certificate; exit 2 if it fails.
    #[arg(long)]
    certify: bool,
    /// Assertion level 0..=2 (overrides DEBUG_ASSERT_LEVEL).
    #[arg(long)]
    debug_asserts: Option<u8>,
    /// Write the run report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write a newline-delimited JSON trace of every Dijkstra iteration.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// graphic-partition | matching | gf2-graphic | uniform-uniform
    pair: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = 32)]
    w_max: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON sweep description: a list of cells
    /// {"pair", "n", "r", "w_max", "seeds": [..]}.
    #[arg(long)]
    sweep: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Solve cells concurrently (each solve stays single-threaded).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
}

#[derive(Clone, Debug, Deserialize)]
struct SweepCell {
    #[serde(default)]
    name: Option<String>,
    pair: String,
    n: usize,
    r: usize,
    w_max: i64,
    seeds: Vec<u64>,
}

fn debug_level(flag: Option<u8>) -> u8 {
    flag.or_else(|| {
        std::env::var("DEBUG_ASSERT_LEVEL")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
    .min(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn cmd_solve(args: SolveArgs) -> ExitCode {
    let inst = match InstanceFile::from_path(&args.instance) {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let (m1, m2) = match inst.build_oracles() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let config = SolveConfig {
        debug_assert_level: debug_level(args.debug_asserts),
        trace_path: args.trace.clone(),
        ..Default::default()
    };
    let out = match solve(m1.clone(), m2.clone(), &inst.weights, &config) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    println!("solution: {:?}", out.solution);
    println!("weight: {}", out.weight);
    let q = &out.report.queries;
    println!(
        "queries: init={} adjustment={} sssp={} augmentation={} verification={} total={}",
        q.init.total(),
        q.adjustment.total(),
        q.sssp.total(),
        q.augmentation.total(),
        q.verification.total(),
        out.report.queries_total
    );
    println!(
        "r={} rounds={} augmentations={} wall_ms={:.1}",
        out.report.r,
        out.report.rounds.len(),
        out.report.augmentations_total,
        out.report.wall_ms
    );
    if let Some(path) = &args.report {
        let json = serde_json::to_string_pretty(&out.report).expect("report serialization");
        if let Err(e) = std::fs::write(path, json + "\n") {
            eprintln!("error writing report: {e}");
            return ExitCode::from(1);
        }
    }
    if args.certify {
        match certify_optimality(&out.certificate, &m1, &m2, &inst.weights) {
            Ok(()) => println!("certificate: valid"),
            Err(reason) => {
                eprintln!("certificate check failed: {reason}");
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::SUCCESS
}

fn cmd_gen(args: GenArgs) -> ExitCode {
    let pair = match FamilyPair::parse(&args.pair) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match generate(pair, args.n, args.r, args.w_max, args.seed) {
        Ok(inst) => {
            if let Err(e) = inst.write_to(&args.out) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            println!("wrote {}", args.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_bench(args: BenchArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.sweep) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error reading sweep: {e}");
            return ExitCode::from(1);
        }
    };
    let cells: Vec<SweepCell> = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error parsing sweep: {e}");
            return ExitCode::from(1);
        }
    };
    let mut tasks = Vec::new();
    for cell in &cells {
        for &seed in &cell.seeds {
            tasks.push((cell.clone(), seed));
        }
    }

    let jobs = args.jobs.max(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results: Vec<std::sync::Mutex<Option<BenchRow>>> =
        tasks.iter().map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(tasks.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let (cell, seed) = &tasks[i];
                match run_cell(cell, *seed) {
                    Ok(row) => *results[i].lock().unwrap() = Some(row),
                    Err(e) => eprintln!(
                        "cell {} n={} r={} seed={} failed: {e}",
                        cell.pair, cell.n, cell.r, seed
                    ),
                }
            });
        }
    });

    let mut writer = match csv::Writer::from_path(&args.out) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error opening {}: {e}", args.out.display());
            return ExitCode::from(1);
        }
    };
    let mut written = 0usize;
    for slot in &results {
        if let Some(row) = slot.lock().unwrap().take() {
            if let Err(e) = writer.serialize(&row) {
                eprintln!("error writing row: {e}");
                return ExitCode::from(1);
            }
            written += 1;
        }
    }
    if written == 0 {
        // header-only CSV for empty sweeps
        if let Err(e) = writer.write_record([
            "name",
            "n",
            "r",
            "W",
            "queries_init",
            "queries_adjust",
            "queries_sssp",
            "queries_total",
            "augmentations",
            "rounds",
            "wall_ms",
            "budget_ratio",
        ]) {
            eprintln!("error writing header: {e}");
            return ExitCode::from(1);
        }
    }
    if let Err(e) = writer.flush() {
        eprintln!("error flushing csv: {e}");
        return ExitCode::from(1);
    }
    println!("wrote {written} rows to {}", args.out.display());
    ExitCode::SUCCESS
}

fn run_cell(cell: &SweepCell, seed: u64) -> misect::error::Result<BenchRow> {
    let pair = FamilyPair::parse(&cell.pair)?;
    let inst = generate(pair, cell.n, cell.r, cell.w_max, seed)?;
    let (m1, m2) = inst.build_oracles()?;
    let out = solve(m1, m2, &inst.weights, &SolveConfig::default())?;
    let name = cell
        .name
        .clone()
        .unwrap_or_else(|| format!("{}-n{}-r{}-s{seed}", cell.pair, cell.n, cell.r));
    Ok(BenchRow::from_report(name, &out.report))
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let inst = match InstanceFile::from_path(&args.instance) {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if inst.weights.len() > BRUTE_FORCE_LIMIT {
        eprintln!(
            "refusing to brute force n = {} (limit {})",
            inst.weights.len(),
            BRUTE_FORCE_LIMIT
        );
        return ExitCode::from(3);
    }
    let run = || -> misect::error::Result<(i128, i128)> {
        let (m1, m2) = inst.build_oracles()?;
        let out = solve(
            m1.clone(),
            m2.clone(),
            &inst.weights,
            &SolveConfig::default(),
        )?;
        let (_, best) = brute_force_best(&m1, &m2, &inst.weights)?;
        Ok((out.weight, best))
    };
    match run() {
        Ok((got, want)) if got == want => {
            println!("ok: weight {got} matches brute force");
            ExitCode::SUCCESS
        }
        Ok((got, want)) => {
            eprintln!("MISMATCH: solver weight {got}, brute force {want}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
