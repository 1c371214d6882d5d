//! Argument parsing and command dispatch.

use clap::{Args, Parser, Subcommand, ValueEnum};
use lcc_core::graph::{CoverKind, CycleCover, GraphKind};
use lcc_core::instances::{InstanceMeta, InstanceSpec};
use lcc_core::lset::{LSpec, LengthMode};
use lcc_core::oracles::OracleConfig;

use crate::bench::{run_sweep, summary_row, Family, Sweep};
use crate::report::{render, Algorithm, Format};
use crate::{length_mode, load_graph, read_file, solve, verify, write_file, CliError, SolveOptions};

#[derive(Debug, Parser)]
#[command(name = "lcc", version, about = "Cycle covers with restricted cycle lengths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an algorithm on a graph file.
    Solve(SolveArgs),
    /// Generate an instance and its JSON sidecar.
    Gen(GenArgs),
    /// Check a graph file (and optionally a cover).
    Verify(VerifyArgs),
    /// Sweep an instance family and tabulate reports.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    #[value(name = "U", alias = "u")]
    U,
    #[value(name = "D", alias = "d")]
    D,
}

impl From<KindArg> for GraphKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::U => GraphKind::Undirected,
            KindArg::D => GraphKind::Directed,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub alg: Algorithm,
    /// Cycle lengths, e.g. "3", "4,6..12", "4,10..20 step 2".
    #[arg(long = "L")]
    pub lengths: String,
    pub graph: String,
    /// Also run the exact oracle and report the ratio.
    #[arg(long)]
    pub oracle: bool,
    /// Largest n the oracle may attempt (default: LCC_ORACLE_CAP or 12).
    #[arg(long)]
    pub oracle_cap: Option<usize>,
    /// Write the repair phases as JSON lines to this file.
    #[arg(long)]
    pub debug_trace: Option<String>,
    /// Write `<out>.cover` and `<out>.report.<format>`.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Input cover for refine-min / refine-max.
    #[arg(long)]
    pub cover: Option<String>,
    /// Stretch s for refine-max (keeps at least 1 - 1/s of the weight).
    #[arg(long = "s", default_value_t = 2)]
    pub stretch: u64,
    /// Exact runs: allow any length that is a sum of permitted lengths.
    #[arg(long)]
    pub closure: bool,
    /// Undirected graphs: allow 2-cycles (an edge taken twice).
    #[arg(long)]
    pub allow_2cycles: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenFamily {
    CircularU,
    CircularD,
    Tight,
    Random,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub family: GenFamily,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long = "M", default_value_t = 100)]
    pub m: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "U")]
    pub kind: KindArg,
    #[arg(long, default_value_t = 100)]
    pub wmax: u64,
    /// Graph file to write; the sidecar goes to `<out>.json`. Without it the
    /// graph is printed.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub graph: String,
    #[arg(long)]
    pub cover: Option<String>,
    #[arg(long = "L")]
    pub lengths: Option<String>,
    #[arg(long)]
    pub allow_2cycles: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub family: Family,
    /// Comma-separated sweep values (p for tight, n otherwise).
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<u64>,
    #[arg(long = "M", default_value_t = 1000)]
    pub m: u64,
    #[arg(long = "L")]
    pub lengths: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, value_enum, default_value = "U")]
    pub kind: KindArg,
    #[arg(long, default_value_t = 100)]
    pub wmax: u64,
    #[arg(long)]
    pub oracle_cap: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<String>,
}

fn oracle_config(cap: Option<usize>) -> OracleConfig {
    cap.map(OracleConfig::with_cap).unwrap_or_else(OracleConfig::from_env)
}

/// Runs a parsed command; the returned text goes to standard output.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Gen(a) => run_gen(a),
        Command::Verify(a) => {
            let graph = read_file(&a.graph)?;
            let cover = a.cover.as_deref().map(read_file).transpose()?;
            verify(&graph, cover.as_deref(), a.lengths.as_deref(), a.allow_2cycles).map(|s| s + "\n")
        }
        Command::Bench(a) => run_bench(a),
    }
}

fn run_solve(a: SolveArgs) -> Result<String, CliError> {
    let (g, violation) = load_graph(&read_file(&a.graph)?)?;
    let mut opts = SolveOptions::new(a.alg, a.lengths);
    opts.oracle = a.oracle;
    opts.oracle_config = oracle_config(a.oracle_cap);
    opts.allow_2cycles = a.allow_2cycles;
    opts.closure = a.closure;
    opts.stretch = a.stretch;
    if let Some(path) = &a.cover {
        let kind = match (g.kind(), a.allow_2cycles) {
            (GraphKind::Directed, _) => CoverKind::Directed,
            (GraphKind::Undirected, true) => CoverKind::UndirectedWith2Cycles,
            (GraphKind::Undirected, false) => CoverKind::Undirected,
        };
        let cover = CycleCover::parse_text(&read_file(path)?, kind).map_err(|e| CliError::Parse(e.to_string()))?;
        opts.input_cover = Some(cover);
    }
    opts.known_optimum = sidecar_optimum(&a.graph, &opts.lengths, g.n(), length_mode(g.kind(), a.allow_2cycles));
    let out = solve(&a.graph, &g, violation.as_deref(), &opts)?;
    if let (Some(path), Some(trace)) = (&a.debug_trace, &out.trace) {
        write_file(path, &trace.to_jsonl())?;
    }
    let rendered = render(std::slice::from_ref(&out.report), a.format);
    if let Some(prefix) = &a.out {
        write_file(&format!("{prefix}.cover"), &out.cover.to_text())?;
        let ext = if a.format == Format::Csv { "csv" } else { "json" };
        write_file(&format!("{prefix}.report.{ext}"), &rendered)?;
    }
    Ok(rendered)
}

/// Optimum recorded in `<graph>.json`, if the sidecar's length set has the
/// same sums as `lengths` up to `n`.
fn sidecar_optimum(graph_path: &str, lengths: &str, n: usize, mode: LengthMode) -> Option<u64> {
    let text = std::fs::read_to_string(format!("{graph_path}.json")).ok()?;
    let meta: InstanceMeta = serde_json::from_str(&text).ok()?;
    let mine = LSpec::parse(lengths, mode).ok()?;
    let theirs = LSpec::parse(meta.lengths.as_deref()?, mode).ok()?;
    let same = (1..=n as u64).all(|k| mine.in_closure(k) == theirs.in_closure(k));
    (same && meta.n == n).then_some(meta.expected_optimum?)
}

fn run_gen(a: GenArgs) -> Result<String, CliError> {
    let need_n = || a.n.ok_or_else(|| CliError::Parse("--n is required for this family".into()));
    let spec = match a.family {
        GenFamily::CircularU => InstanceSpec::CircularU { n: need_n()? },
        GenFamily::CircularD => InstanceSpec::CircularD { n: need_n()? },
        GenFamily::Tight => InstanceSpec::Tight {
            p: a.p.ok_or_else(|| CliError::Parse("--p is required for the tight family".into()))?,
            m: a.m,
        },
        GenFamily::Random => InstanceSpec::RandomMetric {
            n: need_n()?,
            kind: a.kind.into(),
            seed: a.seed,
            wmax: a.wmax,
        },
    };
    let (g, meta) = spec.generate().map_err(|e| CliError::Parse(e.to_string()))?;
    let text = g.to_text();
    match &a.out {
        Some(path) => {
            write_file(path, &text)?;
            let sidecar = serde_json::to_string_pretty(&meta).expect("plain struct") + "\n";
            write_file(&format!("{path}.json"), &sidecar)?;
            Ok(format!("wrote {path} ({} vertices)\n", g.n()))
        }
        None => Ok(text),
    }
}

fn run_bench(a: BenchArgs) -> Result<String, CliError> {
    let mut sweep = Sweep::new(a.family, a.values);
    sweep.m = a.m;
    sweep.lengths = a.lengths;
    sweep.seeds = a.seeds;
    sweep.kind = a.kind.into();
    sweep.wmax = a.wmax;
    sweep.oracle_config = oracle_config(a.oracle_cap);
    let mut rows = run_sweep(&sweep)?;
    let all_failed = !rows.is_empty() && rows.iter().all(|r| r.error.is_some());
    rows.push(summary_row(a.family, &rows));
    let rendered = render(&rows, a.format);
    if let Some(path) = &a.out {
        write_file(path, &rendered)?;
    }
    if all_failed {
        return Err(CliError::Invariant("every benchmark row failed".into()));
    }
    Ok(rendered)
}
