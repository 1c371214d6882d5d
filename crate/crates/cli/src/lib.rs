//! Library side of the `lcc` command: running algorithms on graph files,
//! generating instances, checking files and sweeping benchmarks.
//!
//! Exit codes used by the binary:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | `verify` found a problem |
//! | 2 | unreadable or malformed input, bad parameters |
//! | 3 | vertex count not admissible for the length set |
//! | 4 | oracle requested above the oracle cap |
//! | 5 | internal invariant violated (invalid cover, bound exceeded) |

pub mod bench;
pub mod cli;
pub mod report;

use std::time::Instant;

use lcc_core::apx::{apx_dir, apx_undir, refine_max, refine_min, ApxError, PhaseTrace};
use lcc_core::graph::{CycleCover, GraphKind, MetricGraph};
use lcc_core::gw_forest::GwError;
use lcc_core::lset::{s_core, LSetError, LSpec, LengthMode};
use lcc_core::oracles::{exact_cover, LengthRule, Objective, OracleConfig, OracleError};
use num_rational::Ratio;
use thiserror::Error;

use report::{Algorithm, Reference, RunReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("not admissible: {0}")]
    NotAdmissible(String),
    #[error("{0} vertices exceed the oracle cap {1}")]
    OracleCap(usize, usize),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Parse(_) | CliError::Io { .. } => 2,
            CliError::NotAdmissible(_) => 3,
            CliError::OracleCap(..) => 4,
            CliError::Invariant(_) => 5,
        }
    }
}

impl From<LSetError> for CliError {
    fn from(e: LSetError) -> Self {
        match e {
            LSetError::NotAdmissible(_) | LSetError::DecomposerUndefined(_) => CliError::NotAdmissible(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<ApxError> for CliError {
    fn from(e: ApxError) -> Self {
        match e {
            ApxError::NotAdmissible(_) | ApxError::NotRefinable(_) | ApxError::DecomposerUndefined(_) => {
                CliError::NotAdmissible(e.to_string())
            }
            ApxError::NotMetricChecked | ApxError::KindMismatch | ApxError::TwoCyclesNotAllowed => {
                CliError::Parse(e.to_string())
            }
            ApxError::Forest(GwError::WeightTooLarge(_)) => CliError::Parse(e.to_string()),
            ApxError::Forest(_) | ApxError::Graph(_) => CliError::Invariant(e.to_string()),
        }
    }
}

fn oracle_error(e: OracleError, cap: usize) -> CliError {
    match e {
        OracleError::TooLarge(n) => CliError::OracleCap(n, cap),
        OracleError::NotAdmissible(_) | OracleError::Infeasible => CliError::NotAdmissible(e.to_string()),
        OracleError::NotUndirected => CliError::Parse(e.to_string()),
        OracleError::Graph(_) => CliError::Invariant(e.to_string()),
    }
}

pub fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })
}

pub fn write_file(path: &str, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })
}

/// Parses a graph and records whether it is metric. On a violation the
/// offending triple is returned alongside.
pub fn load_graph(text: &str) -> Result<(MetricGraph, Option<String>), CliError> {
    let mut g = MetricGraph::parse_text(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let violation = g
        .verify_metric()
        .err()
        .map(|t| format!("w({}, {}) > w({}, {}) + w({}, {})", t.u, t.v, t.u, t.x, t.x, t.v));
    Ok((g, violation))
}

/// Length mode implied by the graph: directed graphs and 2-cycle runs
/// accept length 2.
pub fn length_mode(kind: GraphKind, allow_2cycles: bool) -> LengthMode {
    if kind == GraphKind::Directed || allow_2cycles {
        LengthMode::Directed
    } else {
        LengthMode::Undirected
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    pub lengths: String,
    pub oracle: bool,
    pub oracle_config: OracleConfig,
    pub allow_2cycles: bool,
    /// Exact runs: allow any length in the closure of the set.
    pub closure: bool,
    /// Input cover for the refinement algorithms.
    pub input_cover: Option<CycleCover>,
    /// Stretch `s` for `refine-max`.
    pub stretch: u64,
    /// Optimum known from the generator, used when no oracle runs.
    pub known_optimum: Option<u64>,
}

impl SolveOptions {
    pub fn new(algorithm: Algorithm, lengths: impl Into<String>) -> Self {
        SolveOptions {
            algorithm,
            lengths: lengths.into(),
            oracle: false,
            oracle_config: OracleConfig::from_env(),
            allow_2cycles: false,
            closure: false,
            input_cover: None,
            stretch: 2,
            known_optimum: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub report: RunReport,
    pub cover: CycleCover,
    pub trace: Option<PhaseTrace>,
}

fn bound_apx_undir(spec: &LSpec) -> Ratio<u64> {
    Ratio::from_integer(4 * (spec.p() + 4))
}

fn bound_apx_dir(spec: &LSpec, n: usize) -> Ratio<u64> {
    Ratio::from_integer(2 * n as u64 * (spec.p() + 4))
}

/// Runs one algorithm on one graph and checks the result.
pub fn solve(instance: &str, g: &MetricGraph, metric_violation: Option<&str>, opts: &SolveOptions) -> Result<SolveOutput, CliError> {
    let n = g.n();
    let alg = opts.algorithm;
    let needs_metric = matches!(alg, Algorithm::ApxUndir | Algorithm::ApxDir | Algorithm::RefineMin);
    if needs_metric {
        if let Some(v) = metric_violation {
            return Err(CliError::Parse(format!("{alg} needs a metric graph: {v}")));
        }
    }
    let spec = LSpec::parse(&opts.lengths, length_mode(g.kind(), opts.allow_2cycles))?;
    let mut report = RunReport::new(instance, alg, spec.to_string(), n);
    let cap = opts.oracle_config.cap;
    let maximise = alg == Algorithm::ExactMax || alg == Algorithm::RefineMax;
    let oracle_rule = if opts.closure { LengthRule::Closure } else { LengthRule::Exact };

    let start = Instant::now();
    let (cover, trace, allowed): (CycleCover, Option<PhaseTrace>, LSpec) = match alg {
        Algorithm::ApxUndir => {
            let (c, t) = apx_undir(g, &spec, opts.allow_2cycles)?;
            (c, Some(t), spec.clone())
        }
        Algorithm::ApxDir => {
            let (c, t) = apx_dir(g, &spec)?;
            (c, Some(t), spec.clone())
        }
        Algorithm::ExactMin | Algorithm::ExactMax => {
            let obj = if maximise { Objective::Max } else { Objective::Min };
            let r = exact_cover(g, &spec, obj, oracle_rule, &opts.oracle_config).map_err(|e| oracle_error(e, cap))?;
            (r.witness, None, spec.clone())
        }
        Algorithm::RefineMin => {
            let input = opts
                .input_cover
                .as_ref()
                .ok_or_else(|| CliError::Parse("refine-min needs --cover".into()))?;
            (refine_min(g, input, &spec)?, None, spec.clone())
        }
        Algorithm::RefineMax => {
            let input = opts
                .input_cover
                .as_ref()
                .ok_or_else(|| CliError::Parse("refine-max needs --cover".into()))?;
            if opts.stretch < 2 {
                return Err(CliError::Parse("--s must be at least 2".into()));
            }
            if let Some(bad) = input.lengths().into_iter().find(|&l| !spec.contains(l as u64)) {
                return Err(CliError::Parse(format!("input cycle length {bad} not in {spec}")));
            }
            let sc = s_core(&spec, opts.stretch, 1)?;
            let core = sc.core().clone();
            (refine_max(g, input, &sc)?, None, core)
        }
    };
    report.wall_ms = start.elapsed().as_secs_f64() * 1000.0;
    report.phases = trace.as_ref().map(PhaseTrace::phase_count);

    cover
        .validate(n)
        .map_err(|e| CliError::Invariant(format!("output is not a cover: {e}")))?;
    let closure_ok = opts.closure && matches!(alg, Algorithm::ExactMin | Algorithm::ExactMax);
    let permitted = |l: u64| if closure_ok { allowed.in_closure(l) } else { allowed.contains(l) };
    if let Some(bad) = cover.lengths().into_iter().find(|&l| !permitted(l as u64)) {
        return Err(CliError::Invariant(format!("cycle of length {bad} is not permitted")));
    }
    let weight = g
        .cover_weight(&cover)
        .map_err(|e| CliError::Invariant(e.to_string()))?;
    report.weight = Some(weight);

    match alg {
        Algorithm::ApxUndir | Algorithm::ApxDir => {
            report.bound = Some(if alg == Algorithm::ApxUndir {
                bound_apx_undir(&spec)
            } else {
                bound_apx_dir(&spec, n)
            });
            if opts.oracle {
                let r = exact_cover(g, &spec, Objective::Min, LengthRule::Closure, &opts.oracle_config)
                    .map_err(|e| oracle_error(e, cap))?;
                report.set_reference(Reference::Oracle, r.weight, false);
            } else if let Some(opt) = opts.known_optimum {
                report.set_reference(Reference::Formula, opt, false);
            }
        }
        Algorithm::ExactMin | Algorithm::ExactMax => {
            report.bound = Some(Ratio::from_integer(1));
            report.set_reference(Reference::Oracle, weight, maximise);
        }
        Algorithm::RefineMin | Algorithm::RefineMax => {
            let input = opts.input_cover.as_ref().expect("checked above");
            let before = g
                .cover_weight(input)
                .map_err(|e| CliError::Parse(format!("input cover: {e}")))?;
            report.set_reference(Reference::InputCover, before, maximise);
            report.bound = Some(if maximise {
                Ratio::new(opts.stretch, opts.stretch - 1)
            } else {
                Ratio::from_integer(2)
            });
            if opts.oracle {
                let obj = if maximise { Objective::Max } else { Objective::Min };
                let r = exact_cover(g, &allowed, obj, LengthRule::Exact, &opts.oracle_config)
                    .map_err(|e| oracle_error(e, cap))?;
                report.oracle_weight = Some(r.weight);
            }
        }
    }
    if !report.within_bound() {
        return Err(CliError::Invariant(format!(
            "ratio {} exceeds proven bound {}",
            report.ratio.expect("set"),
            report.bound.expect("set")
        )));
    }
    Ok(SolveOutput { report, cover, trace })
}

/// Checks a graph file and, optionally, a cover against it.
pub fn verify(graph_text: &str, cover_text: Option<&str>, lengths: Option<&str>, allow_2cycles: bool) -> Result<String, CliError> {
    let (g, violation) = load_graph(graph_text)?;
    if let Some(v) = violation {
        return Err(CliError::VerifyFailed(format!("triangle inequality violated: {v}")));
    }
    let mut summary = format!("graph ok: {} vertices, {:?}, metric", g.n(), g.kind());
    if let Some(text) = cover_text {
        let kind = match (g.kind(), allow_2cycles) {
            (GraphKind::Directed, _) => lcc_core::CoverKind::Directed,
            (GraphKind::Undirected, true) => lcc_core::CoverKind::UndirectedWith2Cycles,
            (GraphKind::Undirected, false) => lcc_core::CoverKind::Undirected,
        };
        let cover = CycleCover::parse_text(text, kind).map_err(|e| CliError::Parse(e.to_string()))?;
        let weight = g
            .cover_weight(&cover)
            .map_err(|e| CliError::VerifyFailed(format!("cover: {e}")))?;
        if let Some(l) = lengths {
            let spec = LSpec::parse(l, length_mode(g.kind(), allow_2cycles))?;
            if let Some(bad) = cover.lengths().into_iter().find(|&x| !spec.contains(x as u64)) {
                return Err(CliError::VerifyFailed(format!("cycle length {bad} not in {spec}")));
            }
        }
        summary.push_str(&format!("\ncover ok: {} cycles, weight {weight}", cover.cycles.len()));
    }
    Ok(summary)
}
