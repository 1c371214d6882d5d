//! Parameter sweeps over instance families, run in parallel and reported in
//! sweep order.

use lcc_core::graph::{GraphKind, MetricGraph};
use lcc_core::instances::{gen_circular_directed, gen_circular_undirected, gen_random_metric, gen_tight_family, InstanceSpec};
use lcc_core::oracles::OracleConfig;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::report::{Algorithm, Reference, RunReport};
use crate::{solve, CliError, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    /// Tight family; values are `p`.
    Tight,
    /// Directed circular metric; values are `n`, reference is the
    /// Hamiltonian cycle of weight `n`.
    CircularD,
    /// Undirected circular metric; values are `n`, reference `n`.
    CircularU,
    /// All weights 1; values are `n`.
    Uniform,
    /// Seeded random metrics; values are `n`.
    Random,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Tight => "tight",
            Family::CircularD => "circular-d",
            Family::CircularU => "circular-u",
            Family::Uniform => "uniform",
            Family::Random => "random",
        }
    }

    fn default_lengths(self, kind: GraphKind) -> &'static str {
        match self {
            Family::CircularD => "2,3",
            Family::Random if kind == GraphKind::Directed => "2,3",
            _ => "3",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub family: Family,
    pub values: Vec<u64>,
    /// Heavy-edge unit for the tight family.
    pub m: u64,
    /// Length set; defaults per family (the tight family brings its own).
    pub lengths: Option<String>,
    pub seeds: u64,
    pub kind: GraphKind,
    pub wmax: u64,
    pub oracle_config: OracleConfig,
}

impl Sweep {
    pub fn new(family: Family, values: Vec<u64>) -> Self {
        Sweep {
            family,
            values,
            m: 1000,
            lengths: None,
            seeds: 1,
            kind: GraphKind::Undirected,
            wmax: 100,
            oracle_config: OracleConfig::from_env(),
        }
    }
}

struct Job {
    id: String,
    graph: MetricGraph,
    lengths: String,
    algorithm: Algorithm,
    known: Option<u64>,
    /// `known` is an optimum over the length set, not just a yardstick.
    known_is_optimum: bool,
    oracle: bool,
}

fn algorithm_for(kind: GraphKind) -> Algorithm {
    match kind {
        GraphKind::Directed => Algorithm::ApxDir,
        GraphKind::Undirected => Algorithm::ApxUndir,
    }
}

fn jobs(sweep: &Sweep) -> Result<Vec<Job>, CliError> {
    let bad = |e: lcc_core::instances::InstanceError| CliError::Parse(e.to_string());
    let cap = sweep.oracle_config.cap;
    let mut out = Vec::new();
    for &v in &sweep.values {
        let n = v as usize;
        match sweep.family {
            Family::Tight => {
                let t = gen_tight_family(v, sweep.m).map_err(bad)?;
                let id = InstanceSpec::Tight { p: v, m: sweep.m }.id();
                out.push(Job {
                    id,
                    oracle: t.graph.n() <= cap,
                    lengths: sweep.lengths.clone().unwrap_or_else(|| t.lengths.to_string()),
                    known: Some(t.expected_optimum),
                    known_is_optimum: true,
                    graph: t.graph,
                    algorithm: Algorithm::ApxUndir,
                });
            }
            Family::CircularD | Family::CircularU => {
                let (graph, kind) = if sweep.family == Family::CircularD {
                    (gen_circular_directed(n).map_err(bad)?, GraphKind::Directed)
                } else {
                    (gen_circular_undirected(n).map_err(bad)?, GraphKind::Undirected)
                };
                let id = if kind == GraphKind::Directed {
                    InstanceSpec::CircularD { n }.id()
                } else {
                    InstanceSpec::CircularU { n }.id()
                };
                out.push(Job {
                    id,
                    graph,
                    lengths: sweep
                        .lengths
                        .clone()
                        .unwrap_or_else(|| sweep.family.default_lengths(kind).into()),
                    algorithm: algorithm_for(kind),
                    known: Some(v),
                    known_is_optimum: false,
                    oracle: false,
                });
            }
            Family::Uniform => {
                let mut graph = MetricGraph::uniform(n, sweep.kind, 1);
                graph.verify_metric().expect("uniform weights are metric");
                out.push(Job {
                    id: format!("uniform-{}{n}", if sweep.kind == GraphKind::Directed { 'd' } else { 'u' }),
                    graph,
                    lengths: sweep
                        .lengths
                        .clone()
                        .unwrap_or_else(|| sweep.family.default_lengths(sweep.kind).into()),
                    algorithm: algorithm_for(sweep.kind),
                    // every cover of a uniform graph weighs n
                    known: Some(v),
                    known_is_optimum: true,
                    oracle: false,
                });
            }
            Family::Random => {
                for seed in 0..sweep.seeds {
                    let spec = InstanceSpec::RandomMetric {
                        n,
                        kind: sweep.kind,
                        seed,
                        wmax: sweep.wmax,
                    };
                    out.push(Job {
                        id: spec.id(),
                        graph: gen_random_metric(n, sweep.kind, seed, sweep.wmax).map_err(bad)?,
                        lengths: sweep
                            .lengths
                            .clone()
                            .unwrap_or_else(|| sweep.family.default_lengths(sweep.kind).into()),
                        algorithm: algorithm_for(sweep.kind),
                        known: None,
                        known_is_optimum: false,
                        oracle: n <= cap,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn run_job(job: &Job, config: OracleConfig) -> RunReport {
    let mut opts = SolveOptions::new(job.algorithm, job.lengths.clone());
    opts.oracle = job.oracle;
    opts.oracle_config = config;
    if job.known_is_optimum {
        opts.known_optimum = job.known;
    }
    match solve(&job.id, &job.graph, None, &opts) {
        Ok(mut out) => {
            // A yardstick that is not an optimum over the length set gets a
            // ratio but no bound.
            if let (Some(k), false) = (job.known, job.known_is_optimum) {
                out.report.bound = None;
                out.report.set_reference(Reference::Formula, k, false);
            }
            out.report
        }
        Err(e) => {
            let mut r = RunReport::new(&job.id, job.algorithm, job.lengths.clone(), job.graph.n());
            r.error = Some(e.to_string());
            r
        }
    }
}

/// Runs every instance of the sweep; rows come back in sweep order.
pub fn run_sweep(sweep: &Sweep) -> Result<Vec<RunReport>, CliError> {
    let jobs = jobs(sweep)?;
    let config = sweep.oracle_config;
    Ok(jobs.par_iter().map(|j| run_job(j, config)).collect())
}

/// Largest ratio among successful rows.
pub fn max_ratio(reports: &[RunReport]) -> Option<Ratio<u64>> {
    reports.iter().filter_map(|r| r.ratio).max()
}

/// A summary row carrying the largest observed ratio of the sweep.
pub fn summary_row(family: Family, reports: &[RunReport]) -> RunReport {
    let alg = reports.first().map(|r| r.algorithm).unwrap_or(Algorithm::ApxUndir);
    let mut row = RunReport::new(format!("max:{}", family.name()), alg, "", 0);
    row.ratio = max_ratio(reports);
    row.wall_ms = reports.iter().map(|r| r.wall_ms).sum();
    let failed = reports.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        row.error = Some(format!("{failed} of {} rows failed", reports.len()));
    }
    row
}
