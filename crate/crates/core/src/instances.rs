//! Instance families: circular metrics, the tight family for the
//! approximation pipeline, and seeded random metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{metric_closure, GraphKind, MetricGraph, PartialWeights};
use crate::lset::{LSpec, LengthMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
}

/// Parameters of a generated instance, written next to the graph file as a
/// JSON sidecar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum InstanceSpec {
    CircularU { n: usize },
    CircularD { n: usize },
    Tight { p: u64, m: u64 },
    RandomMetric { n: usize, kind: GraphKind, seed: u64, wmax: u64 },
}

/// Sidecar contents: the parameters plus what is known about the optimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    #[serde(flatten)]
    pub spec: InstanceSpec,
    pub n: usize,
    /// Suggested cycle-length set, in the text grammar.
    pub lengths: Option<String>,
    pub expected_optimum: Option<u64>,
    pub expected_formula: Option<String>,
}

impl InstanceSpec {
    pub fn id(&self) -> String {
        match self {
            InstanceSpec::CircularU { n } => format!("circular-u-{n}"),
            InstanceSpec::CircularD { n } => format!("circular-d-{n}"),
            InstanceSpec::Tight { p, m } => format!("tight-p{p}-m{m}"),
            InstanceSpec::RandomMetric { n, kind, seed, wmax } => {
                let k = if *kind == GraphKind::Directed { 'd' } else { 'u' };
                format!("random-{k}{n}-s{seed}-w{wmax}")
            }
        }
    }

    pub fn generate(&self) -> Result<(MetricGraph, InstanceMeta), InstanceError> {
        let (g, lengths, expected_optimum, expected_formula) = match *self {
            InstanceSpec::CircularU { n } => (gen_circular_undirected(n)?, None, None, None),
            InstanceSpec::CircularD { n } => (
                gen_circular_directed(n)?,
                None,
                Some(n as u64),
                Some("n (Hamiltonian cycle, lengths containing n)".to_string()),
            ),
            InstanceSpec::Tight { p, m } => {
                let t = gen_tight_family(p, m)?;
                (
                    t.graph,
                    Some(t.lengths.to_string()),
                    Some(t.expected_optimum),
                    Some("2M + 6p + 4".to_string()),
                )
            }
            InstanceSpec::RandomMetric { n, kind, seed, wmax } => (gen_random_metric(n, kind, seed, wmax)?, None, None, None),
        };
        let meta = InstanceMeta {
            spec: self.clone(),
            n: g.n(),
            lengths,
            expected_optimum,
            expected_formula,
        };
        Ok((g, meta))
    }
}

fn checked(mut g: MetricGraph) -> MetricGraph {
    g.verify_metric().expect("generator produces a metric");
    g
}

/// `w({i, j}) = min(j - i, n + i - j)`: distances along an n-cycle.
pub fn gen_circular_undirected(n: usize) -> Result<MetricGraph, InstanceError> {
    if n < 3 {
        return Err(InstanceError::BadParameters(format!("circular undirected needs n >= 3, got {n}")));
    }
    Ok(checked(MetricGraph::from_fn(n, GraphKind::Undirected, |i, j| {
        (j - i).min(n + i - j) as u64
    })))
}

/// `w(i, j) = (j - i) mod n`: clockwise distance on an n-cycle.
pub fn gen_circular_directed(n: usize) -> Result<MetricGraph, InstanceError> {
    if n < 2 {
        return Err(InstanceError::BadParameters(format!("circular directed needs n >= 2, got {n}")));
    }
    Ok(checked(MetricGraph::from_fn(n, GraphKind::Directed, |i, j| ((j + n - i) % n) as u64)))
}

/// The tight family, its cycle-length core and its optimum.
#[derive(Debug, Clone)]
pub struct TightInstance {
    pub graph: MetricGraph,
    /// `{4, 2p+2, 2p+4, ..., 4p+4}`.
    pub lengths: LSpec,
    pub expected_optimum: u64,
    pub p: u64,
    pub m: u64,
}

/// Builds the tight family on `4p + 4` vertices with unit `m` for the heavy
/// edges and 1 for the light ones.
///
/// Vertices 0..4 form the centre: light edges `0-1` and `2-3` plus heavy
/// `0-2` and `1-3` of weight `m + 1` give a 4-cycle of weight `2m + 4`. Each
/// of the `p` outer groups `{x, y, u, v}` is a 4-cycle `x-y-v-u` with edges
/// 1, 2, 1, 2. Half of the groups hang in two chains of weight-`m` edges
/// from vertex 0 and vertex 3 (`y` of one group to `x` of the next); the
/// other half hang from vertex 1 by single edges of weight `m + 1`. All
/// other weights are shortest-path distances.
///
/// The optimum uses the centre and the outer 4-cycles, `2m + 6p + 4`. The
/// constrained forest joins everything with the cheap chain edges, after
/// which the repair phases cannot avoid heavy edges.
pub fn gen_tight_family(p: u64, m: u64) -> Result<TightInstance, InstanceError> {
    if p == 0 || !p.is_multiple_of(2) {
        return Err(InstanceError::BadParameters(format!("p must be even and positive, got {p}")));
    }
    if m < 4 * p + 4 {
        return Err(InstanceError::BadParameters(format!("M must be at least 4p + 4 = {}, got {m}", 4 * p + 4)));
    }
    let groups = p as usize;
    let n = 4 + 4 * groups;
    let mut w = PartialWeights::new(n, GraphKind::Undirected);
    w.set(0, 1, 1);
    w.set(2, 3, 1);
    w.set(0, 2, m + 1);
    w.set(1, 3, m + 1);
    let group = |i: usize| {
        let b = 4 + 4 * i;
        (b, b + 1, b + 2, b + 3)
    };
    for i in 0..groups {
        let (x, y, u, v) = group(i);
        w.set(x, y, 1);
        w.set(u, v, 1);
        w.set(x, u, 2);
        w.set(y, v, 2);
    }
    let k = groups / 2;
    let left = k / 2;
    let right = k - left;
    let mut chain = |anchor: usize, members: std::ops::Range<usize>| {
        let mut prev = anchor;
        for i in members {
            let (x, y, _, _) = group(i);
            w.set(prev, x, m);
            prev = y;
        }
    };
    chain(0, 0..left);
    chain(3, left..k);
    debug_assert_eq!(k - left, right);
    for i in k..groups {
        let (x, _, _, _) = group(i);
        w.set(x, 1, m + 1);
    }
    let graph = metric_closure(&w).expect("tight family is connected");
    let mut core = vec![4];
    core.extend((p + 1..=2 * p + 2).map(|j| 2 * j));
    let lengths = LSpec::new(&core, LengthMode::Undirected).expect("valid core");
    Ok(TightInstance {
        graph,
        lengths,
        expected_optimum: 2 * m + 6 * p + 4,
        p,
        m,
    })
}

/// Uniform random weights in `1..=wmax`, replaced by shortest-path
/// distances. Deterministic in `seed`.
pub fn gen_random_metric(n: usize, kind: GraphKind, seed: u64, wmax: u64) -> Result<MetricGraph, InstanceError> {
    let min_n = if kind == GraphKind::Directed { 2 } else { 3 };
    if n < min_n {
        return Err(InstanceError::BadParameters(format!("random metric needs n >= {min_n}, got {n}")));
    }
    if wmax == 0 {
        return Err(InstanceError::BadParameters("wmax must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = PartialWeights::new(n, kind);
    for u in 0..n {
        for v in 0..n {
            if u == v || (kind == GraphKind::Undirected && v < u) {
                continue;
            }
            w.set(u, v, rng.gen_range(1..=wmax));
        }
    }
    Ok(metric_closure(&w).expect("complete table is connected"))
}
