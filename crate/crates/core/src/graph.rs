//! Complete weighted graphs, cycle covers and forests.
//!
//! Graph text format, one header line then the weights:
//!
//! ```text
//! U 4          D 3
//! 1 2 1        - 1 2
//! 1 2          2 - 1
//! 1            1 2 -
//! ```
//!
//! Undirected graphs list the upper triangle (row `i` holds `w(i, j)` for
//! `j > i`, so there are `n - 1` rows); directed graphs list all `n` rows with
//! `-` on the diagonal. Covers are written one cycle per line as
//! space-separated vertex ids.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::union_find::DisjointSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("cover kind does not match graph kind")]
    KindMismatch,
    #[error("vertex {0} is not covered exactly once")]
    NotACover(usize),
    #[error("cycle of length {0} is not allowed in this cover kind")]
    BadCycleLength(usize),
    #[error("defined edges do not connect all vertices")]
    Disconnected,
    #[error("weight sum overflows 64 bits")]
    Overflow,
    #[error("edge {0}-{1} would close a cycle")]
    ForestCycle(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphKind {
    Directed,
    Undirected,
}

/// A violated triangle `w(u, v) > w(u, x) + w(x, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleViolation {
    pub u: usize,
    pub x: usize,
    pub v: usize,
}

/// Complete graph on `0..n` with non-negative integer weights.
///
/// Undirected weights live in a packed upper triangle, so symmetry holds by
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricGraph {
    n: usize,
    kind: GraphKind,
    weights: Vec<u64>,
    metric_checked: bool,
}

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl MetricGraph {
    /// Builds a graph from a weight function; for undirected graphs `f` is
    /// only called with `u < v`.
    pub fn from_fn(n: usize, kind: GraphKind, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut weights = Vec::new();
        match kind {
            GraphKind::Undirected => {
                weights.reserve(n * n.saturating_sub(1) / 2);
                for u in 0..n {
                    for v in u + 1..n {
                        weights.push(f(u, v));
                    }
                }
            }
            GraphKind::Directed => {
                weights.reserve(n * n);
                for u in 0..n {
                    for v in 0..n {
                        weights.push(if u == v { 0 } else { f(u, v) });
                    }
                }
            }
        }
        MetricGraph {
            n,
            kind,
            weights,
            metric_checked: false,
        }
    }

    pub fn uniform(n: usize, kind: GraphKind, w: u64) -> Self {
        Self::from_fn(n, kind, |_, _| w)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn metric_checked(&self) -> bool {
        self.metric_checked
    }

    /// Weight of the edge `{u, v}` or arc `(u, v)`; `u != v`.
    #[inline]
    pub fn w(&self, u: usize, v: usize) -> u64 {
        debug_assert!(u != v && u < self.n && v < self.n);
        match self.kind {
            GraphKind::Undirected => self.weights[tri_index(self.n, u, v)],
            GraphKind::Directed => self.weights[u * self.n + v],
        }
    }

    /// Exact triangle-inequality scan over all distinct `(u, x, v)` in
    /// lexicographic order. Marks the graph as checked on success.
    pub fn verify_metric(&mut self) -> Result<(), TriangleViolation> {
        if let Some(bad) = self.first_violation() {
            return Err(bad);
        }
        self.metric_checked = true;
        Ok(())
    }

    fn first_violation(&self) -> Option<TriangleViolation> {
        let n = self.n;
        for u in 0..n {
            for x in 0..n {
                if x == u {
                    continue;
                }
                let ux = self.w(u, x);
                for v in 0..n {
                    if v == u || v == x {
                        continue;
                    }
                    if self.w(u, v) as u128 > ux as u128 + self.w(x, v) as u128 {
                        return Some(TriangleViolation { u, x, v });
                    }
                }
            }
        }
        None
    }

    /// Shortest-path closure of this graph's own weights.
    pub fn closure(&self) -> MetricGraph {
        let mut partial = PartialWeights::new(self.n, self.kind);
        for u in 0..self.n {
            for v in 0..self.n {
                if u != v {
                    partial.table[u * self.n + v] = Some(self.w(u, v));
                }
            }
        }
        metric_closure(&partial).expect("complete graphs are connected")
    }

    /// The undirected graph with `w_U({u, v}) = w(u, v) + w(v, u)`.
    pub fn to_undirected(&self) -> Result<MetricGraph, GraphError> {
        if self.kind != GraphKind::Directed {
            return Err(GraphError::KindMismatch);
        }
        let mut overflow = false;
        let mut out = MetricGraph::from_fn(self.n, GraphKind::Undirected, |u, v| {
            self.w(u, v).checked_add(self.w(v, u)).unwrap_or_else(|| {
                overflow = true;
                0
            })
        });
        if overflow {
            return Err(GraphError::Overflow);
        }
        // Sum of two triangle inequalities.
        out.metric_checked = self.metric_checked;
        Ok(out)
    }

    /// Total weight of a cycle cover; 2-cycles count their edge twice.
    pub fn cover_weight(&self, cover: &CycleCover) -> Result<u64, GraphError> {
        let compatible = matches!(
            (self.kind, cover.kind),
            (GraphKind::Directed, CoverKind::Directed)
                | (GraphKind::Undirected, CoverKind::Undirected)
                | (GraphKind::Undirected, CoverKind::UndirectedWith2Cycles)
        );
        if !compatible {
            return Err(GraphError::KindMismatch);
        }
        cover.validate(self.n)?;
        cover
            .cycles
            .iter()
            .try_fold(0u64, |acc, c| acc.checked_add(self.cycle_weight(c)?).ok_or(GraphError::Overflow))
    }

    /// Weight of a closed walk given by its vertex sequence.
    pub fn cycle_weight(&self, cycle: &[usize]) -> Result<u64, GraphError> {
        let k = cycle.len();
        (0..k).try_fold(0u64, |acc, i| {
            acc.checked_add(self.w(cycle[i], cycle[(i + 1) % k]))
                .ok_or(GraphError::Overflow)
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let tag = match self.kind {
            GraphKind::Undirected => 'U',
            GraphKind::Directed => 'D',
        };
        writeln!(out, "{tag} {}", self.n).unwrap();
        match self.kind {
            GraphKind::Undirected => {
                for u in 0..self.n.saturating_sub(1) {
                    let row: Vec<String> = (u + 1..self.n).map(|v| self.w(u, v).to_string()).collect();
                    writeln!(out, "{}", row.join(" ")).unwrap();
                }
            }
            GraphKind::Directed => {
                for u in 0..self.n {
                    let row: Vec<String> = (0..self.n)
                        .map(|v| if u == v { "-".to_string() } else { self.w(u, v).to_string() })
                        .collect();
                    writeln!(out, "{}", row.join(" ")).unwrap();
                }
            }
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<MetricGraph, GraphError> {
        let bad = |msg: String| GraphError::Parse(msg);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("missing header".into()))?;
        let mut head = header.split_whitespace();
        let kind = match head.next() {
            Some("U") => GraphKind::Undirected,
            Some("D") => GraphKind::Directed,
            other => return Err(bad(format!("unknown kind {other:?}"))),
        };
        let n: usize = head
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("missing vertex count".into()))?;
        if head.next().is_some() {
            return Err(bad("trailing tokens in header".into()));
        }
        let rows = match kind {
            GraphKind::Undirected => n.saturating_sub(1),
            GraphKind::Directed => n,
        };
        let mut weights = Vec::new();
        for r in 0..rows {
            let line = lines.next().ok_or_else(|| bad(format!("missing row {r}")))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            let expect = match kind {
                GraphKind::Undirected => n - r - 1,
                GraphKind::Directed => n,
            };
            if toks.len() != expect {
                return Err(bad(format!("row {r}: expected {expect} entries, got {}", toks.len())));
            }
            for (c, tok) in toks.iter().enumerate() {
                if kind == GraphKind::Directed && c == r {
                    if *tok != "-" {
                        return Err(bad(format!("row {r}: diagonal must be '-'")));
                    }
                    weights.push(0);
                    continue;
                }
                weights.push(tok.parse::<u64>().map_err(|_| bad(format!("row {r}: bad weight {tok:?}")))?);
            }
        }
        if lines.next().is_some() {
            return Err(bad("trailing rows".into()));
        }
        Ok(MetricGraph {
            n,
            kind,
            weights,
            metric_checked: false,
        })
    }
}

/// A weight table in which some entries may be absent.
#[derive(Debug, Clone)]
pub struct PartialWeights {
    n: usize,
    kind: GraphKind,
    table: Vec<Option<u64>>,
}

impl PartialWeights {
    pub fn new(n: usize, kind: GraphKind) -> Self {
        PartialWeights {
            n,
            kind,
            table: vec![None; n * n],
        }
    }

    /// Defines `w(u, v)`; undirected tables set both directions.
    pub fn set(&mut self, u: usize, v: usize, w: u64) {
        assert!(u != v, "self-loops are not allowed");
        self.table[u * self.n + v] = Some(w);
        if self.kind == GraphKind::Undirected {
            self.table[v * self.n + u] = Some(w);
        }
    }

    pub fn get(&self, u: usize, v: usize) -> Option<u64> {
        self.table[u * self.n + v]
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Fills every entry with its shortest-path distance (Floyd-Warshall). The
/// result satisfies the triangle inequality by construction and is marked
/// as checked.
pub fn metric_closure(partial: &PartialWeights) -> Result<MetricGraph, GraphError> {
    let n = partial.n;
    let mut dist: Vec<u64> = partial.table.iter().map(|w| w.unwrap_or(u64::MAX)).collect();
    for i in 0..n {
        dist[i * n + i] = 0;
    }
    for k in 0..n {
        for i in 0..n {
            let ik = dist[i * n + k];
            if ik == u64::MAX {
                continue;
            }
            for j in 0..n {
                let kj = dist[k * n + j];
                if kj == u64::MAX {
                    continue;
                }
                let via = ik.checked_add(kj).ok_or(GraphError::Overflow)?;
                if via < dist[i * n + j] {
                    dist[i * n + j] = via;
                }
            }
        }
    }
    if dist.contains(&u64::MAX) {
        return Err(GraphError::Disconnected);
    }
    let mut g = MetricGraph::from_fn(n, partial.kind, |u, v| dist[u * n + v]);
    g.metric_checked = true;
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoverKind {
    Directed,
    Undirected,
    /// Undirected, with a 2-cycle meaning an edge taken twice.
    UndirectedWith2Cycles,
}

impl CoverKind {
    pub fn min_cycle_len(self) -> usize {
        match self {
            CoverKind::Undirected => 3,
            CoverKind::Directed | CoverKind::UndirectedWith2Cycles => 2,
        }
    }
}

/// Vertex-disjoint cycles, each stored as its cyclic vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCover {
    pub cycles: Vec<Vec<usize>>,
    pub kind: CoverKind,
}

impl CycleCover {
    pub fn new(cycles: Vec<Vec<usize>>, kind: CoverKind) -> Self {
        CycleCover { cycles, kind }
    }

    /// Every vertex of `0..n` lies on exactly one cycle, once, and every
    /// cycle is long enough for the cover kind.
    pub fn validate(&self, n: usize) -> Result<(), GraphError> {
        let mut seen = vec![false; n];
        for c in &self.cycles {
            if c.len() < self.kind.min_cycle_len() {
                return Err(GraphError::BadCycleLength(c.len()));
            }
            for &v in c {
                if v >= n || seen[v] {
                    return Err(GraphError::NotACover(v));
                }
                seen[v] = true;
            }
        }
        match seen.iter().position(|&s| !s) {
            Some(v) => Err(GraphError::NotACover(v)),
            None => Ok(()),
        }
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }

    /// Forgets orientation: the same cycles read as undirected, with
    /// antiparallel pairs becoming doubled edges.
    pub fn lifted(&self) -> CycleCover {
        CycleCover {
            cycles: self.cycles.clone(),
            kind: CoverKind::UndirectedWith2Cycles,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cycles {
            let row: Vec<String> = c.iter().map(usize::to_string).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }

    pub fn parse_text(text: &str, kind: CoverKind) -> Result<CycleCover, GraphError> {
        let cycles = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| GraphError::Parse(format!("bad vertex {t:?}"))))
                    .collect()
            })
            .collect::<Result<Vec<Vec<usize>>, _>>()?;
        Ok(CycleCover { cycles, kind })
    }
}

/// Undirected acyclic edge set on `0..n` with component bookkeeping.
#[derive(Debug, Clone)]
pub struct Forest {
    n: usize,
    edges: Vec<(usize, usize)>,
    dsu: DisjointSet,
}

impl Forest {
    pub fn new(n: usize) -> Self {
        Forest {
            n,
            edges: Vec::new(),
            dsu: DisjointSet::new(n),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut f = Forest::new(n);
        for &(u, v) in edges {
            if !f.add_edge(u, v) {
                return Err(GraphError::ForestCycle(u, v));
            }
        }
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `{u, v}` unless it would close a cycle; reports whether it did.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if self.dsu.union(u, v).is_none() {
            return false;
        }
        self.edges.push((u.min(v), u.max(v)));
        true
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn connected(&mut self, u: usize, v: usize) -> bool {
        self.dsu.find(u) == self.dsu.find(v)
    }

    pub fn component_size(&mut self, v: usize) -> usize {
        self.dsu.size_of(v)
    }

    /// Root of the component holding `v`.
    pub fn root(&mut self, v: usize) -> usize {
        self.dsu.find(v)
    }

    /// Vertex sets of all components, each ascending, ordered by smallest
    /// vertex.
    pub fn components(&mut self) -> Vec<Vec<usize>> {
        let mut slot = vec![usize::MAX; self.n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for v in 0..self.n {
            let r = self.dsu.find(v);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(v);
        }
        out
    }

    pub fn component_sizes(&mut self) -> Vec<usize> {
        self.components().iter().map(Vec::len).collect()
    }

    pub fn weight(&self, g: &MetricGraph) -> Result<u64, GraphError> {
        self.edges
            .iter()
            .try_fold(0u64, |acc, &(u, v)| acc.checked_add(g.w(u, v)).ok_or(GraphError::Overflow))
    }

    /// Adjacency lists, each sorted ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj.iter_mut().for_each(|a| a.sort_unstable());
        adj
    }
}
