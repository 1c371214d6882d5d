//! Exact solvers for small instances.
//!
//! Both solvers precompute a value for every vertex subset (best Hamiltonian
//! cycle via Held-Karp, or minimum spanning tree) and then combine subsets
//! with a dynamic program over set partitions: the block holding the lowest
//! remaining vertex is chosen first, so every partition is visited once.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CoverKind, CycleCover, Forest, GraphError, GraphKind, MetricGraph};
use crate::lset::LSpec;

pub const DEFAULT_CAP: usize = 12;
/// Hard ceiling regardless of configuration; subset tables grow as `2^n`.
const MAX_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} vertices exceed the oracle cap")]
    TooLarge(usize),
    #[error("{0} vertices cannot be covered by permitted cycle lengths")]
    NotAdmissible(usize),
    #[error("no partition satisfies the feasibility rule")]
    Infeasible,
    #[error("forest oracle needs an undirected graph")]
    NotUndirected,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    Min,
    Max,
}

/// Which cycle lengths an exact cover may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LengthRule {
    /// Only lengths in the set itself.
    Exact,
    /// Any length in the additive closure of the set.
    Closure,
}

/// Which component sizes an exact forest may have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Feasibility {
    /// Divisible by the gcd of the set.
    ModG,
    /// In the additive closure of the set.
    Closure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub cap: usize,
}

impl OracleConfig {
    /// Default cap, overridden by `LCC_ORACLE_CAP` when it parses.
    pub fn from_env() -> Self {
        static CAP: OnceLock<usize> = OnceLock::new();
        let cap = *CAP.get_or_init(|| {
            std::env::var("LCC_ORACLE_CAP")
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .unwrap_or(DEFAULT_CAP)
        });
        OracleConfig { cap }
    }

    pub fn with_cap(cap: usize) -> Self {
        OracleConfig { cap }
    }

    fn check(&self, n: usize) -> Result<(), OracleError> {
        if n > self.cap.min(MAX_CAP) {
            return Err(OracleError::TooLarge(n));
        }
        Ok(())
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { cap: DEFAULT_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult<W> {
    pub weight: u64,
    pub witness: W,
    /// Number of (subset, block) combinations examined.
    pub explored: u64,
}

const NONE: u64 = u64::MAX;

fn better(obj: Objective, a: u64, b: u64) -> bool {
    b == NONE || (a != NONE && if obj == Objective::Min { a < b } else { a > b })
}

/// Best closed tour through each subset of size at least 2, as
/// `(weight, order)` tables indexed by bitmask. Tours start at the lowest
/// vertex of the subset.
struct TourTable {
    weight: Vec<u64>,
    last: Vec<u8>,
    prev: Vec<u8>,
    n: usize,
}

impl TourTable {
    fn build(g: &MetricGraph, obj: Objective, wanted: impl Fn(usize) -> bool) -> Result<Self, OracleError> {
        let n = g.n();
        let full = 1usize << n;
        // path[mask * n + v]: best path from lowest(mask) through mask ending in v
        let mut path = vec![NONE; full * n];
        let mut prev = vec![u8::MAX; full * n];
        for s in 0..n {
            path[(1 << s) * n + s] = 0;
        }
        let max_wanted = (1..=n).filter(|&k| wanted(k)).max().unwrap_or(0);
        for mask in 1..full {
            if mask.count_ones() as usize >= max_wanted {
                continue;
            }
            let start = mask.trailing_zeros() as usize;
            for v in 0..n {
                let cur = path[mask * n + v];
                if cur == NONE {
                    continue;
                }
                // only extend with vertices above the start
                for u in start + 1..n {
                    if mask & (1 << u) != 0 {
                        continue;
                    }
                    let cand = cur.checked_add(g.w(v, u)).ok_or(GraphError::Overflow)?;
                    let slot = (mask | 1 << u) * n + u;
                    if better(obj, cand, path[slot]) {
                        path[slot] = cand;
                        prev[slot] = v as u8;
                    }
                }
            }
        }
        let mut weight = vec![NONE; full];
        let mut last = vec![u8::MAX; full];
        for mask in 1..full {
            let size = mask.count_ones() as usize;
            if size < 2 || !wanted(size) {
                continue;
            }
            let start = mask.trailing_zeros() as usize;
            for v in start + 1..n {
                let cur = path[mask * n + v];
                if mask & (1 << v) == 0 || cur == NONE {
                    continue;
                }
                let cand = cur.checked_add(g.w(v, start)).ok_or(GraphError::Overflow)?;
                if better(obj, cand, weight[mask]) {
                    weight[mask] = cand;
                    last[mask] = v as u8;
                }
            }
        }
        Ok(TourTable {
            weight,
            last,
            prev,
            n,
        })
    }

    fn tour(&self, mask: usize) -> Vec<usize> {
        let mut order = Vec::new();
        let mut m = mask;
        let mut v = self.last[mask] as usize;
        loop {
            order.push(v);
            let p = self.prev[m * self.n + v];
            if p == u8::MAX {
                break;
            }
            m &= !(1 << v);
            v = p as usize;
        }
        debug_assert_eq!(m.count_ones(), 1);
        order.reverse();
        order
    }
}

/// Partition DP: `best[mask]` combines the block through the lowest vertex
/// of `mask` with the best answer for the rest.
fn partition_dp(n: usize, obj: Objective, block: &[u64]) -> (Vec<u64>, Vec<usize>, u64) {
    let full = 1usize << n;
    let mut best = vec![NONE; full];
    let mut choice = vec![0usize; full];
    let mut explored = 0u64;
    best[0] = 0;
    for mask in 1..full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // enumerate blocks = low | sub for sub ⊆ rest
        let mut sub = rest;
        loop {
            let b = low | sub;
            if block[b] != NONE && best[mask ^ b] != NONE {
                explored += 1;
                let cand = best[mask ^ b].saturating_add(block[b]);
                if better(obj, cand, best[mask]) {
                    best[mask] = cand;
                    choice[mask] = b;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    (best, choice, explored)
}

fn blocks_of(choice: &[usize], full: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut mask = full;
    while mask != 0 {
        out.push(choice[mask]);
        mask ^= choice[mask];
    }
    out
}

/// Optimum cycle cover whose lengths follow `rule`.
///
/// Length-2 cycles are used only when 2 is an allowed length; on an
/// undirected graph they count their edge twice.
pub fn exact_cover(
    g: &MetricGraph,
    spec: &LSpec,
    objective: Objective,
    rule: LengthRule,
    config: &OracleConfig,
) -> Result<OracleResult<CycleCover>, OracleError> {
    let n = g.n();
    config.check(n)?;
    if n == 0 || !spec.in_closure(n as u64) {
        return Err(OracleError::NotAdmissible(n));
    }
    let allowed = |k: usize| match rule {
        LengthRule::Exact => spec.contains(k as u64),
        LengthRule::Closure => spec.in_closure(k as u64),
    };
    let tours = TourTable::build(g, objective, allowed)?;
    let (best, choice, explored) = partition_dp(n, objective, &tours.weight);
    let full = (1usize << n) - 1;
    if best[full] == NONE {
        return Err(OracleError::NotAdmissible(n));
    }
    let cycles: Vec<Vec<usize>> = blocks_of(&choice, full).into_iter().map(|b| tours.tour(b)).collect();
    let kind = match g.kind() {
        GraphKind::Directed => CoverKind::Directed,
        GraphKind::Undirected if cycles.iter().any(|c| c.len() == 2) => CoverKind::UndirectedWith2Cycles,
        GraphKind::Undirected => CoverKind::Undirected,
    };
    let cover = CycleCover::new(cycles, kind);
    cover.validate(n)?;
    let weight = g.cover_weight(&cover)?;
    assert_eq!(weight, best[full], "witness weight disagrees with table");
    Ok(OracleResult {
        weight,
        witness: cover,
        explored,
    })
}

/// Prim's algorithm on the subgraph induced by `mask`.
fn mst_of(g: &MetricGraph, mask: usize) -> (u64, Vec<(usize, usize)>) {
    let verts: Vec<usize> = (0..g.n()).filter(|&v| mask & (1 << v) != 0).collect();
    let k = verts.len();
    let mut in_tree = vec![false; k];
    let mut dist = vec![(u64::MAX, 0usize); k];
    let mut total = 0u64;
    let mut edges = Vec::with_capacity(k.saturating_sub(1));
    if k == 0 {
        return (0, edges);
    }
    dist[0] = (0, 0);
    for _ in 0..k {
        let i = (0..k).filter(|&i| !in_tree[i]).min_by_key(|&i| dist[i].0).expect("vertex left");
        in_tree[i] = true;
        if i != 0 {
            total += dist[i].0;
            edges.push((verts[dist[i].1], verts[i]));
        }
        for j in 0..k {
            if !in_tree[j] {
                let w = g.w(verts[i], verts[j]);
                if w < dist[j].0 {
                    dist[j] = (w, i);
                }
            }
        }
    }
    (total, edges)
}

/// Minimum-weight forest whose component sizes satisfy `feasibility`.
pub fn exact_feasible_forest(
    g: &MetricGraph,
    spec: &LSpec,
    feasibility: Feasibility,
    config: &OracleConfig,
) -> Result<OracleResult<Forest>, OracleError> {
    if g.kind() != GraphKind::Undirected {
        return Err(OracleError::NotUndirected);
    }
    let n = g.n();
    config.check(n)?;
    let ok = |k: usize| match feasibility {
        Feasibility::ModG => (k as u64).is_multiple_of(spec.g()),
        Feasibility::Closure => spec.in_closure(k as u64),
    };
    let full = 1usize << n;
    let mut block = vec![NONE; full];
    for (mask, slot) in block.iter_mut().enumerate().skip(1) {
        if ok(mask.count_ones() as usize) {
            *slot = mst_of(g, mask).0;
        }
    }
    let (best, choice, explored) = partition_dp(n, Objective::Min, &block);
    if best[full - 1] == NONE {
        return Err(OracleError::Infeasible);
    }
    let mut forest = Forest::new(n);
    for b in blocks_of(&choice, full - 1) {
        for (u, v) in mst_of(g, b).1 {
            forest.add_edge(u, v);
        }
    }
    let weight = forest.weight(g)?;
    assert_eq!(weight, best[full - 1], "witness weight disagrees with table");
    assert!(forest.component_sizes().into_iter().all(ok));
    Ok(OracleResult {
        weight,
        witness: forest,
        explored,
    })
}
