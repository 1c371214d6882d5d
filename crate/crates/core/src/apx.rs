//! Approximation pipelines for restricted cycle covers and the two cycle
//! refinement procedures.
//!
//! [`apx_undir`] runs the constrained forest algorithm, then repairs
//! components whose size is not a sum of permitted lengths by repeatedly
//! attaching each such component's lightest outgoing edge. Each repaired
//! component is doubled, walked as an Euler tour, shortcut into a Hamiltonian
//! cycle and finally cut into paths of permitted sizes whose endpoints are
//! joined. [`apx_dir`] reduces a directed instance to an undirected one with
//! 2-cycles and orients the result.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CoverKind, CycleCover, Forest, GraphError, GraphKind, MetricGraph};
use crate::gw_forest::{gw_run, GwError};
use crate::lset::{LSetError, LSpec, SCore};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApxError {
    #[error("{0} vertices cannot be covered by permitted cycle lengths")]
    NotAdmissible(usize),
    #[error("graph has not been verified to be metric")]
    NotMetricChecked,
    #[error("graph kind does not fit this algorithm")]
    KindMismatch,
    #[error("length 2 needs 2-cycle mode")]
    TwoCyclesNotAllowed,
    #[error("cycle of length {0} cannot be refined into core lengths")]
    NotRefinable(usize),
    #[error("no decomposition for cycle length {0}")]
    DecomposerUndefined(usize),
    #[error(transparent)]
    Forest(#[from] GwError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One repair phase: which components were illegal, which lightest edges
/// they picked and what the forest looked like afterwards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub illegal_sizes: Vec<usize>,
    /// Lightest outgoing edge of each illegal component, in component order
    /// (the same edge may appear twice).
    pub chosen: Vec<(usize, usize)>,
    /// Chosen edges skipped because they would close a cycle.
    pub discarded: Vec<(usize, usize)>,
    pub sizes_after: Vec<usize>,
    pub weight_before: u64,
    pub weight_after: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTrace {
    pub forest_weight: u64,
    pub forest_sizes: Vec<usize>,
    pub phases: Vec<PhaseRecord>,
    pub final_weight: u64,
    /// Edges of the repaired forest.
    pub final_edges: Vec<(usize, usize)>,
}

impl PhaseTrace {
    pub fn phase_count(&self) -> usize {
        self.phases.len()
    }

    /// One JSON object per phase.
    pub fn to_jsonl(&self) -> String {
        self.phases
            .iter()
            .map(|p| serde_json::to_string(p).expect("plain struct") + "\n")
            .collect()
    }
}

fn edge_order(g: &MetricGraph, e: (usize, usize)) -> (u64, usize, usize) {
    (g.w(e.0, e.1), e.0.min(e.1), e.0.max(e.1))
}

/// Lightest edge leaving `comp`, ties broken by `(weight, min end, max end)`.
fn lightest_boundary_edge(g: &MetricGraph, comp: &[usize], owner: &[usize], id: usize) -> Option<(usize, usize)> {
    let mut best: Option<(u64, usize, usize)> = None;
    for &u in comp {
        for (v, &o) in owner.iter().enumerate() {
            if o == id {
                continue;
            }
            let key = edge_order(g, (u, v));
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
    }
    best.map(|(_, a, b)| (a, b))
}

/// Grows the forest until every component size is in the closure of `spec`.
fn repair_phases(g: &MetricGraph, spec: &LSpec, forest: &mut Forest) -> Result<Vec<PhaseRecord>, ApxError> {
    let mut phases = Vec::new();
    loop {
        let comps = forest.components();
        let mut owner = vec![0usize; g.n()];
        for (id, c) in comps.iter().enumerate() {
            for &v in c {
                owner[v] = id;
            }
        }
        let illegal: Vec<usize> = (0..comps.len())
            .filter(|&i| !spec.in_closure(comps[i].len() as u64))
            .collect();
        if illegal.is_empty() {
            return Ok(phases);
        }
        let weight_before = forest.weight(g)?;
        let chosen: Vec<(usize, usize)> = illegal
            .iter()
            .map(|&i| lightest_boundary_edge(g, &comps[i], &owner, i).ok_or(ApxError::NotAdmissible(g.n())))
            .collect::<Result<_, _>>()?;
        let mut ordered = chosen.clone();
        ordered.sort_by_key(|&e| edge_order(g, e));
        ordered.dedup();
        let mut discarded = Vec::new();
        for e in ordered {
            if !forest.add_edge(e.0, e.1) {
                discarded.push(e);
            }
        }
        phases.push(PhaseRecord {
            illegal_sizes: illegal.iter().map(|&i| comps[i].len()).collect(),
            chosen,
            discarded,
            sizes_after: forest.component_sizes(),
            weight_before,
            weight_after: forest.weight(g)?,
        });
    }
}

/// Walks the doubled tree spanning `root`'s component as an Euler tour
/// (neighbours in ascending order) and keeps first visits only.
fn shortcut_tour(adj: &[Vec<usize>], root: usize) -> Vec<usize> {
    let mut order = vec![root];
    let mut seen = std::collections::HashSet::from([root]);
    // (vertex, parent, next neighbour index)
    let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
    while let Some(top) = stack.last_mut() {
        let (v, parent, idx) = *top;
        if idx == adj[v].len() {
            stack.pop();
            continue;
        }
        top.2 += 1;
        let next = adj[v][idx];
        if next == parent {
            continue;
        }
        if seen.insert(next) {
            order.push(next);
        }
        stack.push((next, v, 0));
    }
    order
}

/// Cuts `cycle` into consecutive blocks of sizes `parts` and closes each
/// block, scanning all rotations and keeping the one whose total cover weight
/// is smallest (`minimise`) or largest. Ties keep the earliest rotation.
fn split_cycle(g: &MetricGraph, cycle: &[usize], parts: &[u64], minimise: bool) -> Result<Vec<Vec<usize>>, GraphError> {
    let s = cycle.len();
    if parts.len() <= 1 {
        return Ok(vec![cycle.to_vec()]);
    }
    let at = |i: usize| cycle[i % s];
    // prefix[i] = weight of the walk at(0) .. at(i)
    let mut prefix = vec![0u64; 2 * s];
    for i in 1..2 * s {
        prefix[i] = prefix[i - 1].checked_add(g.w(at(i - 1), at(i))).ok_or(GraphError::Overflow)?;
    }
    let mut offsets = Vec::with_capacity(parts.len());
    let mut acc = 0usize;
    for &p in parts {
        offsets.push(acc);
        acc += p as usize;
    }
    debug_assert_eq!(acc, s);

    let mut best: Option<(u64, usize)> = None;
    for r in 0..s {
        let mut total = 0u64;
        for (&off, &p) in offsets.iter().zip(parts) {
            let first = r + off;
            let last = first + p as usize - 1;
            let block = prefix[last] - prefix[first] + g.w(at(last), at(first));
            total = total.checked_add(block).ok_or(GraphError::Overflow)?;
        }
        let better = match best {
            None => true,
            Some((b, _)) => (minimise && total < b) || (!minimise && total > b),
        };
        if better {
            best = Some((total, r));
        }
    }
    let (_, r) = best.expect("cycle is non-empty");
    Ok(offsets
        .iter()
        .zip(parts)
        .map(|(&off, &p)| (0..p as usize).map(|i| at(r + off + i)).collect())
        .collect())
}

/// Approximates a minimum-weight cover of an undirected metric graph by
/// cycles whose lengths lie in `spec`.
///
/// With `allow_2cycles`, a length 2 in `spec` means an edge taken twice.
pub fn apx_undir(g: &MetricGraph, spec: &LSpec, allow_2cycles: bool) -> Result<(CycleCover, PhaseTrace), ApxError> {
    if g.kind() != GraphKind::Undirected {
        return Err(ApxError::KindMismatch);
    }
    if !g.metric_checked() {
        return Err(ApxError::NotMetricChecked);
    }
    if spec.contains(2) && !allow_2cycles {
        return Err(ApxError::TwoCyclesNotAllowed);
    }
    let n = g.n();
    if n == 0 || !spec.in_closure(n as u64) {
        return Err(ApxError::NotAdmissible(n));
    }

    let mut forest = gw_run(g, spec)?.forest;
    let forest_weight = forest.weight(g)?;
    let forest_sizes = forest.component_sizes();
    let phases = repair_phases(g, spec, &mut forest)?;

    let adj = forest.adjacency();
    let mut cycles = Vec::new();
    for comp in forest.components() {
        let tour = shortcut_tour(&adj, comp[0]);
        debug_assert_eq!(tour.len(), comp.len());
        let parts = spec
            .partition_of(tour.len() as u64)
            .map_err(|_| ApxError::NotAdmissible(n))?;
        cycles.extend(split_cycle(g, &tour, &parts, true)?);
    }
    let kind = if allow_2cycles {
        CoverKind::UndirectedWith2Cycles
    } else {
        CoverKind::Undirected
    };
    let trace = PhaseTrace {
        forest_weight,
        forest_sizes,
        phases,
        final_weight: forest.weight(g)?,
        final_edges: forest.edges().to_vec(),
    };
    Ok((CycleCover::new(cycles, kind), trace))
}

/// Rotates `cycle` to start at its smallest vertex.
fn canonical_start(cycle: &[usize]) -> Vec<usize> {
    let pos = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap_or(0);
    cycle[pos..].iter().chain(&cycle[..pos]).copied().collect()
}

/// Orients an undirected cycle the cheaper way round; on a tie the cycle
/// starts at its smallest vertex and heads to the smaller neighbour.
pub fn orient_cycle(g: &MetricGraph, cycle: &[usize]) -> Result<Vec<usize>, GraphError> {
    let fwd = canonical_start(cycle);
    let mut back = fwd.clone();
    back[1..].reverse();
    let (wf, wb) = (g.cycle_weight(&fwd)?, g.cycle_weight(&back)?);
    Ok(match wf.cmp(&wb) {
        std::cmp::Ordering::Less => fwd,
        std::cmp::Ordering::Greater => back,
        std::cmp::Ordering::Equal => {
            if fwd.len() < 2 || fwd[1] <= back[1] {
                fwd
            } else {
                back
            }
        }
    })
}

/// Directed approximation: solve the symmetrised instance with 2-cycles
/// allowed, then orient each cycle.
pub fn apx_dir(g: &MetricGraph, spec: &LSpec) -> Result<(CycleCover, PhaseTrace), ApxError> {
    if g.kind() != GraphKind::Directed {
        return Err(ApxError::KindMismatch);
    }
    if !g.metric_checked() {
        return Err(ApxError::NotMetricChecked);
    }
    let n = g.n();
    if n == 0 || !spec.in_closure(n as u64) {
        return Err(ApxError::NotAdmissible(n));
    }
    let gu = g.to_undirected()?;
    let (undirected, trace) = apx_undir(&gu, spec, true)?;
    let cycles = undirected
        .cycles
        .iter()
        .map(|c| orient_cycle(g, c))
        .collect::<Result<_, _>>()?;
    Ok((CycleCover::new(cycles, CoverKind::Directed), trace))
}

/// Splits every cycle whose length is not in `core` into cycles of core
/// lengths. On a metric graph each closing edge costs at most the path it
/// replaces, so the weight at most doubles.
pub fn refine_min(g: &MetricGraph, cover: &CycleCover, core: &LSpec) -> Result<CycleCover, ApxError> {
    if !g.metric_checked() {
        return Err(ApxError::NotMetricChecked);
    }
    cover.validate(g.n())?;
    let mut cycles = Vec::with_capacity(cover.cycles.len());
    for c in &cover.cycles {
        if core.contains(c.len() as u64) {
            cycles.push(c.clone());
            continue;
        }
        let parts = core
            .partition_of(c.len() as u64)
            .map_err(|_| ApxError::NotRefinable(c.len()))?;
        if parts.contains(&2) && cover.kind == CoverKind::Undirected {
            return Err(ApxError::NotRefinable(c.len()));
        }
        cycles.extend(split_cycle(g, c, &parts, true)?);
    }
    Ok(CycleCover::new(cycles, cover.kind))
}

/// Splits every cycle whose length was dropped from the core using the
/// core's decomposer, keeping the rotation that loses least weight. At most
/// `len / s` edges are cut per cycle, so at least `1 - 1/s` of the weight
/// survives. No metric is needed.
pub fn refine_max(g: &MetricGraph, cover: &CycleCover, core: &SCore) -> Result<CycleCover, ApxError> {
    cover.validate(g.n())?;
    let mut cycles = Vec::with_capacity(cover.cycles.len());
    for c in &cover.cycles {
        if core.core().contains(c.len() as u64) {
            cycles.push(c.clone());
            continue;
        }
        let parts = core.decompose(c.len() as u64).map_err(|e| match e {
            LSetError::DecomposerUndefined(len) => ApxError::DecomposerUndefined(len as usize),
            _ => ApxError::DecomposerUndefined(c.len()),
        })?;
        cycles.extend(split_cycle(g, c, &parts, false)?);
    }
    Ok(CycleCover::new(cycles, cover.kind))
}
