//! Primal-dual constrained forest for the proper function
//! `f(S) = 1 iff |S| is not divisible by g`.
//!
//! Every component whose size is not a multiple of `g` is active and its dual
//! grows at unit rate. When an edge between two components becomes tight the
//! components merge. Once no component is active, selected edges are pruned in
//! reverse order whenever both sides of the split stay divisible by `g`.
//! Edges that go tight at the same moment are taken with active-active pairs
//! first, then by `(weight, min endpoint, max endpoint)`.
//!
//! With integer weights every event time is a multiple of 1/2 and every
//! vertex's accumulated inactive time is an integer, so times are kept as
//! `2T` in `i64` and nothing is rounded.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Forest, GraphKind, MetricGraph};
use crate::lset::LSpec;
use crate::radix_queue::RadixQueue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GwError {
    #[error("vertex count {n} is not divisible by {g}")]
    NotDivisible { n: usize, g: u64 },
    #[error("constrained forests need an undirected graph")]
    NotUndirected,
    #[error("edge weight {0} exceeds {MAX_WEIGHT}")]
    WeightTooLarge(u64),
}

/// Largest edge weight accepted, so that doubled event times fit in `i64`.
pub const MAX_WEIGHT: u64 = 1 << 40;

/// One tight-edge merge, with the time stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeEvent {
    pub time2: i64,
    pub u: usize,
    pub v: usize,
    pub weight: u64,
}

#[derive(Debug, Clone)]
pub struct GwOutcome {
    /// The pruned forest.
    pub forest: Forest,
    /// Merge events in the order they happened (before pruning).
    pub events: Vec<MergeEvent>,
    /// Twice the total dual value; a lower bound on twice the optimum.
    pub dual_sum2: u64,
}

impl GwOutcome {
    /// Merge events as JSON lines, for debugging.
    pub fn events_jsonl(&self) -> String {
        self.events
            .iter()
            .map(|e| serde_json::to_string(e).expect("plain struct") + "\n")
            .collect()
    }
}

fn check_input(g: &MetricGraph, modulus: u64) -> Result<(), GwError> {
    if g.kind() != GraphKind::Undirected {
        return Err(GwError::NotUndirected);
    }
    if !(g.n() as u64).is_multiple_of(modulus) {
        return Err(GwError::NotDivisible { n: g.n(), g: modulus });
    }
    let heaviest = (0..g.n()).flat_map(|u| (u + 1..g.n()).map(move |v| g.w(u, v))).max();
    match heaviest {
        Some(w) if w > MAX_WEIGHT => Err(GwError::WeightTooLarge(w)),
        _ => Ok(()),
    }
}

/// Runs the primal-dual algorithm with `g = spec.g()`.
///
/// For `g = 1` no set is deficient and the empty forest is returned at once.
pub fn gw_run(g: &MetricGraph, spec: &LSpec) -> Result<GwOutcome, GwError> {
    gw_run_mod(g, spec.g())
}

/// [`gw_run`] for an explicit modulus.
pub fn gw_run_mod(g: &MetricGraph, modulus: u64) -> Result<GwOutcome, GwError> {
    check_input(g, modulus)?;
    let n = g.n();
    if modulus == 1 || n == 0 {
        return Ok(GwOutcome {
            forest: Forest::new(n),
            events: Vec::new(),
            dual_sum2: 0,
        });
    }
    let mut state = FastState::new(g, modulus);
    state.run();
    let forest = prune(n, modulus, &state.events);
    Ok(GwOutcome {
        forest,
        events: state.events,
        dual_sum2: state.dual_sum2,
    })
}

/// Queued under its doubled time: `(tie key, u, v, stamp of u's component,
/// stamp of v's component)` where the tie key is the weight with bit 63 set
/// when one endpoint is inactive. An entry is current while both stamps are.
type Event = (u64, u32, u32, u32, u32);

const MIXED: u64 = 1 << 63;

/// Best edge `(u, v)` with `u < v` between two components, with its weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cand {
    u: u32,
    v: u32,
    w: u64,
}

/// Queue-driven implementation, `O(n^2 log n)`.
///
/// Components are identified by a representative vertex. For every pair of
/// live components only the edge minimising `(w + x_u + x_v, w, u, v)` can go
/// tight first, where `x_v` is the total time `v` has spent inactive; that
/// order is stable until one of the two components merges. The candidate for
/// a pair is stored in the row of whichever component was created later.
struct FastState {
    modulus: u64,
    n: usize,
    rep: Vec<u32>,
    members: Vec<Vec<u32>>,
    active: Vec<bool>,
    frozen_at: Vec<i64>,
    /// Creation stamp of each component; fresh on every merge.
    stamp: Vec<u32>,
    next_stamp: u32,
    /// Inactive time per vertex (integer).
    idle: Vec<i64>,
    live: Vec<u32>,
    live_pos: Vec<usize>,
    best: Vec<Cand>,
    queue: RadixQueue<Event>,
    active_count: usize,
    now2: i64,
    dual_sum2: u64,
    events: Vec<MergeEvent>,
}

impl FastState {
    fn new(g: &MetricGraph, modulus: u64) -> Self {
        let n = g.n();
        let mut best = Vec::with_capacity(n * n);
        let mut queue = RadixQueue::new();
        for u in 0..n {
            for v in 0..n {
                let w = if u == v { 0 } else { g.w(u, v) };
                best.push(Cand {
                    u: u.min(v) as u32,
                    v: u.max(v) as u32,
                    w,
                });
                if u < v {
                    queue.push(w, (w, u as u32, v as u32, 0, 0));
                }
            }
        }
        FastState {
            modulus,
            n,
            rep: (0..n as u32).collect(),
            members: (0..n as u32).map(|v| vec![v]).collect(),
            active: vec![true; n],
            frozen_at: vec![0; n],
            stamp: vec![0; n],
            next_stamp: 1,
            idle: vec![0; n],
            live: (0..n as u32).collect(),
            live_pos: (0..n).collect(),
            best,
            queue,
            active_count: n,
            now2: 0,
            dual_sum2: 0,
            events: Vec::new(),
        }
    }

    fn edge_key(&self, e: Cand) -> (i64, u64, u32, u32) {
        (e.w as i64 + self.idle[e.u as usize] + self.idle[e.v as usize], e.w, e.u, e.v)
    }

    /// Current candidate between live components `a` and `b`.
    fn cand(&self, a: usize, b: usize) -> Cand {
        if self.stamp[a] >= self.stamp[b] {
            self.best[a * self.n + b]
        } else {
            self.best[b * self.n + a]
        }
    }

    /// Doubled time at which `e`, between `a` and `b`, goes tight.
    fn tight_time(&self, a: usize, b: usize, e: Cand) -> Option<i64> {
        let key = self.edge_key(e).0;
        match (self.active[a], self.active[b]) {
            (true, true) => Some(key),
            (true, false) => Some(2 * key - self.frozen_at[b]),
            (false, true) => Some(2 * key - self.frozen_at[a]),
            (false, false) => None,
        }
    }

    fn push_pair(&mut self, a: usize, b: usize) {
        let e = self.cand(a, b);
        if let Some(t2) = self.tight_time(a, b, e) {
            let mixed = if self.active[a] != self.active[b] { MIXED } else { 0 };
            let (su, sv) = (self.stamp_of(e.u), self.stamp_of(e.v));
            self.queue.push(t2 as u64, (mixed | e.w, e.u, e.v, su, sv));
        }
    }

    fn stamp_of(&self, v: u32) -> u32 {
        self.stamp[self.rep[v as usize] as usize]
    }

    fn is_current(&self, e: &Event) -> bool {
        let (_, u, v, su, sv) = *e;
        self.stamp_of(u) == su && self.stamp_of(v) == sv
    }

    fn wake(&mut self, root: usize) {
        if self.active[root] {
            return;
        }
        let slept = self.now2 - self.frozen_at[root];
        debug_assert!(slept % 2 == 0, "inactive periods have integral length");
        for &v in &self.members[root] {
            self.idle[v as usize] += slept / 2;
        }
    }

    fn run(&mut self) {
        while self.active_count > 0 {
            let Some((t2, top)) = self.queue.pop() else {
                unreachable!("an active component always has a tight edge ahead");
            };
            if !self.is_current(&top) {
                continue;
            }
            let (key, u, v, _, _) = top;
            let t2 = t2 as i64;
            let (a, b) = (self.rep[u as usize] as usize, self.rep[v as usize] as usize);
            debug_assert!(t2 >= self.now2);
            self.dual_sum2 += self.active_count as u64 * (t2 - self.now2) as u64;
            self.now2 = t2;
            self.events.push(MergeEvent {
                time2: t2,
                u: u as usize,
                v: v as usize,
                weight: key & !MIXED,
            });
            self.merge(a, b);
        }
    }

    fn merge(&mut self, a: usize, b: usize) {
        self.wake(a);
        self.wake(b);
        self.active_count -= self.active[a] as usize + self.active[b] as usize;

        let (keep, gone) = if self.members[a].len() >= self.members[b].len() { (a, b) } else { (b, a) };
        let moved = std::mem::take(&mut self.members[gone]);
        for &v in &moved {
            self.rep[v as usize] = keep as u32;
        }
        self.members[keep].extend(moved);
        self.rep[gone] = keep as u32;

        let pos = self.live_pos[gone];
        self.live.swap_remove(pos);
        if pos < self.live.len() {
            let moved_root = self.live[pos] as usize;
            self.live_pos[moved_root] = pos;
        }

        let active = !(self.members[keep].len() as u64).is_multiple_of(self.modulus);
        self.active[keep] = active;
        if active {
            self.active_count += 1;
        } else {
            self.frozen_at[keep] = self.now2;
        }
        let n = self.n;
        for i in 0..self.live.len() {
            let d = self.live[i] as usize;
            if d == keep {
                continue;
            }
            let (ea, eb) = (self.cand(keep, d), self.cand(gone, d));
            self.best[keep * n + d] = if self.edge_key(ea) <= self.edge_key(eb) { ea } else { eb };
        }
        self.stamp[keep] = self.next_stamp;
        self.next_stamp += 1;
        for i in 0..self.live.len() {
            let d = self.live[i] as usize;
            if d != keep {
                self.push_pair(keep, d);
            }
        }
        let live = self.live.len();
        if self.queue.len() > 2 * live * live + 64 {
            let mut queue = std::mem::replace(&mut self.queue, RadixQueue::new());
            queue.retain(|_, e| self.is_current(e));
            self.queue = queue;
        }
    }
}

/// Reverse delete: drop an edge when both sides of the split stay divisible
/// by the modulus.
fn prune(n: usize, modulus: u64, events: &[MergeEvent]) -> Forest {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, e) in events.iter().enumerate() {
        adj[e.u].push((e.v, id));
        adj[e.v].push((e.u, id));
    }
    let mut removed = vec![false; events.len()];
    let mut mark = vec![usize::MAX; n];
    let mut stack = Vec::new();
    for id in (0..events.len()).rev() {
        removed[id] = true;
        // Size of the side containing `u` once `id` is gone.
        let start = events[id].u;
        let mut side = 0usize;
        stack.push(start);
        mark[start] = id;
        while let Some(x) = stack.pop() {
            side += 1;
            for &(y, eid) in &adj[x] {
                if !removed[eid] && mark[y] != id {
                    mark[y] = id;
                    stack.push(y);
                }
            }
        }
        if !(side as u64).is_multiple_of(modulus) {
            removed[id] = false;
        }
    }
    let kept: Vec<(usize, usize)> = events
        .iter()
        .zip(&removed)
        .filter(|(_, &r)| !r)
        .map(|(e, _)| (e.u, e.v))
        .collect();
    Forest::from_edges(n, &kept).expect("merge events form a forest")
}

/// Straightforward `O(n^3)` version that keeps every dual explicitly. It uses
/// the same tie-breaking and is kept to cross-check [`gw_run`].
///
/// Panics if a chosen edge is not tight under the current duals.
pub fn gw_run_reference(g: &MetricGraph, modulus: u64) -> Result<GwOutcome, GwError> {
    check_input(g, modulus)?;
    let n = g.n();
    if modulus == 1 || n == 0 {
        return Ok(GwOutcome {
            forest: Forest::new(n),
            events: Vec::new(),
            dual_sum2: 0,
        });
    }
    let mut comp: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    // Doubled duals d_v = sum of y_S over sets containing v.
    let mut dual2 = vec![0i64; n];
    let mut now2 = 0i64;
    let mut dual_sum2 = 0u64;
    let mut events = Vec::new();
    let is_active = |s: usize| !(s as u64).is_multiple_of(modulus);

    loop {
        let active_roots = (0..n).filter(|&r| comp[r] == r && is_active(size[r])).count();
        if active_roots == 0 {
            break;
        }
        let mut best: Option<(i64, bool, u64, usize, usize)> = None;
        for u in 0..n {
            for v in u + 1..n {
                let (cu, cv) = (comp[u], comp[v]);
                if cu == cv {
                    continue;
                }
                let rate = is_active(size[cu]) as i64 + is_active(size[cv]) as i64;
                if rate == 0 {
                    continue;
                }
                let w = g.w(u, v);
                let slack2 = 2 * w as i64 - dual2[u] - dual2[v];
                debug_assert!(slack2 >= 0);
                debug_assert!(slack2 % rate == 0);
                let cand = (now2 + slack2 / rate, rate == 1, w, u, v);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
        let (t2, _, w, u, v) = best.expect("active components have outgoing edges");
        let step = t2 - now2;
        for x in 0..n {
            if is_active(size[comp[x]]) {
                dual2[x] += step;
            }
        }
        dual_sum2 += active_roots as u64 * step as u64;
        now2 = t2;
        assert_eq!(dual2[u] + dual2[v], 2 * w as i64, "merged edge must be tight");
        events.push(MergeEvent { time2: t2, u, v, weight: w });
        let (cu, cv) = (comp[u], comp[v]);
        for c in comp.iter_mut() {
            if *c == cv {
                *c = cu;
            }
        }
        size[cu] += size[cv];
    }
    let forest = prune(n, modulus, &events);
    Ok(GwOutcome {
        forest,
        events,
        dual_sum2,
    })
}
