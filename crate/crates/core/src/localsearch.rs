//! Local search engine: expand a candidate subgraph around the query vertex
//! under a support threshold, binary-searching the threshold until the
//! candidate provably contains the answer.
//!
//! Expansion is compute-while-expanding: an edge's temporal support is only
//! evaluated when the frontier reaches it, optionally stopping early once the
//! running sum clears the current threshold. Edges that fail the threshold
//! are parked in a deferred queue and rechecked when the threshold drops.

use std::collections::{HashMap, VecDeque};

use crate::graph::{EdgeId, GraphError, TemporalGraph, VertexId};
use crate::tricount::{self, TriangleCounts, TriangleKey};
use crate::truss::{self, CommunityResult, ConnectivityMode, TieBreak};

const UNVISITED: i8 = 0;
const VISITED: i8 = 1;
const DEFERRED: i8 = -1;

/// Expansion bookkeeping carried across rounds of one search: per-edge visit
/// marks, the deferred queue, activated vertices, cached supports, and
/// memoized triangle counts.
pub struct ExpandState {
    mark: Vec<i8>,
    deferred: VecDeque<EdgeId>,
    in_deferred: Vec<bool>,
    active: Vec<bool>,
    // (value, exact); inexact values were truncated at a former threshold and
    // are only meaningful as lower bounds
    support: Vec<Option<(u64, bool)>>,
    tri_n: HashMap<TriangleKey, u64>,
    early_stop: bool,
}

impl ExpandState {
    pub fn new(g: &TemporalGraph) -> Self {
        Self::with_early_stop(g, true)
    }

    pub fn with_early_stop(g: &TemporalGraph, early_stop: bool) -> Self {
        let m = g.edge_count();
        ExpandState {
            mark: vec![UNVISITED; m],
            deferred: VecDeque::new(),
            in_deferred: vec![false; m],
            active: vec![false; g.vertex_count() as usize],
            support: vec![None; m],
            tri_n: HashMap::new(),
            early_stop,
        }
    }

    pub fn deferred_len(&self) -> usize {
        self.deferred.len()
    }

    fn support_at(&mut self, g: &TemporalGraph, delta: u64, e: EdgeId, threshold: u64) -> u64 {
        if let Some((v, exact)) = self.support[e] {
            if exact || v >= threshold {
                return v;
            }
        }
        let stop = self.early_stop.then_some(threshold.max(1));
        let val = tricount::support_of_edge_id(g, e, delta, stop);
        let exact = stop.is_none_or(|k| val < k);
        self.support[e] = Some((val, exact));
        val
    }

    fn exact_support(&mut self, g: &TemporalGraph, delta: u64, e: EdgeId) -> u64 {
        if let Some((v, true)) = self.support[e] {
            return v;
        }
        let val = tricount::support_of_edge_id(g, e, delta, None);
        self.support[e] = Some((val, true));
        val
    }

    fn triangle_n(&mut self, g: &TemporalGraph, delta: u64, key: TriangleKey, edges: [EdgeId; 3]) -> u64 {
        if let Some(&n) = self.tri_n.get(&key) {
            return n;
        }
        let n = tricount::count_triangle_sliding(
            &g.edge(edges[0]).timestamps,
            &g.edge(edges[1]).timestamps,
            &g.edge(edges[2]).timestamps,
            delta,
        );
        self.tri_n.insert(key, n);
        n
    }

    fn park(&mut self, e: EdgeId) {
        debug_assert_ne!(self.mark[e], VISITED, "batched edge parked");
        if !self.in_deferred[e] {
            self.mark[e] = DEFERRED;
            self.in_deferred[e] = true;
            self.deferred.push_back(e);
        }
    }
}

/// One expansion round at threshold `k`: returns the batch of newly admitted
/// edges, each with `TSup_G >= k`, reachable from the seeds through triangles
/// with a nonzero temporal count (chained per `mode`, like component
/// extraction). Seeds are the still-pending deferred edges plus any unvisited
/// query-incident edge; query-incident edges below the threshold are parked
/// immediately. When a crossed triangle exposes sub-threshold edges only the
/// smallest-support one is parked for later rounds.
pub fn expanding(
    g: &TemporalGraph,
    delta: u64,
    state: &mut ExpandState,
    k: u64,
    q: VertexId,
    mode: ConnectivityMode,
) -> Vec<EdgeId> {
    let mut queue: VecDeque<EdgeId> = VecDeque::new();
    while let Some(e) = state.deferred.pop_front() {
        state.in_deferred[e] = false;
        queue.push_back(e);
    }
    for &(_, id) in g.neighbors(q) {
        if state.mark[id] == UNVISITED {
            if state.support_at(g, delta, id, k) >= k {
                state.mark[id] = VISITED;
                queue.push_back(id);
            } else {
                state.park(id);
            }
        }
    }

    let mut batch = Vec::new();
    let mut vqueue: VecDeque<VertexId> = VecDeque::new();
    loop {
        if let Some(e) = queue.pop_front() {
            let expandable = match state.mark[e] {
                VISITED => true,
                DEFERRED => state.support_at(g, delta, e, k) >= k,
                _ => unreachable!("queued edge is never unvisited"),
            };
            if !expandable {
                state.park(e);
                continue;
            }
            if state.mark[e] == DEFERRED {
                state.mark[e] = VISITED;
            }
            batch.push(e);

            let (u, v) = (g.edge(e).u, g.edge(e).v);
            let nu = g.neighbors(u);
            let nv = g.neighbors(v);
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                let (wu, e1) = nu[i];
                let (wv, e2) = nv[j];
                if wu < wv {
                    i += 1;
                } else if wv < wu {
                    j += 1;
                } else {
                    let w = wu;
                    let key = TriangleKey::new(u, v, w);
                    if state.triangle_n(g, delta, key, [e, e1, e2]) > 0 {
                        let s1 = state.support_at(g, delta, e1, k);
                        let s2 = state.support_at(g, delta, e2, k);
                        if s1 < k || s2 < k {
                            state.park(if s1 < s2 { e1 } else { e2 });
                        }
                        for (x, sx) in [(e1, s1), (e2, s2)] {
                            if state.mark[x] == UNVISITED && sx >= k {
                                state.mark[x] = VISITED;
                                queue.push_back(x);
                            }
                        }
                        if mode == ConnectivityMode::VertexShared {
                            for x in [u, v, w] {
                                if !state.active[x as usize] {
                                    state.active[x as usize] = true;
                                    vqueue.push_back(x);
                                }
                            }
                        }
                    }
                    i += 1;
                    j += 1;
                }
            }
        } else if let Some(x) = vqueue.pop_front() {
            // vertex-shared chaining: triangles touching a vertex of a crossed
            // triangle are exposed even without a shared edge
            let nx = g.neighbors(x);
            for i in 0..nx.len() {
                let (y, exy) = nx[i];
                for &(z, exz) in &nx[i + 1..] {
                    let Some(eyz) = g.edge_id(y, z) else { continue };
                    let key = TriangleKey::new(x, y, z);
                    if state.triangle_n(g, delta, key, [exy, exz, eyz]) == 0 {
                        continue;
                    }
                    let exposed = [exy, exz, eyz];
                    let sup = exposed.map(|e| state.support_at(g, delta, e, k));
                    let mut worst: Option<(u64, EdgeId)> = None;
                    for (e, s) in exposed.into_iter().zip(sup) {
                        if s >= k {
                            if state.mark[e] == UNVISITED {
                                state.mark[e] = VISITED;
                                queue.push_back(e);
                            }
                        } else if worst.is_none_or(|w| (s, e) < w) {
                            worst = Some((s, e));
                        }
                    }
                    if let Some((_, e)) = worst {
                        if state.mark[e] != VISITED {
                            state.park(e);
                        }
                    }
                }
            }
        } else {
            break;
        }
    }
    batch
}

/// Binary-search interval over candidate thresholds.
#[derive(Debug, Clone, Copy)]
struct SearchBounds {
    lo: u64,
    hi: u64,
}

impl SearchBounds {
    fn mid(&self) -> u64 {
        (self.lo + self.hi) / 2
    }
}

/// Per-run diagnostics: the threshold used by each expansion round and
/// whether the guarded fallback to the global engine fired.
#[derive(Debug, Clone, Default)]
pub struct LsTrace {
    pub thresholds: Vec<u64>,
    pub fell_back: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct LsOptions {
    /// Stop per-edge support counting once the running sum clears the current
    /// threshold. Never changes the result, only the work done.
    pub early_stop: bool,
}

impl Default for LsOptions {
    fn default() -> Self {
        LsOptions { early_stop: true }
    }
}

/// Local search for the query's maximal community. Result is identical to
/// [`truss::gs_search`] on the same inputs.
pub fn ls_search(
    g: &TemporalGraph,
    q: VertexId,
    delta: u64,
    mode: ConnectivityMode,
) -> Result<CommunityResult, GraphError> {
    ls_search_traced(g, q, delta, mode, LsOptions::default()).map(|(r, _)| r)
}

pub fn ls_search_traced(
    g: &TemporalGraph,
    q: VertexId,
    delta: u64,
    mode: ConnectivityMode,
    opts: LsOptions,
) -> Result<(CommunityResult, LsTrace), GraphError> {
    if !g.contains_vertex(q) {
        return Err(GraphError::UnknownVertex(q));
    }
    let mut trace = LsTrace::default();
    if g.degree(q) == 0 {
        return Ok((CommunityResult::empty(q, delta), trace));
    }

    let mut state = ExpandState::with_early_stop(g, opts.early_stop);
    let mut bounds = SearchBounds { lo: u64::MAX, hi: 0 };
    for &(_, id) in g.neighbors(q) {
        let s = state.exact_support(g, delta, id);
        bounds.lo = bounds.lo.min(s);
        bounds.hi = bounds.hi.max(s);
    }
    if bounds.hi == 0 {
        // no query-incident edge participates in a qualifying triangle
        return Ok((CommunityResult::empty(q, delta), trace));
    }

    // Candidate subgraph H: membership mask, in-H supports maintained
    // incrementally, and counts of triangles fully inside H.
    let mut in_h = vec![false; g.edge_count()];
    let mut tsup_h = vec![0u64; g.edge_count()];
    let mut h_counts = TriangleCounts::new();

    loop {
        if bounds.lo > bounds.hi {
            break; // cannot happen; guarded fallback below
        }
        let k_m = bounds.mid();
        if trace.thresholds.last() == Some(&k_m) {
            break; // threshold stalled; fall back to the global engine
        }
        trace.thresholds.push(k_m);

        let batch = expanding(g, delta, &mut state, k_m, q, mode);
        for &e in &batch {
            in_h[e] = true;
            let (u, v) = (g.edge(e).u, g.edge(e).v);
            let nu = g.neighbors(u);
            let nv = g.neighbors(v);
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                let (wu, e1) = nu[i];
                let (wv, e2) = nv[j];
                if wu < wv {
                    i += 1;
                } else if wv < wu {
                    j += 1;
                } else {
                    // triangle completes when its last edge joins H
                    if in_h[e1] && in_h[e2] {
                        let key = TriangleKey::new(u, v, wu);
                        let n = state.triangle_n(g, delta, key, [e, e1, e2]);
                        if n > 0 {
                            h_counts.insert(key, n);
                            tsup_h[e] += n;
                            tsup_h[e1] += n;
                            tsup_h[e2] += n;
                        }
                    }
                    i += 1;
                    j += 1;
                }
            }
        }

        let decomp = truss::decompose_with(
            g,
            in_h.clone(),
            tsup_h.clone(),
            &h_counts,
            Some(q),
            TieBreak::LowestEdgeId,
        );
        let k_h = decomp.k_max;
        if k_h == 0 {
            bounds.hi = k_m;
        } else if k_h < k_m {
            bounds.lo = k_h;
            bounds.hi = k_m;
        } else {
            // candidate subgraph contains the full answer; extract components
            let seeds: Vec<EdgeId> = g
                .neighbors(q)
                .iter()
                .filter(|&&(_, id)| decomp.truss_edges[id])
                .map(|&(_, id)| id)
                .collect();
            let components = truss::components_via(
                g,
                |e| decomp.truss_edges[e],
                |key| h_counts.get(key).copied().unwrap_or(0) > 0,
                &seeds,
                mode,
            );
            let result = CommunityResult { query: q, delta, k_star: k_h, components };
            return Ok((result, trace));
        }
    }

    trace.fell_back = true;
    let result = truss::gs_search(g, q, delta, mode)?;
    Ok((result, trace))
}
