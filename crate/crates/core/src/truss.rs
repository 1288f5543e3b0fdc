//! `(k, delta)`-truss machinery: support peeling, higher-order connectivity,
//! and the global search engine.
//!
//! Peeling repeatedly removes the live edge with minimum temporal support,
//! updating the supports of edges that shared a counted triangle with it. The
//! level at which an edge is removed is its temporal trussness: the largest
//! `k` such that some subgraph containing the edge keeps every member's
//! support at `k` or above.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::graph::{EdgeId, GraphError, TemporalGraph, VertexId};
use crate::tricount::{self, TriangleCounts, TriangleKey};

/// How two triangles count as adjacent when chaining higher-order
/// connectivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConnectivityMode {
    /// Triangles connect when they share at least one vertex (an edge counts).
    #[default]
    VertexShared,
    /// Triangles connect only when they share an edge.
    EdgeShared,
}

/// One maximal community for a query vertex: the achieved `k_star` and the
/// static-edge sets of every component reachable from the query.
///
/// Components are canonical: each edge list sorted ascending, components
/// ordered by their smallest edge id. Two engines agree exactly when their
/// results compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityResult {
    pub query: VertexId,
    pub delta: u64,
    pub k_star: u64,
    pub components: Vec<Vec<EdgeId>>,
}

impl CommunityResult {
    pub fn empty(query: VertexId, delta: u64) -> Self {
        CommunityResult { query, delta, k_star: 0, components: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Sorted union of the endpoints of all component edges.
    pub fn vertices(&self, g: &TemporalGraph) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self
            .components
            .iter()
            .flatten()
            .flat_map(|&e| [g.edge(e).u, g.edge(e).v])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn component_vertices(&self, g: &TemporalGraph, i: usize) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self.components[i]
            .iter()
            .flat_map(|&e| [g.edge(e).u, g.edge(e).v])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Number of temporal edges induced by the component edge sets.
    pub fn temporal_edge_count(&self, g: &TemporalGraph) -> u64 {
        self.components
            .iter()
            .flatten()
            .map(|&e| g.edge(e).timestamps.len() as u64)
            .sum()
    }

    pub fn edge_count(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }
}

/// Result of a peeling run.
///
/// On a full run every edge is `finalized` and `trussness` is complete. On an
/// anchored run peeling stops once the anchor's last incident edge comes up;
/// only finalized entries carry final values, and `truss_edges` marks the
/// maximal `k_max`-class edge set (the anchor's community universe).
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub k_max: u64,
    pub trussness: Vec<u64>,
    pub finalized: Vec<bool>,
    pub truss_edges: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TieBreak {
    LowestEdgeId,
    // trussness is tie-order independent; the reversed order exists so tests
    // can assert that
    #[allow(dead_code)]
    HighestEdgeId,
}

/// Full or anchored peeling decomposition at span bound `delta`.
///
/// Without an anchor, returns every edge's temporal trussness and the global
/// maximum. With an anchor, stops at the anchor's last incident edge; `k_max`
/// is then the maximum trussness among anchor-incident edges.
pub fn decompose(g: &TemporalGraph, delta: u64, anchor: Option<VertexId>) -> Decomposition {
    let (support, counts) = tricount::temporal_support_all(g, delta);
    let live = vec![true; g.edge_count()];
    decompose_with(g, live, support.into_values(), &counts, anchor, TieBreak::LowestEdgeId)
}

/// Peels a masked subgraph given precomputed in-mask supports and triangle
/// counts. `supports[e]` must be the temporal support of `e` measured inside
/// the `live` mask; `counts` must cover every triangle whose three edges are
/// live (missing keys read as zero).
pub(crate) fn decompose_with(
    g: &TemporalGraph,
    mut live: Vec<bool>,
    mut supports: Vec<u64>,
    counts: &TriangleCounts,
    anchor: Option<VertexId>,
    tie: TieBreak,
) -> Decomposition {
    let m = g.edge_count();
    let mut trussness = vec![0u64; m];
    let mut finalized = vec![false; m];

    let order = |id: EdgeId| -> u64 {
        match tie {
            TieBreak::LowestEdgeId => id as u64,
            TieBreak::HighestEdgeId => (m - 1 - id) as u64,
        }
    };
    let unorder = |key: u64| -> EdgeId {
        match tie {
            TieBreak::LowestEdgeId => key as EdgeId,
            TieBreak::HighestEdgeId => m - 1 - key as EdgeId,
        }
    };

    let mut queue: BTreeSet<(u64, u64)> = BTreeSet::new();
    for id in 0..m {
        if live[id] {
            queue.insert((supports[id], order(id)));
        }
    }

    let mut anchor_live = 0usize;
    if let Some(q) = anchor {
        anchor_live = g.neighbors(q).iter().filter(|&&(_, id)| live[id]).count();
        if anchor_live == 0 {
            return Decomposition { k_max: 0, trussness, finalized, truss_edges: vec![false; m] };
        }
    }

    let mut k_cur = 0u64;
    let mut k_star = None;
    while let Some(&(sup, key)) = queue.iter().next() {
        let id = unorder(key);
        let (u, v) = (g.edge(id).u, g.edge(id).v);
        let incident_to_anchor =
            anchor.is_some_and(|q| u == q || v == q);

        if incident_to_anchor && anchor_live == 1 {
            // Removing this edge would leave the anchor bare; its level is the
            // anchor's k*. The edge stays live.
            let k = k_cur.max(sup);
            trussness[id] = k;
            finalized[id] = true;
            k_star = Some(k);
            break;
        }

        queue.remove(&(sup, key));
        live[id] = false;
        k_cur = k_cur.max(sup);
        trussness[id] = k_cur;
        finalized[id] = true;
        if incident_to_anchor {
            anchor_live -= 1;
        }

        // Triangles through the removed edge die; pull their count out of the
        // two surviving sides.
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
                if live[e1] && live[e2] {
                    let n = counts.get(&TriangleKey::new(u, v, wu)).copied().unwrap_or(0);
                    if n > 0 {
                        for e in [e1, e2] {
                            let removed = queue.remove(&(supports[e], order(e)));
                            debug_assert!(removed);
                            supports[e] = supports[e]
                                .checked_sub(n)
                                .expect("support underflow: counts inconsistent with supports");
                            queue.insert((supports[e], order(e)));
                        }
                    }
                }
                i += 1;
                j += 1;
            }
        }
    }

    let (k_max, truss_edges) = match anchor {
        None => {
            let k_max = k_cur;
            let mask = (0..m).map(|id| live[id] || trussness[id] >= k_max).collect();
            (k_max, mask)
        }
        Some(_) => {
            let k = k_star.unwrap_or(0);
            let mask = (0..m)
                .map(|id| live[id] || (finalized[id] && trussness[id] == k))
                .collect();
            (k, mask)
        }
    };
    Decomposition { k_max, trussness, finalized, truss_edges }
}

/// Partitions the reachable part of `edge_set` into maximal higher-order
/// components: groups of edges linked through triangles with a nonzero
/// temporal count, chained per `mode`. Edges in no qualifying triangle drop
/// out. Only components touched by a seed edge are returned.
pub fn higher_order_components(
    g: &TemporalGraph,
    edge_set: &[EdgeId],
    delta: u64,
    seeds: &[EdgeId],
    mode: ConnectivityMode,
) -> Vec<Vec<EdgeId>> {
    let mut in_set = vec![false; g.edge_count()];
    for &e in edge_set {
        in_set[e] = true;
    }
    let memo: RefCell<HashMap<TriangleKey, bool>> = RefCell::new(HashMap::new());
    components_via(
        g,
        |e| in_set[e],
        |key| {
            *memo.borrow_mut().entry(*key).or_insert_with(|| {
                let [a, b, c] = key.vertices();
                let e1 = g.edge_id(a, b).expect("triangle edge");
                let e2 = g.edge_id(a, c).expect("triangle edge");
                let e3 = g.edge_id(b, c).expect("triangle edge");
                tricount::count_triangle_sliding(
                    &g.edge(e1).timestamps,
                    &g.edge(e2).timestamps,
                    &g.edge(e3).timestamps,
                    delta,
                ) > 0
            })
        },
        seeds,
        mode,
    )
}

/// Component extraction over an implicit edge universe. `in_set` gates edge
/// membership, `tri_active` gates triangles (both endpoints of every check are
/// already known to be in the universe).
pub(crate) fn components_via(
    g: &TemporalGraph,
    in_set: impl Fn(EdgeId) -> bool,
    tri_active: impl Fn(&TriangleKey) -> bool,
    seeds: &[EdgeId],
    mode: ConnectivityMode,
) -> Vec<Vec<EdgeId>> {
    let m = g.edge_count();
    let mut visited = vec![false; m];
    let mut scanned = vec![false; m];
    let mut comps: Vec<Vec<EdgeId>> = Vec::new();

    for &seed in seeds {
        if seed >= m || !in_set(seed) || visited[seed] || scanned[seed] {
            continue;
        }
        let mut comp: Vec<EdgeId> = Vec::new();
        let mut edge_q: VecDeque<EdgeId> = VecDeque::from([seed]);
        let mut vertex_q: VecDeque<VertexId> = VecDeque::new();
        let mut active: HashSet<VertexId> = HashSet::new();

        fn admit(
            e: EdgeId,
            comp: &mut Vec<EdgeId>,
            edge_q: &mut VecDeque<EdgeId>,
            visited: &mut [bool],
            scanned: &[bool],
        ) {
            if !visited[e] {
                visited[e] = true;
                comp.push(e);
            }
            if !scanned[e] {
                edge_q.push_back(e);
            }
        }

        loop {
            if let Some(e) = edge_q.pop_front() {
                if scanned[e] {
                    continue;
                }
                scanned[e] = true;
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
                        if in_set(e1) && in_set(e2) {
                            let key = TriangleKey::new(u, v, wu);
                            if tri_active(&key) {
                                for x in [e, e1, e2] {
                                    admit(x, &mut comp, &mut edge_q, &mut visited, &scanned);
                                }
                                if mode == ConnectivityMode::VertexShared {
                                    for x in [u, v, wu] {
                                        if active.insert(x) {
                                            vertex_q.push_back(x);
                                        }
                                    }
                                }
                            }
                        }
                        i += 1;
                        j += 1;
                    }
                }
            } else if let Some(x) = vertex_q.pop_front() {
                // Vertex-shared chaining: any qualifying triangle touching an
                // active vertex joins the component.
                let nx = g.neighbors(x);
                for i in 0..nx.len() {
                    let (y, exy) = nx[i];
                    if !in_set(exy) {
                        continue;
                    }
                    for &(z, exz) in &nx[i + 1..] {
                        if !in_set(exz) {
                            continue;
                        }
                        let Some(eyz) = g.edge_id(y, z) else { continue };
                        if !in_set(eyz) {
                            continue;
                        }
                        let key = TriangleKey::new(x, y, z);
                        if !tri_active(&key) {
                            continue;
                        }
                        for e in [exy, exz, eyz] {
                            admit(e, &mut comp, &mut edge_q, &mut visited, &scanned);
                        }
                        for w in [y, z] {
                            if active.insert(w) {
                                vertex_q.push_back(w);
                            }
                        }
                    }
                }
            } else {
                break;
            }
        }

        if !comp.is_empty() {
            comp.sort_unstable();
            comps.push(comp);
        }
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Global search: peel the whole graph anchored at `q`, then report the
/// higher-order components of the maximal `k*`-class reachable from `q`.
pub fn gs_search(
    g: &TemporalGraph,
    q: VertexId,
    delta: u64,
    mode: ConnectivityMode,
) -> Result<CommunityResult, GraphError> {
    if !g.contains_vertex(q) {
        return Err(GraphError::UnknownVertex(q));
    }
    if g.degree(q) == 0 {
        return Ok(CommunityResult::empty(q, delta));
    }
    let (support, counts) = tricount::temporal_support_all(g, delta);
    let live = vec![true; g.edge_count()];
    let decomp =
        decompose_with(g, live, support.into_values(), &counts, Some(q), TieBreak::LowestEdgeId);
    if decomp.k_max == 0 {
        return Ok(CommunityResult::empty(q, delta));
    }
    let seeds: Vec<EdgeId> = g
        .neighbors(q)
        .iter()
        .filter(|&&(_, id)| decomp.truss_edges[id])
        .map(|&(_, id)| id)
        .collect();
    let components = components_via(
        g,
        |e| decomp.truss_edges[e],
        |key| counts.get(key).copied().unwrap_or(0) > 0,
        &seeds,
        mode,
    );
    Ok(CommunityResult { query: q, delta, k_star: decomp.k_max, components })
}
