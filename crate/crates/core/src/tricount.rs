//! Temporal triangle counting and per-edge temporal support.
//!
//! For a static triangle with timestamp lists `T1, T2, T3`, a temporal
//! triangle is one timestamp chosen from each list; it qualifies at span bound
//! `delta` when the largest pairwise difference of the three choices is at
//! most `delta`. [`count_triangle_sliding`] counts qualifying triples with
//! monotone window cursors instead of enumerating the full cross product.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::graph::{EdgeId, GraphError, TemporalGraph, Timestamp, VertexId};

/// Canonical identity of a static triangle, `a < b < c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriangleKey {
    pub a: VertexId,
    pub b: VertexId,
    pub c: VertexId,
}

impl TriangleKey {
    pub fn new(x: VertexId, y: VertexId, z: VertexId) -> Self {
        let mut v = [x, y, z];
        v.sort_unstable();
        debug_assert!(v[0] < v[1] && v[1] < v[2], "degenerate triangle key");
        TriangleKey { a: v[0], b: v[1], c: v[2] }
    }

    pub fn vertices(&self) -> [VertexId; 3] {
        [self.a, self.b, self.c]
    }
}

/// `N(triangle, delta)` for every static triangle of a graph, keyed canonically.
pub type TriangleCounts = BTreeMap<TriangleKey, u64>;

/// Per-edge temporal support, indexed by [`EdgeId`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportMap {
    values: Vec<u64>,
}

impl SupportMap {
    pub fn zeroed(edge_count: usize) -> Self {
        SupportMap { values: vec![0; edge_count] }
    }

    pub fn get(&self, id: EdgeId) -> u64 {
        self.values[id]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, u64)> + '_ {
        self.values.iter().copied().enumerate()
    }

    pub(crate) fn add(&mut self, id: EdgeId, amount: u64) {
        self.values[id] += amount;
    }

    pub(crate) fn into_values(self) -> Vec<u64> {
        self.values
    }

    #[allow(dead_code)] // test support
    pub(crate) fn values(&self) -> &[u64] {
        &self.values
    }
}

// Instrumentation: how many times the sliding-window counter has run. The
// index-backed query path must never touch it; tests assert the count stays
// flat across tts queries.
static SLIDING_CALLS: AtomicU64 = AtomicU64::new(0);

/// Total sliding-window counting invocations so far (process-wide).
pub fn counting_calls() -> u64 {
    SLIDING_CALLS.load(Ordering::Relaxed)
}

/// Counts triples `(x, y, z)` from the three sorted lists whose pairwise
/// differences all stay within `delta`.
///
/// Lists are processed smallest-first; for each `x` a window over the second
/// list holds the `y` with `|x - y| <= delta`, and for each such `y` a window
/// over the third list holds the `z` with both `|y - z| <= delta` and
/// `|x - z| <= delta`. Cursors only move forward per outer timestamp.
pub fn count_triangle_sliding(
    t1: &[Timestamp],
    t2: &[Timestamp],
    t3: &[Timestamp],
    delta: u64,
) -> u64 {
    SLIDING_CALLS.fetch_add(1, Ordering::Relaxed);
    let mut lists = [t1, t2, t3];
    lists.sort_by_key(|l| l.len());
    let [small, mid, large] = lists;
    if small.is_empty() {
        return 0;
    }

    let mut total = 0u64;
    let mut mid_lo = 0usize;
    let mut mid_hi = 0usize;
    for &x in small {
        let x_lo = x.saturating_sub(delta);
        let x_hi = x.saturating_add(delta);
        while mid_lo < mid.len() && mid[mid_lo] < x_lo {
            mid_lo += 1;
        }
        if mid_hi < mid_lo {
            mid_hi = mid_lo;
        }
        while mid_hi < mid.len() && mid[mid_hi] <= x_hi {
            mid_hi += 1;
        }
        if mid_lo == mid_hi {
            continue;
        }
        // Within one outer x the third-list bounds are monotone in y, so two
        // cursors suffice; they restart at the window floor for the next x.
        let mut lg_lo = large.partition_point(|&t| t < mid[mid_lo].max(x).saturating_sub(delta));
        let mut lg_hi = lg_lo;
        for &y in &mid[mid_lo..mid_hi] {
            let lo = y.max(x).saturating_sub(delta);
            let hi = y.min(x).saturating_add(delta);
            while lg_lo < large.len() && large[lg_lo] < lo {
                lg_lo += 1;
            }
            if lg_hi < lg_lo {
                lg_hi = lg_lo;
            }
            while lg_hi < large.len() && large[lg_hi] <= hi {
                lg_hi += 1;
            }
            total += (lg_hi - lg_lo) as u64;
        }
    }
    total
}

/// Calls `f` once per static triangle, in canonical order, with the key and
/// the three edge ids `[(a,b), (a,c), (b,c)]`.
///
/// Enumeration walks each edge `(u, v)` and intersects the two sorted
/// neighbor lists, keeping only `w > v` so every triangle fires exactly once.
pub(crate) fn for_each_triangle(g: &TemporalGraph, mut f: impl FnMut(TriangleKey, [EdgeId; 3])) {
    for (id, e) in g.edges().iter().enumerate() {
        let (u, v) = (e.u, e.v);
        let nu = g.neighbors(u);
        let nv = g.neighbors(v);
        let (mut i, mut j) = (0, 0);
        while i < nu.len() && j < nv.len() {
            let (wu, eu) = nu[i];
            let (wv, ev) = nv[j];
            if wu < wv {
                i += 1;
            } else if wv < wu {
                j += 1;
            } else {
                if wu > v {
                    f(TriangleKey { a: u, b: v, c: wu }, [id, eu, ev]);
                }
                i += 1;
                j += 1;
            }
        }
    }
}

/// All static triangles of `g` in canonical order.
pub fn enumerate_triangles(g: &TemporalGraph) -> Vec<TriangleKey> {
    let mut out = Vec::new();
    for_each_triangle(g, |key, _| out.push(key));
    out
}

/// Computes `N(triangle, delta)` for every static triangle and accumulates the
/// per-edge temporal support. Every edge gets an entry (possibly zero); every
/// triangle gets a count (possibly zero).
pub fn temporal_support_all(g: &TemporalGraph, delta: u64) -> (SupportMap, TriangleCounts) {
    let mut support = SupportMap::zeroed(g.edge_count());
    let mut counts = TriangleCounts::new();
    for_each_triangle(g, |key, [e1, e2, e3]| {
        let n = count_triangle_sliding(
            &g.edge(e1).timestamps,
            &g.edge(e2).timestamps,
            &g.edge(e3).timestamps,
            delta,
        );
        counts.insert(key, n);
        if n > 0 {
            support.add(e1, n);
            support.add(e2, n);
            support.add(e3, n);
        }
    });
    (support, counts)
}

/// Temporal support of a single edge.
///
/// With `early_stop_at = Some(k)`, counting may stop as soon as the running
/// sum reaches `k`; the result is then a truncated lower-bound view: it equals
/// the exact support whenever that is below `k`, and is `>= k` otherwise.
pub fn temporal_support_edge(
    g: &TemporalGraph,
    u: VertexId,
    v: VertexId,
    delta: u64,
    early_stop_at: Option<u64>,
) -> Result<u64, GraphError> {
    let id = g.edge_id(u, v).ok_or(GraphError::UnknownEdge(u, v))?;
    Ok(support_of_edge_id(g, id, delta, early_stop_at))
}

/// [`temporal_support_edge`] addressed by edge id.
pub(crate) fn support_of_edge_id(
    g: &TemporalGraph,
    id: EdgeId,
    delta: u64,
    early_stop_at: Option<u64>,
) -> u64 {
    let e = g.edge(id);
    let nu = g.neighbors(e.u);
    let nv = g.neighbors(e.v);
    let (mut i, mut j) = (0, 0);
    let mut sum = 0u64;
    while i < nu.len() && j < nv.len() {
        let (wu, eu) = nu[i];
        let (wv, ev) = nv[j];
        if wu < wv {
            i += 1;
        } else if wv < wu {
            j += 1;
        } else {
            sum += count_triangle_sliding(
                &e.timestamps,
                &g.edge(eu).timestamps,
                &g.edge(ev).timestamps,
                delta,
            );
            if early_stop_at.is_some_and(|k| sum >= k) {
                return sum;
            }
            i += 1;
            j += 1;
        }
    }
    sum
}
