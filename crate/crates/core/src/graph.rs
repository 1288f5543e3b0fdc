//! Temporal graph data model: file ingestion, induced subgraphs, and
//! time-window slices.
//!
//! A [`TemporalGraph`] stores the static projection (one [`StaticEdge`] per
//! vertex pair, endpoints ordered `u < v`) together with the sorted,
//! deduplicated timestamp list of each edge. The structure is immutable after
//! construction and safe to share across threads.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

/// Dense vertex identifier, `0..n`.
pub type VertexId = u32;
/// Integer time unit; `1..=t_max` after ingestion.
pub type Timestamp = u64;
/// Position of a static edge in [`TemporalGraph::edges`] order.
pub type EdgeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no temporal edges after filtering")]
    Empty,
    #[error("timestamp {t} below 1 after scaling (line {line}); pass rebase to shift")]
    TimestampUnderflow { line: usize, t: u64 },
    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge ({0}, {1})")]
    UnknownEdge(VertexId, VertexId),
    #[error("window [{start}, {end}] outside [1, {t_max}]")]
    WindowOutOfRange { start: Timestamp, end: Timestamp, t_max: Timestamp },
}

/// A static edge with the sorted list of times at which it was active.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticEdge {
    pub u: VertexId,
    pub v: VertexId,
    /// Strictly increasing, non-empty.
    pub timestamps: Vec<Timestamp>,
}

/// Immutable temporal graph: static adjacency plus per-edge timestamp lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalGraph {
    n: u32,
    edges: Vec<StaticEdge>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    t_max: Timestamp,
    m_temporal: u64,
    fingerprint: u64,
}

impl TemporalGraph {
    /// Builds a graph from raw `(u, v, t)` triples. Self-loops are dropped and
    /// duplicate triples collapse to one. Vertex ids are kept as given; the
    /// vertex count is `max id + 1` (so ids outside any surviving edge stay in
    /// the id space with empty adjacency).
    pub fn from_temporal_edges(
        triples: impl IntoIterator<Item = (VertexId, VertexId, Timestamp)>,
    ) -> Self {
        Self::build(None, triples)
    }

    /// Like [`Self::from_temporal_edges`] but with an explicit vertex count.
    pub fn from_temporal_edges_with_n(
        n: u32,
        triples: impl IntoIterator<Item = (VertexId, VertexId, Timestamp)>,
    ) -> Self {
        Self::build(Some(n), triples)
    }

    fn build(
        n: Option<u32>,
        triples: impl IntoIterator<Item = (VertexId, VertexId, Timestamp)>,
    ) -> Self {
        let mut by_pair: BTreeMap<(VertexId, VertexId), Vec<Timestamp>> = BTreeMap::new();
        let mut max_id: Option<u32> = None;
        for (a, b, t) in triples {
            if a == b {
                continue;
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            max_id = Some(max_id.map_or(v, |m| m.max(v)));
            by_pair.entry((u, v)).or_default().push(t);
        }
        let n = match n {
            Some(n) => {
                debug_assert!(max_id.is_none_or(|m| m < n));
                n
            }
            None => max_id.map_or(0, |m| m + 1),
        };
        let mut edges = Vec::with_capacity(by_pair.len());
        let mut t_max = 0;
        let mut m_temporal = 0u64;
        for ((u, v), mut ts) in by_pair {
            ts.sort_unstable();
            ts.dedup();
            t_max = t_max.max(*ts.last().expect("non-empty by construction"));
            m_temporal += ts.len() as u64;
            edges.push(StaticEdge { u, v, timestamps: ts });
        }
        let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); n as usize];
        for (id, e) in edges.iter().enumerate() {
            adj[e.u as usize].push((e.v, id));
            adj[e.v as usize].push((e.u, id));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let fingerprint = checksum(n, t_max, &edges);
        TemporalGraph { n, edges, adj, t_max, m_temporal, fingerprint }
    }

    /// Number of vertices (dense id space `0..n`).
    pub fn vertex_count(&self) -> u32 {
        self.n
    }

    /// Number of static edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Total number of temporal edges (sum of timestamp list lengths).
    pub fn temporal_edge_count(&self) -> u64 {
        self.m_temporal
    }

    /// Largest timestamp present; 0 for an edgeless graph.
    pub fn t_max(&self) -> Timestamp {
        self.t_max
    }

    /// Static edges in canonical `(u, v)` order; [`EdgeId`]s index this slice.
    pub fn edges(&self) -> &[StaticEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &StaticEdge {
        &self.edges[id]
    }

    /// Sorted neighbor list of `x`, each entry `(neighbor, edge id)`.
    pub fn neighbors(&self, x: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[x as usize]
    }

    /// Static degree of `x`.
    pub fn degree(&self, x: VertexId) -> usize {
        self.adj[x as usize].len()
    }

    /// Number of temporal edges incident to `x`.
    pub fn temporal_degree(&self, x: VertexId) -> u64 {
        self.adj[x as usize]
            .iter()
            .map(|&(_, id)| self.edges[id].timestamps.len() as u64)
            .sum()
    }

    /// Looks up the edge id of the pair `{a, b}`, if present.
    pub fn edge_id(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        if a == b || a >= self.n || b >= self.n {
            return None;
        }
        let list = &self.adj[a as usize];
        list.binary_search_by_key(&b, |&(w, _)| w).ok().map(|i| list[i].1)
    }

    pub fn contains_vertex(&self, x: VertexId) -> bool {
        x < self.n
    }

    /// Stable checksum of the canonical edge list; indexes built from this
    /// graph are bound to it.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }
}

/// FNV-1a over the canonical edge list.
fn checksum(n: u32, t_max: Timestamp, edges: &[StaticEdge]) -> u64 {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    let mut h = OFFSET;
    let mut eat = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(PRIME);
        }
    };
    eat(u64::from(n));
    eat(t_max);
    eat(edges.len() as u64);
    for e in edges {
        eat(u64::from(e.u));
        eat(u64::from(e.v));
        eat(e.timestamps.len() as u64);
        for &t in &e.timestamps {
            eat(t);
        }
    }
    h
}

/// Counts how many values of a sorted slice fall in `[lo, hi]`.
pub(crate) fn range_count(sorted: &[Timestamp], lo: Timestamp, hi: Timestamp) -> usize {
    if lo > hi {
        return 0;
    }
    let a = sorted.partition_point(|&t| t < lo);
    let b = sorted.partition_point(|&t| t <= hi);
    b - a
}

/// Read-only view of a graph restricted to the inclusive time window
/// `[start, start + delta]`.
#[derive(Debug, Clone, Copy)]
pub struct SliceView<'a> {
    base: &'a TemporalGraph,
    start: Timestamp,
    end: Timestamp,
}

impl<'a> SliceView<'a> {
    pub fn base(&self) -> &'a TemporalGraph {
        self.base
    }

    pub fn window(&self) -> (Timestamp, Timestamp) {
        (self.start, self.end)
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        self.start <= t && t <= self.end
    }

    /// The in-window portion of an edge's timestamp list.
    pub fn edge_timestamps(&self, id: EdgeId) -> &'a [Timestamp] {
        let ts = &self.base.edge(id).timestamps;
        let a = ts.partition_point(|&t| t < self.start);
        let b = ts.partition_point(|&t| t <= self.end);
        &ts[a..b]
    }

    /// Ids of edges with at least one in-window timestamp.
    pub fn active_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.base.edge_count()).filter(|&id| !self.edge_timestamps(id).is_empty())
    }

    pub fn temporal_edge_count(&self) -> u64 {
        (0..self.base.edge_count())
            .map(|id| self.edge_timestamps(id).len() as u64)
            .sum()
    }
}

/// Loads a temporal graph from a plain-text edge list: one `u v t` triple per
/// line, `#` comments and blank lines skipped, arbitrary whitespace.
///
/// Raw timestamps are integer-divided by `time_scale`; with `rebase` they are
/// then shifted so the smallest becomes 1. Self-loops are dropped, duplicate
/// `(u, v, t)` triples collapse, and vertex ids are densely remapped in
/// ascending order of their original value.
pub fn load_graph(
    path: impl AsRef<Path>,
    time_scale: u64,
    rebase: bool,
) -> Result<TemporalGraph, GraphError> {
    let file = File::open(path.as_ref())?;
    let reader = BufReader::new(file);
    parse_edge_list(reader, time_scale, rebase)
}

pub(crate) fn parse_edge_list(
    reader: impl BufRead,
    time_scale: u64,
    rebase: bool,
) -> Result<TemporalGraph, GraphError> {
    assert!(time_scale >= 1, "time_scale must be positive");
    let mut raw: Vec<(u64, u64, u64, usize)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut fields = body.split_whitespace();
        let mut next_int = |name: &str| -> Result<u64, GraphError> {
            let tok = fields.next().ok_or_else(|| GraphError::Parse {
                line: lineno,
                msg: format!("missing {name}"),
            })?;
            tok.parse::<u64>().map_err(|_| GraphError::Parse {
                line: lineno,
                msg: format!("invalid {name} {tok:?}"),
            })
        };
        let u = next_int("source")?;
        let v = next_int("target")?;
        let t = next_int("timestamp")?;
        if u == v {
            continue;
        }
        raw.push((u, v, t / time_scale, lineno));
    }
    if raw.is_empty() {
        return Err(GraphError::Empty);
    }

    let t_min = raw.iter().map(|&(_, _, t, _)| t).min().expect("non-empty");
    let shift = if rebase { t_min } else { 0 };
    if !rebase {
        if let Some(&(_, _, t, line)) = raw.iter().find(|&&(_, _, t, _)| t < 1) {
            return Err(GraphError::TimestampUnderflow { line, t });
        }
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v, _, _)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let remap: BTreeMap<u64, VertexId> =
        ids.iter().enumerate().map(|(i, &orig)| (orig, i as VertexId)).collect();

    let graph = TemporalGraph::from_temporal_edges_with_n(
        ids.len() as u32,
        raw.iter().map(|&(u, v, t, _)| (remap[&u], remap[&v], t - shift + u64::from(rebase))),
    );
    debug_assert!(graph.edge_count() > 0);
    Ok(graph)
}

/// Induced temporal subgraph on the vertex set `s`. Vertex ids are preserved
/// (the id space stays `0..n`); only edges with both endpoints in `s` survive.
pub fn induced_subgraph(g: &TemporalGraph, s: &[VertexId]) -> Result<TemporalGraph, GraphError> {
    let mut member = vec![false; g.vertex_count() as usize];
    for &x in s {
        if !g.contains_vertex(x) {
            return Err(GraphError::UnknownVertex(x));
        }
        member[x as usize] = true;
    }
    Ok(TemporalGraph::from_temporal_edges_with_n(
        g.vertex_count(),
        g.edges().iter().flat_map(|e| {
            let keep = member[e.u as usize] && member[e.v as usize];
            e.timestamps
                .iter()
                .filter(move |_| keep)
                .map(move |&t| (e.u, e.v, t))
        }),
    ))
}

/// Window view `[start, start + delta]`; the window must lie inside
/// `[1, t_max]`.
pub fn slice(g: &TemporalGraph, start: Timestamp, delta: u64) -> Result<SliceView<'_>, GraphError> {
    let end = start.checked_add(delta).ok_or(GraphError::WindowOutOfRange {
        start,
        end: Timestamp::MAX,
        t_max: g.t_max(),
    })?;
    if start < 1 || end > g.t_max() {
        return Err(GraphError::WindowOutOfRange { start, end, t_max: g.t_max() });
    }
    Ok(SliceView { base: g, start, end })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str, scale: u64, rebase: bool) -> Result<TemporalGraph, GraphError> {
        parse_edge_list(Cursor::new(text), scale, rebase)
    }

    #[test]
    fn load_dedups_drops_loops_and_rebases() {
        let g = parse("1 2 5\n2 1 5\n3 3 9\n", 1, true).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge(0).timestamps, vec![1]);
        assert_eq!(g.t_max(), 1);
        assert_eq!(g.temporal_edge_count(), 1);
    }

    #[test]
    fn load_applies_time_scale() {
        let g = parse("0 1 10\n0 1 20\n1 2 20\n", 10, true).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.t_max(), 2);
        let e01 = g.edge(g.edge_id(0, 1).unwrap());
        assert_eq!(e01.timestamps, vec![1, 2]);
        let e12 = g.edge(g.edge_id(1, 2).unwrap());
        assert_eq!(e12.timestamps, vec![2]);
    }

    #[test]
    fn load_accepts_comments_and_blank_lines() {
        let g = parse("# header\n\n  4 7 3\n7 4 4\n", 1, true).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge(0).timestamps, vec![1, 2]);
    }

    #[test]
    fn load_reports_malformed_line_number() {
        let err = parse("1 2 3\n1 x 4\n", 1, true).unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_rejects_empty_input() {
        assert!(matches!(parse("", 1, true), Err(GraphError::Empty)));
        assert!(matches!(parse("# only comments\n", 1, true), Err(GraphError::Empty)));
        // all lines self-loops → nothing survives
        assert!(matches!(parse("5 5 1\n", 1, true), Err(GraphError::Empty)));
    }

    #[test]
    fn load_without_rebase_requires_positive_times() {
        let err = parse("0 1 5\n", 10, false).unwrap_err();
        assert!(matches!(err, GraphError::TimestampUnderflow { line: 1, t: 0 }));
        let g = parse("0 1 5\n", 1, false).unwrap();
        assert_eq!(g.t_max(), 5);
    }

    #[test]
    fn adjacency_is_symmetric_and_sorted() {
        let g = parse("0 1 1\n0 2 2\n1 2 3\n2 3 4\n", 1, true).unwrap();
        for x in 0..g.vertex_count() {
            let mut prev = None;
            for &(w, id) in g.neighbors(x) {
                assert!(prev.is_none_or(|p| p < w));
                prev = Some(w);
                let back = g.neighbors(w).iter().any(|&(y, id2)| y == x && id2 == id);
                assert!(back, "missing reverse entry for ({x}, {w})");
            }
        }
        let sum: u64 = g.edges().iter().map(|e| e.timestamps.len() as u64).sum();
        assert_eq!(sum, g.temporal_edge_count());
    }

    #[test]
    fn induced_identity_and_empty() {
        let g = parse("0 1 1\n1 2 2\n0 2 3\n", 1, true).unwrap();
        let all: Vec<VertexId> = (0..g.vertex_count()).collect();
        assert_eq!(induced_subgraph(&g, &all).unwrap(), g);
        let none = induced_subgraph(&g, &[]).unwrap();
        assert_eq!(none.edge_count(), 0);
        assert_eq!(none.vertex_count(), g.vertex_count());
        assert!(matches!(
            induced_subgraph(&g, &[99]),
            Err(GraphError::UnknownVertex(99))
        ));
    }

    #[test]
    fn induced_filters_both_endpoints() {
        let g = parse("0 1 1\n1 2 2\n0 2 3\n2 3 4\n", 1, true).unwrap();
        let sub = induced_subgraph(&g, &[0, 1, 2]).unwrap();
        assert_eq!(sub.edge_count(), 3);
        assert!(sub.edge_id(2, 3).is_none());
        assert_eq!(sub.t_max(), 3);
    }

    #[test]
    fn slice_windows() {
        let g = parse("0 1 1\n0 1 5\n0 1 9\n1 2 9\n", 1, true).unwrap();
        let full = slice(&g, 1, g.t_max() - 1).unwrap();
        assert_eq!(full.temporal_edge_count(), g.temporal_edge_count());

        let point = slice(&g, 5, 0).unwrap();
        assert_eq!(point.edge_timestamps(g.edge_id(0, 1).unwrap()), &[5]);
        assert_eq!(point.edge_timestamps(g.edge_id(1, 2).unwrap()), &[] as &[Timestamp]);
        assert_eq!(point.active_edges().count(), 1);

        assert!(matches!(
            slice(&g, 0, 2),
            Err(GraphError::WindowOutOfRange { .. })
        ));
        assert!(matches!(
            slice(&g, 5, 100),
            Err(GraphError::WindowOutOfRange { .. })
        ));
    }

    #[test]
    fn edge_lookup() {
        let g = parse("0 1 1\n1 2 2\n", 1, true).unwrap();
        assert_eq!(g.edge_id(1, 0), Some(0));
        assert_eq!(g.edge_id(0, 2), None);
        assert_eq!(g.edge_id(0, 0), None);
        assert_eq!(g.temporal_degree(1), 2);
    }

    #[test]
    fn graph_is_shareable_across_threads() {
        fn assert_sync_send<T: Sync + Send>() {}
        assert_sync_send::<TemporalGraph>();
        assert_sync_send::<SliceView<'static>>();
    }
}
