//! Temporal trussness index: per-edge skylines of `(delta, trussness)` pairs
//! plus the minimal activation span of every triangle, built bottom-up over
//! increasing `delta` and persisted in a compact binary format.
//!
//! The builder never recounts a window from scratch. Widening every length-
//! `delta` window by one tick only changes triangles touched by the edges of
//! the newly exposed tick, and the per-window increments telescope into the
//! global count: with `S` the sum of window increments at level `delta` and
//! `C` the carried subtrahend from the previous level, the global count grows
//! by exactly `S - C`, and the next carry is `S` minus the first window's
//! increment. Supports grow by the same amounts through the triangle's three
//! edges, so one pass per level keeps every `N` and `TSup` exact.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::graph::{range_count, EdgeId, TemporalGraph, Timestamp, VertexId};
use crate::tricount::{self, TriangleCounts, TriangleKey};
use crate::truss::{decompose_with, TieBreak};

const MAGIC: &[u8; 4] = b"TTIX";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported index format version {found} (expected {FORMAT_VERSION})")]
    UnsupportedVersion { found: u32 },
    #[error("index file truncated")]
    Truncated,
    #[error("index file corrupt: {0}")]
    Corrupt(&'static str),
    #[error("index was built from a different graph")]
    FingerprintMismatch,
    #[error("counter state is at delta {expected}, got step for {got}")]
    WrongDelta { expected: u64, got: u64 },
    #[error("delta {delta} beyond index coverage (built up to {built})")]
    CoverageExceeded { delta: u64, built: u64 },
    #[error("edge ({0}, {1}) not present in the index")]
    UnknownEdge(VertexId, VertexId),
    #[error("index build cancelled")]
    Cancelled,
}

/// Ordered `(delta, trussness)` pairs, strictly increasing in both
/// coordinates. Querying returns the pair with the largest stored delta not
/// exceeding the requested one.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Skyline {
    pairs: Vec<(u64, u64)>,
}

impl Skyline {
    pub fn from_pairs(pairs: Vec<(u64, u64)>) -> Result<Self, IndexError> {
        let ok = pairs.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1)
            && pairs.first().is_none_or(|&(_, tau)| tau > 0);
        if !ok {
            return Err(IndexError::Corrupt("skyline not strictly increasing"));
        }
        Ok(Skyline { pairs })
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `(d, tau)` with `d` the largest stored delta `<= delta`, or `(0, 0)`
    /// when nothing that early is stored.
    pub fn query(&self, delta: u64) -> (u64, u64) {
        let idx = self.pairs.partition_point(|&(d, _)| d <= delta);
        if idx == 0 {
            (0, 0)
        } else {
            self.pairs[idx - 1]
        }
    }

    fn push(&mut self, delta: u64, tau: u64) {
        debug_assert!(self.pairs.last().map_or(tau > 0, |&(d, t)| d < delta && t < tau));
        self.pairs.push((delta, tau));
    }
}

/// Incremental per-level counting state. Feed it `delta = 0, 1, 2, ...` in
/// order; after each step it holds exact `N(triangle, delta)` for every
/// triangle with a nonzero count and exact `TSup(edge, delta)` for every edge.
pub struct SliceCounters {
    t_max: Timestamp,
    edge_count: usize,
    /// edges active at each tick
    ticks: HashMap<Timestamp, Vec<EdgeId>>,
    /// canonical edge ids of every static triangle
    tri_edges: HashMap<TriangleKey, [EdgeId; 3]>,
    /// saturation targets: the full cross-product size per triangle
    full: HashMap<TriangleKey, u64>,
    unsaturated: usize,
    n_total: TriangleCounts,
    tsup: Vec<u64>,
    carry: HashMap<TriangleKey, u64>,
    activation: HashMap<TriangleKey, u64>,
    seen_at: HashMap<TriangleKey, (u64, u64)>,
    delta_done: Option<u64>,
}

impl SliceCounters {
    pub fn new(g: &TemporalGraph) -> Self {
        let mut ticks: HashMap<Timestamp, Vec<EdgeId>> = HashMap::new();
        for (id, e) in g.edges().iter().enumerate() {
            for &t in &e.timestamps {
                ticks.entry(t).or_default().push(id);
            }
        }
        let mut tri_edges = HashMap::new();
        let mut full = HashMap::new();
        tricount::for_each_triangle(g, |key, edges| {
            let product: u64 = edges
                .iter()
                .map(|&e| g.edge(e).timestamps.len() as u64)
                .product();
            tri_edges.insert(key, edges);
            full.insert(key, product);
        });
        let unsaturated = full.len();
        SliceCounters {
            t_max: g.t_max(),
            edge_count: g.edge_count(),
            ticks,
            tri_edges,
            full,
            unsaturated,
            n_total: TriangleCounts::new(),
            tsup: vec![0; g.edge_count()],
            carry: HashMap::new(),
            activation: HashMap::new(),
            seen_at: HashMap::new(),
            delta_done: None,
        }
    }

    /// Number of triangles whose count has not yet reached the full product.
    pub fn unsaturated(&self) -> usize {
        self.unsaturated
    }

    pub fn delta_done(&self) -> Option<u64> {
        self.delta_done
    }

    /// Exact `TSup(edge, delta_done)` by edge id.
    pub fn supports(&self) -> &[u64] {
        &self.tsup
    }

    /// Exact `N(triangle, delta_done)`; only nonzero entries are present.
    pub fn triangle_counts(&self) -> &TriangleCounts {
        &self.n_total
    }

    /// Minimal delta with `N > 0`, for every triangle activated so far.
    pub fn activations(&self) -> &HashMap<TriangleKey, u64> {
        &self.activation
    }

    /// Advances the state from `delta - 1` to `delta`.
    pub fn advance(&mut self, g: &TemporalGraph, delta: u64) -> Result<(), IndexError> {
        let expected = self.delta_done.map_or(0, |d| d + 1);
        if delta != expected {
            return Err(IndexError::WrongDelta { expected, got: delta });
        }
        debug_assert_eq!(g.edge_count(), self.edge_count);

        // Per-level increment sums and the first-window share of each.
        let mut level: HashMap<TriangleKey, u64> = HashMap::new();
        let mut first_window: HashMap<TriangleKey, u64> = HashMap::new();

        let upper = self.t_max.saturating_sub(delta);
        for t in 1..=upper {
            let tick = t + delta;
            let Some(snapshot) = self.ticks.get(&tick) else { continue };
            for &eid in snapshot {
                let (u, v) = (g.edge(eid).u, g.edge(eid).v);
                let nu = g.neighbors(u);
                let nv = g.neighbors(v);
                let (mut i, mut j) = (0, 0);
                while i < nu.len() && j < nv.len() {
                    let (wu, _) = nu[i];
                    let (wv, _) = nv[j];
                    if wu < wv {
                        i += 1;
                    } else if wv < wu {
                        j += 1;
                    } else {
                        let key = TriangleKey::new(u, v, wu);
                        // several snapshot edges can visit the same triangle
                        // in the same window; take the first
                        if self.seen_at.insert(key, (delta, tick)) != Some((delta, tick)) {
                            let lists = self.tri_edges[&key]
                                .map(|e| g.edge(e).timestamps.as_slice());
                            let wide: u64 = lists
                                .iter()
                                .map(|l| range_count(l, t, t + delta) as u64)
                                .product();
                            if wide > 0 {
                                let narrow: u64 = if delta == 0 {
                                    0
                                } else {
                                    lists
                                        .iter()
                                        .map(|l| range_count(l, t, t + delta - 1) as u64)
                                        .product()
                                };
                                let grew = wide - narrow;
                                if grew > 0 {
                                    *level.entry(key).or_insert(0) += grew;
                                    if t == 1 {
                                        *first_window.entry(key).or_insert(0) += grew;
                                    }
                                }
                            }
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }

        for (key, sum) in level {
            let carried = self.carry.remove(&key).unwrap_or(0);
            let grow = sum
                .checked_sub(carried)
                .expect("telescoped increment went negative");
            if grow > 0 {
                let n = self.n_total.entry(key).or_insert(0);
                if *n == 0 {
                    self.activation.insert(key, delta);
                }
                *n += grow;
                if *n == self.full[&key] {
                    self.unsaturated -= 1;
                }
                debug_assert!(*n <= self.full[&key]);
                for e in self.tri_edges[&key] {
                    self.tsup[e] += grow;
                }
            }
            let next_carry = sum - first_window.get(&key).copied().unwrap_or(0);
            if next_carry > 0 {
                self.carry.insert(key, next_carry);
            }
        }
        debug_assert!(self.carry.values().all(|&c| c > 0));

        self.delta_done = Some(delta);
        Ok(())
    }
}

/// The persisted query accelerator: one skyline per edge, one activation span
/// per triangle, bound to its source graph by fingerprint.
#[derive(Debug, Clone, PartialEq)]
pub struct TTIndex {
    fingerprint: u64,
    t_max: Timestamp,
    delta_built: u64,
    saturated: bool,
    endpoints: Vec<(VertexId, VertexId)>,
    skylines: Vec<Skyline>,
    activation: HashMap<TriangleKey, u64>,
}

impl TTIndex {
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn t_max(&self) -> Timestamp {
        self.t_max
    }

    /// Last delta level the builder completed.
    pub fn delta_built(&self) -> u64 {
        self.delta_built
    }

    /// True once every triangle reached its full count during the build; all
    /// larger deltas then answer from the stored skylines.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn covers(&self, delta: u64) -> bool {
        self.saturated || delta <= self.delta_built
    }

    /// Fails unless the index was built from exactly this graph.
    pub fn verify_graph(&self, g: &TemporalGraph) -> Result<(), IndexError> {
        if self.fingerprint == g.fingerprint() {
            Ok(())
        } else {
            Err(IndexError::FingerprintMismatch)
        }
    }

    pub fn skyline(&self, id: EdgeId) -> &Skyline {
        &self.skylines[id]
    }

    /// Skyline lookup by endpoints: the `(d, tau)` pair stored for the largest
    /// `d <= delta`, or `(0, 0)`.
    pub fn lookup(&self, u: VertexId, v: VertexId, delta: u64) -> Result<(u64, u64), IndexError> {
        let pair = if u < v { (u, v) } else { (v, u) };
        let id = self
            .endpoints
            .binary_search(&pair)
            .map_err(|_| IndexError::UnknownEdge(u, v))?;
        self.lookup_edge(id, delta)
    }

    /// Skyline lookup by edge id (edge ids match the source graph's order).
    pub fn lookup_edge(&self, id: EdgeId, delta: u64) -> Result<(u64, u64), IndexError> {
        if !self.covers(delta) {
            return Err(IndexError::CoverageExceeded { delta, built: self.delta_built });
        }
        Ok(self.skylines[id].query(delta))
    }

    /// Minimal span at which the triangle gains a qualifying triple, if it
    /// did within the built range.
    pub fn triangle_activation(&self, key: &TriangleKey) -> Option<u64> {
        self.activation.get(key).copied()
    }

    pub fn triangle_count(&self) -> usize {
        self.activation.len()
    }

    /// Total stored skyline pairs across all edges.
    pub fn skyline_pair_count(&self) -> u64 {
        self.skylines.iter().map(|s| s.pairs.len() as u64).sum()
    }

    /// On-disk size of the per-edge section, in bytes.
    pub fn edge_section_bytes(&self) -> u64 {
        self.endpoints.len() as u64 * 12 + self.skyline_pair_count() * 16
    }

    /// On-disk size of the per-triangle section, in bytes.
    pub fn triangle_section_bytes(&self) -> u64 {
        self.activation.len() as u64 * 20
    }
}

/// Builds the full index for `g` (every delta up to saturation).
pub fn build_index(g: &TemporalGraph) -> TTIndex {
    build_index_with(g, None, |_, _| true).expect("uncancelled build cannot fail")
}

/// Builds the index up to `delta_max` (full span when `None`), reporting each
/// completed level to `progress`; a `false` return cancels the build.
///
/// Construction runs one counting step and one decomposition per level,
/// appending a skyline pair whenever an edge's trussness strictly increases.
/// The loop exits early once every triangle saturates; answers for larger
/// deltas are unchanged from that point on.
pub fn build_index_with(
    g: &TemporalGraph,
    delta_max: Option<u64>,
    mut progress: impl FnMut(u64, u64) -> bool,
) -> Result<TTIndex, IndexError> {
    let m = g.edge_count();
    let span_last = g.t_max().saturating_sub(1);
    let planned_last = delta_max.map_or(span_last, |d| d.min(span_last));

    let mut counters = SliceCounters::new(g);
    let mut skylines = vec![Skyline::default(); m];
    let mut last_tau = vec![0u64; m];
    let mut delta_built = 0;
    let mut saturated = counters.unsaturated() == 0;

    for delta in 0..=planned_last {
        counters.advance(g, delta).expect("levels advance sequentially");
        let decomp = decompose_with(
            g,
            vec![true; m],
            counters.supports().to_vec(),
            counters.triangle_counts(),
            None,
            TieBreak::LowestEdgeId,
        );
        for e in 0..m {
            let tau = decomp.trussness[e];
            if tau > last_tau[e] {
                skylines[e].push(delta, tau);
                last_tau[e] = tau;
            }
        }
        delta_built = delta;
        if !progress(delta, planned_last) {
            return Err(IndexError::Cancelled);
        }
        if counters.unsaturated() == 0 {
            saturated = true;
            break;
        }
    }
    if delta_built == span_last {
        // every triple spans at most t_max - 1
        debug_assert_eq!(counters.unsaturated(), 0);
        saturated = true;
    }

    Ok(TTIndex {
        fingerprint: g.fingerprint(),
        t_max: g.t_max(),
        delta_built,
        saturated,
        endpoints: g.edges().iter().map(|e| (e.u, e.v)).collect(),
        skylines,
        activation: counters.activation,
    })
}

fn put_u32(buf: &mut Vec<u8>, x: u32) {
    buf.extend_from_slice(&x.to_le_bytes());
}

fn put_u64(buf: &mut Vec<u8>, x: u64) {
    buf.extend_from_slice(&x.to_le_bytes());
}

/// Serializes the index. Layout (little-endian): magic `TTIX`, version u32,
/// fingerprint u64, t_max u64, delta_built u64, saturated u8, edge count u64,
/// triangle count u64; per edge `u:u32 v:u32 len:u32 (delta:u64 tau:u64)*`;
/// per triangle (sorted) `a:u32 b:u32 c:u32 activation:u64`.
pub fn save_index(idx: &TTIndex, path: impl AsRef<Path>) -> Result<(), IndexError> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    put_u32(&mut buf, FORMAT_VERSION);
    put_u64(&mut buf, idx.fingerprint);
    put_u64(&mut buf, idx.t_max);
    put_u64(&mut buf, idx.delta_built);
    buf.push(u8::from(idx.saturated));
    put_u64(&mut buf, idx.endpoints.len() as u64);
    put_u64(&mut buf, idx.activation.len() as u64);
    for (id, &(u, v)) in idx.endpoints.iter().enumerate() {
        put_u32(&mut buf, u);
        put_u32(&mut buf, v);
        let pairs = idx.skylines[id].pairs();
        put_u32(&mut buf, pairs.len() as u32);
        for &(d, tau) in pairs {
            put_u64(&mut buf, d);
            put_u64(&mut buf, tau);
        }
    }
    let mut tris: Vec<(&TriangleKey, &u64)> = idx.activation.iter().collect();
    tris.sort();
    for (key, &act) in tris {
        put_u32(&mut buf, key.a);
        put_u32(&mut buf, key.b);
        put_u32(&mut buf, key.c);
        put_u64(&mut buf, act);
    }
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IndexError> {
        if self.pos + n > self.data.len() {
            return Err(IndexError::Truncated);
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, IndexError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, IndexError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, IndexError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Loads an index written by [`save_index`], validating magic, version, and
/// structural invariants. Pair it with [`TTIndex::verify_graph`] before
/// querying against a graph.
pub fn load_index(path: impl AsRef<Path>) -> Result<TTIndex, IndexError> {
    let mut data = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut data)?;
    let mut cur = Cursor { data: &data, pos: 0 };

    if cur.take(4)? != MAGIC {
        return Err(IndexError::BadMagic);
    }
    let version = cur.u32()?;
    if version != FORMAT_VERSION {
        return Err(IndexError::UnsupportedVersion { found: version });
    }
    let fingerprint = cur.u64()?;
    let t_max = cur.u64()?;
    let delta_built = cur.u64()?;
    let saturated = match cur.u8()? {
        0 => false,
        1 => true,
        _ => return Err(IndexError::Corrupt("bad saturation flag")),
    };
    let edge_count = cur.u64()? as usize;
    let tri_count = cur.u64()? as usize;

    let mut endpoints = Vec::with_capacity(edge_count);
    let mut skylines = Vec::with_capacity(edge_count);
    for _ in 0..edge_count {
        let u = cur.u32()?;
        let v = cur.u32()?;
        if u >= v {
            return Err(IndexError::Corrupt("edge endpoints out of order"));
        }
        if endpoints.last().is_some_and(|&last| last >= (u, v)) {
            return Err(IndexError::Corrupt("edges not sorted"));
        }
        endpoints.push((u, v));
        let len = cur.u32()? as usize;
        let mut pairs = Vec::with_capacity(len);
        for _ in 0..len {
            let d = cur.u64()?;
            let tau = cur.u64()?;
            pairs.push((d, tau));
        }
        skylines.push(Skyline::from_pairs(pairs)?);
    }
    let mut activation = HashMap::with_capacity(tri_count);
    let mut last_key: Option<TriangleKey> = None;
    for _ in 0..tri_count {
        let a = cur.u32()?;
        let b = cur.u32()?;
        let c = cur.u32()?;
        if !(a < b && b < c) {
            return Err(IndexError::Corrupt("triangle key not canonical"));
        }
        let key = TriangleKey { a, b, c };
        if last_key.is_some_and(|k| k >= key) {
            return Err(IndexError::Corrupt("triangles not sorted"));
        }
        last_key = Some(key);
        activation.insert(key, cur.u64()?);
    }
    if cur.pos != data.len() {
        return Err(IndexError::Corrupt("trailing bytes"));
    }

    Ok(TTIndex { fingerprint, t_max, delta_built, saturated, endpoints, skylines, activation })
}
