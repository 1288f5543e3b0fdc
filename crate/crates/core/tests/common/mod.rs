//! Shared brute-force oracles and instance generators. Everything here takes
//! the slow, obviously-correct route on purpose: exhaustive triple loops,
//! explicit triangle-adjacency graphs, full subset enumeration. Library code
//! is checked against these, never the other way round.
#![allow(dead_code)]
#![allow(clippy::needless_range_loop)] // oracle loops index bitmask positions

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashSet, VecDeque};

use temporal_truss::gen::{generate, GenSpec, PlantedSpec};
use temporal_truss::graph::{EdgeId, TemporalGraph, Timestamp, VertexId};
use temporal_truss::truss::ConnectivityMode;
use temporal_truss::tricount::TriangleKey;

/// Exhaustive count of triples with pairwise span within `delta`.
pub fn brute_triple_count(t1: &[Timestamp], t2: &[Timestamp], t3: &[Timestamp], delta: u64) -> u64 {
    let mut n = 0;
    for &x in t1 {
        for &y in t2 {
            for &z in t3 {
                if x.max(y).max(z) - x.min(y).min(z) <= delta {
                    n += 1;
                }
            }
        }
    }
    n
}

/// All static triangles by cubic vertex-triple scan.
pub fn brute_triangles(g: &TemporalGraph) -> Vec<(TriangleKey, [EdgeId; 3])> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let Some(eab) = g.edge_id(a, b) else { continue };
            for c in (b + 1)..n {
                let (Some(eac), Some(ebc)) = (g.edge_id(a, c), g.edge_id(b, c)) else { continue };
                out.push((TriangleKey::new(a, b, c), [eab, eac, ebc]));
            }
        }
    }
    out
}

/// Per-triangle temporal counts by brute force.
pub fn brute_triangle_counts(g: &TemporalGraph, delta: u64) -> BTreeMap<TriangleKey, u64> {
    brute_triangles(g)
        .into_iter()
        .map(|(key, [e1, e2, e3])| {
            let n = brute_triple_count(
                &g.edge(e1).timestamps,
                &g.edge(e2).timestamps,
                &g.edge(e3).timestamps,
                delta,
            );
            (key, n)
        })
        .collect()
}

/// Per-edge temporal support straight from the definition: sum the counts of
/// every triangle the edge belongs to.
pub fn brute_support(g: &TemporalGraph, delta: u64) -> Vec<u64> {
    let mut sup = vec![0u64; g.edge_count()];
    for (key, edges) in brute_triangles(g) {
        let _ = key;
        let n = brute_triple_count(
            &g.edge(edges[0]).timestamps,
            &g.edge(edges[1]).timestamps,
            &g.edge(edges[2]).timestamps,
            delta,
        );
        for e in edges {
            sup[e] += n;
        }
    }
    sup
}

/// Trussness by full subset enumeration: for every edge subset, the minimum
/// in-subset support; every edge's trussness is the best minimum over subsets
/// containing it. Only feasible for tiny graphs.
pub fn brute_trussness_exhaustive(g: &TemporalGraph, delta: u64) -> Vec<u64> {
    let m = g.edge_count();
    assert!(m <= 18, "exhaustive oracle needs a tiny graph, got {m} edges");
    let tris: Vec<(u32, u64)> = brute_triangles(g)
        .into_iter()
        .filter_map(|(_, edges)| {
            let n = brute_triple_count(
                &g.edge(edges[0]).timestamps,
                &g.edge(edges[1]).timestamps,
                &g.edge(edges[2]).timestamps,
                delta,
            );
            (n > 0).then(|| (edges.iter().fold(0u32, |acc, &e| acc | (1 << e)), n))
        })
        .collect();

    let mut best = vec![0u64; m];
    let mut sup = vec![0u64; m];
    for subset in 1u32..(1 << m) {
        for s in sup.iter_mut() {
            *s = 0;
        }
        for &(mask, n) in &tris {
            if mask & subset == mask {
                let mut bits = mask;
                while bits != 0 {
                    let e = bits.trailing_zeros() as usize;
                    sup[e] += n;
                    bits &= bits - 1;
                }
            }
        }
        let mut min_sup = u64::MAX;
        for e in 0..m {
            if subset & (1 << e) != 0 {
                min_sup = min_sup.min(sup[e]);
            }
        }
        if min_sup == 0 {
            continue;
        }
        for e in 0..m {
            if subset & (1 << e) != 0 && best[e] < min_sup {
                best[e] = min_sup;
            }
        }
    }
    best
}

/// Higher-order components by the explicit route: list qualifying triangles,
/// build their adjacency graph, BFS it, and project back to edges.
pub fn brute_components(
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
    let tris: Vec<(TriangleKey, [EdgeId; 3])> = brute_triangles(g)
        .into_iter()
        .filter(|&(_, edges)| {
            edges.iter().all(|&e| in_set[e])
                && brute_triple_count(
                    &g.edge(edges[0]).timestamps,
                    &g.edge(edges[1]).timestamps,
                    &g.edge(edges[2]).timestamps,
                    delta,
                ) > 0
        })
        .collect();

    let adjacent = |a: &(TriangleKey, [EdgeId; 3]), b: &(TriangleKey, [EdgeId; 3])| -> bool {
        match mode {
            ConnectivityMode::VertexShared => {
                let va = a.0.vertices();
                b.0.vertices().iter().any(|x| va.contains(x))
            }
            ConnectivityMode::EdgeShared => a.1.iter().any(|e| b.1.contains(e)),
        }
    };

    let t = tris.len();
    let mut comp_of = vec![usize::MAX; t];
    let mut n_comp = 0;
    for start in 0..t {
        if comp_of[start] != usize::MAX {
            continue;
        }
        let c = n_comp;
        n_comp += 1;
        let mut queue = VecDeque::from([start]);
        comp_of[start] = c;
        while let Some(i) = queue.pop_front() {
            for j in 0..t {
                if comp_of[j] == usize::MAX && adjacent(&tris[i], &tris[j]) {
                    comp_of[j] = c;
                    queue.push_back(j);
                }
            }
        }
    }

    let mut edge_comp: Vec<Option<usize>> = vec![None; g.edge_count()];
    for (i, &(_, edges)) in tris.iter().enumerate() {
        for e in edges {
            edge_comp[e] = Some(comp_of[i]);
        }
    }
    let wanted: HashSet<usize> = seeds.iter().filter_map(|&s| edge_comp[s]).collect();
    let mut comps: Vec<Vec<EdgeId>> = Vec::new();
    for c in wanted {
        let mut edges: Vec<EdgeId> =
            (0..g.edge_count()).filter(|&e| edge_comp[e] == Some(c)).collect();
        edges.sort_unstable();
        comps.push(edges);
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Threshold-restricted expansion closure from a fresh state: the edges with
/// support at least `k` reachable from the passing query-incident edges
/// through triangles with a nonzero count, chained per `mode`. Mirrors the
/// contract of `expanding` as a fixpoint instead of a frontier walk.
pub fn brute_expansion(
    g: &TemporalGraph,
    delta: u64,
    q: VertexId,
    k: u64,
    mode: ConnectivityMode,
) -> Vec<EdgeId> {
    let sup = brute_support(g, delta);
    let tris: Vec<(TriangleKey, [EdgeId; 3])> = brute_triangles(g)
        .into_iter()
        .filter(|&(_, edges)| {
            brute_triple_count(
                &g.edge(edges[0]).timestamps,
                &g.edge(edges[1]).timestamps,
                &g.edge(edges[2]).timestamps,
                delta,
            ) > 0
        })
        .collect();

    let mut batch: HashSet<EdgeId> = g
        .neighbors(q)
        .iter()
        .filter(|&&(_, id)| sup[id] >= k)
        .map(|&(_, id)| id)
        .collect();
    loop {
        let crossed: Vec<&(TriangleKey, [EdgeId; 3])> =
            tris.iter().filter(|(_, edges)| edges.iter().any(|e| batch.contains(e))).collect();
        let mut exposed: Vec<[EdgeId; 3]> = crossed.iter().map(|t| t.1).collect();
        if mode == ConnectivityMode::VertexShared {
            let active: HashSet<VertexId> =
                crossed.iter().flat_map(|(key, _)| key.vertices()).collect();
            exposed.extend(
                tris.iter()
                    .filter(|(key, _)| key.vertices().iter().any(|x| active.contains(x)))
                    .map(|t| t.1),
            );
        }
        let before = batch.len();
        for edges in exposed {
            for e in edges {
                if sup[e] >= k {
                    batch.insert(e);
                }
            }
        }
        if batch.len() == before {
            break;
        }
    }
    let mut out: Vec<EdgeId> = batch.into_iter().collect();
    out.sort_unstable();
    out
}

/// Random graph drawn from a mix of shapes: plain sparse, denser, and planted.
pub fn random_graph(seed: u64, max_n: u32) -> TemporalGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15));
    let n = rng.random_range(4..=max_n.max(5));
    let pairs = u64::from(n) * u64::from(n - 1) / 2;
    let m = match rng.random_range(0..3u32) {
        0 => rng.random_range(0..=pairs.min(u64::from(n) * 2)),
        1 => rng.random_range(pairs / 2..=pairs),
        _ => rng.random_range(0..=pairs),
    };
    let t_max = rng.random_range(2..=12);
    let mut spec = GenSpec::new(n, m, t_max, seed ^ 0x5bd1e995);
    spec.max_timestamps_per_edge = rng.random_range(1..=4);
    if rng.random_range(0..4u32) == 0 && n >= 5 {
        let size = rng.random_range(3..=n.min(6));
        if u64::from(size) * u64::from(size - 1) / 2 <= m {
            spec = spec.with_planted(PlantedSpec {
                size,
                internal_spread: rng.random_range(0..=2),
                external_spread: t_max,
            });
        }
    }
    generate(&spec).expect("spec is feasible by construction")
}

/// Random (graph, query, delta) instance for cross-engine tests.
pub fn random_instance(seed: u64, max_n: u32) -> (TemporalGraph, VertexId, u64) {
    let g = random_graph(seed, max_n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1234_5678_9abc_def0);
    let q = rng.random_range(0..g.vertex_count());
    let delta = rng.random_range(0..=g.t_max().max(1));
    (g, q, delta)
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
