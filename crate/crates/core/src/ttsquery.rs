//! Index-accelerated community search: answers a query with skyline and
//! activation lookups only, never recounting temporal triangles.

use std::cell::RefCell;
use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::graph::{EdgeId, GraphError, TemporalGraph, VertexId};
use crate::truss::{self, CommunityResult, ConnectivityMode};
use crate::ttindex::{IndexError, TTIndex};

#[derive(Debug, Error)]
pub enum QueryError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// Scans the query's incident edges once, keeping a deque of the running-max
/// trussness holders: entries below a new maximum are evicted, entries below
/// the current maximum never enter. Returns the final maximum and the edges
/// achieving it.
pub(crate) fn select_seeds(
    incident: impl IntoIterator<Item = (EdgeId, u64)>,
) -> (u64, Vec<EdgeId>) {
    let mut k_star = 0u64;
    let mut q: VecDeque<(EdgeId, u64)> = VecDeque::new();
    for (e, tau) in incident {
        if tau < k_star {
            continue;
        }
        while q.front().is_some_and(|&(_, front_tau)| front_tau < tau) {
            q.pop_front();
        }
        q.push_front((e, tau));
        k_star = k_star.max(tau);
    }
    (k_star, q.into_iter().map(|(e, _)| e).collect())
}

/// Query-time search against a prebuilt index. Equals [`truss::gs_search`] on
/// the index's source graph: `k*` is the maximum indexed trussness among the
/// query's incident edges, and components grow from the maximum holders
/// through triangles whose activation span fits `delta`, admitting only edges
/// whose indexed trussness reaches `k*`.
pub fn tts_query(
    g: &TemporalGraph,
    idx: &TTIndex,
    q: VertexId,
    delta: u64,
    mode: ConnectivityMode,
) -> Result<CommunityResult, QueryError> {
    idx.verify_graph(g)?;
    if !g.contains_vertex(q) {
        return Err(GraphError::UnknownVertex(q).into());
    }
    if !idx.covers(delta) {
        return Err(IndexError::CoverageExceeded { delta, built: idx.delta_built() }.into());
    }

    let (k_star, seeds) = select_seeds(
        g.neighbors(q)
            .iter()
            .map(|&(_, id)| (id, idx.skyline(id).query(delta).1)),
    );
    if k_star == 0 {
        return Ok(CommunityResult::empty(q, delta));
    }

    let tau_cache: RefCell<HashMap<EdgeId, u64>> = RefCell::new(HashMap::new());
    let components = truss::components_via(
        g,
        |e| {
            *tau_cache
                .borrow_mut()
                .entry(e)
                .or_insert_with(|| idx.skyline(e).query(delta).1)
                >= k_star
        },
        |key| idx.triangle_activation(key).is_some_and(|a| a <= delta),
        &seeds,
        mode,
    );
    Ok(CommunityResult { query: q, delta, k_star, components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tricount;
    use crate::truss::gs_search;
    use crate::ttindex::build_index;

    #[test]
    fn seed_scan_keeps_exactly_the_max_holders() {
        // trussness per incident edge in scan order
        let taus = [12u64, 12, 12, 12, 5, 8];
        let (k_star, mut seeds) = select_seeds(taus.iter().copied().enumerate());
        seeds.sort_unstable();
        assert_eq!(k_star, 12);
        assert_eq!(seeds, vec![0, 1, 2, 3]);
    }

    #[test]
    fn seed_scan_matches_max_then_filter() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move |m: u64| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state % m
        };
        for _ in 0..500 {
            let len = next(9) as usize;
            let taus: Vec<u64> = (0..len).map(|_| next(6)).collect();
            let (k, mut seeds) = select_seeds(taus.iter().copied().enumerate());
            seeds.sort_unstable();
            let expect_k = taus.iter().copied().max().unwrap_or(0);
            let expect: Vec<EdgeId> = taus
                .iter()
                .enumerate()
                .filter(|&(_, &t)| t == expect_k && expect_k > 0)
                .map(|(i, _)| i)
                .collect();
            assert_eq!(k, expect_k, "taus {taus:?}");
            if expect_k > 0 {
                assert_eq!(seeds, expect, "taus {taus:?}");
            }
        }
    }

    fn fixture() -> TemporalGraph {
        TemporalGraph::from_temporal_edges([
            (0, 1, 1),
            (0, 1, 3),
            (0, 2, 2),
            (1, 2, 2),
            (1, 3, 2),
            (2, 3, 3),
            (2, 4, 7),
            (3, 4, 8),
            (0, 4, 9),
        ])
    }

    #[test]
    fn matches_global_search_on_fixture() {
        let g = fixture();
        let idx = build_index(&g);
        for q in 0..g.vertex_count() {
            for delta in 0..g.t_max() {
                for mode in [ConnectivityMode::VertexShared, ConnectivityMode::EdgeShared] {
                    let a = gs_search(&g, q, delta, mode).unwrap();
                    let b = tts_query(&g, &idx, q, delta, mode).unwrap();
                    assert_eq!(a, b, "q={q} delta={delta} mode={mode:?}");
                }
            }
        }
    }

    #[test]
    fn query_performs_no_counting() {
        let g = fixture();
        let idx = build_index(&g);
        let before = tricount::counting_calls();
        for q in 0..g.vertex_count() {
            tts_query(&g, &idx, q, 3, ConnectivityMode::VertexShared).unwrap();
        }
        assert_eq!(tricount::counting_calls(), before);
    }

    #[test]
    fn triangle_free_incidence_yields_empty_result() {
        let g = TemporalGraph::from_temporal_edges_with_n(5, [(0, 1, 1), (1, 2, 5), (3, 4, 2)]);
        let idx = build_index(&g);
        let r = tts_query(&g, &idx, 1, 4, ConnectivityMode::VertexShared).unwrap();
        assert_eq!(r.k_star, 0);
        assert!(r.is_empty());
    }

    #[test]
    fn mismatched_graph_is_rejected() {
        let g = fixture();
        let idx = build_index(&g);
        let other = TemporalGraph::from_temporal_edges([(0, 1, 1), (0, 2, 1), (1, 2, 1)]);
        assert!(matches!(
            tts_query(&other, &idx, 0, 1, ConnectivityMode::VertexShared),
            Err(QueryError::Index(IndexError::FingerprintMismatch))
        ));
        assert!(matches!(
            tts_query(&g, &idx, 99, 1, ConnectivityMode::VertexShared),
            Err(QueryError::Graph(GraphError::UnknownVertex(99)))
        ));
    }

    #[test]
    fn partial_index_rejects_uncovered_delta() {
        let g = TemporalGraph::from_temporal_edges([(0, 1, 1), (0, 2, 5), (1, 2, 9)]);
        let idx = crate::ttindex::build_index_with(&g, Some(2), |_, _| true).unwrap();
        assert!(matches!(
            tts_query(&g, &idx, 0, 7, ConnectivityMode::VertexShared),
            Err(QueryError::Index(IndexError::CoverageExceeded { .. }))
        ));
    }
}
