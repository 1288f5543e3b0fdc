//! Seeded synthetic temporal graphs, optionally with a planted dense
//! community, for oracle tests and benchmarks. All sampling stays on integer
//! code paths so a spec reproduces the identical graph everywhere.

use std::collections::HashSet;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{induced_subgraph, TemporalGraph, Timestamp, VertexId};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("infeasible spec: {0}")]
    Infeasible(String),
    #[error("fraction {0} outside (0, 1]")]
    BadFraction(f64),
}

/// A planted community: a clique on the first `size` vertex ids whose
/// timestamps cluster within `internal_spread` of a common center, against a
/// background whose per-edge timestamps spread by `external_spread`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlantedSpec {
    pub size: u32,
    pub internal_spread: u64,
    pub external_spread: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub n: u32,
    pub m_static: u64,
    pub t_max: Timestamp,
    pub seed: u64,
    /// Each static edge draws between 1 and this many timestamps.
    pub max_timestamps_per_edge: u32,
    pub planted: Option<PlantedSpec>,
}

impl GenSpec {
    pub fn new(n: u32, m_static: u64, t_max: Timestamp, seed: u64) -> Self {
        GenSpec { n, m_static, t_max, seed, max_timestamps_per_edge: 3, planted: None }
    }

    pub fn with_planted(mut self, planted: PlantedSpec) -> Self {
        self.planted = Some(planted);
        self
    }
}

fn pair_count(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Generates the graph described by `spec`; identical specs produce identical
/// graphs.
pub fn generate(spec: &GenSpec) -> Result<TemporalGraph, GenError> {
    let n = u64::from(spec.n);
    if spec.t_max < 1 {
        return Err(GenError::Infeasible("t_max must be at least 1".into()));
    }
    if spec.max_timestamps_per_edge < 1 {
        return Err(GenError::Infeasible("max_timestamps_per_edge must be at least 1".into()));
    }
    if spec.m_static > pair_count(n) {
        return Err(GenError::Infeasible(format!(
            "{} static edges requested but only {} vertex pairs exist",
            spec.m_static,
            pair_count(n)
        )));
    }
    let planted_size = spec.planted.map_or(0, |p| u64::from(p.size));
    if planted_size > n {
        return Err(GenError::Infeasible("planted community larger than the graph".into()));
    }
    let clique_edges = pair_count(planted_size);
    if clique_edges > spec.m_static {
        return Err(GenError::Infeasible(format!(
            "planted clique needs {clique_edges} edges but m_static is {}",
            spec.m_static
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::with_capacity(spec.m_static as usize);
    for u in 0..planted_size as VertexId {
        for v in (u + 1)..planted_size as VertexId {
            pairs.push((u, v));
        }
    }
    let background = spec.m_static - clique_edges;
    let in_clique =
        |u: VertexId, v: VertexId| u64::from(u) < planted_size && u64::from(v) < planted_size;
    let available = pair_count(n) - clique_edges;
    if background > available / 2 {
        // dense request: enumerate the free pairs and take a shuffled prefix
        let mut free: Vec<(VertexId, VertexId)> = Vec::with_capacity(available as usize);
        for u in 0..spec.n {
            for v in (u + 1)..spec.n {
                if !in_clique(u, v) {
                    free.push((u, v));
                }
            }
        }
        let (head, _) = free.partial_shuffle(&mut rng, background as usize);
        pairs.extend_from_slice(head);
    } else {
        let mut chosen: HashSet<(VertexId, VertexId)> = HashSet::new();
        while (chosen.len() as u64) < background {
            let a = rng.random_range(0..spec.n);
            let b = rng.random_range(0..spec.n);
            if a == b {
                continue;
            }
            let p = (a.min(b), a.max(b));
            if in_clique(p.0, p.1) {
                continue;
            }
            chosen.insert(p);
        }
        let mut extra: Vec<_> = chosen.into_iter().collect();
        extra.sort_unstable();
        pairs.extend(extra);
    }

    let center = spec.planted.map(|p| {
        let sigma = p.internal_spread.min(spec.t_max / 2);
        rng.random_range(1 + sigma..=spec.t_max.saturating_sub(sigma).max(1 + sigma))
    });

    let mut triples: Vec<(VertexId, VertexId, Timestamp)> = Vec::new();
    for &(u, v) in &pairs {
        let k = rng.random_range(1..=spec.max_timestamps_per_edge);
        let (lo, hi) = if in_clique(u, v) {
            let p = spec.planted.expect("clique pair implies planted");
            let c = center.expect("planted center");
            (c.saturating_sub(p.internal_spread).max(1), (c + p.internal_spread).min(spec.t_max))
        } else if let Some(p) = spec.planted {
            let c = rng.random_range(1..=spec.t_max);
            (c.saturating_sub(p.external_spread).max(1), (c + p.external_spread).min(spec.t_max))
        } else {
            (1, spec.t_max)
        };
        for _ in 0..k {
            triples.push((u, v, rng.random_range(lo..=hi)));
        }
    }
    Ok(TemporalGraph::from_temporal_edges_with_n(spec.n, triples))
}

/// Induced subgraph on a uniform random vertex sample of the given fraction.
pub fn downsample_vertices(
    g: &TemporalGraph,
    fraction: f64,
    seed: u64,
) -> Result<TemporalGraph, GenError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(GenError::BadFraction(fraction));
    }
    let n = g.vertex_count();
    let keep = ((f64::from(n) * fraction).round() as u32).min(n);
    let mut ids: Vec<VertexId> = (0..n).collect();
    let mut rng = StdRng::seed_from_u64(seed);
    let (head, _) = ids.partial_shuffle(&mut rng, keep as usize);
    let sample = head.to_vec();
    Ok(induced_subgraph(g, &sample).expect("sampled ids are valid"))
}
