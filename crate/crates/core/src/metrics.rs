//! Higher-order quality metrics for temporal communities.
//!
//! Both metrics count temporal triangles whose span stays within a
//! data-driven bound `delta_star`: density relates the count inside the
//! vertex set to the set's size and time footprint, conductance relates the
//! boundary-straddling count to the smaller side's volume.

use std::collections::HashSet;

use thiserror::Error;

use crate::graph::{TemporalGraph, VertexId};
use crate::tricount;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("graph has no temporal edges")]
    EmptyGraph,
}

/// Which time footprint the density denominator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimestampBase {
    /// Number of distinct timestamps on edges inside the vertex set.
    #[default]
    Distinct,
    /// Width of the spanned window, `max - min + 1`.
    WindowWidth,
}

/// Triangle tallies behind a report: fully inside the set, straddling the
/// boundary, and the two side volumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleTallies {
    pub inside: u64,
    pub cut: u64,
    pub vol_set: u64,
    pub vol_rest: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub htd: f64,
    pub htc: f64,
    pub delta_star: u64,
    pub tallies: TriangleTallies,
}

/// Estimates the span bound as the rounded mean, over static edges with at
/// least two timestamps, of each edge's mean consecutive gap. Falls back to 1
/// when every edge carries a single timestamp.
pub fn estimate_delta_star(g: &TemporalGraph) -> Result<u64, MetricsError> {
    if g.temporal_edge_count() == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    let mut edge_means = Vec::new();
    for e in g.edges() {
        let ts = &e.timestamps;
        if ts.len() < 2 {
            continue;
        }
        let total: u64 = ts.windows(2).map(|w| w[1] - w[0]).sum();
        edge_means.push(total as f64 / (ts.len() - 1) as f64);
    }
    if edge_means.is_empty() {
        return Ok(1);
    }
    let mean = edge_means.iter().sum::<f64>() / edge_means.len() as f64;
    Ok((mean.round() as u64).max(1))
}

fn classify(g: &TemporalGraph, member: &[bool], delta_star: u64) -> TriangleTallies {
    let mut t = TriangleTallies { inside: 0, cut: 0, vol_set: 0, vol_rest: 0 };
    tricount::for_each_triangle(g, |key, edges| {
        let n = tricount::count_triangle_sliding(
            &g.edge(edges[0]).timestamps,
            &g.edge(edges[1]).timestamps,
            &g.edge(edges[2]).timestamps,
            delta_star,
        );
        if n == 0 {
            return;
        }
        let ins: u8 = key.vertices().iter().map(|&x| u8::from(member[x as usize])).sum();
        if ins == 3 {
            t.inside += n;
        }
        if ins > 0 {
            t.vol_set += n;
            if ins < 3 {
                t.cut += n;
            }
        }
        if ins < 3 {
            t.vol_rest += n;
        }
    });
    t
}

fn membership(g: &TemporalGraph, s: &[VertexId]) -> (Vec<bool>, usize) {
    let mut member = vec![false; g.vertex_count() as usize];
    let mut size = 0;
    for &x in s {
        debug_assert!(g.contains_vertex(x), "metrics vertex out of range");
        if !member[x as usize] {
            member[x as usize] = true;
            size += 1;
        }
    }
    (member, size)
}

/// Higher-order temporal density of the vertex set: the cube root of the
/// in-set qualifying-triangle count over `|S| (|S|-1) (|S|-2) |T_S|^3`.
/// Returns 0 for sets smaller than 3 or with no in-set temporal edges.
pub fn htd(g: &TemporalGraph, s: &[VertexId], delta_star: u64) -> f64 {
    htd_with(g, s, delta_star, TimestampBase::Distinct)
}

pub fn htd_with(g: &TemporalGraph, s: &[VertexId], delta_star: u64, base: TimestampBase) -> f64 {
    let (member, size) = membership(g, s);
    if size < 3 {
        return 0.0;
    }
    let tallies = classify(g, &member, delta_star);

    let mut inside_ts: Vec<u64> = Vec::new();
    for e in g.edges() {
        if member[e.u as usize] && member[e.v as usize] {
            inside_ts.extend_from_slice(&e.timestamps);
        }
    }
    let footprint = match base {
        TimestampBase::Distinct => {
            inside_ts.sort_unstable();
            inside_ts.dedup();
            inside_ts.len() as u64
        }
        TimestampBase::WindowWidth => match (inside_ts.iter().min(), inside_ts.iter().max()) {
            (Some(&lo), Some(&hi)) => hi - lo + 1,
            _ => 0,
        },
    };
    if footprint == 0 {
        return 0.0;
    }
    let s = size as f64;
    let denom = s * (s - 1.0) * (s - 2.0) * (footprint as f64).powi(3);
    (tallies.inside as f64 / denom).cbrt()
}

/// Higher-order temporal conductance: qualifying triangles straddling the
/// `(S, V \ S)` boundary over the smaller side's volume; 0 when a side has no
/// qualifying triangle at all.
pub fn htc(g: &TemporalGraph, s: &[VertexId], delta_star: u64) -> f64 {
    let (member, _) = membership(g, s);
    let t = classify(g, &member, delta_star);
    let denom = t.vol_set.min(t.vol_rest);
    if denom == 0 {
        0.0
    } else {
        t.cut as f64 / denom as f64
    }
}

/// Both metrics plus the underlying tallies in one pass over the triangles.
pub fn metric_report(g: &TemporalGraph, s: &[VertexId], delta_star: u64) -> MetricReport {
    let (member, _) = membership(g, s);
    let tallies = classify(g, &member, delta_star);
    let denom = tallies.vol_set.min(tallies.vol_rest);
    let htc = if denom == 0 { 0.0 } else { tallies.cut as f64 / denom as f64 };
    MetricReport { htd: htd(g, s, delta_star), htc, delta_star, tallies }
}

/// Distinct-vertex view of a set given as a slice (order and duplicates are
/// irrelevant to every metric here).
pub fn complement(g: &TemporalGraph, s: &[VertexId]) -> Vec<VertexId> {
    let set: HashSet<VertexId> = s.iter().copied().collect();
    (0..g.vertex_count()).filter(|x| !set.contains(x)).collect()
}
