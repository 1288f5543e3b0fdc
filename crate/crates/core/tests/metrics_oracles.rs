//! Metric oracle checks: triangle classification against exhaustive
//! enumeration and the symmetry/bounds that follow from it.

mod common;

use rand::Rng;

use temporal_truss::graph::VertexId;
use temporal_truss::metrics::{complement, estimate_delta_star, htc, htd, metric_report};

#[test]
fn tallies_match_exhaustive_classification() {
    let mut rng = common::rng_for(2024);
    for seed in 0..40 {
        let g = common::random_graph(seed, 18);
        if g.vertex_count() < 3 {
            continue;
        }
        let s: Vec<VertexId> =
            (0..g.vertex_count()).filter(|_| rng.random_range(0..2u8) == 0).collect();
        let delta_star = rng.random_range(0..=g.t_max());
        let r = metric_report(&g, &s, delta_star);

        let member: Vec<bool> = {
            let mut v = vec![false; g.vertex_count() as usize];
            for &x in &s {
                v[x as usize] = true;
            }
            v
        };
        let (mut inside, mut cut, mut vol_s, mut vol_rest) = (0u64, 0u64, 0u64, 0u64);
        for (key, edges) in common::brute_triangles(&g) {
            let n = common::brute_triple_count(
                &g.edge(edges[0]).timestamps,
                &g.edge(edges[1]).timestamps,
                &g.edge(edges[2]).timestamps,
                delta_star,
            );
            let hits = key.vertices().iter().filter(|&&x| member[x as usize]).count();
            if hits == 3 {
                inside += n;
            }
            if hits > 0 {
                vol_s += n;
            }
            if hits < 3 {
                vol_rest += n;
            }
            if hits > 0 && hits < 3 {
                cut += n;
            }
        }
        assert_eq!(r.tallies.inside, inside, "seed {seed}");
        assert_eq!(r.tallies.cut, cut, "seed {seed}");
        assert_eq!(r.tallies.vol_set, vol_s, "seed {seed}");
        assert_eq!(r.tallies.vol_rest, vol_rest, "seed {seed}");
    }
}

#[test]
fn conductance_is_symmetric_and_bounded() {
    let mut rng = common::rng_for(515);
    for seed in 50..90 {
        let g = common::random_graph(seed, 18);
        let s: Vec<VertexId> =
            (0..g.vertex_count()).filter(|_| rng.random_range(0..2u8) == 0).collect();
        let rest = complement(&g, &s);
        let delta_star = rng.random_range(0..=g.t_max());
        let a = htc(&g, &s, delta_star);
        let b = htc(&g, &rest, delta_star);
        assert_eq!(a, b, "seed {seed}");
        assert!((0.0..=1.0).contains(&a), "seed {seed}: htc {a}");
    }
}

#[test]
fn density_is_invariant_under_relabeling() {
    for seed in 0..20 {
        let g = common::random_graph(seed, 14);
        let n = g.vertex_count();
        if n < 4 {
            continue;
        }
        let relabel = |x: u32| n - 1 - x;
        let mirrored = temporal_truss::graph::TemporalGraph::from_temporal_edges_with_n(
            n,
            g.edges().iter().flat_map(|e| {
                e.timestamps
                    .iter()
                    .map(move |&t| (relabel(e.u), relabel(e.v), t))
                    .collect::<Vec<_>>()
            }),
        );
        let s: Vec<VertexId> = (0..n / 2).collect();
        let s_m: Vec<VertexId> = s.iter().map(|&x| relabel(x)).collect();
        let a = htd(&g, &s, 3);
        let b = htd(&mirrored, &s_m, 3);
        assert!((a - b).abs() < 1e-12, "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn delta_star_matches_two_pass_recomputation() {
    for seed in 0..30 {
        let g = common::random_graph(seed, 20);
        if g.temporal_edge_count() == 0 {
            assert!(estimate_delta_star(&g).is_err());
            continue;
        }
        let got = estimate_delta_star(&g).unwrap();
        let mut means = Vec::new();
        for e in g.edges() {
            if e.timestamps.len() >= 2 {
                let mut gaps = Vec::new();
                for w in e.timestamps.windows(2) {
                    gaps.push((w[1] - w[0]) as f64);
                }
                means.push(gaps.iter().sum::<f64>() / gaps.len() as f64);
            }
        }
        let want = if means.is_empty() {
            1
        } else {
            ((means.iter().sum::<f64>() / means.len() as f64).round() as u64).max(1)
        };
        assert_eq!(got, want, "seed {seed}");
    }
}
