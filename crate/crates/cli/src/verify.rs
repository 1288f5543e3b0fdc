//! Randomized cross-engine agreement harness. Engines are injected as
//! closures so the harness itself can be tested against a deliberately broken
//! engine.

use std::thread;

use temporal_truss::gen::{generate, GenSpec, PlantedSpec};
use temporal_truss::graph::{TemporalGraph, VertexId};
use temporal_truss::localsearch::ls_search;
use temporal_truss::truss::{gs_search, CommunityResult, ConnectivityMode};
use temporal_truss::ttindex::{build_index, TTIndex};
use temporal_truss::ttsquery::tts_query;

pub type EngineFn =
    dyn Fn(&TemporalGraph, &TTIndex, VertexId, u64, ConnectivityMode) -> CommunityResult + Sync;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub instances: u64,
    pub base_seed: u64,
    pub max_n: u32,
    pub modes: Vec<ConnectivityMode>,
    pub threads: usize,
}

#[derive(Debug, Clone)]
pub struct Divergence {
    pub seed: u64,
    pub mode: ConnectivityMode,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub instances: u64,
    pub divergences: Vec<Divergence>,
}

/// Parallelism cap: `TEMPORAL_TRUSS_THREADS` when set, else the machine's
/// available parallelism.
pub fn thread_cap() -> usize {
    std::env::var("TEMPORAL_TRUSS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()))
}

fn xorshift(state: &mut u64) -> u64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    *state
}

/// Seeded random instance: a generated graph plus a query vertex and span.
pub fn instance(seed: u64, max_n: u32) -> (TemporalGraph, VertexId, u64) {
    let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15) | 1;
    let mut pick = |m: u64| xorshift(&mut s) % m;
    let n = 5 + (pick(u64::from(max_n.max(6)) - 4)) as u32;
    let pairs = u64::from(n) * u64::from(n - 1) / 2;
    let m = pick(pairs + 1);
    let t_max = 2 + pick(10);
    let mut spec = GenSpec::new(n, m, t_max, seed);
    spec.max_timestamps_per_edge = 1 + pick(3) as u32;
    if pick(4) == 0 && n >= 5 {
        let size = 3 + pick(3) as u32;
        if u64::from(size) * u64::from(size - 1) / 2 <= m {
            spec = spec.with_planted(PlantedSpec {
                size,
                internal_spread: pick(3),
                external_spread: t_max,
            });
        }
    }
    let g = generate(&spec).expect("feasible spec");
    let q = pick(u64::from(n)) as VertexId;
    let delta = pick(t_max + 1);
    (g, q, delta)
}

pub fn default_engines() -> Vec<(&'static str, Box<EngineFn>)> {
    vec![
        (
            "gs",
            Box::new(|g: &TemporalGraph, _: &TTIndex, q, delta, mode| {
                gs_search(g, q, delta, mode).expect("valid instance")
            }),
        ),
        (
            "ls",
            Box::new(|g: &TemporalGraph, _: &TTIndex, q, delta, mode| {
                ls_search(g, q, delta, mode).expect("valid instance")
            }),
        ),
        (
            "tts",
            Box::new(|g: &TemporalGraph, idx: &TTIndex, q, delta, mode| {
                tts_query(g, idx, q, delta, mode).expect("valid instance")
            }),
        ),
    ]
}

pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let engines = default_engines();
    let refs: Vec<(&str, &EngineFn)> = engines.iter().map(|(n, f)| (*n, f.as_ref())).collect();
    run_verify_with(opts, &refs)
}

/// Runs every seeded instance through every engine in every requested mode
/// and records each disagreement against the first engine's answer. Instances
/// are sharded across up to `opts.threads` workers; the report is
/// deterministic regardless of sharding.
pub fn run_verify_with(opts: &VerifyOptions, engines: &[(&str, &EngineFn)]) -> VerifyReport {
    assert!(!engines.is_empty());
    let workers = opts.threads.max(1).min(opts.instances.max(1) as usize);
    let chunk = opts.instances.div_ceil(workers as u64).max(1);
    let mut divergences: Vec<Divergence> = thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers as u64 {
            let lo = opts.base_seed + (w * chunk).min(opts.instances);
            let hi = opts.base_seed + ((w + 1) * chunk).min(opts.instances);
            let modes = opts.modes.clone();
            let max_n = opts.max_n;
            handles.push(scope.spawn(move || {
                let mut found = Vec::new();
                for seed in lo..hi {
                    let (g, q, delta) = instance(seed, max_n);
                    let idx = build_index(&g);
                    for &mode in &modes {
                        let mut results: Vec<(&str, CommunityResult)> = Vec::new();
                        for &(name, f) in engines {
                            results.push((name, f(&g, &idx, q, delta, mode)));
                        }
                        let (base_name, base) = &results[0];
                        for (name, r) in &results[1..] {
                            if r != base {
                                found.push(Divergence {
                                    seed,
                                    mode,
                                    left: base_name.to_string(),
                                    right: name.to_string(),
                                });
                            }
                        }
                    }
                }
                found
            }));
        }
        handles.into_iter().flat_map(|h| h.join().expect("verify worker")).collect()
    });
    divergences.sort_by_key(|d| d.seed);
    VerifyReport { instances: opts.instances, divergences }
}
