//! Application logic behind the `temporal-truss` binary: ingestion summaries,
//! community queries, index construction, benchmarking, and cross-engine
//! verification. Results go to stdout; run metadata goes to stderr so result
//! text stays byte-identical across engines.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use temporal_truss::gen::{generate, GenSpec, PlantedSpec};
use temporal_truss::graph::{load_graph, TemporalGraph, VertexId};
use temporal_truss::localsearch::ls_search;
use temporal_truss::metrics::{estimate_delta_star, htd_with, metric_report, TimestampBase};
use temporal_truss::truss::{gs_search, CommunityResult, ConnectivityMode};
use temporal_truss::ttindex::{build_index_with, load_index, save_index, TTIndex};
use temporal_truss::ttsquery::tts_query;

pub mod verify;

/// Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "temporal-truss",
    about = "Truss-based community search on temporal graphs",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load a temporal edge list and print its summary statistics.
    Ingest(IngestArgs),
    /// Find the maximal community containing a query vertex.
    Query(QueryArgs),
    /// Build and persist the trussness index for a graph.
    BuildIndex(BuildIndexArgs),
    /// Time the three engines over degree-bucketed query samples.
    Bench(BenchArgs),
    /// Check that all engines agree on randomized instances.
    Verify(VerifyArgs),
    /// Generate a synthetic temporal graph file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    JsonLines,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Gs,
    Ls,
    Tts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Triangles chain when sharing at least a vertex.
    Vertex,
    /// Triangles chain only when sharing an edge.
    Edge,
    /// Verify under both connectivity modes.
    Both,
}

impl Mode {
    fn connectivities(self) -> Vec<ConnectivityMode> {
        match self {
            Mode::Vertex => vec![ConnectivityMode::VertexShared],
            Mode::Edge => vec![ConnectivityMode::EdgeShared],
            Mode::Both => vec![ConnectivityMode::VertexShared, ConnectivityMode::EdgeShared],
        }
    }

    fn single(self) -> Result<ConnectivityMode> {
        match self {
            Mode::Vertex => Ok(ConnectivityMode::VertexShared),
            Mode::Edge => Ok(ConnectivityMode::EdgeShared),
            Mode::Both => Err(anyhow!("--mode both is only valid for verify")),
        }
    }
}

/// `--delta` accepts a non-negative integer or `auto` (span estimated from
/// the mean consecutive-timestamp gap).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaArg {
    Auto,
    Value(u64),
}

impl FromStr for DeltaArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(DeltaArg::Auto);
        }
        s.parse::<u64>().map(DeltaArg::Value).map_err(|_| {
            format!("expected a non-negative integer or `auto`, got {s:?}")
        })
    }
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Temporal edge list: one `u v t` triple per line, `#` comments allowed.
    #[arg(long)]
    pub input: PathBuf,
    /// Integer divisor applied to raw timestamps before loading.
    #[arg(long, default_value_t = 1)]
    pub time_scale: u64,
    /// Shift timestamps so the smallest becomes 1.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub rebase: bool,
}

impl InputArgs {
    fn load(&self) -> Result<TemporalGraph> {
        load_graph(&self.input, self.time_scale, self.rebase)
            .with_context(|| format!("loading {}", self.input.display()))
    }
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Query vertex (post-remap dense id, as reported by ingest).
    #[arg(long)]
    pub query_node: VertexId,
    /// Span bound, or `auto`.
    #[arg(long)]
    pub delta: DeltaArg,
    #[arg(long, value_enum, default_value_t = Engine::Gs)]
    pub engine: Engine,
    /// Index file; required by the tts engine.
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Vertex)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Append higher-order quality metrics for the result's vertex set.
    #[arg(long, default_value_t = false)]
    pub with_metrics: bool,
    /// Time-footprint reading for the density denominator.
    #[arg(long, value_enum, default_value_t = TsBase::Distinct)]
    pub ts_base: TsBase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TsBase {
    Distinct,
    Window,
}

#[derive(Args, Debug)]
pub struct BuildIndexArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Output path for the index file.
    #[arg(long)]
    pub index: PathBuf,
    /// Build only levels up to this delta (partial index).
    #[arg(long)]
    pub delta_max: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Index file; built on the fly when absent.
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub delta: DeltaArg,
    /// Timed repetitions per query; the median over reps is kept per query.
    #[arg(long, default_value_t = 1)]
    pub reps: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Query nodes sampled per degree bucket.
    #[arg(long, default_value_t = 20)]
    pub per_bucket: usize,
    #[arg(long, value_enum, default_value_t = Mode::Vertex)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Number of seeded random instances.
    #[arg(long, default_value_t = 200)]
    pub instances: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest vertex count of generated instances.
    #[arg(long, default_value_t = 30)]
    pub max_n: u32,
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Output edge-list path.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub t_max: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub max_timestamps: u32,
    #[arg(long)]
    pub planted_size: Option<u32>,
    #[arg(long, default_value_t = 2)]
    pub planted_spread: u64,
    #[arg(long)]
    pub planted_external: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

/// Runs one parsed command, returning the process exit code.
pub fn run(command: Command) -> Result<i32> {
    match command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Query(a) => cmd_query(a),
        Command::BuildIndex(a) => cmd_build_index(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gen(a) => cmd_gen(a),
    }
}

fn resolve_delta(arg: DeltaArg, g: &TemporalGraph) -> Result<u64> {
    match arg {
        DeltaArg::Value(v) => Ok(v),
        DeltaArg::Auto => {
            let d = estimate_delta_star(g)?;
            eprintln!("delta auto-estimated as {d}");
            Ok(d)
        }
    }
}

fn cmd_ingest(args: IngestArgs) -> Result<i32> {
    let g = args.input.load()?;
    match args.format {
        OutputFormat::Text => {
            println!("vertices {}", g.vertex_count());
            println!("temporal_edges {}", g.temporal_edge_count());
            println!("static_edges {}", g.edge_count());
            println!("t_max {}", g.t_max());
        }
        OutputFormat::JsonLines => {
            println!(
                "{}",
                serde_json::json!({
                    "event": "ingest",
                    "vertices": g.vertex_count(),
                    "temporal_edges": g.temporal_edge_count(),
                    "static_edges": g.edge_count(),
                    "t_max": g.t_max(),
                })
            );
        }
    }
    Ok(EXIT_OK)
}

fn render_result(g: &TemporalGraph, r: &CommunityResult, format: OutputFormat) {
    match format {
        OutputFormat::Text => {
            println!("k_star {}", r.k_star);
            println!("components {}", r.components.len());
            for (i, comp) in r.components.iter().enumerate() {
                let verts = r.component_vertices(g, i);
                let vs: Vec<String> = verts.iter().map(u32::to_string).collect();
                let es: Vec<String> = comp
                    .iter()
                    .map(|&e| format!("({},{})", g.edge(e).u, g.edge(e).v))
                    .collect();
                println!("component {i} vertices [{}] edges [{}]", vs.join(","), es.join(","));
            }
            println!("temporal_edges {}", r.temporal_edge_count(g));
        }
        OutputFormat::JsonLines => {
            println!(
                "{}",
                serde_json::json!({
                    "event": "result",
                    "query": r.query,
                    "delta": r.delta,
                    "k_star": r.k_star,
                    "components": r.components.len(),
                    "temporal_edges": r.temporal_edge_count(g),
                })
            );
            for (i, comp) in r.components.iter().enumerate() {
                let edges: Vec<[u32; 2]> =
                    comp.iter().map(|&e| [g.edge(e).u, g.edge(e).v]).collect();
                println!(
                    "{}",
                    serde_json::json!({
                        "event": "component",
                        "index": i,
                        "vertices": r.component_vertices(g, i),
                        "edges": edges,
                    })
                );
            }
        }
    }
}

fn run_engine(
    engine: Engine,
    g: &TemporalGraph,
    idx: Option<&TTIndex>,
    q: VertexId,
    delta: u64,
    mode: ConnectivityMode,
) -> Result<CommunityResult> {
    match engine {
        Engine::Gs => Ok(gs_search(g, q, delta, mode)?),
        Engine::Ls => Ok(ls_search(g, q, delta, mode)?),
        Engine::Tts => {
            let idx = idx.ok_or_else(|| anyhow!("the tts engine requires --index"))?;
            Ok(tts_query(g, idx, q, delta, mode)?)
        }
    }
}

fn cmd_query(args: QueryArgs) -> Result<i32> {
    let g = args.input.load()?;
    let delta = resolve_delta(args.delta, &g)?;
    let mode = args.mode.single()?;
    let idx = match (&args.index, args.engine) {
        (Some(path), _) => {
            let idx = load_index(path).with_context(|| format!("loading {}", path.display()))?;
            idx.verify_graph(&g)?;
            Some(idx)
        }
        (None, Engine::Tts) => return Err(anyhow!("the tts engine requires --index")),
        (None, _) => None,
    };
    let started = Instant::now();
    let r = run_engine(args.engine, &g, idx.as_ref(), args.query_node, delta, mode)?;
    eprintln!(
        "engine {:?} query {} delta {delta} took {:.2?}",
        args.engine,
        args.query_node,
        started.elapsed()
    );
    render_result(&g, &r, args.format);

    if args.with_metrics {
        let verts = r.vertices(&g);
        let delta_star = estimate_delta_star(&g)?;
        let report = metric_report(&g, &verts, delta_star);
        let htd_val = match args.ts_base {
            TsBase::Distinct => report.htd,
            TsBase::Window => htd_with(&g, &verts, delta_star, TimestampBase::WindowWidth),
        };
        match args.format {
            OutputFormat::Text => {
                println!("delta_star {delta_star}");
                println!("htd {htd_val:.6}");
                println!("htc {:.6}", report.htc);
                println!(
                    "triangles inside={} cut={} vol_set={} vol_rest={}",
                    report.tallies.inside,
                    report.tallies.cut,
                    report.tallies.vol_set,
                    report.tallies.vol_rest
                );
            }
            OutputFormat::JsonLines => {
                println!(
                    "{}",
                    serde_json::json!({
                        "event": "metrics",
                        "delta_star": delta_star,
                        "htd": htd_val,
                        "htc": report.htc,
                        "triangles_inside": report.tallies.inside,
                        "triangles_cut": report.tallies.cut,
                        "vol_set": report.tallies.vol_set,
                        "vol_rest": report.tallies.vol_rest,
                    })
                );
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_build_index(args: BuildIndexArgs) -> Result<i32> {
    let g = args.input.load()?;
    let started = Instant::now();
    let idx = build_index_with(&g, args.delta_max, |done, planned| {
        if done % 16 == 0 || done == planned {
            eprintln!("indexed delta {done}/{planned}");
        }
        true
    })?;
    let build_secs = started.elapsed().as_secs_f64();
    if idx.saturated() && idx.delta_built() + 1 < g.t_max() {
        eprintln!(
            "saturated at delta {} (t_max {}), later levels are implied",
            idx.delta_built(),
            g.t_max()
        );
    }
    save_index(&idx, &args.index).with_context(|| format!("writing {}", args.index.display()))?;
    let file_bytes = std::fs::metadata(&args.index)?.len();
    match args.format {
        OutputFormat::Text => {
            println!("build_seconds {build_secs:.3}");
            println!("file_bytes {file_bytes}");
            println!("edge_skyline_bytes {}", idx.edge_section_bytes());
            println!("triangle_bytes {}", idx.triangle_section_bytes());
            println!("skyline_pairs {}", idx.skyline_pair_count());
            println!("triangles {}", idx.triangle_count());
            println!("delta_built {}", idx.delta_built());
            println!("saturated {}", idx.saturated());
        }
        OutputFormat::JsonLines => {
            println!(
                "{}",
                serde_json::json!({
                    "event": "index_built",
                    "build_seconds": build_secs,
                    "file_bytes": file_bytes,
                    "edge_skyline_bytes": idx.edge_section_bytes(),
                    "triangle_bytes": idx.triangle_section_bytes(),
                    "skyline_pairs": idx.skyline_pair_count(),
                    "triangles": idx.triangle_count(),
                    "delta_built": idx.delta_built(),
                    "saturated": idx.saturated(),
                })
            );
        }
    }
    Ok(EXIT_OK)
}

/// Splits `0..n` into `k` buckets of ascending temporal degree whose sizes
/// differ by at most one.
pub fn degree_buckets(g: &TemporalGraph, k: usize) -> Vec<Vec<VertexId>> {
    let mut by_degree: Vec<VertexId> = (0..g.vertex_count()).collect();
    by_degree.sort_by_key(|&x| (g.temporal_degree(x), x));
    let n = by_degree.len();
    let base = n / k;
    let extra = n % k;
    let mut out = Vec::with_capacity(k);
    let mut at = 0;
    for b in 0..k {
        let len = base + usize::from(b < extra);
        out.push(by_degree[at..at + len].to_vec());
        at += len;
    }
    out
}

fn median_us(mut xs: Vec<Duration>) -> f64 {
    xs.sort_unstable();
    xs[xs.len() / 2].as_secs_f64() * 1e6
}

fn percentile_us(mut xs: Vec<Duration>, p: f64) -> f64 {
    xs.sort_unstable();
    let idx = ((xs.len() as f64 - 1.0) * p).round() as usize;
    xs[idx].as_secs_f64() * 1e6
}

fn cmd_bench(args: BenchArgs) -> Result<i32> {
    let g = args.input.load()?;
    let delta = resolve_delta(args.delta, &g)?;
    let mode = args.mode.single()?;
    let idx = match &args.index {
        Some(path) => {
            let idx = load_index(path)?;
            idx.verify_graph(&g)?;
            idx
        }
        None => {
            eprintln!("no --index given; building in memory");
            build_index_with(&g, None, |_, _| true)?
        }
    };

    let buckets = degree_buckets(&g, 5);
    // deterministic in-bucket sampling from the seed
    let mut state = args.seed | 1;
    let mut next = move |m: usize| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % m as u64) as usize
    };
    let mut queries: Vec<(usize, VertexId)> = Vec::new();
    for (b, bucket) in buckets.iter().enumerate() {
        if bucket.is_empty() {
            continue;
        }
        for _ in 0..args.per_bucket.min(bucket.len()) {
            queries.push((b, bucket[next(bucket.len())]));
        }
    }

    let reps = args.reps.max(1);
    let engines: [(Engine, &str); 3] = [(Engine::Gs, "gs"), (Engine::Ls, "ls"), (Engine::Tts, "tts")];
    let mut rows: Vec<(String, usize, Vec<Duration>)> = Vec::new();
    for &(engine, name) in &engines {
        let mut per_bucket: Vec<Vec<Duration>> = vec![Vec::new(); 5];
        for &(b, q) in &queries {
            let mut samples = Vec::with_capacity(reps as usize);
            for _ in 0..reps {
                let started = Instant::now();
                let _ = run_engine(engine, &g, Some(&idx), q, delta, mode)?;
                samples.push(started.elapsed());
            }
            samples.sort_unstable();
            per_bucket[b].push(samples[samples.len() / 2]);
        }
        for (b, times) in per_bucket.iter().enumerate() {
            if !times.is_empty() {
                rows.push((name.to_string(), b, times.clone()));
            }
        }
        let all: Vec<Duration> = per_bucket.into_iter().flatten().collect();
        rows.push((name.to_string(), usize::MAX, all));
    }

    match args.format {
        OutputFormat::Text => {
            println!("{:<6} {:>8} {:>9} {:>12} {:>12}", "engine", "bucket", "queries", "median_us", "p90_us");
            for (name, bucket, times) in &rows {
                let bucket_label =
                    if *bucket == usize::MAX { "all".to_string() } else { bucket.to_string() };
                println!(
                    "{:<6} {:>8} {:>9} {:>12.1} {:>12.1}",
                    name,
                    bucket_label,
                    times.len(),
                    median_us(times.clone()),
                    percentile_us(times.clone(), 0.9)
                );
            }
        }
        OutputFormat::JsonLines => {
            for (name, bucket, times) in &rows {
                let bucket_val = if *bucket == usize::MAX {
                    serde_json::Value::String("all".into())
                } else {
                    serde_json::Value::from(*bucket)
                };
                println!(
                    "{}",
                    serde_json::json!({
                        "event": "bench",
                        "engine": name,
                        "bucket": bucket_val,
                        "queries": times.len(),
                        "median_us": median_us(times.clone()),
                        "p90_us": percentile_us(times.clone(), 0.9),
                    })
                );
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let report = verify::run_verify(&verify::VerifyOptions {
        instances: args.instances,
        base_seed: args.seed,
        max_n: args.max_n,
        modes: args.mode.connectivities(),
        threads: verify::thread_cap(),
    });
    match args.format {
        OutputFormat::Text => {
            println!("instances {}", report.instances);
            println!("divergences {}", report.divergences.len());
            if let Some(first) = report.divergences.first() {
                println!(
                    "first_divergence seed {} mode {:?} engines {} vs {}",
                    first.seed, first.mode, first.left, first.right
                );
            }
            println!("status {}", if report.divergences.is_empty() { "pass" } else { "fail" });
        }
        OutputFormat::JsonLines => {
            println!(
                "{}",
                serde_json::json!({
                    "event": "verify",
                    "instances": report.instances,
                    "divergences": report.divergences.len(),
                    "first_divergent_seed": report.divergences.first().map(|d| d.seed),
                    "status": if report.divergences.is_empty() { "pass" } else { "fail" },
                })
            );
        }
    }
    Ok(if report.divergences.is_empty() { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    let mut spec = GenSpec::new(args.n, args.m, args.t_max, args.seed);
    spec.max_timestamps_per_edge = args.max_timestamps;
    if let Some(size) = args.planted_size {
        spec = spec.with_planted(PlantedSpec {
            size,
            internal_spread: args.planted_spread,
            external_spread: args.planted_external.unwrap_or(args.t_max),
        });
    }
    let g = generate(&spec)?;
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?,
    );
    writeln!(out, "# synthetic temporal graph seed={} n={} m={}", args.seed, args.n, args.m)?;
    for e in g.edges() {
        for &t in &e.timestamps {
            writeln!(out, "{} {} {}", e.u, e.v, t)?;
        }
    }
    out.flush()?;
    match args.format {
        OutputFormat::Text => {
            println!("vertices {}", g.vertex_count());
            println!("temporal_edges {}", g.temporal_edge_count());
            println!("static_edges {}", g.edge_count());
            println!("t_max {}", g.t_max());
        }
        OutputFormat::JsonLines => {
            println!(
                "{}",
                serde_json::json!({
                    "event": "gen",
                    "vertices": g.vertex_count(),
                    "temporal_edges": g.temporal_edge_count(),
                    "static_edges": g.edge_count(),
                    "t_max": g.t_max(),
                })
            );
        }
    }
    Ok(EXIT_OK)
}
