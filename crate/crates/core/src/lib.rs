//! Truss-based community search on temporal graphs.
//!
//! A temporal graph carries an integer timestamp on every interaction. A
//! *temporal triangle* picks one timestamped interaction per side of a static
//! triangle; its span is the largest pairwise timestamp difference. Given a
//! span bound `delta`, the `delta`-temporal support of a static edge counts the
//! temporal triangles it participates in, and a `(k, delta)`-truss is a maximal
//! higher-order-connected subgraph in which every edge has support at least
//! `k`. For a query vertex `q`, the search problem is to find the
//! `(k*, delta)`-truss containing `q` with the largest achievable `k*`.
//!
//! Three interchangeable engines answer that query:
//!
//! * [`truss::gs_search`] — global peeling decomposition of the whole graph,
//! * [`localsearch::ls_search`] — binary-search-driven local expansion around
//!   the query vertex,
//! * [`ttsquery::tts_query`] — count-free lookups against a prebuilt
//!   [`ttindex::TTIndex`].
//!
//! All three return identical results; the test suite enforces agreement on
//! randomized instances. [`metrics`] scores communities with higher-order
//! temporal density/conductance, and [`gen`] produces synthetic graphs with
//! planted dense communities for benchmarks.

pub mod gen;
pub mod graph;
pub mod localsearch;
pub mod metrics;
pub mod tricount;
pub mod truss;
pub mod ttindex;
pub mod ttsquery;

pub use graph::{load_graph, EdgeId, GraphError, SliceView, StaticEdge, TemporalGraph, Timestamp, VertexId};
pub use tricount::{SupportMap, TriangleCounts, TriangleKey};
pub use truss::{CommunityResult, ConnectivityMode};
pub use ttindex::{build_index, load_index, save_index, IndexError, Skyline, TTIndex};
