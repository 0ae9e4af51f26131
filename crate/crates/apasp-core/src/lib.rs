//! All-pairs approximate shortest paths on weighted undirected graphs.
//!
//! The crate provides a family of APASP algorithms with provable guarantees
//! of the form `δ(u,v) <= d(u,v) <= α·δ(u,v) + β`:
//!
//! - purely additive `+2W_1` and `+2(W_1 + ... + W_{k+1})` algorithms, where
//!   `W_i` is the i-th heaviest edge weight on a shortest path,
//! - a multiplicative framework achieving stretch `(3ℓ+4)/(ℓ+2) + ε` for any
//!   `ℓ >= 0` (with `7/3 + ε` as the `ℓ = 1` case),
//! - a near-additive `(1+ε, min{2W_1, 4W_2})` algorithm, and
//! - a trade-off combiner that takes pointwise minima of the above.
//!
//! Supporting machinery is public too: hitting-set hierarchies with pivots
//! and light-edge sets, a composed-graph Dijkstra sweep engine, exact and
//! `(1+ε)`-approximate min-plus matrix products, multi-source approximate
//! shortest paths, and an exact oracle with stretch validation.

pub mod additive;
pub mod covering;
pub mod engine;
pub mod error;
pub mod graph;
pub mod minplus;
pub mod multiplicative;
pub mod nearadd;
pub mod oracle;

pub use additive::{
    build_fi_edges, plus2w1, plus2w1_guarantee, plus2wi, plus2wi_guarantee, plus2wi_with,
    AdditiveRunConfig, SweepOrder,
};
pub use covering::{
    greedy_hitting_set, k_nearest, k_nearest_restricted, light_edges, pivots_and_distances,
    HittingHierarchy, Neighborhood,
};
pub use engine::{
    dijkstra_composed, level_sweep, min_merge, AuxFamily, BaseEdges, ComposedGraphSpec,
    DistanceMatrix, ExecMode, SweepTemplate,
};
pub use error::{Error, Result};
pub use graph::{Graph, WeightClass};
pub use minplus::{ampmm, merge_into, mpmm_exact, msasp, submatrix, MinPlusMatrix, MsaspBackend};
pub use multiplicative::{
    default_betas, frac73, frac73_guarantee, framework, framework_guarantee, seed_pivot_edges,
    tz_walk, FrameworkConfig,
};
pub use nearadd::{
    combine_tradeoff, evaluate_guarantee, near_additive, near_additive_guarantee,
    near_additive_with, tradeoff_guarantee, AdditiveForm, MixedGuarantee, NearAdditiveConfig,
};
pub use oracle::{
    canonical_path, exact_apsp, exact_apsp_with, heavy_weights, validate, CanonicalPath, PredTie,
    PredTrees, StretchReport, Violation,
};
