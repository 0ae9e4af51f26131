//! Ground truth and validation: exact APSP with deterministic predecessor
//! trees, canonical shortest paths with their heavy-edge weights, and the
//! stretch validator that checks a distance matrix against a guarantee and
//! emits a machine-readable report.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::Serialize;

use crate::engine::{worker_count, DistanceMatrix};
use crate::graph::Graph;
use crate::nearadd::{evaluate_guarantee, MixedGuarantee};

const INF: f64 = f64::INFINITY;

/// Tie rule for equally short predecessors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PredTie {
    /// Smallest predecessor id wins: the primary canonical path.
    #[default]
    SmallId,
    /// Largest predecessor id wins: a second canonical path that widens
    /// test coverage over tied shortest paths.
    LargeId,
}

/// `trees[u][v]` is `v`'s predecessor on the canonical shortest path from
/// `u` (`None` for `v = u` or unreachable `v`).
pub type PredTrees = Vec<Vec<Option<usize>>>;

/// One canonical shortest path and its descending edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalPath {
    pub pair: (usize, usize),
    /// Path edges in order from `pair.0` to `pair.1`.
    pub edges: Vec<(usize, usize, f64)>,
    /// All edge weights of the path, sorted descending (`heavy[i]` is
    /// `W_{i+1}`).
    pub heavy: Vec<f64>,
}

fn sssp_with_preds(g: &Graph, source: usize, tie: PredTie) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = g.n();
    let mut dist = vec![INF; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut settled = vec![false; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(crate::covering::HeapKey(0.0, source)));
    while let Some(Reverse(crate::covering::HeapKey(du, u))) = heap.pop() {
        if settled[u] {
            continue;
        }
        settled[u] = true;
        for &(v, w) in g.neighbors(u) {
            let nd = du + w;
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = Some(u);
                heap.push(Reverse(crate::covering::HeapKey(nd, v)));
            } else if nd == dist[v] && !settled[v] {
                // Deterministic tie rule, independent of heap internals.
                let replace = match (pred[v], tie) {
                    (None, _) => true,
                    (Some(p), PredTie::SmallId) => u < p,
                    (Some(p), PredTie::LargeId) => u > p,
                };
                if replace {
                    pred[v] = Some(u);
                }
            }
        }
    }
    (dist, pred)
}

/// Exact all-pairs shortest paths (one Dijkstra per source, sources run in
/// parallel) with smallest-id canonical predecessor trees.
pub fn exact_apsp(g: &Graph) -> (DistanceMatrix, PredTrees) {
    exact_apsp_with(g, PredTie::SmallId)
}

/// [`exact_apsp`] with an explicit predecessor tie rule.
pub fn exact_apsp_with(g: &Graph, tie: PredTie) -> (DistanceMatrix, PredTrees) {
    let n = g.n();
    let sources: Vec<usize> = (0..n).collect();
    let workers = worker_count(n);
    let chunk = n.div_ceil(workers.max(1)).max(1);
    let mut rows: Vec<(Vec<f64>, Vec<Option<usize>>)> = Vec::with_capacity(n);
    std::thread::scope(|scope| {
        let handles: Vec<_> = sources
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&s| sssp_with_preds(g, s, tie))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            rows.extend(h.join().expect("oracle worker panicked"));
        }
    });
    let mut d = DistanceMatrix::new(n);
    let mut trees = Vec::with_capacity(n);
    for (u, (dist, pred)) in rows.into_iter().enumerate() {
        for (v, &x) in dist.iter().enumerate() {
            d.set_min(u, v, x);
        }
        trees.push(pred);
    }
    (d, trees)
}

/// Reconstructs the canonical shortest path for `(u, v)` from predecessor
/// trees; `None` when `v` is unreachable from `u`.
pub fn canonical_path(g: &Graph, trees: &PredTrees, u: usize, v: usize) -> Option<CanonicalPath> {
    let mut edges_rev = Vec::new();
    let mut cur = v;
    while cur != u {
        let p = trees[u][cur]?;
        let w = g
            .edge_weight(p, cur)
            .expect("predecessor tree follows graph edges");
        edges_rev.push((p, cur, w));
        cur = p;
    }
    edges_rev.reverse();
    let mut heavy: Vec<f64> = edges_rev.iter().map(|&(_, _, w)| w).collect();
    heavy.sort_by(|a, b| b.total_cmp(a));
    Some(CanonicalPath {
        pair: (u, v),
        edges: edges_rev,
        heavy,
    })
}

/// The first `count` descending edge weights (`W_1..W_count`) of the
/// canonical `u`-`v` path, zero-padded when the path has fewer edges.
pub fn heavy_weights(g: &Graph, trees: &PredTrees, u: usize, v: usize, count: usize) -> Vec<f64> {
    let mut heavy = canonical_path(g, trees, u, v).map_or_else(Vec::new, |p| p.heavy);
    heavy.resize(count, 0.0);
    heavy.truncate(count);
    heavy
}

/// One pair whose estimate broke the guarantee; `bound` is the violated
/// bound (the exact distance for lower-bound breaches, the evaluated upper
/// bound otherwise).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub u: usize,
    pub v: usize,
    pub delta: f64,
    pub d: f64,
    pub bound: f64,
}

/// Result of validating a distance matrix against a guarantee.
#[derive(Debug, Clone)]
pub struct StretchReport {
    pub algorithm: String,
    pub guarantee: MixedGuarantee,
    pub n: usize,
    pub m: usize,
    pub seed: Option<u64>,
    pub pairs_checked: usize,
    /// Pairs with δ = ∞ (they must also have d = ∞; counted separately).
    pub inf_pairs: usize,
    pub violations: Vec<Violation>,
    pub max_mult_ratio: f64,
    pub max_additive_excess: f64,
    pub runtime_ms: f64,
}

impl StretchReport {
    /// True iff no pair violated the guarantee.
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// The report's external JSON form.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "algorithm": self.algorithm,
            "alpha": self.guarantee.alpha,
            "additive_form": self.guarantee.additive.token(),
            "n": self.n,
            "m": self.m,
            "seed": self.seed,
            "pairs": self.pairs_checked,
            "inf_pairs": self.inf_pairs,
            "violations": self.violations,
            "max_ratio": self.max_mult_ratio,
            "max_excess": self.max_additive_excess,
            "ms": self.runtime_ms,
        })
    }
}

struct PartialCheck {
    violations: Vec<Violation>,
    max_ratio: f64,
    max_excess: f64,
    pairs: usize,
    inf_pairs: usize,
}

fn check_rows(
    g: &Graph,
    d: &DistanceMatrix,
    oracle: &DistanceMatrix,
    trees: &PredTrees,
    gspec: &MixedGuarantee,
    rows: &[usize],
) -> PartialCheck {
    let mut out = PartialCheck {
        violations: Vec::new(),
        max_ratio: 1.0,
        max_excess: 0.0,
        pairs: 0,
        inf_pairs: 0,
    };
    for &u in rows {
        for v in u..g.n() {
            out.pairs += 1;
            let delta = oracle.get(u, v);
            let dd = d.get(u, v);
            if delta.is_infinite() {
                out.inf_pairs += 1;
                if dd.is_finite() {
                    out.violations.push(Violation {
                        u,
                        v,
                        delta,
                        d: dd,
                        bound: INF,
                    });
                }
                continue;
            }
            let heavy = canonical_path(g, trees, u, v)
                .expect("finite δ implies a canonical path")
                .heavy;
            let bound = evaluate_guarantee(gspec, delta, &heavy)
                .expect("oracle paths satisfy the guarantee preconditions");
            // Integer inputs compare exactly; otherwise a relative slack
            // absorbs summation roundoff.
            let all_int = delta.fract() == 0.0 && dd.fract() == 0.0 && bound.fract() == 0.0;
            let slack = |b: f64| if all_int { 0.0 } else { 1e-9 * b.abs().max(1.0) };
            if dd < delta - slack(delta) {
                out.violations.push(Violation {
                    u,
                    v,
                    delta,
                    d: dd,
                    bound: delta,
                });
            } else if dd > bound + slack(bound) {
                out.violations.push(Violation {
                    u,
                    v,
                    delta,
                    d: dd,
                    bound,
                });
            }
            if delta > 0.0 {
                out.max_ratio = out.max_ratio.max(dd / delta);
                out.max_excess = out.max_excess.max(dd - gspec.alpha * delta);
            }
        }
    }
    out
}

/// Checks `δ(u,v) <= d[u,v] <= α·δ(u,v) + additive(heavy)` for every pair
/// (the lower bound first), with pairs fanned out across workers and a
/// single-threaded reduction.
pub fn validate(g: &Graph, d: &DistanceMatrix, gspec: &MixedGuarantee) -> StretchReport {
    assert_eq!(
        d.n(),
        g.n(),
        "distance matrix dimension {} does not match graph order {}",
        d.n(),
        g.n()
    );
    let start = Instant::now();
    let (oracle, trees) = exact_apsp(g);
    let rows: Vec<usize> = (0..g.n()).collect();
    let workers = worker_count(rows.len());
    let chunk = rows.len().div_ceil(workers.max(1)).max(1);
    let mut parts: Vec<PartialCheck> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = rows
            .chunks(chunk)
            .map(|part| {
                let (oracle, trees, gspec) = (&oracle, &trees, &gspec);
                scope.spawn(move || check_rows(g, d, oracle, trees, gspec, part))
            })
            .collect();
        for h in handles {
            parts.push(h.join().expect("validation worker panicked"));
        }
    });
    let mut report = StretchReport {
        algorithm: if gspec.provenance.is_empty() {
            "unspecified".into()
        } else {
            gspec.provenance.join("+")
        },
        guarantee: gspec.clone(),
        n: g.n(),
        m: g.m(),
        seed: None,
        pairs_checked: 0,
        inf_pairs: 0,
        violations: Vec::new(),
        max_mult_ratio: 1.0,
        max_additive_excess: 0.0,
        runtime_ms: 0.0,
    };
    for mut p in parts {
        report.pairs_checked += p.pairs;
        report.inf_pairs += p.inf_pairs;
        report.violations.append(&mut p.violations);
        report.max_mult_ratio = report.max_mult_ratio.max(p.max_ratio);
        report.max_additive_excess = report.max_additive_excess.max(p.max_excess);
    }
    report.violations.sort_by_key(|v| (v.u, v.v));
    report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}
