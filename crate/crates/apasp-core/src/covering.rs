//! Covering structures: k-nearest neighborhoods (plain and restricted),
//! deterministic greedy hitting sets, pivots with exact distances, light-edge
//! sets, and the nested hitting-set hierarchy every algorithm builds on.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::Graph;

const INF: f64 = f64::INFINITY;

/// The nearest vertices of an owner, nearest first, with exact distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    /// The vertex the neighborhood belongs to (excluded from `members`).
    pub owner: usize,
    /// `(vertex, exact distance)` sorted by `(distance, vertex id)`.
    pub members: Vec<(usize, f64)>,
}

impl Neighborhood {
    /// True when `x` is one of the members.
    pub fn contains(&self, x: usize) -> bool {
        self.members.iter().any(|&(v, _)| v == x)
    }
}

/// Plain Dijkstra from `source`; returns exact distances (∞ if unreachable).
pub(crate) fn dijkstra_plain(g: &Graph, source: usize) -> Vec<f64> {
    let n = g.n();
    let mut dist = vec![INF; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(HeapKey(0.0, source)));
    while let Some(Reverse(HeapKey(du, u))) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        for &(v, w) in g.neighbors(u) {
            let nd = du + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse(HeapKey(nd, v)));
            }
        }
    }
    dist
}

/// Heap key ordered by `(distance, vertex id)`; ids break distance ties.
#[derive(PartialEq)]
pub(crate) struct HeapKey(pub(crate) f64, pub(crate) usize);

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// The `k` nearest vertices to `u` by exact distance (fewer if fewer are
/// reachable), ties broken by ascending id; `u` itself is excluded.
pub fn k_nearest(g: &Graph, u: usize, k: usize) -> Neighborhood {
    let dist = dijkstra_plain(g, u);
    nearest_from_dist(u, &dist, None, k)
}

/// The `k` nearest members of `allowed` to `u` (the restricted neighborhood
/// Γ(u, A, k)); ordering and tie rules as [`k_nearest`].
pub fn k_nearest_restricted(g: &Graph, u: usize, allowed: &[usize], k: usize) -> Neighborhood {
    let dist = dijkstra_plain(g, u);
    let mut mask = vec![false; g.n()];
    for &a in allowed {
        mask[a] = true;
    }
    nearest_from_dist(u, &dist, Some(&mask), k)
}

pub(crate) fn nearest_from_dist(
    u: usize,
    dist: &[f64],
    mask: Option<&[bool]>,
    k: usize,
) -> Neighborhood {
    let mut members: Vec<(usize, f64)> = dist
        .iter()
        .enumerate()
        .filter(|&(v, &d)| v != u && d.is_finite() && mask.is_none_or(|m| m[v]))
        .map(|(v, &d)| (v, d))
        .collect();
    members.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    members.truncate(k);
    Neighborhood { owner: u, members }
}

/// Deterministic greedy hitting set: repeatedly pick the vertex covering the
/// most still-uncovered sets, ties by smallest id. Errors if any input set is
/// empty. When every input set has size >= r the result has at most
/// `ceil(n/r) * (ceil(ln n) + 1)` vertices.
pub fn greedy_hitting_set(sets: &[Vec<usize>], n: usize) -> Result<Vec<usize>> {
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::InvalidInput(format!("input set {i} is empty")));
        }
    }
    let (chosen, uncovered) = greedy_hitting_set_pool(sets, n, None);
    debug_assert!(uncovered.is_empty());
    Ok(chosen)
}

/// Greedy hitting set restricted to candidate vertices in `pool` (all of V if
/// `None`). Returns the chosen vertices (sorted) and the indices of input
/// sets that no pool vertex can cover.
pub(crate) fn greedy_hitting_set_pool(
    sets: &[Vec<usize>],
    n: usize,
    pool: Option<&[bool]>,
) -> (Vec<usize>, Vec<usize>) {
    let eligible = |v: usize| pool.is_none_or(|p| p[v]);
    let mut member_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    let mut covered = vec![false; sets.len()];
    let mut uncovered_total = 0usize;
    for (i, s) in sets.iter().enumerate() {
        let mut any_eligible = false;
        for &v in s {
            if eligible(v) {
                member_of[v].push(i);
                count[v] += 1;
                any_eligible = true;
            }
        }
        if any_eligible {
            uncovered_total += 1;
        } else {
            covered[i] = true; // unreachable through the pool; report below
        }
    }
    let unreachable: Vec<usize> = sets
        .iter()
        .enumerate()
        .filter(|&(_, s)| !s.iter().any(|&v| eligible(v)))
        .map(|(i, _)| i)
        .collect();

    let mut chosen = Vec::new();
    while uncovered_total > 0 {
        let mut best = usize::MAX;
        let mut best_count = 0usize;
        for v in 0..n {
            if count[v] > best_count {
                best = v;
                best_count = count[v];
            }
        }
        debug_assert!(best != usize::MAX);
        chosen.push(best);
        for &i in &member_of[best].clone() {
            if !covered[i] {
                covered[i] = true;
                uncovered_total -= 1;
                for &v in &sets[i] {
                    if eligible(v) {
                        count[v] -= 1;
                    }
                }
            }
        }
    }
    chosen.sort_unstable();
    (chosen, unreachable)
}

/// For every vertex the nearest member of `s` (the pivot) and the exact
/// distance to it. Ties in distance are broken by the smallest pivot id;
/// vertices of `s` are their own pivots. Empty or unreachable `s` yields
/// `(None, ∞)`. Implemented as one Dijkstra from a virtual source attached to
/// `s` by 0-weight edges, with lexicographic `(distance, pivot id)` keys.
pub fn pivots_and_distances(g: &Graph, s: &[usize]) -> (Vec<Option<usize>>, Vec<f64>) {
    let n = g.n();
    let mut dist = vec![INF; n];
    let mut pivot: Vec<Option<usize>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    for &v in s {
        dist[v] = 0.0;
        pivot[v] = Some(v);
        heap.push(Reverse(PivotKey(0.0, v, v)));
    }
    while let Some(Reverse(PivotKey(du, pu, u))) = heap.pop() {
        if (du, pu) != (dist[u], pivot[u].unwrap()) {
            continue;
        }
        for &(v, w) in g.neighbors(u) {
            let nd = du + w;
            let better = nd < dist[v] || (nd == dist[v] && pivot[v].is_none_or(|pv| pu < pv));
            if better {
                dist[v] = nd;
                pivot[v] = Some(pu);
                heap.push(Reverse(PivotKey(nd, pu, v)));
            }
        }
    }
    // Self membership wins regardless of 0-weight ties.
    for &v in s {
        pivot[v] = Some(v);
    }
    (pivot, dist)
}

/// Heap key ordered by `(distance, pivot id, vertex id)`.
#[derive(PartialEq)]
struct PivotKey(f64, usize, usize);

impl Eq for PivotKey {}

impl PartialOrd for PivotKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PivotKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .total_cmp(&other.0)
            .then(self.1.cmp(&other.1))
            .then(self.2.cmp(&other.2))
    }
}

/// The light-edge set for `pivot_dist`: edge ids `e = (u, v, w)` with
/// `w < pivot_dist[u]` or `w < pivot_dist[v]` (either endpoint admits the
/// edge; an infinite threshold admits all of a vertex's edges).
pub fn light_edges(g: &Graph, pivot_dist: &[f64]) -> Vec<usize> {
    g.edges()
        .iter()
        .enumerate()
        .filter(|&(_, &(u, v, w))| w < pivot_dist[u] || w < pivot_dist[v])
        .map(|(e, _)| e)
        .collect()
}

/// A nested hitting-set hierarchy `V = S_0 ⊇ S_1 ⊇ ... ⊇ S_L ⊇ S_{L+1} = ∅`
/// with per-level pivots, exact pivot distances, and light-edge sets.
///
/// Levels use a uniform index range `0..=L+1`: level 0 is all of V (every
/// vertex is its own pivot, light set empty by the strict threshold), level
/// `L+1` is empty (pivot distances ∞, light set = E).
#[derive(Debug, Clone)]
pub struct HittingHierarchy {
    n: usize,
    thresholds: Vec<usize>,
    levels: Vec<Vec<usize>>,
    masks: Vec<Vec<bool>>,
    pivots: Vec<Vec<Option<usize>>>,
    pivot_dist: Vec<Vec<f64>>,
    light: Vec<Vec<usize>>,
}

impl HittingHierarchy {
    /// Builds the hierarchy for nondecreasing exponents `α_1 <= ... <= α_L`
    /// in `(0, 1]`. Level `i` is a greedy hitting set for the neighborhoods
    /// `Γ(u, k_i)` with `k_i = ceil(n^{α_i})` clamped to `[1, n-1]`; nesting
    /// is enforced by restricting greedy choices for level `i+1` to level
    /// `i`'s members (with an unrestricted fallback that propagates into
    /// coarser levels should restriction ever be infeasible).
    pub fn build(g: &Graph, exponents: &[f64]) -> Result<Self> {
        let n = g.n();
        for window in exponents.windows(2) {
            if window[1] < window[0] {
                return Err(Error::InvalidParameter(
                    "hierarchy exponents must be nondecreasing".into(),
                ));
            }
        }
        for &a in exponents {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "hierarchy exponent {a} outside (0, 1]"
                )));
            }
        }
        let l = exponents.len();
        let k_cap = n.saturating_sub(1).max(1);

        // thresholds[i] for proper levels 1..=L; 0 and L+1 are placeholders.
        let mut thresholds = vec![0; l + 2];
        for (idx, &a) in exponents.iter().enumerate() {
            let k = (n as f64).powf(a).ceil() as usize;
            thresholds[idx + 1] = k.clamp(1, k_cap);
        }

        // Exact neighborhoods Γ(u, k) reuse one Dijkstra per vertex.
        let all_dists: Vec<Vec<f64>> = (0..n).map(|u| dijkstra_plain(g, u)).collect();
        let gamma = |u: usize, k: usize| -> Vec<usize> {
            nearest_from_dist(u, &all_dists[u], None, k)
                .members
                .into_iter()
                .map(|(v, _)| v)
                .collect()
        };

        let mut levels: Vec<Vec<usize>> = Vec::with_capacity(l + 2);
        levels.push((0..n).collect()); // S_0 = V
        for i in 1..=l {
            let sets: Vec<Vec<usize>> = (0..n)
                .map(|u| gamma(u, thresholds[i]))
                .filter(|s| !s.is_empty())
                .collect();
            let pool_mask: Option<Vec<bool>> = if i == 1 {
                None
            } else {
                let mut mask = vec![false; n];
                for &v in &levels[i - 1] {
                    mask[v] = true;
                }
                Some(mask)
            };
            let (mut chosen, unreachable) =
                greedy_hitting_set_pool(&sets, n, pool_mask.as_deref());
            if !unreachable.is_empty() {
                // Restriction infeasible for these sets: cover them without
                // the pool and add the picks to every coarser level so that
                // nesting still holds.
                let residue: Vec<Vec<usize>> =
                    unreachable.iter().map(|&i| sets[i].clone()).collect();
                let (extra, none_left) = greedy_hitting_set_pool(&residue, n, None);
                debug_assert!(none_left.is_empty());
                for coarser in levels.iter_mut().skip(1) {
                    coarser.extend(extra.iter().copied());
                    coarser.sort_unstable();
                    coarser.dedup();
                }
                chosen.extend(extra);
                chosen.sort_unstable();
                chosen.dedup();
            }
            levels.push(chosen);
        }
        levels.push(Vec::new()); // S_{L+1} = ∅

        let mut masks = Vec::with_capacity(l + 2);
        let mut pivots = Vec::with_capacity(l + 2);
        let mut pivot_dist = Vec::with_capacity(l + 2);
        let mut light = Vec::with_capacity(l + 2);
        for level in &levels {
            let mut mask = vec![false; n];
            for &v in level {
                mask[v] = true;
            }
            let (p, d) = pivots_and_distances(g, level);
            light.push(light_edges(g, &d));
            masks.push(mask);
            pivots.push(p);
            pivot_dist.push(d);
        }
        Ok(HittingHierarchy {
            n,
            thresholds,
            levels,
            masks,
            pivots,
            pivot_dist,
            light,
        })
    }

    /// Number of vertices of the underlying graph.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of proper levels L (total levels are `L + 2`).
    pub fn num_proper(&self) -> usize {
        self.levels.len() - 2
    }

    /// Members of `S_i`, ascending; valid for `i` in `0..=L+1`.
    pub fn level(&self, i: usize) -> &[usize] {
        &self.levels[i]
    }

    /// Membership test for `S_i`.
    pub fn in_level(&self, i: usize, u: usize) -> bool {
        self.masks[i][u]
    }

    /// Neighborhood size threshold `k_i` for proper levels `1..=L`.
    pub fn threshold(&self, i: usize) -> usize {
        self.thresholds[i]
    }

    /// Pivot `p_i(u)`: the nearest `S_i` member (`None` if unreachable or
    /// `S_i` empty).
    pub fn pivot(&self, i: usize, u: usize) -> Option<usize> {
        self.pivots[i][u]
    }

    /// Exact distance `δ(u, S_i)` (∞ if unreachable or `S_i` empty).
    pub fn pivot_dist(&self, i: usize, u: usize) -> f64 {
        self.pivot_dist[i][u]
    }

    /// Edge ids of the light set `E_{S_i}`; `E_{S_0} = ∅`, `E_{S_{L+1}} = E`.
    pub fn light_level(&self, i: usize) -> &[usize] {
        &self.light[i]
    }

    /// Adjacency view of `E_{S_i}`.
    pub fn light_adj(&self, g: &Graph, i: usize) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for &e in &self.light[i] {
            let (u, v, w) = g.edges()[e];
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        adj
    }
}
