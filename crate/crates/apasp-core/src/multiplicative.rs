//! The purely multiplicative APASP family: the (7/3 + ε) algorithm, its
//! generalization to stretch (3ℓ+4)/(ℓ+2) + ε for any ℓ ≥ 0, and the
//! alternating pivot walk that certifies the covering structure the
//! analysis relies on.
//!
//! With `eps = 0` the pipeline runs an exact multi-source stage and the
//! stretch bound is the pure rational (3ℓ+4)/(ℓ+2); positive `eps` trades
//! accuracy for the scaled min-plus backend and requires bounded integer
//! weights.

use crate::additive::seed_pivot_distances;
use crate::covering::{dijkstra_plain, k_nearest_restricted, nearest_from_dist, HittingHierarchy};
use crate::engine::{level_sweep, AuxFamily, BaseEdges, DistanceMatrix, ExecMode, SweepTemplate};
use crate::error::{Error, Result};
use crate::graph::{Graph, WeightClass};
use crate::minplus::{merge_into, msasp, MsaspBackend};
use crate::nearadd::{AdditiveForm, MixedGuarantee};

/// Configuration for [`framework`].
#[derive(Debug, Clone)]
pub struct FrameworkConfig {
    /// Stretch parameter ℓ ≥ 0; the target stretch is (3ℓ+4)/(ℓ+2) + `eps`.
    pub ell: usize,
    /// Approximation slack. 0 forces the exact multi-source backend and the
    /// pure rational stretch; positive values require bounded integer
    /// weights. The stage slack ε′ = (ℓ+2)·eps/(3ℓ+4) is derived internally.
    pub eps: f64,
    /// Exponent increments β₁ … β_{ℓ+1}; proper level j samples at rate
    /// n^{β₁+…+βⱼ}. Defaults come from [`default_betas`].
    pub betas: Vec<f64>,
    /// Sweep execution mode.
    pub exec: ExecMode,
    /// Multi-source backend used when `eps > 0` (exact is forced at 0).
    pub backend: MsaspBackend,
    /// Run the multi-source stage before the per-level sweeps instead of
    /// after. The order holds no importance for the guarantee; the knob
    /// exists so tests can demonstrate that.
    pub msasp_first: bool,
}

impl FrameworkConfig {
    /// Exact-backend defaults for a given ℓ.
    pub fn new(ell: usize) -> Self {
        FrameworkConfig {
            ell,
            eps: 0.0,
            betas: default_betas(ell),
            exec: ExecMode::Sequential,
            backend: MsaspBackend::Exact,
            msasp_first: false,
        }
    }
}

/// Published exponent constants for small ℓ, equal split otherwise.
pub fn default_betas(ell: usize) -> Vec<f64> {
    match ell {
        0 => vec![0.21235201],
        1 => vec![0.15135313; 2],
        2 => vec![0.1185119; 3],
        _ => vec![1.0 / (2.0 * (ell as f64 + 1.0)); ell + 1],
    }
}

/// Pivot-threading seeding: for every edge (x, y) ∈ E (both orientations)
/// and every v ∈ Γ(y, S_{i−1}, fan), apply
///
/// `d[pᵢ(v), x] ← min{ d[pᵢ(v), v] + d[v, y] + w(x, y), d[pᵢ(v), x] }`.
///
/// `fan = 0` is a no-op. Pivot distances should already be populated in `d`
/// for the update to be useful (missing entries read as ∞ and the candidate
/// is simply discarded).
pub fn seed_pivot_edges(
    g: &Graph,
    d: &mut DistanceMatrix,
    hier: &HittingHierarchy,
    i: usize,
    fan: usize,
) {
    if fan == 0 || i == 0 || i > hier.num_proper() {
        return;
    }
    let allowed = hier.level(i - 1);
    let fans: Vec<Vec<usize>> = (0..g.n())
        .map(|y| {
            k_nearest_restricted(g, y, allowed, fan)
                .members
                .into_iter()
                .map(|(v, _)| v)
                .collect()
        })
        .collect();
    thread_pivot_level(g, d, hier, i, &fans);
}

/// The update loop shared by [`seed_pivot_edges`] and the pipeline (which
/// supplies precomputed fan sets).
fn thread_pivot_level(
    g: &Graph,
    d: &mut DistanceMatrix,
    hier: &HittingHierarchy,
    i: usize,
    fans: &[Vec<usize>],
) {
    for &(x, y, w) in g.edges() {
        for (a, b) in [(x, y), (y, x)] {
            for &v in &fans[b] {
                if let Some(p) = hier.pivot(i, v) {
                    let cand = d.get(p, v) + d.get(v, b) + w;
                    d.set_min(p, a, cand);
                }
            }
        }
    }
}

/// The (7/3 + eps)-APASP: the ℓ = 1 instantiation of [`framework`] with
/// explicit exponents (n^β, n^{β+γ}).
pub fn frac73(g: &Graph, eps: f64, beta: f64, gamma: f64) -> Result<DistanceMatrix> {
    let cfg = FrameworkConfig {
        eps,
        betas: vec![beta, gamma],
        ..FrameworkConfig::new(1)
    };
    framework(g, &cfg)
}

/// Runs the stretch-((3ℓ+4)/(ℓ+2) + eps) pipeline:
///
/// 1. build the ℓ+1-level hierarchy and seed all pivot distances;
/// 2. seed the exact restricted neighborhoods Γ(u, Sᵢ, ⌈n^{β_{i+1}}⌉) and
///    Γ(u, Sᵢ, k_{i+1}) for i = 0…ℓ;
/// 3. thread edges through pivots ([`seed_pivot_edges`] fans plus each
///    endpoint's own pivots) and through the sampled neighborhood members;
/// 4. sweep levels ℓ…0 over E_{S_{i+1}} with the source fan and all pivot
///    arcs, and merge a (1+ε′)-multi-source pass from S_{ℓ+1};
/// 5. route every pair through its neighborhood members and through both
///    endpoints' pivots at every level.
pub fn framework(g: &Graph, cfg: &FrameworkConfig) -> Result<DistanceMatrix> {
    let ell = cfg.ell;
    if !(cfg.eps >= 0.0 && cfg.eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps {} must be finite and nonnegative",
            cfg.eps
        )));
    }
    if cfg.eps > 0.0 && matches!(g.weight_class(), WeightClass::Real) {
        return Err(Error::WeightClass(
            "eps > 0 requires bounded nonnegative integer weights".into(),
        ));
    }
    if cfg.betas.len() != ell + 1 {
        return Err(Error::InvalidParameter(format!(
            "expected {} exponent increments for ell = {}, got {}",
            ell + 1,
            ell,
            cfg.betas.len()
        )));
    }
    let mut alphas = Vec::with_capacity(ell + 1);
    let mut acc = 0.0;
    for &b in &cfg.betas {
        if !b.is_finite() || b <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "exponent increment {b} must be positive"
            )));
        }
        acc += b;
        alphas.push(acc);
    }
    if acc > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "exponent increments sum to {acc} > 1"
        )));
    }

    let n = g.n();
    let hier = HittingHierarchy::build(g, &alphas)?;
    let mut d = DistanceMatrix::from_graph(g);
    if n == 0 {
        return Ok(d);
    }
    seed_pivot_distances(&mut d, &hier);

    // Exact restricted neighborhoods, one Dijkstra per vertex shared across
    // levels: g_sets[i][u] = Γ(u, S_i, ⌈n^{β_{i+1}}⌉) (the β-fan) and
    // b_sets[i][u] = Γ(u, S_i, k_{i+1}) (the threshold fan, a superset).
    // Their exact distances are folded into `d` as they are discovered.
    let nf = n as f64;
    let beta_fan: Vec<usize> = cfg.betas.iter().map(|&b| nf.powf(b).ceil() as usize).collect();
    let masks: Vec<Vec<bool>> = (0..=ell)
        .map(|i| (0..n).map(|u| hier.in_level(i, u)).collect())
        .collect();
    let mut g_sets: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; ell + 1];
    let mut b_sets: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; ell + 1];
    for u in 0..n {
        let dist = dijkstra_plain(g, u);
        for i in 0..=ell {
            let big = nearest_from_dist(u, &dist, Some(&masks[i]), hier.threshold(i + 1));
            for &(v, dv) in &big.members {
                d.set_min(u, v, dv);
            }
            let ids: Vec<usize> = big.members.iter().map(|&(v, _)| v).collect();
            g_sets[i][u] = ids[..beta_fan[i].min(ids.len())].to_vec();
            b_sets[i][u] = ids;
        }
    }

    // Pivot threading per level. The fan at pivot level i is the union of
    // the level-(i−1) β-fan with the base threshold fan Γ(y, k₁), which
    // covers the two-level algorithm's seeding as the ℓ = 1 special case.
    for i in 1..=ell + 1 {
        let union: Vec<Vec<usize>> = (0..n)
            .map(|u| {
                let mut f = g_sets[i - 1][u].clone();
                f.extend(b_sets[0][u].iter().copied());
                f.sort_unstable();
                f.dedup();
                f
            })
            .collect();
        thread_pivot_level(g, &mut d, &hier, i, &union);
    }

    // Each endpoint's own pivots: d[pᵢ(y), x] ← d[y, pᵢ(y)] + w(x, y).
    for i in 1..=ell + 1 {
        for &(x, y, w) in g.edges() {
            for (a, b) in [(x, y), (y, x)] {
                if let Some(p) = hier.pivot(i, b) {
                    d.set_min(p, a, d.get(b, p) + w);
                }
            }
        }
    }

    // Direct neighborhood-member threading: d[s, x] ← d[s, y] + w(x, y)
    // for every s ∈ Γ(y, S_i, k_{i+1}).
    for i in 0..=ell {
        for &(x, y, w) in g.edges() {
            for (a, b) in [(x, y), (y, x)] {
                for &s in &b_sets[i][b] {
                    d.set_min(s, a, d.get(s, b) + w);
                }
            }
        }
    }

    let eps_prime = (ell as f64 + 2.0) * cfg.eps / (3.0 * ell as f64 + 4.0);
    let backend = if eps_prime > 0.0 {
        cfg.backend
    } else {
        MsaspBackend::Exact
    };
    let aux = vec![
        AuxFamily::SourceFan,
        AuxFamily::PivotEdges {
            levels: (1..=ell + 1).collect(),
        },
    ];
    let sweeps = |d: &mut DistanceMatrix| {
        for i in (0..=ell).rev() {
            let template = SweepTemplate {
                base: BaseEdges::LightLevel(i + 1),
                aux: aux.clone(),
            };
            level_sweep(g, d, &hier, i, &template, cfg.exec);
        }
    };
    let multi_source = |d: &mut DistanceMatrix| {
        let m = msasp(g, hier.level(ell + 1), eps_prime, backend);
        merge_into(d, &m);
    };
    if cfg.msasp_first {
        multi_source(&mut d);
        sweeps(&mut d);
    } else {
        sweeps(&mut d);
        multi_source(&mut d);
    }

    // Final updates: every ordered pair through the β-fan members of its
    // first endpoint, then through both endpoints' pivots at every level.
    for i in 1..=ell {
        for u in 0..n {
            for v in 0..n {
                if v == u {
                    continue;
                }
                for &s in &g_sets[i][u] {
                    d.set_min(u, v, d.get(u, s) + d.get(s, v));
                }
            }
        }
    }
    for i in 1..=ell + 1 {
        for u in 0..n {
            if let Some(p) = hier.pivot(i, u) {
                for v in 0..n {
                    if v != u {
                        d.set_min(u, v, d.get(u, p) + d.get(p, v));
                    }
                }
            }
        }
    }
    Ok(d)
}

/// The guarantee [`frac73`] ships: stretch 7/3 + eps, no additive term.
pub fn frac73_guarantee(eps: f64) -> MixedGuarantee {
    MixedGuarantee {
        alpha: 7.0 / 3.0 + eps,
        additive: AdditiveForm::None,
        provenance: vec!["frac73".into()],
    }
}

/// The guarantee [`framework`] ships: stretch (3ℓ+4)/(ℓ+2) + eps.
pub fn framework_guarantee(ell: usize, eps: f64) -> MixedGuarantee {
    MixedGuarantee {
        alpha: (3.0 * ell as f64 + 4.0) / (ell as f64 + 2.0) + eps,
        additive: AdditiveForm::None,
        provenance: vec![format!("framework(ell={ell})")],
    }
}

/// The alternating pivot walk over a hierarchy with L proper levels.
///
/// Starting from `x = u, y = v, i = r`, the walk halts at the first level
/// `i` where `pᵢ(x)` lies in Γ(y, Sᵢ, k_{i+1}) — the owner `y` itself
/// counts as a member — and otherwise increments `i` and swaps the roles
/// of `x` and `y`. Level L halts unconditionally. The returned index `f`
/// satisfies the parity-split bound
///
/// `δ(u, p_f(u)) ≤ (f − r)·δ(u, v) + δ(u, p_r(u))` when `f − r` is even,
///
/// and the same right-hand side bounds `δ(v, p_f(v))` when `f − r` is odd.
///
/// The walk is a certified property of the covering structure; the
/// [`framework`] pipeline itself never calls it.
pub fn tz_walk(g: &Graph, hier: &HittingHierarchy, u: usize, v: usize, r: usize) -> usize {
    let top = hier.num_proper();
    assert!(r <= top, "start level {r} exceeds top proper level {top}");
    let (mut x, mut y) = (u, v);
    for i in r..top {
        if let Some(p) = hier.pivot(i, x) {
            if p == y
                || k_nearest_restricted(g, y, hier.level(i), hier.threshold(i + 1)).contains(p)
            {
                return i;
            }
        }
        std::mem::swap(&mut x, &mut y);
    }
    top
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_apsp, validate};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_stretch(g: &Graph, d: &DistanceMatrix, guarantee: &MixedGuarantee) {
        let report = validate(g, d, guarantee);
        assert!(
            report.passed(),
            "stretch {} violated: ratio {:.6}, first {:?}",
            guarantee.alpha,
            report.max_mult_ratio,
            report.violations.first()
        );
    }

    #[test]
    fn default_exponents_per_ell() {
        assert_eq!(default_betas(0), vec![0.21235201]);
        assert_eq!(default_betas(1), vec![0.15135313; 2]);
        assert_eq!(default_betas(2), vec![0.1185119; 3]);
        assert_eq!(default_betas(4), vec![0.1; 5]);
        let cfg = FrameworkConfig::new(3);
        assert_eq!(cfg.betas, vec![0.125; 4]);
        assert_eq!(cfg.eps, 0.0);
        assert!(!cfg.msasp_first);
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = Graph::gen_random(10, 0.4, 1, 5, 3).unwrap();
        let mut cfg = FrameworkConfig::new(1);
        cfg.eps = -0.1;
        assert!(framework(&g, &cfg).is_err());

        let mut cfg = FrameworkConfig::new(1);
        cfg.betas = vec![0.2];
        assert!(framework(&g, &cfg).is_err());

        let mut cfg = FrameworkConfig::new(1);
        cfg.betas = vec![0.2, 0.0];
        assert!(framework(&g, &cfg).is_err());

        let mut cfg = FrameworkConfig::new(1);
        cfg.betas = vec![0.6, 0.6];
        assert!(framework(&g, &cfg).is_err());

        let real = Graph::new(2, &[(0, 1, 1.5)]).unwrap();
        assert!(matches!(
            frac73(&real, 0.1, 0.3, 0.3),
            Err(Error::WeightClass(_))
        ));
        // eps = 0 admits real weights.
        assert!(frac73(&real, 0.0, 0.3, 0.3).is_ok());
    }

    #[test]
    fn single_edge_is_exact() {
        let g = Graph::new(2, &[(0, 1, 5.0)]).unwrap();
        for ell in 0..=2 {
            let d = framework(&g, &FrameworkConfig::new(ell)).unwrap();
            assert_eq!(d.get(0, 1), 5.0);
        }
    }

    #[test]
    fn seed_fan_zero_is_no_op() {
        let g = Graph::gen_random(20, 0.3, 1, 9, 11).unwrap();
        let hier = HittingHierarchy::build(&g, &[0.3, 0.6]).unwrap();
        let mut d = DistanceMatrix::from_graph(&g);
        seed_pivot_distances(&mut d, &hier);
        let before = d.clone();
        seed_pivot_edges(&g, &mut d, &hier, 1, 0);
        seed_pivot_edges(&g, &mut d, &hier, 2, 0);
        assert_eq!(d, before);
    }

    #[test]
    fn seed_self_pivot_triangle() {
        // Direct edges are all shortest, so d[v, y] = δ(v, y) at call time
        // and every S₁ member v (its own pivot) must satisfy
        // d[v, x] ≤ δ(v, y) + w(x, y) afterwards.
        let g = Graph::new(3, &[(0, 1, 3.0), (1, 2, 2.0), (0, 2, 4.0)]).unwrap();
        let hier = HittingHierarchy::build(&g, &[0.5]).unwrap();
        let mut d = DistanceMatrix::from_graph(&g);
        seed_pivot_distances(&mut d, &hier);
        seed_pivot_edges(&g, &mut d, &hier, 1, 2);
        let (delta, _) = exact_apsp(&g);
        let mut exercised = 0;
        for &(x, y, w) in g.edges() {
            for (a, b) in [(x, y), (y, x)] {
                for v in 0..3 {
                    if v != b && hier.pivot(1, v) == Some(v) {
                        let fan = k_nearest_restricted(&g, b, hier.level(0), 2);
                        if fan.contains(v) {
                            assert!(d.get(v, a) <= delta.get(v, b) + w + 1e-12);
                            exercised += 1;
                        }
                    }
                }
            }
        }
        assert!(exercised > 0);
    }

    #[test]
    fn seed_matches_direct_formula_on_path() {
        // Six-vertex path with distinct weights; replay the quoted update
        // literally and compare entry by entry.
        let weights = [2.0, 7.0, 1.0, 4.0, 3.0];
        let edges: Vec<(usize, usize, f64)> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (i, i + 1, w))
            .collect();
        let g = Graph::new(6, &edges).unwrap();
        let hier = HittingHierarchy::build(&g, &[0.3, 0.6]).unwrap();
        let mut seeded = DistanceMatrix::from_graph(&g);
        seed_pivot_distances(&mut seeded, &hier);
        let mut expected = seeded.clone();
        for i in [1, 2] {
            let fan = 2;
            seed_pivot_edges(&g, &mut seeded, &hier, i, fan);
            for &(x, y, w) in g.edges() {
                for (a, b) in [(x, y), (y, x)] {
                    let members = k_nearest_restricted(&g, b, hier.level(i - 1), fan);
                    for &(v, _) in &members.members {
                        if let Some(p) = hier.pivot(i, v) {
                            let cand = expected.get(p, v) + expected.get(v, b) + w;
                            expected.set_min(p, a, cand);
                        }
                    }
                }
            }
        }
        assert_eq!(seeded, expected);
    }

    #[test]
    fn light_path_pairs_are_exact() {
        // Pairs whose canonical shortest path stays inside E_{S₁} come out
        // exact from the level-0 sweep.
        let g = Graph::gen_random(40, 0.15, 1, 20, 19).unwrap();
        let beta = 0.15135313;
        let d = frac73(&g, 0.0, beta, beta).unwrap();
        let hier = HittingHierarchy::build(&g, &[beta, 2.0 * beta]).unwrap();
        let mut light_edge = vec![false; g.m()];
        for &e in hier.light_level(1) {
            light_edge[e] = true;
        }
        let (delta, trees) = exact_apsp(&g);
        let edge_ids: std::collections::HashMap<(usize, usize), usize> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(id, &(u, v, _))| ((u, v), id))
            .collect();
        let mut found = 0;
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                let Some(path) = crate::oracle::canonical_path(&g, &trees, u, v) else {
                    continue;
                };
                let all_light = path.edges.iter().all(|&(a, b, _)| {
                    let key = (a.min(b), a.max(b));
                    light_edge[edge_ids[&key]]
                });
                if all_light {
                    assert_eq!(d.get(u, v), delta.get(u, v), "pair ({u},{v})");
                    found += 1;
                }
            }
        }
        assert!(found > 0, "test graph produced no fully-light pairs");
    }

    #[test]
    fn framework_l0_stretch_two() {
        for seed in [7, 40] {
            let g = Graph::gen_random(40, 0.15, 1, 30, seed).unwrap();
            let d = framework(&g, &FrameworkConfig::new(0)).unwrap();
            assert_stretch(&g, &d, &framework_guarantee(0, 0.0));
        }
    }

    #[test]
    fn frac73_stretch_and_framework_equivalence() {
        for seed in [3, 11] {
            let g = Graph::gen_random(48, 0.2, 1, 20, seed).unwrap();
            let d = frac73(&g, 0.0, 0.15135313, 0.15135313).unwrap();
            assert_stretch(&g, &d, &frac73_guarantee(0.0));
            let via_framework = framework(&g, &FrameworkConfig::new(1)).unwrap();
            assert_eq!(d, via_framework);
        }
    }

    #[test]
    fn framework_l2_l3_stretch() {
        let g = Graph::gen_random(36, 0.25, 1, 15, 23).unwrap();
        for ell in [2, 3] {
            let d = framework(&g, &FrameworkConfig::new(ell)).unwrap();
            assert_stretch(&g, &d, &framework_guarantee(ell, 0.0));
        }
    }

    #[test]
    fn positive_eps_backends() {
        let g = Graph::gen_random(32, 0.25, 1, 12, 5).unwrap();
        let cfg = FrameworkConfig {
            eps: 0.5,
            backend: MsaspBackend::Scaled,
            ..FrameworkConfig::new(1)
        };
        let d = framework(&g, &cfg).unwrap();
        assert_stretch(&g, &d, &framework_guarantee(1, 0.5));

        // The exact backend satisfies every (1+ε′) contract as well.
        let cfg = FrameworkConfig {
            eps: 0.25,
            ..FrameworkConfig::new(0)
        };
        let d = framework(&g, &cfg).unwrap();
        assert_stretch(&g, &d, &framework_guarantee(0, 0.25));
    }

    #[test]
    fn stage_order_and_parallel_mode_hold_guarantee() {
        let g = Graph::gen_random(40, 0.18, 1, 25, 31).unwrap();
        let swapped = FrameworkConfig {
            msasp_first: true,
            ..FrameworkConfig::new(1)
        };
        let d = framework(&g, &swapped).unwrap();
        assert_stretch(&g, &d, &framework_guarantee(1, 0.0));

        let parallel = FrameworkConfig {
            exec: ExecMode::Parallel,
            ..FrameworkConfig::new(1)
        };
        let d = framework(&g, &parallel).unwrap();
        assert_stretch(&g, &d, &framework_guarantee(1, 0.0));
    }

    #[test]
    fn walk_halts_immediately_on_membership() {
        let g = Graph::gen_random(30, 0.2, 1, 9, 13).unwrap();
        let hier = HittingHierarchy::build(&g, &[0.3, 0.6]).unwrap();
        // r = 1: a level-1 vertex is its own pivot, so any v holding it in
        // Γ(v, S₁, k₂) halts at once.
        let mut checked = 0;
        for &u in hier.level(1) {
            for v in 0..g.n() {
                if v != u && k_nearest_restricted(&g, v, hier.level(1), hier.threshold(2)).contains(u)
                {
                    assert_eq!(tz_walk(&g, &hier, u, v, 1), 1);
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
        // Owner inclusion: walking toward the pivot itself halts at once.
        let u = hier.level(1)[0];
        assert_eq!(tz_walk(&g, &hier, u, u, 1), 1);
    }

    #[test]
    fn walk_parity_membership_and_distance_bound() {
        for seed in [5, 6] {
            let g = Graph::gen_random(40, 0.12, 1, 9, seed).unwrap();
            let exponents: Vec<f64> = default_betas(2)
                .iter()
                .scan(0.0, |acc, &b| {
                    *acc += b;
                    Some(*acc)
                })
                .collect();
            let hier = HittingHierarchy::build(&g, &exponents).unwrap();
            let top = hier.num_proper();
            let (delta, _) = exact_apsp(&g);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xdead);
            for _ in 0..250 {
                let u = rng.gen_range(0..g.n());
                let v = rng.gen_range(0..g.n());
                let r = rng.gen_range(0..=top);
                let f = tz_walk(&g, &hier, u, v, r);
                assert!((r..=top).contains(&f));
                let even = (f - r).is_multiple_of(2);
                if f < top {
                    let (x, y) = if even { (u, v) } else { (v, u) };
                    let p = hier.pivot(f, x).expect("halting requires a pivot");
                    assert!(
                        p == y
                            || k_nearest_restricted(&g, y, hier.level(f), hier.threshold(f + 1))
                                .contains(p),
                        "halt at {f} without membership (u={u}, v={v}, r={r})"
                    );
                }
                let lhs = if even {
                    hier.pivot_dist(f, u)
                } else {
                    hier.pivot_dist(f, v)
                };
                let walk_cost = if f > r {
                    (f - r) as f64 * delta.get(u, v)
                } else {
                    0.0
                };
                let rhs = walk_cost + hier.pivot_dist(r, u);
                assert!(
                    lhs <= rhs + 1e-9,
                    "parity bound failed: u={u} v={v} r={r} f={f} lhs={lhs} rhs={rhs}"
                );
            }
        }
    }
}
