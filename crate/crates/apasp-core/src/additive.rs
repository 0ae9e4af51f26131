//! Purely additive APASP: the `+2W_1` algorithm (two-level hierarchy, three
//! descending sweeps) and the `+2(W_1+...+W_{k+1})` family (3k+2 levels with
//! auxiliary `F_i` pair blocks), where `W_i` is the i-th heaviest edge
//! weight on a shortest path.

use crate::covering::HittingHierarchy;
use crate::engine::{level_sweep, AuxFamily, BaseEdges, DistanceMatrix, ExecMode, SweepTemplate};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::nearadd::{AdditiveForm, MixedGuarantee};

/// Order of the per-level sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepOrder {
    /// Top level first — the only order the guarantees hold under.
    #[default]
    Descending,
    /// Bottom level first. Deliberately wrong; exists so tests can
    /// demonstrate that the descending order is load-bearing.
    AscendingUnsound,
}

/// Parameters for the additive runs.
#[derive(Debug, Clone)]
pub struct AdditiveRunConfig {
    /// Trade-off parameter of `plus2wi`; `k = 0` selects the `+2W_1` path.
    pub k: usize,
    /// Level exponent: levels are `n^{i·beta}`. Defaults to `1/(3k+2)`
    /// (`1/3` for `k = 0`).
    pub beta: f64,
    /// Second exponent of the `k = 0` two-level hierarchy (`n^beta`,
    /// `n^{beta+gamma}`); unused for `k >= 1`. Defaults to `1/3`.
    pub gamma: f64,
    pub exec: ExecMode,
    pub order: SweepOrder,
}

impl AdditiveRunConfig {
    pub fn new(k: usize) -> Self {
        let beta = if k == 0 {
            1.0 / 3.0
        } else {
            1.0 / (3.0 * k as f64 + 2.0)
        };
        AdditiveRunConfig {
            k,
            beta,
            gamma: 1.0 / 3.0,
            exec: ExecMode::Sequential,
            order: SweepOrder::Descending,
        }
    }
}

pub(crate) fn seed_pivot_distances(d: &mut DistanceMatrix, hier: &HittingHierarchy) {
    for j in 1..=hier.num_proper() {
        for u in 0..hier.n() {
            if let Some(p) = hier.pivot(j, u) {
                d.set_min(u, p, hier.pivot_dist(j, u));
            }
        }
    }
}

fn sweep_levels(num_proper: usize, order: SweepOrder) -> Vec<usize> {
    match order {
        SweepOrder::Descending => (0..=num_proper).rev().collect(),
        SweepOrder::AscendingUnsound => (0..=num_proper).collect(),
    }
}

/// `+2W_1`-APASP: levels `n^beta`, `n^{beta+gamma}`, sweeps `i = 2, 1, 0`
/// over `E_{S_{i+1}} ∪ ({s}×V) ∪ H ∪ (S_2×S_0)`.
pub fn plus2w1(g: &Graph, beta: f64, gamma: f64) -> Result<DistanceMatrix> {
    plus2w1_impl(g, beta, gamma, ExecMode::Sequential, SweepOrder::Descending)
}

fn plus2w1_impl(
    g: &Graph,
    beta: f64,
    gamma: f64,
    exec: ExecMode,
    order: SweepOrder,
) -> Result<DistanceMatrix> {
    for &e in &[beta, gamma] {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "plus2w1 exponent {e} outside (0, 1)"
            )));
        }
    }
    let hier = HittingHierarchy::build(g, &[beta, beta + gamma])?;
    let mut d = DistanceMatrix::from_graph(g);
    seed_pivot_distances(&mut d, &hier);
    let aux = vec![
        AuxFamily::SourceFan,
        AuxFamily::PivotEdges { levels: vec![1, 2] },
        AuxFamily::PairBlock { a: 2, b: 0 },
    ];
    for i in sweep_levels(2, order) {
        let template = SweepTemplate {
            base: BaseEdges::LightLevel(i + 1),
            aux: aux.clone(),
        };
        level_sweep(g, &mut d, &hier, i, &template, exec);
    }
    Ok(d)
}

/// The auxiliary pair blocks `F_i` of the level-`i` sweep: all `(j, ℓ)` with
/// `i + j + ℓ >= 3k+1`, reduced to the Pareto frontier `j + ℓ =
/// max(3k+1-i, 0)` (dominated blocks are redundant because coarser levels
/// contain finer ones).
pub fn build_fi_edges(hier: &HittingHierarchy, i: usize, k: usize) -> Vec<AuxFamily> {
    debug_assert_eq!(hier.num_proper(), 3 * k + 2);
    let m = (3 * k + 1).saturating_sub(i);
    (0..=m)
        .map(|j| AuxFamily::PairBlock { a: j, b: m - j })
        .collect()
}

/// `+2(W_1+...+W_{k+1})`-APASP with the default exponent `beta = 1/(3k+2)`;
/// `k = 0` delegates to [`plus2w1`].
pub fn plus2wi(g: &Graph, k: usize) -> Result<DistanceMatrix> {
    plus2wi_with(g, &AdditiveRunConfig::new(k))
}

/// [`plus2wi`] with explicit configuration. Builds the `3k+2`-level
/// hierarchy with `α_i = i·beta`, seeds pivot distances, and sweeps levels
/// in descending order `3k+2, ..., 0`, each over `E_{S_{i+1}} ∪ ({s}×V) ∪ H
/// ∪ F_i`.
pub fn plus2wi_with(g: &Graph, cfg: &AdditiveRunConfig) -> Result<DistanceMatrix> {
    if cfg.k == 0 {
        return plus2w1_impl(g, cfg.beta, cfg.gamma, cfg.exec, cfg.order);
    }
    let l = 3 * cfg.k + 2;
    if !cfg.beta.is_finite() || cfg.beta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "plus2wi exponent {} must be positive",
            cfg.beta
        )));
    }
    let exponents: Vec<f64> = (1..=l).map(|i| i as f64 * cfg.beta).collect();
    let hier = HittingHierarchy::build(g, &exponents)?;
    let mut d = DistanceMatrix::from_graph(g);
    seed_pivot_distances(&mut d, &hier);
    let h_levels: Vec<usize> = (1..=l).collect();
    for i in sweep_levels(l, cfg.order) {
        let mut aux = vec![
            AuxFamily::SourceFan,
            AuxFamily::PivotEdges {
                levels: h_levels.clone(),
            },
        ];
        aux.extend(build_fi_edges(&hier, i, cfg.k));
        let template = SweepTemplate {
            base: BaseEdges::LightLevel(i + 1),
            aux,
        };
        level_sweep(g, &mut d, &hier, i, &template, cfg.exec);
    }
    Ok(d)
}

/// The guarantee [`plus2w1`] promises.
pub fn plus2w1_guarantee() -> MixedGuarantee {
    MixedGuarantee {
        alpha: 1.0,
        additive: AdditiveForm::TwoW1,
        provenance: vec!["plus2w1".into()],
    }
}

/// The guarantee [`plus2wi`] promises for a given `k`.
pub fn plus2wi_guarantee(k: usize) -> MixedGuarantee {
    if k == 0 {
        return plus2w1_guarantee();
    }
    MixedGuarantee {
        alpha: 1.0,
        additive: AdditiveForm::SumTopK {
            count: k + 1,
            coeff: 2.0,
        },
        provenance: vec![format!("plus2wi(k={k})")],
    }
}
