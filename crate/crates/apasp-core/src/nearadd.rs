//! The near-additive `(1+ε, min{2W_1, 4W_2})`-APASP algorithm, the guarantee
//! vocabulary shared with the validator, and the multiplicative/additive
//! trade-off combiner.

use crate::covering::{k_nearest_restricted, HittingHierarchy};
use crate::engine::{
    level_sweep, min_merge, AuxFamily, BaseEdges, DistanceMatrix, ExecMode, SweepTemplate,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, WeightClass};
use crate::minplus::{ampmm, merge_into, msasp, submatrix, MsaspBackend};

/// The additive part of a guarantee, evaluated against the descending
/// heavy-edge weights `W_1, W_2, ...` of a shortest path.
#[derive(Debug, Clone, PartialEq)]
pub enum AdditiveForm {
    /// Purely multiplicative guarantee.
    None,
    /// `+2W_1`.
    TwoW1,
    /// `+min{2W_1, 4W_2}`; a single-edge path is bounded by `2W_1` (its
    /// `W_2` does not exist).
    MinTwoW1FourW2,
    /// `+coeff · (W_1 + ... + W_count)`.
    SumTopK { count: usize, coeff: f64 },
}

impl AdditiveForm {
    /// Compact token form: `none`, `2w1`, `min2w1_4w2`, or `sum:count:coeff`.
    pub fn token(&self) -> String {
        match self {
            AdditiveForm::None => "none".into(),
            AdditiveForm::TwoW1 => "2w1".into(),
            AdditiveForm::MinTwoW1FourW2 => "min2w1_4w2".into(),
            AdditiveForm::SumTopK { count, coeff } => format!("sum:{count}:{coeff}"),
        }
    }

    /// Parses a token produced by [`AdditiveForm::token`].
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => return Ok(AdditiveForm::None),
            "2w1" => return Ok(AdditiveForm::TwoW1),
            "min2w1_4w2" => return Ok(AdditiveForm::MinTwoW1FourW2),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("sum:") {
            if let [count, coeff] = rest.split(':').collect::<Vec<_>>()[..] {
                let count = count
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad sum count {count:?}")))?;
                let coeff = coeff
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad sum coefficient {coeff:?}")))?;
                return Ok(AdditiveForm::SumTopK { count, coeff });
            }
        }
        Err(Error::InvalidParameter(format!(
            "unknown additive form {s:?} (expected none | 2w1 | min2w1_4w2 | sum:count:coeff)"
        )))
    }

    fn value(&self, heavy: &[f64], delta: f64) -> Result<f64> {
        if heavy.is_empty() && delta > 0.0 && !matches!(self, AdditiveForm::None) {
            return Err(Error::InvalidInput(
                "heavy-edge list too short for the additive form".into(),
            ));
        }
        Ok(match self {
            AdditiveForm::None => 0.0,
            AdditiveForm::TwoW1 => 2.0 * heavy.first().copied().unwrap_or(0.0),
            AdditiveForm::MinTwoW1FourW2 => match heavy {
                [] => 0.0,
                [w1] => 2.0 * w1,
                [w1, w2, ..] => (2.0 * w1).min(4.0 * w2),
            },
            AdditiveForm::SumTopK { count, coeff } => {
                coeff * heavy.iter().take(*count).sum::<f64>()
            }
        })
    }
}

/// An `(α, additive)`-APASP guarantee: `δ <= d <= α·δ + additive(heavy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedGuarantee {
    pub alpha: f64,
    pub additive: AdditiveForm,
    /// Which run(s) produced the matrix under this guarantee.
    pub provenance: Vec<String>,
}

/// Numeric upper bound `α·δ + additive(heavy)` for one pair; `heavy` is the
/// (unpadded) descending edge-weight list of a fixed shortest path.
pub fn evaluate_guarantee(gspec: &MixedGuarantee, delta: f64, heavy: &[f64]) -> Result<f64> {
    Ok(gspec.alpha * delta + gspec.additive.value(heavy, delta)?)
}

/// Configuration for [`near_additive_with`].
#[derive(Debug, Clone)]
pub struct NearAdditiveConfig {
    /// Multiplicative slack ε > 0 of the `(1+ε, min{2W_1,4W_2})` guarantee.
    pub eps: f64,
    /// First-level exponent (level sizes `n^beta`, `n^{beta+gamma}`).
    pub beta: f64,
    /// Second-level increment; also sizes the seeded `Γ(u, S_1, n^gamma)`.
    pub gamma: f64,
    pub exec: ExecMode,
    pub backend: MsaspBackend,
    /// Diagnostic: exchange the two AMPMM stages. The result stays a valid
    /// upper-bound matrix but the shipped (paper) order is required for the
    /// full guarantee.
    pub swap_ampmm: bool,
}

impl NearAdditiveConfig {
    pub fn new(eps: f64) -> Self {
        NearAdditiveConfig {
            eps,
            beta: 1.0 / 3.0,
            gamma: 1.0 / 3.0,
            exec: ExecMode::Sequential,
            backend: MsaspBackend::Exact,
            swap_ampmm: false,
        }
    }
}

/// `(1+eps, min{2W_1, 4W_2})`-APASP with default exponents and backends.
pub fn near_additive(g: &Graph, eps: f64, beta: f64, gamma: f64) -> Result<DistanceMatrix> {
    let cfg = NearAdditiveConfig {
        beta,
        gamma,
        ..NearAdditiveConfig::new(eps)
    };
    near_additive_with(g, &cfg)
}

/// The fixed-order pipeline behind [`near_additive`]:
/// pivots and exact `Γ(u, S_1, ·)` seeding, `(1+ε')`-MSASP from `S_2`,
/// AMPMM of `d(V×S_2) ⋆ d(S_2×V)`, interleaved sweeps `S_1, S_0, S_1, S_0`,
/// AMPMM of `d(V×S_1) ⋆ d(S_1×S_1)`, and a final `S_0` sweep over `E_{S_1}`,
/// with `ε' = min{ε/4, sqrt(1+ε/2)-1}`.
pub fn near_additive_with(g: &Graph, cfg: &NearAdditiveConfig) -> Result<DistanceMatrix> {
    if !cfg.eps.is_finite() || cfg.eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "near_additive needs eps > 0, got {}",
            cfg.eps
        )));
    }
    if let WeightClass::Real = g.weight_class() {
        return Err(Error::WeightClass(
            "near_additive requires bounded integer weights".into(),
        ));
    }
    let n = g.n();
    let hier = HittingHierarchy::build(g, &[cfg.beta, cfg.beta + cfg.gamma])?;
    let mut d = DistanceMatrix::from_graph(g);
    for u in 0..n {
        for j in 1..=2 {
            if let Some(p) = hier.pivot(j, u) {
                d.set_min(u, p, hier.pivot_dist(j, u));
            }
        }
    }
    let k_gamma = ((n as f64).powf(cfg.gamma).ceil() as usize).clamp(1, n.saturating_sub(1).max(1));
    for u in 0..n {
        for &(s, dist) in &k_nearest_restricted(g, u, hier.level(1), k_gamma).members {
            d.set_min(u, s, dist);
        }
    }
    let eps_p = (cfg.eps / 4.0).min((1.0 + cfg.eps / 2.0).sqrt() - 1.0);
    merge_into(&mut d, &msasp(g, hier.level(2), eps_p, cfg.backend));

    let all: Vec<usize> = (0..n).collect();
    let stage_s2 = |d: &mut DistanceMatrix| -> Result<()> {
        let a = submatrix(d, &all, hier.level(2));
        let b = submatrix(d, hier.level(2), &all);
        merge_into(d, &ampmm(&a, &b, eps_p)?);
        Ok(())
    };
    let stage_s1 = |d: &mut DistanceMatrix| -> Result<()> {
        let a = submatrix(d, &all, hier.level(1));
        let b = submatrix(d, hier.level(1), hier.level(1));
        merge_into(d, &ampmm(&a, &b, eps_p)?);
        Ok(())
    };
    if cfg.swap_ampmm {
        stage_s1(&mut d)?;
    } else {
        stage_s2(&mut d)?;
    }

    let aux = vec![
        AuxFamily::SourceFan,
        AuxFamily::PivotEdges { levels: vec![1, 2] },
    ];
    let from_s1 = SweepTemplate {
        base: BaseEdges::LightLevel(2),
        aux: aux.clone(),
    };
    let from_s0 = SweepTemplate {
        base: BaseEdges::LightLevel(1),
        aux,
    };
    for (level, template) in [(1, &from_s1), (0, &from_s0), (1, &from_s1), (0, &from_s0)] {
        level_sweep(g, &mut d, &hier, level, template, cfg.exec);
    }
    if cfg.swap_ampmm {
        stage_s2(&mut d)?;
    } else {
        stage_s1(&mut d)?;
    }
    level_sweep(g, &mut d, &hier, 0, &from_s0, cfg.exec);
    Ok(d)
}

/// The guarantee [`near_additive`] promises.
pub fn near_additive_guarantee(eps: f64) -> MixedGuarantee {
    MixedGuarantee {
        alpha: 1.0 + eps,
        additive: AdditiveForm::MinTwoW1FourW2,
        provenance: vec!["near-additive".into()],
    }
}

/// Pointwise minimum of two valid distance matrices; the result obeys every
/// convex combination of the input guarantees.
pub fn combine_tradeoff(da: &DistanceMatrix, db: &DistanceMatrix) -> Result<DistanceMatrix> {
    let mut out = da.clone();
    min_merge(&mut out, db)?;
    Ok(out)
}

/// The guarantee of combining `plus2wi(k)` with `framework(3k, eps=0)` at
/// mixing weights `alpha, beta > 0`:
/// `((9k+4)α + (3k+2)β) / ((α+β)(3k+2))` multiplicative and
/// `(2β/(α+β)) · Σ_{i=1}^{k+1} W_i` additive.
pub fn tradeoff_guarantee(k: usize, alpha: f64, beta: f64) -> MixedGuarantee {
    let kf = k as f64;
    let denom = (alpha + beta) * (3.0 * kf + 2.0);
    MixedGuarantee {
        alpha: ((9.0 * kf + 4.0) * alpha + (3.0 * kf + 2.0) * beta) / denom,
        additive: AdditiveForm::SumTopK {
            count: k + 1,
            coeff: 2.0 * beta / (alpha + beta),
        },
        provenance: vec![format!("plus2wi(k={k})"), format!("framework(ell={})", 3 * k)],
    }
}
