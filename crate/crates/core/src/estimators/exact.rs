use alloc::vec::Vec;

use super::candidates::CandidateSets;
use super::stats::{RiskModel, SampleStats};
use crate::construction::{bit, epsilon, BlockGeometry, SignMatrix, Variant};
use crate::error::Result;
use crate::model::Sample;

/// Smallest total weight `Σ_t W_t` over the reachable class.
pub(crate) fn min_weight(
    candidates: &CandidateSets,
    model: &RiskModel,
    geometry: &BlockGeometry,
) -> u64 {
    let k = geometry.k();
    let best: Vec<u64> = (0..k)
        .map(|t| {
            let base = geometry.code_base(t);
            candidates
                .block(t)
                .iter()
                .map(|&c| model.weight(t, (c - base) as u64))
                .min()
                .expect("candidate sets are never empty")
        })
        .collect();
    match geometry.variant() {
        Variant::OrderIndependent => best.iter().sum(),
        Variant::OrderDependent => {
            let zero: Vec<u64> = (0..k).map(|t| model.weight(t, 0)).collect();
            (0..=k)
                .map(|cut| best[..cut].iter().sum::<u64>() + zero[cut..].iter().sum::<u64>())
                .min()
                .expect("at least one cut")
        }
    }
}

/// `sup |R̂(h) - R(h)|` over the reachable class.
///
/// The deviation of `(i_1, .., i_k)` is `Σ_t D_t(i_t)` with
/// `D_t(i) = miss_t(i)/n - R_t(i)/k`, so over a product of per-block sets the
/// supremum is `max(Σ_t max D_t, -Σ_t min D_t)`. The order-dependent class is
/// a union of such products, one per zero-suffix cut.
pub(crate) fn uc_sup(
    stats: &SampleStats,
    candidates: &CandidateSets,
    model: &RiskModel,
    geometry: &BlockGeometry,
) -> f64 {
    let k = geometry.k();
    let n = stats.n as f64;
    let kf = k as f64;
    let deviation = |t: usize, pattern: u64| {
        stats.misclassified(t, pattern, bit) as f64 / n
            - model.block_risk(model.weight(t, pattern)) / kf
    };
    let mut hi = Vec::with_capacity(k);
    let mut lo = Vec::with_capacity(k);
    for t in 0..k {
        let base = geometry.code_base(t);
        let (mut max_d, mut min_d) = (f64::NEG_INFINITY, f64::INFINITY);
        for &c in candidates.block(t) {
            let d = deviation(t, (c - base) as u64);
            max_d = max_d.max(d);
            min_d = min_d.min(d);
        }
        hi.push(max_d);
        lo.push(min_d);
    }
    match geometry.variant() {
        Variant::OrderIndependent => {
            let up: f64 = hi.iter().sum();
            let down: f64 = lo.iter().sum();
            up.max(-down)
        }
        Variant::OrderDependent => {
            let zero: Vec<f64> = (0..k).map(|t| deviation(t, 0)).collect();
            (0..=k)
                .map(|cut| {
                    let tail: f64 = zero[cut..].iter().sum();
                    let up = hi[..cut].iter().sum::<f64>() + tail;
                    let down = lo[..cut].iter().sum::<f64>() + tail;
                    up.max(-down)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        }
    }
}

/// Exact `min R(h; P^σ)` over the class reachable from `sample`.
pub fn reachable_min_true_risk(
    sample: &Sample,
    sigma: &SignMatrix,
    geometry: &BlockGeometry,
) -> Result<f64> {
    reachable_min_true_risk_with_epsilon(sample, sigma, geometry, epsilon(geometry)?)
}

/// [`reachable_min_true_risk`] for the distribution built with margin `eps`.
pub fn reachable_min_true_risk_with_epsilon(
    sample: &Sample,
    sigma: &SignMatrix,
    geometry: &BlockGeometry,
    eps: f64,
) -> Result<f64> {
    let model = RiskModel::new(sigma, geometry, eps)?;
    let stats = SampleStats::new(sample, geometry)?;
    let candidates = CandidateSets::from_stats(&stats, geometry);
    Ok(model.risk(min_weight(&candidates, &model, geometry)))
}

/// Exact `sup |R̂(h; Z) - R(h; P^σ)|` over the class reachable from `sample`.
pub fn uc_sup_exact(sample: &Sample, sigma: &SignMatrix, geometry: &BlockGeometry) -> Result<f64> {
    uc_sup_exact_with_epsilon(sample, sigma, geometry, epsilon(geometry)?)
}

/// [`uc_sup_exact`] for the distribution built with margin `eps`.
pub fn uc_sup_exact_with_epsilon(
    sample: &Sample,
    sigma: &SignMatrix,
    geometry: &BlockGeometry,
    eps: f64,
) -> Result<f64> {
    let model = RiskModel::new(sigma, geometry, eps)?;
    let stats = SampleStats::new(sample, geometry)?;
    let candidates = CandidateSets::from_stats(&stats, geometry);
    Ok(uc_sup(&stats, &candidates, &model, geometry))
}
