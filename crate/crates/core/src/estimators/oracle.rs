//! Exhaustive references for the exact estimators.
//!
//! These walk every compression argument a sample admits, reconstruct it, and
//! evaluate the resulting hypothesis pointwise against a plain
//! [`FiniteLabelDistribution`]. Nothing here uses the per-block decomposition.

use alloc::collections::BTreeSet;

use super::erm::for_each_compression_set;
use crate::construction::{code_to_hypothesis, reconstruct, BlockGeometry, CodeVector};
use crate::error::Result;
use crate::model::{empirical_risk, true_risk, FiniteLabelDistribution, Sample};

/// Every code vector the reconstruction function produces from `sample`.
pub fn reachable_codes(sample: &Sample, geometry: &BlockGeometry) -> Result<BTreeSet<CodeVector>> {
    let mut codes = BTreeSet::new();
    for_each_compression_set(sample, geometry, |set| {
        codes.insert(reconstruct(&set, geometry)?);
        Ok(())
    })?;
    Ok(codes)
}

pub fn brute_force_min_true_risk(
    sample: &Sample,
    distribution: &FiniteLabelDistribution,
    geometry: &BlockGeometry,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    for code in reachable_codes(sample, geometry)? {
        best = best.min(true_risk(
            &code_to_hypothesis(&code, geometry)?,
            distribution,
        )?);
    }
    Ok(best)
}

pub fn brute_force_uc_sup(
    sample: &Sample,
    distribution: &FiniteLabelDistribution,
    geometry: &BlockGeometry,
) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for code in reachable_codes(sample, geometry)? {
        let h = code_to_hypothesis(&code, geometry)?;
        sup = sup.max((empirical_risk(&h, sample)? - true_risk(&h, distribution)?).abs());
    }
    Ok(sup)
}
