use alloc::vec::Vec;

use super::candidates::CandidateSets;
use super::stats::{BitFn, SampleStats};
use crate::construction::{
    bit, code_to_hypothesis, reconstruct, BlockGeometry, CodeVector, CompressionSet, Variant,
};
use crate::error::{Error, Result};
use crate::model::{misclassified, Sample};

/// Largest `n^k` the exhaustive oracles accept.
pub const NAIVE_ENUMERATION_LIMIT: u128 = 10_000_000;

/// An empirical risk minimizer over the reachable class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErmResult {
    pub code: CodeVector,
    /// A compression set drawn from the sample that reconstructs to `code`.
    pub compression_set: CompressionSet,
    /// Sample points the minimizer mislabels.
    pub misclassified: u64,
    pub sample_len: usize,
}

impl ErmResult {
    pub fn empirical_risk(&self) -> f64 {
        self.misclassified as f64 / self.sample_len as f64
    }
}

/// ERM by per-block minimization.
///
/// Ties are broken towards the lexicographically smallest code vector, which
/// for the order-independent product class is the smallest code per block.
pub fn erm_blockwise(sample: &Sample, geometry: &BlockGeometry) -> Result<ErmResult> {
    erm_blockwise_with_bit(sample, geometry, bit)
}

/// [`erm_blockwise`] reading code bits through `bit_fn`. Exists so that
/// validation can check the oracle suites catch a broken codec.
#[doc(hidden)]
pub fn erm_blockwise_with_bit(
    sample: &Sample,
    geometry: &BlockGeometry,
    bit_fn: BitFn,
) -> Result<ErmResult> {
    let stats = SampleStats::new(sample, geometry)?;
    let candidates = CandidateSets::from_stats(&stats, geometry);
    Ok(erm_from_parts(&stats, &candidates, geometry, bit_fn))
}

pub(crate) fn erm_from_parts(
    stats: &SampleStats,
    candidates: &CandidateSets,
    geometry: &BlockGeometry,
    bit_fn: BitFn,
) -> ErmResult {
    let k = geometry.k();
    let mut best_code = Vec::with_capacity(k);
    let mut best_miss = Vec::with_capacity(k);
    for t in 0..k {
        let base = geometry.code_base(t);
        let (code, miss) = candidates
            .block(t)
            .iter()
            .map(|&c| (c, stats.misclassified(t, (c - base) as u64, bit_fn)))
            .min_by_key(|&(c, miss)| (miss, c))
            .expect("candidate sets are never empty");
        best_code.push(code);
        best_miss.push(miss);
    }

    let (codes, total) = match geometry.variant() {
        Variant::OrderIndependent => {
            let total = best_miss.iter().sum();
            (best_code, total)
        }
        Variant::OrderDependent => {
            // Cut c: blocks before c from sampled codes, blocks from c on at 0.
            let zero_miss: Vec<u64> = (0..k).map(|t| stats.misclassified(t, 0, bit_fn)).collect();
            let mut best: Option<(u64, Vec<usize>)> = None;
            for cut in 0..=k {
                let total: u64 =
                    best_miss[..cut].iter().sum::<u64>() + zero_miss[cut..].iter().sum::<u64>();
                let mut codes = best_code[..cut].to_vec();
                codes.resize(k, 0);
                let better = match &best {
                    None => true,
                    Some((bt, bc)) => (total, &codes) < (*bt, bc),
                };
                if better {
                    best = Some((total, codes));
                }
            }
            let (total, codes) = best.expect("at least one cut");
            (codes, total)
        }
    };

    let members = match geometry.variant() {
        Variant::OrderIndependent => codes
            .iter()
            .enumerate()
            .filter(|&(t, &c)| c != geometry.code_base(t))
            .map(|(_, &c)| c)
            .collect(),
        Variant::OrderDependent => {
            let len = codes.iter().rposition(|&c| c != 0).map_or(0, |p| p + 1);
            codes[..len].to_vec()
        }
    };
    ErmResult {
        code: CodeVector::new(codes),
        compression_set: CompressionSet::new(geometry.variant(), members),
        misclassified: total,
        sample_len: stats.n,
    }
}

/// Number of compression arguments drawn from a sample of size `n`:
/// `Σ_{j≤k} C(n, j)` index subsets, or `Σ_{j≤k} n^j` index sequences.
pub fn compression_set_count(n: usize, k: usize, variant: Variant) -> u128 {
    let n = n as u128;
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for j in 0..=k as u128 {
        total = total.saturating_add(term);
        term = match variant {
            Variant::OrderIndependent => {
                if j >= n {
                    0
                } else {
                    term.saturating_mul(n - j) / (j + 1)
                }
            }
            Variant::OrderDependent => term.saturating_mul(n),
        };
    }
    total
}

fn check_enumeration(n: usize, k: usize) -> Result<()> {
    let size = (n as u128).saturating_pow(k as u32);
    if size > NAIVE_ENUMERATION_LIMIT {
        return Err(Error::ResourceLimit(alloc::format!(
            "exhaustive enumeration needs n^k = {n}^{k} > {NAIVE_ENUMERATION_LIMIT}"
        )));
    }
    Ok(())
}

/// Calls `visit` on every compression argument the sample admits: index
/// subsets `i_1 < .. < i_j` (order-independent) or index sequences with
/// repetition (order-dependent), for `j = 0..=k`. Members are the sampled
/// support indices.
pub fn for_each_compression_set<F>(
    sample: &Sample,
    geometry: &BlockGeometry,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(CompressionSet) -> Result<()>,
{
    check_enumeration(sample.len(), geometry.k())?;
    let points: Vec<usize> = sample.iter().map(|e| e.instance).collect();
    let mut stack = Vec::with_capacity(geometry.k());
    enumerate(
        &points,
        geometry.k(),
        geometry.variant(),
        0,
        &mut stack,
        &mut visit,
    )
}

fn enumerate<F>(
    points: &[usize],
    k: usize,
    variant: Variant,
    start: usize,
    stack: &mut Vec<usize>,
    visit: &mut F,
) -> Result<()>
where
    F: FnMut(CompressionSet) -> Result<()>,
{
    visit(CompressionSet::new(
        variant,
        stack.iter().map(|&pos| points[pos]).collect(),
    ))?;
    if stack.len() == k {
        return Ok(());
    }
    let first = match variant {
        Variant::OrderIndependent => start,
        Variant::OrderDependent => 0,
    };
    for pos in first..points.len() {
        stack.push(pos);
        enumerate(points, k, variant, pos + 1, stack, visit)?;
        stack.pop();
    }
    Ok(())
}

/// ERM by exhaustive enumeration of compression arguments, each pushed
/// through the reconstruction function and evaluated pointwise. Ties go to
/// the lexicographically smallest code vector.
pub fn erm_naive(sample: &Sample, geometry: &BlockGeometry) -> Result<ErmResult> {
    let mut best: Option<(u64, CodeVector, CompressionSet)> = None;
    for_each_compression_set(sample, geometry, |set| {
        let code = reconstruct(&set, geometry)?;
        let miss = misclassified(&code_to_hypothesis(&code, geometry)?, sample)? as u64;
        let better = match &best {
            None => true,
            Some((bm, bc, _)) => (miss, &code) < (*bm, bc),
        };
        if better {
            best = Some((miss, code, set));
        }
        Ok(())
    })?;
    let (misclassified, code, compression_set) =
        best.expect("the empty argument is always enumerated");
    Ok(ErmResult {
        code,
        compression_set,
        misclassified,
        sample_len: sample.len(),
    })
}
