use alloc::vec;
use alloc::vec::Vec;

use crate::construction::{BlockGeometry, SignMatrix};
use crate::error::{invalid_argument, Result};
use crate::model::{Label, Sample};

pub(crate) type BitFn = fn(u64, u32) -> Label;

/// Label counts of a sample per `(block, bit class)` plus the sorted set of
/// sampled support indices.
pub(crate) struct SampleStats {
    width: usize,
    zeros: Vec<u32>,
    ones: Vec<u32>,
    pub(crate) present: Vec<usize>,
    pub(crate) n: usize,
}

impl SampleStats {
    pub(crate) fn new(sample: &Sample, geometry: &BlockGeometry) -> Result<Self> {
        let width = geometry.bit_width() as usize;
        let support = geometry.support_size();
        let block = geometry.block_size();
        let mut zeros = vec![0u32; geometry.k() * width];
        let mut ones = vec![0u32; geometry.k() * width];
        let mut seen = vec![false; support];
        for e in sample.iter() {
            if e.instance >= support {
                return Err(invalid_argument!(
                    "sample instance {} is outside the support 0..{support}",
                    e.instance
                ));
            }
            seen[e.instance] = true;
            let t = e.instance / block;
            let r = (e.instance - t * block) % width;
            match e.label {
                Label::Zero => zeros[t * width + r] += 1,
                Label::One => ones[t * width + r] += 1,
            }
        }
        let present = seen
            .iter()
            .enumerate()
            .filter_map(|(j, &s)| s.then_some(j))
            .collect();
        Ok(Self {
            width,
            zeros,
            ones,
            present,
            n: sample.len(),
        })
    }

    /// Sample points of block `t` mislabelled by the block hypothesis with
    /// bit pattern `pattern`.
    #[inline]
    pub(crate) fn misclassified(&self, t: usize, pattern: u64, bit: BitFn) -> u64 {
        let base = t * self.width;
        (0..self.width)
            .map(|r| {
                let idx = base + r;
                u64::from(match bit(pattern, r as u32) {
                    Label::One => self.zeros[idx],
                    Label::Zero => self.ones[idx],
                })
            })
            .sum()
    }
}

/// Per-block true-risk weights for a fixed sign matrix.
pub(crate) struct RiskModel {
    class_sizes: Vec<u64>,
    majority: Vec<u64>,
    pub(crate) epsilon: f64,
    block_size: f64,
    k: f64,
}

impl RiskModel {
    pub(crate) fn new(sigma: &SignMatrix, geometry: &BlockGeometry, epsilon: f64) -> Result<Self> {
        if sigma.rows() != geometry.k() || sigma.cols() != geometry.bit_width() as usize {
            return Err(invalid_argument!(
                "sign matrix is {}x{} but the geometry needs {}x{}",
                sigma.rows(),
                sigma.cols(),
                geometry.k(),
                geometry.bit_width()
            ));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(invalid_argument!("epsilon = {epsilon} is outside [0, 1]"));
        }
        Ok(Self {
            class_sizes: geometry
                .class_sizes()
                .into_iter()
                .map(|c| c as u64)
                .collect(),
            majority: (0..geometry.k())
                .map(|t| sigma.majority_pattern(t))
                .collect(),
            epsilon,
            block_size: geometry.block_size() as f64,
            k: geometry.k() as f64,
        })
    }

    /// `W_t(pattern)`: block points labelled against their majority.
    #[inline]
    pub(crate) fn weight(&self, t: usize, pattern: u64) -> u64 {
        let mut diff = pattern ^ self.majority[t];
        let mut total = 0;
        while diff != 0 {
            let r = diff.trailing_zeros() as usize;
            total += self.class_sizes[r];
            diff &= diff - 1;
        }
        total
    }

    /// `R_t` for a block weight.
    #[inline]
    pub(crate) fn block_risk(&self, weight: u64) -> f64 {
        0.5 * (1.0 - self.epsilon) + self.epsilon * weight as f64 / self.block_size
    }

    /// Global risk for the summed block weights.
    #[inline]
    pub(crate) fn risk(&self, total_weight: u64) -> f64 {
        0.5 * (1.0 - self.epsilon) + self.epsilon * total_weight as f64 / (self.k * self.block_size)
    }

    /// `R(a) - R(b)` for `a ≥ b`, computed from the integer gap.
    #[inline]
    pub(crate) fn excess(&self, erm_weight: u64, min_weight: u64) -> f64 {
        self.epsilon * (erm_weight - min_weight) as f64 / (self.k * self.block_size)
    }
}
