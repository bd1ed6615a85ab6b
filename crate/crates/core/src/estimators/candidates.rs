use alloc::vec::Vec;

use super::stats::SampleStats;
use crate::construction::{BlockGeometry, Variant};
use crate::error::Result;
use crate::model::Sample;

/// Codes each block can take inside the class reachable from a sample.
///
/// Order-independent: block `t` may use any sampled index inside the block,
/// plus its default code `t*m`. Order-dependent: every block may use any
/// sampled index; in addition, any suffix of blocks may be forced to code 0
/// (shorter sequences are zero-padded), which [`CandidateSets::has_zero_suffix`]
/// reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSets {
    variant: Variant,
    blocks: Vec<Vec<usize>>,
}

impl CandidateSets {
    pub(crate) fn from_stats(stats: &SampleStats, geometry: &BlockGeometry) -> Self {
        let blocks = match geometry.variant() {
            Variant::OrderIndependent => {
                let mut blocks: Vec<Vec<usize>> = (0..geometry.k())
                    .map(|t| alloc::vec![geometry.code_base(t)])
                    .collect();
                for &j in &stats.present {
                    let t = j / geometry.block_size();
                    if j != geometry.code_base(t) {
                        blocks[t].push(j);
                    }
                }
                blocks
            }
            Variant::OrderDependent => alloc::vec![stats.present.clone()],
        };
        Self {
            variant: geometry.variant(),
            blocks,
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Sorted candidate codes for block `t`.
    pub fn block(&self, t: usize) -> &[usize] {
        match self.variant {
            Variant::OrderIndependent => &self.blocks[t],
            Variant::OrderDependent => &self.blocks[0],
        }
    }

    /// True when suffixes of blocks can additionally be set to code 0.
    pub fn has_zero_suffix(&self) -> bool {
        self.variant == Variant::OrderDependent
    }
}

/// Reachable per-block codes for `sample`.
pub fn candidate_sets(sample: &Sample, geometry: &BlockGeometry) -> Result<CandidateSets> {
    let stats = SampleStats::new(sample, geometry)?;
    Ok(CandidateSets::from_stats(&stats, geometry))
}
