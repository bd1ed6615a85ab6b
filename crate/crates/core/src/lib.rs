//! Adversarial sample-compression constructions and exact rate estimation.
//!
//! The crate is split along the lines of the experiment:
//!
//! * [`model`]: finite-support labelled distributions, hypotheses, samples and
//!   exact/empirical risks.
//! * [`construction`]: block geometry, the bit codec, reconstruction functions
//!   for unordered (multiset) and ordered (sequence) compression sets, and the
//!   sign-indexed hard distribution family.
//! * [`estimators`]: empirical-risk-minimizing compression, exact per-trial
//!   excess risk and uniform-convergence suprema, brute-force oracles, seeded
//!   Monte Carlo estimation, rate-law fitting and upper bounds.
//!
//! Everything here is `no_std` (with `alloc`) and pure: every random
//! operation takes an explicit 64-bit seed.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod construction;
pub mod error;
pub mod estimators;
pub mod model;
pub mod rng;

pub use construction::{bit, BlockGeometry, CodeVector, CompressionSet, SignMatrix, Variant};
pub use error::{Error, Result};
pub use estimators::{FitResult, Measure, RateEstimate, TrialOutcome, TrialRunner, FLOOR_CONSTANT};
pub use model::{FiniteLabelDistribution, Hypothesis, Label, LabeledExample, Sample};
