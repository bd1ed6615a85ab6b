//! ERM compression, exact excess risk and uniform-convergence suprema,
//! brute-force oracles, Monte Carlo estimation, rate-law fitting and bounds.
//!
//! Everything exact here leans on two decompositions of a reconstructed
//! hypothesis `h = (i_1, .., i_k)`:
//!
//! * empirical: `R̂(h) = Σ_t miss_t(i_t) / n`, where `miss_t` counts sample
//!   points in block `t` that `h_{t,i_t}` mislabels;
//! * true: `R(h) = (1/k) Σ_t R_t(i_t)` with
//!   `R_t(i) = (1 - ε)/2 + ε · W_t(i) / |B_t|` and `W_t(i)` the number of block
//!   points whose bit class `i` labels against the majority.
//!
//! `W_t` is an integer, so risks of different codes with equal weight are
//! bit-identical and the excess `ε · ΔW / (k |B_t|)` is never negative.

mod bounds;
mod candidates;
mod erm;
mod exact;
mod fit;
pub mod oracle;
mod stats;
mod trial;

use core::fmt;
use core::str::FromStr;

use crate::error::{invalid_argument, Error, Result};

pub use bounds::{lower_envelope, upper_bound_uc, FLOOR_CONSTANT};
pub use candidates::{candidate_sets, CandidateSets};
pub use erm::{
    compression_set_count, erm_blockwise, erm_blockwise_with_bit, erm_naive,
    for_each_compression_set, ErmResult, NAIVE_ENUMERATION_LIMIT,
};
pub use exact::{
    reachable_min_true_risk, reachable_min_true_risk_with_epsilon, uc_sup_exact,
    uc_sup_exact_with_epsilon,
};
pub use fit::{fit_line, fit_rate_law, FitResult};
pub use trial::{monte_carlo, run_trial, trial_seed, RateEstimate, TrialOutcome, TrialRunner};

/// Which rate a Monte Carlo run estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    /// `R(ERM) - min over the reachable class`.
    AgnosticExcess,
    /// `sup over the reachable class of |R̂ - R|`.
    UniformConvergence,
}

impl Measure {
    pub fn flag(self) -> &'static str {
        match self {
            Measure::AgnosticExcess => "ag",
            Measure::UniformConvergence => "uc",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ag" | "agnostic-excess" => Ok(Measure::AgnosticExcess),
            "uc" | "uniform-convergence" => Ok(Measure::UniformConvergence),
            other => Err(invalid_argument!(
                "unknown measure `{other}` (expected `ag` or `uc`)"
            )),
        }
    }
}
