use alloc::vec::Vec;

use super::candidates::CandidateSets;
use super::erm::erm_from_parts;
use super::exact::{min_weight, uc_sup};
use super::stats::{RiskModel, SampleStats};
use super::Measure;
use crate::construction::{
    bit, build_distribution_with_epsilon, sample_sign_matrix, BlockGeometry, CodeVector, Variant,
};
use crate::error::{invalid_argument, Result};
use crate::model::sample_dataset;
use crate::rng::derive_seed;

const SIGMA_STREAM: u64 = 0;
const SAMPLE_STREAM: u64 = 1;

/// Seed of trial `index` in a run seeded with `master_seed`. Independent of
/// the number of trials, so longer runs extend shorter ones.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    derive_seed(master_seed, index)
}

/// One draw of `σ`, `P^σ` and `Z_[n]`, with the ERM solution scored exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub erm_code: CodeVector,
    pub erm_true_risk: f64,
    pub reachable_min_risk: f64,
    /// `erm_true_risk - reachable_min_risk`, never negative.
    pub excess: f64,
    /// Present when the trial ran for [`Measure::UniformConvergence`].
    pub uc_sup: Option<f64>,
}

impl TrialOutcome {
    pub fn value(&self, measure: Measure) -> Option<f64> {
        match measure {
            Measure::AgnosticExcess => Some(self.excess),
            Measure::UniformConvergence => self.uc_sup,
        }
    }
}

/// Runs trials on one geometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialRunner {
    geometry: BlockGeometry,
    epsilon: f64,
}

impl TrialRunner {
    pub fn new(n: usize, k: usize, variant: Variant) -> Result<Self> {
        Ok(Self::from_geometry(BlockGeometry::new(n, k, variant)?))
    }

    pub fn from_geometry(geometry: BlockGeometry) -> Self {
        Self {
            epsilon: geometry.epsilon(),
            geometry,
        }
    }

    /// Overrides the margin of the hard distributions. With `eps = 0` every
    /// label is a fair coin and every excess is exactly zero.
    pub fn with_epsilon(mut self, eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(invalid_argument!("epsilon = {eps} is outside [0, 1]"));
        }
        self.epsilon = eps;
        Ok(self)
    }

    pub fn geometry(&self) -> &BlockGeometry {
        &self.geometry
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn run(&self, measure: Measure, seed: u64) -> Result<TrialOutcome> {
        let g = &self.geometry;
        let sigma = sample_sign_matrix(g, derive_seed(seed, SIGMA_STREAM));
        let distribution = build_distribution_with_epsilon(&sigma, g, self.epsilon)?;
        let sample = sample_dataset(&distribution, g.n(), derive_seed(seed, SAMPLE_STREAM))?;

        let stats = SampleStats::new(&sample, g)?;
        let candidates = CandidateSets::from_stats(&stats, g);
        let model = RiskModel::new(&sigma, g, self.epsilon)?;

        let erm = erm_from_parts(&stats, &candidates, g, bit);
        let erm_weight: u64 = erm
            .code
            .codes()
            .iter()
            .enumerate()
            .map(|(t, &c)| model.weight(t, (c - g.code_base(t)) as u64))
            .sum();
        let min = min_weight(&candidates, &model, g);
        debug_assert!(erm_weight >= min);
        let uc = match measure {
            Measure::UniformConvergence => Some(uc_sup(&stats, &candidates, &model, g)),
            Measure::AgnosticExcess => None,
        };
        Ok(TrialOutcome {
            erm_code: erm.code,
            erm_true_risk: model.risk(erm_weight),
            reachable_min_risk: model.risk(min),
            excess: model.excess(erm_weight, min),
            uc_sup: uc,
        })
    }

    /// Trials `0..trials`, run serially in index order.
    pub fn run_trials(
        &self,
        measure: Measure,
        trials: usize,
        master_seed: u64,
    ) -> Result<Vec<TrialOutcome>> {
        (0..trials as u64)
            .map(|i| self.run(measure, trial_seed(master_seed, i)))
            .collect()
    }

    /// Reduces outcomes (in index order) to an estimate.
    pub fn estimate(
        &self,
        measure: Measure,
        master_seed: u64,
        outcomes: &[TrialOutcome],
    ) -> Result<RateEstimate> {
        let values = outcomes
            .iter()
            .map(|o| {
                o.value(measure).ok_or_else(|| {
                    invalid_argument!("outcome carries no value for measure {measure}")
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        RateEstimate::from_values(measure, &self.geometry, self.epsilon, master_seed, &values)
    }

    pub fn monte_carlo(
        &self,
        measure: Measure,
        trials: usize,
        master_seed: u64,
    ) -> Result<RateEstimate> {
        if trials < 2 {
            return Err(invalid_argument!(
                "monte carlo needs at least 2 trials (got {trials})"
            ));
        }
        let outcomes = self.run_trials(measure, trials, master_seed)?;
        self.estimate(measure, master_seed, &outcomes)
    }
}

/// One trial at `(n, k, variant)`.
pub fn run_trial(
    measure: Measure,
    n: usize,
    k: usize,
    variant: Variant,
    seed: u64,
) -> Result<TrialOutcome> {
    TrialRunner::new(n, k, variant)?.run(measure, seed)
}

/// Mean and standard error of `trials` seeded trials at `(n, k, variant)`.
pub fn monte_carlo(
    measure: Measure,
    n: usize,
    k: usize,
    variant: Variant,
    trials: usize,
    master_seed: u64,
) -> Result<RateEstimate> {
    TrialRunner::new(n, k, variant)?.monte_carlo(measure, trials, master_seed)
}

/// Monte Carlo estimate of one rate at one configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RateEstimate {
    pub measure: Measure,
    pub variant: Variant,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub stderr: f64,
    pub seed: u64,
}

impl RateEstimate {
    pub fn from_values(
        measure: Measure,
        geometry: &BlockGeometry,
        epsilon: f64,
        seed: u64,
        values: &[f64],
    ) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid_argument!(
                "an estimate needs at least 2 trials (got {})",
                values.len()
            ));
        }
        // Shifted by the first value so identical trials give zero spread exactly.
        let shift = values[0];
        let count = values.len() as f64;
        let mean_shift = values.iter().map(|v| v - shift).sum::<f64>() / count;
        let ss: f64 = values
            .iter()
            .map(|v| {
                let d = v - shift - mean_shift;
                d * d
            })
            .sum();
        let stderr = libm::sqrt(ss / (count - 1.0) / count);
        Ok(Self {
            measure,
            variant: geometry.variant(),
            n: geometry.n(),
            k: geometry.k(),
            m: geometry.m(),
            epsilon,
            trials: values.len(),
            mean: shift + mean_shift,
            stderr,
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_distribution, code_to_hypothesis};
    use crate::estimators::{erm_blockwise, reachable_min_true_risk, uc_sup_exact, FLOOR_CONSTANT};
    use crate::model::true_risk;
    use alloc::vec;

    const OI: Variant = Variant::OrderIndependent;
    const OD: Variant = Variant::OrderDependent;

    #[test]
    fn outcome_agrees_with_public_operations() {
        for (n, k, v) in [(32, 2, OI), (64, 2, OD), (100, 3, OI)] {
            let runner = TrialRunner::new(n, k, v).unwrap();
            let g = *runner.geometry();
            for seed in 0..10 {
                let o = runner.run(Measure::UniformConvergence, seed).unwrap();
                let sigma = sample_sign_matrix(&g, derive_seed(seed, SIGMA_STREAM));
                let p = build_distribution(&sigma, &g).unwrap();
                let s = sample_dataset(&p, n, derive_seed(seed, SAMPLE_STREAM)).unwrap();
                assert_eq!(erm_blockwise(&s, &g).unwrap().code, o.erm_code);
                let r = true_risk(&code_to_hypothesis(&o.erm_code, &g).unwrap(), &p).unwrap();
                assert!((r - o.erm_true_risk).abs() < 1e-12);
                let min = reachable_min_true_risk(&s, &sigma, &g).unwrap();
                assert!((min - o.reachable_min_risk).abs() < 1e-12);
                assert!((o.excess - (o.erm_true_risk - o.reachable_min_risk)).abs() < 1e-12);
                let sup = uc_sup_exact(&s, &sigma, &g).unwrap();
                assert_eq!(o.uc_sup, Some(sup));
            }
        }
    }

    #[test]
    fn excess_nonnegative_and_deterministic() {
        let runner = TrialRunner::new(64, 2, OI).unwrap();
        for seed in 0..300 {
            let o = runner.run(Measure::AgnosticExcess, seed).unwrap();
            assert!(o.excess >= 0.0);
            assert!(o.uc_sup.is_none());
            assert_eq!(o, runner.run(Measure::AgnosticExcess, seed).unwrap());
        }
    }

    #[test]
    fn zero_margin_gives_zero_excess() {
        for v in [OI, OD] {
            let runner = TrialRunner::new(128, 2, v)
                .unwrap()
                .with_epsilon(0.0)
                .unwrap();
            for seed in 0..200 {
                let o = runner.run(Measure::UniformConvergence, seed).unwrap();
                assert_eq!(o.excess, 0.0);
                assert_eq!(o.erm_true_risk, 0.5);
            }
        }
        assert!(TrialRunner::new(128, 2, OI)
            .unwrap()
            .with_epsilon(1.5)
            .is_err());
    }

    #[test]
    fn identical_values_have_zero_stderr() {
        let g = BlockGeometry::new(32, 2, OI).unwrap();
        let one = TrialRunner::from_geometry(g)
            .run(Measure::AgnosticExcess, 5)
            .unwrap();
        let values = vec![one.excess; 17];
        let est = RateEstimate::from_values(Measure::AgnosticExcess, &g, g.epsilon(), 5, &values)
            .unwrap();
        assert_eq!(est.mean, one.excess);
        assert_eq!(est.stderr, 0.0);
        assert!(
            RateEstimate::from_values(Measure::AgnosticExcess, &g, 0.5, 5, &values[..1]).is_err()
        );
    }

    #[test]
    fn stderr_formula() {
        let g = BlockGeometry::new(32, 2, OI).unwrap();
        let est =
            RateEstimate::from_values(Measure::AgnosticExcess, &g, 0.5, 0, &[1.0, 2.0, 3.0, 4.0])
                .unwrap();
        assert!((est.mean - 2.5).abs() < 1e-15);
        // sd = sqrt(5/3), stderr = sd / 2
        assert!((est.stderr - libm::sqrt(5.0 / 3.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn longer_runs_extend_shorter_ones() {
        let runner = TrialRunner::new(64, 2, OD).unwrap();
        let short = runner.run_trials(Measure::AgnosticExcess, 20, 77).unwrap();
        let long = runner.run_trials(Measure::AgnosticExcess, 40, 77).unwrap();
        assert_eq!(&long[..20], &short[..]);
        assert!(monte_carlo(Measure::AgnosticExcess, 64, 2, OD, 1, 77).is_err());
    }

    #[test]
    fn small_configuration_clears_floor() {
        let est = monte_carlo(Measure::AgnosticExcess, 32, 2, OI, 10_000, 2024).unwrap();
        assert!((est.epsilon - 0.5).abs() < 1e-15);
        assert!(est.mean > 0.0 && est.mean < est.epsilon);
        assert!(est.mean >= FLOOR_CONSTANT * est.epsilon);
        assert_eq!(
            est,
            monte_carlo(Measure::AgnosticExcess, 32, 2, OI, 10_000, 2024).unwrap()
        );
    }
}
