use rayon::prelude::*;

use sc_rates::estimators::{trial_seed, Measure, RateEstimate, TrialOutcome, TrialRunner};

/// Runs trials on the rayon pool. Outcomes land in index order, so the result
/// equals [`TrialRunner::run_trials`].
pub fn run_trials(
    runner: &TrialRunner,
    measure: Measure,
    trials: usize,
    master_seed: u64,
) -> sc_rates::Result<Vec<TrialOutcome>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|i| runner.run(measure, trial_seed(master_seed, i)))
        .collect()
}

pub fn monte_carlo(
    runner: &TrialRunner,
    measure: Measure,
    trials: usize,
    master_seed: u64,
) -> sc_rates::Result<RateEstimate> {
    if trials < 2 {
        return Err(sc_rates::Error::InvalidArgument(format!(
            "monte carlo needs at least 2 trials (got {trials})"
        )));
    }
    let outcomes = run_trials(runner, measure, trials, master_seed)?;
    runner.estimate(measure, master_seed, &outcomes)
}
