//! Self-validation: property and oracle suites over the model, the
//! construction and the estimators, run at fixed sizes from one master seed.

use std::fmt;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

use sc_rates::construction::{
    bit, build_distribution_with_epsilon, code_to_hypothesis, eval_block_hypothesis, hamming_delta,
    make_geometry, optimal_code, reconstruct, reconstruct_multiset, sample_sign_matrix,
};
use sc_rates::estimators::oracle::{brute_force_min_true_risk, brute_force_uc_sup};
use sc_rates::estimators::{
    erm_blockwise_with_bit, erm_naive, reachable_min_true_risk, uc_sup_exact, Measure, TrialRunner,
    FLOOR_CONSTANT,
};
use sc_rates::model::{
    conditional_risk, empirical_risk, sample_dataset, true_risk, FiniteLabelDistribution,
    Hypothesis, Label, Sample,
};
use sc_rates::rng::{derive_seed, rng_from_seed};
use sc_rates::{BlockGeometry, CodeVector, CompressionSet, SignMatrix, Variant};

use crate::parallel;

const OI: Variant = Variant::OrderIndependent;
const OD: Variant = Variant::OrderDependent;
const TOL: f64 = 1e-12;
/// Failure details kept per suite; the count is always complete.
const MAX_REPORTED: usize = 5;

/// `(n, k)` pairs small enough for exhaustive enumeration.
pub const ORACLE_CONFIGS: [(usize, usize); 3] = [(4, 1), (6, 2), (8, 2)];
pub const ORACLE_TRIALS: u64 = 200;
pub const IDENTITY_DRAWS: u64 = 1000;
pub const CHI_SQUARE_DRAWS: usize = 100_000;
pub const CHI_SQUARE_ALPHA: f64 = 0.001;

pub type BitFn = fn(u64, u32) -> Label;

/// Bit extractor with position 0 wired to position 1. Used by
/// `validate --inject-bit-fault` to show the oracle suites notice.
pub fn faulty_bit(i: u64, r: u32) -> Label {
    if r == 0 {
        bit(i, 1)
    } else {
        bit(i, r)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub seed: u64,
    pub bit_fn: BitFn,
}

impl Options {
    pub fn new(seed: u64) -> Self {
        Self { seed, bit_fn: bit }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: u64,
    pub failed: u64,
    pub failures: Vec<String>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failed == 0 && self.cases > 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status}  {:<28} {:>7} cases  {:>5} failed  {:>7.2}s",
            self.name, self.cases, self.failed, self.seconds
        )?;
        for msg in &self.failures {
            write!(f, "\n      {msg}")?;
        }
        if self.failed as usize > self.failures.len() {
            write!(
                f,
                "\n      ... {} more",
                self.failed as usize - self.failures.len()
            )?;
        }
        Ok(())
    }
}

struct Tally {
    cases: u64,
    failed: u64,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            cases: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_REPORTED {
                self.failures.push(detail());
            }
        }
    }

    /// Records an error from the library as a failed case.
    fn error(&mut self, context: String, err: sc_rates::Error) {
        self.check(false, || format!("{context}: {err}"));
    }
}

fn params(seed: u64, g: &BlockGeometry) -> String {
    format!(
        "seed={seed} n={} k={} variant={}",
        g.n(),
        g.k(),
        g.variant()
    )
}

struct Suite {
    name: &'static str,
    run: fn(&Options, u64, &mut Tally) -> sc_rates::Result<()>,
}

const SUITES: &[Suite] = &[
    Suite {
        name: "label-flip symmetry",
        run: label_flip,
    },
    Suite {
        name: "conditional decomposition",
        run: conditional_decomposition,
    },
    Suite {
        name: "monte-carlo consistency",
        run: monte_carlo_consistency,
    },
    Suite {
        name: "reconstruction coherence",
        run: coherence,
    },
    Suite {
        name: "multiset invariance",
        run: multiset_invariance,
    },
    Suite {
        name: "weighted excess identity",
        run: weighted_excess,
    },
    Suite {
        name: "risk decomposition",
        run: risk_decomposition,
    },
    Suite {
        name: "binomial law",
        run: binomial_law,
    },
    Suite {
        name: "optimal code",
        run: optimal_code_brute_force,
    },
    Suite {
        name: "oracle equivalence (erm)",
        run: oracle_erm,
    },
    Suite {
        name: "oracle equivalence (min/sup)",
        run: oracle_min_sup,
    },
    Suite {
        name: "excess nonnegativity",
        run: nonnegativity,
    },
    Suite {
        name: "reachability realization",
        run: realization,
    },
    Suite {
        name: "empirical decomposition",
        run: empirical_decomposition,
    },
    Suite {
        name: "determinism",
        run: determinism,
    },
    Suite {
        name: "rate floor",
        run: rate_floor,
    },
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

/// Runs every suite in order, calling `progress` after each.
pub fn run_all(opts: &Options, mut progress: impl FnMut(&SuiteReport)) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .enumerate()
        .map(|(i, suite)| {
            let start = Instant::now();
            let mut tally = Tally::new();
            if let Err(e) = (suite.run)(opts, derive_seed(opts.seed, i as u64), &mut tally) {
                tally.error(format!("master seed {}", opts.seed), e);
            }
            let report = SuiteReport {
                name: suite.name,
                cases: tally.cases,
                failed: tally.failed,
                failures: tally.failures,
                seconds: start.elapsed().as_secs_f64(),
            };
            progress(&report);
            report
        })
        .collect()
}

/// `σ`, `P^σ` and a sample of size `n`, drawn from the same seed streams the
/// trial runner uses.
pub fn draw_instance(
    g: &BlockGeometry,
    seed: u64,
) -> sc_rates::Result<(SignMatrix, FiniteLabelDistribution, Sample)> {
    let sigma = sample_sign_matrix(g, derive_seed(seed, 0));
    let p = build_distribution_with_epsilon(&sigma, g, g.epsilon())?;
    let sample = sample_dataset(&p, g.n(), derive_seed(seed, 1))?;
    Ok((sigma, p, sample))
}

fn random_eta(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random::<f64>()).collect()
}

fn random_hypothesis(rng: &mut impl Rng, len: usize) -> Hypothesis {
    Hypothesis::new((0..len).map(|_| Label::from_bit(rng.random())).collect())
}

fn random_code(rng: &mut impl Rng, g: &BlockGeometry) -> CodeVector {
    CodeVector::new(
        (0..g.k())
            .map(|t| rng.random_range(g.code_range(t)))
            .collect(),
    )
}

fn label_flip(_: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for case in 0..IDENTITY_DRAWS {
        let s = derive_seed(seed, case);
        let mut rng = rng_from_seed(s);
        let len = rng.random_range(1..=64);
        let p = FiniteLabelDistribution::new(random_eta(&mut rng, len))?;
        let h = random_hypothesis(&mut rng, len);
        let r = true_risk(&h, &p)?;
        let rc = true_risk(&h.complement(), &p)?;
        tally.check(
            (rc - (1.0 - r)).abs() <= TOL && (0.0..=1.0).contains(&r),
            || format!("seed={s} support={len}: R={r}, R(complement)={rc}"),
        );
    }
    Ok(())
}

fn conditional_decomposition(_: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for case in 0..IDENTITY_DRAWS {
        let s = derive_seed(seed, case);
        let mut rng = rng_from_seed(s);
        let cells = rng.random_range(1..=8usize);
        let size = rng.random_range(1..=16usize);
        let len = cells * size;
        let p = FiniteLabelDistribution::new(random_eta(&mut rng, len))?;
        let h = random_hypothesis(&mut rng, len);
        let mut order: Vec<usize> = (0..len).collect();
        order.shuffle(&mut rng);
        let mut avg = 0.0;
        for cell in order.chunks(size) {
            avg += conditional_risk(&h, &p, cell)?;
        }
        avg /= cells as f64;
        let r = true_risk(&h, &p)?;
        tally.check((avg - r).abs() <= TOL, || {
            format!("seed={s} cells={cells} size={size}: mean conditional {avg} vs {r}")
        });
    }
    Ok(())
}

fn monte_carlo_consistency(_: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    const SAMPLES: u64 = 10_000;
    const SIZE: usize = 100;
    for case in 0..4 {
        let s = derive_seed(seed, case);
        let mut rng = rng_from_seed(s);
        let len = rng.random_range(2..=50);
        let p = FiniteLabelDistribution::new(random_eta(&mut rng, len))?;
        let h = random_hypothesis(&mut rng, len);
        let r = true_risk(&h, &p)?;
        let risks = (0..SAMPLES)
            .map(|i| empirical_risk(&h, &sample_dataset(&p, SIZE, derive_seed(s, i))?))
            .collect::<sc_rates::Result<Vec<f64>>>()?;
        let mean = risks.iter().sum::<f64>() / SAMPLES as f64;
        let var = risks.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (SAMPLES - 1) as f64;
        let se = (var / SAMPLES as f64).sqrt();
        tally.check((mean - r).abs() <= 5.0 * se.max(1e-12), || {
            format!("seed={s} support={len}: mean {mean} vs true {r} (se {se})")
        });
    }
    Ok(())
}

/// Geometries small enough to enumerate every code vector.
const SMALL_GEOMETRIES: [(usize, usize, Variant); 8] = [
    (4, 1, OI),
    (8, 2, OI),
    (16, 2, OI),
    (32, 2, OI),
    (4, 1, OD),
    (8, 1, OD),
    (8, 2, OD),
    (16, 2, OD),
];

fn all_codes(g: &BlockGeometry) -> Vec<CodeVector> {
    let mut out = vec![Vec::new()];
    for t in 0..g.k() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                g.code_range(t).map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(CodeVector::new).collect()
}

fn coherence(_: &Options, _: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for (n, k, v) in SMALL_GEOMETRIES {
        let g = make_geometry(n, k, v)?;
        for code in all_codes(&g) {
            let h = code_to_hypothesis(&code, &g)?;
            for j in 0..g.support_size() {
                let t = g.block_of(j).expect("index inside support");
                let direct = eval_block_hypothesis(t, code.codes()[t], j, &g)?;
                tally.check(h.predict(j) == direct, || {
                    format!("n={n} k={k} variant={v} code={code} j={j}")
                });
            }
        }
    }
    Ok(())
}

fn multiset_invariance(_: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for case in 0..IDENTITY_DRAWS {
        let s = derive_seed(seed, case);
        let mut rng = rng_from_seed(s);
        let k = rng.random_range(1..=6usize);
        let n = rng.random_range(2 * k..=256);
        let g = make_geometry(n, k, OI)?;
        let len = rng.random_range(1..=k);
        let distinct = rng.random_range(1..=len);
        let base: Vec<usize> = (0..distinct)
            .map(|_| rng.random_range(0..g.support_size()))
            .collect();
        let mut shuffled = base.clone();
        while shuffled.len() < len {
            shuffled.push(base[rng.random_range(0..distinct)]);
        }
        shuffled.shuffle(&mut rng);
        let a = reconstruct_multiset(&CompressionSet::new(OI, base.clone()), &g)?;
        let b = reconstruct_multiset(&CompressionSet::new(OI, shuffled.clone()), &g)?;
        tally.check(a == b, || {
            format!("{}: {base:?} -> {a}, {shuffled:?} -> {b}", params(s, &g))
        });
    }
    Ok(())
}

/// Identity geometries: the two reference configurations plus two where the
/// bit width does not divide the block size.
const IDENTITY_GEOMETRIES: [(usize, usize, Variant); 4] =
    [(32, 2, OI), (16, 2, OD), (16, 2, OI), (64, 4, OD)];

fn block_indices(g: &BlockGeometry, t: usize) -> Vec<usize> {
    g.block_range(t).collect()
}

fn weighted_excess(_: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for (gi, (n, k, v)) in IDENTITY_GEOMETRIES.into_iter().enumerate() {
        let g = make_geometry(n, k, v)?;
        let weights = g.class_weights();
        if g.is_divisible() {
            let w = 1.0 / f64::from(g.bit_width());
            tally.check(weights.iter().all(|&x| (x - w).abs() <= TOL), || {
                format!(
                    "n={n} k={k} variant={v}: weights {weights:?} != 1/{}",
                    g.bit_width()
                )
            });
        }
        for case in 0..IDENTITY_DRAWS {
            let s = derive_seed(derive_seed(seed, gi as u64), case);
            let mut rng = rng_from_seed(s);
            let sigma = sample_sign_matrix(&g, derive_seed(s, 0));
            let p = build_distribution_with_epsilon(&sigma, &g, g.epsilon())?;
            let best = optimal_code(&sigma, &g)?;
            let t = rng.random_range(0..k);
            let i = rng.random_range(g.code_range(t));
            let mut codes = best.codes().to_vec();
            codes[t] = i;
            let block = block_indices(&g, t);
            let lhs = conditional_risk(
                &code_to_hypothesis(&CodeVector::new(codes), &g)?,
                &p,
                &block,
            )? - conditional_risk(&code_to_hypothesis(&best, &g)?, &p, &block)?;
            let diff = g.pattern(t, i)? ^ sigma.majority_pattern(t);
            let rhs = g.epsilon()
                * (0..g.bit_width())
                    .filter(|r| (diff >> r) & 1 == 1)
                    .map(|r| weights[r as usize])
                    .sum::<f64>();
            tally.check((lhs - rhs).abs() <= TOL, || {
                format!("{} t={t} i={i}: lhs {lhs} rhs {rhs}", params(s, &g))
            });
        }
    }
    Ok(())
}

fn risk_decomposition(_: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for (gi, (n, k, v)) in IDENTITY_GEOMETRIES.into_iter().enumerate() {
        let g = make_geometry(n, k, v)?;
        for case in 0..IDENTITY_DRAWS {
            let s = derive_seed(derive_seed(seed, gi as u64), case);
            let mut rng = rng_from_seed(s);
            let sigma = sample_sign_matrix(&g, derive_seed(s, 0));
            let p = build_distribution_with_epsilon(&sigma, &g, g.epsilon())?;
            // Half the draws use arbitrary labellings rather than codes.
            let h = if case % 2 == 0 {
                code_to_hypothesis(&random_code(&mut rng, &g), &g)?
            } else {
                random_hypothesis(&mut rng, g.support_size())
            };
            let mut sum = 0.0;
            for t in 0..k {
                sum += conditional_risk(&h, &p, &block_indices(&g, t))?;
            }
            let r = true_risk(&h, &p)?;
            tally.check((r - sum / k as f64).abs() <= TOL, || {
                format!("{}: R={r}, block mean={}", params(s, &g), sum / k as f64)
            });
        }
    }
    Ok(())
}

/// Chi-square goodness of fit of `hamming_delta` for uniform block draws
/// against Binomial(bit_width, 1/2).
#[derive(Clone, Debug)]
pub struct ChiSquareResult {
    pub counts: Vec<u64>,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Draws `draws` (block, code) pairs uniformly under one fixed `σ` and
/// tests the Hamming distances to the majority pattern. Bins expected to
/// hold fewer than 5 draws are pooled with their neighbour.
pub fn hamming_chi_square(
    g: &BlockGeometry,
    draws: usize,
    seed: u64,
) -> sc_rates::Result<ChiSquareResult> {
    let sigma = sample_sign_matrix(g, derive_seed(seed, 0));
    let mut rng = rng_from_seed(derive_seed(seed, 1));
    let w = g.bit_width() as usize;
    let mut counts = vec![0u64; w + 1];
    for _ in 0..draws {
        let t = rng.random_range(0..g.k());
        let code = rng.random_range(g.code_range(t));
        counts[hamming_delta(t, code, &sigma, g)? as usize] += 1;
    }
    let law = Binomial::new(0.5, w as u64).expect("valid binomial");
    let expected: Vec<f64> = (0..=w).map(|d| law.pmf(d as u64) * draws as f64).collect();

    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (o, e) in counts.iter().zip(&expected) {
        acc.0 += *o as f64;
        acc.1 += e;
        if acc.1 >= 5.0 {
            bins.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => bins.push(acc),
        }
    }
    let statistic: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .expect("positive dof")
            .sf(statistic)
    };
    Ok(ChiSquareResult {
        counts,
        statistic,
        degrees_of_freedom: dof,
        p_value,
    })
}

fn binomial_law(_: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for (gi, (n, k, v)) in [(32, 2, OI), (16, 2, OD), (1024, 4, OI)]
        .into_iter()
        .enumerate()
    {
        let g = make_geometry(n, k, v)?;
        let s = derive_seed(seed, gi as u64);
        let res = hamming_chi_square(&g, CHI_SQUARE_DRAWS, s)?;
        tally.check(res.p_value > CHI_SQUARE_ALPHA, || {
            format!(
                "{}: chi2={:.3} dof={} p={:.3e} counts={:?}",
                params(s, &g),
                res.statistic,
                res.degrees_of_freedom,
                res.p_value,
                res.counts
            )
        });
    }
    Ok(())
}

fn optimal_code_brute_force(_: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for (gi, (n, k, v)) in SMALL_GEOMETRIES.into_iter().enumerate() {
        let g = make_geometry(n, k, v)?;
        let codes = all_codes(&g);
        for case in 0..20 {
            let s = derive_seed(derive_seed(seed, gi as u64), case);
            let sigma = sample_sign_matrix(&g, s);
            let p = build_distribution_with_epsilon(&sigma, &g, g.epsilon())?;
            let best = true_risk(&code_to_hypothesis(&optimal_code(&sigma, &g)?, &g)?, &p)?;
            let mut min = f64::INFINITY;
            for c in &codes {
                min = min.min(true_risk(&code_to_hypothesis(c, &g)?, &p)?);
            }
            tally.check(best <= min + TOL, || {
                format!("{}: optimal {best}, brute force {min}", params(s, &g))
            });
        }
    }
    Ok(())
}

fn oracle_geometries() -> sc_rates::Result<Vec<BlockGeometry>> {
    let mut out = Vec::new();
    for v in [OI, OD] {
        for (n, k) in ORACLE_CONFIGS {
            out.push(make_geometry(n, k, v)?);
        }
    }
    Ok(out)
}

fn oracle_erm(opts: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for (gi, g) in oracle_geometries()?.iter().enumerate() {
        for trial in 0..ORACLE_TRIALS {
            let s = derive_seed(derive_seed(seed, gi as u64), trial);
            let (_, _, sample) = draw_instance(g, s)?;
            let fast = erm_blockwise_with_bit(&sample, g, opts.bit_fn)?;
            let slow = erm_naive(&sample, g)?;
            tally.check(fast.misclassified == slow.misclassified, || {
                format!(
                    "{}: blockwise {}/{} ({}) vs naive {}/{} ({})",
                    params(s, g),
                    fast.misclassified,
                    fast.sample_len,
                    fast.code,
                    slow.misclassified,
                    slow.sample_len,
                    slow.code
                )
            });
        }
    }
    Ok(())
}

fn oracle_min_sup(_: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for (gi, g) in oracle_geometries()?.iter().enumerate() {
        for trial in 0..ORACLE_TRIALS {
            let s = derive_seed(derive_seed(seed, gi as u64), trial);
            let (sigma, p, sample) = draw_instance(g, s)?;
            let min = reachable_min_true_risk(&sample, &sigma, g)?;
            let min_bf = brute_force_min_true_risk(&sample, &p, g)?;
            tally.check((min - min_bf).abs() <= TOL, || {
                format!("{}: min {min} vs brute force {min_bf}", params(s, g))
            });
            let sup = uc_sup_exact(&sample, &sigma, g)?;
            let sup_bf = brute_force_uc_sup(&sample, &p, g)?;
            tally.check((sup - sup_bf).abs() <= TOL, || {
                format!("{}: sup {sup} vs brute force {sup_bf}", params(s, g))
            });
        }
    }
    Ok(())
}

/// Mid-sized geometries for the per-trial checks.
const TRIAL_GEOMETRIES: [(usize, usize, Variant); 6] = [
    (8, 2, OI),
    (100, 3, OI),
    (512, 4, OI),
    (16, 2, OD),
    (100, 2, OD),
    (512, 4, OD),
];
const TRIALS_PER_GEOMETRY: u64 = 200;

fn nonnegativity(_: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for (gi, (n, k, v)) in TRIAL_GEOMETRIES.into_iter().enumerate() {
        let runner = TrialRunner::new(n, k, v)?;
        let outcomes = parallel::run_trials(
            &runner,
            Measure::UniformConvergence,
            TRIALS_PER_GEOMETRY as usize,
            derive_seed(seed, gi as u64),
        )?;
        for (i, o) in outcomes.iter().enumerate() {
            let ok = o.excess >= 0.0
                && o.erm_true_risk >= o.reachable_min_risk
                && o.uc_sup.is_some_and(|u| u >= 0.0);
            tally.check(ok, || {
                format!(
                    "master_seed={} trial={i} n={n} k={k} variant={v}: {o:?}",
                    derive_seed(seed, gi as u64)
                )
            });
        }
    }
    Ok(())
}

fn realization(opts: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for (gi, (n, k, v)) in TRIAL_GEOMETRIES.into_iter().enumerate() {
        let g = make_geometry(n, k, v)?;
        for trial in 0..TRIALS_PER_GEOMETRY {
            let s = derive_seed(derive_seed(seed, gi as u64), trial);
            let (_, _, sample) = draw_instance(&g, s)?;
            let erm = erm_blockwise_with_bit(&sample, &g, opts.bit_fn)?;
            let drawn = erm
                .compression_set
                .members()
                .iter()
                .all(|j| sample.iter().any(|e| e.instance == *j));
            let rebuilt = reconstruct(&erm.compression_set, &g);
            tally.check(drawn && matches!(&rebuilt, Ok(c) if *c == erm.code), || {
                format!(
                    "{}: code {} set {:?} rebuilt {rebuilt:?}",
                    params(s, &g),
                    erm.code,
                    erm.compression_set.members()
                )
            });
        }
    }
    Ok(())
}

fn empirical_decomposition(opts: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for (gi, (n, k, v)) in TRIAL_GEOMETRIES.into_iter().enumerate() {
        let g = make_geometry(n, k, v)?;
        for trial in 0..TRIALS_PER_GEOMETRY {
            let s = derive_seed(derive_seed(seed, gi as u64), trial);
            let mut rng = rng_from_seed(derive_seed(s, 2));
            let (_, _, sample) = draw_instance(&g, s)?;
            let code = random_code(&mut rng, &g);
            let h = code_to_hypothesis(&code, &g)?;
            let mut per_block = vec![0usize; k];
            for e in sample.iter() {
                if h.predict(e.instance) != e.label {
                    per_block[g.block_of(e.instance).expect("sample inside support")] += 1;
                }
            }
            let sum = per_block
                .iter()
                .map(|&c| c as f64 / sample.len() as f64)
                .sum::<f64>();
            let r = empirical_risk(&h, &sample)?;
            tally.check((r - sum).abs() <= TOL, || {
                format!("{}: code {code}: {r} vs block sum {sum}", params(s, &g))
            });
            // The minimizer's own count must describe the code it returns.
            let erm = erm_blockwise_with_bit(&sample, &g, opts.bit_fn)?;
            let direct = empirical_risk(&code_to_hypothesis(&erm.code, &g)?, &sample)?;
            tally.check((erm.empirical_risk() - direct).abs() <= TOL, || {
                format!(
                    "{}: erm reports {} but code {} scores {direct}",
                    params(s, &g),
                    erm.empirical_risk(),
                    erm.code
                )
            });
        }
    }
    Ok(())
}

fn determinism(_: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for (gi, (n, k, v)) in TRIAL_GEOMETRIES.into_iter().enumerate() {
        let runner = TrialRunner::new(n, k, v)?;
        let s = derive_seed(seed, gi as u64);
        for measure in [Measure::AgnosticExcess, Measure::UniformConvergence] {
            let a = runner.monte_carlo(measure, 50, s)?;
            let b = runner.monte_carlo(measure, 50, s)?;
            let c = parallel::monte_carlo(&runner, measure, 50, s)?;
            let same = |x: &sc_rates::RateEstimate, y: &sc_rates::RateEstimate| {
                x == y
                    && x.mean.to_bits() == y.mean.to_bits()
                    && x.stderr.to_bits() == y.stderr.to_bits()
            };
            tally.check(same(&a, &b) && same(&a, &c), || {
                format!("master_seed={s} n={n} k={k} variant={v} measure={measure}: {a:?} / {b:?} / {c:?}")
            });
        }
    }
    Ok(())
}

/// Order-independent configurations for the excess floor, all with
/// `ε ≤ 1/2`.
pub const FLOOR_CONFIGS: [(usize, usize); 4] = [(64, 4), (256, 4), (1024, 4), (256, 2)];
pub const FLOOR_TRIALS: usize = 2000;

fn rate_floor(_: &Options, seed: u64, tally: &mut Tally) -> sc_rates::Result<()> {
    for (gi, (n, k)) in FLOOR_CONFIGS.into_iter().enumerate() {
        let runner = TrialRunner::new(n, k, OI)?;
        let eps = runner.epsilon();
        if eps > 0.5 {
            continue;
        }
        let s = derive_seed(seed, gi as u64);
        let est = parallel::monte_carlo(&runner, Measure::AgnosticExcess, FLOOR_TRIALS, s)?;
        let floor = FLOOR_CONSTANT * eps;
        tally.check(est.mean >= floor, || {
            format!(
                "master_seed={s} n={n} k={k} variant=oi: mean excess {} < {floor}",
                est.mean
            )
        });
    }
    Ok(())
}
