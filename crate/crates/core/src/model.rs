//! Finite-support distributions, hypotheses, samples and their risks.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{invalid_argument, Result};
use crate::rng::rng_from_seed;

/// A binary label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Zero,
    One,
}

impl Label {
    #[inline]
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Label::One
        } else {
            Label::Zero
        }
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self == Label::One
    }

    #[inline]
    pub fn flipped(self) -> Self {
        match self {
            Label::Zero => Label::One,
            Label::One => Label::Zero,
        }
    }

    #[inline]
    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// One observation `(x_i, y)`, with the instance identified by its support index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LabeledExample {
    pub instance: usize,
    pub label: Label,
}

impl LabeledExample {
    pub fn new(instance: usize, label: Label) -> Self {
        Self { instance, label }
    }
}

/// An ordered, nonempty list of labelled examples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    examples: Vec<LabeledExample>,
}

impl Sample {
    pub fn new(examples: Vec<LabeledExample>) -> Result<Self> {
        if examples.is_empty() {
            return Err(invalid_argument!(
                "sample must contain at least one example"
            ));
        }
        Ok(Self { examples })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    /// Always false; samples are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn iter(&self) -> core::slice::Iter<'_, LabeledExample> {
        self.examples.iter()
    }

    /// Largest instance index appearing in the sample.
    pub fn max_instance(&self) -> usize {
        self.examples.iter().map(|e| e.instance).max().unwrap_or(0)
    }
}

/// A total labelling of the finite support `0..N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypothesis {
    labels: Vec<Label>,
}

impl Hypothesis {
    pub fn new(labels: Vec<Label>) -> Self {
        Self { labels }
    }

    pub fn constant(label: Label, support_size: usize) -> Self {
        Self {
            labels: alloc::vec![label; support_size],
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn support_size(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn predict(&self, instance: usize) -> Label {
        self.labels[instance]
    }

    pub fn complement(&self) -> Self {
        Self {
            labels: self.labels.iter().map(|l| l.flipped()).collect(),
        }
    }
}

/// Distribution on `{x_0..x_{N-1}} x {0,1}` with uniform marginal and
/// `eta[j] = P(Y = 1 | X = x_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteLabelDistribution {
    eta: Vec<f64>,
}

impl FiniteLabelDistribution {
    pub fn new(eta: Vec<f64>) -> Result<Self> {
        if eta.is_empty() {
            return Err(invalid_argument!("support must contain at least one point"));
        }
        if let Some((j, p)) = eta
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(invalid_argument!("eta[{j}] = {p} is not a probability"));
        }
        Ok(Self { eta })
    }

    pub fn support_size(&self) -> usize {
        self.eta.len()
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// Probability that predicting `label` at `x_j` is wrong.
    #[inline]
    pub fn error_probability(&self, instance: usize, label: Label) -> f64 {
        let eta = self.eta[instance];
        match label {
            Label::One => 1.0 - eta,
            Label::Zero => eta,
        }
    }
}

fn check_dimensions(h: &Hypothesis, p: &FiniteLabelDistribution) -> Result<()> {
    if h.support_size() != p.support_size() {
        return Err(invalid_argument!(
            "hypothesis covers {} points but the distribution has support {}",
            h.support_size(),
            p.support_size()
        ));
    }
    Ok(())
}

/// `R(h; P)`: probability that `h` mislabels a fresh draw from `P`.
pub fn true_risk(h: &Hypothesis, p: &FiniteLabelDistribution) -> Result<f64> {
    check_dimensions(h, p)?;
    let total: f64 = h
        .labels
        .iter()
        .enumerate()
        .map(|(j, &label)| p.error_probability(j, label))
        .sum();
    Ok(total / p.support_size() as f64)
}

/// Number of sample points `h` mislabels.
pub fn misclassified(h: &Hypothesis, sample: &Sample) -> Result<usize> {
    if sample.max_instance() >= h.support_size() {
        return Err(invalid_argument!(
            "sample instance {} is outside the hypothesis support 0..{}",
            sample.max_instance(),
            h.support_size()
        ));
    }
    Ok(sample
        .iter()
        .filter(|e| h.predict(e.instance) != e.label)
        .count())
}

/// `R̂(h; Z)`: fraction of the sample `h` mislabels.
pub fn empirical_risk(h: &Hypothesis, sample: &Sample) -> Result<f64> {
    if sample.is_empty() {
        return Err(invalid_argument!("empirical risk of an empty sample"));
    }
    Ok(misclassified(h, sample)? as f64 / sample.len() as f64)
}

/// Risk of `h` under `P` conditioned on `X` falling in `subset`.
///
/// `subset` is a set; repeated indices are counted once each time they occur,
/// so callers pass distinct indices.
pub fn conditional_risk(
    h: &Hypothesis,
    p: &FiniteLabelDistribution,
    subset: &[usize],
) -> Result<f64> {
    check_dimensions(h, p)?;
    if subset.is_empty() {
        return Err(invalid_argument!("conditioning set is empty"));
    }
    let mut total = 0.0;
    for &j in subset {
        if j >= p.support_size() {
            return Err(invalid_argument!(
                "conditioning index {j} is outside the support 0..{}",
                p.support_size()
            ));
        }
        total += p.error_probability(j, h.predict(j));
    }
    Ok(total / subset.len() as f64)
}

/// Draws `n` i.i.d. examples: instance uniform on the support, label
/// Bernoulli(`eta[instance]`).
pub fn sample_dataset(p: &FiniteLabelDistribution, n: usize, seed: u64) -> Result<Sample> {
    if n == 0 {
        return Err(invalid_argument!("sample size must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let support = p.support_size();
    let examples = (0..n)
        .map(|_| {
            let instance = rng.random_range(0..support);
            let label = Label::from_bit(rng.random_bool(p.eta[instance]));
            LabeledExample { instance, label }
        })
        .collect();
    Ok(Sample { examples })
}
