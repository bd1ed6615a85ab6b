//! The two adversarial compression-scheme constructions.
//!
//! The support `{x_0, .., x_{N-1}}` is cut into `k` equal blocks. Inside a
//! block, consecutive runs of `bit_width = log2(m)` points form sub-blocks and
//! a code `i` labels offset `o` of the block with bit `o mod bit_width` of the
//! block-relative pattern of `i`. The last sub-block of a block may be partial
//! when `bit_width` does not divide the block size; the bit classes
//! `C_{t,r}` then have unequal sizes.
//!
//! * Order-independent: `m = 2^floor(log2(n/k))`, support `k*m`, block `t`
//!   covers `t*m..(t+1)*m`, and the code for block `t` must lie inside the
//!   block. Its pattern is `code - t*m`.
//! * Order-dependent: `m = 2^floor(log2 n)`, support `m`, blocks of `m/k`
//!   points, and every code in `0..m` is usable for every block (the position
//!   in the sequence says which block it drives).
//!
//! Blocks are indexed from 0 throughout.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use rand::Rng;

use crate::error::{invalid_argument, invalid_config, Error, Result};
use crate::model::{FiniteLabelDistribution, Hypothesis, Label};
use crate::rng::rng_from_seed;

/// Widest supported code, so that `m < 2^63`.
pub const MAX_BIT_WIDTH: u32 = 62;

/// Whether the reconstruction function reads its argument as a multiset or
/// as an ordered sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    OrderIndependent,
    OrderDependent,
}

impl Variant {
    /// Short flag used on the command line and in CSV files.
    pub fn flag(self) -> &'static str {
        match self {
            Variant::OrderIndependent => "oi",
            Variant::OrderDependent => "od",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oi" | "order-independent" => Ok(Variant::OrderIndependent),
            "od" | "order-dependent" => Ok(Variant::OrderDependent),
            other => Err(invalid_argument!(
                "unknown variant `{other}` (expected `oi` or `od`)"
            )),
        }
    }
}

/// Coefficient of `2^r` in the binary expansion of `i`.
#[inline]
pub fn bit(i: u64, r: u32) -> Label {
    debug_assert!(r < 63);
    Label::from_bit((i >> r) & 1 == 1)
}

#[inline]
fn highest_power_of_two_at_most(x: usize) -> usize {
    debug_assert!(x > 0);
    1usize << (usize::BITS - 1 - x.leading_zeros())
}

/// Validated block layout for one `(variant, n, k)` configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockGeometry {
    variant: Variant,
    n: usize,
    k: usize,
    m: usize,
    bit_width: u32,
    support_size: usize,
    block_size: usize,
}

impl BlockGeometry {
    pub fn new(n: usize, k: usize, variant: Variant) -> Result<Self> {
        if k == 0 {
            return Err(invalid_config!("requires k ≥ 1"));
        }
        if n == 0 {
            return Err(invalid_config!("requires n ≥ 1"));
        }
        let geometry = match variant {
            Variant::OrderIndependent => {
                if n < 2 * k {
                    return Err(invalid_config!(
                        "order-independent geometry requires n ≥ 2k (got n={n}, k={k})"
                    ));
                }
                let m = highest_power_of_two_at_most(n / k);
                BlockGeometry {
                    variant,
                    n,
                    k,
                    m,
                    bit_width: m.trailing_zeros(),
                    support_size: k * m,
                    block_size: m,
                }
            }
            Variant::OrderDependent => {
                let m = highest_power_of_two_at_most(n);
                if m < 2 {
                    return Err(invalid_config!(
                        "order-dependent geometry requires n ≥ 2 (got n={n})"
                    ));
                }
                if !m.is_multiple_of(k) {
                    return Err(invalid_config!(
                        "order-dependent geometry requires k to divide m = 2^floor(log2 n) (got m={m}, k={k})"
                    ));
                }
                let bit_width = m.trailing_zeros();
                let block_size = m / k;
                if block_size < bit_width as usize {
                    return Err(invalid_config!(
                        "order-dependent geometry requires m/k ≥ log2(m) (got m/k={block_size}, log2(m)={bit_width})"
                    ));
                }
                BlockGeometry {
                    variant,
                    n,
                    k,
                    m,
                    bit_width,
                    support_size: m,
                    block_size,
                }
            }
        };
        if geometry.bit_width > MAX_BIT_WIDTH {
            return Err(invalid_config!(
                "code width {} exceeds the supported maximum of {MAX_BIT_WIDTH} bits",
                geometry.bit_width
            ));
        }
        let eps = geometry.epsilon_unchecked();
        if eps > 1.0 {
            return Err(invalid_config!("epsilon = {eps} exceeds 1"));
        }
        Ok(geometry)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bit_width(&self) -> u32 {
        self.bit_width
    }

    pub fn support_size(&self) -> usize {
        self.support_size
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    fn epsilon_unchecked(&self) -> f64 {
        libm::sqrt((self.k as f64 * self.bit_width as f64) / self.n as f64)
    }

    /// `sqrt(k * log2(m) / n)`. Never exceeds 1 for a constructed geometry.
    pub fn epsilon(&self) -> f64 {
        self.epsilon_unchecked()
    }

    /// Support indices of block `t`.
    pub fn block_range(&self, t: usize) -> Range<usize> {
        t * self.block_size..(t + 1) * self.block_size
    }

    pub fn block_of(&self, j: usize) -> Option<usize> {
        (j < self.support_size).then(|| j / self.block_size)
    }

    /// `(block, sub_block, bit position)` of support index `j`; sub-blocks
    /// are counted from 0.
    pub fn position(&self, j: usize) -> Option<(usize, usize, u32)> {
        let t = self.block_of(j)?;
        let offset = j - t * self.block_size;
        let w = self.bit_width as usize;
        Some((t, offset / w, (offset % w) as u32))
    }

    /// Bit position read at offset `offset` of any block.
    #[inline]
    pub fn bit_position_of_offset(&self, offset: usize) -> u32 {
        (offset % self.bit_width as usize) as u32
    }

    /// Value subtracted from a block-`t` code to get its bit pattern.
    pub fn code_base(&self, t: usize) -> usize {
        match self.variant {
            Variant::OrderIndependent => t * self.m,
            Variant::OrderDependent => 0,
        }
    }

    /// Codes admissible for block `t`.
    pub fn code_range(&self, t: usize) -> Range<usize> {
        match self.variant {
            Variant::OrderIndependent => self.block_range(t),
            Variant::OrderDependent => 0..self.m,
        }
    }

    /// `|C_{t,r}|` for `r = 0..bit_width`; identical for every block.
    pub fn class_sizes(&self) -> Vec<usize> {
        let w = self.bit_width as usize;
        let full = self.block_size / w;
        let rem = self.block_size % w;
        (0..w).map(|r| full + usize::from(r < rem)).collect()
    }

    /// `|C_{t,r}| / |B_t|`.
    pub fn class_weights(&self) -> Vec<f64> {
        self.class_sizes()
            .into_iter()
            .map(|c| c as f64 / self.block_size as f64)
            .collect()
    }

    /// True when every sub-block is complete.
    pub fn is_divisible(&self) -> bool {
        self.block_size.is_multiple_of(self.bit_width as usize)
    }

    fn check_block(&self, t: usize) -> Result<()> {
        if t >= self.k {
            return Err(invalid_argument!("block {t} out of range 0..{}", self.k));
        }
        Ok(())
    }

    /// Block-relative bit pattern of `code` used for block `t`.
    pub fn pattern(&self, t: usize, code: usize) -> Result<u64> {
        self.check_block(t)?;
        let range = self.code_range(t);
        if !range.contains(&code) {
            return Err(invalid_argument!(
                "code {code} is not admissible for block {t} (expected {}..{})",
                range.start,
                range.end
            ));
        }
        Ok((code - self.code_base(t)) as u64)
    }
}

/// Builds a geometry; see [`BlockGeometry::new`].
pub fn make_geometry(n: usize, k: usize, variant: Variant) -> Result<BlockGeometry> {
    BlockGeometry::new(n, k, variant)
}

/// Noise margin `sqrt(k * log2(m) / n)` of the hard distributions.
pub fn epsilon(geometry: &BlockGeometry) -> Result<f64> {
    let eps = geometry.epsilon();
    if eps > 1.0 {
        return Err(invalid_config!("epsilon = {eps} exceeds 1"));
    }
    Ok(eps)
}

/// `k x bit_width` matrix of signs choosing each bit class's majority label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i8>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(invalid_argument!(
                "sign matrix expects {} entries, got {}",
                rows * cols,
                entries.len()
            ));
        }
        if entries.iter().any(|&s| s != 1 && s != -1) {
            return Err(invalid_argument!("sign matrix entries must be ±1"));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn constant(rows: usize, cols: usize, sign: i8) -> Result<Self> {
        Self::new(rows, cols, vec![sign; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, t: usize, r: u32) -> i8 {
        self.entries[t * self.cols + r as usize]
    }

    fn check(&self, geometry: &BlockGeometry) -> Result<()> {
        if self.rows != geometry.k() || self.cols != geometry.bit_width() as usize {
            return Err(invalid_argument!(
                "sign matrix is {}x{} but the geometry needs {}x{}",
                self.rows,
                self.cols,
                geometry.k(),
                geometry.bit_width()
            ));
        }
        Ok(())
    }

    /// Pattern whose bit `r` is the majority label `(sigma_{t,r} + 1) / 2`.
    pub fn majority_pattern(&self, t: usize) -> u64 {
        (0..self.cols)
            .filter(|&r| self.entries[t * self.cols + r] > 0)
            .fold(0u64, |acc, r| acc | (1u64 << r))
    }
}

/// Per-block codes `(i_1, .., i_k)` selecting a reconstructed hypothesis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeVector(Vec<usize>);

impl CodeVector {
    pub fn new(codes: Vec<usize>) -> Self {
        Self(codes)
    }

    pub fn codes(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// Checks the variant's code invariant against `geometry`.
    pub fn validate(&self, geometry: &BlockGeometry) -> Result<()> {
        if self.0.len() != geometry.k() {
            return Err(invalid_argument!(
                "code vector has {} entries but k = {}",
                self.0.len(),
                geometry.k()
            ));
        }
        for (t, &code) in self.0.iter().enumerate() {
            geometry.pattern(t, code)?;
        }
        Ok(())
    }
}

impl fmt::Display for CodeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (idx, c) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Argument of a reconstruction function: support indices of the kept
/// points. Order is meaningful only for the order-dependent variant. Labels
/// are not carried; both reconstructions ignore them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompressionSet {
    variant: Variant,
    members: Vec<usize>,
}

impl CompressionSet {
    pub fn new(variant: Variant, members: Vec<usize>) -> Self {
        Self { variant, members }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `h_{t,i}(x_j)` for `j` inside block `t`.
pub fn eval_block_hypothesis(
    t: usize,
    code: usize,
    j: usize,
    geometry: &BlockGeometry,
) -> Result<Label> {
    let pattern = geometry.pattern(t, code)?;
    let block = geometry.block_range(t);
    if !block.contains(&j) {
        return Err(invalid_argument!(
            "support index {j} is outside block {t} ({}..{})",
            block.start,
            block.end
        ));
    }
    Ok(bit(
        pattern,
        geometry.bit_position_of_offset(j - block.start),
    ))
}

/// Full labelling of the support produced by a code vector.
pub fn code_to_hypothesis(code: &CodeVector, geometry: &BlockGeometry) -> Result<Hypothesis> {
    code.validate(geometry)?;
    let mut labels = Vec::with_capacity(geometry.support_size());
    for (t, &c) in code.codes().iter().enumerate() {
        let pattern = (c - geometry.code_base(t)) as u64;
        labels.extend(
            (0..geometry.block_size())
                .map(|offset| bit(pattern, geometry.bit_position_of_offset(offset))),
        );
    }
    Ok(Hypothesis::new(labels))
}

fn check_set(set: &CompressionSet, geometry: &BlockGeometry, expected: Variant) -> Result<()> {
    if set.variant() != expected || geometry.variant() != expected {
        return Err(invalid_argument!(
            "{} reconstruction applied to a {} set on a {} geometry",
            expected,
            set.variant(),
            geometry.variant()
        ));
    }
    if set.len() > geometry.k() {
        return Err(invalid_argument!(
            "compression set has {} members but k = {}",
            set.len(),
            geometry.k()
        ));
    }
    Ok(())
}

/// Order-independent reconstruction: block `t` takes the smallest member
/// index inside it, or `t*m` when no member falls in the block.
pub fn reconstruct_multiset(set: &CompressionSet, geometry: &BlockGeometry) -> Result<CodeVector> {
    check_set(set, geometry, Variant::OrderIndependent)?;
    let mut codes: Vec<Option<usize>> = vec![None; geometry.k()];
    for &j in set.members() {
        let t = geometry.block_of(j).ok_or_else(|| {
            invalid_argument!(
                "member {j} is outside the support 0..{}",
                geometry.support_size()
            )
        })?;
        codes[t] = Some(codes[t].map_or(j, |c| c.min(j)));
    }
    Ok(CodeVector::new(
        codes
            .into_iter()
            .enumerate()
            .map(|(t, c)| c.unwrap_or_else(|| geometry.code_base(t)))
            .collect(),
    ))
}

/// Order-dependent reconstruction: in-support members in sequence order,
/// padded with zeros up to length `k`.
pub fn reconstruct_sequence(set: &CompressionSet, geometry: &BlockGeometry) -> Result<CodeVector> {
    check_set(set, geometry, Variant::OrderDependent)?;
    let mut codes: Vec<usize> = set
        .members()
        .iter()
        .copied()
        .filter(|&j| j < geometry.m())
        .collect();
    codes.resize(geometry.k(), 0);
    Ok(CodeVector::new(codes))
}

/// Dispatches on the geometry's variant.
pub fn reconstruct(set: &CompressionSet, geometry: &BlockGeometry) -> Result<CodeVector> {
    match geometry.variant() {
        Variant::OrderIndependent => reconstruct_multiset(set, geometry),
        Variant::OrderDependent => reconstruct_sequence(set, geometry),
    }
}

/// I.i.d. uniform signs, `k x bit_width`.
pub fn sample_sign_matrix(geometry: &BlockGeometry, seed: u64) -> SignMatrix {
    let mut rng = rng_from_seed(seed);
    let rows = geometry.k();
    let cols = geometry.bit_width() as usize;
    let entries = (0..rows * cols)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();
    SignMatrix {
        rows,
        cols,
        entries,
    }
}

/// `P^(sigma)`: uniform marginal, `eta_j = 1/2 + (eps/2) sigma_{t,r}`.
pub fn build_distribution(
    sigma: &SignMatrix,
    geometry: &BlockGeometry,
) -> Result<FiniteLabelDistribution> {
    build_distribution_with_epsilon(sigma, geometry, epsilon(geometry)?)
}

/// [`build_distribution`] with an explicit margin; `eps = 0` gives pure noise.
pub fn build_distribution_with_epsilon(
    sigma: &SignMatrix,
    geometry: &BlockGeometry,
    eps: f64,
) -> Result<FiniteLabelDistribution> {
    sigma.check(geometry)?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(invalid_argument!("epsilon = {eps} is outside [0, 1]"));
    }
    let mut eta = Vec::with_capacity(geometry.support_size());
    for t in 0..geometry.k() {
        eta.extend((0..geometry.block_size()).map(|offset| {
            let r = geometry.bit_position_of_offset(offset);
            0.5 + 0.5 * eps * f64::from(sigma.get(t, r))
        }));
    }
    FiniteLabelDistribution::new(eta)
}

/// Code whose block-`t` pattern predicts every bit class's majority label.
pub fn optimal_code(sigma: &SignMatrix, geometry: &BlockGeometry) -> Result<CodeVector> {
    sigma.check(geometry)?;
    Ok(CodeVector::new(
        (0..geometry.k())
            .map(|t| geometry.code_base(t) + sigma.majority_pattern(t) as usize)
            .collect(),
    ))
}

/// Number of bit positions where code `i`'s block-`t` pattern differs from
/// the optimal pattern.
pub fn hamming_delta(
    t: usize,
    code: usize,
    sigma: &SignMatrix,
    geometry: &BlockGeometry,
) -> Result<u32> {
    sigma.check(geometry)?;
    let pattern = geometry.pattern(t, code)?;
    Ok((pattern ^ sigma.majority_pattern(t)).count_ones())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{conditional_risk, true_risk};
    use proptest::prelude::*;

    const OI: Variant = Variant::OrderIndependent;
    const OD: Variant = Variant::OrderDependent;

    fn set(variant: Variant, members: &[usize]) -> CompressionSet {
        CompressionSet::new(variant, members.to_vec())
    }

    #[test]
    fn bit_examples() {
        assert_eq!(bit(5, 0), Label::One);
        assert_eq!(bit(5, 1), Label::Zero);
        assert_eq!(bit(5, 2), Label::One);
        for r in 0..63 {
            assert_eq!(bit(0, r), Label::Zero);
        }
    }

    #[test]
    fn geometry_examples() {
        let g = make_geometry(32, 2, OI).unwrap();
        assert_eq!(
            (g.m(), g.bit_width(), g.support_size(), g.block_size()),
            (16, 4, 32, 16)
        );
        assert_eq!(make_geometry(33, 2, OI).unwrap().m(), 16);
        let g = make_geometry(16, 2, OD).unwrap();
        assert_eq!(
            (g.m(), g.bit_width(), g.support_size(), g.block_size()),
            (16, 4, 16, 8)
        );
        assert_eq!(make_geometry(31, 1, OD).unwrap().m(), 16);
    }

    #[test]
    fn geometry_rejections_name_the_constraint() {
        let msg = |r: Result<BlockGeometry>| match r {
            Err(Error::InvalidConfiguration(m)) => m,
            other => panic!("expected configuration error, got {other:?}"),
        };
        assert!(msg(make_geometry(4, 4, OI)).contains("requires n ≥ 2k"));
        assert!(msg(make_geometry(16, 3, OD)).contains("k to divide"));
        assert!(msg(make_geometry(16, 8, OD)).contains("m/k ≥ log2(m)"));
        assert!(msg(make_geometry(1, 1, OD)).contains("n ≥ 2"));
        assert!(make_geometry(10, 0, OI).is_err());
    }

    #[test]
    fn sub_block_positions() {
        // m = 32, bit_width 5: the last sub-block of each block is partial.
        let g = make_geometry(64, 2, OI).unwrap();
        assert_eq!(g.bit_width(), 5);
        assert!(!g.is_divisible());
        assert_eq!(g.position(0), Some((0, 0, 0)));
        assert_eq!(g.position(31), Some((0, 6, 1)));
        assert_eq!(g.position(37), Some((1, 1, 0)));
        assert_eq!(g.position(64), None);
        assert_eq!(g.class_sizes(), vec![7, 7, 6, 6, 6]);
        assert_eq!(g.class_sizes().iter().sum::<usize>(), g.block_size());
    }

    #[test]
    fn epsilon_examples() {
        let e = |n, k, v| epsilon(&make_geometry(n, k, v).unwrap()).unwrap();
        assert!((e(32, 2, OI) - 0.5).abs() < 1e-15);
        assert!((e(1024, 4, OI) - libm::sqrt(32.0 / 1024.0)).abs() < 1e-15);
        assert!((e(1024, 4, OI) - 0.17678).abs() < 1e-5);
        assert!((e(8, 4, OI) - libm::sqrt(0.5)).abs() < 1e-15);
    }

    #[test]
    fn eval_block_hypothesis_examples() {
        let g = make_geometry(32, 2, OI).unwrap();
        assert_eq!(eval_block_hypothesis(0, 5, 2, &g).unwrap(), Label::One);
        assert_eq!(eval_block_hypothesis(1, 21, 17, &g).unwrap(), Label::Zero);
        assert!(eval_block_hypothesis(0, 5, 17, &g).is_err());
        assert!(eval_block_hypothesis(1, 5, 17, &g).is_err());
        let g = make_geometry(16, 2, OD).unwrap();
        assert_eq!(eval_block_hypothesis(0, 3, 5, &g).unwrap(), Label::One);
        assert_eq!(eval_block_hypothesis(1, 3, 13, &g).unwrap(), Label::One);
    }

    #[test]
    fn code_to_hypothesis_examples() {
        let g = make_geometry(32, 2, OI).unwrap();
        let h = code_to_hypothesis(&CodeVector::new(vec![0, 16]), &g).unwrap();
        assert!(h.labels().iter().all(|&l| l == Label::Zero));

        let h = code_to_hypothesis(&CodeVector::new(vec![5, 21]), &g).unwrap();
        let expected: Vec<u8> = [1, 0, 1, 0].iter().copied().cycle().take(32).collect();
        let got: Vec<u8> = h.labels().iter().map(|l| l.as_u8()).collect();
        assert_eq!(got, expected);
        assert!(code_to_hypothesis(&CodeVector::new(vec![5, 5]), &g).is_err());
        assert!(code_to_hypothesis(&CodeVector::new(vec![5]), &g).is_err());
    }

    #[test]
    fn reconstruction_evaluation_coherence_exhaustive() {
        for (n, k, v) in [
            (32, 2, OI),
            (16, 2, OD),
            (24, 3, OI),
            (64, 2, OI),
            (32, 4, OD),
        ] {
            let g = make_geometry(n, k, v).unwrap();
            let ranges: Vec<Range<usize>> = (0..k).map(|t| g.code_range(t)).collect();
            // Sweep each block's codes with the other blocks held at a rotating value.
            for t in 0..k {
                for code in ranges[t].clone() {
                    let codes: Vec<usize> = (0..k)
                        .map(|u| {
                            if u == t {
                                code
                            } else {
                                ranges[u].start + (code % g.m())
                            }
                        })
                        .collect();
                    let cv = CodeVector::new(codes.clone());
                    let h = code_to_hypothesis(&cv, &g).unwrap();
                    for j in 0..g.support_size() {
                        let u = g.block_of(j).unwrap();
                        assert_eq!(
                            h.predict(j),
                            eval_block_hypothesis(u, codes[u], j, &g).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn reconstruct_multiset_examples() {
        let g = make_geometry(32, 2, OI).unwrap();
        let r = |m: &[usize]| reconstruct_multiset(&set(OI, m), &g).unwrap().into_inner();
        assert_eq!(r(&[5, 21]), vec![5, 21]);
        assert_eq!(r(&[5]), vec![5, 16]);
        assert_eq!(r(&[5, 7]), vec![5, 16]);
        assert_eq!(r(&[]), vec![0, 16]);
        assert!(reconstruct_multiset(&set(OI, &[40]), &g).is_err());
        assert!(reconstruct_multiset(&set(OI, &[1, 2, 3]), &g).is_err());
        assert!(reconstruct_multiset(&set(OD, &[1]), &g).is_err());
    }

    #[test]
    fn reconstruct_sequence_examples() {
        let g = make_geometry(16, 2, OD).unwrap();
        let r = |m: &[usize]| reconstruct_sequence(&set(OD, m), &g).unwrap().into_inner();
        assert_eq!(r(&[3, 9]), vec![3, 9]);
        assert_eq!(r(&[9, 3]), vec![9, 3]);
        assert_eq!(r(&[9]), vec![9, 0]);
        assert_eq!(r(&[]), vec![0, 0]);
        // Out-of-support members are skipped.
        assert_eq!(r(&[20, 4]), vec![4, 0]);
        assert_ne!(
            code_to_hypothesis(&CodeVector::new(r(&[3, 9])), &g).unwrap(),
            code_to_hypothesis(&CodeVector::new(r(&[9, 3])), &g).unwrap()
        );
    }

    #[test]
    fn sign_matrix_shape_and_determinism() {
        let g = make_geometry(1024, 4, OI).unwrap();
        let s = sample_sign_matrix(&g, 99);
        assert_eq!((s.rows(), s.cols()), (4, 8));
        assert_eq!(s, sample_sign_matrix(&g, 99));
        assert!(s.entries().iter().all(|&e| e == 1 || e == -1));
        assert!(SignMatrix::new(1, 2, vec![1, 0]).is_err());
        assert!(SignMatrix::new(1, 2, vec![1]).is_err());
    }

    #[test]
    fn sign_matrix_mean_is_zero() {
        let g = make_geometry(2048, 2, OI).unwrap(); // 2 x 10 entries per draw
        let draws = 100_000u64 / 20;
        let mut sum = 0i64;
        let mut count = 0i64;
        for seed in 0..draws {
            for &e in sample_sign_matrix(&g, seed).entries() {
                sum += i64::from(e);
                count += 1;
            }
        }
        let mean = sum as f64 / count as f64;
        let se = 1.0 / libm::sqrt(count as f64);
        assert!(mean.abs() <= 5.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn build_distribution_examples() {
        let g = make_geometry(32, 2, OI).unwrap();
        let sigma = SignMatrix::new(2, 4, vec![1, -1, 1, -1, 1, 1, 1, 1]).unwrap();
        let p = build_distribution(&sigma, &g).unwrap();
        assert_eq!(&p.eta()[..4], &[0.75, 0.25, 0.75, 0.25]);
        assert!(p.eta()[16..].iter().all(|&e| e == 0.75));

        let plus = SignMatrix::constant(2, 4, 1).unwrap();
        let p = build_distribution(&plus, &g).unwrap();
        assert!(p.eta().iter().all(|&e| e == 0.75));

        let g = make_geometry(100, 3, OI).unwrap();
        let eps = g.epsilon();
        let p = build_distribution(&sample_sign_matrix(&g, 5), &g).unwrap();
        assert!(p
            .eta()
            .iter()
            .all(|&e| e == 0.5 + 0.5 * eps || e == 0.5 - 0.5 * eps));
        assert!(build_distribution(&plus, &g).is_err());
    }

    #[test]
    fn optimal_code_examples() {
        let g = make_geometry(32, 2, OI).unwrap();
        let sigma = SignMatrix::new(2, 4, vec![1, -1, 1, -1, -1, -1, -1, -1]).unwrap();
        let opt = optimal_code(&sigma, &g).unwrap();
        assert_eq!(opt.codes(), &[5, 16]);

        let minus = SignMatrix::constant(2, 4, -1).unwrap();
        assert_eq!(optimal_code(&minus, &g).unwrap().codes(), &[0, 16]);
        let god = make_geometry(16, 2, OD).unwrap();
        assert_eq!(optimal_code(&minus, &god).unwrap().codes(), &[0, 0]);

        let p = build_distribution(&sigma, &g).unwrap();
        let r = true_risk(&code_to_hypothesis(&opt, &g).unwrap(), &p).unwrap();
        assert!((r - 0.25).abs() < 1e-12); // (1 - eps) / 2 with eps = 0.5
    }

    #[test]
    fn optimal_code_is_optimal_by_enumeration() {
        for (n, k, v) in [
            (16, 2, OI),
            (12, 3, OI),
            (16, 2, OD),
            (8, 1, OD),
            (40, 2, OI),
        ] {
            let g = make_geometry(n, k, v).unwrap();
            for seed in 0..8 {
                let sigma = sample_sign_matrix(&g, seed);
                let p = build_distribution(&sigma, &g).unwrap();
                let best = true_risk(
                    &code_to_hypothesis(&optimal_code(&sigma, &g).unwrap(), &g).unwrap(),
                    &p,
                )
                .unwrap();
                let eps = g.epsilon();
                assert!((best - (1.0 - eps) / 2.0).abs() < 1e-12);
                let mut codes = vec![0usize; k];
                let total = g.m().pow(k as u32);
                for mut idx in 0..total {
                    for (t, c) in codes.iter_mut().enumerate() {
                        *c = g.code_base(t) + idx % g.m();
                        idx /= g.m();
                    }
                    let h = code_to_hypothesis(&CodeVector::new(codes.clone()), &g).unwrap();
                    assert!(true_risk(&h, &p).unwrap() >= best - 1e-12);
                }
            }
        }
    }

    #[test]
    fn hamming_delta_examples() {
        let g = make_geometry(32, 2, OI).unwrap();
        let sigma = SignMatrix::new(2, 4, vec![1, -1, 1, -1, 1, 1, -1, 1]).unwrap();
        let opt = optimal_code(&sigma, &g).unwrap();
        assert_eq!(hamming_delta(0, opt.codes()[0], &sigma, &g).unwrap(), 0);
        assert_eq!(hamming_delta(1, opt.codes()[1], &sigma, &g).unwrap(), 0);
        assert_eq!(hamming_delta(0, 6, &sigma, &g).unwrap(), 2);
        assert_eq!(hamming_delta(0, 5 ^ 0b1111, &sigma, &g).unwrap(), 4);
        assert!(hamming_delta(0, 16, &sigma, &g).is_err());
    }

    fn geometry_strategy() -> impl Strategy<Value = BlockGeometry> {
        prop_oneof![
            (4usize..200, 1usize..5).prop_filter_map("oi", |(n, k)| make_geometry(n, k, OI).ok()),
            (2usize..300, prop_oneof![Just(1usize), Just(2), Just(4)])
                .prop_filter_map("od", |(n, k)| make_geometry(n, k, OD).ok()),
        ]
    }

    proptest! {
        #[test]
        fn multiset_invariance(
            g in geometry_strategy(),
            raw in proptest::collection::vec(any::<usize>(), 0..4),
            rot in any::<usize>(),
        ) {
            prop_assume!(g.variant() == OI);
            let mut members: Vec<usize> = raw.iter().map(|x| x % g.support_size()).take(g.k()).collect();
            let base = reconstruct_multiset(&set(OI, &members), &g).unwrap();
            if !members.is_empty() {
                let len = members.len();
                members.rotate_left(rot % len);
                members.reverse();
                prop_assert_eq!(&reconstruct_multiset(&set(OI, &members), &g).unwrap(), &base);
                if members.len() < g.k() {
                    members.push(members[0]);
                    prop_assert_eq!(&reconstruct_multiset(&set(OI, &members), &g).unwrap(), &base);
                }
            }
        }

        #[test]
        fn weighted_excess_identity(g in geometry_strategy(), seed in any::<u64>(), pick in any::<usize>()) {
            let sigma = sample_sign_matrix(&g, seed);
            let p = build_distribution(&sigma, &g).unwrap();
            let opt = optimal_code(&sigma, &g).unwrap();
            let t = pick % g.k();
            let range = g.code_range(t);
            let code = range.start + (pick / g.k()) % range.len();
            let mut codes = opt.codes().to_vec();
            codes[t] = code;
            let block: Vec<usize> = g.block_range(t).collect();
            let h = code_to_hypothesis(&CodeVector::new(codes), &g).unwrap();
            let h_opt = code_to_hypothesis(&opt, &g).unwrap();
            let lhs = conditional_risk(&h, &p, &block).unwrap() - conditional_risk(&h_opt, &p, &block).unwrap();
            let pattern = g.pattern(t, code).unwrap();
            let mismatch = pattern ^ sigma.majority_pattern(t);
            let rhs: f64 = g.epsilon() * g.class_weights().iter().enumerate()
                .filter(|(r, _)| (mismatch >> r) & 1 == 1)
                .map(|(_, w)| w)
                .sum::<f64>();
            prop_assert!((lhs - rhs).abs() < 1e-12, "lhs {} rhs {}", lhs, rhs);
            if g.is_divisible() {
                let w = 1.0 / g.bit_width() as f64;
                prop_assert!(g.class_weights().iter().all(|&x| (x - w).abs() < 1e-15));
            }
        }

        #[test]
        fn risk_decomposes_over_blocks(g in geometry_strategy(), seed in any::<u64>()) {
            let sigma = sample_sign_matrix(&g, seed);
            let p = build_distribution(&sigma, &g).unwrap();
            let h = crate::model::Hypothesis::new(
                (0..g.support_size()).map(|j| Label::from_bit(crate::rng::mix64(seed ^ j as u64) & 1 == 1)).collect(),
            );
            let avg: f64 = (0..g.k())
                .map(|t| conditional_risk(&h, &p, &g.block_range(t).collect::<Vec<_>>()).unwrap())
                .sum::<f64>() / g.k() as f64;
            prop_assert!((avg - true_risk(&h, &p).unwrap()).abs() < 1e-12);
        }
    }
}
