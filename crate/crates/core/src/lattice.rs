//! The sample space `Ω(S, n)`: every sorted sample of size `n` drawn from a
//! finite support, stored as counts vectors in lexicographic order of the
//! sorted samples.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering as CmpOrdering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::math;
use crate::{Error, Result};

/// Refuse to materialize sample spaces larger than this.
pub const MAX_SAMPLE_SPACE: u128 = 10_000_000;

/// A finite support, sorted and shifted so that its least value is exactly 0.
///
/// `raw()` keeps the caller's values (sorted, deduplicated); `values()` are
/// `raw - shift`. All computation runs in the shifted coordinates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SupportSet {
    raw: Vec<f64>,
    values: Vec<f64>,
    shift: f64,
}

/// Sort, deduplicate and shift a raw support so its least element is 0.
pub fn normalize_support(raw: &[f64]) -> Result<SupportSet> {
    if raw.is_empty() {
        return Err(Error::invalid("support must contain at least one value"));
    }
    if let Some(bad) = raw.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("support value {bad} is not finite")));
    }
    let mut sorted = raw.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(CmpOrdering::Equal));
    sorted.dedup();
    let shift = sorted[0];
    let values: Vec<f64> = sorted.iter().map(|v| v - shift).collect();
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "support values collapse after shifting; values are too close together",
        ));
    }
    Ok(SupportSet {
        raw: sorted,
        values,
        shift,
    })
}

impl SupportSet {
    /// Shifted support values; the first is always 0.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Support values in the caller's coordinates.
    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest shifted support value.
    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Index of `x` (caller's coordinates), compared exactly.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.raw.iter().position(|&v| v == x)
    }
}

/// One sorted sample, stored as its counts vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Sample {
    counts: Vec<u32>,
}

impl Sample {
    pub fn from_counts(counts: Vec<u32>) -> Self {
        Sample { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn size(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Support indices of the sorted sample, nondecreasing.
    pub fn sorted_indices(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| core::iter::repeat_n(i, c as usize))
            .collect()
    }

    /// The sorted sample in the caller's coordinates.
    pub fn sorted_values(&self, support: &SupportSet) -> Vec<f64> {
        counts_to_sample(&self.counts, support)
    }

    /// Sample mean in shifted coordinates.
    pub fn mean(&self, support: &SupportSet) -> f64 {
        let n = self.size();
        let total: f64 = self
            .counts
            .iter()
            .zip(support.values())
            .map(|(&c, &v)| f64::from(c) * v)
            .sum();
        total / f64::from(n)
    }
}

/// Compare two counts vectors by the lexicographic order of their sorted
/// samples. A sample with more copies of a small value sorts first, so this
/// is the reverse of the lexicographic order on counts.
pub fn cmp_sorted_lex(a: &[u32], b: &[u32]) -> CmpOrdering {
    b.cmp(a)
}

/// `Ω(S, n)` with its samples in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpace {
    support: SupportSet,
    n: u32,
    samples: Vec<Sample>,
}

/// `C(n + m - 1, m - 1)`, the number of sorted samples, or `None` on overflow.
pub fn sample_space_size(m: usize, n: u32) -> Option<u128> {
    if m == 0 {
        return Some(0);
    }
    let k = (m - 1) as u128;
    let total = u128::from(n) + k;
    let k = k.min(total - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(total - i)? / (i + 1);
    }
    Some(acc)
}

/// Enumerate every sorted sample of size `n` over `support`.
pub fn enumerate_sample_space(support: &SupportSet, n: u32) -> Result<SampleSpace> {
    if support.is_empty() {
        return Err(Error::invalid("support must contain at least one value"));
    }
    if n == 0 {
        return Err(Error::invalid("sample size n must be at least 1"));
    }
    let m = support.len();
    let size = sample_space_size(m, n).unwrap_or(u128::MAX);
    if size > MAX_SAMPLE_SPACE {
        return Err(Error::CapExceeded {
            required: size,
            cap: MAX_SAMPLE_SPACE,
        });
    }
    let mut samples = Vec::with_capacity(size as usize);
    let mut counts = vec![0u32; m];
    fill_counts(&mut counts, 0, n, &mut samples);
    debug_assert_eq!(samples.len() as u128, size);
    Ok(SampleSpace {
        support: support.clone(),
        n,
        samples,
    })
}

// Counts in descending lexicographic order, i.e. sorted samples ascending.
fn fill_counts(counts: &mut Vec<u32>, i: usize, remaining: u32, out: &mut Vec<Sample>) {
    if i + 1 == counts.len() {
        counts[i] = remaining;
        out.push(Sample::from_counts(counts.clone()));
        return;
    }
    for c in (0..=remaining).rev() {
        counts[i] = c;
        fill_counts(counts, i + 1, remaining - c, out);
    }
    counts[i] = 0;
}

impl SampleSpace {
    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &Sample {
        &self.samples[i]
    }

    /// `N`, the number of samples.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Index of the all-minimum sample `0`; always the first in lexicographic order.
    pub fn zero_index(&self) -> usize {
        0
    }

    /// Lexicographic index of a counts vector.
    pub fn index_of(&self, counts: &[u32]) -> Option<usize> {
        if counts.len() != self.support.len() {
            return None;
        }
        self.samples
            .binary_search_by(|s| cmp_sorted_lex(s.counts(), counts))
            .ok()
    }

    /// Sample mean of sample `i` in shifted coordinates.
    pub fn sample_mean(&self, i: usize) -> f64 {
        self.samples[i].mean(&self.support)
    }
}

/// Counts vector of a sample given in the caller's coordinates.
pub fn sample_to_counts(x: &[f64], support: &SupportSet) -> Result<Vec<u32>> {
    let mut counts = vec![0u32; support.len()];
    for &v in x {
        let i = support
            .index_of(v)
            .ok_or_else(|| Error::invalid(format!("sample value {v} is not in the support")))?;
        counts[i] += 1;
    }
    Ok(counts)
}

/// Sorted sample in the caller's coordinates for a counts vector.
pub fn counts_to_sample(counts: &[u32], support: &SupportSet) -> Vec<f64> {
    counts
        .iter()
        .zip(support.raw())
        .flat_map(|(&c, &v)| core::iter::repeat_n(v, c as usize))
        .collect()
}

/// `n! / (c_1! ... c_m!)` with `n = Σ c_i`, computed exactly.
pub fn multinomial_coefficient(counts: &[u32]) -> Result<BigUint> {
    counts
        .iter()
        .try_fold(0u32, |a, &c| a.checked_add(c))
        .ok_or_else(|| Error::Overflow(format!("sample size exceeds {}", u32::MAX)))?;
    let mut acc = BigUint::one();
    let mut prefix: u32 = 0;
    for &c in counts {
        // acc *= C(prefix + c, c), one exact step at a time
        for j in 1..=c {
            acc *= prefix + j;
            acc /= j;
        }
        prefix += c;
    }
    Ok(acc)
}

/// Natural log of a big integer, accurate to double precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return math::ln(x.to_f64().unwrap_or(f64::INFINITY));
    }
    let drop = bits - 64;
    let top = (x >> drop).to_f64().unwrap_or(f64::INFINITY);
    math::ln(top) + drop as f64 * core::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn support(v: &[f64]) -> SupportSet {
        normalize_support(v).unwrap()
    }

    fn sorted(space: &SampleSpace) -> Vec<Vec<f64>> {
        space
            .samples()
            .iter()
            .map(|s| s.sorted_values(space.support()))
            .collect()
    }

    #[test]
    fn example_space_matches_listing() {
        let space = enumerate_sample_space(&support(&[0.0, 1.0, 3.0]), 4).unwrap();
        let expected: Vec<Vec<f64>> = [
            [0, 0, 0, 0],
            [0, 0, 0, 1],
            [0, 0, 0, 3],
            [0, 0, 1, 1],
            [0, 0, 1, 3],
            [0, 0, 3, 3],
            [0, 1, 1, 1],
            [0, 1, 1, 3],
            [0, 1, 3, 3],
            [0, 3, 3, 3],
            [1, 1, 1, 1],
            [1, 1, 1, 3],
            [1, 1, 3, 3],
            [1, 3, 3, 3],
            [3, 3, 3, 3],
        ]
        .iter()
        .map(|r| r.iter().map(|&v| f64::from(v)).collect())
        .collect();
        assert_eq!(sorted(&space), expected);
    }

    #[test]
    fn single_outcome_and_binomial_spaces() {
        let one = enumerate_sample_space(&support(&[0.0]), 3).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(sorted(&one), vec![vec![0.0, 0.0, 0.0]]);

        let bin = enumerate_sample_space(&support(&[0.0, 1.0]), 2).unwrap();
        assert_eq!(
            sorted(&bin),
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]
        );
    }

    #[test]
    fn zero_sample_size_is_rejected() {
        let err = enumerate_sample_space(&support(&[0.0, 1.0]), 0).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
        assert!(matches!(normalize_support(&[]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn counts_from_samples() {
        let s = support(&[0.0, 3.0, 5.0, 8.0]);
        assert_eq!(
            sample_to_counts(&[0.0, 0.0, 0.0, 0.0, 3.0, 3.0, 8.0], &s).unwrap(),
            vec![4, 2, 0, 1]
        );
        assert_eq!(
            sample_to_counts(&[0.0, 0.0, 0.0], &support(&[0.0])).unwrap(),
            vec![3]
        );
        let die = support(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let counts = sample_to_counts(&[2.0, 2.0, 3.0, 4.0, 6.0], &die).unwrap();
        assert_eq!(counts, vec![0, 2, 1, 1, 0, 1]);
        assert_eq!(counts_to_sample(&counts, &die), vec![2.0, 2.0, 3.0, 4.0, 6.0]);
        assert!(sample_to_counts(&[7.0], &die).is_err());
    }

    #[test]
    fn multinomial_coefficients() {
        assert_eq!(multinomial_coefficient(&[2, 1, 1]).unwrap(), BigUint::from(12u32));
        assert_eq!(multinomial_coefficient(&[9, 0, 0]).unwrap(), BigUint::one());
        assert_eq!(
            multinomial_coefficient(&[4, 2, 0, 1]).unwrap(),
            BigUint::from(105u32)
        );
        // C(170, 85) does not fit in u128 but must still be exact.
        let big = multinomial_coefficient(&[85, 85]).unwrap();
        assert!(big.bits() > 128);
        let back = multinomial_coefficient(&[84, 85]).unwrap() * 170u32 / 85u32;
        assert_eq!(big, back);
        assert!(matches!(
            multinomial_coefficient(&[u32::MAX, 1]),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn normalization() {
        let s = normalize_support(&[3.0, 1.0, 6.0]).unwrap();
        assert_eq!(s.values(), &[0.0, 2.0, 5.0]);
        assert_eq!(s.shift(), 1.0);
        let s = normalize_support(&[0.0, 1.0, 3.0]).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0, 3.0]);
        assert_eq!(s.shift(), 0.0);
        let s = normalize_support(&[5.0, 5.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[0.0, 3.0]);
        assert_eq!(s.shift(), 2.0);
        assert!(normalize_support(&[1.0, f64::NAN]).is_err());
        assert!(normalize_support(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn index_lookup_matches_position() {
        let space = enumerate_sample_space(&support(&[0.0, 1.0, 3.0, 7.0]), 5).unwrap();
        for (i, s) in space.samples().iter().enumerate() {
            assert_eq!(space.index_of(s.counts()), Some(i));
        }
        assert_eq!(space.index_of(&[1, 1, 1, 1]), None);
    }

    #[test]
    fn ln_of_big_integers() {
        let x = multinomial_coefficient(&[85, 85]).unwrap();
        let direct = math::ln(x.to_f64().unwrap());
        assert!((ln_biguint(&x) - direct).abs() < 1e-12);
        let huge = BigUint::one() << 3000u32;
        let expect = 3000.0 * core::f64::consts::LN_2;
        assert!((ln_biguint(&huge) - expect).abs() < 1e-9);
    }
}
