//! Multinomial likelihoods of single samples and of subsets of the sample
//! space, as homogeneous polynomials over the probability simplex.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::lattice::{ln_biguint, multinomial_coefficient, SampleSpace, SupportSet};
use crate::math;
use crate::{Error, Result};

/// Sample sizes above this are evaluated term by term in log space.
pub const LOG_SPACE_THRESHOLD: u32 = 30;

const SUM_TOL: f64 = 1e-12;

/// A categorical distribution over the support, one probability per value.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("distribution must have at least one entry"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::invalid(
                "distribution entries must be finite and non-negative",
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::invalid(format!(
                "distribution entries sum to {total}, not 1"
            )));
        }
        Ok(Distribution { probs })
    }

    /// All mass on support index `i`.
    pub fn vertex(m: usize, i: usize) -> Self {
        let mut probs = vec![0.0; m];
        probs[i] = 1.0;
        Distribution { probs }
    }

    /// `F_0`, all mass on the least support value.
    pub fn zero(m: usize) -> Self {
        Self::vertex(m, 0)
    }

    pub(crate) fn from_trusted(probs: Vec<f64>) -> Self {
        Distribution { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Mean in the support's shifted coordinates.
    pub fn mean(&self, support: &SupportSet) -> f64 {
        mean_of(&self.probs, support.values())
    }

    /// True when some coordinate is at most `eps`.
    pub fn on_boundary(&self, eps: f64) -> bool {
        self.probs.iter().any(|&p| p <= eps)
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }
}

pub(crate) fn mean_of(probs: &[f64], values: &[f64]) -> f64 {
    probs.iter().zip(values).map(|(p, v)| p * v).sum()
}

/// One monomial `coefficient * Π p_i^{counts_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub sample: usize,
    pub counts: Vec<u32>,
    pub coefficient: BigUint,
}

/// `L(p | Ω_s) = Σ_{x ∈ Ω_s} L(p | x)` for a set of member samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetLikelihood {
    m: usize,
    degree: u32,
    members: Vec<usize>,
    terms: Vec<Term>,
    // evaluation caches, derived once from the exact coefficients
    flat_counts: Vec<u32>,
    coef: Vec<f64>,
    ln_coef: Vec<f64>,
}

/// Likelihood polynomial of the member samples (lexicographic indices).
pub fn build_subset_likelihood(space: &SampleSpace, members: &[usize]) -> Result<SubsetLikelihood> {
    let mut ids = members.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if let Some(&bad) = ids.iter().find(|&&i| i >= space.len()) {
        return Err(Error::invalid(format!(
            "sample index {bad} is out of range for a space of {} samples",
            space.len()
        )));
    }
    let m = space.support().len();
    let mut terms = Vec::with_capacity(ids.len());
    let mut flat_counts = Vec::with_capacity(ids.len() * m);
    let mut coef = Vec::with_capacity(ids.len());
    let mut ln_coef = Vec::with_capacity(ids.len());
    for &i in &ids {
        let counts = space.sample(i).counts().to_vec();
        let coefficient = multinomial_coefficient(&counts)?;
        flat_counts.extend_from_slice(&counts);
        coef.push(coefficient.to_f64().unwrap_or(f64::INFINITY));
        ln_coef.push(ln_biguint(&coefficient));
        terms.push(Term {
            sample: i,
            counts,
            coefficient,
        });
    }
    Ok(SubsetLikelihood {
        m,
        degree: space.n(),
        members: ids,
        terms,
        flat_counts,
        coef,
        ln_coef,
    })
}

/// Probability of drawing sample `sample` (lexicographic index) under `dist`.
pub fn sample_likelihood(space: &SampleSpace, sample: usize, dist: &Distribution) -> Result<f64> {
    let poly = build_subset_likelihood(space, &[sample])?;
    poly.evaluate(dist)
}

impl SubsetLikelihood {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, sample: usize) -> bool {
        self.members.binary_search(&sample).is_ok()
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.m {
            return Err(Error::invalid(format!(
                "distribution has {len} entries but the support has {}",
                self.m
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, dist: &Distribution) -> Result<f64> {
        self.check_dim(dist.len())?;
        Ok(self.value(dist.probs()))
    }

    pub fn gradient(&self, dist: &Distribution) -> Result<Vec<f64>> {
        self.check_dim(dist.len())?;
        let mut grad = vec![0.0; self.m];
        self.value_and_gradient(dist.probs(), &mut grad);
        Ok(grad)
    }

    fn use_logs(&self) -> bool {
        self.degree > LOG_SPACE_THRESHOLD
    }

    /// Polynomial value at `p`, clamped to `[0, 1]`. `p.len()` must equal the dimension.
    pub fn value(&self, p: &[f64]) -> f64 {
        let raw = if self.use_logs() {
            self.value_log(p)
        } else {
            self.value_direct(p)
        };
        raw.clamp(0.0, 1.0)
    }

    fn value_direct(&self, p: &[f64]) -> f64 {
        let m = self.m;
        let n = self.degree as usize;
        let pw = power_table(p, n);
        let mut total = 0.0;
        for (t, counts) in self.flat_counts.chunks_exact(m).enumerate() {
            let mut term = self.coef[t];
            for (i, &c) in counts.iter().enumerate() {
                term *= pw[i * (n + 1) + c as usize];
            }
            total += term;
        }
        total
    }

    fn value_log(&self, p: &[f64]) -> f64 {
        let m = self.m;
        let logs: Vec<f64> = p.iter().map(|&x| safe_ln(x)).collect();
        let mut total = 0.0;
        for (t, counts) in self.flat_counts.chunks_exact(m).enumerate() {
            if let Some(l) = log_term(self.ln_coef[t], counts, &logs, None) {
                total += math::exp(l);
            }
        }
        total
    }

    /// Probability of each member sample at `p`, in `members()` order.
    pub fn term_values(&self, p: &[f64], out: &mut [f64]) {
        let m = self.m;
        if self.use_logs() {
            let logs: Vec<f64> = p.iter().map(|&x| safe_ln(x)).collect();
            for (t, counts) in self.flat_counts.chunks_exact(m).enumerate() {
                out[t] = log_term(self.ln_coef[t], counts, &logs, None).map_or(0.0, math::exp);
            }
            return;
        }
        let n = self.degree as usize;
        let pw = power_table(p, n);
        for (t, counts) in self.flat_counts.chunks_exact(m).enumerate() {
            let mut term = self.coef[t];
            for (i, &c) in counts.iter().enumerate() {
                term *= pw[i * (n + 1) + c as usize];
            }
            out[t] = term;
        }
    }

    /// Value (unclamped) and analytic gradient at `p`, writing into `grad`.
    pub fn value_and_gradient(&self, p: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        if self.use_logs() {
            return self.value_and_gradient_log(p, grad);
        }
        let m = self.m;
        let n = self.degree as usize;
        let pw = power_table(p, n);
        let mut total = 0.0;
        for (t, counts) in self.flat_counts.chunks_exact(m).enumerate() {
            let coef = self.coef[t];
            let mut term = coef;
            for (i, &c) in counts.iter().enumerate() {
                term *= pw[i * (n + 1) + c as usize];
            }
            total += term;
            for (i, &ci) in counts.iter().enumerate() {
                if ci == 0 {
                    continue;
                }
                let mut d = coef * f64::from(ci) * pw[i * (n + 1) + ci as usize - 1];
                for (j, &cj) in counts.iter().enumerate() {
                    if j != i {
                        d *= pw[j * (n + 1) + cj as usize];
                    }
                }
                grad[i] += d;
            }
        }
        total
    }

    fn value_and_gradient_log(&self, p: &[f64], grad: &mut [f64]) -> f64 {
        let m = self.m;
        let logs: Vec<f64> = p.iter().map(|&x| safe_ln(x)).collect();
        let mut total = 0.0;
        for (t, counts) in self.flat_counts.chunks_exact(m).enumerate() {
            let lc = self.ln_coef[t];
            if let Some(l) = log_term(lc, counts, &logs, None) {
                total += math::exp(l);
            }
            for (i, &ci) in counts.iter().enumerate() {
                if ci == 0 {
                    continue;
                }
                if let Some(l) = log_term(lc, counts, &logs, Some(i)) {
                    grad[i] += f64::from(ci) * math::exp(l);
                }
            }
        }
        total
    }
}

fn safe_ln(x: f64) -> f64 {
    if x > 0.0 {
        math::ln(x)
    } else {
        f64::NEG_INFINITY
    }
}

// log of coef * Π p^c, with one power of `lowered` removed when given.
// None when the term vanishes (some p_i = 0 with a positive exponent).
fn log_term(ln_coef: f64, counts: &[u32], logs: &[f64], lowered: Option<usize>) -> Option<f64> {
    let mut acc = ln_coef;
    for (i, &c) in counts.iter().enumerate() {
        let e = if Some(i) == lowered { c - 1 } else { c };
        if e == 0 {
            continue;
        }
        if logs[i] == f64::NEG_INFINITY {
            return None;
        }
        acc += f64::from(e) * logs[i];
    }
    Some(acc)
}

// pw[i * (n + 1) + e] = p_i^e, with 0^0 = 1
fn power_table(p: &[f64], n: usize) -> Vec<f64> {
    let mut pw = vec![1.0; p.len() * (n + 1)];
    for (i, &x) in p.iter().enumerate() {
        let row = &mut pw[i * (n + 1)..(i + 1) * (n + 1)];
        for e in 1..=n {
            row[e] = row[e - 1] * x;
        }
    }
    pw
}

/// All points `k / d` of the barycentric grid on the `m`-simplex, as
/// compositions of `d` into `m` non-negative parts. Order is deterministic:
/// the first coordinate descends slowest.
#[derive(Debug, Clone)]
pub struct SimplexGrid {
    d: u32,
    current: Option<Vec<u32>>,
}

impl SimplexGrid {
    pub fn new(m: usize, d: u32) -> Self {
        let mut first = vec![0u32; m];
        if m > 0 {
            first[0] = d;
        }
        SimplexGrid {
            d,
            current: if m == 0 { None } else { Some(first) },
        }
    }

    pub fn resolution(&self) -> u32 {
        self.d
    }
}

impl Iterator for SimplexGrid {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let cur = self.current.take()?;
        let out = cur.clone();
        // next composition in descending lexicographic order
        let m = cur.len();
        let mut next = cur;
        if m >= 2 {
            // rightmost position (excluding last) with a positive part
            let pos = (0..m - 1).rev().find(|&i| next[i] > 0);
            if let Some(i) = pos {
                let tail: u32 = next[i + 1..].iter().sum();
                next[i] -= 1;
                for v in next[i + 1..].iter_mut() {
                    *v = 0;
                }
                next[i + 1] = tail + 1;
                self.current = Some(next);
            }
        }
        Some(out)
    }
}

/// Number of grid points `C(d + m - 1, m - 1)`, saturating.
pub fn grid_size(m: usize, d: u32) -> u128 {
    crate::lattice::sample_space_size(m, d).unwrap_or(u128::MAX)
}

/// One row of a likelihood contour export.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ContourRow {
    pub probs: Vec<f64>,
    pub likelihood: f64,
    pub mean: f64,
}

/// Evaluate a subset likelihood over the barycentric grid of resolution `d`.
pub fn contour_grid(
    space: &SampleSpace,
    poly: &SubsetLikelihood,
    d: u32,
    cap: u128,
) -> Result<Vec<ContourRow>> {
    if d == 0 {
        return Err(Error::invalid("grid resolution must be at least 1"));
    }
    let m = space.support().len();
    let size = grid_size(m, d);
    if size > cap {
        return Err(Error::CapExceeded { required: size, cap });
    }
    let df = f64::from(d);
    let values = space.support().values();
    Ok(SimplexGrid::new(m, d)
        .map(|k| {
            let probs: Vec<f64> = k.iter().map(|&c| f64::from(c) / df).collect();
            let likelihood = poly.value(&probs);
            let mean = mean_of(&probs, values);
            ContourRow {
                probs,
                likelihood,
                mean,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_sample_space, normalize_support};

    fn space(s: &[f64], n: u32) -> SampleSpace {
        enumerate_sample_space(&normalize_support(s).unwrap(), n).unwrap()
    }

    fn dist(p: &[f64]) -> Distribution {
        Distribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn single_sample_likelihood() {
        let sp = space(&[0.0, 1.0, 3.0], 4);
        let x = sp.index_of(&[2, 1, 1]).unwrap();
        let third = 1.0 / 3.0;
        let v = sample_likelihood(&sp, x, &dist(&[third, third, third])).unwrap();
        assert!((v - 12.0 / 81.0).abs() < 1e-15);

        let f0 = Distribution::zero(3);
        assert_eq!(sample_likelihood(&sp, 0, &f0).unwrap(), 1.0);
        assert_eq!(sample_likelihood(&sp, x, &f0).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let sp = space(&[0.0, 1.0, 3.0], 2);
        let poly = build_subset_likelihood(&sp, &[1]).unwrap();
        assert!(poly.evaluate(&dist(&[0.5, 0.5])).is_err());
        assert!(build_subset_likelihood(&sp, &[sp.len()]).is_err());
    }

    #[test]
    fn full_and_empty_subsets() {
        let sp = space(&[0.0, 1.0, 3.0], 4);
        let all: Vec<usize> = (0..sp.len()).collect();
        let full = build_subset_likelihood(&sp, &all).unwrap();
        let empty = build_subset_likelihood(&sp, &[]).unwrap();
        for p in [[0.2, 0.3, 0.5], [1.0, 0.0, 0.0], [0.0, 0.25, 0.75]] {
            assert!((full.evaluate(&dist(&p)).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(empty.evaluate(&dist(&p)).unwrap(), 0.0);
        }
    }

    #[test]
    fn binomial_polynomials() {
        let sp = space(&[0.0, 1.0], 2);
        let zero = build_subset_likelihood(&sp, &[0]).unwrap();
        assert!((zero.evaluate(&dist(&[0.5, 0.5])).unwrap() - 0.25).abs() < 1e-15);
        let top = build_subset_likelihood(&sp, &[2]).unwrap();
        assert!((top.evaluate(&dist(&[0.7, 0.3])).unwrap() - 0.09).abs() < 1e-15);
        let g = top.gradient(&dist(&[0.5, 0.5])).unwrap();
        assert_eq!(g, vec![0.0, 1.0]);
    }

    #[test]
    fn full_space_gradient_is_flat_along_the_simplex() {
        let sp = space(&[0.0, 1.0, 3.0], 3);
        let all: Vec<usize> = (0..sp.len()).collect();
        let full = build_subset_likelihood(&sp, &all).unwrap();
        let g = full.gradient(&dist(&[0.2, 0.5, 0.3])).unwrap();
        // Σ p_i = 1 is the only constraint, so every tangent direction sees 0
        assert!((g[0] - g[1]).abs() < 1e-12);
        assert!((g[1] - g[2]).abs() < 1e-12);
    }

    #[test]
    fn zero_distribution_dichotomy() {
        let sp = space(&[0.0, 1.0, 3.0], 3);
        let f0 = Distribution::zero(3);
        let with_zero = build_subset_likelihood(&sp, &[0, 4, 7]).unwrap();
        let without = build_subset_likelihood(&sp, &[1, 4, 7]).unwrap();
        assert_eq!(with_zero.evaluate(&f0).unwrap(), 1.0);
        assert_eq!(without.evaluate(&f0).unwrap(), 0.0);
    }

    #[test]
    fn log_space_agrees_with_direct_products() {
        let sp = space(&[0.0, 1.0], 40);
        let members: Vec<usize> = (10..35).collect();
        let poly = build_subset_likelihood(&sp, &members).unwrap();
        assert!(poly.use_logs());
        let p = [0.45, 0.55];
        let direct = poly.value_direct(&p);
        let logged = poly.value_log(&p);
        assert!((direct - logged).abs() < 1e-12 * direct.max(1e-300));
    }

    #[test]
    fn grid_enumerates_compositions() {
        let pts: Vec<Vec<u32>> = SimplexGrid::new(3, 2).collect();
        assert_eq!(
            pts,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![1, 0, 1],
                vec![0, 2, 0],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
        assert_eq!(SimplexGrid::new(1, 5).count(), 1);
        assert_eq!(SimplexGrid::new(4, 7).count() as u128, grid_size(4, 7));
    }

    #[test]
    fn contour_peak_at_top_vertex() {
        let sp = space(&[0.0, 1.0, 3.0], 3);
        let ids: Vec<usize> = [[0, 2, 1], [0, 1, 2], [0, 0, 3]]
            .iter()
            .map(|c| sp.index_of(c).unwrap())
            .collect();
        let poly = build_subset_likelihood(&sp, &ids).unwrap();
        let rows = contour_grid(&sp, &poly, 20, 1_000_000).unwrap();
        let top = rows.iter().find(|r| r.probs == [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(top.likelihood, 1.0);
        assert_eq!(top.mean, 3.0);
        assert!(rows.iter().all(|r| r.likelihood <= 1.0));
    }
}
