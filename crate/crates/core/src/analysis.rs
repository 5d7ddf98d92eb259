//! Properties of arbitrary bound functions: error sets, validity over the
//! whole simplex, Monte Carlo coverage and pairwise comparison.
//!
//! Bound values here live in normalized coordinates (minimum support value
//! at zero), the same coordinates as the sample space.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Gamma;

use crate::bounds::BoundTable;
use crate::lattice::SampleSpace;
use crate::likelihood::{build_subset_likelihood, grid_size, mean_of, Distribution, SimplexGrid};
use crate::math;
use crate::solver::{check_alpha, maximize_below_mean, SolverConfig};
use crate::{Error, Result};

/// A bound value per lexicographic sample index; `f64::INFINITY` allowed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundFunction {
    values: Vec<f64>,
    provenance: String,
}

impl BoundFunction {
    pub fn new(values: Vec<f64>, provenance: impl Into<String>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::invalid(format!("bound value at index {i} is not a real number or +inf")));
        }
        Ok(BoundFunction {
            values,
            provenance: provenance.into(),
        })
    }

    pub fn constant(len: usize, value: f64) -> Result<Self> {
        BoundFunction::new(vec![value; len], format!("constant {value}"))
    }

    pub fn from_table(table: &BoundTable) -> Self {
        BoundFunction {
            values: table.by_sample(),
            provenance: format!("table {}", table.ordering.label()),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Copy with entry `i` replaced.
    pub fn with_value(&self, i: usize, value: f64) -> Result<Self> {
        let mut values = self.values.clone();
        values[i] = value;
        BoundFunction::new(values, format!("{} (entry {i} changed)", self.provenance))
    }

    fn check_space(&self, space: &SampleSpace) -> Result<()> {
        if self.values.len() != space.len() {
            return Err(Error::invalid(format!(
                "bound function has {} values but the sample space has {}",
                self.values.len(),
                space.len()
            )));
        }
        Ok(())
    }
}

fn parse_value(t: &str) -> Option<f64> {
    match t {
        "inf" | "+inf" | "Inf" | "infinity" => Some(f64::INFINITY),
        _ => t.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

/// Parse lines of `index value`, one per sample, `inf` allowed. Every index
/// must appear exactly once. Values are taken as given, without any shift.
pub fn parse_bound_function(text: &str, len: usize, provenance: &str) -> Result<BoundFunction> {
    let mut values: Vec<Option<f64>> = vec![None; len];
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(i), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::invalid(format!("line {}: expected `index value`", ln + 1)));
        };
        let i: usize = i
            .parse()
            .map_err(|_| Error::invalid(format!("line {}: bad index {i:?}", ln + 1)))?;
        let v = parse_value(v).ok_or_else(|| Error::invalid(format!("line {}: bad value {v:?}", ln + 1)))?;
        let slot = values
            .get_mut(i)
            .ok_or_else(|| Error::invalid(format!("line {}: index {i} out of range", ln + 1)))?;
        if slot.replace(v).is_some() {
            return Err(Error::invalid(format!("line {}: index {i} repeated", ln + 1)));
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::invalid(format!("no value for index {i}"))))
        .collect::<Result<Vec<f64>>>()?;
    BoundFunction::new(values, provenance)
}

/// Samples whose bound exceeds `mu`. Infinite bounds exceed every real `mu`;
/// a sample counts even when it has probability zero.
pub fn error_set(bound: &BoundFunction, mu: f64) -> Vec<usize> {
    bound
        .values
        .iter()
        .enumerate()
        .filter(|(_, &b)| b > mu)
        .map(|(i, _)| i)
        .collect()
}

/// Distinct values in ascending order. With `tol > 0`, a value within `tol`
/// of the first value of the current group joins it.
pub fn distinct_values(bound: &BoundFunction, tol: f64) -> Vec<f64> {
    let mut v = bound.values.clone();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        match out.last() {
            Some(&last) if x == last || (x.is_finite() && x - last <= tol) => {}
            _ => out.push(x),
        }
    }
    out
}

/// `U + 1`, where `U` counts distinct bound values (exactly when `tol` is 0).
pub fn count_possible_error_sets(bound: &BoundFunction, tol: f64) -> usize {
    distinct_values(bound, tol).len() + 1
}

/// Error sets met while `mu` sweeps the extended real line, in order of
/// increasing `mu`, without repeats. Starts with every sample and ends with
/// the empty set.
pub fn realizable_error_sets(bound: &BoundFunction) -> Vec<Vec<usize>> {
    let values = distinct_values(bound, 0.0);
    let mut sweep = vec![f64::NEG_INFINITY];
    for w in values.windows(2) {
        if w[1].is_finite() {
            sweep.push(0.5 * (w[0] + w[1]));
        }
    }
    sweep.extend(values.iter().copied());
    sweep.sort_by(f64::total_cmp);
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for mu in sweep {
        let e = error_set(bound, mu);
        if sets.last() != Some(&e) {
            sets.push(e);
        }
    }
    if sets.last().is_none_or(|e| !e.is_empty()) {
        sets.push(Vec::new());
    }
    sets
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ValidityMethod {
    Grid,
    Refined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ValidityVerdict {
    Valid,
    Invalid,
    Undetermined,
}

/// The check for one nonempty error set `{x : B(x) ≥ value}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ThresholdCheck {
    pub value: f64,
    /// Largest mean searched; the strict inequality is approached from below.
    pub mean_cap: f64,
    pub max_error_prob: f64,
    pub witness: Distribution,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ValidityReport {
    pub max_error_prob: f64,
    pub witness: Distribution,
    pub alpha: f64,
    pub method: ValidityMethod,
    pub resolution: u32,
    /// Grid discretization allowance used when judging a grid-only result.
    pub grid_slack: f64,
    pub verdict: ValidityVerdict,
    pub checks: Vec<ThresholdCheck>,
}

/// Largest probability of an error set over all distributions, checked one
/// candidate error set at a time.
///
/// For each distinct bound value `v > 0` the error set `{B ≥ v}` occurs for
/// every distribution with mean below `v`; its probability is maximized over
/// means up to `v - report_tol`. The grid pass scans all points `k / d` once.
/// With `refine`, each maximum is then polished by projected gradient ascent
/// started from the grid witness.
pub fn verify_validity(
    space: &SampleSpace,
    bound: &BoundFunction,
    alpha: f64,
    resolution: u32,
    refine: bool,
    config: &SolverConfig,
) -> Result<ValidityReport> {
    check_alpha(alpha)?;
    config.validate()?;
    bound.check_space(space)?;
    if resolution == 0 {
        return Err(Error::invalid("grid resolution must be at least 1"));
    }
    let m = space.support().len();
    let cells = grid_size(m, resolution);
    if cells > u128::from(config.grid_cap) {
        return Err(Error::CapExceeded {
            required: cells,
            cap: u128::from(config.grid_cap),
        });
    }
    let values = space.support().values();
    let top = space.support().max();

    // thresholds from largest to smallest value, so error sets grow
    let mut thresholds: Vec<f64> = distinct_values(bound, 0.0).into_iter().filter(|&v| v > 0.0).collect();
    thresholds.reverse();
    let caps: Vec<f64> = thresholds
        .iter()
        .map(|&v| {
            if v.is_infinite() {
                top
            } else {
                (v - config.report_tol).clamp(0.0, top)
            }
        })
        .collect();

    // samples by decreasing bound; E_j is a prefix of this order
    let mut order: Vec<usize> = (0..space.len()).collect();
    order.sort_by(|&a, &b| bound.values[b].total_cmp(&bound.values[a]).then(a.cmp(&b)));
    let prefix: Vec<usize> = thresholds
        .iter()
        .map(|&v| order.iter().take_while(|&&i| bound.values[i] >= v).count())
        .collect();

    let everything: Vec<usize> = (0..space.len()).collect();
    let full = build_subset_likelihood(space, &everything)?;
    let mut probs = vec![0.0; space.len()];
    let mut best = vec![-1.0f64; thresholds.len()];
    let mut best_at: Vec<Vec<f64>> = vec![Vec::new(); thresholds.len()];
    // among equal maxima keep the witness closest to the threshold
    let mut best_mean = vec![f64::NEG_INFINITY; thresholds.len()];
    let mut p = vec![0.0; m];
    let df = f64::from(resolution);
    for k in SimplexGrid::new(m, resolution) {
        for i in 0..m {
            p[i] = f64::from(k[i]) / df;
        }
        let mean = mean_of(&p, values);
        if thresholds.is_empty() || mean > caps[0] {
            continue;
        }
        full.term_values(&p, &mut probs);
        let mut acc = 0.0;
        let mut taken = 0;
        for j in 0..thresholds.len() {
            while taken < prefix[j] {
                acc += probs[order[taken]];
                taken += 1;
            }
            let a = acc.min(1.0);
            if mean <= caps[j] && (a > best[j] || (a == best[j] && mean > best_mean[j])) {
                best[j] = a;
                best_mean[j] = mean;
                best_at[j] = p.clone();
            }
        }
    }

    let mut checks = Vec::with_capacity(thresholds.len());
    for j in 0..thresholds.len() {
        let mut value = best[j].max(0.0);
        let mut witness = best_at[j].clone();
        if witness.is_empty() {
            witness = Distribution::zero(m).into_probs();
        }
        if refine {
            let members: Vec<usize> = order[..prefix[j]].to_vec();
            let lik = build_subset_likelihood(space, &members)?;
            let r = maximize_below_mean(space, &lik, caps[j], &[witness.clone()], config)?;
            if r.value > value {
                value = r.value;
                witness = r.argmax;
            }
        }
        checks.push(ThresholdCheck {
            value: thresholds[j],
            mean_cap: caps[j],
            max_error_prob: value,
            witness: Distribution::from_trusted(witness),
        });
    }

    let worst = checks
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |acc, (j, c)| match acc {
            Some((_, v)) if v >= c.max_error_prob => acc,
            _ => Some((j, c.max_error_prob)),
        });
    let (max_error_prob, witness) = match worst {
        Some((j, v)) => (v, checks[j].witness.clone()),
        None => (0.0, Distribution::zero(m)),
    };
    let n = f64::from(space.n());
    let grid_slack = n * (m as f64 - 1.0) / df;
    let verdict = if max_error_prob > alpha + config.report_tol {
        ValidityVerdict::Invalid
    } else if (refine && max_error_prob <= alpha + REFINED_SLACK) || max_error_prob + grid_slack <= alpha {
        ValidityVerdict::Valid
    } else {
        ValidityVerdict::Undetermined
    };
    Ok(ValidityReport {
        max_error_prob,
        witness,
        alpha,
        method: if refine {
            ValidityMethod::Refined
        } else {
            ValidityMethod::Grid
        },
        resolution,
        grid_slack,
        verdict,
        checks,
    })
}

/// Arithmetic allowance on `α` for refined maxima.
const REFINED_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CoverageReport {
    pub trials: u64,
    pub errors: u64,
    pub rate: f64,
    pub standard_error: f64,
    /// Mean of the sampling distribution.
    pub mean: f64,
}

/// Draw `trials` samples of size `n` from `dist` and count how often the
/// bound exceeds the true mean.
pub fn simulate_coverage(
    space: &SampleSpace,
    bound: &BoundFunction,
    dist: &Distribution,
    trials: u64,
    seed: u64,
) -> Result<CoverageReport> {
    bound.check_space(space)?;
    let m = space.support().len();
    if dist.len() != m {
        return Err(Error::invalid("distribution and support differ in length"));
    }
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let mean = dist.mean(space.support());
    let sampler = WeightedIndex::new(dist.probs()).map_err(|e| Error::invalid(format!("{e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u32; m];
    let mut errors = 0u64;
    for _ in 0..trials {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..space.n() {
            counts[sampler.sample(&mut rng)] += 1;
        }
        let idx = space
            .index_of(&counts)
            .ok_or_else(|| Error::invalid("drawn sample is missing from the space"))?;
        if bound.values[idx] > mean {
            errors += 1;
        }
    }
    let rate = errors as f64 / trials as f64;
    Ok(CoverageReport {
        trials,
        errors,
        rate,
        standard_error: math::sqrt(rate * (1.0 - rate) / trials as f64),
        mean,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Metric {
    SampleAligned,
    RankOrdered,
    ExpectedValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Relation {
    Dominates,
    Dominated,
    Equal,
    Incomparable,
}

/// Dirichlet prior over the simplex for the expected-value comparison. A
/// concentration of zero pins that coordinate at zero.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DirichletPrior {
    pub concentration: Vec<f64>,
    pub draws: u64,
    pub seed: u64,
}

impl DirichletPrior {
    pub fn symmetric(m: usize, concentration: f64, draws: u64, seed: u64) -> Self {
        DirichletPrior {
            concentration: vec![concentration; m],
            draws,
            seed,
        }
    }

    /// Uniform over the simplex with 10⁴ draws.
    pub fn uniform(m: usize, seed: u64) -> Self {
        DirichletPrior::symmetric(m, 1.0, 10_000, seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExpectedValues {
    pub a: f64,
    pub a_se: f64,
    pub b: f64,
    pub b_se: f64,
    /// Mean and standard error of the paired difference `E_F[A] - E_F[B]`.
    pub difference: f64,
    pub difference_se: f64,
    pub draws: u64,
    /// Some infinite bound had positive weight, making that expectation infinite.
    pub a_infinite: bool,
    pub b_infinite: bool,
    /// Infinite bounds were present but every one sat on a sample the prior never produces.
    pub infinite_ignored: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ComparisonResult {
    pub metric: Metric,
    pub relation: Relation,
    /// Where `a` is strictly larger: sample indices, or ranks for the rank-ordered metric.
    pub a_witnesses: Vec<usize>,
    /// Where `b` is strictly larger.
    pub b_witnesses: Vec<usize>,
    pub expected: Option<ExpectedValues>,
}

fn pointwise(a: &[f64], b: &[f64]) -> (Relation, Vec<usize>, Vec<usize>) {
    let aw: Vec<usize> = (0..a.len()).filter(|&i| a[i] > b[i]).collect();
    let bw: Vec<usize> = (0..a.len()).filter(|&i| b[i] > a[i]).collect();
    let rel = match (aw.is_empty(), bw.is_empty()) {
        (true, true) => Relation::Equal,
        (false, true) => Relation::Dominates,
        (true, false) => Relation::Dominated,
        (false, false) => Relation::Incomparable,
    };
    (rel, aw, bw)
}

/// Compare two bound functions; larger lower bounds are better.
/// `prior` is required for the expected-value metric and ignored otherwise.
pub fn compare(
    space: &SampleSpace,
    a: &BoundFunction,
    b: &BoundFunction,
    metric: Metric,
    prior: Option<&DirichletPrior>,
) -> Result<ComparisonResult> {
    a.check_space(space)?;
    b.check_space(space)?;
    match metric {
        Metric::SampleAligned => {
            let (relation, a_witnesses, b_witnesses) = pointwise(&a.values, &b.values);
            Ok(ComparisonResult {
                metric,
                relation,
                a_witnesses,
                b_witnesses,
                expected: None,
            })
        }
        Metric::RankOrdered => {
            let mut sa = a.values.clone();
            let mut sb = b.values.clone();
            sa.sort_by(f64::total_cmp);
            sb.sort_by(f64::total_cmp);
            let (relation, a_witnesses, b_witnesses) = pointwise(&sa, &sb);
            Ok(ComparisonResult {
                metric,
                relation,
                a_witnesses,
                b_witnesses,
                expected: None,
            })
        }
        Metric::ExpectedValue => {
            let prior = prior.ok_or_else(|| Error::invalid("the expected-value metric needs a prior"))?;
            let ev = expected_values(space, a, b, prior)?;
            let relation = if a.values == b.values {
                Relation::Equal
            } else if ev.a_infinite && ev.b_infinite {
                Relation::Incomparable
            } else if ev.difference > 0.0 {
                Relation::Dominates
            } else if ev.difference < 0.0 {
                Relation::Dominated
            } else {
                Relation::Equal
            };
            let (_, a_witnesses, b_witnesses) = pointwise(&a.values, &b.values);
            Ok(ComparisonResult {
                metric,
                relation,
                a_witnesses,
                b_witnesses,
                expected: Some(ev),
            })
        }
    }
}

fn mean_se(sum: f64, sum_sq: f64, k: f64) -> (f64, f64) {
    let mean = sum / k;
    if k < 2.0 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - sum * mean) / (k - 1.0)).max(0.0);
    (mean, math::sqrt(var / k))
}

fn expected_values(
    space: &SampleSpace,
    a: &BoundFunction,
    b: &BoundFunction,
    prior: &DirichletPrior,
) -> Result<ExpectedValues> {
    let m = space.support().len();
    if prior.concentration.len() != m {
        return Err(Error::invalid("prior concentration must have one entry per support value"));
    }
    if prior.concentration.iter().any(|&c| !(c >= 0.0 && c.is_finite())) || prior.concentration.iter().all(|&c| c == 0.0) {
        return Err(Error::invalid("prior concentrations must be non-negative and not all zero"));
    }
    if prior.draws == 0 {
        return Err(Error::invalid("at least one prior draw is required"));
    }
    // samples the prior can produce: only coordinates with positive concentration
    let reachable: Vec<bool> = space
        .samples()
        .iter()
        .map(|s| s.counts().iter().zip(&prior.concentration).all(|(&c, &w)| c == 0 || w > 0.0))
        .collect();
    let inf_a = (0..a.len()).any(|i| reachable[i] && a.values[i].is_infinite());
    let inf_b = (0..b.len()).any(|i| reachable[i] && b.values[i].is_infinite());
    let any_inf = a.values.iter().chain(&b.values).any(|v| v.is_infinite());
    let gammas: Vec<Option<Gamma<f64>>> = prior
        .concentration
        .iter()
        .map(|&c| if c > 0.0 { Gamma::new(c, 1.0).ok() } else { None })
        .collect();
    let everything: Vec<usize> = (0..space.len()).collect();
    let full = build_subset_likelihood(space, &everything)?;
    let mut rng = ChaCha8Rng::seed_from_u64(prior.seed);
    let mut probs = vec![0.0; space.len()];
    let mut f = vec![0.0; m];
    let (mut sa, mut sa2, mut sb, mut sb2, mut sd, mut sd2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..prior.draws {
        for (x, g) in f.iter_mut().zip(&gammas) {
            *x = g.as_ref().map_or(0.0, |g| g.sample(&mut rng));
        }
        let total: f64 = f.iter().sum();
        if total > 0.0 {
            f.iter_mut().for_each(|x| *x /= total);
        }
        full.term_values(&f, &mut probs);
        let (mut ea, mut eb) = (0.0, 0.0);
        for ((&w, &va), &vb) in probs.iter().zip(&a.values).zip(&b.values) {
            if w == 0.0 {
                continue;
            }
            if va.is_finite() {
                ea += va * w;
            }
            if vb.is_finite() {
                eb += vb * w;
            }
        }
        sa += ea;
        sa2 += ea * ea;
        sb += eb;
        sb2 += eb * eb;
        sd += ea - eb;
        sd2 += (ea - eb) * (ea - eb);
    }
    let k = prior.draws as f64;
    let (mut ma, mut sea) = mean_se(sa, sa2, k);
    let (mut mb, mut seb) = mean_se(sb, sb2, k);
    let (mut md, mut sed) = mean_se(sd, sd2, k);
    if inf_a {
        (ma, sea) = (f64::INFINITY, 0.0);
    }
    if inf_b {
        (mb, seb) = (f64::INFINITY, 0.0);
    }
    if inf_a || inf_b {
        md = match (inf_a, inf_b) {
            (true, false) => f64::INFINITY,
            (false, true) => f64::NEG_INFINITY,
            _ => 0.0,
        };
        sed = 0.0;
    }
    Ok(ExpectedValues {
        a: ma,
        a_se: sea,
        b: mb,
        b_se: seb,
        difference: md,
        difference_se: sed,
        draws: prior.draws,
        a_infinite: inf_a,
        b_infinite: inf_b,
        infinite_ignored: any_inf && !inf_a && !inf_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{compute_bound_table, standard_ordering, OrderingKind};
    use crate::lattice::{enumerate_sample_space, normalize_support};

    fn space(s: &[f64], n: u32) -> SampleSpace {
        enumerate_sample_space(&normalize_support(s).unwrap(), n).unwrap()
    }

    fn bf(v: &[f64]) -> BoundFunction {
        BoundFunction::new(v.to_vec(), "test").unwrap()
    }

    #[test]
    fn error_sets() {
        let b = bf(&[0.0, 0.226, 0.592]);
        assert_eq!(error_set(&b, 0.3), vec![2]);
        assert!(error_set(&b, 0.6).is_empty());
        assert_eq!(error_set(&b, -0.1), vec![0, 1, 2]);
        let b = bf(&[0.0, f64::INFINITY]);
        assert_eq!(error_set(&b, 1e300), vec![1]);
    }

    #[test]
    fn error_set_counts() {
        let a = 0.05f64;
        assert_eq!(count_possible_error_sets(&bf(&[0.0, 0.0, math::sqrt(a)]), 0.0), 3);
        assert_eq!(count_possible_error_sets(&bf(&[0.4; 6]), 0.0), 2);
        let inj: Vec<f64> = (0..15).map(|i| f64::from(i) * 0.1).collect();
        assert_eq!(count_possible_error_sets(&bf(&inj), 0.0), 16);
        assert_eq!(count_possible_error_sets(&bf(&[0.1, 0.1 + 1e-9, 0.5]), 1e-7), 3);
        assert_eq!(count_possible_error_sets(&bf(&[0.1, 0.1 + 1e-9, 0.5]), 0.0), 4);
    }

    #[test]
    fn sweep_finds_nested_sets() {
        let b = bf(&[0.3, 0.0, 0.3, f64::INFINITY, 0.7]);
        let sets = realizable_error_sets(&b);
        assert_eq!(sets.len(), count_possible_error_sets(&b, 0.0));
        assert_eq!(sets[0], vec![0, 1, 2, 3, 4]);
        assert_eq!(sets[1], vec![0, 2, 3, 4]);
        assert_eq!(sets[2], vec![3, 4]);
        assert_eq!(sets[3], vec![3]);
        assert!(sets[4].is_empty());
    }

    #[test]
    fn bound_file_parsing() {
        let b = parse_bound_function("0 0\n2 inf\n1 0.25\n", 3, "f").unwrap();
        assert_eq!(b.values(), &[0.0, 0.25, f64::INFINITY]);
        assert!(parse_bound_function("0 0\n1 0.25\n", 3, "f").is_err());
        assert!(parse_bound_function("0 0\n0 1\n1 1\n", 2, "f").is_err());
        assert!(parse_bound_function("0 nan\n", 1, "f").is_err());
        assert!(parse_bound_function("0 -inf\n", 1, "f").is_err());
    }

    #[test]
    fn validity_of_binomial_table() {
        let sp = space(&[0.0, 1.0], 2);
        let cfg = SolverConfig::default();
        let o = standard_ordering(&sp, &OrderingKind::SampleMean).unwrap();
        let t = compute_bound_table(&sp, &o, 0.35, &cfg).unwrap();
        let b = BoundFunction::from_table(&t);
        let r = verify_validity(&sp, &b, 0.35, 2000, true, &cfg).unwrap();
        assert_eq!(r.verdict, ValidityVerdict::Valid, "{r:?}");
        assert!(r.max_error_prob <= 0.35);
        assert!(r.max_error_prob > 0.349);
        for i in 0..3 {
            let raised = b.with_value(i, b.values()[i] + 1e-3).unwrap();
            let r = verify_validity(&sp, &raised, 0.35, 2000, true, &cfg).unwrap();
            assert_eq!(r.verdict, ValidityVerdict::Invalid, "entry {i}: {r:?}");
        }
    }

    #[test]
    fn zero_and_constant_bounds() {
        let sp = space(&[0.0, 1.0], 2);
        let cfg = SolverConfig::default();
        let r = verify_validity(&sp, &BoundFunction::constant(3, 0.0).unwrap(), 0.05, 100, false, &cfg).unwrap();
        assert_eq!(r.verdict, ValidityVerdict::Valid);
        assert_eq!(r.max_error_prob, 0.0);
        let r = verify_validity(&sp, &BoundFunction::constant(3, 0.5).unwrap(), 0.05, 100, false, &cfg).unwrap();
        assert_eq!(r.verdict, ValidityVerdict::Invalid);
        assert_eq!(r.max_error_prob, 1.0);
        assert!(r.witness.mean(sp.support()) < 0.5);
        assert!(r.witness.mean(sp.support()) > 0.48);
    }

    #[test]
    fn grid_cap_is_enforced() {
        let sp = space(&[0.0, 1.0, 2.0], 2);
        let cfg = SolverConfig {
            grid_cap: 100,
            ..SolverConfig::default()
        };
        let b = BoundFunction::constant(sp.len(), 0.0).unwrap();
        assert!(matches!(
            verify_validity(&sp, &b, 0.1, 50, false, &cfg),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn coverage_basics() {
        let sp = space(&[0.0, 1.0, 3.0], 3);
        let zero = BoundFunction::constant(sp.len(), 0.0).unwrap();
        let d = Distribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let r = simulate_coverage(&sp, &zero, &d, 1000, 7).unwrap();
        assert_eq!(r.errors, 0);
        let big = BoundFunction::constant(sp.len(), 10.0).unwrap();
        let r = simulate_coverage(&sp, &big, &d, 1000, 7).unwrap();
        assert_eq!(r.rate, 1.0);
        let a = simulate_coverage(&sp, &big, &d, 100, 3).unwrap();
        let b = simulate_coverage(&sp, &big, &d, 100, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn comparisons() {
        let sp = space(&[0.0, 1.0], 2);
        let a = bf(&[0.0, 0.2, 0.4]);
        let b = bf(&[0.0, 0.1, 0.4]);
        let r = compare(&sp, &a, &b, Metric::SampleAligned, None).unwrap();
        assert_eq!(r.relation, Relation::Dominates);
        assert_eq!(r.a_witnesses, vec![1]);
        let prior = DirichletPrior::uniform(2, 1);
        for metric in [Metric::SampleAligned, Metric::RankOrdered, Metric::ExpectedValue] {
            let r = compare(&sp, &a, &a, metric, Some(&prior)).unwrap();
            assert_eq!(r.relation, Relation::Equal);
        }
        let r = compare(&sp, &a, &b, Metric::ExpectedValue, Some(&prior)).unwrap();
        assert_eq!(r.relation, Relation::Dominates);
        let ev = r.expected.unwrap();
        // E[2p(1-p)] = 1/3 under the uniform prior, times the 0.1 gap
        assert!((ev.difference - 0.1 / 3.0).abs() < 3.0 * ev.difference_se + 1e-3);
        assert!(compare(&sp, &a, &b, Metric::ExpectedValue, None).is_err());
        let short = bf(&[0.0, 0.1]);
        assert!(compare(&sp, &a, &short, Metric::SampleAligned, None).is_err());
    }

    #[test]
    fn rank_order_ignores_positions() {
        let sp = space(&[0.0, 1.0], 2);
        let a = bf(&[0.0, 0.5, 0.2]);
        let b = bf(&[0.0, 0.2, 0.5]);
        assert_eq!(compare(&sp, &a, &b, Metric::SampleAligned, None).unwrap().relation, Relation::Incomparable);
        assert_eq!(compare(&sp, &a, &b, Metric::RankOrdered, None).unwrap().relation, Relation::Equal);
    }

    #[test]
    fn infinite_expectations() {
        let sp = space(&[0.0, 1.0], 2);
        let a = bf(&[0.0, 0.2, f64::INFINITY]);
        let b = bf(&[0.0, 0.1, 0.4]);
        let r = compare(&sp, &a, &b, Metric::ExpectedValue, Some(&DirichletPrior::uniform(2, 1))).unwrap();
        assert!(r.expected.as_ref().unwrap().a_infinite);
        assert_eq!(r.relation, Relation::Dominates);
        // a prior that never puts mass on 1 only produces the sample (0,0)
        let pinned = DirichletPrior {
            concentration: vec![1.0, 0.0],
            draws: 100,
            seed: 1,
        };
        let r = compare(&sp, &a, &b, Metric::ExpectedValue, Some(&pinned)).unwrap();
        let ev = r.expected.unwrap();
        assert!(ev.infinite_ignored && !ev.a_infinite);
        assert_eq!(ev.a, 0.0);
    }
}
