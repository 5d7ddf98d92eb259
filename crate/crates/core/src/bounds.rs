//! Order-conditioned bound tables and their admissibility.
//!
//! An ordering of the sample space fixes, for every position `k`, the upper
//! set `Ω_k = {x_{t_k}, …, x_{t_N}}`. The bound at position `k` is the
//! solution of the central problem for `Ω_k`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::lattice::SampleSpace;
use crate::solver::{check_alpha, solve_central, CentralProblem, SolveResult, SolverConfig};
use crate::likelihood::Distribution;
use crate::{Error, Result};

/// A permutation of the lexicographic sample indices. `perm[k]` is the
/// sample at position `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Ordering {
    perm: Vec<usize>,
    label: String,
}

impl Ordering {
    pub fn from_perm(perm: Vec<usize>, label: impl Into<String>) -> Result<Self> {
        let n = perm.len();
        let mut seen = alloc::vec![false; n];
        for &i in &perm {
            if i >= n {
                return Err(Error::invalid(format!(
                    "ordering entry {i} is out of range for {n} samples"
                )));
            }
            if seen[i] {
                return Err(Error::invalid(format!("ordering repeats sample {i}")));
            }
            seen[i] = true;
        }
        Ok(Ordering {
            perm,
            label: label.into(),
        })
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Position of every sample: `positions()[perm[k]] == k`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = alloc::vec![0; self.perm.len()];
        for (k, &i) in self.perm.iter().enumerate() {
            pos[i] = k;
        }
        pos
    }

    /// The ordering does not start with the all-minimum sample.
    pub fn is_degenerate(&self) -> bool {
        self.perm.first().is_some_and(|&i| i != 0)
    }

    /// Members of the upper set at position `k`, sorted.
    pub fn upper_set(&self, k: usize) -> Vec<usize> {
        let mut members = self.perm[k..].to_vec();
        members.sort_unstable();
        members
    }

    /// The ordering with positions `k` and `k + 1` exchanged.
    pub fn swap_adjacent(&self, k: usize) -> Ordering {
        let mut perm = self.perm.clone();
        perm.swap(k, k + 1);
        Ordering {
            perm,
            label: format!("{}+swap{}", self.label, k),
        }
    }

    fn check_space(&self, space: &SampleSpace) -> Result<()> {
        if self.perm.len() != space.len() {
            return Err(Error::invalid(format!(
                "ordering has {} entries but the sample space has {}",
                self.perm.len(),
                space.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderingKind {
    /// Identity permutation.
    Lexicographic,
    /// Ascending sample mean, ties broken lexicographically.
    SampleMean,
    /// The given ordering read backwards.
    ReverseOf(Ordering),
}

pub fn standard_ordering(space: &SampleSpace, kind: &OrderingKind) -> Result<Ordering> {
    let n = space.len();
    match kind {
        OrderingKind::Lexicographic => Ordering::from_perm((0..n).collect(), "lex"),
        OrderingKind::SampleMean => {
            let means: Vec<f64> = (0..n).map(|i| space.sample_mean(i)).collect();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.sort_by(|&a, &b| means[a].total_cmp(&means[b]).then(a.cmp(&b)));
            Ordering::from_perm(perm, "mean")
        }
        OrderingKind::ReverseOf(base) => {
            base.check_space(space)?;
            let mut perm = base.perm.clone();
            perm.reverse();
            Ordering::from_perm(perm, format!("reverse({})", base.label))
        }
    }
}

/// Parse whitespace-separated 0-based indices, as found in an order file.
pub fn parse_ordering(text: &str, space: &SampleSpace, label: &str) -> Result<Ordering> {
    let perm = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::invalid(format!("ordering entry {t:?} is not an index")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let ord = Ordering::from_perm(perm, label)?;
    ord.check_space(space)?;
    Ok(ord)
}

/// Solutions keyed by upper-set membership, valid for one space, `α` and
/// solver configuration.
#[derive(Debug, Clone)]
pub struct SolveCache {
    alpha: f64,
    entries: BTreeMap<Vec<usize>, SolveResult>,
}

impl SolveCache {
    pub fn new(alpha: f64) -> Self {
        SolveCache {
            alpha,
            entries: BTreeMap::new(),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn get(&self, members: &[usize]) -> Option<&SolveResult> {
        self.entries.get(members)
    }

    /// `members` must be sorted.
    pub fn insert(&mut self, members: Vec<usize>, result: SolveResult) {
        self.entries.insert(members, result);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Solve the central problem for `members` (sorted), reusing a stored result.
    pub fn solve(
        &mut self,
        space: &SampleSpace,
        members: &[usize],
        config: &SolverConfig,
    ) -> Result<SolveResult> {
        if let Some(r) = self.entries.get(members) {
            return Ok(r.clone());
        }
        let r = solve_members(space, members, self.alpha, config)?;
        self.entries.insert(members.to_vec(), r.clone());
        Ok(r)
    }
}

pub fn solve_members(
    space: &SampleSpace,
    members: &[usize],
    alpha: f64,
    config: &SolverConfig,
) -> Result<SolveResult> {
    let problem = CentralProblem::new(space, members, alpha)?;
    solve_central(&problem, config)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundEntry {
    /// Lexicographic index of the sample at this position.
    pub sample: usize,
    /// `f64::INFINITY` when the likely set is empty.
    pub bound: f64,
    pub argmin: Option<Distribution>,
    pub on_boundary: bool,
}

impl BoundEntry {
    pub fn from_result(sample: usize, r: SolveResult) -> Self {
        BoundEntry {
            sample,
            bound: r.bound,
            argmin: r.argmin,
            on_boundary: r.on_boundary,
        }
    }
}

/// Bounds for every position of an ordering, in position order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundTable {
    pub ordering: Ordering,
    pub alpha: f64,
    pub entries: Vec<BoundEntry>,
}

impl BoundTable {
    pub fn from_entries(ordering: Ordering, alpha: f64, entries: Vec<BoundEntry>) -> Result<Self> {
        if entries.len() != ordering.len() {
            return Err(Error::invalid("one entry per position is required"));
        }
        if entries.iter().zip(ordering.perm()).any(|(e, &s)| e.sample != s) {
            return Err(Error::invalid("entries do not follow the ordering"));
        }
        Ok(BoundTable {
            ordering,
            alpha,
            entries,
        })
    }

    /// Bound values in position order.
    pub fn bounds(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.bound).collect()
    }

    /// Bound values indexed by lexicographic sample index.
    pub fn by_sample(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.entries.len()];
        for e in &self.entries {
            out[e.sample] = e.bound;
        }
        out
    }

    /// Bounds never decrease along the ordering, up to `tol`.
    pub fn is_order_consistent(&self, tol: f64) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[1].bound >= w[0].bound - tol || w[0].bound == w[1].bound)
    }
}

/// Solve the position-`k` upper set of `ordering`.
pub fn solve_position(
    space: &SampleSpace,
    ordering: &Ordering,
    k: usize,
    alpha: f64,
    config: &SolverConfig,
) -> Result<BoundEntry> {
    let r = solve_members(space, &ordering.upper_set(k), alpha, config).map_err(|e| e.at_position(k))?;
    Ok(BoundEntry::from_result(ordering.perm()[k], r))
}

pub fn compute_bound_table(
    space: &SampleSpace,
    ordering: &Ordering,
    alpha: f64,
    config: &SolverConfig,
) -> Result<BoundTable> {
    let mut cache = SolveCache::new(alpha);
    compute_bound_table_cached(space, ordering, config, &mut cache)
}

/// As `compute_bound_table`, at the cache's `α`.
pub fn compute_bound_table_cached(
    space: &SampleSpace,
    ordering: &Ordering,
    config: &SolverConfig,
    cache: &mut SolveCache,
) -> Result<BoundTable> {
    check_alpha(cache.alpha)?;
    ordering.check_space(space)?;
    let mut entries = Vec::with_capacity(ordering.len());
    for k in 0..ordering.len() {
        let r = cache
            .solve(space, &ordering.upper_set(k), config)
            .map_err(|e| e.at_position(k))?;
        entries.push(BoundEntry::from_result(ordering.perm()[k], r));
    }
    BoundTable::from_entries(ordering.clone(), cache.alpha, entries)
}

/// Positions `start..=end` (0-based) carrying the same bound value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TieCluster {
    pub start: usize,
    pub end: usize,
}

impl TieCluster {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Values equal within `tol`, with infinity equal only to itself.
pub fn tied(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol
}

/// Maximal runs of consecutive positions whose bounds pairwise differ by at
/// most `tie_tol`. Runs of length one are not reported.
pub fn detect_ties(table: &BoundTable, tie_tol: f64) -> Vec<TieCluster> {
    let b = table.bounds();
    let mut out = Vec::new();
    let mut start = 0;
    let (mut lo, mut hi) = (f64::NAN, f64::NAN);
    for (k, &v) in b.iter().enumerate() {
        let fits = k > start && tied(v, lo, tie_tol) && tied(v, hi, tie_tol);
        if k == start || fits {
            lo = if k == start { v } else { lo.min(v) };
            hi = if k == start { v } else { hi.max(v) };
            continue;
        }
        if k - start > 1 {
            out.push(TieCluster { start, end: k - 1 });
        }
        start = k;
        lo = v;
        hi = v;
    }
    if b.len() - start > 1 {
        out.push(TieCluster {
            start,
            end: b.len() - 1,
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Breakability {
    Breakable,
    Unbreakable,
    Undetermined,
}

/// Verdict for the tied pair at positions `position` and `position + 1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PairVerdict {
    pub position: usize,
    pub verdict: Breakability,
    /// Bound of the later position after the swap, when it was computed.
    pub swapped_bound: Option<f64>,
}

/// Swap each adjacent pair of the cluster and re-solve the one upper set that changes.
pub fn test_breakability(
    space: &SampleSpace,
    table: &BoundTable,
    cluster: TieCluster,
    config: &SolverConfig,
) -> Vec<PairVerdict> {
    let mut cache = SolveCache::new(table.alpha);
    test_breakability_cached(space, table, cluster, config, &mut cache)
}

pub fn test_breakability_cached(
    space: &SampleSpace,
    table: &BoundTable,
    cluster: TieCluster,
    config: &SolverConfig,
    cache: &mut SolveCache,
) -> Vec<PairVerdict> {
    let perm = table.ordering.perm();
    let mut out = Vec::new();
    for k in cluster.start..cluster.end.min(perm.len().saturating_sub(1)) {
        let tied_value = table.entries[k + 1].bound;
        // a finite tie is impossible when the later set's argmin is interior
        let later = &table.entries[k + 1];
        let interior = later.bound.is_finite()
            && later
                .argmin
                .as_ref()
                .is_some_and(|a| !a.on_boundary(config.interior_eps));
        if interior {
            out.push(PairVerdict {
                position: k,
                verdict: Breakability::Undetermined,
                swapped_bound: None,
            });
            continue;
        }
        let mut members: Vec<usize> = perm[k + 2..].to_vec();
        members.push(perm[k]);
        members.sort_unstable();
        let (verdict, swapped_bound) = match cache.solve(space, &members, config) {
            Err(_) => (Breakability::Undetermined, None),
            Ok(r) => {
                let v = if tied(r.bound, tied_value, config.tie_tol) {
                    Breakability::Unbreakable
                } else if r.bound > tied_value {
                    Breakability::Breakable
                } else {
                    Breakability::Undetermined
                };
                (v, Some(r.bound))
            }
        };
        out.push(PairVerdict {
            position: k,
            verdict,
            swapped_bound,
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Verdict {
    Admissible,
    Inadmissible,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AdmissibilityReport {
    pub injective: bool,
    pub degenerate: bool,
    pub tie_clusters: Vec<TieCluster>,
    pub breakability: Vec<PairVerdict>,
    pub verdict: Verdict,
}

fn decide(degenerate: bool, injective: bool, pairs: &[PairVerdict]) -> Verdict {
    if degenerate || pairs.iter().any(|p| p.verdict == Breakability::Breakable) {
        Verdict::Inadmissible
    } else if injective || pairs.iter().all(|p| p.verdict == Breakability::Unbreakable) {
        Verdict::Admissible
    } else {
        Verdict::Undetermined
    }
}

/// Full report for a computed table: ties, every breakability test, verdict.
pub fn classify_table(space: &SampleSpace, table: &BoundTable, config: &SolverConfig) -> AdmissibilityReport {
    let mut cache = SolveCache::new(table.alpha);
    classify_table_cached(space, table, config, &mut cache)
}

pub fn classify_table_cached(
    space: &SampleSpace,
    table: &BoundTable,
    config: &SolverConfig,
    cache: &mut SolveCache,
) -> AdmissibilityReport {
    let degenerate = table.ordering.is_degenerate();
    let tie_clusters = detect_ties(table, config.tie_tol);
    let breakability: Vec<PairVerdict> = tie_clusters
        .iter()
        .flat_map(|&c| test_breakability_cached(space, table, c, config, cache))
        .collect();
    let injective = tie_clusters.is_empty();
    AdmissibilityReport {
        injective,
        degenerate,
        verdict: decide(degenerate, injective, &breakability),
        tie_clusters,
        breakability,
    }
}

/// Classify the conditionally optimal bound of `ordering`.
///
/// A degenerate ordering is rejected before any solving. Its report then
/// lists only the vacuous prefix of zero bounds as a tie. Solver failures
/// turn into an undetermined verdict.
pub fn classify_admissibility(
    space: &SampleSpace,
    ordering: &Ordering,
    alpha: f64,
    config: &SolverConfig,
) -> Result<AdmissibilityReport> {
    check_alpha(alpha)?;
    ordering.check_space(space)?;
    if ordering.is_degenerate() {
        let zero_at = ordering.positions()[space.zero_index()];
        return Ok(AdmissibilityReport {
            injective: false,
            degenerate: true,
            tie_clusters: alloc::vec![TieCluster {
                start: 0,
                end: zero_at
            }],
            breakability: Vec::new(),
            verdict: Verdict::Inadmissible,
        });
    }
    let mut cache = SolveCache::new(alpha);
    match compute_bound_table_cached(space, ordering, config, &mut cache) {
        Ok(table) => Ok(classify_table_cached(space, &table, config, &mut cache)),
        Err(Error::NonConvergence { .. }) => Ok(AdmissibilityReport {
            injective: false,
            degenerate: false,
            tie_clusters: Vec::new(),
            breakability: Vec::new(),
            verdict: Verdict::Undetermined,
        }),
        Err(e) => Err(e),
    }
}

/// `(N - 1)!`, or `None` on overflow.
pub fn admissible_cap_required(n: usize) -> Option<u128> {
    (1..n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AdmissibleBound {
    pub ordering: Ordering,
    pub table: BoundTable,
    pub report: AdmissibilityReport,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Enumeration {
    /// Orderings examined, all starting with the all-minimum sample.
    pub orderings: u128,
    /// Distinct admissible bound functions, first ordering found for each.
    pub admissible: Vec<AdmissibleBound>,
    /// Orderings whose verdict could not be settled.
    pub undetermined: usize,
}

/// Every ordering that starts with the all-minimum sample, classified, with
/// admissible bound functions deduplicated within `tie_tol`.
pub fn enumerate_admissible(
    space: &SampleSpace,
    alpha: f64,
    config: &SolverConfig,
    cap: u128,
) -> Result<Enumeration> {
    let mut cache = SolveCache::new(alpha);
    enumerate_admissible_cached(space, config, cap, &mut cache)
}

pub fn enumerate_admissible_cached(
    space: &SampleSpace,
    config: &SolverConfig,
    cap: u128,
    cache: &mut SolveCache,
) -> Result<Enumeration> {
    check_alpha(cache.alpha)?;
    config.validate()?;
    let n = space.len();
    let required = admissible_cap_required(n).unwrap_or(u128::MAX);
    if required > cap {
        return Err(Error::CapExceeded { required, cap });
    }
    let mut out = Enumeration {
        orderings: 0,
        admissible: Vec::new(),
        undetermined: 0,
    };
    let mut rest: Vec<usize> = (1..n).collect();
    loop {
        let mut perm = Vec::with_capacity(n);
        perm.push(space.zero_index());
        perm.extend_from_slice(&rest);
        let ordering = Ordering::from_perm(perm, format!("enum{}", out.orderings))?;
        out.orderings += 1;
        match compute_bound_table_cached(space, &ordering, config, cache) {
            Ok(table) => {
                let report = classify_table_cached(space, &table, config, cache);
                match report.verdict {
                    Verdict::Admissible => {
                        let values = table.by_sample();
                        let dup = out.admissible.iter().any(|a| {
                            a.table
                                .by_sample()
                                .iter()
                                .zip(&values)
                                .all(|(x, y)| tied(*x, *y, config.tie_tol))
                        });
                        if !dup {
                            out.admissible.push(AdmissibleBound {
                                ordering,
                                table,
                                report,
                            });
                        }
                    }
                    Verdict::Undetermined => out.undetermined += 1,
                    Verdict::Inadmissible => {}
                }
            }
            Err(Error::NonConvergence { .. }) => out.undetermined += 1,
            Err(e) => return Err(e),
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    Ok(out)
}

/// Advance to the next permutation in lexicographic order; false after the last.
pub fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Verdict::Admissible => "admissible",
            Verdict::Inadmissible => "inadmissible",
            Verdict::Undetermined => "undetermined",
        };
        f.write_str(s)
    }
}

impl core::fmt::Display for Breakability {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Breakability::Breakable => "breakable",
            Breakability::Unbreakable => "unbreakable",
            Breakability::Undetermined => "undetermined",
        };
        f.write_str(s)
    }
}

impl Ordering {
    /// Comma-free rendering used in labels and logs.
    pub fn describe(&self) -> String {
        let mut s = self.label.to_string();
        s.push(':');
        for (k, i) in self.perm.iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            s.push_str(&format!("{i}"));
        }
        s
    }
}
