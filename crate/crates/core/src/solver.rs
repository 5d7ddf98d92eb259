//! The central optimization problem: the least mean over the closure of
//! `{F : Prob_F(Ω_k) > α}`, together with two independent oracles.
//!
//! `solve_central` bisects on a target mean `t`. At each `t` it asks whether
//! the upper-set likelihood reaches `α` somewhere in `{p : s·p ≤ t}`, using
//! projected gradient ascent from many starts. The best attainable
//! likelihood is nondecreasing in `t`, so bisection is sound. Starts are
//! carried from one bisection step to the next.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::lattice::SampleSpace;
use crate::likelihood::{build_subset_likelihood, grid_size, mean_of, Distribution, SimplexGrid, SubsetLikelihood};
use crate::math;
use crate::simplex::{ascend, AscentParams, Face, Polytope};
use crate::{Error, Result};

/// Excess over `α` that counts as strict exceedance when testing feasibility
/// of the whole simplex.
const STRICT_EPS: f64 = 1e-12;
/// Radius of the local probe used when the maximum only touches `α`.
const TOUCH_RADIUS: f64 = 1e-6;
/// An unconverged start this close to `α` makes an infeasible verdict unsafe.
const UNCONVERGED_MARGIN: f64 = 1e-6;

/// Numerical settings shared by the solver, the table builder and the
/// validity checker.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverConfig {
    /// Seed for the random interior starts.
    pub seed: u64,
    /// Starts on the full simplex: structured ones first, random interior points fill the rest.
    pub starts: usize,
    /// Final width of the bisection on the mean.
    pub mean_tol: f64,
    /// Band below `α` inside which a maximum is treated as touching `α`.
    pub constraint_tol: f64,
    /// Coordinates at or below this count as zero when classifying argmins.
    pub interior_eps: f64,
    /// Iteration budget per ascent.
    pub max_iters: usize,
    /// Largest barycentric grid the oracles and validity checks will scan.
    pub grid_cap: u64,
    /// Bound values closer than this are ties.
    pub tie_tol: f64,
    /// Margin used when approaching strict inequalities in validity checks.
    pub report_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0x5eed_0b0d,
            starts: 16,
            mean_tol: 1e-9,
            constraint_tol: 1e-10,
            interior_eps: 1e-7,
            max_iters: 10_000,
            grid_cap: 10_000_000,
            tie_tol: 1e-7,
            report_tol: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mean_tol", self.mean_tol),
            ("constraint_tol", self.constraint_tol),
            ("interior_eps", self.interior_eps),
            ("tie_tol", self.tie_tol),
            ("report_tol", self.report_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive and finite")));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        Ok(())
    }

    fn ascent(&self, target: Option<f64>) -> AscentParams {
        AscentParams {
            max_iters: self.max_iters,
            grad_tol: 1e-11,
            target,
        }
    }
}

/// One instance of the central problem: an upper set and a level `α`.
#[derive(Debug, Clone)]
pub struct CentralProblem<'a> {
    space: &'a SampleSpace,
    upper_set: SubsetLikelihood,
    alpha: f64,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

impl<'a> CentralProblem<'a> {
    /// `members` are lexicographic sample indices forming the upper set.
    pub fn new(space: &'a SampleSpace, members: &[usize], alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if members.is_empty() {
            return Err(Error::invalid("the upper set must not be empty"));
        }
        let upper_set = build_subset_likelihood(space, members)?;
        Ok(CentralProblem {
            space,
            upper_set,
            alpha,
        })
    }

    pub fn space(&self) -> &SampleSpace {
        self.space
    }

    pub fn upper_set(&self) -> &SubsetLikelihood {
        &self.upper_set
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Diagnostics {
    /// False when the answer followed from the upper set containing `0`.
    pub numerics_invoked: bool,
    pub bisection_steps: usize,
    pub ascent_iterations: usize,
    pub starts: usize,
    /// Upper-set likelihood at the argmin, or the best value found when infeasible.
    pub best_constraint: f64,
    /// The maximum over the simplex only touched `α` without a strict exceedance nearby.
    pub touching: bool,
    pub unconverged_starts: usize,
}

/// Solution of the central problem. `bound` is `f64::INFINITY` when the
/// likely set is empty.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolveResult {
    pub bound: f64,
    pub argmin: Option<Distribution>,
    pub feasible: bool,
    pub on_boundary: bool,
    pub diagnostics: Diagnostics,
}

impl SolveResult {
    fn infeasible(diagnostics: Diagnostics) -> Self {
        SolveResult {
            bound: f64::INFINITY,
            argmin: None,
            feasible: false,
            on_boundary: false,
            diagnostics,
        }
    }

    fn at(argmin: Vec<f64>, values: &[f64], eps: f64, diagnostics: Diagnostics) -> Self {
        let bound = mean_of(&argmin, values).max(0.0);
        let on_boundary = argmin.iter().any(|&p| p <= eps);
        SolveResult {
            bound,
            argmin: Some(Distribution::from_trusted(argmin)),
            feasible: true,
            on_boundary,
            diagnostics,
        }
    }
}

struct Start {
    face: Face,
    point: Vec<f64>,
    converged: bool,
}

/// Starts carried across bisection steps.
struct Population {
    starts: Vec<Start>,
}

impl Population {
    fn new(m: usize, values: &[f64], config: &SolverConfig) -> Self {
        let full: Face = (0..m).collect();
        let mut points: Vec<Vec<f64>> = Vec::new();
        points.push(vec![1.0 / m as f64; m]);
        for i in 0..m {
            let mut v = vec![0.0; m];
            v[i] = 1.0;
            points.push(v);
        }
        for i in 0..m {
            for j in i + 1..m {
                let mut v = vec![0.0; m];
                v[i] = 0.5;
                v[j] = 0.5;
                points.push(v);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        while points.len() < config.starts {
            let mut v: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let total: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= total);
            points.push(v);
        }
        let mut starts: Vec<Start> = points
            .into_iter()
            .map(|point| Start {
                face: full.clone(),
                point,
                converged: false,
            })
            .collect();
        // every proper face, from edges and larger down to vertices
        if m > 1 {
            for mask in 1u64..(1u64 << m) - 1 {
                let face: Face = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
                let mut point = vec![0.0; m];
                for &i in &face {
                    point[i] = 1.0 / face.len() as f64;
                }
                starts.push(Start {
                    face,
                    point,
                    converged: false,
                });
            }
        }
        let _ = values;
        Population { starts }
    }
}

/// Result of one feasibility probe at a mean cap.
struct Probe {
    witness: Option<Vec<f64>>,
    best_value: f64,
    best_point: Option<Vec<f64>>,
    iterations: usize,
    unconverged_near: bool,
    unconverged: usize,
}

fn probe(
    lik: &SubsetLikelihood,
    values: &[f64],
    cap: f64,
    pop: &mut Population,
    target: Option<f64>,
    near: f64,
    config: &SolverConfig,
) -> Probe {
    let poly = Polytope { values, cap };
    let mut out = Probe {
        witness: None,
        best_value: f64::NEG_INFINITY,
        best_point: None,
        iterations: 0,
        unconverged_near: false,
        unconverged: 0,
    };
    let params = config.ascent(target);
    let consider = |res: &crate::simplex::Ascent, point: &[f64], out: &mut Probe| {
        out.iterations += res.iterations;
        if res.value > out.best_value {
            out.best_value = res.value;
            out.best_point = Some(point.to_vec());
        }
        if !res.converged && !res.reached_target {
            out.unconverged += 1;
            if res.value > near - UNCONVERGED_MARGIN {
                out.unconverged_near = true;
            }
        }
        if res.reached_target && out.witness.is_none() {
            out.witness = Some(point.to_vec());
        }
    };

    for start in pop.starts.iter_mut() {
        if !poly.face_reachable(&start.face) {
            continue;
        }
        let res = ascend(lik, &start.face, poly, &mut start.point, params);
        start.converged = res.converged;
        consider(&res, &start.point, &mut out);
        if out.witness.is_some() {
            return out;
        }
    }

    // vertices of the polytope on the cap hyperplane, fresh at every cap
    let m = values.len();
    let full: Face = (0..m).collect();
    for i in 0..m {
        for j in 0..m {
            if !(values[i] < cap && cap < values[j]) {
                continue;
            }
            let w = (values[j] - cap) / (values[j] - values[i]);
            let mut point = vec![0.0; m];
            point[i] = w;
            point[j] = 1.0 - w;
            let res = ascend(lik, &full, poly, &mut point, params);
            consider(&res, &point, &mut out);
            if out.witness.is_some() {
                return out;
            }
        }
    }
    out
}

/// Least mean over the likely set of the upper set, or `+∞` when it is empty.
pub fn solve_central(problem: &CentralProblem<'_>, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let space = problem.space;
    let lik = &problem.upper_set;
    let alpha = problem.alpha;
    let m = space.support().len();
    let values = space.support().values();

    // Any set holding the all-minimum sample has probability 1 at F_0.
    if lik.contains(space.zero_index()) {
        let argmin = Distribution::zero(m);
        let on_boundary = m > 1;
        return Ok(SolveResult {
            bound: 0.0,
            argmin: Some(argmin),
            feasible: true,
            on_boundary,
            diagnostics: Diagnostics {
                numerics_invoked: false,
                best_constraint: 1.0,
                ..Diagnostics::default()
            },
        });
    }

    let mut diag = Diagnostics {
        numerics_invoked: true,
        ..Diagnostics::default()
    };
    let mut pop = Population::new(m, values, config);
    diag.starts = pop.starts.len();

    // Is the likely set empty? Look for a strict exceedance anywhere.
    let top = space.support().max();
    let global = probe(lik, values, top, &mut pop, Some(alpha + STRICT_EPS), alpha, config);
    diag.ascent_iterations += global.iterations;
    diag.unconverged_starts += global.unconverged;
    let mut witness = match global.witness {
        Some(w) => w,
        None => {
            diag.best_constraint = global.best_value;
            if global.best_value < alpha - config.constraint_tol {
                if global.unconverged_near {
                    return Err(Error::NonConvergence {
                        position: None,
                        best_feasible: None,
                    });
                }
                return Ok(SolveResult::infeasible(diag));
            }
            match global
                .best_point
                .as_deref()
                .and_then(|p| touch_probe(lik, p, alpha))
            {
                Some(w) => w,
                None => {
                    diag.touching = true;
                    return Ok(SolveResult::infeasible(diag));
                }
            }
        }
    };

    // Bisection on the mean: `lo` infeasible, `hi` attained by `witness`.
    let mut lo = 0.0;
    let mut hi = mean_of(&witness, values);
    while hi - lo > config.mean_tol {
        let mid = 0.5 * (lo + hi);
        diag.bisection_steps += 1;
        let res = probe(lik, values, mid, &mut pop, Some(alpha), alpha, config);
        diag.ascent_iterations += res.iterations;
        diag.unconverged_starts += res.unconverged;
        match res.witness {
            Some(w) => {
                hi = mean_of(&w, values).min(mid);
                witness = w;
            }
            None => {
                if res.unconverged_near {
                    return Err(Error::NonConvergence {
                        position: None,
                        best_feasible: Some(hi),
                    });
                }
                lo = mid;
            }
        }
    }
    diag.best_constraint = lik.value(&witness);
    Ok(SolveResult::at(witness, values, config.interior_eps, diag))
}

// Look for a strict exceedance of α in a small neighbourhood of `p`.
fn touch_probe(lik: &SubsetLikelihood, p: &[f64], alpha: f64) -> Option<Vec<f64>> {
    let m = p.len();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let shift = TOUCH_RADIUS.min(p[j]);
            if shift <= 0.0 {
                continue;
            }
            let mut q = p.to_vec();
            q[i] += shift;
            q[j] -= shift;
            if lik.value(&q) > alpha + STRICT_EPS {
                return Some(q);
            }
        }
    }
    None
}

/// Largest value of a subset likelihood over `{F : μ(F) ≤ cap}`, with the
/// distribution attaining it. Extra starting points may be supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedMax {
    pub value: f64,
    pub argmax: Vec<f64>,
    /// Every ascent settled within the iteration budget.
    pub converged: bool,
}

pub fn maximize_below_mean(
    space: &SampleSpace,
    lik: &SubsetLikelihood,
    cap: f64,
    extra_starts: &[Vec<f64>],
    config: &SolverConfig,
) -> Result<ConstrainedMax> {
    config.validate()?;
    let m = space.support().len();
    let values = space.support().values();
    if lik.dim() != m {
        return Err(Error::invalid("likelihood and sample space disagree on the support"));
    }
    if cap < 0.0 {
        return Err(Error::invalid("no distribution has a negative mean"));
    }
    let mut pop = Population::new(m, values, config);
    for p in extra_starts {
        if p.len() == m {
            pop.starts.push(Start {
                face: (0..m).collect(),
                point: p.clone(),
                converged: false,
            });
        }
    }
    let res = probe(lik, values, cap, &mut pop, None, f64::INFINITY, config);
    let argmax = res.best_point.unwrap_or_else(|| Distribution::zero(m).into_probs());
    Ok(ConstrainedMax {
        value: res.best_value.max(0.0),
        argmax,
        converged: res.unconverged == 0,
    })
}

/// Brute-force oracle: the least mean over grid distributions `k / d` whose
/// upper-set likelihood is at least `α`. Never below the true optimum by
/// more than rounding; above it by `O(1/d)`.
pub fn grid_oracle(problem: &CentralProblem<'_>, d: u32, config: &SolverConfig) -> Result<SolveResult> {
    let space = problem.space;
    let m = space.support().len();
    if m > 5 {
        return Err(Error::invalid(format!(
            "the grid oracle supports at most 5 support values, got {m}"
        )));
    }
    if d == 0 {
        return Err(Error::invalid("grid resolution must be at least 1"));
    }
    let cells = grid_size(m, d);
    if cells > u128::from(config.grid_cap) {
        return Err(Error::CapExceeded {
            required: cells,
            cap: u128::from(config.grid_cap),
        });
    }
    let values = space.support().values();
    let lik = &problem.upper_set;
    let df = f64::from(d);
    let mut best = f64::INFINITY;
    let mut best_point: Option<Vec<f64>> = None;
    let mut best_value = 0.0f64;
    let mut p = vec![0.0; m];
    for k in SimplexGrid::new(m, d) {
        let mut mean = 0.0;
        for i in 0..m {
            p[i] = f64::from(k[i]) / df;
            mean += p[i] * values[i];
        }
        if mean >= best {
            continue;
        }
        let v = lik.value(&p);
        if v >= problem.alpha {
            best = mean;
            best_point = Some(p.clone());
            best_value = v;
        }
    }
    let diag = Diagnostics {
        numerics_invoked: true,
        best_constraint: best_value,
        starts: 0,
        ..Diagnostics::default()
    };
    Ok(match best_point {
        Some(point) => SolveResult::at(point, values, 0.0, diag),
        None => SolveResult::infeasible(diag),
    })
}

/// `P[Binomial(n, p) ≥ j]`.
pub fn binomial_tail(n: u32, j: u32, p: f64) -> f64 {
    (j..=n)
        .map(|k| {
            math::binomial_f64(n, k) * math::powu(p, k) * math::powu(1.0 - p, n - k)
        })
        .sum()
}

/// Smallest `p` with `P[Binomial(n, p) ≥ j] ≥ α`, by bisection. For the
/// support `{0, 1}` this is the bound for the upper set "at least `j` ones".
pub fn binomial_tail_oracle(n: u32, j: u32, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if j == 0 || j > n {
        return Err(Error::invalid(format!("need 1 <= j <= n, got j = {j}, n = {n}")));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binomial_tail(n, j, mid) >= alpha {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `α^{1/n}`: the bound of the single all-maximum sample for a two-point support.
pub fn top_sample_bound(n: u32, alpha: f64) -> f64 {
    math::pow(alpha, 1.0 / f64::from(n))
}
