//! Projection onto `{p ≥ 0, Σ p = 1, s·p ≤ t}` restricted to a face of the
//! simplex, and projected gradient ascent of a subset likelihood over it.

use alloc::vec;
use alloc::vec::Vec;

use crate::likelihood::SubsetLikelihood;

/// A face of the simplex: the support indices allowed to carry mass.
pub(crate) type Face = Vec<usize>;

/// The feasible region `{p in face : s·p ≤ t}`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Polytope<'a> {
    pub values: &'a [f64],
    pub cap: f64,
}

impl Polytope<'_> {
    /// Does the face contain a point with mean at most `cap`?
    pub fn face_reachable(&self, face: &[usize]) -> bool {
        face.iter().any(|&i| self.values[i] <= self.cap)
    }
}

/// Euclidean projection of `y` onto the probability simplex, in place.
pub(crate) fn project_simplex(y: &mut [f64]) {
    let mut u: Vec<f64> = y.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j as f64 + 1.0);
        if uj - t > 0.0 {
            theta = t;
        }
    }
    for v in y.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Project `y` (full dimension) onto the polytope restricted to `face`,
/// writing the result into `out`. Coordinates outside the face are zero.
pub(crate) fn project(y: &[f64], face: &[usize], poly: Polytope<'_>, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let yf: Vec<f64> = face.iter().map(|&i| y[i]).collect();
    let sf: Vec<f64> = face.iter().map(|&i| poly.values[i]).collect();

    let mut p = yf.clone();
    project_simplex(&mut p);
    if dot(&p, &sf) <= poly.cap {
        scatter(&p, face, out);
        return;
    }

    // The cheapest vertex of the face already sits on the cap: it is the only point.
    let (jmin, smin) = sf
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (j, s)| if s < acc.1 { (j, s) } else { acc });
    if smin >= poly.cap {
        let mut v = vec![0.0; face.len()];
        v[jmin] = 1.0;
        scatter(&v, face, out);
        return;
    }

    // Solve for the multiplier ν ≥ 0 with s·proj(y - ν s) = cap; the map is nonincreasing.
    let shifted = |nu: f64| -> Vec<f64> {
        let mut q: Vec<f64> = yf.iter().zip(&sf).map(|(y, s)| y - nu * s).collect();
        project_simplex(&mut q);
        q
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut q_hi = shifted(hi);
    let mut guard = 0;
    while dot(&q_hi, &sf) > poly.cap && guard < 200 {
        lo = hi;
        hi *= 2.0;
        q_hi = shifted(hi);
        guard += 1;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // Same active set at both ends: the solution is linear in ν there.
        let q_lo = shifted(lo);
        if same_support(&q_lo, &q_hi) {
            if let Some(q) = solve_on_support(&yf, &sf, &q_hi, poly.cap) {
                scatter(&q, face, out);
                return;
            }
        }
        let q_mid = shifted(mid);
        if dot(&q_mid, &sf) > poly.cap {
            lo = mid;
        } else {
            hi = mid;
            q_hi = q_mid;
        }
    }
    scatter(&q_hi, face, out);
}

fn same_support(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (*x > 0.0) == (*y > 0.0))
}

// With the active set fixed, p_i = y_i - θ - ν s_i on the support. Two linear
// equations (sum to one, mean equal to the cap) fix θ and ν.
fn solve_on_support(y: &[f64], s: &[f64], guess: &[f64], cap: f64) -> Option<Vec<f64>> {
    let act: Vec<usize> = (0..y.len()).filter(|&i| guess[i] > 0.0).collect();
    let k = act.len() as f64;
    let sy: f64 = act.iter().map(|&i| y[i]).sum();
    let ss: f64 = act.iter().map(|&i| s[i]).sum();
    let sys: f64 = act.iter().map(|&i| y[i] * s[i]).sum();
    let sss: f64 = act.iter().map(|&i| s[i] * s[i]).sum();
    // k θ + ss ν = sy - 1 ; ss θ + sss ν = sys - cap
    let det = k * sss - ss * ss;
    if det.abs() < 1e-300 {
        return None;
    }
    let theta = ((sy - 1.0) * sss - ss * (sys - cap)) / det;
    let nu = (k * (sys - cap) - ss * (sy - 1.0)) / det;
    if nu < 0.0 {
        return None;
    }
    let mut q = vec![0.0; y.len()];
    for &i in &act {
        let v = y[i] - theta - nu * s[i];
        if v < -1e-14 {
            return None;
        }
        q[i] = v.max(0.0);
    }
    // the inactive coordinates must stay inactive
    for i in 0..y.len() {
        if guess[i] <= 0.0 && y[i] - theta - nu * s[i] > 1e-14 {
            return None;
        }
    }
    let total: f64 = q.iter().sum();
    if total <= 0.0 {
        return None;
    }
    q.iter_mut().for_each(|v| *v /= total);
    if dot(&q, s) > cap {
        // rounding pushed the mean above the cap; fall back to bisection
        return None;
    }
    Some(q)
}

fn scatter(v: &[f64], face: &[usize], out: &mut [f64]) {
    for (&i, &x) in face.iter().zip(v) {
        out[i] = x;
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outcome of one projected gradient ascent run.
#[derive(Debug, Clone)]
pub(crate) struct Ascent {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub reached_target: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AscentParams {
    pub max_iters: usize,
    /// Stop once the gradient mapping norm falls below this.
    pub grad_tol: f64,
    /// Stop as soon as the value reaches this level.
    pub target: Option<f64>,
}

/// Maximize the likelihood over the polytope on `face`, starting from `x`
/// (projected first). `x` holds the final iterate on return.
pub(crate) fn ascend(
    lik: &SubsetLikelihood,
    face: &[usize],
    poly: Polytope<'_>,
    x: &mut [f64],
    params: AscentParams,
) -> Ascent {
    let m = x.len();
    let mut cur = vec![0.0; m];
    project(x, face, poly, &mut cur);
    let mut grad = vec![0.0; m];
    let mut f = lik.value_and_gradient(&cur, &mut grad);
    let mut step = 1.0;
    let mut trial = vec![0.0; m];
    let mut moved = vec![0.0; m];
    let mut out = Ascent {
        value: f,
        iterations: 0,
        converged: false,
        reached_target: false,
    };
    let mut stalls = 0;
    for it in 0..params.max_iters {
        out.iterations = it + 1;
        if let Some(t) = params.target {
            if f >= t {
                out.reached_target = true;
                break;
            }
        }
        // backtracking on the projected step
        let mut accepted = false;
        let mut f_new = f;
        let mut dist2 = 0.0;
        for _ in 0..60 {
            for i in 0..m {
                moved[i] = cur[i] + step * grad[i];
            }
            project(&moved, face, poly, &mut trial);
            let mut lin = 0.0;
            dist2 = 0.0;
            for i in 0..m {
                let d = trial[i] - cur[i];
                lin += grad[i] * d;
                dist2 += d * d;
            }
            if dist2 == 0.0 {
                break;
            }
            f_new = lik.value(&trial);
            if f_new >= f + lin - dist2 / (2.0 * step) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || dist2 == 0.0 {
            out.converged = true;
            break;
        }
        let gmap = crate::math::sqrt(dist2) / step;
        let gain = f_new - f;
        core::mem::swap(&mut cur, &mut trial);
        f = lik.value_and_gradient(&cur, &mut grad);
        if gmap < params.grad_tol {
            out.converged = true;
            break;
        }
        if gain <= 1e-14 * f.abs().max(1e-300) {
            stalls += 1;
            if stalls >= 3 {
                out.converged = true;
                break;
            }
        } else {
            stalls = 0;
        }
        step = (step * 2.0).min(1e6);
    }
    if let Some(t) = params.target {
        if f >= t {
            out.reached_target = true;
        }
    }
    out.value = f;
    x.copy_from_slice(&cur);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_sample_space, normalize_support};
    use crate::likelihood::build_subset_likelihood;

    #[test]
    fn simplex_projection_basics() {
        let mut y = [0.2, 0.3, 0.5];
        project_simplex(&mut y);
        assert!((y[0] - 0.2).abs() < 1e-15 && (y[2] - 0.5).abs() < 1e-15);
        let mut y = [2.0, 0.0, 0.0];
        project_simplex(&mut y);
        assert_eq!(y, [1.0, 0.0, 0.0]);
        let mut y = [0.0, 0.0, 0.0];
        project_simplex(&mut y);
        for v in y {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn halfspace_projection_respects_cap() {
        let values = [0.0, 1.0, 3.0];
        let poly = Polytope {
            values: &values,
            cap: 0.8,
        };
        let face = [0, 1, 2];
        let mut out = [0.0; 3];
        for y in [[0.0, 0.0, 1.0], [0.3, 0.3, 0.4], [-1.0, 2.0, 5.0], [0.9, 0.05, 0.05]] {
            project(&y, &face, poly, &mut out);
            let total: f64 = out.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(out.iter().all(|&v| v >= 0.0));
            assert!(dot(&out, &values) <= 0.8 + 1e-12);
        }
        // the projection of a feasible point is itself
        project(&[0.9, 0.05, 0.05], &face, poly, &mut out);
        assert!((out[0] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn halfspace_projection_is_nearest_point() {
        // brute force over a fine grid of the feasible region
        let values = [0.0, 1.0, 3.0];
        let poly = Polytope {
            values: &values,
            cap: 1.1,
        };
        let y = [-0.2, 0.4, 0.9];
        let mut out = [0.0; 3];
        project(&y, &[0, 1, 2], poly, &mut out);
        let d_proj: f64 = out.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
        let res = 400;
        for i in 0..=res {
            for j in 0..=(res - i) {
                let p = [
                    i as f64 / res as f64,
                    j as f64 / res as f64,
                    (res - i - j) as f64 / res as f64,
                ];
                if dot(&p, &values) > 1.1 {
                    continue;
                }
                let d: f64 = p.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
                assert!(d >= d_proj - 1e-12);
            }
        }
    }

    #[test]
    fn face_restriction() {
        let values = [0.0, 1.0, 3.0];
        let poly = Polytope {
            values: &values,
            cap: 3.0,
        };
        let mut out = [0.0; 3];
        project(&[0.3, 0.3, 0.4], &[0, 2], poly, &mut out);
        assert_eq!(out[1], 0.0);
        assert!((out[0] + out[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ascent_finds_binomial_maximum() {
        let sp = enumerate_sample_space(&normalize_support(&[0.0, 1.0]).unwrap(), 2).unwrap();
        let lik = build_subset_likelihood(&sp, &[1]).unwrap();
        let values = sp.support().values().to_vec();
        let poly = Polytope {
            values: &values,
            cap: 1.0,
        };
        let mut x = vec![0.9, 0.1];
        let res = ascend(
            &lik,
            &[0, 1],
            poly,
            &mut x,
            AscentParams {
                max_iters: 10_000,
                grad_tol: 1e-12,
                target: None,
            },
        );
        assert!(res.converged);
        assert!((res.value - 0.5).abs() < 1e-12);
        assert!((x[1] - 0.5).abs() < 1e-6);
    }
}
