use mnbound_core::analysis::{
    compare, count_possible_error_sets, error_set, BoundFunction, DirichletPrior, Metric, Relation,
};
use mnbound_core::bounds::{
    admissible_cap_required, classify_table, compute_bound_table, detect_ties, enumerate_admissible,
    standard_ordering, Breakability, Ordering, OrderingKind,
};
use mnbound_core::lattice::{enumerate_sample_space, normalize_support, sample_space_size, SampleSpace};
use mnbound_core::likelihood::{build_subset_likelihood, Distribution, SimplexGrid};
use mnbound_core::solver::{binomial_tail_oracle, grid_oracle, solve_central, CentralProblem, SolverConfig};
use proptest::prelude::*;

fn space(s: &[f64], n: u32) -> SampleSpace {
    enumerate_sample_space(&normalize_support(s).unwrap(), n).unwrap()
}

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn bound_of(sp: &SampleSpace, members: &[usize], alpha: f64) -> f64 {
    let p = CentralProblem::new(sp, members, alpha).unwrap();
    solve_central(&p, &cfg()).unwrap().bound
}

fn small_space() -> impl Strategy<Value = SampleSpace> {
    (
        prop::sample::select(vec![
            vec![0.0, 1.0],
            vec![0.0, 1.0, 3.0],
            vec![-1.0, 0.5, 2.0],
            vec![0.0, 1.0, 2.0, 4.0],
        ]),
        1u32..=3,
    )
        .prop_map(|(s, n)| space(&s, n))
}

fn simplex_point(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, m).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        raw.iter().map(|x| x / total).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn space_size_and_order((s, n) in (prop::collection::btree_set(0u8..30, 1..5), 1u32..6)) {
        let support: Vec<f64> = s.iter().map(|&v| f64::from(v)).collect();
        let sp = space(&support, n);
        prop_assert_eq!(sp.len() as u128, sample_space_size(support.len(), n).unwrap());
        for w in sp.samples().windows(2) {
            let (a, b) = (w[0].sorted_values(sp.support()), w[1].sorted_values(sp.support()));
            prop_assert!(a < b);
        }
        for (i, x) in sp.samples().iter().enumerate() {
            prop_assert_eq!(x.counts().iter().sum::<u32>(), n);
            prop_assert_eq!(sp.index_of(x.counts()), Some(i));
        }
    }

    #[test]
    fn full_space_has_probability_one(sp in small_space(), seed in 0u64..1000) {
        let m = sp.support().len();
        let everything: Vec<usize> = (0..sp.len()).collect();
        let lik = build_subset_likelihood(&sp, &everything).unwrap();
        let mut rng_p: Vec<f64> = (0..m).map(|i| ((seed + 1) as f64 * (i as f64 + 1.7)).sin().abs() + 0.01).collect();
        let t: f64 = rng_p.iter().sum();
        rng_p.iter_mut().for_each(|x| *x /= t);
        let v = lik.value(&rng_p);
        prop_assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_subsets_add(sp in small_space(), mask in any::<u64>(), p in simplex_point(4)) {
        let m = sp.support().len();
        let p: Vec<f64> = {
            let head = &p[..m];
            let t: f64 = head.iter().sum();
            head.iter().map(|x| x / t).collect()
        };
        let a: Vec<usize> = (0..sp.len()).filter(|i| mask >> (i % 64) & 1 == 1).collect();
        let b: Vec<usize> = (0..sp.len()).filter(|i| mask >> (i % 64) & 1 == 0).collect();
        let la = build_subset_likelihood(&sp, &a).unwrap().value(&p);
        let lb = build_subset_likelihood(&sp, &b).unwrap().value(&p);
        prop_assert!((la + lb - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_differences(p in simplex_point(3), mask in 1u64..1023) {
        let sp = space(&[0.0, 1.0, 3.0], 3);
        let members: Vec<usize> = (0..sp.len()).filter(|i| mask >> i & 1 == 1).collect();
        let lik = build_subset_likelihood(&sp, &members).unwrap();
        let g = lik.gradient(&Distribution::new(p.clone()).unwrap()).unwrap();
        let mut grad = [0.0; 3];
        for i in 0..3 {
            let h = 1e-6;
            let mut up = p.clone();
            up[i] += h;
            let mut dn = p.clone();
            dn[i] -= h;
            let mut gu = vec![0.0; 3];
            let fu = lik.value_and_gradient(&up, &mut gu);
            let fd = lik.value_and_gradient(&dn, &mut gu);
            grad[i] = (fu - fd) / (2.0 * h);
        }
        for i in 0..3 {
            prop_assert!((g[i] - grad[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn monotone_in_alpha(mask in 1u64..1023, a1 in 0.01f64..0.9, gap in 0.001f64..0.09) {
        let sp = space(&[0.0, 1.0, 3.0], 3);
        let members: Vec<usize> = (1..sp.len()).filter(|i| mask >> i & 1 == 1).collect();
        prop_assume!(!members.is_empty());
        let lo = bound_of(&sp, &members, a1);
        let hi = bound_of(&sp, &members, a1 + gap);
        prop_assert!(lo <= hi + 1e-9 || hi.is_infinite());
    }

    #[test]
    fn feasible_results_meet_the_constraint(mask in 1u64..1023, alpha in 0.01f64..0.95) {
        let sp = space(&[0.0, 1.0, 3.0], 3);
        let members: Vec<usize> = (1..sp.len()).filter(|i| mask >> i & 1 == 1).collect();
        prop_assume!(!members.is_empty());
        let p = CentralProblem::new(&sp, &members, alpha).unwrap();
        let r = solve_central(&p, &cfg()).unwrap();
        prop_assert_eq!(r.feasible, r.bound.is_finite());
        prop_assert_eq!(r.feasible, r.argmin.is_some());
        if let Some(a) = &r.argmin {
            let v = p.upper_set().evaluate(a).unwrap();
            prop_assert!(v >= alpha - 1e-8 && v <= 1.0);
            prop_assert!((a.mean(sp.support()) - r.bound).abs() < 1e-12);
        }
    }

    #[test]
    fn no_grid_point_beats_the_bound(mask in 1u64..63, alpha in 0.02f64..0.9) {
        // every grid point with likelihood above α has mean at least the bound
        let sp = space(&[0.0, 1.0, 3.0], 2);
        let members: Vec<usize> = (1..sp.len()).filter(|i| mask >> i & 1 == 1).collect();
        prop_assume!(!members.is_empty());
        let b = bound_of(&sp, &members, alpha);
        let lik = build_subset_likelihood(&sp, &members).unwrap();
        let d = 150u32;
        for k in SimplexGrid::new(3, d) {
            let p: Vec<f64> = k.iter().map(|&c| f64::from(c) / f64::from(d)).collect();
            if lik.value(&p) > alpha {
                let mean = p[1] + 3.0 * p[2];
                prop_assert!(mean >= b - 1e-7, "grid mean {} below bound {}", mean, b);
            }
        }
    }

    #[test]
    fn error_sets_are_nested(values in prop::collection::vec(prop::sample::select(vec![0.0, 0.2, 0.5, 0.9, f64::INFINITY]), 1..12), m1 in -0.5f64..1.5, d in 0.0f64..1.0) {
        let f = BoundFunction::new(values.clone(), "p").unwrap();
        let small = error_set(&f, m1 + d);
        let big = error_set(&f, m1);
        prop_assert!(small.iter().all(|i| big.contains(i)));
        prop_assert!(count_possible_error_sets(&f, 0.0) <= values.len() + 1);
    }

    #[test]
    fn sample_aligned_dominance_carries_over(base in prop::collection::vec(0.0f64..2.0, 6), bumps in prop::collection::vec(0.0f64..0.5, 6)) {
        let sp = space(&[0.0, 1.0, 3.0], 2);
        let a = BoundFunction::new(base.iter().zip(&bumps).map(|(x, y)| x + y).collect(), "a").unwrap();
        let b = BoundFunction::new(base.clone(), "b").unwrap();
        let sa = compare(&sp, &a, &b, Metric::SampleAligned, None).unwrap();
        prop_assume!(sa.relation == Relation::Dominates);
        let ro = compare(&sp, &a, &b, Metric::RankOrdered, None).unwrap();
        prop_assert_eq!(ro.relation, Relation::Dominates);
        let prior = DirichletPrior::symmetric(3, 1.0, 2000, 5);
        let ev = compare(&sp, &a, &b, Metric::ExpectedValue, Some(&prior)).unwrap();
        let e = ev.expected.unwrap();
        prop_assert!(e.a >= e.b - 3.0 * e.difference_se);
        prop_assert!(e.difference >= 0.0);
    }
}

#[test]
fn binomial_thresholds_up_to_twenty() {
    for n in 1..=20u32 {
        let sp = space(&[0.0, 1.0], n);
        for alpha in [0.01, 0.05, 0.1, 0.35, 0.6] {
            for j in 1..=n {
                let members: Vec<usize> = (j as usize..=n as usize).collect();
                let b = bound_of(&sp, &members, alpha);
                let o = binomial_tail_oracle(n, j, alpha).unwrap();
                assert!((b - o).abs() <= 1e-7, "n={n} j={j} α={alpha}: {b} vs {o}");
            }
        }
    }
}

#[test]
fn subset_monotonicity_on_trinomial() {
    let sp = space(&[0.0, 1.0, 3.0], 3);
    let alpha = 0.2;
    for mask in 1u32..(1 << (sp.len() - 1)) {
        let a: Vec<usize> = (1..sp.len()).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let ba = bound_of(&sp, &a, alpha);
        for x in 1..sp.len() {
            if a.contains(&x) {
                continue;
            }
            let mut b = a.clone();
            b.push(x);
            b.sort_unstable();
            let bb = bound_of(&sp, &b, alpha);
            assert!(bb <= ba + 1e-9 || ba.is_infinite(), "{a:?} + {x}: {bb} > {ba}");
        }
    }
}

fn all_orderings(n: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![perm.clone()];
    while mnbound_core::bounds::next_permutation(&mut perm) {
        out.push(perm.clone());
    }
    out
}

#[test]
fn table_structure_over_all_orderings() {
    let sp = space(&[0.0, 1.0, 3.0], 2);
    let c = cfg();
    for (idx, perm) in all_orderings(sp.len()).into_iter().enumerate() {
        // every eighth ordering keeps the test quick while covering all shapes
        if idx % 8 != 0 {
            continue;
        }
        let o = Ordering::from_perm(perm.clone(), "o").unwrap();
        let t = compute_bound_table(&sp, &o, 0.3, &c).unwrap();
        assert!(t.is_order_consistent(c.mean_tol), "{perm:?}");
        let b = t.bounds();
        let z = o.positions()[0];
        assert!(b[..=z].iter().all(|&v| v == 0.0));
        if !o.is_degenerate() {
            assert!(b[1..].iter().all(|&v| v > c.interior_eps));
        }
    }
}

#[test]
fn orderings_sharing_a_prefix_share_the_next_bound() {
    let sp = space(&[0.0, 1.0, 3.0], 2);
    let c = cfg();
    let t1 = compute_bound_table(&sp, &Ordering::from_perm(vec![0, 2, 1, 3, 4, 5], "a").unwrap(), 0.2, &c).unwrap();
    let t2 = compute_bound_table(&sp, &Ordering::from_perm(vec![0, 2, 5, 4, 3, 1], "b").unwrap(), 0.2, &c).unwrap();
    assert_eq!(t1.bounds()[2], t2.bounds()[2]);
    assert_eq!(t1.bounds()[..2], t2.bounds()[..2]);
}

#[test]
fn swapping_a_tie_never_lowers_a_bound() {
    let sp = space(&[0.0, 1.0, 3.0], 3);
    let c = cfg();
    let o = standard_ordering(&sp, &OrderingKind::SampleMean).unwrap();
    let t = compute_bound_table(&sp, &o, 0.05, &c).unwrap();
    let ties = detect_ties(&t, c.tie_tol);
    assert!(!ties.is_empty());
    for cl in ties {
        for k in cl.start..cl.end {
            let s = compute_bound_table(&sp, &o.swap_adjacent(k), 0.05, &c).unwrap();
            let (before, after) = (t.by_sample(), s.by_sample());
            for i in 0..sp.len() {
                assert!(after[i] >= before[i] - 1e-9, "sample {i}");
                let moved = i == o.perm()[k] || i == o.perm()[k + 1];
                if !moved {
                    assert_eq!(after[i], before[i]);
                }
            }
        }
    }
}

#[test]
fn tie_with_boundary_argmin_is_breakable_and_grid_confirmed() {
    let sp = space(&[0.0, 1.0, 3.0], 3);
    let c = cfg();
    let o = standard_ordering(&sp, &OrderingKind::SampleMean).unwrap();
    let t = compute_bound_table(&sp, &o, 0.05, &c).unwrap();
    let report = classify_table(&sp, &t, &c);
    let first = report.tie_clusters[0];
    assert!(t.entries[first.start].on_boundary && t.entries[first.end].on_boundary);
    // the grid oracle sees the same value for both upper sets
    let g = |k: usize| {
        let p = CentralProblem::new(&sp, &o.upper_set(k), 0.05).unwrap();
        grid_oracle(&p, 1000, &c).unwrap().bound
    };
    assert!((g(first.start) - g(first.end)).abs() < 1e-12);
    assert_eq!(report.breakability[0].verdict, Breakability::Breakable);
}

#[test]
fn trinomial_pair_enumeration() {
    let sp = space(&[0.0, 1.0, 3.0], 2);
    let e = enumerate_admissible(&sp, 0.35, &cfg(), 1_000).unwrap();
    assert_eq!(e.orderings, 120);
    assert!(e.admissible.len() >= 2);
    assert!(e.admissible.len() as u128 <= admissible_cap_required(sp.len()).unwrap());
}

#[test]
fn binomial_pair_is_mutually_undominated() {
    let sp = space(&[0.0, 1.0], 2);
    for alpha in [0.05, 0.2, 0.35, 0.45] {
        let e = enumerate_admissible(&sp, alpha, &cfg(), 10).unwrap();
        assert_eq!(e.admissible.len(), 2);
        let a = BoundFunction::from_table(&e.admissible[0].table);
        let b = BoundFunction::from_table(&e.admissible[1].table);
        let r = compare(&sp, &a, &b, Metric::SampleAligned, None).unwrap();
        assert_eq!(r.relation, Relation::Incomparable);
        assert_eq!(r.a_witnesses.len(), 1);
        assert_eq!(r.b_witnesses.len(), 1);
    }
}
