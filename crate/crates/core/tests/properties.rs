use proptest::prelude::*;
use riesz_eig::analysis::{minmax_upper, poincare_bound, projection_error, reliable_count, weyl_ratios};
use riesz_eig::assembly::assemble_mass;
use riesz_eig::eig::{eval_eigenfunction, solve_mass};
use riesz_eig::specfun::a_norm_sq_gjf;
use riesz_eig::{solve, FractionalOrder, Parity};

fn order(t: f64) -> FractionalOrder {
    FractionalOrder::new(t).unwrap()
}

#[test]
fn residuals_are_small() {
    for t in [0.3, 1.1, 1.6, 2.0, 3.6] {
        let mass = assemble_mass(order(t), 48);
        let sol = solve_mass(&mass).unwrap();
        let m = mass.entries();
        let scale = m.frobenius();
        for (l, v) in sol.lambdas().iter().zip(sol.vectors()) {
            let mv = m.mul_vec(v);
            let r: f64 = mv.iter().zip(v).map(|(a, b)| (a - b / l).powi(2)).sum::<f64>().sqrt();
            assert!(r <= 1e-12 * scale, "2a = {t}, lambda = {l}: residual {r:e}");
        }
    }
}

#[test]
fn parity_alternates_in_classical_range() {
    for t in [1.2, 1.4, 1.6, 1.8, 2.0] {
        let sol = solve(order(t), 40).unwrap();
        for (i, p) in sol.parities().iter().take(10).enumerate() {
            let want = if i % 2 == 0 { Parity::Even } else { Parity::Odd };
            assert_eq!(*p, want, "2a = {t}, index {}", i + 1);
        }
    }
}

#[test]
fn first_eigenvalue_grows_with_order() {
    let ts: Vec<f64> = (6..=20).map(|k| k as f64 / 10.0).collect();
    let firsts: Vec<f64> = ts.iter().map(|&t| solve(order(t), 48).unwrap().lambdas()[0]).collect();
    assert!(firsts.windows(2).all(|w| w[1] > w[0]), "{firsts:?}");
}

#[test]
fn weyl_bracket_for_reliable_indices() {
    for t in [1.2, 1.5, 1.8, 2.0] {
        let sol = solve(order(t), 128).unwrap();
        for (i, r) in weyl_ratios(&sol).iter().take(reliable_count(128)).enumerate() {
            assert!((0.48..=1.05).contains(r), "2a = {t}, n = {}: {r}", i + 1);
        }
    }
}

#[test]
fn projection_decay_matches_tail_sums() {
    let o = order(1.4);
    let p = 4.0;
    let coeffs: Vec<f64> = (0..4000).map(|i| (1.0 + i as f64).powf(-p)).collect();
    let ns = [50usize, 100, 200, 400];
    let errs: Vec<f64> = ns.iter().map(|&n| projection_error(o, &coeffs, n).0).collect();
    let direct: Vec<f64> = ns
        .iter()
        .map(|&n| {
            (n + 1..coeffs.len())
                .map(|i| a_norm_sq_gjf(o, i) * coeffs[i] * coeffs[i])
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    for (e, d) in errs.iter().zip(&direct) {
        assert!(((e - d) / d).abs() < 1e-12);
    }
    // (D^a J_i, D^a J_i) ~ i^{2a-1}, so the tail is ~ N^{a - p}.
    let fit = (errs[3] / errs[0]).ln() / (400.0_f64 / 50.0).ln();
    assert!((fit - (0.7 - p)).abs() <= 0.25, "{fit}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bounds_and_nesting(t in 0.05f64..4.0, n in 2usize..40) {
        let o = order(t);
        let coarse = solve(o, n).unwrap();
        let fine = solve(o, n + 3).unwrap();
        let l1 = coarse.lambdas()[0];
        prop_assert!(l1 > poincare_bound(o));
        prop_assert!(l1 <= minmax_upper(o) * (1.0 + 1e-14));
        for (a, b) in coarse.lambdas().iter().zip(fine.lambdas()) {
            prop_assert!(*b <= a + 1e-10 * a);
        }
        prop_assert!(coarse.lambdas().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn mass_structure(t in 0.05f64..6.0, n in 0usize..30) {
        let mass = assemble_mass(order(t), n);
        let m = mass.entries();
        for i in 0..=n {
            prop_assert!(m[(i, i)] > 0.0);
            for j in 0..=n {
                prop_assert_eq!(m[(i, j)], m[(j, i)]);
                if (i + j) % 2 == 1 {
                    prop_assert_eq!(m[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn eigenvectors_normalized_and_parity_pure(t in 0.1f64..3.0, n in 1usize..30) {
        let mass = assemble_mass(order(t), n);
        let sol = solve_mass(&mass).unwrap();
        for (v, p) in sol.vectors().iter().zip(sol.parities()) {
            prop_assert!((mass.entries().quadratic_form(v) - 1.0).abs() <= 1e-12);
            for (j, x) in v.iter().enumerate() {
                if Parity::of(j) != *p {
                    prop_assert_eq!(*x, 0.0);
                }
            }
            let pivot = v.iter().fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
            prop_assert!(pivot > 0.0);
        }
    }

    #[test]
    fn eigenfunctions_have_parity(t in 0.2f64..3.0, k in 1usize..6) {
        let sol = solve(order(t), 16).unwrap();
        let xs = [-0.9, -0.4, 0.0, 0.4, 0.9, -1.0, 1.0];
        let u = eval_eigenfunction(&sol, k, &xs).unwrap();
        let sign = if sol.parities()[k - 1] == Parity::Even { 1.0 } else { -1.0 };
        let scale = u.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        prop_assert!((u[0] - sign * u[4]).abs() <= 1e-12 * scale);
        prop_assert!((u[1] - sign * u[3]).abs() <= 1e-12 * scale);
        prop_assert_eq!(u[5], 0.0);
        prop_assert_eq!(u[6], 0.0);
    }
}
