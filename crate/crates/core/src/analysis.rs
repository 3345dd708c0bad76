//! Derived quantities: Weyl ratios, condition numbers, bound checks,
//! convergence tables and projection-error studies.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::assembly::mass_diagonal_zero;
use crate::eig::{solve, EigenSolution};
use crate::error::{Error, Result};
use crate::specfun::{jacobi_norm_sq, ln_gamma, tail_seminorm_sq, FractionalOrder};

/// Relative tolerance below which a reported convergence error is treated as
/// the double-precision plateau and printed as zero.
pub const PLATEAU_REL: f64 = 1e-13;

/// Default relative tolerance for [`reliable_eigenvalues`].
pub const DEFAULT_RELIABILITY_TOL: f64 = 1.2e-4;

/// Number of eigenvalues expected to be resolved at degree `n_max`, `⌊2N/π⌋`.
pub fn reliable_count(n_max: usize) -> usize {
    (2.0 * n_max as f64 / PI).floor() as usize
}

/// `Γ(2a+1)`, a strict lower bound for the first eigenvalue.
pub fn poincare_bound(order: FractionalOrder) -> f64 {
    ln_gamma(order.two_alpha() + 1.0).exp()
}

/// `1/M_00`, the one-mode Rayleigh quotient and an upper bound on `λ_{1,N}`.
pub fn minmax_upper(order: FractionalOrder) -> f64 {
    1.0 / mass_diagonal_zero(order)
}

/// `ρ_n = λ_n / (nπ/2)^{2a}` for `n = 1..=N+1`.
pub fn weyl_ratios(sol: &EigenSolution) -> Vec<f64> {
    let two_alpha = sol.order().two_alpha();
    sol.lambdas()
        .iter()
        .enumerate()
        .map(|(i, l)| l / ((i + 1) as f64 * PI / 2.0).powf(two_alpha))
        .collect()
}

/// `χ_N = λ_{N+1,N} / λ_{1,N}`; 1 for a single mode.
pub fn condition_number(sol: &EigenSolution) -> f64 {
    match (sol.lambdas().first(), sol.lambdas().last()) {
        (Some(lo), Some(hi)) => hi / lo,
        _ => 1.0,
    }
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// `χ_N` for each degree in `ns`, solved in parallel.
pub fn condition_numbers(order: FractionalOrder, ns: &[usize]) -> Result<Vec<f64>> {
    ns.par_iter()
        .map(|&n| solve(order, n).map(|s| condition_number(&s)))
        .collect()
}

/// Least-squares slope of `log χ_N` against `log N`.
pub fn condition_slope(order: FractionalOrder, ns: &[usize]) -> Result<f64> {
    if ns.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "condition slope needs at least 3 degrees, got {}",
            ns.len()
        )));
    }
    if ns.contains(&0) {
        return Err(Error::InvalidArgument("condition slope needs N >= 1".into()));
    }
    let chi = condition_numbers(order, ns)?;
    Ok(slope_from(ns, &chi))
}

/// Log-log slope for precomputed `(N, χ_N)` pairs.
pub fn slope_from(ns: &[usize], chi: &[f64]) -> f64 {
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = chi.iter().map(|c| c.ln()).collect();
    ols_slope(&x, &y)
}

/// Summary of one solve.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub order: FractionalOrder,
    pub n_max: usize,
    pub lambdas: Vec<f64>,
    pub weyl_ratios: Vec<f64>,
    pub condition_number: f64,
    pub poincare_bound: f64,
    pub minmax_upper: f64,
    pub reliable_count: usize,
}

impl SpectrumReport {
    pub fn from_solution(sol: &EigenSolution) -> Self {
        let order = sol.order();
        SpectrumReport {
            order,
            n_max: sol.n_max(),
            lambdas: sol.lambdas().to_vec(),
            weyl_ratios: weyl_ratios(sol),
            condition_number: condition_number(sol),
            poincare_bound: poincare_bound(order),
            minmax_upper: minmax_upper(order),
            reliable_count: reliable_count(sol.n_max()),
        }
    }

    /// `Γ(2a+1) < λ_1 <= 1/M_00`, the upper end with a few ulps of slack.
    pub fn bounds_hold(&self) -> bool {
        let l1 = self.lambdas[0];
        l1 > self.poincare_bound && l1 <= self.minmax_upper * (1.0 + 4.0 * f64::EPSILON)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub lambda1: f64,
    /// `λ_{1,N} - λ_{1,ref}`, zero once within [`PLATEAU_REL`] of the reference.
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub order: FractionalOrder,
    pub reference_n: usize,
    pub reference_lambda1: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Errors strictly decrease until they hit the plateau, then stay there.
    pub fn decreases_to_plateau(&self) -> bool {
        let mut flat = false;
        for w in self.rows.windows(2) {
            let (a, b) = (w[0].error, w[1].error);
            if flat || a == 0.0 {
                flat = true;
                if b != 0.0 {
                    return false;
                }
            } else if b >= a {
                return false;
            }
        }
        true
    }
}

/// First-eigenvalue errors against a finer reference solve.
pub fn convergence_table(order: FractionalOrder, ns: &[usize], reference_n: usize) -> Result<ConvergenceTable> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("degree list must be strictly ascending".into()));
    }
    if let Some(&max) = ns.last() {
        if reference_n <= max {
            return Err(Error::InvalidArgument(format!(
                "reference degree {reference_n} must exceed the largest listed degree {max}"
            )));
        }
    }
    let mut all: Vec<usize> = ns.to_vec();
    all.push(reference_n);
    let firsts: Vec<f64> = all
        .par_iter()
        .map(|&n| solve(order, n).map(|s| s.lambdas()[0]))
        .collect::<Result<_>>()?;
    let reference = *firsts.last().expect("reference solve present");
    let rows = ns
        .iter()
        .zip(&firsts)
        .map(|(&n, &l)| {
            let raw = l - reference;
            let error = if raw.abs() <= PLATEAU_REL * reference { 0.0 } else { raw };
            ConvergenceRow { n, lambda1: l, error }
        })
        .collect();
    Ok(ConvergenceTable {
        order,
        reference_n,
        reference_lambda1: reference,
        rows,
    })
}

/// Largest `m` such that the first `m` eigenvalues of `coarse` agree with
/// `fine` to relative tolerance `rel_tol`.
pub fn reliable_eigenvalues(coarse: &EigenSolution, fine: &EigenSolution, rel_tol: f64) -> usize {
    coarse
        .lambdas()
        .iter()
        .zip(fine.lambdas())
        .take_while(|(c, f)| ((*c - *f) / *f).abs() <= rel_tol)
        .count()
}

/// Truncation error of `u = Σ u_i J_i^{-a,-a}` after degree `n_max`.
///
/// Returns the energy-seminorm error and the `ω^{-a,-a}`-weighted L2 error
/// `sqrt(Σ_{i>N} γ_i u_i^2)` with `γ_i` the Jacobi norms for `(a, a)`.
pub fn projection_error(order: FractionalOrder, coeffs: &[f64], n_max: usize) -> (f64, f64) {
    let from = n_max + 1;
    if coeffs.len() <= from {
        return (0.0, 0.0);
    }
    let a_err = tail_seminorm_sq(order, coeffs, from).sqrt();
    let params = order.basis_params();
    let l2: f64 = coeffs
        .iter()
        .enumerate()
        .skip(from)
        .map(|(i, u)| jacobi_norm_sq(params, i) * u * u)
        .sum();
    (a_err, l2.sqrt())
}

/// `λ_{N+1,N} / N^{4a}`.
pub fn inverse_inequality_ratio(order: FractionalOrder, n_max: usize) -> Result<f64> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("inverse inequality ratio needs N >= 1".into()));
    }
    let sol = solve(order, n_max)?;
    let top = *sol.lambdas().last().expect("nonempty spectrum");
    Ok(top / (n_max as f64).powf(2.0 * order.two_alpha()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::a_norm_sq_gjf;
    use approx::assert_relative_eq;

    fn order(t: f64) -> FractionalOrder {
        FractionalOrder::new(t).unwrap()
    }

    #[test]
    fn laplacian_weyl_ratio() {
        let sol = solve(order(2.0), 64).unwrap();
        let rho = weyl_ratios(&sol);
        assert_relative_eq!(rho[0], 1.0, max_relative = 1e-9);
        for r in &rho[..reliable_count(64)] {
            assert!((r - 1.0).abs() <= 1e-2, "{r}");
        }
    }

    #[test]
    fn single_mode_condition() {
        let sol = solve(order(1.3), 0).unwrap();
        assert_eq!(condition_number(&sol), 1.0);
        let r = SpectrumReport::from_solution(&sol);
        assert_eq!(r.reliable_count, 0);
        assert_relative_eq!(r.lambdas[0], r.minmax_upper, max_relative = 1e-14);
    }

    #[test]
    fn report_bounds() {
        for t in [0.2, 0.5, 1.0, 1.6, 2.0, 3.6] {
            let r = SpectrumReport::from_solution(&solve(order(t), 24).unwrap());
            assert!(r.bounds_hold(), "2a = {t}");
            assert!(r.condition_number >= 1.0);
        }
        assert_relative_eq!(poincare_bound(order(2.0)), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn slope_needs_three_points() {
        assert!(condition_slope(order(1.2), &[8, 16]).is_err());
        assert_relative_eq!(ols_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]), 2.0);
    }

    #[test]
    fn laplacian_condition_scale() {
        // χ_N / N^4 settles near 0.0105.
        let ratios: Vec<f64> = [64usize, 128, 256]
            .iter()
            .map(|&n| condition_number(&solve(order(2.0), n).unwrap()) / (n as f64).powi(4))
            .collect();
        assert!(ratios.iter().all(|r| (0.01..=0.013).contains(r)), "{ratios:?}");
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn convergence_errors() {
        let t = convergence_table(order(2.0), &[8, 16], 40).unwrap();
        assert_eq!(t.rows[1].error, 0.0);
        assert!(t.rows.iter().all(|r| r.error >= 0.0));
        assert!(t.decreases_to_plateau());
        assert!(convergence_table(order(1.6), &[8, 16], 16).is_err());
        assert!(convergence_table(order(1.6), &[16, 8], 40).is_err());
    }

    #[test]
    fn reliability_identity() {
        let s = solve(order(1.6), 20).unwrap();
        assert_eq!(reliable_eigenvalues(&s, &s, 0.0), 21);
        let f = solve(order(1.6), 40).unwrap();
        let m = reliable_eigenvalues(&s, &f, 1.2e-4);
        assert!((1..21).contains(&m));
    }

    #[test]
    fn projection_examples() {
        let o = order(1.4);
        assert_eq!(projection_error(o, &[1.0, 2.0, 3.0], 2), (0.0, 0.0));
        let mut u = vec![0.0; 6];
        u[5] = 1.0;
        let (a, l2) = projection_error(o, &u, 4);
        assert_relative_eq!(a * a, a_norm_sq_gjf(o, 5), max_relative = 1e-14);
        assert_relative_eq!(l2 * l2, jacobi_norm_sq(o.basis_params(), 5), max_relative = 1e-14);
    }

    #[test]
    fn inverse_ratio_positive() {
        let r = inverse_inequality_ratio(order(1.2), 1).unwrap();
        assert!(r.is_finite() && r > 0.0);
        assert!(inverse_inequality_ratio(order(1.2), 0).is_err());
    }
}
