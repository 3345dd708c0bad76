//! Gauss-Jacobi quadrature and the brute-force inner-product oracles.
//!
//! The oracles integrate products of Jacobi polynomials with an exact Gauss
//! rule. They never touch the closed-form mass entries, so they serve as an
//! independent check on them.

use crate::eig::symmetric::tridiagonal_eig_first_components;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::specfun::{basis_coeff, jacobi_eval_all, jacobi_norm_sq, log_gamma_ratio, FractionalOrder, JacobiWeightPair};

/// Gauss rule for the weight `(1 - x)^a (1 + x)^b` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    params: JacobiWeightPair,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn params(&self) -> JacobiWeightPair {
        self.params
    }

    /// Strictly increasing nodes in `(-1, 1)`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_k f(x_k)`, i.e. `∫ (1-x)^a (1+x)^b f(x) dx` for polynomial `f`
    /// of degree up to `2m - 1`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `m`-node Gauss-Jacobi rule by Golub-Welsch.
pub fn gauss_jacobi(params: JacobiWeightPair, m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::EmptyRule);
    }
    let (a, b) = (params.a(), params.b());
    let diag: Vec<f64> = (0..m)
        .map(|n| {
            if n == 0 {
                (b - a) / (a + b + 2.0)
            } else {
                let s = 2.0 * n as f64 + a + b;
                (b * b - a * a) / (s * (s + 2.0))
            }
        })
        .collect();
    let offdiag: Vec<f64> = (1..m)
        .map(|n| {
            let nf = n as f64;
            let s = 2.0 * nf + a + b;
            let beta = if n == 1 {
                // (n + a + b) cancels against (s - 1) when a + b = -1.
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                4.0 * nf * (nf + a) * (nf + b) * (nf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
            };
            beta.sqrt()
        })
        .collect();

    let (mut nodes, first) = tridiagonal_eig_first_components(&diag, &offdiag)?;
    let mu0 = jacobi_norm_sq(params, 0);
    let mut weights: Vec<f64> = first.iter().map(|z| mu0 * z * z).collect();

    if a == b {
        // Enforce the exact reflection symmetry of the symmetric weight.
        for k in 0..m / 2 {
            let j = m - 1 - k;
            let x = 0.5 * (nodes[j] - nodes[k]);
            let w = 0.5 * (weights[j] + weights[k]);
            nodes[k] = -x;
            nodes[j] = x;
            weights[k] = w;
            weights[j] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
    }
    Ok(QuadratureRule {
        params,
        nodes,
        weights,
    })
}

/// `P_0..=P_degree` at every node: `table[k][n] = P_n(x_k)`.
fn jacobi_table(params: JacobiWeightPair, nodes: &[f64], degree: usize) -> Vec<Vec<f64>> {
    nodes
        .iter()
        .map(|&x| {
            let mut row = vec![0.0; degree + 1];
            jacobi_eval_all(params, x, &mut row);
            row
        })
        .collect()
}

fn weighted_product(rule: &QuadratureRule, table: &[Vec<f64>], i: usize, j: usize) -> f64 {
    let (i, j) = (i.min(j), i.max(j));
    rule.weights
        .iter()
        .zip(table)
        .map(|(w, p)| w * p[i] * p[j])
        .sum()
}

fn exact_rule_size(i: usize, j: usize) -> usize {
    (i + j).div_ceil(2) + 1
}

/// `c_i c_j ∫ (1-x^2)^{2a} P_i^{a,a} P_j^{a,a} dx` by exact Gauss-Jacobi quadrature.
pub fn oracle_mass_entry(order: FractionalOrder, i: usize, j: usize) -> f64 {
    let alpha = order.alpha();
    let weight = JacobiWeightPair::symmetric(2.0 * alpha).expect("2a > -1");
    let rule = gauss_jacobi(weight, exact_rule_size(i, j)).expect("Gauss-Jacobi rule");
    let table = jacobi_table(order.basis_params(), &rule.nodes, i.max(j));
    let (lo, hi) = (i.min(j), i.max(j));
    basis_coeff(order, lo) * basis_coeff(order, hi) * weighted_product(&rule, &table, lo, hi)
}

/// `(Γ(m+2a+1)/m!) ∫ (1-x^2)^a P_m^{a,a} P_n^{a,a} dx`, the unnormalized
/// a-inner product `(D^a J_m, D^a J_n)` evaluated by quadrature.
pub fn oracle_a_inner(order: FractionalOrder, m: usize, n: usize) -> f64 {
    let rule = gauss_jacobi(order.basis_params(), exact_rule_size(m, n)).expect("Gauss-Jacobi rule");
    let table = jacobi_table(order.basis_params(), &rule.nodes, m.max(n));
    a_inner_factor(order, m) * weighted_product(&rule, &table, m, n)
}

fn a_inner_factor(order: FractionalOrder, m: usize) -> f64 {
    let mf = m as f64;
    log_gamma_ratio(mf + order.two_alpha() + 1.0, mf + 1.0).exp()
}

/// Full oracle mass matrix for indices `0..=n_max`, using a single rule of
/// `n_max + 1` nodes (exact for every pair).
pub fn oracle_mass_matrix(order: FractionalOrder, n_max: usize) -> DenseMatrix {
    let weight = JacobiWeightPair::symmetric(order.two_alpha()).expect("2a > -1");
    let rule = gauss_jacobi(weight, n_max + 1).expect("Gauss-Jacobi rule");
    let table = jacobi_table(order.basis_params(), &rule.nodes, n_max);
    let c: Vec<f64> = (0..=n_max).map(|n| basis_coeff(order, n)).collect();
    let mut out = DenseMatrix::zeros(n_max + 1);
    for i in 0..=n_max {
        for j in i..=n_max {
            let v = c[i] * c[j] * weighted_product(&rule, &table, i, j);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Normalized stiffness matrix `c_i c_j (D^a J_j, D^a J_i)` by quadrature;
/// the identity in exact arithmetic.
pub fn oracle_stiffness_matrix(order: FractionalOrder, n_max: usize) -> DenseMatrix {
    let rule = gauss_jacobi(order.basis_params(), n_max + 1).expect("Gauss-Jacobi rule");
    let table = jacobi_table(order.basis_params(), &rule.nodes, n_max);
    let c: Vec<f64> = (0..=n_max).map(|n| basis_coeff(order, n)).collect();
    let mut out = DenseMatrix::zeros(n_max + 1);
    for i in 0..=n_max {
        for j in i..=n_max {
            let v = c[i] * c[j] * a_inner_factor(order, i) * weighted_product(&rule, &table, i, j);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}
