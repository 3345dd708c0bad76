//! Discrete eigenproblem `S c = λ M c` with `S = I`, solved as `M c = μ c`,
//! `λ = 1/μ`, separately on the even and odd blocks of `M`.

pub mod symmetric;

use std::cmp::Ordering;

use crate::assembly::{assemble_mass, MassMatrix};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::specfun::{basis_coeff, gjf_weight, jacobi_eval_all, FractionalOrder};

pub use crate::assembly::Parity;
pub use symmetric::{sym_eig, SymEig};

/// Discrete eigenpairs `(λ_{i,N}, ū_i)` in ascending order of `λ`.
///
/// Each `ū_i` holds the coefficients over `φ_0..φ_N`. It vanishes exactly off
/// its parity, satisfies `ūᵀ M ū = 1`, and its largest-magnitude coefficient
/// is positive.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    order: FractionalOrder,
    n_max: usize,
    lambdas: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    parities: Vec<Parity>,
}

impl EigenSolution {
    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    /// Polynomial degree `N`; the system has `N + 1` unknowns.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    /// `λ_{index,N}` with 1-based `index`.
    pub fn lambda(&self, index: usize) -> Option<f64> {
        index.checked_sub(1).and_then(|i| self.lambdas.get(i).copied())
    }
}

struct Candidate {
    lambda: f64,
    parity: Parity,
    local: usize,
    vector: Vec<f64>,
}

fn solve_block(block: &DenseMatrix, parity: Parity) -> Result<Vec<Candidate>> {
    if block.dim() == 0 {
        return Ok(Vec::new());
    }
    let SymEig { values, vectors } = sym_eig(block)?;
    let mut out = Vec::with_capacity(values.len());
    // Ascending μ is descending λ; keep the within-block index in λ order.
    for (rank, (k, mu)) in values.iter().enumerate().rev().enumerate() {
        if mu.is_nan() || *mu <= 0.0 {
            return Err(Error::NonPositiveMass {
                value: *mu,
                parity: parity.as_str(),
            });
        }
        let mut v = vectors.row(k).to_vec();
        let q = block.quadratic_form(&v);
        let norm = if q > 0.0 { q.sqrt() } else { mu.sqrt() };
        let pivot = v.iter().fold(0.0_f64, |m, x| if x.abs() > m.abs() { *x } else { m });
        let scale = if pivot < 0.0 { -1.0 / norm } else { 1.0 / norm };
        v.iter_mut().for_each(|x| *x *= scale);
        out.push(Candidate {
            lambda: 1.0 / mu,
            parity,
            local: rank,
            vector: v,
        });
    }
    Ok(out)
}

fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.lambda
        .total_cmp(&b.lambda)
        .then(a.parity.cmp(&b.parity))
        .then(a.local.cmp(&b.local))
}

/// Solves the Galerkin eigenproblem of degree `n_max` from a prepared mass matrix.
pub fn solve_mass(mass: &MassMatrix) -> Result<EigenSolution> {
    let (even, odd) = rayon::join(
        || solve_block(mass.even_block(), Parity::Even),
        || solve_block(mass.odd_block(), Parity::Odd),
    );
    let mut all = even?;
    all.extend(odd?);
    all.sort_by(candidate_order);

    let dim = mass.n_max() + 1;
    let mut lambdas = Vec::with_capacity(dim);
    let mut vectors = Vec::with_capacity(dim);
    let mut parities = Vec::with_capacity(dim);
    for c in all {
        let mut full = vec![0.0; dim];
        for (k, v) in c.vector.iter().enumerate() {
            full[c.parity.global_index(k)] = *v;
        }
        lambdas.push(c.lambda);
        vectors.push(full);
        parities.push(c.parity);
    }
    Ok(EigenSolution {
        order: mass.order(),
        n_max: mass.n_max(),
        lambdas,
        vectors,
        parities,
    })
}

/// Assembles the mass matrix of degree `n_max` and solves for all eigenpairs.
pub fn solve(order: FractionalOrder, n_max: usize) -> Result<EigenSolution> {
    solve_mass(&assemble_mass(order, n_max))
}

/// `u(x) = Σ_j ū_j c_j J_j^{-a,-a}(x)` for the 1-based eigenfunction `index`.
pub fn eval_eigenfunction(sol: &EigenSolution, index: usize, xs: &[f64]) -> Result<Vec<f64>> {
    let mut out = eval_eigenfunctions(sol, &[index], xs)?;
    Ok(out.pop().unwrap_or_default())
}

/// Several eigenfunctions on the same samples; `result[k][s]` is
/// eigenfunction `indices[k]` at `xs[s]`.
pub fn eval_eigenfunctions(sol: &EigenSolution, indices: &[usize], xs: &[f64]) -> Result<Vec<Vec<f64>>> {
    let max = sol.len();
    if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > max) {
        return Err(Error::EigenIndex { index: bad, max });
    }
    if let Some(&x) = xs.iter().find(|x| x.is_nan() || x.abs() > 1.0) {
        return Err(Error::OutsideInterval(x));
    }
    let order = sol.order;
    let coeffs: Vec<Vec<f64>> = indices
        .iter()
        .map(|&i| {
            sol.vectors[i - 1]
                .iter()
                .enumerate()
                .map(|(j, u)| u * basis_coeff(order, j))
                .collect()
        })
        .collect();
    let mut out = vec![Vec::with_capacity(xs.len()); indices.len()];
    let mut p = vec![0.0; sol.n_max + 1];
    for &x in xs {
        if x.abs() == 1.0 {
            out.iter_mut().for_each(|o| o.push(0.0));
            continue;
        }
        jacobi_eval_all(order.basis_params(), x, &mut p);
        let w = gjf_weight(order.alpha(), x);
        for (o, c) in out.iter_mut().zip(&coeffs) {
            let s: f64 = c.iter().zip(&p).map(|(a, b)| a * b).sum();
            o.push(w * s);
        }
    }
    Ok(out)
}
