//! Galerkin mass matrix in the normalized generalized-Jacobi basis.
//!
//! The stiffness matrix in this basis is the identity, so it is never
//! stored; [`stiffness_check`] measures how far the quadrature oracle
//! departs from it.

use std::f64::consts::LN_2;

use rayon::prelude::*;

use crate::matrix::DenseMatrix;
use crate::quadrature::oracle_stiffness_matrix;
use crate::specfun::{ln_gamma, log_gamma_ratio, recip_gamma_signed, FractionalOrder};

/// `M_ij = (φ_j, φ_i)` in closed form.
///
/// Zero for odd `i + j`. Otherwise the entry is assembled in the log domain
/// using `(i+j)! / (2^{i+j} ((i+j)/2)!) = Γ(m + 1/2)/√π` with `m = (i+j)/2`.
/// Its sign is `(-1)^{(j-i)/2}` times the signs of `1/Γ(a + (i-j)/2 + 1)` and
/// `1/Γ(a + (j-i)/2 + 1)`. Either reciprocal gamma vanishes at a pole, which
/// makes the matrix banded for integer `a`.
pub fn mass_entry(order: FractionalOrder, i: usize, j: usize) -> f64 {
    if (i + j) % 2 == 1 {
        return 0.0;
    }
    let alpha = order.alpha();
    let half_sum = ((i + j) / 2) as f64;
    let half_diff = (i as f64 - j as f64) / 2.0;

    let r1 = recip_gamma_signed(alpha + half_diff + 1.0);
    let r2 = recip_gamma_signed(alpha - half_diff + 1.0);
    let recip = r1 * r2;
    if recip.is_zero() {
        return 0.0;
    }
    let parity_sign = if (i.abs_diff(j) / 2).is_multiple_of(2) { 1 } else { -1 };
    let sign = parity_sign * i32::from(recip.sign());

    let (fi, fj) = (i as f64, j as f64);
    let log = 0.5 * ((2.0 * fi + 2.0 * alpha + 1.0).ln() + (2.0 * fj + 2.0 * alpha + 1.0).ln())
        + ln_gamma(2.0 * alpha + 1.0)
        - (2.0 * alpha + 1.0) * LN_2
        + log_gamma_ratio(half_sum + 0.5, half_sum + 2.0 * alpha + 1.5)
        + recip.log_mag();
    f64::from(sign) * log.exp()
}

/// `M_00 = (2a+1) √π Γ(2a+1) / (2^{2a+1} Γ(2a+3/2) Γ(a+1)^2)`; `1/M_00` is the
/// one-mode Rayleigh quotient and hence an upper bound on `λ_1`.
pub fn mass_diagonal_zero(order: FractionalOrder) -> f64 {
    let alpha = order.alpha();
    let log = (2.0 * alpha + 1.0).ln() + 0.5 * std::f64::consts::PI.ln() + ln_gamma(2.0 * alpha + 1.0)
        - (2.0 * alpha + 1.0) * LN_2
        - ln_gamma(2.0 * alpha + 1.5)
        - 2.0 * ln_gamma(alpha + 1.0);
    log.exp()
}

/// Which basis indices a parity block holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(index: usize) -> Self {
        if index.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }

    /// Global basis index of local row `k` of this block.
    pub fn global_index(&self, k: usize) -> usize {
        match self {
            Parity::Even => 2 * k,
            Parity::Odd => 2 * k + 1,
        }
    }

    /// Number of indices of this parity among `0..=n_max`.
    pub fn block_len(&self, n_max: usize) -> usize {
        match self {
            Parity::Even => n_max / 2 + 1,
            Parity::Odd => n_max.div_ceil(2),
        }
    }
}

/// Mass matrix for basis indices `0..=n_max` with its two parity blocks.
#[derive(Debug, Clone)]
pub struct MassMatrix {
    order: FractionalOrder,
    n_max: usize,
    entries: DenseMatrix,
    even: DenseMatrix,
    odd: DenseMatrix,
}

impl MassMatrix {
    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn entries(&self) -> &DenseMatrix {
        &self.entries
    }

    pub fn block(&self, parity: Parity) -> &DenseMatrix {
        match parity {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    pub fn even_block(&self) -> &DenseMatrix {
        &self.even
    }

    pub fn odd_block(&self) -> &DenseMatrix {
        &self.odd
    }
}

/// Fills the full symmetric mass matrix (rows in parallel) and both blocks.
pub fn assemble_mass(order: FractionalOrder, n_max: usize) -> MassMatrix {
    let dim = n_max + 1;
    let upper: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|i| (i..dim).map(|j| mass_entry(order, i, j)).collect())
        .collect();
    let mut entries = DenseMatrix::zeros(dim);
    for (i, row) in upper.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            entries[(i, i + off)] = v;
            entries[(i + off, i)] = v;
        }
    }
    let even_idx: Vec<usize> = (0..dim).step_by(2).collect();
    let odd_idx: Vec<usize> = (1..dim).step_by(2).collect();
    let even = entries.select(&even_idx);
    let odd = entries.select(&odd_idx);
    MassMatrix {
        order,
        n_max,
        entries,
        even,
        odd,
    }
}

/// `max_{i,j <= n_max} |c_i c_j (D^a J_j, D^a J_i) - δ_ij|` with the inner
/// products taken from the quadrature oracle.
pub fn stiffness_check(order: FractionalOrder, n_max: usize) -> f64 {
    let s = oracle_stiffness_matrix(order, n_max);
    let mut worst = 0.0_f64;
    for i in 0..=n_max {
        for j in 0..=n_max {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s[(i, j)] - target).abs());
        }
    }
    worst
}

/// Largest `|M_ij - oracle_ij|` over the matrix, and the largest `|M_ij|`.
pub fn oracle_deviation(mass: &MassMatrix) -> (f64, f64) {
    let oracle = crate::quadrature::oracle_mass_matrix(mass.order, mass.n_max);
    let dev = mass
        .entries
        .as_slice()
        .iter()
        .zip(oracle.as_slice())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    (dev, mass.entries.max_abs())
}
