//! Jacobi-Galerkin spectral eigensolver for the Riesz fractional derivative of
//! order `2a` on `(-1, 1)` with homogeneous Dirichlet conditions.
//!
//! The Galerkin basis is built from generalized Jacobi functions normalized so
//! that the stiffness matrix is the identity. The discrete eigenproblem is
//! then the symmetric standard problem `M c = μ c` with `λ = 1/μ`. `M` is the
//! closed-form mass matrix, which splits into even and odd blocks.

pub mod analysis;
pub mod assembly;
pub mod cli;
pub mod eig;
pub mod error;
pub mod matrix;
pub mod output;
pub mod quadrature;
pub mod specfun;

pub use analysis::{ConvergenceRow, ConvergenceTable, SpectrumReport};
pub use assembly::{assemble_mass, mass_entry, MassMatrix};
pub use eig::{solve, EigenSolution, Parity};
pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use quadrature::{gauss_jacobi, QuadratureRule};
pub use specfun::{FractionalOrder, JacobiWeightPair, SignedLogMagnitude};
