//! Dense real-matrix kernel.
//!
//! Everything above this module is expressed with these few primitives:
//! SVD-based nullspaces and minimum-norm solves, a Kronecker-form Lyapunov
//! solver, a Padé matrix exponential and a small dense simplex.

use alloc::format;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

mod expm;
pub mod lp;
mod lyapunov;
mod nullspace;

pub use expm::{expm, matrix_exponential_apply};
pub use lp::{solve_lp, LpProblem, LpSolution, LpStatus};
pub use lyapunov::solve_lyapunov;
pub use nullspace::{default_rank_tolerance, min_norm_solve, min_norm_solve_scaled, svd_nullspace, MinNormSolution, Nullspace};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Rejects matrices with NaN or infinite entries.
pub fn ensure_finite(m: &Matrix, what: &str) -> Result<()> {
    match m.iter().position(|x| !x.is_finite()) {
        None => Ok(()),
        Some(k) => {
            let (r, c) = (k % m.nrows(), k / m.nrows());
            Err(Error::invalid(format!("{what} has a non-finite entry at ({r}, {c})")))
        }
    }
}

pub(crate) fn ensure_square(m: &Matrix, what: &str) -> Result<()> {
    if m.nrows() == m.ncols() && m.nrows() > 0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{what} must be square and non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

/// `blkdiag(a, b)`.
pub fn block_diagonal(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = Matrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}
