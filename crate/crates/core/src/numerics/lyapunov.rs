use alloc::vec::Vec;

use crate::numerics::{ensure_finite, ensure_square, min_norm_solve, Matrix, Vector};
use crate::{error::EigenPair, Error, Result};

/// Relative size of `|λᵢ + λⱼ|` below which the Kronecker-sum operator is
/// treated as singular and the minimum-norm route is taken.
const PAIR_SINGULAR_TOL: f64 = 1e-8;

/// Observability Gramian `W` of `(Ā, C̄)`: the symmetric solution of
/// `W Ā + Āᵀ W = −C̄ᵀ C̄`.
///
/// The equation is solved in vectorized form
/// `(I ⊗ Āᵀ + Āᵀ ⊗ I) vec(W) = −vec(C̄ᵀC̄)`. When the operator is singular
/// (an eigenvalue pair of `Ā` sums to zero) but the system is consistent, the
/// minimum-Frobenius-norm solution is returned; an inconsistent system yields
/// [`Error::GramianUndefined`].
pub fn solve_lyapunov(abar: &Matrix, cbar: &Matrix) -> Result<Matrix> {
    ensure_square(abar, "Ā")?;
    ensure_finite(abar, "Ā")?;
    ensure_finite(cbar, "C̄")?;
    let m = abar.nrows();
    if cbar.ncols() != m {
        return Err(Error::InvalidInput(alloc::format!(
            "C̄ has {} columns, Ā is {m}x{m}",
            cbar.ncols()
        )));
    }
    let q = cbar.tr_mul(cbar);
    let at = abar.transpose();
    let id = Matrix::identity(m, m);
    let op = id.kronecker(&at) + at.kronecker(&id);
    let rhs = -Vector::from_column_slice(q.as_slice());

    let eigs: Vec<(f64, f64)> = abar.clone().complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    let scale = eigs.iter().map(|&(re, im)| libm::hypot(re, im)).fold(1.0, f64::max);
    let pair_sum = |a: (f64, f64), b: (f64, f64)| libm::hypot(a.0 + b.0, a.1 + b.1);
    let min_pair = eigs
        .iter()
        .flat_map(|&a| eigs.iter().map(move |&b| pair_sum(a, b)))
        .fold(f64::INFINITY, f64::min);

    let tol = 1e-8 * (1.0 + q.norm());
    let vec_w = if min_pair > PAIR_SINGULAR_TOL * scale {
        op.clone().full_piv_lu().solve(&rhs)
    } else {
        None
    };
    let (vec_w, residual) = match vec_w {
        Some(x) => {
            let r = (&op * &x - &rhs).norm();
            (x, r)
        }
        None => {
            let sol = min_norm_solve(&op, &rhs, 0.0)?;
            (sol.x, sol.residual)
        }
    };
    if residual > tol || !vec_w.iter().all(|x| x.is_finite()) {
        let mut pairs: Vec<(f64, EigenPair)> = Vec::new();
        for (i, &a) in eigs.iter().enumerate() {
            for &b in &eigs[i..] {
                let s = pair_sum(a, b);
                if s <= 1e-6 * scale {
                    pairs.push((s, (a, b)));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        return Err(Error::GramianUndefined { pairs: pairs.into_iter().map(|p| p.1).collect(), residual });
    }
    let w = Matrix::from_column_slice(m, m, vec_w.as_slice());
    Ok((&w + w.transpose()) * 0.5)
}
