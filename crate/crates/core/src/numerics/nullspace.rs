use alloc::vec::Vec;

use crate::numerics::{ensure_finite, Matrix, Vector};
use crate::{Error, Result};

/// Default relative rank tolerance `max(rows, cols) · ε`; singular values at
/// or below `tol · σ_max` count as zero.
pub fn default_rank_tolerance(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

fn relative_tolerance(rank_tol: f64, rows: usize, cols: usize) -> Result<f64> {
    if !(rank_tol >= 0.0) || !rank_tol.is_finite() {
        return Err(Error::InvalidInput(alloc::format!(
            "rank tolerance must be finite and non-negative, got {rank_tol}"
        )));
    }
    Ok(if rank_tol == 0.0 { default_rank_tolerance(rows, cols) } else { rank_tol })
}

/// Numerical rank and an orthonormal basis of the nullspace.
#[derive(Debug, Clone)]
pub struct Nullspace {
    pub rank: usize,
    /// `cols × (cols − rank)`, orthonormal columns.
    pub basis: Matrix,
    /// Singular values in decreasing order.
    pub singular_values: Vec<f64>,
}

/// Singular values (descending) and the matching right singular vectors as
/// columns of a square `cols × cols` matrix.
fn right_singular_pairs(m: &Matrix) -> (Vec<f64>, Matrix) {
    let (rows, cols) = m.shape();
    // Tall inputs are reduced to their R factor; wide ones are padded with
    // zero rows. Neither changes singular values or the row space.
    let square = if rows > cols {
        m.clone().qr().r()
    } else if rows < cols {
        let mut padded = Matrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values = order.iter().map(|&k| svd.singular_values[k]).collect();
    let mut v = Matrix::zeros(cols, cols);
    for (dst, &src) in order.iter().enumerate() {
        v.set_column(dst, &v_t.row(src).transpose());
    }
    (values, v)
}

/// Numerical rank and orthonormal nullspace basis of `m`.
///
/// `rank_tol` is relative to the largest singular value; pass `0.0` for
/// [`default_rank_tolerance`].
pub fn svd_nullspace(m: &Matrix, rank_tol: f64) -> Result<Nullspace> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("nullspace of an empty matrix"));
    }
    ensure_finite(m, "matrix")?;
    let rel = relative_tolerance(rank_tol, rows, cols)?;
    let (values, v) = right_singular_pairs(m);
    let threshold = rel * values[0];
    let rank = if values[0] == 0.0 {
        0
    } else {
        values.iter().take_while(|&&s| s > threshold).count()
    };
    let basis = v.columns(rank, cols - rank).into_owned();
    Ok(Nullspace { rank, basis, singular_values: values })
}

/// Minimum-norm least-squares solution of `a x = b`.
#[derive(Debug, Clone)]
pub struct MinNormSolution {
    pub x: Vector,
    pub rank: usize,
    /// `‖a x − b‖₂`.
    pub residual: f64,
}

/// Minimum-norm least-squares solve through the SVD pseudo-inverse.
/// `rank_tol` follows the same convention as [`svd_nullspace`].
pub fn min_norm_solve(a: &Matrix, b: &Vector, rank_tol: f64) -> Result<MinNormSolution> {
    solve_pinv(a, b, rank_tol, None)
}

/// As [`min_norm_solve`], but singular values are compared against
/// `rank_tol · reference` instead of `rank_tol · σ_max(a)`. Use when the
/// natural scale of the problem is known and `a` itself may be tiny.
pub fn min_norm_solve_scaled(a: &Matrix, b: &Vector, rank_tol: f64, reference: f64) -> Result<MinNormSolution> {
    if !(reference > 0.0) || !reference.is_finite() {
        return Err(Error::invalid("reference scale must be positive and finite"));
    }
    solve_pinv(a, b, rank_tol, Some(reference))
}

fn solve_pinv(a: &Matrix, b: &Vector, rank_tol: f64, reference: Option<f64>) -> Result<MinNormSolution> {
    let (rows, cols) = a.shape();
    if b.len() != rows {
        return Err(Error::invalid(alloc::format!(
            "right-hand side has length {}, expected {rows}",
            b.len()
        )));
    }
    if cols == 0 {
        return Ok(MinNormSolution { x: Vector::zeros(0), rank: 0, residual: b.norm() });
    }
    if rows == 0 {
        return Ok(MinNormSolution { x: Vector::zeros(cols), rank: 0, residual: 0.0 });
    }
    ensure_finite(a, "matrix")?;
    let rel = relative_tolerance(rank_tol, rows, cols)?;
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let threshold = rel * reference.unwrap_or(smax);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut x = Vector::zeros(cols);
    let mut rank = 0;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if smax > 0.0 && s > threshold {
            rank += 1;
            let coeff = u.column(k).dot(b) / s;
            x.axpy(coeff, &v_t.row(k).transpose(), 1.0);
        }
    }
    let residual = (a * &x - b).norm();
    Ok(MinNormSolution { x, rank, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_empty_nullspace() {
        let ns = svd_nullspace(&Matrix::identity(5, 5), 0.0).unwrap();
        assert_eq!(ns.rank, 5);
        assert_eq!(ns.basis.ncols(), 0);
    }

    #[test]
    fn zero_matrix_is_all_nullspace() {
        let ns = svd_nullspace(&Matrix::zeros(2, 3), 0.0).unwrap();
        assert_eq!(ns.rank, 0);
        assert_eq!(ns.basis.ncols(), 3);
    }

    #[test]
    fn wide_matrix_nullspace() {
        let m = Matrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = svd_nullspace(&m, 0.0).unwrap();
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.basis.ncols(), 2);
        assert!((&m * &ns.basis).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_finite_and_negative_tolerance() {
        let mut m = Matrix::identity(2, 2);
        m[(1, 0)] = f64::NAN;
        assert!(matches!(svd_nullspace(&m, 0.0), Err(Error::InvalidInput(_))));
        assert!(svd_nullspace(&Matrix::identity(2, 2), -1.0).is_err());
    }

    #[test]
    fn min_norm_picks_smallest_solution() {
        let a = Matrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let sol = min_norm_solve(&a, &Vector::from_vec(alloc::vec![2.0]), 0.0).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-14 && (sol.x[1] - 1.0).abs() < 1e-14);
        assert_eq!(sol.rank, 1);
    }
}
