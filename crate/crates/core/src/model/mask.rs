use alloc::vec::Vec;

use crate::numerics::{ensure_finite, Matrix};
use crate::{Error, Result};

/// Edges with `|weight|` at or below this count as absent.
pub const DEFAULT_PRESENCE_THRESHOLD: f64 = 1e-5;

#[inline]
pub fn is_present(weight: f64, threshold: f64) -> bool {
    weight.abs() > threshold
}

/// Binary pattern `Z` of a weighted adjacency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityMask {
    z: Matrix,
}

impl SparsityMask {
    /// The 0/1 matrix `Z`.
    pub fn matrix(&self) -> &Matrix {
        &self.z
    }

    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.z[(i, j)] != 0.0
    }

    pub fn column(&self, j: usize) -> Vec<bool> {
        self.z.column(j).iter().map(|&x| x != 0.0).collect()
    }

    pub fn count(&self) -> usize {
        self.z.iter().filter(|&&x| x != 0.0).count()
    }

    /// `Z ⊙ m`.
    pub fn apply(&self, m: &Matrix) -> Matrix {
        self.z.component_mul(m)
    }
}

/// `Z_ij = 1` exactly when `|A_ij| > presence_threshold`.
pub fn sparsity_mask(a: &Matrix, presence_threshold: f64) -> Result<SparsityMask> {
    if !(presence_threshold >= 0.0) {
        return Err(Error::invalid("presence threshold must be non-negative"));
    }
    ensure_finite(a, "A")?;
    let z = a.map(|x| if is_present(x, presence_threshold) { 1.0 } else { 0.0 });
    Ok(SparsityMask { z })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_semantics() {
        let a = Matrix::from_row_slice(2, 2, &[1e-6, -2.0, 0.0, 1e-5]);
        let z = sparsity_mask(&a, DEFAULT_PRESENCE_THRESHOLD).unwrap();
        assert_eq!(z.matrix(), &Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(z.count(), 1);
        assert_eq!(sparsity_mask(&Matrix::zeros(3, 3), 1e-5).unwrap().count(), 0);
    }

    #[test]
    fn idempotent_on_pattern() {
        let a = Matrix::from_row_slice(2, 2, &[0.3, 0.0, -7.0, 1e-9]);
        let z = sparsity_mask(&a, 1e-5).unwrap();
        let zz = sparsity_mask(z.matrix(), 1e-5).unwrap();
        assert_eq!(z, zz);
    }
}
