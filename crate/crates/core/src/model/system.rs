use alloc::format;
use alloc::vec::Vec;

use crate::numerics::{ensure_finite, ensure_square, svd_nullspace, Matrix};
use crate::{Error, Result};

/// Linear network `ẋ = Ax`, `y = Cx`.
///
/// `A[(i, j)]` is the weight of the edge from node `j` into node `i`; `C`
/// selects the measured nodes and has full row rank.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSystem {
    a: Matrix,
    c: Matrix,
}

impl NetworkSystem {
    pub fn new(a: Matrix, c: Matrix) -> Result<Self> {
        ensure_square(&a, "A")?;
        ensure_finite(&a, "A")?;
        ensure_finite(&c, "C")?;
        let n = a.nrows();
        if c.ncols() != n {
            return Err(Error::invalid(format!("C has {} columns, A is {n}x{n}", c.ncols())));
        }
        if c.nrows() == 0 || c.nrows() > n {
            return Err(Error::invalid(format!("C must have between 1 and {n} rows, got {}", c.nrows())));
        }
        if svd_nullspace(&c.transpose(), 0.0)?.rank != c.nrows() {
            return Err(Error::invalid("C must have full row rank"));
        }
        Ok(NetworkSystem { a, c })
    }

    /// System measuring the given nodes; see [`sensor_matrix`].
    pub fn with_sensors(a: Matrix, measured: &[usize]) -> Result<Self> {
        let c = sensor_matrix(a.nrows(), measured)?;
        Self::new(a, c)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Number of measurements.
    pub fn p(&self) -> usize {
        self.c.nrows()
    }

    /// Indices of the measured nodes when every row of `C` is a standard basis
    /// vector, `None` for general measurement matrices.
    pub fn measured_nodes(&self) -> Option<Vec<usize>> {
        self.c
            .row_iter()
            .map(|row| {
                let ones: Vec<usize> = (0..row.len()).filter(|&j| row[j] != 0.0).collect();
                match ones.as_slice() {
                    [j] if row[*j] == 1.0 => Some(*j),
                    _ => None,
                }
            })
            .collect()
    }

    /// The same measurement scheme on `A + Δ`.
    pub fn perturbed(&self, delta: &Matrix) -> Result<NetworkSystem> {
        if delta.shape() != self.a.shape() {
            return Err(Error::invalid(format!(
                "Δ is {}x{}, expected {}x{}",
                delta.nrows(),
                delta.ncols(),
                self.n(),
                self.n()
            )));
        }
        ensure_finite(delta, "Δ")?;
        Ok(NetworkSystem { a: &self.a + delta, c: self.c.clone() })
    }
}

/// `p × n` selector whose `k`-th row is the standard basis vector of the
/// `k`-th measured node in ascending order.
pub fn sensor_matrix(n: usize, measured: &[usize]) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::invalid("network must have at least one node"));
    }
    if measured.is_empty() {
        return Err(Error::invalid("at least one node must be measured"));
    }
    let mut nodes = measured.to_vec();
    nodes.sort_unstable();
    if let Some(&bad) = nodes.iter().find(|&&i| i >= n) {
        return Err(Error::invalid(format!("measured node {bad} out of range for n = {n}")));
    }
    if let Some(w) = nodes.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::invalid(format!("node {} measured twice", w[0])));
    }
    let mut c = Matrix::zeros(nodes.len(), n);
    for (k, &i) in nodes.iter().enumerate() {
        c[(k, i)] = 1.0;
    }
    Ok(c)
}
