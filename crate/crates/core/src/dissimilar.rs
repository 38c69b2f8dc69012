//! Maximally dissimilar indistinguishable networks.
//!
//! The program `min ‖vec(Z ⊙ (A + ΦV))‖₁` separates over the columns of `V`,
//! so each column is solved as its own small epigraph LP. The closed-form ℓ2
//! relaxation and its sign certificate are provided alongside.

use alloc::format;
use alloc::vec::Vec;

use crate::model::{is_present, sparsity_mask, NetworkSystem, SparsityMask};
use crate::numerics::{min_norm_solve, min_norm_solve_scaled, solve_lp, LpProblem, LpStatus, Matrix, Vector};
use crate::observability::ObservabilityAnalysis;
use crate::{Error, Result};

/// Residual below which the sign certificate is accepted.
pub const CERTIFICATE_TOL: f64 = 1e-8;

/// Singular values of the masked basis rows below this fraction of
/// `max(1, σ_max)` are treated as zero by the LP.
const LP_RANK_CUTOFF: f64 = 1e-9;

/// Minimiser of `Σ_{mask_i} |offset_i + (basis v)_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnOptimum {
    pub v: Vector,
    pub objective: f64,
}

fn masked_column_l1(w: &Vector, mask: &[bool]) -> f64 {
    w.iter().zip(mask).filter(|(_, &m)| m).map(|(x, _)| x.abs()).sum()
}

/// Solves one column of the masked ℓ1 program.
///
/// Ties between optimal `v` are broken toward minimum Euclidean norm.
///
/// Errors carry column index 0; [`solve_l1`] substitutes the real one.
pub fn min_masked_l1(offset: &Vector, basis: &Matrix, mask: &[bool]) -> Result<ColumnOptimum> {
    let n = offset.len();
    let k = basis.ncols();
    if basis.nrows() != n || mask.len() != n {
        return Err(Error::invalid("offset, basis and mask must have matching lengths"));
    }
    let rows: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
    if k == 0 || rows.is_empty() {
        let v = Vector::zeros(k);
        return Ok(ColumnOptimum { objective: masked_column_l1(offset, mask), v });
    }

    // The objective sees v only through Φ_M v = U S Wᵀv, so the LP runs over
    // q = S Wᵀv with the orthonormal U as constraint matrix. Directions with
    // negligible singular values are dropped.
    let m = rows.len();
    let phi_m = Matrix::from_fn(m, k, |r, c| basis[(rows[r], c)]);
    let svd = phi_m.svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let top = svd.singular_values.iter().copied().fold(1.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&d| svd.singular_values[d] > LP_RANK_CUTOFF * top).collect();
    let r = keep.len();
    if r == 0 {
        let v = Vector::zeros(k);
        return Ok(ColumnOptimum { objective: masked_column_l1(offset, mask), v });
    }

    // Variables: q (free) followed by one epigraph variable per masked entry.
    let mut cost = alloc::vec![0.0; r + m];
    cost[r..].iter_mut().for_each(|c| *c = 1.0);
    let mut cons = Matrix::zeros(2 * m, r + m);
    let mut lo = Vec::with_capacity(2 * m);
    let mut hi = Vec::with_capacity(2 * m);
    for (row, &i) in rows.iter().enumerate() {
        for (c, &d) in keep.iter().enumerate() {
            cons[(2 * row, c)] = u[(row, d)];
            cons[(2 * row + 1, c)] = u[(row, d)];
        }
        cons[(2 * row, r + row)] = -1.0;
        cons[(2 * row + 1, r + row)] = 1.0;
        lo.extend([f64::NEG_INFINITY, -offset[i]]);
        hi.extend([-offset[i], f64::INFINITY]);
    }
    let mut var_lo = alloc::vec![f64::NEG_INFINITY; r];
    var_lo.extend(core::iter::repeat_n(0.0, m));
    let var_hi = alloc::vec![f64::INFINITY; r + m];
    let lp = LpProblem::new(cost, cons, lo, hi, var_lo, var_hi)?;
    let sol = solve_lp(&lp);
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver { column: 0, status: sol.status });
    }
    let v_lp = keep.iter().enumerate().fold(Vector::zeros(k), |acc, (c, &d)| {
        acc + vt.row(d).transpose() * (sol.primal[c] / svd.singular_values[d])
    });
    let obj_lp = masked_column_l1(&(offset + basis * &v_lp), mask);

    // y_i = ∂ objective / ∂ offset_i, the dual certificate of optimality.
    let y: Vec<f64> = (0..m).map(|r| -(sol.duals[2 * r] + sol.duals[2 * r + 1])).collect();
    let v = match min_norm_on_face(offset, basis, &rows, &y, obj_lp, v_lp.clone())? {
        Some(v) => v,
        None => v_lp,
    };
    let objective = masked_column_l1(&(offset + basis * &v), mask);
    Ok(ColumnOptimum { v, objective })
}

/// Minimum-norm point of the optimal face described by the dual `y`.
///
/// Every `v` with `w_i = 0` where `|y_i| < 1` and `y_i w_i ≥ 0` elsewhere
/// attains `yᵀa = opt`. Minimising `½‖v‖²` over that polyhedron is a small
/// QP, solved by a primal active-set method started at the LP vertex.
/// Returns `None` when `y` fails to certify optimality.
fn min_norm_on_face(
    offset: &Vector,
    basis: &Matrix,
    rows: &[usize],
    y: &[f64],
    opt: f64,
    start: Vector,
) -> Result<Option<Vector>> {
    let k = basis.ncols();
    let scale = 1.0 + opt;
    let stationarity = rows.iter().zip(y).fold(Vector::zeros(k), |acc, (&i, &yi)| acc + basis.row(i).transpose() * yi);
    let dual_value: f64 = rows.iter().zip(y).map(|(&i, &yi)| yi * offset[i]).sum();
    if stationarity.norm() > 1e-7 * scale
        || y.iter().any(|yi| yi.abs() > 1.0 + 1e-7)
        || (dual_value - opt).abs() > 1e-7 * scale
    {
        return Ok(None);
    }

    let zero_tol = 1e-9 * (1.0 + offset.amax());
    let mut equalities = Vec::new();
    let mut signs = Vec::new();
    for (&i, &yi) in rows.iter().zip(y) {
        if yi.abs() < 1.0 - 1e-7 {
            equalities.push(i);
        } else {
            signs.push((i, yi.signum()));
        }
    }
    let entry = |v: &Vector, i: usize| offset[i] + basis.row(i).transpose().dot(v);
    // Inequalities in the form g·v ≥ −s_i a_i with g = s_i Φ_i.
    let slack = |v: &Vector, (i, s): (usize, f64)| s * entry(v, i);
    let mut v = start;
    let mut working: Vec<usize> = (0..signs.len()).filter(|&c| slack(&v, signs[c]).abs() <= zero_tol).collect();

    let budget = 20 * (signs.len() + 1);
    for _ in 0..budget {
        let ne = equalities.len();
        let g = Matrix::from_fn(ne + working.len(), k, |r, c| {
            if r < ne {
                basis[(equalities[r], c)]
            } else {
                let (i, s) = signs[working[r - ne]];
                s * basis[(i, c)]
            }
        });
        let h = Vector::from_fn(ne + working.len(), |r, _| {
            if r < ne {
                -offset[equalities[r]]
            } else {
                let (i, s) = signs[working[r - ne]];
                -s * offset[i]
            }
        });
        let target = if g.nrows() == 0 { Vector::zeros(k) } else { min_norm_solve(&g, &h, 0.0)?.x };
        let d = &target - &v;
        if d.norm() > 1e-13 * (1.0 + v.norm()) {
            let mut step = 1.0;
            let mut blocking = None;
            for c in (0..signs.len()).filter(|c| !working.contains(c)) {
                let (i, s) = signs[c];
                let now = slack(&v, signs[c]);
                let rate = s * basis.row(i).transpose().dot(&d);
                if rate < 0.0 {
                    let alpha = (now.max(0.0) / -rate).max(0.0);
                    if alpha < step {
                        step = alpha;
                        blocking = Some(c);
                    }
                }
            }
            v.axpy(step, &d, 1.0);
            if let Some(c) = blocking {
                working.push(c);
                continue;
            }
        }
        // At the minimiser for the current working set: v = Gᵀμ.
        if working.is_empty() {
            break;
        }
        let mu = min_norm_solve(&g.transpose(), &v, 0.0)?.x;
        let worst = (0..working.len()).min_by(|&p, &q| mu[ne + p].total_cmp(&mu[ne + q])).expect("non-empty");
        if mu[ne + worst] >= -1e-10 * (1.0 + v.norm()) {
            break;
        }
        working.remove(worst);
    }

    let objective: f64 = rows.iter().map(|&i| entry(&v, i).abs()).sum();
    Ok((objective <= opt + 1e-9 * scale).then_some(v))
}

/// `Σ_ij |Z_ij M_ij|`.
pub fn masked_l1(mask: &SparsityMask, m: &Matrix) -> f64 {
    mask.apply(m).iter().map(|x| x.abs()).sum()
}

/// `½ ‖vec(A + Z ⊙ (ΦV))‖₂²`.
pub fn l2_objective(a: &Matrix, phi: &Matrix, mask: &SparsityMask, v: &Matrix) -> f64 {
    0.5 * (a + mask.apply(&(phi * v))).norm_squared()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlippedEdge {
    pub row: usize,
    pub col: usize,
    /// `true` if the edge appears, `false` if it disappears.
    pub added: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlipMetric {
    /// Row-major order.
    pub flipped: Vec<FlippedEdge>,
    /// `100 · |flipped| / n²`.
    pub percentage: f64,
}

/// Entries whose presence differs between `a` and `a_new`.
pub fn flip_metric(a: &Matrix, a_new: &Matrix, presence_threshold: f64) -> Result<FlipMetric> {
    if a.shape() != a_new.shape() || a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::invalid(format!(
            "flip metric needs two equal square matrices, got {:?} and {:?}",
            a.shape(),
            a_new.shape()
        )));
    }
    let n = a.nrows();
    let mut flipped = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let before = is_present(a[(i, j)], presence_threshold);
            let after = is_present(a_new[(i, j)], presence_threshold);
            if before != after {
                flipped.push(FlippedEdge { row: i, col: j, added: after });
            }
        }
    }
    let percentage = 100.0 * flipped.len() as f64 / (n * n) as f64;
    Ok(FlipMetric { flipped, percentage })
}

/// Sign condition under which the ℓ2 solution also solves the ℓ1 program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub holds: bool,
    /// `‖Φᵀ(Z ⊙ sgn(A + Z ⊙ (ΦV)))‖_F`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarResult {
    /// `(n − r) × n` coefficients.
    pub v: Matrix,
    /// `ΦV`.
    pub delta: Matrix,
    /// `A + ΦV`.
    pub network: Matrix,
    /// `Σ_ij |Z_ij (A + Δ)_ij|`.
    pub objective: f64,
    pub flips: FlipMetric,
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct L2Solution {
    pub v: Matrix,
    pub delta: Matrix,
}

fn check_consistent(sys: &NetworkSystem, an: &ObservabilityAnalysis, mask: &SparsityMask) -> Result<()> {
    let n = sys.n();
    if an.n() != n || an.phi.nrows() != n || mask.n() != n {
        return Err(Error::invalid("analysis, mask and system disagree on n"));
    }
    Ok(())
}

/// Column-decomposed masked ℓ1 program. The returned result carries no
/// certificate.
pub fn solve_l1(
    sys: &NetworkSystem,
    an: &ObservabilityAnalysis,
    mask: &SparsityMask,
    presence_threshold: f64,
) -> Result<DissimilarResult> {
    check_consistent(sys, an, mask)?;
    let (n, k) = (sys.n(), an.nullity());
    let mut v = Matrix::zeros(k, n);
    for j in 0..n {
        let col = sys.a().column(j).into_owned();
        let opt = min_masked_l1(&col, &an.phi, &mask.column(j)).map_err(|e| match e {
            Error::Solver { status, .. } => Error::Solver { column: j, status },
            other => other,
        })?;
        v.set_column(j, &opt.v);
    }
    assemble(sys, an, mask, v, presence_threshold)
}

fn assemble(
    sys: &NetworkSystem,
    an: &ObservabilityAnalysis,
    mask: &SparsityMask,
    v: Matrix,
    presence_threshold: f64,
) -> Result<DissimilarResult> {
    let delta = &an.phi * &v;
    let network = sys.a() + &delta;
    let objective = masked_l1(mask, &network);
    let flips = flip_metric(sys.a(), &network, presence_threshold)?;
    Ok(DissimilarResult { v, delta, network, objective, flips, certificate: None })
}

/// Minimum-norm solution of `Φᵀ(A + Z ⊙ (ΦV)) = 0`, column by column.
pub fn solve_l2(sys: &NetworkSystem, an: &ObservabilityAnalysis, mask: &SparsityMask) -> Result<L2Solution> {
    check_consistent(sys, an, mask)?;
    let (n, k) = (sys.n(), an.nullity());
    let phi = &an.phi;
    let mut v = Matrix::zeros(k, n);
    if k > 0 {
        for j in 0..n {
            let z = mask.matrix().column(j);
            let weighted = Matrix::from_fn(n, k, |i, c| z[i] * phi[(i, c)]);
            let lhs = phi.transpose() * weighted;
            let rhs = -(phi.transpose() * sys.a().column(j));
            // ‖Φ‖₂ = 1, so singular values of ΦᵀDΦ are judged on an absolute scale.
            v.set_column(j, &min_norm_solve_scaled(&lhs, &rhs, 0.0, 1.0)?.x);
        }
    }
    let delta = phi * &v;
    Ok(L2Solution { v, delta })
}

/// Evaluates the sign certificate at `v`; signs of entries with magnitude
/// at or below `presence_threshold` count as zero.
pub fn check_equivalence(
    sys: &NetworkSystem,
    an: &ObservabilityAnalysis,
    mask: &SparsityMask,
    v: &Matrix,
    presence_threshold: f64,
) -> Result<Certificate> {
    check_consistent(sys, an, mask)?;
    if v.shape() != (an.nullity(), sys.n()) {
        return Err(Error::invalid(format!("V must be {}x{}", an.nullity(), sys.n())));
    }
    let inner = sys.a() + mask.apply(&(&an.phi * v));
    let signs = inner.map(|x| if is_present(x, presence_threshold) { x.signum() } else { 0.0 });
    let residual = (an.phi.transpose() * mask.apply(&signs)).norm();
    Ok(Certificate { holds: residual <= CERTIFICATE_TOL, residual })
}

/// End-to-end driver: mask, ℓ1 program and, optionally, the ℓ2 certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissimilarSolver {
    pub presence_threshold: f64,
    pub certify: bool,
}

impl Default for DissimilarSolver {
    fn default() -> Self {
        DissimilarSolver { presence_threshold: crate::model::DEFAULT_PRESENCE_THRESHOLD, certify: true }
    }
}

impl DissimilarSolver {
    pub fn solve(&self, sys: &NetworkSystem, an: &ObservabilityAnalysis) -> Result<DissimilarResult> {
        let mask = sparsity_mask(sys.a(), self.presence_threshold)?;
        let mut result = solve_l1(sys, an, &mask, self.presence_threshold)?;
        if self.certify {
            let l2 = solve_l2(sys, an, &mask)?;
            result.certificate = Some(check_equivalence(sys, an, &mask, &l2.v, self.presence_threshold)?);
        }
        Ok(result)
    }
}
