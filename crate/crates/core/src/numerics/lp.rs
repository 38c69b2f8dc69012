//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems have the form
//!
//! ```text
//! min cᵀx   s.t.   row_lower ≤ M x ≤ row_upper,   var_lower ≤ x ≤ var_upper
//! ```
//!
//! with infinite bounds allowed. Results are deterministic for a fixed input:
//! the entering column is always the lowest-indexed improving one and ties in
//! the ratio test go to the lowest-indexed basic variable.

use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::{ensure_finite, Matrix};
use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
/// An improving column with no pivot is a ray only if its reduced cost is
/// significant next to its entries.
const RAY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
    /// Pivot budget exhausted. Bland's rule cannot cycle in exact arithmetic,
    /// so this only signals severe round-off.
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpProblem {
    cost: Vec<f64>,
    constraints: Matrix,
    row_lower: Vec<f64>,
    row_upper: Vec<f64>,
    var_lower: Vec<f64>,
    var_upper: Vec<f64>,
}

impl LpProblem {
    pub fn new(
        cost: Vec<f64>,
        constraints: Matrix,
        row_lower: Vec<f64>,
        row_upper: Vec<f64>,
        var_lower: Vec<f64>,
        var_upper: Vec<f64>,
    ) -> Result<Self> {
        let n = cost.len();
        let m = constraints.nrows();
        if constraints.ncols() != n && m > 0 {
            return Err(Error::InvalidInput(alloc::format!(
                "constraint matrix has {} columns for {n} variables",
                constraints.ncols()
            )));
        }
        if row_lower.len() != m || row_upper.len() != m {
            return Err(Error::invalid("row bound vectors must match the constraint count"));
        }
        if var_lower.len() != n || var_upper.len() != n {
            return Err(Error::invalid("variable bound vectors must match the variable count"));
        }
        if cost.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("cost vector must be finite"));
        }
        ensure_finite(&constraints, "constraint matrix")?;
        let bounds_ok = |lo: &[f64], hi: &[f64]| {
            lo.iter().zip(hi).all(|(&l, &h)| !l.is_nan() && !h.is_nan() && l <= h && l < f64::INFINITY && h > f64::NEG_INFINITY)
        };
        if !bounds_ok(&row_lower, &row_upper) || !bounds_ok(&var_lower, &var_upper) {
            return Err(Error::invalid("bounds must satisfy lower ≤ upper"));
        }
        let constraints = if m == 0 { Matrix::zeros(0, n) } else { constraints };
        Ok(LpProblem { cost, constraints, row_lower, row_upper, var_lower, var_upper })
    }

    pub fn num_variables(&self) -> usize {
        self.cost.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.nrows()
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub objective: f64,
    /// One multiplier per constraint row, `∂ objective / ∂ bound` of the
    /// active side (zero for inactive rows).
    pub duals: Vec<f64>,
    /// `Σ |xⱼ dⱼ|` over the standard-form variables at termination.
    pub complementary_slackness: f64,
}

/// Affine map from standard-form columns back to one original variable.
#[derive(Clone)]
struct VarMap {
    offset: f64,
    parts: [(usize, f64); 2],
    nparts: usize,
}

struct StdRow {
    coeffs: Vec<f64>,
    slack: f64,
    rhs: f64,
    origin: Option<usize>,
}

struct Tableau {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.data[r * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let inv = 1.0 / self.data[pr * w + pc];
        for v in &mut self.data[pr * w..(pr + 1) * w] {
            *v *= inv;
        }
        self.data[pr * w + pc] = 1.0;
        let (before, rest) = self.data.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[pc];
            if f != 0.0 {
                for (x, &p) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * p;
                }
                row[pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    /// Loads `costs` into the objective row as reduced costs for the current
    /// basis.
    fn set_objective(&mut self, costs: &[f64]) {
        let w = self.cols + 1;
        let obj = self.rows;
        let row = &mut self.data[obj * w..(obj + 1) * w];
        row[..self.cols].copy_from_slice(&costs[..self.cols]);
        row[self.cols] = 0.0;
        for r in 0..self.rows {
            let cb = costs[self.basis[r]];
            if cb != 0.0 {
                for c in 0..w {
                    self.data[obj * w + c] -= cb * self.data[r * w + c];
                }
            }
        }
    }

    /// Runs Bland-rule pivots over columns `< allowed`. When `bounded` is set
    /// the objective is known to be bounded below, so an improving column
    /// without a usable pivot is numerically flat and gets skipped. Otherwise
    /// such a column is skipped only when its reduced cost is round-off
    /// relative to its entries.
    fn optimize(&mut self, allowed: usize, bounded: bool, budget: &mut usize) -> LpStatus {
        let mut skipped = vec![false; allowed];
        loop {
            if *budget == 0 {
                return LpStatus::IterationLimit;
            }
            *budget -= 1;
            let Some(pc) = (0..allowed).find(|&c| !skipped[c] && self.at(self.rows, c) < -COST_TOL) else {
                return LpStatus::Optimal;
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                            if ratio < bratio && !tie || tie && self.basis[r] < self.basis[br] {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            match best {
                None => {
                    let scale = (0..self.rows).map(|r| self.at(r, pc).abs()).fold(1.0, f64::max);
                    if bounded || self.at(self.rows, pc) > -RAY_TOL * scale {
                        skipped[pc] = true;
                    } else {
                        return LpStatus::Unbounded;
                    }
                }
                Some((pr, _)) => {
                    self.pivot(pr, pc);
                    skipped.iter_mut().for_each(|s| *s = false);
                }
            }
        }
    }
}

/// Solves `p` to optimality or reports why it cannot.
pub fn solve_lp(p: &LpProblem) -> LpSolution {
    let n = p.num_variables();
    let m = p.num_constraints();

    // Variables: shift finite lower bounds to zero, reflect upper-only
    // variables, split free ones.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (lo, hi) = (p.var_lower[j], p.var_upper[j]);
        let map = if lo.is_finite() {
            if hi.is_finite() {
                bound_rows.push((ncols, hi - lo));
            }
            VarMap { offset: lo, parts: [(ncols, 1.0), (0, 0.0)], nparts: 1 }
        } else if hi.is_finite() {
            VarMap { offset: hi, parts: [(ncols, -1.0), (0, 0.0)], nparts: 1 }
        } else {
            ncols += 1;
            VarMap { offset: 0.0, parts: [(ncols - 1, 1.0), (ncols, -1.0)], nparts: 2 }
        };
        ncols += 1;
        maps.push(map);
    }
    let nstruct = ncols;

    let mut std_rows: Vec<StdRow> = Vec::new();
    for i in 0..m {
        let mut coeffs = vec![0.0; nstruct];
        let mut shift = 0.0;
        for (j, map) in maps.iter().enumerate() {
            let a = p.constraints[(i, j)];
            if a != 0.0 {
                shift += a * map.offset;
                for &(col, coef) in &map.parts[..map.nparts] {
                    coeffs[col] += a * coef;
                }
            }
        }
        let (lo, hi) = (p.row_lower[i] - shift, p.row_upper[i] - shift);
        if lo == hi {
            std_rows.push(StdRow { coeffs, slack: 0.0, rhs: hi, origin: Some(i) });
            continue;
        }
        if hi.is_finite() {
            std_rows.push(StdRow { coeffs: coeffs.clone(), slack: 1.0, rhs: hi, origin: Some(i) });
        }
        if lo.is_finite() {
            std_rows.push(StdRow { coeffs, slack: -1.0, rhs: lo, origin: Some(i) });
        }
    }
    for &(col, width) in &bound_rows {
        let mut coeffs = vec![0.0; nstruct];
        coeffs[col] = 1.0;
        std_rows.push(StdRow { coeffs, slack: 1.0, rhs: width, origin: None });
    }

    let rows = std_rows.len();
    let mut flipped = vec![false; rows];
    for (r, row) in std_rows.iter_mut().enumerate() {
        if row.rhs < 0.0 {
            flipped[r] = true;
            row.rhs = -row.rhs;
            row.slack = -row.slack;
            for c in &mut row.coeffs {
                *c = -*c;
            }
        }
    }

    // Column layout: structural | slacks | artificials.
    let mut slack_col = vec![usize::MAX; rows];
    let mut next = nstruct;
    for (r, row) in std_rows.iter().enumerate() {
        if row.slack != 0.0 {
            slack_col[r] = next;
            next += 1;
        }
    }
    let first_artificial = next;
    let mut init_col = vec![usize::MAX; rows];
    for (r, row) in std_rows.iter().enumerate() {
        if row.slack > 0.0 {
            init_col[r] = slack_col[r];
        } else {
            init_col[r] = next;
            next += 1;
        }
    }
    let total = next;

    let w = total + 1;
    let mut data = vec![0.0; (rows + 1) * w];
    for (r, row) in std_rows.iter().enumerate() {
        let line = &mut data[r * w..(r + 1) * w];
        line[..nstruct].copy_from_slice(&row.coeffs);
        if row.slack != 0.0 {
            line[slack_col[r]] = row.slack;
        }
        line[init_col[r]] = 1.0;
        line[total] = row.rhs;
    }
    let mut tab = Tableau { rows, cols: total, data, basis: init_col.clone() };
    let mut budget = 200 * (rows + total) + 1000;

    let finish = |status: LpStatus| LpSolution {
        status,
        primal: vec![0.0; n],
        objective: match status {
            LpStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::NAN,
        },
        duals: vec![0.0; m],
        complementary_slackness: f64::NAN,
    };

    if first_artificial < total {
        let mut phase1 = vec![0.0; total];
        for c in &mut phase1[first_artificial..] {
            *c = 1.0;
        }
        tab.set_objective(&phase1);
        let status = tab.optimize(total, true, &mut budget);
        if status == LpStatus::IterationLimit {
            return finish(status);
        }
        let scale = std_rows.iter().fold(1.0, |acc: f64, r| acc.max(r.rhs.abs()));
        let infeasibility = -tab.rhs(rows);
        if infeasibility > FEAS_TOL * scale {
            return finish(LpStatus::Infeasible);
        }
        for r in 0..rows {
            if tab.basis[r] >= first_artificial {
                if let Some(c) = (0..first_artificial).find(|&c| tab.at(r, c).abs() > 1e-9) {
                    tab.pivot(r, c);
                }
            }
        }
    }

    let mut costs = vec![0.0; total];
    for (j, map) in maps.iter().enumerate() {
        for &(col, coef) in &map.parts[..map.nparts] {
            costs[col] += p.cost[j] * coef;
        }
    }
    tab.set_objective(&costs);
    let status = tab.optimize(first_artificial, false, &mut budget);
    if status != LpStatus::Optimal {
        return finish(status);
    }

    let mut xs = vec![0.0; total];
    for r in 0..rows {
        xs[tab.basis[r]] = tab.rhs(r);
    }
    let primal: Vec<f64> = maps
        .iter()
        .map(|map| map.offset + map.parts[..map.nparts].iter().map(|&(c, k)| k * xs[c]).sum::<f64>())
        .collect();
    let objective = p.cost.iter().zip(&primal).map(|(c, x)| c * x).sum();

    let mut duals = vec![0.0; m];
    for r in 0..rows {
        if let Some(i) = std_rows[r].origin {
            let y = -tab.at(rows, init_col[r]);
            duals[i] += if flipped[r] { -y } else { y };
        }
    }
    let complementary_slackness =
        (0..first_artificial).map(|c| (xs[c] * tab.at(rows, c)).abs()).sum();

    LpSolution { status, primal, objective, duals, complementary_slackness }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn absolute_value_epigraph() {
        // min t  s.t.  -t <= 3 <= t  written as  t >= 3, t >= -3
        let m = Matrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let p = LpProblem::new(vec![1.0], m, vec![3.0, -3.0], vec![INF, INF], vec![-INF], vec![INF]).unwrap();
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] - 3.0).abs() < 1e-12);
        assert!((s.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn classic_two_variable_max() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18, x, y >= 0  →  36 at (2, 6)
        let m = Matrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 3.0, 2.0]);
        let p = LpProblem::new(
            vec![-3.0, -5.0],
            m,
            vec![-INF; 3],
            vec![4.0, 12.0, 18.0],
            vec![0.0; 2],
            vec![INF; 2],
        )
        .unwrap();
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 36.0).abs() < 1e-10);
        assert!((s.primal[0] - 2.0).abs() < 1e-10 && (s.primal[1] - 6.0).abs() < 1e-10);
        // shadow prices of the textbook problem: (0, 3/2, 1) for the max form
        assert!((s.duals[0]).abs() < 1e-10);
        assert!((s.duals[1] + 1.5).abs() < 1e-10);
        assert!((s.duals[2] + 1.0).abs() < 1e-10);
        assert!(s.complementary_slackness < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let m = Matrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let p = LpProblem::new(vec![1.0], m, vec![2.0, -INF], vec![INF, 1.0], vec![-INF], vec![INF]).unwrap();
        assert_eq!(solve_lp(&p).status, LpStatus::Infeasible);

        let m = Matrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let p = LpProblem::new(vec![-1.0, 0.0], m, vec![-INF], vec![1.0], vec![0.0; 2], vec![INF; 2]).unwrap();
        assert_eq!(solve_lp(&p).status, LpStatus::Unbounded);
    }

    #[test]
    fn boxed_and_equality_rows() {
        // min -x - y  s.t. x + y = 1.5, 0 <= x <= 1, 0 <= y <= 1
        let m = Matrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let p = LpProblem::new(vec![-1.0, -2.0], m, vec![1.5], vec![1.5], vec![0.0; 2], vec![1.0; 2]).unwrap();
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] - 0.5).abs() < 1e-12 && (s.primal[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_crossed_bounds() {
        let m = Matrix::from_row_slice(1, 1, &[1.0]);
        assert!(LpProblem::new(vec![1.0], m, vec![2.0], vec![1.0], vec![0.0], vec![1.0]).is_err());
    }
}
