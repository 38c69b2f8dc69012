//! Observability matrix, its nullspace, row classes and the enumeration of
//! structurally dissimilar columns.
//!
//! Two systems `(A, C)` and `(A + Δ, C)` produce identical outputs for every
//! initial state exactly when `OΔ = 0`. With `Φ` an orthonormal basis of
//! `N(O)`, every such perturbation is `Δ = ΦV`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::model::{is_present, seeded_rng, NetworkSystem};
use crate::numerics::{ensure_finite, expm, min_norm_solve, svd_nullspace, Matrix, Vector};
use crate::{Error, Result};

/// Largest `n` enumerated without an explicit override.
pub const DEFAULT_ENUMERATION_GUARD: usize = 16;

/// Redraws of the generic point before a zero is accepted as forced.
const GENERIC_REDRAWS: usize = 32;

/// Consistency tolerance for the zero-set subproblems.
const VARIANT_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ObservabilityAnalysis {
    /// `[C; CA; …; CA^{n−1}]`, `pn × n`.
    pub o: Matrix,
    pub rank: usize,
    /// `n × (n − rank)` orthonormal basis of `N(O)`.
    pub phi: Matrix,
    /// Singular values of `O`, descending.
    pub singular_values: Vec<f64>,
    /// Relative tolerance used for the rank decision.
    pub rank_tol: f64,
}

impl ObservabilityAnalysis {
    pub fn n(&self) -> usize {
        self.o.ncols()
    }

    /// `n − rank`, the number of free directions per column.
    pub fn nullity(&self) -> usize {
        self.phi.ncols()
    }

    /// Absolute threshold matching the rank decision: `rank_tol · σ_max(O)`.
    pub fn absolute_tolerance(&self) -> f64 {
        self.rank_tol * self.singular_values.first().copied().unwrap_or(0.0)
    }
}

/// Stacks `C, CA, …, CA^{n−1}`.
pub fn observability_matrix(sys: &NetworkSystem) -> Matrix {
    let (n, p) = (sys.n(), sys.p());
    let mut o = Matrix::zeros(n * p, n);
    let mut block = sys.c().clone();
    for k in 0..n {
        o.view_mut((k * p, 0), (p, n)).copy_from(&block);
        if k + 1 < n {
            block = &block * sys.a();
        }
    }
    o
}

/// Builds `O`, decides its numerical rank and extracts `Φ`.
///
/// `rank_tol` is relative to `σ_max(O)`; `0.0` selects the default
/// `max(pn, n) · ε`.
pub fn analyze(sys: &NetworkSystem, rank_tol: f64) -> Result<ObservabilityAnalysis> {
    let o = observability_matrix(sys);
    ensure_finite(&o, "observability matrix")?;
    let ns = svd_nullspace(&o, rank_tol)?;
    let rank_tol = if rank_tol == 0.0 {
        crate::numerics::default_rank_tolerance(o.nrows(), o.ncols())
    } else {
        rank_tol
    };
    Ok(ObservabilityAnalysis { o, rank: ns.rank, phi: ns.basis, singular_values: ns.singular_values, rank_tol })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowClass {
    /// No indistinguishable perturbation touches the row.
    Essential,
    /// The row can be perturbed independently of every other row.
    Decoupled,
    Coupled,
}

impl RowClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RowClass::Essential => "essential",
            RowClass::Decoupled => "decoupled",
            RowClass::Coupled => "coupled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowLabel {
    pub class: RowClass,
    /// `‖Φᵀe_i‖₂`.
    pub projection: f64,
    /// `‖ΦΦᵀe_i − e_i‖₂`.
    pub reach_residual: f64,
}

/// One label per row of `A`; the label applies to every edge entering that
/// node.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeClassification {
    pub rows: Vec<RowLabel>,
}

impl EdgeClassification {
    pub fn classes(&self) -> Vec<RowClass> {
        self.rows.iter().map(|r| r.class).collect()
    }

    pub fn rows_of(&self, class: RowClass) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.rows[i].class == class).collect()
    }
}

pub fn classify_edges(an: &ObservabilityAnalysis, tol: f64) -> EdgeClassification {
    let n = an.n();
    let phi = &an.phi;
    let rows = (0..n)
        .map(|i| {
            let projection = phi.row(i).norm();
            let mut reach = phi * phi.row(i).transpose();
            reach[i] -= 1.0;
            let reach_residual = reach.norm();
            let class = if projection <= tol {
                RowClass::Essential
            } else if reach_residual <= tol {
                RowClass::Decoupled
            } else {
                RowClass::Coupled
            };
            RowLabel { class, projection, reach_residual }
        })
        .collect();
    EdgeClassification { rows }
}

/// Outcome of the two indistinguishability checks.
#[derive(Debug, Clone, PartialEq)]
pub struct IndistinguishabilityReport {
    /// `‖CA^k − C(A+Δ)^k‖_F` for `k = 0, …, n`.
    pub power_residuals: Vec<f64>,
    /// Largest power residual divided by `‖C‖_F · max(1, ‖A‖_F, ‖A+Δ‖_F)^k`.
    pub algebraic_residual: f64,
    /// Largest `‖y(t) − ỹ(t)‖₂` over the sampled trajectories, relative to
    /// `max(1, ‖C‖_F · max(‖e^{At}‖_F, ‖e^{(A+Δ)t}‖_F))`.
    pub dynamic_residual: f64,
    pub tolerance: f64,
}

impl IndistinguishabilityReport {
    pub fn algebraic_pass(&self) -> bool {
        self.algebraic_residual <= self.tolerance
    }

    pub fn dynamic_pass(&self) -> bool {
        self.dynamic_residual <= self.tolerance
    }

    pub fn passed(&self) -> bool {
        self.algebraic_pass() && self.dynamic_pass()
    }
}

/// Relative tolerance of [`verify_indistinguishable`].
pub const INDISTINGUISHABLE_TOL: f64 = 1e-7;

/// Time samples drawn per trajectory.
const SAMPLES_PER_TRIAL: usize = 8;

/// Compares the outputs of `(A, C)` and `(A + Δ, C)`, algebraically through
/// `CA^k` for `k ≤ n` and dynamically on `trials` random unit initial states
/// at times drawn uniformly from `[0, horizon]`.
pub fn verify_indistinguishable<R: Rng + ?Sized>(
    sys: &NetworkSystem,
    delta: &Matrix,
    trials: usize,
    horizon: f64,
    rng: &mut R,
) -> Result<IndistinguishabilityReport> {
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::invalid(format!("horizon must be finite and non-negative, got {horizon}")));
    }
    let other = sys.perturbed(delta)?;
    let (a, b, c) = (sys.a(), other.a(), sys.c());
    let n = sys.n();
    let c_norm = c.norm();
    let growth = a.norm().max(b.norm()).max(1.0);

    let mut power_residuals = Vec::with_capacity(n + 1);
    let mut algebraic_residual: f64 = 0.0;
    let (mut ca, mut cb) = (c.clone(), c.clone());
    let mut scale = c_norm;
    for k in 0..=n {
        let r = (&ca - &cb).norm();
        power_residuals.push(r);
        algebraic_residual = algebraic_residual.max(r / scale);
        if k < n {
            ca = &ca * a;
            cb = &cb * b;
            scale *= growth;
        }
    }

    let mut dynamic_residual: f64 = 0.0;
    for _ in 0..trials {
        let mut x0 = Vector::from_fn(n, |_, _| rng.sample(StandardNormal));
        let norm = x0.norm();
        if norm == 0.0 {
            continue;
        }
        x0 /= norm;
        for _ in 0..SAMPLES_PER_TRIAL {
            let t = horizon * rng.random::<f64>();
            let ea = expm(&(a * t))?;
            let eb = expm(&(b * t))?;
            let diff = (c * (&ea - &eb) * &x0).norm();
            let scale = (c_norm * ea.norm().max(eb.norm())).max(1.0);
            dynamic_residual = dynamic_residual.max(diff / scale);
        }
    }

    Ok(IndistinguishabilityReport { power_residuals, algebraic_residual, dynamic_residual, tolerance: INDISTINGUISHABLE_TOL })
}

/// An achievable column `a_j + Φv` and its support.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnVariant {
    pub support: Vec<bool>,
    pub coefficients: Vector,
    pub witness: Vector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnVariantSet {
    pub column: usize,
    /// Distinct supports, sorted lexicographically with `false < true`.
    pub variants: Vec<ColumnVariant>,
}

impl ColumnVariantSet {
    pub fn count(&self) -> usize {
        self.variants.len()
    }
}

fn check_column_input(an: &ObservabilityAnalysis, a: &Matrix, j: usize, max_dim: usize) -> Result<()> {
    let n = an.n();
    if a.shape() != (n, n) {
        return Err(Error::invalid(format!("A is {}x{}, analysis is for n = {n}", a.nrows(), a.ncols())));
    }
    if j >= n {
        return Err(Error::invalid(format!("column {j} out of range for n = {n}")));
    }
    if n > max_dim {
        return Err(Error::EnumerationTooLarge { n, guard: max_dim });
    }
    Ok(())
}

/// All supports reachable by column `j` of `A + ΦV`.
///
/// Every candidate zero-set `T` over the rows `Φ` can move is tried: when
/// `(a_j + Φv)_T = 0` is consistent, a random point of its solution set is
/// drawn and its support recorded. Draws that vanish outside `T` are
/// repeated a bounded number of times.
pub fn enumerate_column_variants(
    an: &ObservabilityAnalysis,
    a: &Matrix,
    j: usize,
    presence_threshold: f64,
    max_dim: usize,
) -> Result<ColumnVariantSet> {
    check_column_input(an, a, j, max_dim)?;
    let n = an.n();
    let phi = &an.phi;
    let k = an.nullity();
    let aj: Vector = a.column(j).into_owned();
    let support_of = |w: &Vector| w.iter().map(|&x| is_present(x, presence_threshold)).collect::<Vec<bool>>();

    if k == 0 {
        let variant = ColumnVariant { support: support_of(&aj), coefficients: Vector::zeros(0), witness: aj };
        return Ok(ColumnVariantSet { column: j, variants: alloc::vec![variant] });
    }

    // Rows untouched by Φ keep their entry in every variant.
    let movable: Vec<usize> = (0..n).filter(|&i| phi.row(i).norm() > VARIANT_RESIDUAL_TOL).collect();
    let mut rng = seeded_rng(0x6e65_7469_6400_0000 ^ j as u64);
    let mut found: BTreeMap<Vec<bool>, ColumnVariant> = BTreeMap::new();

    for bits in 0u64..(1u64 << movable.len()) {
        let zeros: Vec<usize> = (0..movable.len()).filter(|&b| bits >> b & 1 == 1).map(|b| movable[b]).collect();
        let phi_t = Matrix::from_fn(zeros.len(), k, |r, c| phi[(zeros[r], c)]);
        let rhs = Vector::from_fn(zeros.len(), |r, _| -aj[zeros[r]]);
        let base = if zeros.is_empty() {
            Vector::zeros(k)
        } else {
            let sol = min_norm_solve(&phi_t, &rhs, 0.0)?;
            if sol.residual > VARIANT_RESIDUAL_TOL * (1.0 + rhs.norm()) {
                continue;
            }
            sol.x
        };
        let free = if zeros.is_empty() { Matrix::identity(k, k) } else { svd_nullspace(&phi_t, 0.0)?.basis };
        let spread = 1.0 + base.norm() + aj.norm();

        let mut best: Option<(usize, Vector, Vector)> = None;
        for _ in 0..GENERIC_REDRAWS {
            let g = Vector::from_fn(free.ncols(), |_, _| spread * rng.sample::<f64, _>(StandardNormal));
            let v = &base + &free * g;
            let w = &aj + phi * &v;
            let accidental = (0..n).filter(|i| !zeros.contains(i) && !is_present(w[*i], presence_threshold)).count();
            let better = best.as_ref().is_none_or(|(z, _, _)| accidental < *z);
            if better {
                best = Some((accidental, v, w));
            }
            if accidental == 0 || free.ncols() == 0 {
                break;
            }
        }
        let (_, v, mut w) = best.expect("at least one draw");
        for &i in &zeros {
            w[i] = 0.0;
        }
        found.entry(support_of(&w)).or_insert_with(|| ColumnVariant { support: support_of(&w), coefficients: v, witness: w });
    }

    Ok(ColumnVariantSet { column: j, variants: found.into_values().collect() })
}

/// Product of the per-column variant counts.
pub fn count_structural_networks(
    an: &ObservabilityAnalysis,
    a: &Matrix,
    presence_threshold: f64,
    max_dim: usize,
) -> Result<u128> {
    let mut total: u128 = 1;
    for j in 0..an.n() {
        let count = enumerate_column_variants(an, a, j, presence_threshold, max_dim)?.count() as u128;
        total = total.checked_mul(count).ok_or(Error::CountOverflow)?;
    }
    Ok(total)
}
