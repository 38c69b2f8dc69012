//! ε-close measurements.
//!
//! The pair `(A, A + Δ)` is stacked into the augmented system
//! `Ā = blkdiag(A, A + Δ)`, `C̄ = [C, −C]` whose output is the measurement
//! error `e(t)`. Its observability Gramian `W̄` gives
//! `‖e‖₂² = x̄₀ᵀ W̄ x̄₀` with `x̄₀ = [x₀; x₀]`, the spectral certificate of
//! ε-closeness, and a parameterisation of every `Ā` sharing `W̄`.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dissimilar::{flip_metric, masked_l1, min_masked_l1, DissimilarResult};
use crate::model::{NetworkSystem, SparsityMask};
use crate::numerics::{
    block_diagonal, ensure_finite, matrix_exponential_apply, min_norm_solve, solve_lyapunov, svd_nullspace, Matrix,
    Vector,
};
use crate::{Error, Result};

/// Eigenvalues of `W̄` at or below this fraction of `λ_max` count as zero.
pub const NULLITY_TOL: f64 = 1e-9;

/// Relative residual accepted for the fixed-Gramian affine constraints.
pub const FIXED_GRAMIAN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSystem {
    /// `blkdiag(A, A + Δ)`.
    pub abar: Matrix,
    /// `[C, −C]`.
    pub cbar: Matrix,
}

impl AugmentedSystem {
    /// Size `n` of each of the two stacked networks.
    pub fn n(&self) -> usize {
        self.abar.nrows() / 2
    }

    /// `[x₀; x₀]`.
    pub fn lift(&self, x0: &Vector) -> Result<Vector> {
        lift(x0, self.n())
    }
}

fn lift(x0: &Vector, n: usize) -> Result<Vector> {
    if x0.len() != n {
        return Err(Error::invalid(format!("initial state has length {}, expected {n}", x0.len())));
    }
    let mut out = Vector::zeros(2 * n);
    out.rows_mut(0, n).copy_from(x0);
    out.rows_mut(n, n).copy_from(x0);
    Ok(out)
}

/// Augmented system of `(A, C)` and `(A + Δ, C)`.
pub fn augment(sys: &NetworkSystem, delta: &Matrix) -> Result<AugmentedSystem> {
    let other = sys.perturbed(delta)?;
    augment_pair(sys.a(), other.a(), sys.c())
}

/// Augmented system of two hypotheses `A` and `Ã` measured through `C`.
pub fn augment_pair(a: &Matrix, a_tilde: &Matrix, c: &Matrix) -> Result<AugmentedSystem> {
    if a.shape() != a_tilde.shape() || a.nrows() != a.ncols() || c.ncols() != a.nrows() {
        return Err(Error::invalid("A, Ã and C have inconsistent dimensions"));
    }
    let abar = block_diagonal(a, a_tilde);
    let (p, n) = c.shape();
    let mut cbar = Matrix::zeros(p, 2 * n);
    cbar.view_mut((0, 0), (p, n)).copy_from(c);
    cbar.view_mut((0, n), (p, n)).copy_from(&(-c));
    Ok(AugmentedSystem { abar, cbar })
}

/// `‖W Ā + Āᵀ W + C̄ᵀ C̄‖_F`.
pub fn lyapunov_residual(w: &Matrix, abar: &Matrix, cbar: &Matrix) -> f64 {
    (w * abar + abar.transpose() * w + cbar.transpose() * cbar).norm()
}

/// Gramian together with its observable decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct GramianDecomposition {
    pub wbar: Matrix,
    pub abar: Matrix,
    pub cbar: Matrix,
    /// Orthogonal `[V_o, V_ō]`, eigenvectors of `W̄` by decreasing eigenvalue.
    pub v: Matrix,
    /// All eigenvalues of `W̄`, descending.
    pub eigenvalues: Vec<f64>,
    /// Positive part `Λ`, length `2n − l`.
    pub lambda: Vector,
    /// Nullity `l`.
    pub nullity: usize,
    /// `V_oᵀ Ā V_o`.
    pub a_o: Matrix,
    /// `V_ōᵀ Ā V_o`.
    pub a21: Matrix,
    /// `V_ōᵀ Ā V_ō`.
    pub a_obar: Matrix,
    /// `C̄ V_o`.
    pub c_o: Matrix,
}

impl GramianDecomposition {
    /// Decomposes a given Gramian `W̄` of `(Ā, C̄)`.
    pub fn from_parts(wbar: Matrix, abar: Matrix, cbar: Matrix) -> Result<Self> {
        let m = wbar.nrows();
        if wbar.shape() != (m, m) || abar.shape() != (m, m) || cbar.ncols() != m || m == 0 {
            return Err(Error::invalid("W̄, Ā and C̄ have inconsistent dimensions"));
        }
        ensure_finite(&wbar, "W̄")?;
        let sym = (&wbar + wbar.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut v = Matrix::zeros(m, m);
        for (dst, &src) in order.iter().enumerate() {
            v.set_column(dst, &eig.eigenvectors.column(src));
        }
        let top = eigenvalues[0];
        let rank = if top <= 0.0 { 0 } else { eigenvalues.iter().take_while(|&&x| x > NULLITY_TOL * top).count() };
        let lambda = Vector::from_iterator(rank, eigenvalues[..rank].iter().copied());
        let mut gd = GramianDecomposition {
            wbar,
            abar,
            cbar,
            v,
            eigenvalues,
            lambda,
            nullity: m - rank,
            a_o: Matrix::zeros(0, 0),
            a21: Matrix::zeros(0, 0),
            a_obar: Matrix::zeros(0, 0),
            c_o: Matrix::zeros(0, 0),
        };
        gd.refresh_blocks();
        Ok(gd)
    }

    /// Synthetic decomposition `W̄ = V_o Λ V_oᵀ`, `C̄ = Č_o V_oᵀ`, with `Ā`
    /// assembled from `fp`. `v` must be orthogonal.
    pub fn from_factors(v: Matrix, lambda: Vector, c_o: Matrix, fp: &FamilyParameters) -> Result<Self> {
        let m = v.nrows();
        let r = lambda.len();
        if v.shape() != (m, m) || r > m || c_o.ncols() != r {
            return Err(Error::invalid("factor dimensions are inconsistent"));
        }
        if lambda.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::invalid("Λ must be positive and finite"));
        }
        if (v.transpose() * &v - Matrix::identity(m, m)).norm() > 1e-10 * m as f64 {
            return Err(Error::invalid("V must be orthogonal"));
        }
        let v_o = v.columns(0, r);
        let wbar = v_o * Matrix::from_diagonal(&lambda) * v_o.transpose();
        let cbar = &c_o * v_o.transpose();
        let mut eigenvalues: Vec<f64> = lambda.iter().copied().collect();
        eigenvalues.resize(m, 0.0);
        let mut gd = GramianDecomposition {
            wbar,
            abar: Matrix::zeros(m, m),
            cbar,
            v,
            eigenvalues,
            lambda,
            nullity: m - r,
            a_o: Matrix::zeros(0, 0),
            a21: Matrix::zeros(0, 0),
            a_obar: Matrix::zeros(0, 0),
            c_o,
        };
        gd.abar = family_reconstruct(&gd, fp)?;
        gd.refresh_blocks();
        Ok(gd)
    }

    fn refresh_blocks(&mut self) {
        let r = self.lambda.len();
        let l = self.nullity;
        let v_o = self.v.columns(0, r);
        let v_u = self.v.columns(r, l);
        self.a_o = v_o.transpose() * &self.abar * v_o;
        self.a21 = v_u.transpose() * &self.abar * v_o;
        self.a_obar = v_u.transpose() * &self.abar * v_u;
        self.c_o = &self.cbar * v_o;
    }

    pub fn v_o(&self) -> Matrix {
        self.v.columns(0, self.lambda.len()).into_owned()
    }

    pub fn v_obar(&self) -> Matrix {
        self.v.columns(self.lambda.len(), self.nullity).into_owned()
    }

    /// `λ_max(W̄)`.
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `‖C̄ V_ō‖_F`, zero for a genuine observable decomposition.
    pub fn unobservable_output(&self) -> f64 {
        (&self.cbar * self.v_obar()).norm()
    }

    /// `‖V_oᵀ Ā V_ō‖_F`, the block an observable decomposition leaves empty.
    pub fn upper_right_block(&self) -> f64 {
        (self.v_o().transpose() * &self.abar * self.v_obar()).norm()
    }

    /// Same decomposition with `Λ` (and `W̄`) multiplied by `factor`.
    pub fn with_scaled_spectrum(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::invalid("spectrum scale must be positive"));
        }
        let mut out = self.clone();
        out.lambda *= factor;
        out.wbar *= factor;
        out.eigenvalues.iter_mut().for_each(|x| *x *= factor);
        Ok(out)
    }
}

/// Observability Gramian of the augmented system and its decomposition.
pub fn gramian(aug: &AugmentedSystem) -> Result<GramianDecomposition> {
    let w = solve_lyapunov(&aug.abar, &aug.cbar)?;
    GramianDecomposition::from_parts(w, aug.abar.clone(), aug.cbar.clone())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsBound {
    pub certified: bool,
    /// `ε² / (2‖x₀‖²) − λ_max(W̄)`.
    pub margin: f64,
    pub lambda_max: f64,
    pub threshold: f64,
}

/// Spectral certificate `λ_max(W̄) < ε² / (2‖x₀‖²)` for `‖e‖₂ < ε`.
pub fn check_eps_bound(gd: &GramianDecomposition, x0: &Vector, eps: f64) -> Result<EpsBound> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid(format!("ε must be positive and finite, got {eps}")));
    }
    let n = gd.wbar.nrows() / 2;
    if x0.len() != n {
        return Err(Error::invalid(format!("initial state has length {}, expected {n}", x0.len())));
    }
    let norm2 = x0.norm_squared();
    if norm2 == 0.0 {
        return Err(Error::invalid("initial state must be nonzero"));
    }
    let threshold = eps * eps / (2.0 * norm2);
    let lambda_max = gd.lambda_max();
    Ok(EpsBound { certified: lambda_max < threshold, margin: threshold - lambda_max, lambda_max, threshold })
}

/// `‖e‖₂ = sqrt([x₀; x₀]ᵀ W̄ [x₀; x₀])`.
pub fn error_norm(gd: &GramianDecomposition, x0: &Vector) -> Result<f64> {
    let xb = lift(x0, gd.wbar.nrows() / 2)?;
    Ok(libm::sqrt(xb.dot(&(&gd.wbar * &xb)).max(0.0)))
}

/// `W₁₁ + W₁₂ + W₂₁ + W₂₂`, the quadratic form of `W̄` on `[x; x]`.
pub fn collapsed_gramian(gd: &GramianDecomposition) -> Matrix {
    let n = gd.wbar.nrows() / 2;
    let w = &gd.wbar;
    w.view((0, 0), (n, n)) + w.view((0, n), (n, n)) + w.view((n, 0), (n, n)) + w.view((n, n), (n, n))
}

/// Smallest and largest [`error_norm`] over unit initial states.
pub fn error_norm_bracket(gd: &GramianDecomposition) -> (f64, f64) {
    let m = collapsed_gramian(gd);
    let m = (&m + m.transpose()) * 0.5;
    let eig = m.symmetric_eigen().eigenvalues;
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    (libm::sqrt(lo), libm::sqrt(hi))
}

/// Affine set `{B : W̄ blkdiag(A, B) + blkdiag(A, B)ᵀ W̄ = −C̄ᵀC̄}` written as
/// `vec(B) = offset + basis · w` (column-major `vec`).
#[derive(Debug, Clone, PartialEq)]
pub struct FixedGramianSet {
    pub offset: Vector,
    pub basis: Matrix,
    /// Residual of the constraints at `offset`, including the block that does
    /// not involve `B`.
    pub residual: f64,
}

/// Linear constraints on `vec(B)`: the upper-right block
/// `W₁₂ B = CᵀC − AᵀW₁₂` and the upper triangle of
/// `W₂₂ B + BᵀW₂₂ = −CᵀC`. The upper-left block must hold on its own.
pub fn fixed_gramian_set(sys: &NetworkSystem, wbar: &Matrix) -> Result<FixedGramianSet> {
    let n = sys.n();
    if wbar.shape() != (2 * n, 2 * n) {
        return Err(Error::invalid(format!("W̄ must be {}x{}", 2 * n, 2 * n)));
    }
    ensure_finite(wbar, "W̄")?;
    let (a, c) = (sys.a(), sys.c());
    let ctc = c.transpose() * c;
    let w11 = wbar.view((0, 0), (n, n));
    let w12 = wbar.view((0, n), (n, n));
    let w22 = wbar.view((n, n), (n, n));
    let scale = 1.0 + 2.0 * ctc.norm();

    let fixed_block = (w11 * a + a.transpose() * w11 + &ctc).norm();
    let tri = n * (n + 1) / 2;
    let mut m = Matrix::zeros(n * n + tri, n * n);
    let mut rhs = Vector::zeros(n * n + tri);
    let var = |k: usize, l: usize| l * n + k;
    let upper = &ctc - a.transpose() * w12;
    for i in 0..n {
        for j in 0..n {
            let row = var(i, j);
            for k in 0..n {
                m[(row, var(k, j))] += w12[(i, k)];
            }
            rhs[row] = upper[(i, j)];
        }
    }
    let mut row = n * n;
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                m[(row, var(k, j))] += w22[(i, k)];
                m[(row, var(k, i))] += w22[(k, j)];
            }
            rhs[row] = -ctc[(i, j)];
            row += 1;
        }
    }
    let sol = min_norm_solve(&m, &rhs, 0.0)?;
    let residual = libm::hypot(sol.residual, fixed_block);
    if residual > FIXED_GRAMIAN_TOL * scale {
        return Err(Error::InfeasibleGramian { residual });
    }
    let basis = svd_nullspace(&m, 0.0)?.basis;
    Ok(FixedGramianSet { offset: sol.x, basis, residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedGramianResult {
    /// `v` holds the affine coordinates `w` as a single column.
    pub result: DissimilarResult,
    /// `‖W̄ Ā + ĀᵀW̄ + C̄ᵀC̄‖_F` at the returned network.
    pub lyapunov_residual: f64,
    /// Dimension of the affine set searched.
    pub free_dimension: usize,
}

/// Masked-ℓ1 minimisation of the second network over all `B` for which the
/// fixed `W̄` solves the augmented Lyapunov equation.
pub fn solve_fixed_gramian_l1(
    sys: &NetworkSystem,
    wbar: &Matrix,
    mask: &SparsityMask,
    presence_threshold: f64,
) -> Result<FixedGramianResult> {
    let n = sys.n();
    if mask.n() != n {
        return Err(Error::invalid("mask and system disagree on n"));
    }
    let set = fixed_gramian_set(sys, wbar)?;
    let weights: Vec<bool> = mask.matrix().iter().map(|&z| z != 0.0).collect();
    let opt = min_masked_l1(&set.offset, &set.basis, &weights).map_err(|e| match e {
        Error::Solver { status, .. } => Error::Solver { column: 0, status },
        other => other,
    })?;
    let b = &set.offset + &set.basis * &opt.v;
    let network = Matrix::from_column_slice(n, n, b.as_slice());
    let delta = &network - sys.a();
    let aug = augment_pair(sys.a(), &network, sys.c())?;
    let lyapunov_residual = lyapunov_residual(wbar, &aug.abar, &aug.cbar);
    let objective = masked_l1(mask, &network);
    let flips = flip_metric(sys.a(), &network, presence_threshold)?;
    let free_dimension = set.basis.ncols();
    let v = Matrix::from_column_slice(opt.v.len(), 1, opt.v.as_slice());
    Ok(FixedGramianResult {
        result: DissimilarResult { v, delta, network, objective, flips, certificate: None },
        lyapunov_residual,
        free_dimension,
    })
}

/// Free parameters of the family of `Ā` sharing a Gramian.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyParameters {
    /// Skew-symmetric, `(2n − l) × (2n − l)`.
    pub s: Matrix,
    /// `l × (2n − l)`.
    pub a21: Matrix,
    /// `l × l`.
    pub a_obar: Matrix,
}

impl FamilyParameters {
    pub fn new(s: Matrix, a21: Matrix, a_obar: Matrix) -> Result<Self> {
        let r = s.nrows();
        let l = a_obar.nrows();
        if s.shape() != (r, r) || a_obar.shape() != (l, l) || a21.shape() != (l, r) {
            return Err(Error::invalid("family parameter blocks have inconsistent shapes"));
        }
        if (&s + s.transpose()).amax() > 1e-12 * (1.0 + s.amax()) {
            return Err(Error::invalid("S must be skew-symmetric"));
        }
        Ok(FamilyParameters { s, a21, a_obar })
    }

    /// All-zero parameters for a decomposition with observable dimension `r`
    /// and nullity `l`.
    pub fn zeros(r: usize, l: usize) -> Self {
        FamilyParameters { s: Matrix::zeros(r, r), a21: Matrix::zeros(l, r), a_obar: Matrix::zeros(l, l) }
    }

    /// Parameters reproducing the decomposition's own `Ā`.
    pub fn extract(gd: &GramianDecomposition) -> Self {
        let sqrt = gd.lambda.map(libm::sqrt);
        let inv_sqrt = sqrt.map(|x| 1.0 / x);
        let r = gd.lambda.len();
        let gram = gd.c_o.transpose() * &gd.c_o;
        let s = Matrix::from_fn(r, r, |i, j| {
            sqrt[i] * gd.a_o[(i, j)] * inv_sqrt[j] + 0.5 * inv_sqrt[i] * gram[(i, j)] * inv_sqrt[j]
        });
        let s = (&s - s.transpose()) * 0.5;
        FamilyParameters { s, a21: gd.a21.clone(), a_obar: gd.a_obar.clone() }
    }

    /// Standard-normal entries scaled by `scale`, with `S` skew-symmetrised.
    pub fn random<R: Rng + ?Sized>(r: usize, l: usize, scale: f64, rng: &mut R) -> Self {
        let mut draw = |rows: usize, cols: usize| Matrix::from_fn(rows, cols, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
        let s = draw(r, r);
        let s = (&s - s.transpose()) * 0.5;
        let a21 = draw(l, r);
        let a_obar = draw(l, l);
        FamilyParameters { s, a21, a_obar }
    }
}

/// The four terms of the family: the part fixed by `W̄`, the skew part and
/// the two free blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyTerms {
    pub fixed: Matrix,
    pub skew: Matrix,
    pub coupling: Matrix,
    pub unobservable: Matrix,
}

impl FamilyTerms {
    pub fn sum(&self) -> Matrix {
        &self.fixed + &self.skew + &self.coupling + &self.unobservable
    }
}

pub fn family_terms(gd: &GramianDecomposition, fp: &FamilyParameters) -> Result<FamilyTerms> {
    let r = gd.lambda.len();
    let l = gd.nullity;
    if fp.s.shape() != (r, r) || fp.a21.shape() != (l, r) || fp.a_obar.shape() != (l, l) {
        return Err(Error::invalid(format!(
            "family parameters do not match a decomposition with rank {r} and nullity {l}"
        )));
    }
    let v_o = gd.v_o();
    let v_u = gd.v_obar();
    let sqrt = gd.lambda.map(libm::sqrt);
    let gram = gd.c_o.transpose() * &gd.c_o;
    let inner_fixed = Matrix::from_fn(r, r, |i, j| -0.5 * gram[(i, j)] / gd.lambda[i]);
    let inner_skew = Matrix::from_fn(r, r, |i, j| fp.s[(i, j)] * sqrt[j] / sqrt[i]);
    Ok(FamilyTerms {
        fixed: &v_o * inner_fixed * v_o.transpose(),
        skew: &v_o * inner_skew * v_o.transpose(),
        coupling: &v_u * &fp.a21 * v_o.transpose(),
        unobservable: &v_u * &fp.a_obar * v_u.transpose(),
    })
}

/// `Ā = V_o(−½Λ⁻¹Č_oᵀČ_o + Λ^{-1/2} S Λ^{1/2})V_oᵀ + V_ō Ǎ₂₁ V_oᵀ + V_ō Ǎ_ō V_ōᵀ`.
pub fn family_reconstruct(gd: &GramianDecomposition, fp: &FamilyParameters) -> Result<Matrix> {
    Ok(family_terms(gd, fp)?.sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockProjection {
    pub abar: Matrix,
    /// Frobenius norm of the two off-diagonal `n × n` blocks.
    pub block_residual: f64,
    pub a: Matrix,
    pub a_perturbed: Matrix,
}

/// Reconstructs `Ā` and splits it into the two candidate networks.
pub fn family_project_blockdiag(gd: &GramianDecomposition, fp: &FamilyParameters) -> Result<BlockProjection> {
    let abar = family_reconstruct(gd, fp)?;
    let m = abar.nrows();
    if m % 2 != 0 {
        return Err(Error::invalid("augmented matrix has odd dimension"));
    }
    let n = m / 2;
    let block_residual = libm::hypot(abar.view((0, n), (n, n)).norm(), abar.view((n, 0), (n, n)).norm());
    let a = abar.view((0, 0), (n, n)).into_owned();
    let a_perturbed = abar.view((n, n), (n, n)).into_owned();
    Ok(BlockProjection { abar, block_residual, a, a_perturbed })
}

/// Sampled outputs of `(A, C)` and `(A + Δ, C)` from the same `x₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub y: Vec<Vector>,
    pub y_tilde: Vec<Vector>,
    /// `y − ỹ`.
    pub e: Vec<Vector>,
    /// Trapezoidal estimate of `sqrt(∫ ‖e(t)‖² dt)` over the grid.
    pub error_norm: f64,
}

/// Samples both outputs on `0, dt, 2dt, …` up to and including `horizon`.
pub fn simulate_pair(sys: &NetworkSystem, delta: &Matrix, x0: &Vector, horizon: f64, dt: f64) -> Result<Trajectory> {
    if !(horizon > 0.0) || !horizon.is_finite() || !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("horizon and dt must be positive and finite"));
    }
    if x0.len() != sys.n() {
        return Err(Error::invalid(format!("initial state has length {}, expected {}", x0.len(), sys.n())));
    }
    let other = sys.perturbed(delta)?;
    let steps = libm::ceil(horizon / dt - 1e-9) as usize;
    let mut times: Vec<f64> = (0..steps).map(|k| k as f64 * dt).collect();
    times.push(horizon);
    let (mut y, mut y_tilde, mut e) = (Vec::new(), Vec::new(), Vec::new());
    for &t in &times {
        let yt = sys.c() * matrix_exponential_apply(sys.a(), x0, t)?;
        let yd = sys.c() * matrix_exponential_apply(other.a(), x0, t)?;
        e.push(&yt - &yd);
        y.push(yt);
        y_tilde.push(yd);
    }
    let integral: f64 = times
        .windows(2)
        .zip(e.windows(2))
        .map(|(t, e)| 0.5 * (t[1] - t[0]) * (e[0].norm_squared() + e[1].norm_squared()))
        .sum();
    Ok(Trajectory { times, y, y_tilde, e, error_norm: libm::sqrt(integral) })
}
