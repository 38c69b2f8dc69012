//! JSON reports emitted by the command-line front end.
//!
//! Node, row and column numbers in reports start at 1, matching the DOT
//! labels.

use netid_core::dissimilar::{DissimilarResult, FlippedEdge};
use netid_core::epsclose::{EpsBound, FixedGramianResult, GramianDecomposition, Trajectory};
use netid_core::observability::{ColumnVariantSet, EdgeClassification};
use netid_core::{NetworkSystem, ObservabilityAnalysis};
use serde::Serialize;

use crate::io::{format_float, rows_of};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowReport {
    pub node: usize,
    pub class: &'static str,
    pub projection: f64,
    pub reach_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnReport {
    pub column: usize,
    pub count: usize,
    /// One string per achievable support, `1` for a present entry.
    pub supports: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantReport {
    pub columns: Vec<ColumnReport>,
    pub total: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub n: usize,
    pub p: usize,
    pub measured: Option<Vec<usize>>,
    pub rank: usize,
    pub nullity: usize,
    pub rank_tolerance: f64,
    pub singular_values: Vec<f64>,
    pub phi: Vec<Vec<f64>>,
    pub rows: Vec<RowReport>,
    pub variants: Option<VariantReport>,
    /// Set instead of `variants` when enumeration was refused.
    pub variants_error: Option<String>,
    pub summary: String,
}

pub fn support_string(support: &[bool]) -> String {
    support.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn analyze_report(
    sys: &NetworkSystem,
    an: &ObservabilityAnalysis,
    classes: &EdgeClassification,
    variants: Result<Vec<ColumnVariantSet>, netid_core::Error>,
) -> AnalyzeReport {
    let rows = classes
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| RowReport {
            node: i + 1,
            class: r.class.as_str(),
            projection: r.projection,
            reach_residual: r.reach_residual,
        })
        .collect();
    let (variants, variants_error) = match variants {
        Ok(sets) => {
            let total = sets.iter().try_fold(1u128, |acc, s| acc.checked_mul(s.count() as u128));
            match total {
                Some(total) => {
                    let columns = sets
                        .iter()
                        .map(|s| ColumnReport {
                            column: s.column + 1,
                            count: s.count(),
                            supports: s.variants.iter().map(|v| support_string(&v.support)).collect(),
                        })
                        .collect();
                    (Some(VariantReport { columns, total }), None)
                }
                None => (None, Some(netid_core::Error::CountOverflow.to_string())),
            }
        }
        Err(e) => (None, Some(e.to_string())),
    };
    let summary = if an.nullity() == 0 {
        "fully observable, ambiguity set = {A}".to_string()
    } else {
        format!("rank {} of {}: {}-dimensional ambiguity per column", an.rank, an.n(), an.nullity())
    };
    AnalyzeReport {
        n: sys.n(),
        p: sys.p(),
        measured: sys.measured_nodes().map(|m| m.iter().map(|i| i + 1).collect()),
        rank: an.rank,
        nullity: an.nullity(),
        rank_tolerance: an.absolute_tolerance(),
        singular_values: an.singular_values.as_slice().to_vec(),
        phi: rows_of(&an.phi),
        rows,
        variants,
        variants_error,
        summary,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlipReport {
    pub row: usize,
    pub col: usize,
    pub added: bool,
}

impl From<&FlippedEdge> for FlipReport {
    fn from(f: &FlippedEdge) -> Self {
        FlipReport { row: f.row + 1, col: f.col + 1, added: f.added }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateReport {
    pub holds: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DissimilarReport {
    pub n: usize,
    pub objective: f64,
    /// Flipped entries as a percentage of all `n²` ordered pairs.
    pub flip_pct_of_n2: f64,
    pub flipped: Vec<FlipReport>,
    pub certificate: Option<CertificateReport>,
    pub original: Vec<Vec<f64>>,
    pub delta: Vec<Vec<f64>>,
    pub network: Vec<Vec<f64>>,
}

pub fn dissimilar_report(sys: &NetworkSystem, r: &DissimilarResult) -> DissimilarReport {
    DissimilarReport {
        n: sys.n(),
        objective: r.objective,
        flip_pct_of_n2: r.flips.percentage,
        flipped: r.flips.flipped.iter().map(FlipReport::from).collect(),
        certificate: r.certificate.map(|c| CertificateReport { holds: c.holds, residual: c.residual }),
        original: rows_of(sys.a()),
        delta: rows_of(&r.delta),
        network: rows_of(&r.network),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedGramianReport {
    pub objective: f64,
    pub flip_pct_of_n2: f64,
    pub lyapunov_residual: f64,
    pub free_dimension: usize,
    pub network: Vec<Vec<f64>>,
}

impl From<&FixedGramianResult> for FixedGramianReport {
    fn from(f: &FixedGramianResult) -> Self {
        FixedGramianReport {
            objective: f.result.objective,
            flip_pct_of_n2: f.result.flips.percentage,
            lyapunov_residual: f.lyapunov_residual,
            free_dimension: f.free_dimension,
            network: rows_of(&f.result.network),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub eps: f64,
    pub certified: bool,
    pub margin: f64,
    pub threshold: f64,
}

impl From<&EpsBound> for BoundReport {
    fn from(b: &EpsBound) -> Self {
        let eps = (2.0 * b.threshold).sqrt();
        BoundReport { eps, certified: b.certified, margin: b.margin, threshold: b.threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsCloseReport {
    pub n: usize,
    pub lambda_max: f64,
    pub sqrt_lambda_max: f64,
    pub gramian_nullity: usize,
    pub x0: Vec<f64>,
    /// `‖e‖₂` from the Gramian quadratic form.
    pub error_norm: f64,
    /// `‖e‖₂` from the sampled trajectory over the simulation horizon.
    pub error_norm_sampled: f64,
    /// Range of `‖e‖₂` over unit initial states.
    pub error_norm_bracket: [f64; 2],
    pub inequality: String,
    pub inequality_holds: bool,
    pub bound: Option<BoundReport>,
    pub lyapunov_residual: f64,
    pub fixed_gramian: Option<FixedGramianReport>,
    pub fixed_gramian_error: Option<String>,
}

/// `‖e‖₂ < √λ_max · √2 · ‖x₀‖₂` rendered with four decimals.
pub fn inequality_line(error_norm: f64, sqrt_lambda_max: f64, x0_norm: f64) -> (String, bool) {
    let cap = sqrt_lambda_max * std::f64::consts::SQRT_2 * x0_norm;
    let holds = error_norm < cap || error_norm == 0.0 && cap == 0.0;
    let rel = if holds { "<" } else { ">=" };
    let scale = if (x0_norm - 1.0).abs() < 1e-12 { String::new() } else { format!("·{x0_norm:.4}") };
    (format!("{error_norm:.4} {rel} {sqrt_lambda_max:.4}·√2{scale} = {cap:.4}"), holds)
}

#[allow(clippy::too_many_arguments)]
pub fn epsclose_report(
    gd: &GramianDecomposition,
    x0: &[f64],
    error_norm: f64,
    trajectory: &Trajectory,
    bound: Option<&EpsBound>,
    lyapunov_residual: f64,
    fixed: Result<FixedGramianResult, netid_core::Error>,
) -> EpsCloseReport {
    let lambda_max = gd.lambda_max();
    let sqrt_lambda_max = lambda_max.max(0.0).sqrt();
    let x0_norm = x0.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (inequality, inequality_holds) = inequality_line(error_norm, sqrt_lambda_max, x0_norm);
    let (lo, hi) = netid_core::epsclose::error_norm_bracket(gd);
    let (fixed_gramian, fixed_gramian_error) = match fixed {
        Ok(f) => (Some(FixedGramianReport::from(&f)), None),
        Err(e) => (None, Some(e.to_string())),
    };
    EpsCloseReport {
        n: gd.wbar.nrows() / 2,
        lambda_max,
        sqrt_lambda_max,
        gramian_nullity: gd.nullity,
        x0: x0.to_vec(),
        error_norm,
        error_norm_sampled: trajectory.error_norm,
        error_norm_bracket: [lo, hi],
        inequality,
        inequality_holds,
        bound: bound.map(BoundReport::from),
        lyapunov_residual,
        fixed_gramian,
        fixed_gramian_error,
    }
}

/// `t, y…, y_tilde…, e…, e_norm` with one row per sample.
pub fn trajectory_csv(t: &Trajectory) -> String {
    let p = t.y.first().map_or(0, |v| v.len());
    let mut header = vec!["t".to_string()];
    for name in ["y", "y_tilde", "e"] {
        header.extend((1..=p).map(|i| format!("{name}{i}")));
    }
    header.push("e_norm".into());
    let mut out = header.join(",");
    out.push('\n');
    for k in 0..t.times.len() {
        let mut fields = vec![format_float(t.times[k])];
        for series in [&t.y, &t.y_tilde, &t.e] {
            fields.extend(series[k].iter().map(|&x| format_float(x)));
        }
        fields.push(format_float(t.e[k].norm()));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryReport {
    pub times: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub y_tilde: Vec<Vec<f64>>,
    pub e: Vec<Vec<f64>>,
    pub error_norm: f64,
    pub max_abs_e: f64,
    pub max_abs_y: f64,
}

pub fn trajectory_report(t: &Trajectory) -> TrajectoryReport {
    let vecs = |s: &[netid_core::Vector]| s.iter().map(|v| v.iter().copied().collect()).collect::<Vec<Vec<f64>>>();
    let max_abs = |s: &[netid_core::Vector]| s.iter().map(|v| v.amax()).fold(0.0, f64::max);
    TrajectoryReport {
        times: t.times.clone(),
        y: vecs(&t.y),
        y_tilde: vecs(&t.y_tilde),
        e: vecs(&t.e),
        error_norm: t.error_norm,
        max_abs_e: max_abs(&t.e),
        max_abs_y: max_abs(&t.y),
    }
}

/// Every output channel of `y`, `ỹ` and `e` against time.
pub fn trajectory_svg(t: &Trajectory) -> String {
    let p = t.y.first().map_or(0, |v| v.len());
    let mut series = Vec::new();
    for (name, data) in [("y", &t.y), ("ỹ", &t.y_tilde), ("e", &t.e)] {
        for i in 0..p {
            let label = if p == 1 { name.to_string() } else { format!("{name}{}", i + 1) };
            series.push(crate::svg::Series::new(label, t.times.clone(), data.iter().map(|v| v[i]).collect()));
        }
    }
    crate::svg::line_chart("Measured trajectories", "t", "output", &series)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports hold plain data") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality_formatting() {
        let (line, holds) = inequality_line(0.0357, 0.6487, 1.0);
        assert!(holds);
        assert_eq!(line, "0.0357 < 0.6487·√2 = 0.9174");
        let (_, holds) = inequality_line(2.0, 0.5, 1.0);
        assert!(!holds);
    }

    #[test]
    fn supports_render_as_bits() {
        assert_eq!(support_string(&[true, false, true]), "101");
    }
}
