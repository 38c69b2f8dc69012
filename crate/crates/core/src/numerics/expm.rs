//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants (Higham 2005). The degree is the smallest of 3, 5, 7, 9, 13
//! whose backward-error bound covers `‖M‖₁`; otherwise `M` is scaled by `2⁻ˢ`
//! and the degree-13 approximant squared `s` times.

use crate::numerics::{ensure_finite, ensure_square, Matrix, Vector};
use crate::{Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17_297_280.0, 8_648_640.0, 1_995_840.0, 277_200.0, 25_200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn one_norm(m: &Matrix) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `(V − U)⁻¹ (V + U)`.
fn pade_quotient(u: Matrix, v: Matrix) -> Matrix {
    let num = &v + &u;
    let den = v - u;
    den.lu().solve(&num).expect("Padé denominator is nonsingular within its θ bound")
}

/// Low-degree approximant from the even powers `I, M², M⁴, …`.
fn pade_low(m: &Matrix, b: &[f64]) -> Matrix {
    let n = m.nrows();
    let m2 = m * m;
    let mut power = Matrix::identity(n, n);
    let mut u_inner = Matrix::zeros(n, n);
    let mut v = Matrix::zeros(n, n);
    for k in 0..b.len() / 2 {
        v += &power * b[2 * k];
        u_inner += &power * b[2 * k + 1];
        power = &power * &m2;
    }
    pade_quotient(m * u_inner, v)
}

fn pade_13(m: &Matrix) -> Matrix {
    let n = m.nrows();
    let id = Matrix::identity(n, n);
    let m2 = m * m;
    let m4 = &m2 * &m2;
    let m6 = &m2 * &m4;
    let b = &B13;
    let u_inner = &m6 * (&m6 * b[13] + &m4 * b[11] + &m2 * b[9])
        + &m6 * b[7]
        + &m4 * b[5]
        + &m2 * b[3]
        + &id * b[1];
    let u = m * u_inner;
    let v = &m6 * (&m6 * b[12] + &m4 * b[10] + &m2 * b[8])
        + &m6 * b[6]
        + &m4 * b[4]
        + &m2 * b[2]
        + &id * b[0];
    pade_quotient(u, v)
}

/// `e^M` for a square finite matrix.
pub fn expm(m: &Matrix) -> Result<Matrix> {
    ensure_square(m, "matrix exponential argument")?;
    ensure_finite(m, "matrix exponential argument")?;
    let norm = one_norm(m);
    for (degree, theta) in THETA {
        if norm <= theta {
            let b: &[f64] = match degree {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return Ok(pade_low(m, b));
        }
    }
    let s = if norm > THETA_13 { libm::ceil(libm::log2(norm / THETA_13)) as i32 } else { 0 };
    let scaled = m * libm::exp2(-(s as f64));
    let mut out = pade_13(&scaled);
    for _ in 0..s {
        out = &out * &out;
    }
    Ok(out)
}

/// `e^{Mt} x`.
pub fn matrix_exponential_apply(m: &Matrix, x: &Vector, t: f64) -> Result<Vector> {
    ensure_square(m, "system matrix")?;
    if x.len() != m.nrows() {
        return Err(Error::InvalidInput(alloc::format!(
            "state has length {}, expected {}",
            x.len(),
            m.nrows()
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(alloc::format!("time must be finite and non-negative, got {t}")));
    }
    Ok(expm(&(m * t))? * x)
}
