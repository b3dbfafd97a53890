//! Small dense complex matrices used as coefficients of represented quantum
//! group elements.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default comparison tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

pub fn identity(k: usize) -> CMatrix {
    CMatrix::identity(k, k)
}

pub fn zeros(k: usize) -> CMatrix {
    CMatrix::zeros(k, k)
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Real rank-one projection onto the line at angle `theta`.
pub fn line_projection(theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c * c, 0.0),
            Complex64::new(c * s, 0.0),
            Complex64::new(c * s, 0.0),
            Complex64::new(s * s, 0.0),
        ],
    )
}

/// Round to 12 significant digits for deterministic report output.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}
