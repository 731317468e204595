//! Small dense Hermitian linear algebra on complex matrices.
//!
//! Spectral norms are computed from the Gram matrix `M†M` (or `MM†`, whichever
//! is smaller) with a full Hermitian eigensolve up to [`EIGEN_LIMIT`]
//! columns, and with power iteration beyond that.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::Serialize;

use crate::CMat;

/// Largest Gram dimension solved with a dense eigendecomposition.
pub const EIGEN_LIMIT: usize = 512;
/// Relative stopping tolerance for power iteration.
pub const POWER_TOL: f64 = 1e-10;
/// Iteration cap for power iteration.
pub const POWER_MAX_ITER: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMethod {
    Empty,
    Eigen,
    PowerIteration,
}

#[derive(Clone, Copy, Debug)]
pub struct SpectralNorm {
    pub value: f64,
    pub method: SpectralMethod,
}

/// Operator norm `‖M‖` of a complex matrix.
pub fn spectral_norm(m: &CMat) -> SpectralNorm {
    if m.nrows() == 0 || m.ncols() == 0 {
        return SpectralNorm {
            value: 0.0,
            method: SpectralMethod::Empty,
        };
    }
    let gram = if m.ncols() <= m.nrows() {
        m.adjoint() * m
    } else {
        m * m.adjoint()
    };
    let (top, method) = if gram.nrows() <= EIGEN_LIMIT {
        (max_eigenvalue(&gram), SpectralMethod::Eigen)
    } else {
        (power_iteration(&gram), SpectralMethod::PowerIteration)
    };
    SpectralNorm {
        value: top.max(0.0).sqrt(),
        method,
    }
}

/// Shorthand for `spectral_norm(m).value`.
pub fn opnorm(m: &CMat) -> f64 {
    spectral_norm(m).value
}

/// Replaces `h` by `(h + h†)/2`.
pub fn hermitize(h: &CMat) -> CMat {
    (h + h.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    if h.nrows() == 0 {
        return Vec::new();
    }
    let eig = SymmetricEigen::new(hermitize(h));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

pub fn max_eigenvalue(h: &CMat) -> f64 {
    hermitian_eigenvalues(h).last().copied().unwrap_or(0.0)
}

pub fn min_eigenvalue(h: &CMat) -> f64 {
    hermitian_eigenvalues(h).first().copied().unwrap_or(0.0)
}

/// Applies `g` to the spectrum of a Hermitian matrix.
pub fn hermitian_function(h: &CMat, g: impl Fn(f64) -> f64) -> CMat {
    let n = h.nrows();
    if n == 0 {
        return h.clone();
    }
    let eig = SymmetricEigen::new(hermitize(h));
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let s = Complex64::new(g(*lam), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    scaled * v.adjoint()
}

/// Square root of a positive semidefinite matrix; negative roundoff
/// eigenvalues are clamped to zero.
pub fn psd_sqrt(h: &CMat) -> CMat {
    hermitian_function(h, |x| x.max(0.0).sqrt())
}

fn power_iteration(a: &CMat) -> f64 {
    let n = a.nrows();
    // deterministic start with no special symmetry
    let mut v = nalgebra::DVector::from_fn(n, |i, _| {
        Complex64::new(1.0 + (i as f64 * 0.618_033_988_749).fract(), 0.0)
    });
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = a * &v;
        let next = v.dotc(&w).re;
        let wn = w.norm();
        if wn == 0.0 {
            return 0.0;
        }
        v = w / Complex64::new(wn, 0.0);
        if (next - lambda).abs() <= POWER_TOL * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

/// Frobenius distance between two matrices of equal shape.
pub fn frobenius_distance(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm()
}

/// Largest absolute entrywise difference.
pub fn max_entry_distance(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
