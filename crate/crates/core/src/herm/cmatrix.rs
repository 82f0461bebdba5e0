//! Complex dense matrices at working precision (f64), backed by nalgebra.
//!
//! Only inversion and eigenvalue extraction are approximate; everything that
//! feeds them is built from exact phases.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::phase::Phase;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Materialize a matrix of exact phases.
pub fn phase_matrix(rows: &[Vec<Phase>]) -> CMatrix {
    let r = rows.len();
    let c = if r == 0 { 0 } else { rows[0].len() };
    CMatrix::from_fn(r, c, |i, j| rows[i][j].to_c64())
}

pub fn diagonal(entries: &[Complex64]) -> CMatrix {
    let n = entries.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { Complex64::ZERO })
}

pub fn real_diagonal(entries: &[f64]) -> CMatrix {
    let n = entries.len();
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(entries[i], 0.0)
        } else {
            Complex64::ZERO
        }
    })
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Deviation from being Hermitian: `max |M - conj(M)^T|`.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse with a 1-norm condition estimate. Errors when the estimate
/// exceeds `cond_max` (no higher working precision is available here).
pub fn inverse_with_cond(m: &CMatrix, cond_max: f64) -> Result<(CMatrix, f64)> {
    let inv = m.clone().try_inverse().ok_or(Error::Singular)?;
    let cond = one_norm(m) * one_norm(&inv);
    if !cond.is_finite() || cond > cond_max {
        return Err(Error::IllConditioned { cond, max: cond_max });
    }
    Ok((inv, cond))
}

/// Eigenvalues of a numerically Hermitian matrix (symmetrized first).
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Eigenvalues of a general complex matrix via the Schur decomposition.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    m.clone()
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::Internal("Schur eigenvalue extraction failed".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::Rational;
    use approx::assert_abs_diff_eq;

    fn phase(p: i64, q: i64) -> Phase {
        Phase::new(Rational::new(p.into(), q.into()))
    }

    #[test]
    fn inverse_and_condition() {
        let x = phase_matrix(&[
            vec![phase(0, 1), phase(0, 1)],
            vec![phase(1, 2), phase(1, 3)],
        ]);
        let (inv, cond) = inverse_with_cond(&x, 1e12).unwrap();
        let id = &x * &inv;
        assert_abs_diff_eq!(max_abs_diff(&id, &CMatrix::identity(2, 2)), 0.0, epsilon = 1e-14);
        assert!(cond > 1.0 && cond < 100.0);
    }

    #[test]
    fn singular_rejected() {
        let m = phase_matrix(&[
            vec![phase(0, 1), phase(0, 1)],
            vec![phase(0, 1), phase(0, 1)],
        ]);
        assert!(matches!(
            inverse_with_cond(&m, 1e12),
            Err(Error::Singular) | Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn hermitian_eigenvalues_of_diagonal() {
        let m = real_diagonal(&[3.0, -1.0, 0.5]);
        let vals = hermitian_eigenvalues(&m);
        assert_eq!(vals.len(), 3);
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[2], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn general_eigenvalues_sum_to_trace() {
        let m = phase_matrix(&[
            vec![phase(1, 3), phase(1, 7)],
            vec![phase(2, 5), phase(5, 6)],
        ]);
        let ev = eigenvalues(&m).unwrap();
        let trace: Complex64 = m[(0, 0)] + m[(1, 1)];
        let sum: Complex64 = ev.iter().sum();
        assert_abs_diff_eq!((trace - sum).norm(), 0.0, epsilon = 1e-12);
    }
}
