//! Row-style Hermite normal form and integer-lattice utilities.
//!
//! Convention: pivots are positive, entries above a pivot are reduced into
//! `[0, pivot)`, zero rows sink to the bottom. This form is canonical for a
//! given row lattice, so lattice equality reduces to matrix equality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// Result of `hermite_normal_form`: `u * m = h` with `u` unimodular.
pub struct Hnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
}

/// Row-style Hermite normal form with transformation matrix.
pub fn hermite_normal_form(m: &IntMatrix) -> Hnf {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut pivot_row = 0;

    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        // Euclidean reduction within the column until one nonzero entry is left.
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..rows {
                if !h.get(r, col).is_zero() {
                    best = match best {
                        Some(b) if h.get(b, col).abs() <= h.get(r, col).abs() => Some(b),
                        _ => Some(r),
                    };
                }
            }
            let Some(best) = best else { break };
            h.swap_rows(pivot_row, best);
            u.swap_rows(pivot_row, best);
            let mut reduced = true;
            for r in pivot_row + 1..rows {
                if !h.get(r, col).is_zero() {
                    let q = -h.get(r, col).div_floor(h.get(pivot_row, col));
                    h.add_scaled_row(r, pivot_row, &q);
                    u.add_scaled_row(r, pivot_row, &q);
                    if !h.get(r, col).is_zero() {
                        reduced = false;
                    }
                }
            }
            if reduced {
                break;
            }
        }
        if h.get(pivot_row, col).is_zero() {
            continue;
        }
        if h.get(pivot_row, col).is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        for r in 0..pivot_row {
            let q = -h.get(r, col).div_floor(h.get(pivot_row, col));
            if !q.is_zero() {
                h.add_scaled_row(r, pivot_row, &q);
                u.add_scaled_row(r, pivot_row, &q);
            }
        }
        pivot_row += 1;
    }
    Hnf { h, u }
}

/// Number of nonzero rows of the HNF, i.e. the rank over the rationals.
pub fn int_rank(m: &IntMatrix) -> usize {
    let h = hermite_normal_form(m).h;
    (0..h.rows())
        .filter(|&r| h.row(r).iter().any(|e| !e.is_zero()))
        .count()
}

/// Canonical basis of the row lattice: nonzero HNF rows.
pub fn lattice_basis(m: &IntMatrix) -> IntMatrix {
    let h = hermite_normal_form(m).h;
    let rows: Vec<Vec<BigInt>> = (0..h.rows())
        .filter(|&r| h.row(r).iter().any(|e| !e.is_zero()))
        .map(|r| h.row(r).to_vec())
        .collect();
    let n = rows.len();
    IntMatrix::new(n, m.cols(), rows.into_iter().flatten().collect())
}

/// Exact membership of `v` in the row lattice of `basis` (basis in any form).
pub fn lattice_contains(basis: &IntMatrix, v: &[BigInt]) -> bool {
    let h = lattice_basis(basis);
    let mut v = v.to_vec();
    for r in 0..h.rows() {
        let Some(col) = h.row(r).iter().position(|e| !e.is_zero()) else {
            continue;
        };
        if v[col].is_zero() {
            continue;
        }
        let (q, rem) = v[col].div_rem(h.get(r, col));
        if !rem.is_zero() {
            return false;
        }
        for c in 0..v.len() {
            let d = &v[c] - &q * h.get(r, c);
            v[c] = d;
        }
    }
    v.iter().all(Zero::is_zero)
}

/// Row lattices of two integer matrices coincide.
pub fn lattice_equal(a: &IntMatrix, b: &IntMatrix) -> bool {
    a.cols() == b.cols() && lattice_basis(a) == lattice_basis(b)
}

/// Basis of the saturated integer kernel `{v : m v^T = 0}` as rows, in
/// canonical (HNF) form. Requires `m` to have full row rank.
pub fn saturated_integer_kernel(m: &IntMatrix) -> Result<IntMatrix> {
    let rank = int_rank(m);
    if rank != m.rows() {
        return Err(Error::RankDeficient { expected: m.rows(), found: rank });
    }
    let mt = m.transpose();
    let Hnf { h, u } = hermite_normal_form(&mt);
    // Rows of `u` facing zero rows of `h` span the integer kernel; a kernel is
    // saturated by construction.
    let kernel_rows: Vec<Vec<BigInt>> = (0..h.rows())
        .filter(|&r| h.row(r).iter().all(Zero::is_zero))
        .map(|r| u.row(r).to_vec())
        .collect();
    let k = kernel_rows.len();
    debug_assert_eq!(k, m.cols() - rank);
    let raw = IntMatrix::new(k, m.cols(), kernel_rows.into_iter().flatten().collect());
    Ok(lattice_basis(&raw))
}

/// A unimodular matrix whose last row is the given primitive vector.
///
/// Used to rotate coordinates so that a chosen hyperplane becomes the last
/// coordinate hyperplane.
pub fn unimodular_with_last_row(v: &[BigInt]) -> Result<IntMatrix> {
    let d = v.len();
    let col = IntMatrix::new(d, 1, v.to_vec());
    let Hnf { h, u } = hermite_normal_form(&col);
    if !h.get(0, 0).is_one() {
        return Err(Error::Internal(format!(
            "vector {v:?} is not primitive (content {})",
            h.get(0, 0)
        )));
    }
    // u * v^T = e_1, so v * u^T = e_1^T and the first row of (u^T)^{-1} is v.
    let ut = u.transpose().to_rational();
    let inv = ut.inverse().ok_or_else(|| Error::Internal("unimodular inverse failed".into()))?;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(d);
    // Cycle the first row (= v) to the bottom.
    for r in (0..d).map(|i| (i + 1) % d) {
        rows.push(
            (0..d)
                .map(|c| {
                    let q = inv.get(r, c);
                    debug_assert!(q.denom().is_one());
                    q.numer().clone()
                })
                .collect(),
        );
    }
    let m = IntMatrix::new(d, d, rows.into_iter().flatten().collect());
    debug_assert_eq!(m.det().abs(), BigInt::one());
    debug_assert_eq!(m.row(d - 1), v);
    Ok(m)
}
