//! System data: the Gale dual `B` with parameter vector `gamma0`, and the
//! derived matrix `A`, parameter `alpha` and normalizing linear form `h`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::hnf::{int_rank, lattice_basis, lattice_contains, saturated_integer_kernel};
use super::matrix::{dot_rat_int, IntMatrix, Rational};
use crate::error::{Error, Result};

/// A validated problem instance.
///
/// `B` is a `d x N` integer matrix whose rows form a basis of a saturated
/// rank-`d` lattice inside the hyperplane of zero coordinate sums; `A` is an
/// `r x N` (`r = N - d`) integer matrix whose integer kernel is that lattice.
/// All fields are immutable after construction.
#[derive(Clone, Debug)]
pub struct SystemData {
    b: IntMatrix,
    gamma0: Vec<Rational>,
    a: IntMatrix,
    alpha: Vec<Rational>,
    h_form: Vec<Rational>,
}

impl SystemData {
    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn gamma0(&self) -> &[Rational] {
        &self.gamma0
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn alpha(&self) -> &[Rational] {
        &self.alpha
    }

    /// The linear form with `h(a_i) = 1` for every column of `A`.
    pub fn h_form(&self) -> &[Rational] {
        &self.h_form
    }

    /// `h(alpha)`, which equals the coordinate sum of `gamma0`.
    pub fn h_alpha(&self) -> Rational {
        self.gamma0.iter().sum()
    }

    pub fn n(&self) -> usize {
        self.b.cols()
    }

    pub fn d(&self) -> usize {
        self.b.rows()
    }

    pub fn r(&self) -> usize {
        self.n() - self.d()
    }

    /// Column `i` of `B` as big integers.
    pub fn b_col(&self, i: usize) -> Vec<BigInt> {
        self.b.col(i)
    }

    /// Square submatrix of `B` on the given column indices.
    pub fn b_sub(&self, indices: &[usize]) -> IntMatrix {
        self.b.select_columns(indices)
    }

    /// `gamma0 + mu B` for a row vector `mu` of length `d`.
    pub fn gamma_shifted(&self, mu: &[Rational]) -> Vec<Rational> {
        assert_eq!(mu.len(), self.d());
        (0..self.n())
            .map(|j| &self.gamma0[j] + dot_rat_int(mu, &self.b.col(j)))
            .collect()
    }
}

/// Validate `(B, gamma0)` and derive `A`, `alpha` and `h`.
pub fn build_system(b: IntMatrix, gamma0: Vec<Rational>) -> Result<SystemData> {
    let d = b.rows();
    let n = b.cols();
    if d == 0 || n == 0 {
        return Err(Error::Dimension("B must be nonempty".into()));
    }
    if d >= n {
        return Err(Error::Dimension(format!(
            "B is {d}x{n}; need more columns than rows (r = N - d >= 1)"
        )));
    }
    if gamma0.len() != n {
        return Err(Error::Dimension(format!(
            "gamma0 has length {}, expected N = {n}",
            gamma0.len()
        )));
    }
    for row in 0..d {
        let sum: BigInt = b.row(row).iter().sum();
        if !sum.is_zero() {
            return Err(Error::RowSumNonzero { row, sum });
        }
    }
    for col in 0..n {
        if b.col(col).iter().all(Zero::is_zero) {
            return Err(Error::ZeroColumn { col });
        }
    }
    let rank = int_rank(&b);
    if rank != d {
        return Err(Error::RankDeficient { expected: d, found: rank });
    }

    let a = saturated_integer_kernel(&b)?;

    // Saturation: the kernel of A is the saturation of the row lattice of B;
    // the lattice is saturated exactly when the two coincide.
    let saturation = saturated_integer_kernel(&a)?;
    for r in 0..saturation.rows() {
        if !lattice_contains(&b, saturation.row(r)) {
            return Err(Error::NotSaturated { witness: saturation.row(r).to_vec() });
        }
    }
    debug_assert_eq!(lattice_basis(&b), lattice_basis(&saturation));

    // h A = (1, ..., 1), solved as A^T h^T = 1 with exact consistency check.
    let ones = vec![Rational::one(); n];
    let h_form = match a.transpose().to_rational().solve(&ones) {
        Some(h) => h,
        None => {
            // Localize: first column of A that cannot extend a consistent system.
            let at = a.transpose().to_rational();
            let mut col = n - 1;
            for take in 1..=n {
                let sub = IntMatrix::new(
                    take,
                    a.rows(),
                    (0..take).flat_map(|r| a.col(r)).collect::<Vec<_>>(),
                )
                .to_rational();
                debug_assert_eq!(sub.cols(), at.cols());
                if sub.solve(&ones[..take].to_vec()).is_none() {
                    col = take - 1;
                    break;
                }
            }
            return Err(Error::NoLinearForm { col });
        }
    };

    let alpha: Vec<Rational> = (0..a.rows())
        .map(|i| {
            a.row(i)
                .iter()
                .zip(&gamma0)
                .map(|(aij, g)| Rational::from_integer(aij.clone()) * g)
                .sum()
        })
        .collect();

    Ok(SystemData { b, gamma0, a, alpha, h_form })
}
