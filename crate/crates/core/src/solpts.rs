//! Solution points: the `mu` in `[0,1)^d` with `gamma0 + mu B` integral
//! exactly on a cotriangle, their shifted parameter vectors, and the
//! effective total-non-resonance check.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fan::{Cotriangle, Cotriangulation};
use crate::ratlin::{Rational, SystemData};

/// One solution point with its cotriangle and shifted parameters.
#[derive(Clone, Debug)]
pub struct SolutionPoint {
    mu: Vec<Rational>,
    cotriangle: Cotriangle,
    gamma_mu: Vec<Rational>,
}

impl SolutionPoint {
    pub fn mu(&self) -> &[Rational] {
        &self.mu
    }

    pub fn cotriangle(&self) -> &Cotriangle {
        &self.cotriangle
    }

    /// `gamma^mu = gamma0 + mu B`; integral exactly on the cotriangle.
    pub fn gamma_mu(&self) -> &[Rational] {
        &self.gamma_mu
    }
}

/// All solution points of a cotriangle, sorted lexicographically by `mu`.
///
/// Solves `gamma_{0I} + mu B_I` integral by enumerating the integer box that
/// the unit cube maps into and filtering exactly; the count must equal
/// `Delta_I`.
pub fn solution_points(sys: &SystemData, cotriangle: &Cotriangle) -> Result<Vec<SolutionPoint>> {
    let d = sys.d();
    let indices = cotriangle.indices();
    let b_i = sys.b_sub(indices);
    let inv = b_i
        .to_rational()
        .inverse()
        .ok_or_else(|| Error::Internal("singular cotriangle submatrix".into()))?;
    let gamma_i: Vec<Rational> = indices.iter().map(|&i| sys.gamma0()[i].clone()).collect();

    // k_j = gamma_{0I,j} + mu . (column j of B_I) ranges over the column's
    // signed sums as mu runs through [0,1)^d; overshoot and filter.
    let mut ranges = Vec::with_capacity(d);
    for j in 0..d {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for i in 0..d {
            let e = Rational::from_integer(b_i.get(i, j).clone());
            if e.is_positive() {
                hi += e;
            } else {
                lo += e;
            }
        }
        let lo = (&gamma_i[j] + lo).ceil().to_integer();
        let hi = (&gamma_i[j] + hi).floor().to_integer();
        ranges.push((lo, hi));
    }

    let mut points = Vec::new();
    let mut k: Vec<BigInt> = ranges.iter().map(|(lo, _)| lo.clone()).collect();
    'outer: loop {
        let rhs: Vec<Rational> = (0..d)
            .map(|j| Rational::from_integer(k[j].clone()) - &gamma_i[j])
            .collect();
        // mu = (k - gamma_{0I}) B_I^{-1} as a row vector.
        let mu = inv.vec_mul(&rhs);
        if mu.iter().all(|m| !m.is_negative() && m < &Rational::one()) {
            let gamma_mu = sys.gamma_shifted(&mu);
            debug_assert!(indices.iter().all(|&i| gamma_mu[i].denom().is_one()));
            points.push(SolutionPoint { mu, cotriangle: cotriangle.clone(), gamma_mu });
        }
        for i in (0..d).rev() {
            if k[i] < ranges[i].1 {
                k[i] += 1;
                for j in i + 1..d {
                    k[j].clone_from(&ranges[j].0);
                }
                continue 'outer;
            }
        }
        break;
    }
    points.sort_by(|a, b| a.mu.cmp(&b.mu));

    if BigInt::from(points.len()) != *cotriangle.delta() {
        return Err(Error::SolutionCountMismatch {
            indices: indices.to_vec(),
            expected: cotriangle.delta().clone(),
            found: points.len(),
        });
    }
    Ok(points)
}

/// Witness of a failed total-non-resonance check.
#[derive(Clone, Debug)]
pub struct ResonanceWitness {
    pub cotriangle: Vec<usize>,
    pub mu: Vec<Rational>,
    /// Column outside the cotriangle where `gamma^mu` is integral.
    pub col: usize,
}

/// Report of the effective total-non-resonance test: for every cotriangle
/// and every solution point, `gamma^mu` must be non-integral off the
/// cotriangle. Violations are reported, not raised.
#[derive(Clone, Debug)]
pub struct NonresonanceReport {
    pub pass: bool,
    pub witness: Option<ResonanceWitness>,
    pub cotriangles_checked: usize,
    pub points_checked: usize,
}

pub fn check_total_nonresonance(sys: &SystemData) -> Result<NonresonanceReport> {
    let cotriangles = crate::fan::enumerate_cotriangles(sys);
    let mut points_checked = 0;
    for cot in &cotriangles {
        for pt in solution_points(sys, cot)? {
            points_checked += 1;
            for i in 0..sys.n() {
                if !cot.contains(i) && pt.gamma_mu[i].denom().is_one() {
                    return Ok(NonresonanceReport {
                        pass: false,
                        witness: Some(ResonanceWitness {
                            cotriangle: cot.indices().to_vec(),
                            mu: pt.mu.clone(),
                            col: i,
                        }),
                        cotriangles_checked: cotriangles.len(),
                        points_checked,
                    });
                }
            }
        }
    }
    Ok(NonresonanceReport {
        pass: true,
        witness: None,
        cotriangles_checked: cotriangles.len(),
        points_checked,
    })
}

/// Concatenated solution points of a cotriangulation: cotriangles in
/// lexicographic order, points sorted within each. Length `D`.
pub fn solution_points_for_cotriangulation(
    sys: &SystemData,
    ct: &Cotriangulation,
) -> Result<Vec<SolutionPoint>> {
    let mut out = Vec::new();
    for cot in ct.cotriangles() {
        out.extend(solution_points(sys, cot)?);
    }
    debug_assert_eq!(BigInt::from(out.len()), ct.delta_sum());
    Ok(out)
}
