//! The Hermitian form pipeline: transition matrices `X_rho`, the diagonal
//! `Delta_rho`, monodromy generators, `H` itself, invariance residuals,
//! signatures, and the Matsubara-Goto sign comparison.

pub mod cmatrix;
pub mod phase;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fan::lp::{LpProblem, LpResult};
use crate::fan::{zonotope, Cotriangulation, Zonotope};
use crate::ratlin::{Rational, SystemData};
use crate::solpts::{check_total_nonresonance, solution_points_for_cotriangulation, SolutionPoint};

pub use cmatrix::CMatrix;
pub use phase::Phase;

/// Numeric policy: residual tolerance, eigenvalue zero-test tolerance, and
/// the condition-estimate ceiling for inversions.
#[derive(Clone, Copy, Debug)]
pub struct HermOptions {
    pub tolerance: f64,
    pub eig_zero_tol: f64,
    pub cond_max: f64,
}

impl Default for HermOptions {
    fn default() -> Self {
        HermOptions { tolerance: 1e-9, eig_zero_tol: 1e-7, cond_max: 1e12 }
    }
}

/// Diagonal of the local monodromy `chi_{rho,n}`: phases `e^{2 pi i mu_k . n}`.
pub fn build_chi(points: &[SolutionPoint], n: &[BigInt]) -> Vec<Phase> {
    points.iter().map(|p| phase::phase_dot_int(p.mu(), n)).collect()
}

/// The transition matrix as exact phases: entry `(r, c)` is
/// `e^{2 pi i mu_c (tau_r - tau_1)}`; the first row is all ones.
pub fn build_x(points: &[SolutionPoint], tau: &[Vec<Rational>]) -> Result<Vec<Vec<Phase>>> {
    if points.len() != tau.len() {
        return Err(Error::Dimension(format!(
            "need as many tau points ({}) as solution points ({})",
            tau.len(),
            points.len()
        )));
    }
    for (idx, t) in tau.iter().enumerate().skip(1) {
        if !zonotope::differ_by_integers(t, &tau[0]) {
            return Err(Error::NonIntegralTauDifference { index: idx });
        }
    }
    let rows = tau
        .iter()
        .map(|t| {
            let diff = zonotope::tau_difference(t, &tau[0]);
            points.iter().map(|p| phase::phase_dot(p.mu(), &diff)).collect()
        })
        .collect();
    Ok(rows)
}

/// The diagonal `Delta_rho` with exact signs and f64 magnitudes.
#[derive(Clone, Debug)]
pub struct DeltaDiagonal {
    pub values: Vec<f64>,
    pub signs: Vec<i8>,
}

impl DeltaDiagonal {
    pub fn sign_counts(&self) -> (usize, usize) {
        let pos = self.signs.iter().filter(|&&s| s > 0).count();
        let neg = self.signs.iter().filter(|&&s| s < 0).count();
        (pos, neg)
    }
}

/// Entry `k` is `Delta_{I_k} prod_{l in I_k} (-1)^{gamma^mu_l}
/// prod_{i not in I_k} sin(pi gamma^mu_i)`.
pub fn build_delta(sys: &SystemData, points: &[SolutionPoint]) -> Result<DeltaDiagonal> {
    let mut values = Vec::with_capacity(points.len());
    let mut signs = Vec::with_capacity(points.len());
    for (k, pt) in points.iter().enumerate() {
        let mut value = pt.cotriangle().delta().to_f64().unwrap_or(f64::NAN);
        let mut sign: i8 = 1;
        for i in 0..sys.n() {
            let g = &pt.gamma_mu()[i];
            if pt.cotriangle().contains(i) {
                let p = phase::parity_sign(g);
                sign *= p;
                value *= p as f64;
            } else {
                let s = phase::sin_pi_sign(g);
                if s == 0 {
                    return Err(Error::ZeroDiagonalEntry { index: k });
                }
                sign *= s;
                value *= phase::sin_pi(g);
            }
        }
        values.push(value);
        signs.push(sign);
    }
    Ok(DeltaDiagonal { values, signs })
}

/// `H = (conj(X)^T)^{-1} Delta X^{-1}` given `X^{-1}`.
pub fn build_h(x_inv: &CMatrix, delta: &DeltaDiagonal) -> CMatrix {
    x_inv.adjoint() * cmatrix::real_diagonal(&delta.values) * x_inv
}

/// Monodromy generators `M_{rho,j} = X chi_{rho,e_j} X^{-1}`, `j = 1..d`.
pub fn monodromy_generators(
    x: &CMatrix,
    x_inv: &CMatrix,
    points: &[SolutionPoint],
    d: usize,
) -> Vec<CMatrix> {
    (0..d)
        .map(|j| {
            let mut e = vec![BigInt::zero(); d];
            e[j] = BigInt::one();
            let chi = build_chi(points, &e);
            let chi_c: Vec<Complex64> = chi.iter().map(Phase::to_c64).collect();
            x * cmatrix::diagonal(&chi_c) * x_inv
        })
        .collect()
}

/// Invariance residual `max |conj(M)^T H M - H|`.
pub fn verify_invariance(h: &CMatrix, m: &CMatrix) -> f64 {
    cmatrix::max_abs_diff(&(m.adjoint() * h * m), h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

/// Sign counts of the diagonal, cross-checked against the eigenvalue signs
/// of `H` (Sylvester congruence). Mismatch or a numerically zero eigenvalue
/// is an error.
pub fn signature(delta: &DeltaDiagonal, h: &CMatrix, opts: &HermOptions) -> Result<Signature> {
    let (delta_pos, delta_neg) = delta.sign_counts();
    let eigs = cmatrix::hermitian_eigenvalues(h);
    if let Some(&bad) = eigs.iter().find(|e| e.abs() <= opts.eig_zero_tol) {
        return Err(Error::DegenerateForm { value: bad });
    }
    let eig_pos = eigs.iter().filter(|&&e| e > 0.0).count();
    let eig_neg = eigs.len() - eig_pos;
    if (eig_pos, eig_neg) != (delta_pos, delta_neg) {
        return Err(Error::SignatureMismatch { delta_pos, delta_neg, eig_pos, eig_neg });
    }
    Ok(Signature { pos: delta_pos, neg: delta_neg, zero: 0 })
}

/// Per-point sign comparison against the Matsubara-Goto signature formula.
#[derive(Clone, Debug)]
pub struct MatsubaraEntry {
    pub mu: Vec<Rational>,
    pub s1_sign: i8,
    pub s2_sign: i8,
    pub agree: bool,
}

#[derive(Clone, Debug)]
pub struct MatsubaraReport {
    /// The comparison requires `h(alpha)` non-integral.
    pub applicable: bool,
    pub h_alpha: Rational,
    pub entries: Vec<MatsubaraEntry>,
    pub all_agree: bool,
}

/// Compare, per solution point, the sign of
/// `sin(-pi sum_{i not in I} gamma^mu_i) prod_{i not in I} sin(pi gamma^mu_i)`
/// with the sign of the `Delta_rho` entry times `sign(sin(-pi h(alpha)))`.
/// Everything is decided in exact rational arithmetic.
pub fn matsubara_compare(sys: &SystemData, points: &[SolutionPoint]) -> MatsubaraReport {
    let h_alpha = sys.h_alpha();
    let h_sign = phase::sin_pi_sign(&-h_alpha.clone());
    if h_sign == 0 {
        return MatsubaraReport { applicable: false, h_alpha, entries: Vec::new(), all_agree: true };
    }
    let mut entries = Vec::with_capacity(points.len());
    let mut all_agree = true;
    for pt in points {
        let mut outside_sum = Rational::zero();
        let mut sin_prod: i8 = 1;
        let mut parity: i8 = 1;
        for i in 0..sys.n() {
            let g = &pt.gamma_mu()[i];
            if pt.cotriangle().contains(i) {
                parity *= phase::parity_sign(g);
            } else {
                outside_sum += g;
                sin_prod *= phase::sin_pi_sign(g);
            }
        }
        let s1_sign = phase::sin_pi_sign(&-outside_sum) * sin_prod;
        let s2_sign = parity * sin_prod;
        let agree = s1_sign == s2_sign * h_sign;
        all_agree &= agree;
        entries.push(MatsubaraEntry { mu: pt.mu().to_vec(), s1_sign, s2_sign, agree });
    }
    MatsubaraReport { applicable: true, h_alpha, entries, all_agree }
}

/// Outcome of the exact LP for `gamma_{0,i} < -b_i . sigma`.
#[derive(Clone, Debug)]
pub struct SigmaReport {
    pub feasible: bool,
    pub witness: Option<Vec<Rational>>,
}

/// Search for a rational `sigma` with `gamma_{0,i} < -b_i . sigma` for all
/// `i`; the Mellin-Barnes integral then satisfies the differential system.
/// Infeasibility is reported, not raised.
pub fn sigma_feasibility(sys: &SystemData) -> SigmaReport {
    let d = sys.d();
    let nv = d + 1;
    let mut lp = LpProblem::new(nv);
    let mut obj = vec![Rational::zero(); nv];
    obj[d] = Rational::one();
    lp.set_objective(obj);
    for i in 0..sys.n() {
        // b_i . sigma + t <= -gamma_{0,i}
        let mut row: Vec<Rational> = sys
            .b_col(i)
            .into_iter()
            .map(Rational::from_integer)
            .collect();
        row.push(Rational::one());
        lp.leq(row, -sys.gamma0()[i].clone());
    }
    let mut cap = vec![Rational::zero(); nv];
    cap[d] = Rational::one();
    lp.leq(cap, Rational::one());
    match lp.solve() {
        LpResult::Optimal { value, x } if value.is_positive() => {
            let sigma = x[..d].to_vec();
            debug_assert!((0..sys.n()).all(|i| {
                sys.gamma0()[i] < -crate::ratlin::dot_rat_int(&sigma, &sys.b_col(i))
            }));
            SigmaReport { feasible: true, witness: Some(sigma) }
        }
        _ => SigmaReport { feasible: false, witness: None },
    }
}

/// A chosen Mellin-Barnes argument list: `D` points of one integer-translate
/// class inside the half zonotope.
#[derive(Clone, Debug)]
pub struct TauSelection {
    pub offset: Vec<Rational>,
    pub points: Vec<Vec<Rational>>,
    /// Offsets tried, with the number of translate points each produced.
    pub searched: Vec<(Vec<Rational>, usize)>,
}

/// Search offsets in the fixed order (user value, all-halves, origin,
/// zonotope-center) for one whose translate class meets the half zonotope in
/// exactly `required` points.
pub fn select_tau_basis(
    sys: &SystemData,
    required: usize,
    user_offset: Option<&[Rational]>,
) -> Result<TauSelection> {
    let d = sys.d();
    let half = Zonotope::half(sys);
    let mut candidates: Vec<Vec<Rational>> = Vec::new();
    if let Some(u) = user_offset {
        candidates.push(zonotope::reduce_offset(u));
    }
    candidates.push(vec![Rational::new(1.into(), 2.into()); d]);
    candidates.push(vec![Rational::zero(); d]);
    // Zonotope center (the origin for zero column sums), kept for the search
    // order contract.
    candidates.push(zonotope::reduce_offset(&vec![Rational::zero(); d]));
    candidates.dedup();

    let mut searched = Vec::new();
    let mut best = 0usize;
    for offset in candidates {
        let points = half.lattice_translates(&offset);
        searched.push((offset.clone(), points.len()));
        best = best.max(points.len());
        if points.len() == required {
            return Ok(TauSelection { offset, points, searched });
        }
        if points.len() > required {
            return Err(Error::Internal(format!(
                "found {} tau points, more than the rank {required}",
                points.len()
            )));
        }
    }
    Err(Error::NoMellinBarnesBasis { required, found: best })
}

/// Everything attached to one chamber: tau list, ordered solution points,
/// exact and numeric `X`, the diagonal, `H`, the generators and signature.
#[derive(Clone, Debug)]
pub struct HermitianPackage {
    pub tau: Vec<Vec<Rational>>,
    pub points: Vec<SolutionPoint>,
    pub x_phases: Vec<Vec<Phase>>,
    pub x: CMatrix,
    pub x_cond: f64,
    pub delta: DeltaDiagonal,
    pub h: CMatrix,
    pub hermitian_defect: f64,
    pub generators: Vec<CMatrix>,
    pub signature: Signature,
}

impl HermitianPackage {
    /// Build the package for one cotriangulation with a fixed tau list.
    pub fn build(
        sys: &SystemData,
        ct: &Cotriangulation,
        tau: &[Vec<Rational>],
        opts: &HermOptions,
    ) -> Result<HermitianPackage> {
        let nonres = check_total_nonresonance(sys)?;
        if let Some(w) = nonres.witness {
            return Err(Error::Resonant { indices: w.cotriangle, col: w.col });
        }
        let points = solution_points_for_cotriangulation(sys, ct)?;
        // tau differences must live in the open zonotope for the invariance
        // theory to apply; assert before building anything.
        let full = Zonotope::full(sys);
        for (r, tr) in tau.iter().enumerate() {
            for tc in tau.iter().skip(r + 1) {
                if !full.contains(&zonotope::tau_difference(tr, tc)) {
                    return Err(Error::TauOutsideZonotope);
                }
            }
        }
        let x_phases = build_x(&points, tau)?;
        let x = cmatrix::phase_matrix(&x_phases);
        let (x_inv, x_cond) = cmatrix::inverse_with_cond(&x, opts.cond_max)?;
        let delta = build_delta(sys, &points)?;
        let h = build_h(&x_inv, &delta);
        let hermitian_defect = cmatrix::hermitian_residual(&h);
        let generators = monodromy_generators(&x, &x_inv, &points, sys.d());
        let signature = signature(&delta, &h, opts)?;
        Ok(HermitianPackage {
            tau: tau.to_vec(),
            points,
            x_phases,
            x,
            x_cond,
            delta,
            h,
            hermitian_defect,
            generators,
            signature,
        })
    }

    /// Congruence residual `max |conj(X)^T H X - Delta|`.
    pub fn congruence_residual(&self) -> f64 {
        let lhs = self.x.adjoint() * &self.h * &self.x;
        cmatrix::max_abs_diff(&lhs, &cmatrix::real_diagonal(&self.delta.values))
    }

    pub fn max_invariance_residual(&self) -> f64 {
        self.generators
            .iter()
            .map(|m| verify_invariance(&self.h, m))
            .fold(0.0, f64::max)
    }
}

/// Dimension of the solution space of `conj(M)^T Y M = Y` over all given
/// generators, reported as a numeric nullity (no pass/fail judgment).
pub fn invariance_nullity(generators: &[&CMatrix], zero_tol: f64) -> usize {
    let Some(first) = generators.first() else {
        return 0;
    };
    let dsq = first.nrows() * first.ncols();
    let mut rows: Vec<CMatrix> = Vec::new();
    for m in generators {
        let k = m.transpose().kronecker(&m.adjoint());
        rows.push(k - CMatrix::identity(dsq, dsq));
    }
    let stacked = CMatrix::from_fn(rows.len() * dsq, dsq, |i, j| rows[i / dsq][(i % dsq, j)]);
    dsq - numeric_rank(&stacked, zero_tol)
}

fn numeric_rank(m: &CMatrix, zero_tol: f64) -> usize {
    let mut a = m.clone();
    let scale = cmatrix::max_abs(&a).max(1.0);
    let (rows, cols) = a.shape();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let (pivot, pnorm) = (row..rows)
            .map(|r| (r, a[(r, col)].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pnorm <= zero_tol * scale {
            continue;
        }
        a.swap_rows(row, pivot);
        let p = a[(row, col)];
        for r in row + 1..rows {
            let f = a[(r, col)] / p;
            for c in col..cols {
                let v = a[(r, c)] - f * a[(row, c)];
                a[(r, c)] = v;
            }
        }
        rank += 1;
        row += 1;
    }
    rank
}
