//! Binomial-residue calculus for the form
//! `omega(tau, z) = z^tau dz/z / prod_j (x_j z^{b_j} - 1)` with
//! `x_j = e^{2 pi i gamma_{0,j}}`: pointwise residues at the torus points
//! `zeta^mu`, per-cotriangulation sums, wall-crossing equality through the
//! one-variable reduction `Omega(w)`, and global invariance.
//!
//! Branch convention: `z^tau` is evaluated as `e^{2 pi i mu . tau}` with the
//! solution-point representative `mu` in `[0,1)^d`. The wall-crossing and
//! global identities then require `tau` to be an integer vector in the open
//! zonotope; the one-variable audit needs only the rotated last coordinate
//! of `tau` to be integral and tracks the branch correction exactly.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fan::{zonotope, Cotriangle, Cotriangulation, SecondaryFan, Zonotope};
use crate::herm::phase::{self, Phase};
use crate::ratlin::{
    dot_rat, saturated_integer_kernel, unimodular_with_last_row, IntMatrix, Rational, SystemData,
};
use crate::solpts::{solution_points, solution_points_for_cotriangulation, SolutionPoint};

/// The form `omega(tau, .)` for one system: `tau` plus cached zonotope
/// membership.
#[derive(Clone, Debug)]
pub struct ResidueContext<'a> {
    sys: &'a SystemData,
    tau: Vec<Rational>,
    tau_in_zonotope: bool,
}

impl<'a> ResidueContext<'a> {
    /// Requires `tau` strictly inside `Z_B`.
    pub fn new(sys: &'a SystemData, tau: Vec<Rational>) -> Result<Self> {
        let ctx = Self::with_unchecked_tau(sys, tau);
        if !ctx.tau_in_zonotope {
            return Err(Error::TauOutsideZonotope);
        }
        Ok(ctx)
    }

    /// Records zonotope membership without enforcing it; the audits report
    /// a failed hypothesis instead of erroring.
    pub fn with_unchecked_tau(sys: &'a SystemData, tau: Vec<Rational>) -> Self {
        assert_eq!(tau.len(), sys.d(), "tau has wrong dimension");
        let tau_in_zonotope = Zonotope::full(sys).contains(&tau);
        ResidueContext { sys, tau, tau_in_zonotope }
    }

    pub fn sys(&self) -> &SystemData {
        self.sys
    }

    pub fn tau(&self) -> &[Rational] {
        &self.tau
    }

    pub fn tau_in_zonotope(&self) -> bool {
        self.tau_in_zonotope
    }

    /// `x_j = e^{2 pi i gamma_{0,j}}` as an exact phase.
    pub fn x_phase(&self, j: usize) -> Phase {
        Phase::new(self.sys.gamma0()[j].clone())
    }

    pub fn tau_integral(&self) -> bool {
        zonotope::is_integral(&self.tau)
    }
}

/// The torus point `zeta^mu = e^{2 pi i mu}` of a solution point.
#[derive(Clone, Debug)]
pub struct ZetaPoint {
    point: SolutionPoint,
    zeta: Vec<Phase>,
}

impl ZetaPoint {
    pub fn new(point: SolutionPoint) -> Self {
        let zeta = point.mu().iter().map(|m| Phase::new(m.clone())).collect();
        ZetaPoint { point, zeta }
    }

    pub fn zeta(&self) -> &[Phase] {
        &self.zeta
    }

    pub fn point(&self) -> &SolutionPoint {
        &self.point
    }

    /// `x_i (zeta^mu)^{b_i} = 1` exactly (as phases) for `i` in the
    /// cotriangle.
    pub fn defining_phases_vanish(&self, sys: &SystemData) -> bool {
        self.point.cotriangle().indices().iter().all(|&i| {
            let mut p = Phase::new(sys.gamma0()[i].clone());
            for (z, b) in self.zeta.iter().zip(sys.b_col(i)) {
                p = p.mul(&z.pow(&b));
            }
            p.is_one()
        })
    }

    /// Phase of `prod_{j in I} x_j (zeta^mu)^{b_j}`, which reduces the signed
    /// residue formula to the `1/Delta_I` form; must be exactly one.
    pub fn jacobian_phase(&self) -> Phase {
        let mut p = Phase::one();
        for &j in self.point.cotriangle().indices() {
            p = p.mul(&Phase::new(self.point.gamma_mu()[j].clone()));
        }
        p
    }
}

/// `Res_{z = zeta^mu} omega = e^{2 pi i mu tau} /
/// (Delta_I prod_{j not in I} (e^{2 pi i gamma^mu_j} - 1))`.
pub fn residue_at(ctx: &ResidueContext, point: &SolutionPoint) -> Result<Complex64> {
    let sys = ctx.sys;
    let numerator = phase::phase_dot(point.mu(), &ctx.tau).to_c64();
    let mut denom = Complex64::new(
        point.cotriangle().delta().to_f64().unwrap_or(f64::NAN),
        0.0,
    );
    for j in 0..sys.n() {
        if point.cotriangle().contains(j) {
            continue;
        }
        let g = &point.gamma_mu()[j];
        if g.denom().is_one() {
            return Err(Error::PoleCollision { col: j });
        }
        denom *= Phase::new(g.clone()).to_c64() - Complex64::ONE;
    }
    Ok(numerator / denom)
}

/// Sum of residues over all solution points of a cotriangulation.
pub fn cotriangulation_sum(ctx: &ResidueContext, ct: &Cotriangulation) -> Result<Complex64> {
    let mut sum = Complex64::ZERO;
    for pt in solution_points_for_cotriangulation(ctx.sys, ct)? {
        sum += residue_at(ctx, &pt)?;
    }
    Ok(sum)
}

#[derive(Clone, Debug)]
pub struct WallCrossingReport {
    pub wall: usize,
    /// `|sum over I_W - sum over J_W|`.
    pub residual: f64,
    /// The equality is a theorem only for integral `tau` inside `Z_B`.
    pub hypothesis_met: bool,
    pub side_sums: (Complex64, Complex64),
}

/// Residue sums over the wall cotriangles on each side of a wall.
pub fn wall_crossing_check(
    ctx: &ResidueContext,
    fan: &SecondaryFan,
    wall: usize,
) -> Result<WallCrossingReport> {
    let (ci, cj) = fan.walls()[wall].chambers;
    let side = |chamber: usize| -> Result<Complex64> {
        let mut sum = Complex64::ZERO;
        for cot in fan.wall_cotriangles(ctx.sys, chamber, wall) {
            for pt in solution_points(ctx.sys, &cot)? {
                sum += residue_at(ctx, &pt)?;
            }
        }
        Ok(sum)
    };
    let a = side(ci)?;
    let b = side(cj)?;
    Ok(WallCrossingReport {
        wall,
        residual: (a - b).norm(),
        hypothesis_met: ctx.tau_in_zonotope && ctx.tau_integral(),
        side_sums: (a, b),
    })
}

/// Wall-crossing check addressed by a chamber pair; errors when the
/// chambers are not adjacent.
pub fn wall_crossing_between(
    ctx: &ResidueContext,
    fan: &SecondaryFan,
    chamber_a: usize,
    chamber_b: usize,
) -> Result<WallCrossingReport> {
    let wall = fan.wall_between(chamber_a, chamber_b).ok_or(Error::NotAdjacent)?;
    wall_crossing_check(ctx, fan, wall)
}

#[derive(Clone, Debug)]
pub struct GlobalInvarianceReport {
    /// Max over chamber pairs of the cotriangulation-sum difference.
    pub max_residual: f64,
    pub hypothesis_met: bool,
    pub sums: Vec<Complex64>,
}

/// Compare the residue sums of every pair of chambers.
pub fn global_invariance(ctx: &ResidueContext, fan: &SecondaryFan) -> Result<GlobalInvarianceReport> {
    let mut sums = Vec::with_capacity(fan.chambers().len());
    for ch in fan.chambers() {
        sums.push(cotriangulation_sum(ctx, ch.cotriangulation())?);
    }
    let mut max_residual: f64 = 0.0;
    for i in 0..sums.len() {
        for j in i + 1..sums.len() {
            max_residual = max_residual.max((sums[i] - sums[j]).norm());
        }
    }
    Ok(GlobalInvarianceReport {
        max_residual,
        hypothesis_met: ctx.tau_in_zonotope && ctx.tau_integral(),
        sums,
    })
}

/// One finite pole of the one-variable form, with its matched solution
/// point and branch-corrected residue.
#[derive(Clone, Debug)]
pub struct OmegaPole {
    /// Column whose factor vanishes at this pole.
    pub col: usize,
    /// Reduced phase of the pole location on the unit circle.
    pub theta: Rational,
    /// Sign of `beta_col`: which side of the wall the pole belongs to.
    pub side: i8,
    pub residue: Complex64,
    /// Solution point of the cotriangle `K + {col}` matching this pole.
    pub matched_mu: Vec<Rational>,
}

/// Report of the one-variable reduction audit for a `(d-1)`-subset `K`.
#[derive(Clone, Debug)]
pub struct OneVarAudit {
    pub k_indices: Vec<usize>,
    pub rotation: IntMatrix,
    pub beta: Vec<BigInt>,
    pub delta_top: BigInt,
    pub tau_rotated: Vec<Rational>,
    /// `tau'_d - sum of negative beta` (must be positive) and
    /// `tau'_d - sum of positive beta` (must be negative).
    pub support_low: Rational,
    pub support_high: Rational,
    pub hypothesis_ok: bool,
    pub hypothesis_notes: Vec<String>,
    pub poles: Vec<OmegaPole>,
    /// Sum of the residues of `Omega(w)` over its finite nonzero poles;
    /// zero when the hypotheses hold.
    pub finite_pole_sum: Option<Complex64>,
    /// Residuals of the signed partition against the two z-residue side
    /// sums (branch-corrected).
    pub side_residuals: Option<(f64, f64)>,
}

/// Rotate coordinates with an exact unimodular map sending the span of the
/// `K`-columns into the first `d - 1` coordinates, build `Omega(w)`, and
/// audit: the finite-pole residues sum to zero, the poles partition by side
/// into the two wall sums, and the Taylor-support bounds hold exactly.
pub fn one_var_residue_audit(ctx: &ResidueContext, k_indices: &[usize]) -> Result<OneVarAudit> {
    let sys = ctx.sys;
    let d = sys.d();
    let n = sys.n();
    let mut k_set = k_indices.to_vec();
    k_set.sort_unstable();
    k_set.dedup();
    if k_set.len() != d - 1 {
        return Err(Error::Dimension(format!(
            "K must have {} distinct indices, got {k_set:?}",
            d - 1
        )));
    }
    let b_k = sys.b_sub(&k_set);
    let bkt = b_k.transpose();
    if crate::ratlin::int_rank(&bkt) != d - 1 {
        return Err(Error::RankDeficient { expected: d - 1, found: crate::ratlin::int_rank(&bkt) });
    }
    // Primitive normal of the K-hyperplane; rotation with it as last row.
    let normal = saturated_integer_kernel(&bkt)?;
    let rotation = unimodular_with_last_row(normal.row(0))?;
    let b_rot = rotation.mul(sys.b());
    let beta: Vec<BigInt> = (0..n).map(|j| b_rot.get(d - 1, j).clone()).collect();
    for &j in &k_set {
        debug_assert!(beta[j].is_zero());
    }
    let delta_top = IntMatrix::new(
        d - 1,
        d - 1,
        (0..d - 1)
            .flat_map(|r| k_set.iter().map(move |&j| (r, j)))
            .map(|(r, j)| b_rot.get(r, j).clone())
            .collect(),
    )
    .det();
    // det(b_K | b_j) = beta_j * delta in the rotated coordinates.
    for j in 0..n {
        if k_set.contains(&j) {
            continue;
        }
        let mut cols = k_set.clone();
        cols.push(j);
        let full = b_rot.select_columns(&cols).det();
        if full != &beta[j] * &delta_top {
            return Err(Error::Internal(format!(
                "determinant relation failed at column {j}: {full} != {} * {delta_top}",
                beta[j]
            )));
        }
    }

    let rot_rat = rotation.to_rational();
    let tau_rotated = rot_rat.mul_vec(&ctx.tau);
    let tau_last = tau_rotated[d - 1].clone();
    let neg_sum: BigInt = (0..n)
        .filter(|j| !k_set.contains(j) && beta[*j].is_negative())
        .map(|j| beta[j].clone())
        .sum();
    let pos_sum: BigInt = (0..n)
        .filter(|j| !k_set.contains(j) && beta[*j].is_positive())
        .map(|j| beta[j].clone())
        .sum();
    let support_low = &tau_last - Rational::from_integer(neg_sum);
    let support_high = &tau_last - Rational::from_integer(pos_sum);

    let mut notes = Vec::new();
    if !ctx.tau_in_zonotope {
        notes.push("tau lies outside the open zonotope".to_string());
    }
    if !tau_last.denom().is_one() {
        notes.push(format!(
            "rotated tau_d = {} is not integral, Omega(w) is not rational",
            crate::ratlin::format_rational(&tau_last)
        ));
    }
    if !support_low.is_positive() {
        notes.push("support bound at w = 0 violated".to_string());
    }
    if !support_high.is_negative() {
        notes.push("support bound at w = infinity violated".to_string());
    }
    if !notes.is_empty() {
        return Ok(OneVarAudit {
            k_indices: k_set,
            rotation,
            beta,
            delta_top,
            tau_rotated,
            support_low,
            support_high,
            hypothesis_ok: false,
            hypothesis_notes: notes,
            poles: Vec::new(),
            finite_pole_sum: None,
            side_residuals: None,
        });
    }

    // Torus point: rotated phases of the lexicographically smallest solution
    // point among cotriangles extending K. Kept unreduced so that all branch
    // bookkeeping is exact.
    let ext = (0..n)
        .find(|j| !k_set.contains(j) && !beta[*j].is_zero())
        .ok_or_else(|| Error::Internal("no extension column with nonzero beta".into()))?;
    let mut base_indices = k_set.clone();
    base_indices.push(ext);
    base_indices.sort_unstable();
    let base_cot = Cotriangle::new(sys, &base_indices)?;
    let base_pt = &solution_points(sys, &base_cot)?[0];
    let rot_inv = rot_rat
        .inverse()
        .ok_or_else(|| Error::Internal("rotation inverse failed".into()))?;
    let mu_rot = rot_inv.vec_mul(base_pt.mu());

    // Phase of x_j Q_j(zeta): gamma_{0,j} plus the partial rotated pairing.
    let phi = |j: usize| -> Rational {
        let mut v = sys.gamma0()[j].clone();
        for s in 0..d - 1 {
            v += &mu_rot[s] * Rational::from_integer(b_rot.get(s, j).clone());
        }
        v
    };

    // Enumerate the finite nonzero poles: for each factor with beta_j != 0,
    // the |beta_j| roots of (x_j Q_j) w^{beta_j} = 1, all unit-circle phases.
    let mut pole_locs: Vec<(Rational, usize)> = Vec::new();
    for j in 0..n {
        if k_set.contains(&j) {
            continue;
        }
        if beta[j].is_zero() {
            if phi(j).denom().is_one() {
                return Err(Error::DegenerateFactor { col: j });
            }
            continue;
        }
        let count = beta[j].abs().to_usize().unwrap();
        for kk in 0..count {
            let theta = (Rational::from_integer(BigInt::from(kk)) - phi(j))
                / Rational::from_integer(beta[j].clone());
            let theta = Phase::new(theta).value().clone();
            if let Some((_, other)) = pole_locs.iter().find(|(t, _)| *t == theta) {
                return Err(Error::NonSimplePole { i: *other, j });
            }
            pole_locs.push((theta, j));
        }
    }
    pole_locs.sort();

    let denom_at = |theta: &Rational, skip: usize| -> Result<Complex64> {
        let mut acc = Complex64::ONE;
        for j in 0..n {
            if k_set.contains(&j) || j == skip {
                continue;
            }
            let factor_phase = phi(j) + theta * Rational::from_integer(beta[j].clone());
            if factor_phase.denom().is_one() {
                return Err(Error::NonSimplePole { i: skip, j });
            }
            acc *= Phase::new(factor_phase).to_c64() - Complex64::ONE;
        }
        Ok(acc)
    };

    // Q_0(zeta) w^{tau'_d} at a pole, as one exact phase; the partial part
    // uses the unreduced rotated exponents.
    let partial_tau: Rational = (0..d - 1).map(|s| &mu_rot[s] * &tau_rotated[s]).sum();

    let mut poles = Vec::with_capacity(pole_locs.len());
    let mut finite_sum = Complex64::ZERO;
    let mut plus_w = Complex64::ZERO;
    let mut minus_w = Complex64::ZERO;
    let mut plus_z = Complex64::ZERO;
    let mut minus_z = Complex64::ZERO;
    let abs_delta = Rational::from_integer(delta_top.abs());
    for (theta, j0) in pole_locs {
        let numerator = Phase::new(&partial_tau + &theta * &tau_last).to_c64();
        let beta_f = beta[j0].to_f64().unwrap();
        let residue = numerator / (denom_at(&theta, j0)? * Complex64::new(beta_f, 0.0));
        finite_sum += residue;
        let side = if beta[j0].is_positive() { 1i8 } else { -1 };

        // Match the pole with the solution point of K + {j0} whose rotated
        // phases are (mu_rot partial, theta).
        let mut rot_coords = mu_rot[..d - 1].to_vec();
        rot_coords.push(theta.clone());
        let mu_unreduced = rot_rat.vec_mul(&rot_coords);
        let mu_cand: Vec<Rational> = mu_unreduced.iter().map(|m| m - m.floor()).collect();
        let mut cols = k_set.clone();
        cols.push(j0);
        cols.sort_unstable();
        let cot = Cotriangle::new(sys, &cols)?;
        let matched = solution_points(sys, &cot)?
            .into_iter()
            .find(|p| p.mu() == mu_cand)
            .ok_or_else(|| {
                Error::Internal(format!("pole at phase {theta} has no matching solution point"))
            })?;
        // Branch correction between the Omega convention and the reduced
        // representative used by residue_at.
        let corr = Phase::new(
            dot_rat(&mu_unreduced, &ctx.tau) - dot_rat(matched.mu(), &ctx.tau),
        );
        let z_res = residue_at(ctx, &matched)? * corr.to_c64();
        if side > 0 {
            plus_w += residue;
            plus_z += z_res;
        } else {
            minus_w += residue;
            minus_z += z_res;
        }
        poles.push(OmegaPole {
            col: j0,
            theta,
            side,
            residue,
            matched_mu: matched.mu().to_vec(),
        });
    }
    let scale = phase::rational_to_f64(&abs_delta);
    let side_residuals = (
        (plus_w - plus_z.scale(scale)).norm(),
        (minus_w + minus_z.scale(scale)).norm(),
    );

    Ok(OneVarAudit {
        k_indices: k_set,
        rotation,
        beta,
        delta_top,
        tau_rotated,
        support_low,
        support_high,
        hypothesis_ok: true,
        hypothesis_notes: Vec::new(),
        poles,
        finite_pole_sum: Some(finite_sum),
        side_residuals: Some(side_residuals),
    })
}

/// All `(d-1)`-subsets with independent columns, the admissible audit inputs.
pub fn admissible_k_subsets(sys: &SystemData) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..sys.n())
        .combinations(sys.d() - 1)
        .filter(|k| {
            let m = sys.b_sub(k);
            crate::ratlin::int_rank(&m.transpose()) == sys.d() - 1
        })
        .collect()
}
