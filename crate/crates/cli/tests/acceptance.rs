//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `--nocapture`). Criteria whose stated values are
//! mathematically unattainable for the Appell F4 Gale dual are implemented
//! as stated and fail with a printed impossibility certificate rather than
//! being weakened; see notes/decisions for the analysis.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Signed;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mbherm_core::error::Error as CoreError;
use mbherm_core::fan::{
    cotriangulation_for_direction, enumerate_cotriangles, secondary_fan, zonotope, Zonotope,
};
use mbherm_core::herm::{
    cmatrix, matsubara_compare, select_tau_basis, HermOptions, HermitianPackage, Phase,
    TauSelection,
};
use mbherm_core::ratlin::{build_system, parse_rational, IntMatrix, Rational, SystemData};
use mbherm_core::resid::{
    admissible_k_subsets, cotriangulation_sum, global_invariance, one_var_residue_audit,
    wall_crossing_check, ResidueContext,
};
use mbherm_core::solpts::{check_total_nonresonance, solution_points};

const TOL: f64 = 1e-9;

fn rat(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn rats(v: &[&str]) -> Vec<Rational> {
    v.iter().map(|s| rat(s)).collect()
}

fn gauss_sys() -> SystemData {
    build_system(
        IntMatrix::from_rows(&[vec![1, 1, -1, -1]]),
        rats(&["-1/2", "-1/3", "-4/5", "0"]),
    )
    .unwrap()
}

fn f4_sys() -> SystemData {
    build_system(
        IntMatrix::from_rows(&[vec![-1, -1, 1, 0, 1, 0], vec![-1, -1, 0, 1, 0, 1]]),
        rats(&["-1/2", "-1/3", "-4/5", "-6/7", "0", "0"]),
    )
    .unwrap()
}

fn pass(criterion: &str, msg: &str) {
    println!("criterion {criterion}: PASS - {msg}");
}

fn fail(criterion: &str, msg: &str) -> ! {
    println!("criterion {criterion}: FAIL - {msg}");
    panic!("criterion {criterion}: FAIL - {msg}");
}

fn rank_of(sys: &SystemData) -> usize {
    let fan = secondary_fan(sys, 0).unwrap();
    fan.chambers()[0]
        .cotriangulation()
        .delta_sum()
        .to_string()
        .parse()
        .unwrap()
}

fn packages_for(sys: &SystemData) -> Result<(Vec<HermitianPackage>, TauSelection), CoreError> {
    let fan = secondary_fan(sys, 0)?;
    let required = rank_of(sys);
    let sel = select_tau_basis(sys, required, None)?;
    let pkgs = fan
        .chambers()
        .iter()
        .map(|ch| HermitianPackage::build(sys, ch.cotriangulation(), &sel.points, &HermOptions::default()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((pkgs, sel))
}

/// Exhaustive certificate that no 4-point Mellin-Barnes tau set exists for
/// the F4 Gale dual: any such set has pairwise differences among the integer
/// interior points of Z_B, and the largest difference-closed subset there
/// has 3 elements.
fn f4_tau_impossibility() -> String {
    let sys = f4_sys();
    let full = Zonotope::full(&sys);
    let s: Vec<Vec<Rational>> = full.interior_integer_points();
    let contains = |v: &Vec<Rational>| full.contains(v);
    let zero = vec![rat("0"), rat("0")];
    assert!(s.contains(&zero));
    let others: Vec<&Vec<Rational>> = s.iter().filter(|p| **p != zero).collect();
    let mut best = 1;
    for mask in 0u32..(1 << others.len()) {
        let mut t: Vec<&Vec<Rational>> = vec![&zero];
        for (i, p) in others.iter().enumerate() {
            if mask & (1 << i) != 0 {
                t.push(p);
            }
        }
        let ok = (0..t.len()).all(|a| {
            (a + 1..t.len()).all(|b| contains(&zonotope::tau_difference(t[a], t[b])))
        });
        if ok {
            best = best.max(t.len());
        }
    }
    format!(
        "Z_B interior holds {} integer points; the largest difference-closed subset has {} \
         elements, so at most {} tau points of one translate class fit in (1/2)Z_B and a rank-4 \
         Mellin-Barnes basis cannot exist",
        s.len(),
        best,
        best
    )
}

// ---------------------------------------------------------------- criterion 1

#[test]
fn criterion_01_chamber_independence_gauss() {
    let sys = gauss_sys();
    let (pkgs, _) = packages_for(&sys).unwrap();
    assert_eq!(pkgs.len(), 2);
    let mut worst = 0.0f64;
    for i in 0..pkgs.len() {
        for j in i + 1..pkgs.len() {
            worst = worst.max(cmatrix::max_abs_diff(&pkgs[i].h, &pkgs[j].h));
        }
    }
    if worst > TOL {
        fail("1 [2F1]", &format!("H differs across chambers by {worst:.3e}"));
    }
    pass("1 [2F1]", &format!("H agrees across 2 chambers, max residual {worst:.3e}"));
}

#[test]
fn criterion_01_chamber_independence_f4() {
    let sys = f4_sys();
    match packages_for(&sys) {
        Ok((pkgs, _)) => {
            let mut worst = 0.0f64;
            for i in 0..pkgs.len() {
                for j in i + 1..pkgs.len() {
                    worst = worst.max(cmatrix::max_abs_diff(&pkgs[i].h, &pkgs[j].h));
                }
            }
            assert!(worst <= TOL, "H differs across chambers by {worst:.3e}");
            pass("1 [F4]", &format!("H agrees across chambers, max residual {worst:.3e}"));
        }
        Err(CoreError::NoMellinBarnesBasis { required, found }) => fail(
            "1 [F4]",
            &format!(
                "cannot build H: need {required} tau points, at most {found} exist. {}",
                f4_tau_impossibility()
            ),
        ),
        Err(e) => fail("1 [F4]", &format!("unexpected error: {e}")),
    }
}

// ---------------------------------------------------------------- criterion 2

#[test]
fn criterion_02_invariance_gauss() {
    let sys = gauss_sys();
    let (pkgs, _) = packages_for(&sys).unwrap();
    let mut worst = 0.0f64;
    for hp in &pkgs {
        for mp in &pkgs {
            for m in &mp.generators {
                worst = worst.max(mbherm_core::herm::verify_invariance(&hp.h, m));
            }
        }
    }
    if worst > TOL {
        fail("2 [2F1]", &format!("invariance residual {worst:.3e}"));
    }
    pass(
        "2 [2F1]",
        &format!("M*HM = H for all generators incl. cross-chamber, worst {worst:.3e}"),
    );
}

#[test]
fn criterion_02_invariance_f4() {
    match packages_for(&f4_sys()) {
        Ok((pkgs, _)) => {
            let mut worst = 0.0f64;
            for hp in &pkgs {
                for mp in &pkgs {
                    for m in &mp.generators {
                        worst = worst.max(mbherm_core::herm::verify_invariance(&hp.h, m));
                    }
                }
            }
            assert!(worst <= TOL);
            pass("2 [F4]", &format!("worst invariance residual {worst:.3e}"));
        }
        Err(CoreError::NoMellinBarnesBasis { required, found }) => fail(
            "2 [F4]",
            &format!(
                "cannot build generators: need {required} tau points, at most {found} exist. {}",
                f4_tau_impossibility()
            ),
        ),
        Err(e) => fail("2 [F4]", &format!("unexpected error: {e}")),
    }
}

// ---------------------------------------------------------------- criterion 3

/// Test-local oracle: determinants by Laplace expansion over i128 and cone
/// membership by exact sign solves, independent of the library path.
mod oracle {
    pub fn det(m: &[Vec<i128>]) -> i128 {
        let n = m.len();
        match n {
            0 => 1,
            1 => m[0][0],
            2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
            _ => {
                let mut acc = 0i128;
                for j in 0..n {
                    let minor: Vec<Vec<i128>> = (1..n)
                        .map(|r| (0..n).filter(|c| *c != j).map(|c| m[r][c]).collect())
                        .collect();
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    acc += sign * m[0][j] * det(&minor);
                }
                acc
            }
        }
    }

    /// Sum of |det B_I| over cotriangles whose open cone contains `rho`,
    /// for d in {1, 2}.
    pub fn delta_sum(b: &[Vec<i128>], rho: &[i128]) -> i128 {
        let d = b.len();
        let n = b[0].len();
        let col = |j: usize| -> Vec<i128> { (0..d).map(|r| b[r][j]).collect() };
        let mut total = 0i128;
        match d {
            1 => {
                for j in 0..n {
                    let bj = col(j)[0];
                    if bj != 0 && bj.signum() == rho[0].signum() {
                        total += bj.abs();
                    }
                }
            }
            2 => {
                let cross = |a: &[i128], b: &[i128]| a[0] * b[1] - a[1] * b[0];
                for i in 0..n {
                    for j in i + 1..n {
                        let bi = col(i);
                        let bj = col(j);
                        let den = cross(&bi, &bj);
                        if den == 0 {
                            continue;
                        }
                        // rho = x bi + y bj: x = cross(rho,bj)/den, y = cross(bi,rho)/den
                        let x_num = cross(rho, &bj) * den.signum();
                        let y_num = cross(&bi, rho) * den.signum();
                        if x_num > 0 && y_num > 0 {
                            total += den.abs();
                        }
                    }
                }
            }
            _ => unreachable!("oracle limited to d <= 2"),
        }
        total
    }
}

#[test]
fn criterion_03_rank_identity() {
    // Gauss: oracle over both sign chambers.
    let g_b = vec![vec![1i128, 1, -1, -1]];
    assert_eq!(oracle::delta_sum(&g_b, &[1]), 2);
    assert_eq!(oracle::delta_sum(&g_b, &[-1]), 2);
    let sys = gauss_sys();
    let fan = secondary_fan(&sys, 0).unwrap();
    let sums: Vec<BigInt> = fan
        .chambers()
        .iter()
        .map(|c| c.cotriangulation().delta_sum())
        .collect();
    assert!(sums.iter().all(|s| *s == BigInt::from(2)), "gauss sums {sums:?}");

    // F4: oracle on one witness direction per sector of the fan.
    let f_b = vec![vec![-1i128, -1, 1, 0, 1, 0], vec![-1, -1, 0, 1, 0, 1]];
    for rho in [[2, 1], [-1, 1], [1, -1], [-2, -1], [1, 3]] {
        assert_eq!(oracle::delta_sum(&f_b, &rho), 4, "oracle at {rho:?}");
    }
    let sys = f4_sys();
    let fan = secondary_fan(&sys, 0).unwrap();
    let sums: Vec<BigInt> = fan
        .chambers()
        .iter()
        .map(|c| c.cotriangulation().delta_sum())
        .collect();
    assert!(sums.iter().all(|s| *s == BigInt::from(4)), "f4 sums {sums:?}");
    pass(
        "3",
        &format!(
            "sum of Delta_I constant across chambers: 2 for 2F1 ({} chambers), 4 for F4 ({} chambers); \
             independent cone-membership oracle agrees",
            2,
            sums.len()
        ),
    );
}

// ------------------------------------------------------- randomized systems

struct RandomDraw {
    sys: SystemData,
    tau: Option<TauSelection>,
    cotriangulation: Option<mbherm_core::fan::Cotriangulation>,
}

/// Seeded random systems: d <= 3, N <= 8, |entries| <= 3, gamma0 with
/// denominators <= 11, resonant draws skipped. When `require_basis` is set,
/// draws without a Mellin-Barnes tau basis are skipped as well.
fn random_systems(seed: u64, count: usize, require_basis: bool) -> Vec<RandomDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 20_000, "random system generation stalled");
        let d = rng.random_range(1..=3usize);
        // Stay within the stated bounds (d <= 3, N <= 8, |entries| <= 3) but
        // keep the d = 3 instances small enough for exact arithmetic at
        // test speed.
        let (n_max, e_max) = match d {
            1 => (6usize, 3i64),
            2 => (7, 3),
            _ => (6, 2),
        };
        let n = rng.random_range(d + 2..=n_max.min(8));
        let mut rows = vec![vec![0i64; n]; d];
        for row in rows.iter_mut() {
            for _ in 0..3 * n {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                if i != j && row[i] < e_max && row[j] > -e_max {
                    row[i] += 1;
                    row[j] -= 1;
                }
            }
        }
        let gamma0: Vec<Rational> = (0..n)
            .map(|_| {
                let q = rng.random_range(1..=11i64);
                let p = rng.random_range(-11..=11i64);
                Rational::new(p.into(), q.into())
            })
            .collect();
        let Ok(sys) = build_system(IntMatrix::from_rows(&rows), gamma0) else {
            continue;
        };
        let Ok(report) = check_total_nonresonance(&sys) else {
            continue;
        };
        if !report.pass {
            continue;
        }
        let (tau, cotriangulation) = if require_basis {
            // Rank from one generic direction; then the offset search.
            let mut found = None;
            for _ in 0..32 {
                let rho: Vec<Rational> = (0..d)
                    .map(|_| Rational::from_integer(rng.random_range(-9..=9i64).into()))
                    .collect();
                if rho.iter().all(|x| x == &Rational::from_integer(0.into())) {
                    continue;
                }
                if let Ok(ct) = cotriangulation_for_direction(&sys, &rho) {
                    found = Some(ct);
                    break;
                }
            }
            let Some(ct) = found else { continue };
            let required: usize = ct.delta_sum().to_string().parse().unwrap();
            match select_tau_basis(&sys, required, None) {
                Ok(sel) => (Some(sel), Some(ct)),
                Err(_) => continue,
            }
        } else {
            (None, None)
        };
        out.push(RandomDraw { sys, tau, cotriangulation });
    }
    out
}

// ---------------------------------------------------------------- criterion 4

#[test]
fn criterion_04_solution_point_counts() {
    let mut checked = 0usize;
    for sys in [gauss_sys(), f4_sys()] {
        for cot in enumerate_cotriangles(&sys) {
            let pts = solution_points(&sys, &cot).unwrap();
            assert_eq!(BigInt::from(pts.len()), *cot.delta());
            checked += 1;
        }
    }
    let draws = random_systems(2024, 20, false);
    assert_eq!(draws.len(), 20);
    for (k, draw) in draws.iter().enumerate() {
        for cot in enumerate_cotriangles(&draw.sys) {
            let pts = solution_points(&draw.sys, &cot).unwrap();
            assert_eq!(
                BigInt::from(pts.len()),
                *cot.delta(),
                "draw {k}, cotriangle {:?}",
                cot.indices()
            );
            // Independent oracle for Delta_I: i128 Laplace determinant.
            let m: Vec<Vec<i128>> = (0..draw.sys.d())
                .map(|r| {
                    cot.indices()
                        .iter()
                        .map(|&c| {
                            draw.sys.b().get(r, c).to_string().parse::<i128>().unwrap()
                        })
                        .collect()
                })
                .collect();
            assert_eq!(BigInt::from(oracle::det(&m).abs()), *cot.delta());
            checked += 1;
        }
    }
    pass(
        "4",
        &format!("|solution_points(I)| = Delta_I for {checked} cotriangles across both test systems and 20 random systems"),
    );
}

// ---------------------------------------------------------------- criterion 5

fn residue_invariance_report(sys: &SystemData, label: &str) -> (usize, f64) {
    let fan = secondary_fan(sys, 0).unwrap();
    let samples = Zonotope::full(sys).interior_integer_points();
    let mut worst = 0.0f64;
    for tau in &samples {
        let ctx = ResidueContext::new(sys, tau.clone()).unwrap();
        let rep = global_invariance(&ctx, &fan).unwrap();
        assert!(rep.hypothesis_met);
        assert!(
            rep.max_residual <= TOL,
            "{label}: chamber sums differ by {} at tau {tau:?}",
            rep.max_residual
        );
        worst = worst.max(rep.max_residual);
        for w in 0..fan.walls().len() {
            let wc = wall_crossing_check(&ctx, &fan, w).unwrap();
            assert!(wc.residual <= TOL, "{label}: wall {w} residual {}", wc.residual);
            worst = worst.max(wc.residual);
        }
    }
    // One-variable audits for every admissible K at the first sample.
    let first = samples.first().expect("origin is always interior").clone();
    let ctx = ResidueContext::new(sys, first).unwrap();
    for k in admissible_k_subsets(sys) {
        let audit = one_var_residue_audit(&ctx, &k).unwrap();
        assert!(audit.hypothesis_ok, "{label}: K={k:?} {:?}", audit.hypothesis_notes);
        assert!(audit.support_low.is_positive(), "{label}: support bound at 0");
        assert!(audit.support_high.is_negative(), "{label}: support bound at infinity");
        let s = audit.finite_pole_sum.unwrap().norm();
        assert!(s <= TOL, "{label}: K={k:?} pole sum {s}");
        let (p, m) = audit.side_residuals.unwrap();
        assert!(p <= TOL && m <= TOL, "{label}: K={k:?} side partition {p} {m}");
        worst = worst.max(s).max(p).max(m);
    }
    (samples.len(), worst)
}

#[test]
fn criterion_05_residue_invariance_f4() {
    let sys = f4_sys();
    let (n_samples, worst) = residue_invariance_report(&sys, "F4");
    if n_samples < 5 {
        fail("5 [F4]", &format!("only {n_samples} valid tau samples exist"));
    }
    pass(
        "5 [F4]",
        &format!(
            "{n_samples} integral tau samples, all chamber pairs, walls and one-variable audits \
             within {TOL:.0e} (worst {worst:.3e})"
        ),
    );
}

#[test]
fn criterion_05_residue_invariance_gauss() {
    let sys = gauss_sys();
    let (n_samples, worst) = residue_invariance_report(&sys, "2F1");
    if n_samples < 5 {
        // Demonstrate that fractional tau genuinely breaks the identity, so
        // no further samples can exist in Z_B.
        let fan = secondary_fan(&sys, 0).unwrap();
        let ctx = ResidueContext::new(&sys, vec![rat("1/4")]).unwrap();
        let counter = global_invariance(&ctx, &fan).unwrap().max_residual;
        fail(
            "5 [2F1]",
            &format!(
                "the identity holds at every valid sample (worst {worst:.3e}) but Z_B = (-2,2) \
                 contains only {n_samples} integral tau values and Corollary-style invariance \
                 provably fails at fractional tau (residual {counter:.3e} at tau = 1/4), so 5 \
                 samples do not exist"
            ),
        );
    }
    pass("5 [2F1]", &format!("{n_samples} samples within tolerance"));
}

// ---------------------------------------------------------------- criterion 6

fn h_reconstruction_worst(sys: &SystemData) -> Result<f64, CoreError> {
    let fan = secondary_fan(sys, 0)?;
    let required = rank_of(sys);
    let sel = select_tau_basis(sys, required, None)?;
    let factor = {
        let half_sum = Phase::new(sys.h_alpha() / rat("2")).to_c64();
        Complex64::new(0.0, 2.0).powi(sys.r() as i32) * half_sum
    };
    let mut worst = 0.0f64;
    for ch in fan.chambers() {
        let pkg = HermitianPackage::build(sys, ch.cotriangulation(), &sel.points, &HermOptions::default())?;
        let h_inv = pkg.h.clone().try_inverse().expect("H invertible");
        for r in 0..required {
            for c in 0..required {
                let diff = zonotope::tau_difference(&sel.points[r], &sel.points[c]);
                let ctx = ResidueContext::new(sys, diff)?;
                let s = cotriangulation_sum(&ctx, ch.cotriangulation())?;
                let expect = factor * s;
                let rel = (h_inv[(r, c)] - expect).norm() / expect.norm().max(1e-30);
                worst = worst.max(rel);
            }
        }
    }
    Ok(worst)
}

#[test]
fn criterion_06_h_reconstruction_gauss() {
    let worst = h_reconstruction_worst(&gauss_sys()).unwrap();
    if worst > 1e-8 {
        fail("6 [2F1]", &format!("relative error {worst:.3e}"));
    }
    pass(
        "6 [2F1]",
        &format!("H^-1 matches (2i)^r e^(pi i sum gamma) residue sums, worst relative error {worst:.3e}"),
    );
}

#[test]
fn criterion_06_h_reconstruction_f4() {
    match h_reconstruction_worst(&f4_sys()) {
        Ok(worst) => {
            assert!(worst <= 1e-8);
            pass("6 [F4]", &format!("worst relative error {worst:.3e}"));
        }
        Err(CoreError::NoMellinBarnesBasis { required, found }) => fail(
            "6 [F4]",
            &format!(
                "H does not exist: need {required} tau points, at most {found} exist. {}",
                f4_tau_impossibility()
            ),
        ),
        Err(e) => fail("6 [F4]", &format!("unexpected error: {e}")),
    }
}

// ---------------------------------------------------------------- criterion 7

fn signature_consistent(pkg: &HermitianPackage) -> (usize, usize) {
    let eigs = cmatrix::hermitian_eigenvalues(&pkg.h);
    let pos = eigs.iter().filter(|&&e| e > 0.0).count();
    let neg = eigs.len() - pos;
    let (dp, dn) = pkg.delta.sign_counts();
    assert_eq!((pos, neg), (dp, dn), "eigenvalue signs vs Delta signs");
    (pos, neg)
}

#[test]
fn criterion_07_signature_gauss() {
    let (pkgs, _) = packages_for(&gauss_sys()).unwrap();
    let mut sigs = Vec::new();
    for pkg in &pkgs {
        sigs.push(signature_consistent(pkg));
    }
    assert!(sigs.windows(2).all(|w| w[0] == w[1]), "stable across chambers");
    pass("7 [2F1 signature]", &format!("eigenvalue sign counts equal Delta sign counts: {:?}", sigs[0]));
}

#[test]
fn criterion_07_signature_f4() {
    match packages_for(&f4_sys()) {
        Ok((pkgs, _)) => {
            for pkg in &pkgs {
                signature_consistent(pkg);
            }
            pass("7 [F4 signature]", "eigenvalue sign counts equal Delta sign counts");
        }
        Err(CoreError::NoMellinBarnesBasis { required, found }) => fail(
            "7 [F4 signature]",
            &format!(
                "H does not exist: need {required} tau points, at most {found} exist. {}",
                f4_tau_impossibility()
            ),
        ),
        Err(e) => fail("7 [F4 signature]", &format!("unexpected error: {e}")),
    }
}

#[test]
fn criterion_07_signature_randomized() {
    let draws = random_systems(4071, 20, true);
    assert_eq!(draws.len(), 20);
    for (k, draw) in draws.iter().enumerate() {
        let sel = draw.tau.as_ref().unwrap();
        let ct = draw.cotriangulation.as_ref().unwrap();
        let pkg = HermitianPackage::build(&draw.sys, ct, &sel.points, &HermOptions::default())
            .unwrap_or_else(|e| panic!("draw {k}: {e}"));
        signature_consistent(&pkg);
    }
    pass(
        "7 [randomized signatures]",
        "eigenvalue sign counts equal Delta sign counts for 20 random systems with a Mellin-Barnes basis",
    );
}

#[test]
fn criterion_07_matsubara() {
    // Sign agreement whenever h(alpha) is non-integral, for every chamber of
    // both test systems.
    for (sys, label) in [(gauss_sys(), "2F1"), (f4_sys(), "F4")] {
        assert!(!sys.h_alpha().is_integer());
        let fan = secondary_fan(&sys, 0).unwrap();
        for ch in fan.chambers() {
            let pts = mbherm_core::solpts::solution_points_for_cotriangulation(&sys, ch.cotriangulation())
                .unwrap();
            let rep = matsubara_compare(&sys, &pts);
            assert!(rep.applicable, "{label}");
            assert!(rep.all_agree, "{label}: {:?}", rep.entries);
        }
    }
    // Randomized draws, skipping nothing: integral h(alpha) must gate.
    let draws = random_systems(512, 20, false);
    let mut applicable = 0;
    let mut gated = 0;
    for draw in &draws {
        let ct = enumerate_cotriangles(&draw.sys)
            .into_iter()
            .next()
            .unwrap();
        let pts = solution_points(&draw.sys, &ct).unwrap();
        let rep = matsubara_compare(&draw.sys, &pts);
        if rep.applicable {
            applicable += 1;
            assert!(rep.all_agree, "random draw disagrees: {:?}", rep.entries);
        } else {
            gated += 1;
            assert!(draw.sys.h_alpha().is_integer());
        }
    }
    // Explicit not-applicable construction: integral parameter sum.
    let sys = build_system(
        IntMatrix::from_rows(&[vec![1, 1, -1, -1]]),
        rats(&["-1/2", "-1/3", "-4/5", "-11/30"]),
    )
    .unwrap();
    let ct = cotriangulation_for_direction(&sys, &[rat("1")]).unwrap();
    let pts = mbherm_core::solpts::solution_points_for_cotriangulation(&sys, &ct).unwrap();
    assert!(!matsubara_compare(&sys, &pts).applicable);
    pass(
        "7 [Matsubara]",
        &format!(
            "per-mu sign agreement for both systems and {applicable} applicable random draws; \
             {gated} draws correctly gated as not applicable"
        ),
    );
}

// ---------------------------------------------------------------- criterion 8

fn spectrum_worst(pkgs: &[HermitianPackage]) -> f64 {
    let mut worst = 0.0f64;
    for pkg in pkgs {
        for (j, m) in pkg.generators.iter().enumerate() {
            let eigs = cmatrix::eigenvalues(m).unwrap();
            let mut expected: Vec<Complex64> = pkg
                .points
                .iter()
                .map(|p| Phase::new(p.mu()[j].clone()).to_c64())
                .collect();
            for e in eigs {
                let (best, dist) = expected
                    .iter()
                    .enumerate()
                    .map(|(k, x)| (k, (x - e).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                worst = worst.max(dist);
                expected.swap_remove(best);
            }
        }
    }
    worst
}

#[test]
fn criterion_08_spectrum_gauss() {
    let (pkgs, _) = packages_for(&gauss_sys()).unwrap();
    let worst = spectrum_worst(&pkgs);
    if worst > 1e-8 {
        fail("8 [2F1]", &format!("matching distance {worst:.3e}"));
    }
    pass("8 [2F1]", &format!("generator spectra match chi phases, worst distance {worst:.3e}"));
}

#[test]
fn criterion_08_spectrum_f4() {
    match packages_for(&f4_sys()) {
        Ok((pkgs, _)) => {
            let worst = spectrum_worst(&pkgs);
            assert!(worst <= 1e-8);
            pass("8 [F4]", &format!("worst matching distance {worst:.3e}"));
        }
        Err(CoreError::NoMellinBarnesBasis { required, found }) => fail(
            "8 [F4]",
            &format!(
                "generators do not exist: need {required} tau points, at most {found} exist. {}",
                f4_tau_impossibility()
            ),
        ),
        Err(e) => fail("8 [F4]", &format!("unexpected error: {e}")),
    }
}

// ---------------------------------------------------------------- criterion 9

#[test]
fn criterion_09_tau_closure_gauss() {
    let sys = gauss_sys();
    let sel = select_tau_basis(&sys, 2, Some(&[rat("1/2")])).unwrap();
    assert_eq!(sel.offset, vec![rat("1/2")]);
    assert_eq!(sel.points, vec![vec![rat("-1/2")], vec![rat("1/2")]]);
    let full = Zonotope::full(&sys);
    for (i, a) in sel.points.iter().enumerate() {
        for b in sel.points.iter().skip(i + 1) {
            let diff = zonotope::tau_difference(a, b);
            assert!(full.contains(&diff), "difference {diff:?} outside Z_B");
            // Test-local oracle: |diff| < 2 for the interval zonotope.
            assert!(diff[0].clone().abs() < rat("2"));
        }
    }
    pass("9 [2F1]", "selected tau list at offset 1/2 is exactly {-1/2, 1/2}; differences in Z_B");
}

#[test]
fn criterion_09_tau_closure_f4() {
    let sys = f4_sys();
    let half = Zonotope::half(&sys);
    let points = half.lattice_translates(&rats(&["1/2", "1/2"]));
    let expected: Vec<Vec<Rational>> = vec![
        rats(&["-1/2", "-1/2"]),
        rats(&["-1/2", "1/2"]),
        rats(&["1/2", "-1/2"]),
        rats(&["1/2", "1/2"]),
    ];
    if points != expected {
        let got: Vec<String> = points
            .iter()
            .map(|p| format!("({},{})", p[0], p[1]))
            .collect();
        fail(
            "9 [F4]",
            &format!(
                "the criterion expects all four (+-1/2, +-1/2) inside (1/2)Z_B, but the exact \
                 LP finds only {got:?}: the mixed-sign points lie on the boundary edges |x - y| = 1 \
                 of the open hexagon. {}",
                f4_tau_impossibility()
            ),
        );
    }
    pass("9 [F4]", "tau list at offset (1/2,1/2) is all four sign patterns");
}

// --------------------------------------------------------------- criterion 10

#[test]
fn criterion_10_determinism() {
    let bin = env!("CARGO_BIN_EXE_mbherm");
    let dir = tempfile::tempdir().unwrap();
    let mut checked = 0;
    for (file, expect_exit) in [
        ("gauss_2f1.json", 0),
        ("appell_f4.json", 4),
        ("gauss_product.json", 0),
        ("gauss_resonant.json", 3),
    ] {
        let problem = format!("{}/../../problems/{file}", env!("CARGO_MANIFEST_DIR"));
        let mut outputs = Vec::new();
        for run in 0..2 {
            let json_path = dir.path().join(format!("{file}.{run}.json"));
            let status = std::process::Command::new(bin)
                .args(["analyze", &problem, "--seed", "42", "--json"])
                .arg(&json_path)
                .stdout(std::process::Stdio::null())
                .status()
                .unwrap();
            assert_eq!(status.code(), Some(expect_exit), "{file}: unexpected exit");
            outputs.push(std::fs::read(&json_path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{file}: JSON reports differ between runs");
        checked += 1;
    }
    pass(
        "10",
        &format!("byte-identical JSON across repeated runs for {checked} problem files (exits 0/4/0/3)"),
    );
}
