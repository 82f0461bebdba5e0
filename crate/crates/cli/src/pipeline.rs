//! Orchestration of the full analysis and the report fragments.

use anyhow::Context;
use num_complex::Complex64;

use mbherm_core::error::Error as CoreError;
use mbherm_core::fan::{secondary_fan, zonotope, SecondaryFan, Zonotope};
use mbherm_core::herm::{
    cmatrix, invariance_nullity, matsubara_compare, select_tau_basis, sigma_feasibility,
    verify_invariance, CMatrix, HermOptions, HermitianPackage, Phase,
};
use mbherm_core::ratlin::{format_rational, Rational};
use mbherm_core::resid::{
    admissible_k_subsets, cotriangulation_sum, global_invariance, one_var_residue_audit,
    wall_crossing_check, ResidueContext,
};
use mbherm_core::solpts::{check_total_nonresonance, solution_points_for_cotriangulation};

use crate::problem::ResolvedProblem;
use crate::report::*;

/// Which heavy sections a command requests.
#[derive(Clone, Copy, Debug)]
pub struct Scope {
    pub hermitian: bool,
    pub residues: bool,
}

impl Scope {
    pub const FULL: Scope = Scope { hermitian: true, residues: true };
    pub const GEOMETRY: Scope = Scope { hermitian: false, residues: false };
    pub const HERMITIAN: Scope = Scope { hermitian: true, residues: false };
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RESONANT: i32 = 3;
pub const EXIT_NO_BASIS: i32 = 4;

fn rs(q: &Rational) -> String {
    format_rational(q)
}

fn rv(v: &[Rational]) -> Vec<String> {
    v.iter().map(rs).collect()
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn cmatrix_out(m: &CMatrix) -> Vec<Vec<C2>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| c2(m[(i, j)])).collect())
        .collect()
}

/// Greedy multiset matching distance between the eigenvalues of `m` and the
/// expected phases.
fn spectrum_distance(m: &CMatrix, mut expected: Vec<Complex64>) -> anyhow::Result<f64> {
    let eigs = cmatrix::eigenvalues(m).context("eigenvalue extraction")?;
    let mut worst = 0.0f64;
    for e in eigs {
        if expected.is_empty() {
            break;
        }
        let (best, dist) = expected
            .iter()
            .enumerate()
            .map(|(k, x)| (k, (x - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        worst = worst.max(dist);
        expected.swap_remove(best);
    }
    Ok(worst)
}

/// Run the pipeline and assemble the report. Never fails on verification
/// outcomes; `anyhow` errors are reserved for internal breakage.
pub fn analyze(prob: &ResolvedProblem, scope: Scope) -> anyhow::Result<Report> {
    let sys = &prob.sys;
    let tol = prob.tolerance;
    let opts = HermOptions { tolerance: tol, ..HermOptions::default() };

    let fan: SecondaryFan = secondary_fan(sys, prob.seed).context("chamber enumeration")?;
    let rank_big = fan.chambers()[0].cotriangulation().delta_sum();
    let rank_usize: usize = rank_big
        .to_string()
        .parse()
        .context("holonomic rank does not fit in usize")?;

    let system = SystemSummary {
        n: sys.n(),
        d: sys.d(),
        r: sys.r(),
        rank: rank_usize as u64,
        alpha: rv(sys.alpha()),
        h_form: rv(sys.h_form()),
        h_alpha: rs(&sys.h_alpha()),
        h_alpha_integral: sys.h_alpha().is_integer(),
    };

    let nonres = check_total_nonresonance(sys).context("non-resonance check")?;
    let resonance = ResonanceSection {
        totally_nonresonant: nonres.pass,
        cotriangles_checked: nonres.cotriangles_checked,
        points_checked: nonres.points_checked,
        witness: nonres.witness.as_ref().map(|w| ResonanceWitnessOut {
            cotriangle: one_based(&w.cotriangle),
            mu: rv(&w.mu),
            column: w.col + 1,
        }),
    };

    let mut chambers = Vec::new();
    for (idx, ch) in fan.chambers().iter().enumerate() {
        let ct = ch.cotriangulation();
        let pts = solution_points_for_cotriangulation(sys, ct).context("solution points")?;
        chambers.push(ChamberSection {
            index: idx,
            witness: rv(ch.witness()),
            cotriangulation: ct.cotriangles().iter().map(|c| one_based(c.indices())).collect(),
            triangle_complements: ct
                .cotriangles()
                .iter()
                .map(|c| one_based(&c.complement(sys.n())))
                .collect(),
            delta_sum: ct.delta_sum().to_string().parse().unwrap_or(0),
            half_space_normals: ch
                .half_spaces()
                .iter()
                .map(|hs| hs.normal.iter().map(|e| e.to_string()).collect())
                .collect(),
            solution_points: pts
                .iter()
                .map(|p| SolutionPointOut {
                    cotriangle: one_based(p.cotriangle().indices()),
                    mu: rv(p.mu()),
                    gamma_mu: rv(p.gamma_mu()),
                })
                .collect(),
        });
    }
    let walls = fan
        .walls()
        .iter()
        .enumerate()
        .map(|(i, w)| WallSection {
            index: i,
            chambers: w.chambers,
            normal: w.normal.iter().map(|e| e.to_string()).collect(),
            interior_point: rv(&w.interior_point),
        })
        .collect();

    let matsubara = if nonres.pass {
        let mut entries = Vec::new();
        let mut applicable = false;
        let mut all_agree = true;
        for (idx, ch) in fan.chambers().iter().enumerate() {
            let pts = solution_points_for_cotriangulation(sys, ch.cotriangulation())?;
            let rep = matsubara_compare(sys, &pts);
            applicable = rep.applicable;
            if !rep.applicable {
                break;
            }
            all_agree &= rep.all_agree;
            entries.extend(rep.entries.iter().map(|e| MatsubaraEntryOut {
                chamber: idx,
                mu: rv(&e.mu),
                s1_sign: e.s1_sign,
                s2_sign: e.s2_sign,
                agree: e.agree,
            }));
        }
        MatsubaraSectionOut {
            applicable,
            h_alpha: rs(&sys.h_alpha()),
            all_agree,
            entries,
        }
    } else {
        MatsubaraSectionOut {
            applicable: false,
            h_alpha: rs(&sys.h_alpha()),
            all_agree: false,
            entries: Vec::new(),
        }
    };

    let sigma_rep = sigma_feasibility(sys);
    let sigma = SigmaSection {
        feasible: sigma_rep.feasible,
        witness: sigma_rep.witness.as_ref().map(|w| rv(w)),
    };

    let mut report = Report {
        problem: prob.file.clone(),
        tolerance: tol,
        precision_bits: prob.precision,
        seed: prob.seed,
        system,
        resonance,
        tau: None,
        chambers,
        walls,
        hermitian: Vec::new(),
        verification: VerificationSection::default(),
        matsubara,
        sigma,
        all_pass: false,
        exit_code: EXIT_FAIL,
    };

    if !nonres.pass {
        report.exit_code = EXIT_RESONANT;
        return Ok(report);
    }

    // Mellin-Barnes tau basis.
    let mut tau_points: Option<Vec<Vec<Rational>>> = None;
    if scope.hermitian {
        match select_tau_basis(sys, rank_usize, prob.tau_offset.as_deref()) {
            Ok(sel) => {
                report.tau = Some(TauSection {
                    required: rank_usize,
                    found: true,
                    offset: Some(rv(&sel.offset)),
                    points: sel.points.iter().map(|p| rv(p)).collect(),
                    searched: sel.searched.iter().map(|(o, c)| (rv(o), *c)).collect(),
                });
                tau_points = Some(sel.points);
            }
            Err(CoreError::NoMellinBarnesBasis { required, .. }) => {
                // Re-run the search log for the report.
                let searched = log_tau_search(sys, prob.tau_offset.as_deref());
                report.tau = Some(TauSection {
                    required,
                    found: false,
                    offset: None,
                    points: Vec::new(),
                    searched,
                });
            }
            Err(e) => return Err(e).context("tau selection"),
        }
    }

    // Hermitian packages and their verifications.
    let mut packages: Vec<HermitianPackage> = Vec::new();
    if let Some(tau) = &tau_points {
        let full_z = Zonotope::full(sys);
        let mut diffs_ok = true;
        for (i, a) in tau.iter().enumerate() {
            for b in tau.iter().skip(i + 1) {
                diffs_ok &= full_z.contains(&zonotope::tau_difference(a, b));
            }
        }
        report.verification.tau_differences_in_zonotope = Some(diffs_ok);

        for ch in fan.chambers() {
            let pkg = HermitianPackage::build(sys, ch.cotriangulation(), tau, &opts)
                .context("Hermitian package")?;
            packages.push(pkg);
        }
        for (idx, pkg) in packages.iter().enumerate() {
            report.hermitian.push(HermitianSection {
                chamber: idx,
                x: cmatrix_out(&pkg.x),
                x_condition: pkg.x_cond,
                delta: pkg.delta.values.clone(),
                delta_signs: pkg.delta.signs.clone(),
                h: cmatrix_out(&pkg.h),
                hermitian_defect: Checked::le(pkg.hermitian_defect, tol),
                congruence_residual: Checked::le(pkg.congruence_residual(), tol),
                generators: pkg.generators.iter().map(cmatrix_out).collect(),
                signature: SignatureOut {
                    pos: pkg.signature.pos,
                    neg: pkg.signature.neg,
                    zero: pkg.signature.zero,
                },
            });
        }

        let mut independence: f64 = 0.0;
        for i in 0..packages.len() {
            for j in i + 1..packages.len() {
                independence = independence.max(cmatrix::max_abs_diff(&packages[i].h, &packages[j].h));
            }
        }
        report.verification.chamber_independence = Some(Checked::le(independence, tol));

        for (hi, hp) in packages.iter().enumerate() {
            for (mi, mp) in packages.iter().enumerate() {
                for (g, m) in mp.generators.iter().enumerate() {
                    report.verification.invariance.push(InvarianceEntry {
                        h_chamber: hi,
                        m_chamber: mi,
                        generator: g + 1,
                        residual: Checked::le(verify_invariance(&hp.h, m), tol),
                    });
                }
            }
        }

        for (idx, pkg) in packages.iter().enumerate() {
            for (j, m) in pkg.generators.iter().enumerate() {
                let expected = pkg
                    .points
                    .iter()
                    .map(|p| Phase::new(p.mu()[j].clone()).to_c64())
                    .collect();
                let dist = spectrum_distance(m, expected)?;
                report.verification.spectrum.push(SpectrumEntry {
                    chamber: idx,
                    generator: j + 1,
                    matching_distance: Checked::le(dist, 1e-8),
                });
            }
        }

        // H^{-1} entries against (2i)^r e^{pi i sum gamma} residue sums.
        let factor = {
            let half_sum = Phase::new(sys.h_alpha() / Rational::new(2.into(), 1.into())).to_c64();
            Complex64::new(0.0, 2.0).powi(sys.r() as i32) * half_sum
        };
        for (idx, pkg) in packages.iter().enumerate() {
            let h_inv = pkg
                .h
                .clone()
                .try_inverse()
                .ok_or_else(|| anyhow::anyhow!("H is singular"))?;
            let mut worst = 0.0f64;
            for r in 0..pkg.points.len() {
                for c in 0..pkg.points.len() {
                    let diff = zonotope::tau_difference(&pkg.tau[r], &pkg.tau[c]);
                    let ctx = ResidueContext::new(sys, diff).context("tau difference context")?;
                    let s = cotriangulation_sum(&ctx, fan.chambers()[idx].cotriangulation())?;
                    let expect = factor * s;
                    let rel = (h_inv[(r, c)] - expect).norm() / expect.norm().max(1e-30);
                    worst = worst.max(rel);
                }
            }
            report.verification.h_reconstruction.push(ReconstructionEntry {
                chamber: idx,
                max_relative_error: Checked::le(worst, 1e-8),
            });
        }

        report.verification.signature_consistent_across_chambers =
            Some(packages.windows(2).all(|w| w[0].signature == w[1].signature));
        let gens: Vec<&CMatrix> = packages.iter().flat_map(|p| p.generators.iter()).collect();
        report.verification.invariance_solution_space_dim =
            Some(invariance_nullity(&gens, opts.eig_zero_tol));
    }

    // Residue identities at integral tau samples inside the open zonotope.
    if scope.residues {
        let samples: Vec<Vec<Rational>> = Zonotope::full(sys)
            .interior_integer_points()
            .into_iter()
            .take(7)
            .collect();
        for tau in &samples {
            let ctx = ResidueContext::new(sys, tau.clone()).context("residue context")?;
            let rep = global_invariance(&ctx, &fan)?;
            report.verification.residue_invariance.push(ResidueInvarianceEntry {
                tau: rv(tau),
                chamber_sums: rep.sums.iter().map(|z| c2(*z)).collect(),
                max_pairwise_residual: Checked::le(rep.max_residual, tol),
                hypothesis_met: rep.hypothesis_met,
            });
            for w in 0..fan.walls().len() {
                let wc = wall_crossing_check(&ctx, &fan, w)?;
                report.verification.wall_crossings.push(WallCrossingEntry {
                    wall: w,
                    tau: rv(tau),
                    residual: Checked::le(wc.residual, tol),
                    hypothesis_met: wc.hypothesis_met,
                });
            }
        }
        if let Some(first) = samples.first() {
            let ctx = ResidueContext::new(sys, first.clone())?;
            for k in admissible_k_subsets(sys) {
                let audit = one_var_residue_audit(&ctx, &k)?;
                report.verification.one_variable_audits.push(AuditEntry {
                    k: one_based(&k),
                    tau: rv(first),
                    hypothesis_ok: audit.hypothesis_ok,
                    hypothesis_notes: audit.hypothesis_notes.clone(),
                    finite_pole_sum: audit
                        .finite_pole_sum
                        .map(|z| Checked::le(z.norm(), tol)),
                    side_residuals: audit
                        .side_residuals
                        .map(|(p, m)| (Checked::le(p, tol), Checked::le(m, tol))),
                    support_low: rs(&audit.support_low),
                    support_high: rs(&audit.support_high),
                });
            }
        }
    }

    // Verdict.
    let v = &report.verification;
    let mut pass = true;
    pass &= report.resonance.totally_nonresonant;
    if scope.hermitian {
        pass &= report.tau.as_ref().map(|t| t.found).unwrap_or(false);
    }
    pass &= v.chamber_independence.map(|c| c.pass).unwrap_or(true);
    pass &= v.invariance.iter().all(|e| e.residual.pass);
    pass &= v.spectrum.iter().all(|e| e.matching_distance.pass);
    pass &= v.h_reconstruction.iter().all(|e| e.max_relative_error.pass);
    pass &= v.tau_differences_in_zonotope.unwrap_or(true);
    pass &= v.signature_consistent_across_chambers.unwrap_or(true);
    pass &= v
        .residue_invariance
        .iter()
        .all(|e| !e.hypothesis_met || e.max_pairwise_residual.pass);
    pass &= v.wall_crossings.iter().all(|e| !e.hypothesis_met || e.residual.pass);
    pass &= v.one_variable_audits.iter().all(|e| {
        e.hypothesis_ok
            && e.finite_pole_sum.map(|c| c.pass).unwrap_or(false)
            && e.side_residuals.map(|(p, m)| p.pass && m.pass).unwrap_or(false)
    });
    pass &= report.hermitian.iter().all(|h| h.hermitian_defect.pass && h.congruence_residual.pass);
    pass &= !report.matsubara.applicable || report.matsubara.all_agree;

    report.all_pass = pass;
    report.exit_code = if scope.hermitian && !report.tau.as_ref().map(|t| t.found).unwrap_or(false)
    {
        EXIT_NO_BASIS
    } else if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    Ok(report)
}

fn log_tau_search(
    sys: &mbherm_core::ratlin::SystemData,
    user: Option<&[Rational]>,
) -> Vec<(Vec<String>, usize)> {
    let half = Zonotope::half(sys);
    let mut candidates: Vec<Vec<Rational>> = Vec::new();
    if let Some(u) = user {
        candidates.push(zonotope::reduce_offset(u));
    }
    candidates.push(vec![Rational::new(1.into(), 2.into()); sys.d()]);
    candidates.push(vec![Rational::from_integer(0.into()); sys.d()]);
    candidates.dedup();
    candidates
        .into_iter()
        .map(|o| {
            let count = half.lattice_translates(&o).len();
            (rv(&o), count)
        })
        .collect()
}

/// Residue-identity table at a user-chosen tau (the `residues` subcommand).
pub fn residues_at(prob: &ResolvedProblem, tau: &[Rational]) -> anyhow::Result<(Report, bool)> {
    let mut report = analyze(prob, Scope::GEOMETRY)?;
    if report.exit_code == EXIT_RESONANT {
        return Ok((report, false));
    }
    let sys = &prob.sys;
    let tol = prob.tolerance;
    let fan = secondary_fan(sys, prob.seed).context("chamber enumeration")?;
    let ctx = ResidueContext::with_unchecked_tau(sys, tau.to_vec());
    if !ctx.tau_in_zonotope() {
        anyhow::bail!("tau {:?} lies outside the open zonotope Z_B", rv(tau));
    }
    let hypothesis = ctx.tau_integral();
    let rep = global_invariance(&ctx, &fan)?;
    report.verification.residue_invariance.push(ResidueInvarianceEntry {
        tau: rv(tau),
        chamber_sums: rep.sums.iter().map(|z| c2(*z)).collect(),
        max_pairwise_residual: Checked::le(rep.max_residual, tol),
        hypothesis_met: rep.hypothesis_met,
    });
    for w in 0..fan.walls().len() {
        let wc = wall_crossing_check(&ctx, &fan, w)?;
        report.verification.wall_crossings.push(WallCrossingEntry {
            wall: w,
            tau: rv(tau),
            residual: Checked::le(wc.residual, tol),
            hypothesis_met: wc.hypothesis_met,
        });
    }
    for k in admissible_k_subsets(sys) {
        let audit = one_var_residue_audit(&ctx, &k)?;
        report.verification.one_variable_audits.push(AuditEntry {
            k: one_based(&k),
            tau: rv(tau),
            hypothesis_ok: audit.hypothesis_ok,
            hypothesis_notes: audit.hypothesis_notes.clone(),
            finite_pole_sum: audit.finite_pole_sum.map(|z| Checked::le(z.norm(), tol)),
            side_residuals: audit
                .side_residuals
                .map(|(p, m)| (Checked::le(p, tol), Checked::le(m, tol))),
            support_low: rs(&audit.support_low),
            support_high: rs(&audit.support_high),
        });
    }
    // With the branch convention fixed, the identities are theorems only at
    // integral tau; fractional tau rows are informational.
    let failed = hypothesis
        && (report
            .verification
            .residue_invariance
            .iter()
            .any(|e| !e.max_pairwise_residual.pass)
            || report.verification.wall_crossings.iter().any(|e| !e.residual.pass));
    report.all_pass = !failed;
    report.exit_code = if failed { EXIT_FAIL } else { EXIT_PASS };
    Ok((report, hypothesis))
}
