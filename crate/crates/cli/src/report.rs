//! Machine-readable report structures plus a plain-text rendering.
//!
//! Conventions: rationals are serialized as `"p/q"` strings, complex values
//! as `[re, im]` pairs, and column/cotriangle indices are 1-based in every
//! serialized field. Every tested numeric carries the tolerance it was
//! checked against.

use num_complex::Complex64;
use serde::Serialize;

use crate::problem::ProblemFile;

pub type C2 = [f64; 2];

pub fn c2(z: Complex64) -> C2 {
    [z.re, z.im]
}

/// A numeric verification entry: the measured value, the tolerance it was
/// tested against, and the outcome.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Checked {
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Checked {
    pub fn le(value: f64, tolerance: f64) -> Checked {
        Checked { value, tolerance, pass: value.is_finite() && value <= tolerance }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemSummary {
    pub n: usize,
    pub d: usize,
    pub r: usize,
    /// Holonomic rank `D = sum of Delta_I` over any cotriangulation.
    pub rank: u64,
    pub alpha: Vec<String>,
    pub h_form: Vec<String>,
    pub h_alpha: String,
    pub h_alpha_integral: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResonanceSection {
    pub totally_nonresonant: bool,
    pub cotriangles_checked: usize,
    pub points_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ResonanceWitnessOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResonanceWitnessOut {
    pub cotriangle: Vec<usize>,
    pub mu: Vec<String>,
    pub column: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TauSection {
    pub required: usize,
    pub found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<String>>,
    pub points: Vec<Vec<String>>,
    /// Offsets searched, with the translate-point count for each.
    pub searched: Vec<(Vec<String>, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionPointOut {
    pub cotriangle: Vec<usize>,
    pub mu: Vec<String>,
    pub gamma_mu: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChamberSection {
    pub index: usize,
    pub witness: Vec<String>,
    pub cotriangulation: Vec<Vec<usize>>,
    /// Complements `I^c`: the simplices of the dual triangulation of `A`.
    pub triangle_complements: Vec<Vec<usize>>,
    pub delta_sum: u64,
    pub half_space_normals: Vec<Vec<String>>,
    pub solution_points: Vec<SolutionPointOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WallSection {
    pub index: usize,
    pub chambers: (usize, usize),
    pub normal: Vec<String>,
    pub interior_point: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HermitianSection {
    pub chamber: usize,
    pub x: Vec<Vec<C2>>,
    pub x_condition: f64,
    pub delta: Vec<f64>,
    pub delta_signs: Vec<i8>,
    pub h: Vec<Vec<C2>>,
    pub hermitian_defect: Checked,
    pub congruence_residual: Checked,
    pub generators: Vec<Vec<Vec<C2>>>,
    pub signature: SignatureOut,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SignatureOut {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceEntry {
    pub h_chamber: usize,
    pub m_chamber: usize,
    pub generator: usize,
    pub residual: Checked,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumEntry {
    pub chamber: usize,
    pub generator: usize,
    /// Greedy multiset-matching distance between the eigenvalues of `M` and
    /// the expected phases.
    pub matching_distance: Checked,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionEntry {
    pub chamber: usize,
    /// Max relative error of `H^{-1}` against the scaled residue sums.
    pub max_relative_error: Checked,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueInvarianceEntry {
    pub tau: Vec<String>,
    pub chamber_sums: Vec<C2>,
    pub max_pairwise_residual: Checked,
    /// The equality is a theorem only for integral tau; rows with a failed
    /// hypothesis are informational.
    pub hypothesis_met: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WallCrossingEntry {
    pub wall: usize,
    pub tau: Vec<String>,
    pub residual: Checked,
    pub hypothesis_met: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditEntry {
    pub k: Vec<usize>,
    pub tau: Vec<String>,
    pub hypothesis_ok: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub hypothesis_notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_pole_sum: Option<Checked>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side_residuals: Option<(Checked, Checked)>,
    pub support_low: String,
    pub support_high: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatsubaraSectionOut {
    pub applicable: bool,
    pub h_alpha: String,
    pub all_agree: bool,
    pub entries: Vec<MatsubaraEntryOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatsubaraEntryOut {
    pub chamber: usize,
    pub mu: Vec<String>,
    pub s1_sign: i8,
    pub s2_sign: i8,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaSection {
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Default)]
pub struct VerificationSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chamber_independence: Option<Checked>,
    pub invariance: Vec<InvarianceEntry>,
    pub spectrum: Vec<SpectrumEntry>,
    pub h_reconstruction: Vec<ReconstructionEntry>,
    pub tau_differences_in_zonotope: Option<bool>,
    pub signature_consistent_across_chambers: Option<bool>,
    pub residue_invariance: Vec<ResidueInvarianceEntry>,
    pub wall_crossings: Vec<WallCrossingEntry>,
    pub one_variable_audits: Vec<AuditEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariance_solution_space_dim: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub problem: ProblemFile,
    pub tolerance: f64,
    pub precision_bits: u32,
    pub seed: u64,
    pub system: SystemSummary,
    pub resonance: ResonanceSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<TauSection>,
    pub chambers: Vec<ChamberSection>,
    pub walls: Vec<WallSection>,
    pub hermitian: Vec<HermitianSection>,
    pub verification: VerificationSection,
    pub matsubara: MatsubaraSectionOut,
    pub sigma: SigmaSection,
    pub all_pass: bool,
    pub exit_code: i32,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialization");
        out.push('\n');
        out
    }
}

fn fmt_checked(c: &Checked) -> String {
    format!(
        "{:>12.3e}  (tol {:.1e})  {}",
        c.value,
        c.tolerance,
        if c.pass { "ok" } else { "FAIL" }
    )
}

fn indices(v: &[usize]) -> String {
    let inner = v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    format!("{{{inner}}}")
}

fn vec_str(v: &[String]) -> String {
    format!("({})", v.join(", "))
}

/// Aligned plain-text rendering of the full report.
pub fn render_human(r: &Report) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "system: N={} d={} r={} rank D={}", r.system.n, r.system.d, r.system.r, r.system.rank);
    let _ = writeln!(s, "alpha = {}", vec_str(&r.system.alpha));
    let _ = writeln!(
        s,
        "h(alpha) = {}{}",
        r.system.h_alpha,
        if r.system.h_alpha_integral { "  (integral)" } else { "" }
    );
    let _ = writeln!(
        s,
        "totally non-resonant: {}  ({} cotriangles, {} points)",
        if r.resonance.totally_nonresonant { "yes" } else { "NO" },
        r.resonance.cotriangles_checked,
        r.resonance.points_checked
    );
    if let Some(w) = &r.resonance.witness {
        let _ = writeln!(
            s,
            "  resonance witness: I={} mu={} column {}",
            indices(&w.cotriangle),
            vec_str(&w.mu),
            w.column
        );
    }

    if let Some(tau) = &r.tau {
        if tau.found {
            let _ = writeln!(
                s,
                "tau basis: {} points at offset {}",
                tau.points.len(),
                tau.offset.as_ref().map(|o| vec_str(o)).unwrap_or_default()
            );
            for p in &tau.points {
                let _ = writeln!(s, "  tau {}", vec_str(p));
            }
        } else {
            let _ = writeln!(s, "tau basis: NOT FOUND (need {} points)", tau.required);
            for (off, count) in &tau.searched {
                let _ = writeln!(s, "  offset {} -> {} points", vec_str(off), count);
            }
        }
    }

    let _ = writeln!(s, "chambers: {}", r.chambers.len());
    for ch in &r.chambers {
        let cots = ch.cotriangulation.iter().map(|c| indices(c)).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "  [{}] witness {}  cotriangulation {}", ch.index, vec_str(&ch.witness), cots);
        for pt in &ch.solution_points {
            let _ = writeln!(
                s,
                "      I={} mu={} gamma^mu={}",
                indices(&pt.cotriangle),
                vec_str(&pt.mu),
                vec_str(&pt.gamma_mu)
            );
        }
    }
    for w in &r.walls {
        let _ = writeln!(
            s,
            "wall [{}] between chambers {} and {}, normal {}",
            w.index, w.chambers.0, w.chambers.1, vec_str(&w.normal)
        );
    }

    for h in &r.hermitian {
        let _ = writeln!(
            s,
            "chamber {}: signature ({},{})  cond(X) {:.3e}  hermitian defect {}",
            h.chamber,
            h.signature.pos,
            h.signature.neg,
            h.x_condition,
            fmt_checked(&h.hermitian_defect)
        );
        let _ = writeln!(s, "  congruence X*HX = Delta {}", fmt_checked(&h.congruence_residual));
    }

    let v = &r.verification;
    if let Some(ci) = &v.chamber_independence {
        let _ = writeln!(s, "chamber independence of H: {}", fmt_checked(ci));
    }
    if !v.invariance.is_empty() {
        let worst = v
            .invariance
            .iter()
            .map(|e| e.residual.value)
            .fold(0.0f64, f64::max);
        let all = v.invariance.iter().all(|e| e.residual.pass);
        let _ = writeln!(
            s,
            "invariance M*HM = H over {} (H,M) pairs: worst {:.3e}  {}",
            v.invariance.len(),
            worst,
            if all { "ok" } else { "FAIL" }
        );
    }
    for e in &v.spectrum {
        let _ = writeln!(
            s,
            "spectrum chamber {} generator {}: {}",
            e.chamber, e.generator, fmt_checked(&e.matching_distance)
        );
    }
    for e in &v.h_reconstruction {
        let _ = writeln!(s, "H reconstruction chamber {}: {}", e.chamber, fmt_checked(&e.max_relative_error));
    }
    for e in &v.residue_invariance {
        if e.hypothesis_met {
            let _ = writeln!(
                s,
                "residue invariance at tau {}: {}",
                vec_str(&e.tau),
                fmt_checked(&e.max_pairwise_residual)
            );
        } else {
            let _ = writeln!(
                s,
                "residue invariance at tau {}: {:.3e}  informational (identity requires integral tau)",
                vec_str(&e.tau),
                e.max_pairwise_residual.value
            );
        }
    }
    for e in &v.wall_crossings {
        if e.hypothesis_met {
            let _ = writeln!(s, "wall {} crossing at tau {}: {}", e.wall, vec_str(&e.tau), fmt_checked(&e.residual));
        } else {
            let _ = writeln!(
                s,
                "wall {} crossing at tau {}: {:.3e}  informational (identity requires integral tau)",
                e.wall,
                vec_str(&e.tau),
                e.residual.value
            );
        }
    }
    for e in &v.one_variable_audits {
        if e.hypothesis_ok {
            let _ = writeln!(
                s,
                "audit K={} tau {}: pole sum {}",
                indices(&e.k),
                vec_str(&e.tau),
                e.finite_pole_sum.map(|c| fmt_checked(&c)).unwrap_or_default()
            );
        } else {
            let _ = writeln!(
                s,
                "audit K={} tau {}: hypothesis failed ({})",
                indices(&e.k),
                vec_str(&e.tau),
                e.hypothesis_notes.join("; ")
            );
        }
    }
    if let Some(dim) = v.invariance_solution_space_dim {
        let _ = writeln!(s, "invariance equations solution space dimension: {dim}");
    }

    let _ = writeln!(
        s,
        "Matsubara signature comparison: {}",
        if !r.matsubara.applicable {
            if r.system.h_alpha_integral {
                "not applicable (h(alpha) integral)".to_string()
            } else {
                "not applicable".to_string()
            }
        } else if r.matsubara.all_agree {
            "per-mu sign agreement".to_string()
        } else {
            "MISMATCH".to_string()
        }
    );
    let _ = writeln!(
        s,
        "sigma feasibility: {}",
        match (&r.sigma.feasible, &r.sigma.witness) {
            (true, Some(w)) => format!("feasible, witness sigma = {}", vec_str(w)),
            _ => "infeasible (report only; contiguity shifts are out of scope)".to_string(),
        }
    );
    let _ = writeln!(s, "overall: {}  (exit code {})", if r.all_pass { "PASS" } else { "FAIL" }, r.exit_code);
    s
}
