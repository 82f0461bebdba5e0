//! Problem-file ingestion: JSON with exact rationals as `"p/q"` strings.

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use mbherm_core::ratlin::{build_system, parse_rational, IntMatrix, Rational, SystemData};

/// On-disk problem description. `B` is the Gale dual, `gamma0` the parameter
/// vector; everything else is optional policy.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    pub gamma0: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_offset: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Command-line overrides; these win over problem-file fields, which win
/// over the environment and the defaults.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub precision: Option<u32>,
    pub seed: Option<u64>,
}

/// A fully validated problem: the system plus resolved numeric policy.
#[derive(Debug)]
pub struct ResolvedProblem {
    pub file: ProblemFile,
    pub sys: SystemData,
    pub tau_offset: Option<Vec<Rational>>,
    pub tolerance: f64,
    pub seed: u64,
    pub precision: u32,
}

pub const PRECISION_ENV: &str = "MBHERM_PRECISION";

pub fn parse_problem(text: &str) -> anyhow::Result<ProblemFile> {
    serde_json::from_str(text).map_err(|e| {
        anyhow!("problem file parse error at line {}, column {}: {e}", e.line(), e.column())
    })
}

pub fn resolve(file: ProblemFile, overrides: &Overrides) -> anyhow::Result<ResolvedProblem> {
    if file.b.is_empty() {
        bail!("field \"B\" must contain at least one row");
    }
    let width = file.b[0].len();
    for (i, row) in file.b.iter().enumerate() {
        if row.len() != width {
            bail!("field \"B\" row {i} has {} entries, expected {width}", row.len());
        }
    }
    let gamma0: Vec<Rational> = file
        .gamma0
        .iter()
        .enumerate()
        .map(|(i, s)| {
            parse_rational(s).map_err(|e| anyhow!("field \"gamma0\" entry {i}: {e}"))
        })
        .collect::<anyhow::Result<_>>()?;
    let tau_offset: Option<Vec<Rational>> = file
        .tau_offset
        .as_ref()
        .map(|v| {
            v.iter()
                .enumerate()
                .map(|(i, s)| {
                    parse_rational(s).map_err(|e| anyhow!("field \"tau_offset\" entry {i}: {e}"))
                })
                .collect::<anyhow::Result<Vec<_>>>()
        })
        .transpose()?;

    let sys = build_system(IntMatrix::from_rows(&file.b), gamma0)
        .context("invalid system data")?;
    if let Some(t) = &tau_offset {
        if t.len() != sys.d() {
            bail!("field \"tau_offset\" has length {}, expected d = {}", t.len(), sys.d());
        }
    }

    let precision = overrides
        .precision
        .or(file.precision)
        .or_else(|| std::env::var(PRECISION_ENV).ok().and_then(|v| v.parse().ok()))
        .unwrap_or(53);
    if precision != 53 {
        bail!(
            "unsupported working precision {precision} bits: only IEEE double (53) is available \
             in this build"
        );
    }
    let tolerance = overrides.tolerance.or(file.tolerance).unwrap_or(1e-9);
    if !(tolerance.is_finite() && tolerance > 0.0) {
        bail!("tolerance must be positive and finite, got {tolerance}");
    }
    let seed = overrides.seed.or(file.seed).unwrap_or(0);

    Ok(ResolvedProblem { file, sys, tau_offset, tolerance, seed, precision })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAUSS: &str = r#"{
        "B": [[1, 1, -1, -1]],
        "gamma0": ["-1/2", "-1/3", "-4/5", "0"],
        "tau_offset": ["1/2"],
        "seed": 7
    }"#;

    #[test]
    fn parse_and_resolve() {
        let file = parse_problem(GAUSS).unwrap();
        let resolved = resolve(file, &Overrides::default()).unwrap();
        assert_eq!(resolved.sys.n(), 4);
        assert_eq!(resolved.seed, 7);
        assert_eq!(resolved.tolerance, 1e-9);
        assert_eq!(resolved.precision, 53);
    }

    #[test]
    fn parse_error_has_location() {
        let err = parse_problem("{ \"B\": [[1,2],").unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn bad_rational_named() {
        let text = r#"{"B": [[1, 1, -1, -1]], "gamma0": ["-1/2", "x", "0", "0"]}"#;
        let err = resolve(parse_problem(text).unwrap(), &Overrides::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("gamma0") && err.contains("entry 1"), "{err}");
    }

    #[test]
    fn ragged_b_rejected() {
        let text = r#"{"B": [[1, 1, -1], [1, -1]], "gamma0": ["0", "0", "0"]}"#;
        let err = resolve(parse_problem(text).unwrap(), &Overrides::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("row 1"), "{err}");
    }

    #[test]
    fn unsupported_precision_rejected() {
        let file = parse_problem(GAUSS).unwrap();
        let err = resolve(
            file,
            &Overrides { precision: Some(113), ..Default::default() },
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("precision"), "{err}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"B": [[1, -1]], "gamma0": ["0", "0"], "extra": 1}"#;
        assert!(parse_problem(text).is_err());
    }

    #[test]
    fn echo_round_trip() {
        let file = parse_problem(GAUSS).unwrap();
        let json = serde_json::to_string(&file).unwrap();
        let again = parse_problem(&json).unwrap();
        assert_eq!(file, again);
    }
}
