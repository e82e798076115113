//! Run configuration: TOML parsing with defaults, validation, and assembly
//! of the flow constants, entrance profiles and solver settings.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eos::FlowConstants;
use crate::error::Error;
use crate::profiles::{EntranceProfiles, PhaseProfiles, RadialProfile};
use crate::solver::SolverConfig;
use crate::Result;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_format_version")]
    pub format_version: u32,
    pub constants: ConstantsBlock,
    #[serde(default)]
    pub entrance: EntranceBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

fn default_format_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsBlock {
    pub gamma: f64,
    pub rho0_plus: f64,
    pub rho0_minus: f64,
    pub u0_plus: f64,
    pub u0_minus: f64,
    pub p0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntranceBlock {
    /// "preset" (smooth compact-support family) or "file" (sampled profiles).
    #[serde(default = "default_kind")]
    pub kind: String,
    /// Target perturbation magnitude for the preset family; 0 = background.
    #[serde(default)]
    pub sigma: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plus_path: Option<String>,
}

fn default_kind() -> String {
    "preset".into()
}

fn default_epsilon() -> f64 {
    0.05
}

impl Default for EntranceBlock {
    fn default() -> Self {
        EntranceBlock {
            kind: default_kind(),
            sigma: 0.0,
            epsilon: default_epsilon(),
            minus_path: None,
            plus_path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    #[serde(default = "d_nx")]
    pub n_x: usize,
    #[serde(default = "d_nx")]
    pub n_s: usize,
    #[serde(default = "d_length")]
    pub length: f64,
    /// Truncation lengths of the `sweep-length` command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<f64>>,
    /// Perturbation magnitudes of the `sweep-sigma` command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<Vec<f64>>,
    #[serde(default = "d_tol_outer")]
    pub tol_outer: f64,
    #[serde(default = "d_tol_fb")]
    pub tol_fb: f64,
    #[serde(default = "d_tol_fb")]
    pub tol_picard: f64,
    #[serde(default = "d_tol_linear")]
    pub tol_linear: f64,
    #[serde(default = "d_one")]
    pub omega: f64,
    #[serde(default = "d_one")]
    pub omega_f: f64,
    #[serde(default = "d_max_outer")]
    pub max_outer: usize,
    #[serde(default = "d_max_middle")]
    pub max_middle: usize,
    #[serde(default = "d_max_outer")]
    pub max_inner: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axial_floor: Option<f64>,
    /// Window agreement tolerance reported by the length sweep.
    #[serde(default = "d_agreement")]
    pub agreement_tol: f64,
}

fn d_nx() -> usize {
    64
}
fn d_length() -> f64 {
    10.0
}
fn d_tol_outer() -> f64 {
    1e-9
}
fn d_tol_fb() -> f64 {
    1e-10
}
fn d_tol_linear() -> f64 {
    1e-11
}
fn d_one() -> f64 {
    1.0
}
fn d_max_outer() -> usize {
    100
}
fn d_max_middle() -> usize {
    200
}
fn d_agreement() -> f64 {
    1e-3
}

impl Default for SolverBlock {
    fn default() -> Self {
        SolverBlock {
            n_x: d_nx(),
            n_s: d_nx(),
            length: d_length(),
            lengths: None,
            sigmas: None,
            tol_outer: d_tol_outer(),
            tol_fb: d_tol_fb(),
            tol_picard: d_tol_fb(),
            tol_linear: d_tol_linear(),
            omega: d_one(),
            omega_f: d_one(),
            max_outer: d_max_outer(),
            max_middle: d_max_middle(),
            max_inner: d_max_outer(),
            axial_floor: None,
            agreement_tol: d_agreement(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "d_dir")]
    pub dir: String,
    #[serde(default = "d_true")]
    pub write_fields: bool,
}

fn d_dir() -> String {
    "out".into()
}
fn d_true() -> bool {
    true
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: d_dir(),
            write_fields: d_true(),
        }
    }
}

impl RunConfig {
    /// Parse and validate a config document; all defaults are filled in.
    pub fn parse(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text)
            .map_err(|e| Error::config("<config>", e.to_string()))?;
        if config.format_version != FORMAT_VERSION {
            return Err(Error::config(
                "format_version",
                format!(
                    "unsupported version {} (this build reads {FORMAT_VERSION})",
                    config.format_version
                ),
            ));
        }
        config.build()?; // full validation
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Assemble the validated pieces used by the solver.
    pub fn build(&self) -> Result<(FlowConstants, EntranceProfiles, SolverConfig)> {
        let c = &self.constants;
        let consts = FlowConstants::new(
            c.gamma,
            c.rho0_plus,
            c.rho0_minus,
            c.u0_plus,
            c.u0_minus,
            c.p0,
        )?;
        let profiles = match self.entrance.kind.as_str() {
            "preset" => EntranceProfiles::preset(&consts, self.entrance.epsilon, self.entrance.sigma)?,
            "file" => {
                let minus_path = self.entrance.minus_path.as_ref().ok_or_else(|| {
                    Error::config("entrance.minus_path", "required when kind = \"file\"")
                })?;
                let plus_path = self.entrance.plus_path.as_ref().ok_or_else(|| {
                    Error::config("entrance.plus_path", "required when kind = \"file\"")
                })?;
                let minus = load_phase_profiles(&consts, crate::eos::PhaseTag::Minus, Path::new(minus_path))?;
                let plus = load_phase_profiles(&consts, crate::eos::PhaseTag::Plus, Path::new(plus_path))?;
                EntranceProfiles::from_sampled(&consts, self.entrance.epsilon, minus, plus)?
            }
            other => {
                return Err(Error::config(
                    "entrance.kind",
                    format!("unknown kind `{other}` (expected \"preset\" or \"file\")"),
                ))
            }
        };
        let s = &self.solver;
        let solver = SolverConfig {
            n_x: s.n_x,
            n_s: s.n_s,
            length: s.length,
            tol_outer: s.tol_outer,
            tol_fb: s.tol_fb,
            tol_picard: s.tol_picard,
            tol_linear: s.tol_linear,
            omega: s.omega,
            omega_f: s.omega_f,
            max_outer: s.max_outer,
            max_middle: s.max_middle,
            max_inner: s.max_inner,
            axial_floor: s.axial_floor,
        };
        solver.validate()?;
        if let Some(lengths) = &s.lengths {
            for pair in lengths.windows(2) {
                if pair[1] <= pair[0] {
                    return Err(Error::config("solver.lengths", "must be increasing"));
                }
            }
            if lengths.iter().any(|l| *l < 10.0) {
                return Err(Error::config("solver.lengths", "sweep lengths must be >= 10"));
            }
        }
        if let Some(sigmas) = &s.sigmas {
            if sigmas.iter().any(|v| *v < 0.0) {
                return Err(Error::config("solver.sigmas", "must be non-negative"));
            }
        }
        Ok((consts, profiles, solver))
    }
}

/// Load one phase's entrance profiles from a whitespace-separated text file
/// with columns `r v w S` (comments with `#`). Samples must be uniform and
/// cover the phase's entrance interval.
pub fn load_phase_profiles(
    consts: &FlowConstants,
    phase: crate::eos::PhaseTag,
    path: &Path,
) -> Result<PhaseProfiles> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading profile {}", path.display()), e))?;
    let mut rows: Vec<[f64; 4]> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<f64> = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                path: path.display().to_string(),
                reason: format!("line {}: {e}", lineno + 1),
            })?;
        if cols.len() != 4 {
            return Err(Error::Parse {
                path: path.display().to_string(),
                reason: format!("line {}: expected 4 columns r v w S", lineno + 1),
            });
        }
        rows.push([cols[0], cols[1], cols[2], cols[3]]);
    }
    if rows.len() < 4 {
        return Err(Error::Parse {
            path: path.display().to_string(),
            reason: "need at least 4 sample rows".into(),
        });
    }
    let (lo_expect, hi_expect) = match phase {
        crate::eos::PhaseTag::Minus => (0.0, 0.5),
        crate::eos::PhaseTag::Plus => (0.5, 1.0),
    };
    let lo = rows[0][0];
    let hi = rows[rows.len() - 1][0];
    if (lo - lo_expect).abs() > 1e-12 || (hi - hi_expect).abs() > 1e-12 {
        return Err(Error::Parse {
            path: path.display().to_string(),
            reason: format!("samples must cover [{lo_expect}, {hi_expect}], got [{lo}, {hi}]"),
        });
    }
    let h = (hi - lo) / (rows.len() - 1) as f64;
    for (k, row) in rows.iter().enumerate() {
        if (row[0] - (lo + k as f64 * h)).abs() > 1e-10 {
            return Err(Error::Parse {
                path: path.display().to_string(),
                reason: format!("sample radii must be uniform (row {})", k + 1),
            });
        }
    }
    let s0 = consts.s0(phase);
    Ok(PhaseProfiles {
        v: RadialProfile::from_samples(lo, hi, rows.iter().map(|r| r[1]).collect()),
        w: RadialProfile::from_samples(lo, hi, rows.iter().map(|r| r[2]).collect()),
        ds: RadialProfile::from_samples(lo, hi, rows.iter().map(|r| r[3] - s0).collect()),
    })
}
