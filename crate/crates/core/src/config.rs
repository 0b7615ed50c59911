//! Run configuration files.
//!
//! ```json
//! {
//!   "b0": 1,
//!   "positives": [[2, 4], [5, 9]],
//!   "n": 3,
//!   "kernel": "triangle",
//!   "grid": {"step": 0.001, "halfwidth": 10},
//!   "tolerances": {"power": 1e-10},
//!   "seed": 42,
//!   "output": "out",
//!   "format": "json"
//! }
//! ```
//!
//! Only `b0` is required; a bare support file is a valid config.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analyze::{PD_CLOSED_FORM_TOL, PD_QUADRATURE_TOL, ZERO_TOL_REL};
use crate::error::{Error, Result};
use crate::family::{DEFAULT_ENUMERATION_CAP, IDENTIFY_TOL};
use crate::kernel::KernelShape;
use crate::support::{Endpoint, RawSpec, SupportSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub step: f64,
    pub halfwidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub hermitian: f64,
    pub power: f64,
    pub pd_closed_form: f64,
    pub pd_quadrature: f64,
    pub zero_rel: f64,
    pub phase_residual: f64,
    pub modulus: f64,
    pub identify: f64,
    pub cdf_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-12,
            power: 1e-10,
            pd_closed_form: PD_CLOSED_FORM_TOL,
            pd_quadrature: PD_QUADRATURE_TOL,
            zero_rel: ZERO_TOL_REL,
            phase_residual: 1e-8,
            modulus: 1e-9,
            identify: IDENTIFY_TOL,
            cdf_abs: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    #[default]
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    b0: f64,
    #[serde(default)]
    positives: Vec<(f64, Endpoint)>,
    #[serde(default = "default_n")]
    n: u32,
    #[serde(default)]
    kernel: KernelShape,
    #[serde(default)]
    grid: Option<GridConfig>,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    format: OutputFormat,
    #[serde(default = "default_cap")]
    enumeration_cap: u64,
    #[serde(default)]
    t_domain: Option<f64>,
    #[serde(default)]
    t_step: Option<f64>,
}

fn default_n() -> u32 {
    2
}

fn default_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: SupportSpec,
    pub n: u32,
    pub kernel: KernelShape,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub enumeration_cap: u64,
    pub t_domain: f64,
    pub t_step: f64,
}

/// Which top-level key a semantic error should be reported against.
fn key_for(err: &Error) -> &'static str {
    match err {
        Error::NonPositiveB0(_) => "b0",
        Error::InvalidOrder(_) => "n",
        Error::InvalidGrid(_) => "grid",
        _ => "positives",
    }
}

/// 1-based line of the first occurrence of `"key"` in `text`.
fn line_of_key(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.lines()
        .position(|l| l.contains(&needle))
        .map_or(1, |i| i + 1)
}

impl RunConfig {
    /// Parses and validates a config. Errors carry a `line N:` prefix.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {}: {}", e.line().max(1), e)))?;
        Self::from_raw(raw).map_err(|e| {
            let line = line_of_key(text, key_for(&e));
            Error::Parse(format!("line {line}: {e}"))
        })
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let spec = RawSpec {
            b0: raw.b0,
            positives: raw.positives,
        }
        .into_spec()?;
        if raw.n < 2 {
            return Err(Error::InvalidOrder(raw.n));
        }
        let extent = spec.finite_extent();
        let grid = raw.grid.unwrap_or(GridConfig {
            step: 1e-3,
            halfwidth: extent + 1.0,
        });
        if !(grid.step > 0.0 && grid.step.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "grid.step must be positive, got {}",
                grid.step
            )));
        }
        if !(grid.halfwidth >= extent + 1.0) || !grid.halfwidth.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "grid.halfwidth {} must cover the support's finite extent {extent} + 1",
                grid.halfwidth
            )));
        }
        let t_domain = raw.t_domain.unwrap_or(50.0);
        let t_step = raw.t_step.unwrap_or(0.05);
        if !(t_domain > 0.0 && t_step > 0.0 && t_domain.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "t_domain {t_domain} and t_step {t_step} must be positive"
            )));
        }
        Ok(RunConfig {
            spec,
            n: raw.n,
            kernel: raw.kernel,
            grid,
            tolerances: raw.tolerances,
            seed: raw.seed,
            output: raw.output,
            format: raw.format,
            enumeration_cap: raw.enumeration_cap,
            t_domain,
            t_step,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = RunConfig::from_json(r#"{"b0": 1, "positives": [[2, 4]]}"#).unwrap();
        assert_eq!(c.spec.k(), 1);
        assert_eq!(c.n, 2);
        assert_eq!(c.grid.halfwidth, 5.0);
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.kernel, KernelShape::Triangle);
    }

    #[test]
    fn full_config() {
        let text = r#"{
            "b0": 1,
            "positives": [[2, 4], [5, "inf"]],
            "n": 3,
            "kernel": "triangle",
            "grid": {"step": 0.01, "halfwidth": 30},
            "tolerances": {"power": 1e-9},
            "seed": 42,
            "output": "out",
            "format": "csv"
        }"#;
        let c = RunConfig::from_json(text).unwrap();
        assert!(c.spec.has_half_infinite());
        assert_eq!(c.tolerances.power, 1e-9);
        assert_eq!(c.tolerances.hermitian, 1e-12);
        assert_eq!(c.format, OutputFormat::Csv);
        assert_eq!(c.seed, 42);
    }

    #[test]
    fn errors_are_line_anchored() {
        let text = "{\n  \"b0\": 1,\n  \"positives\": [[2, 4], [3, 5]]\n}";
        match RunConfig::from_json(text) {
            Err(Error::Parse(msg)) => assert!(msg.starts_with("line 3:"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let text = "{\n  \"positives\": [[2, 4]]\n}";
        match RunConfig::from_json(text) {
            Err(Error::Parse(msg)) => assert!(msg.starts_with("line "), "{msg}"),
            other => panic!("{other:?}"),
        }
        let text = "{\n  \"b0\": 1,\n  \"n\": 1\n}";
        match RunConfig::from_json(text) {
            Err(Error::Parse(msg)) => assert!(msg.starts_with("line 3:"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grid_must_cover_support() {
        let text = r#"{"b0": 1, "positives": [[2, 4]], "grid": {"step": 0.01, "halfwidth": 3}}"#;
        assert!(RunConfig::from_json(text).is_err());
        let text = r#"{"b0": 1, "grid": {"step": 0, "halfwidth": 3}}"#;
        assert!(RunConfig::from_json(text).is_err());
        let text = r#"{"b0": 1, "bogus": 3}"#;
        assert!(RunConfig::from_json(text).is_err());
    }
}
