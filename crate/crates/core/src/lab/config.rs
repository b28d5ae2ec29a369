//! Flat key-value experiment configuration (TOML syntax).
//!
//! ```toml
//! experiment = "thm21"
//! seed = 42
//! kappa = [0.5, 1.0, 2.0]
//! t_grid = [0.5, 1.0, 2.0]
//! ```
//!
//! Every key except `experiment` is optional; omitted keys take the
//! experiment's defaults. Scalars are accepted wherever a list is.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::alpha::AlphaIndex;
use crate::error::{Error, Result};

/// A single value or a list of values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// May be left out of a file when the CLI names the experiment.
    #[serde(default)]
    pub experiment: String,
    /// Config files hold TOML integers, so seeds from a file stay below 2^63.
    pub seed: Option<u64>,
    /// Monte Carlo sample count per estimate.
    pub samples: Option<usize>,
    pub workers: Option<usize>,
    /// Not echoed into reports or the hash.
    #[serde(skip_serializing)]
    pub out_dir: Option<PathBuf>,

    /// Scalar wavenumbers (one spatial dimension).
    pub kappa: Option<OneOrMany<f64>>,
    /// Squared wavenumbers; ICTBAP only.
    pub kappa_sq: Option<OneOrMany<f64>>,
    pub t_grid: Option<OneOrMany<f64>>,
    pub x_grid: Option<OneOrMany<f64>>,
    pub epsilon: Option<OneOrMany<f64>>,
    /// Constant potentials, each `<= 0`.
    pub c: Option<OneOrMany<f64>>,
    /// Stable indices written as `"l/m"`.
    pub alpha: Option<OneOrMany<AlphaIndex>>,
    /// Frequencies for the characteristic-function sampler check.
    pub xi: Option<OneOrMany<f64>>,

    /// Ball dimensions for the exit experiment.
    pub n: Option<OneOrMany<usize>>,
    pub radius: Option<f64>,
    /// Start point as its distance from the centre along the first axis.
    pub x: Option<f64>,
    /// Step ladder `[h, h/2, h/4]`, or just `h`.
    pub h: Option<OneOrMany<f64>>,

    /// SKBM initial functions: `"sin(x)+sin(2x)"`, `"0.5*sin(3x)"`, `"indicator(1,2,20)"`.
    pub f: Option<OneOrMany<String>>,

    pub fd_base_step: Option<f64>,
    pub fd_levels: Option<usize>,
    /// Overrides the residual tolerance of asserted residual reports.
    pub tolerance: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(experiment: impl Into<String>) -> Self {
        ExperimentConfig {
            experiment: experiment.into(),
            ..Default::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::ReadFile {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Canonical JSON form; key order is fixed by the struct layout.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config is plain data")
    }

    /// Hex SHA-256 of [`Self::canonical_json`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

/// One term `amplitude · sin(l x)` or an indicator expansion.
#[derive(Debug, Clone, PartialEq)]
pub enum SineSpec {
    Sum(Vec<(u32, f64)>),
    Indicator { lo: f64, hi: f64, modes: u32 },
}

/// Parses `"sin(x)+sin(2x)"`, `"0.5*sin(3x) - sin(x)"` or `"indicator(1,2,20)"`.
pub fn parse_sine_spec(text: &str) -> Result<SineSpec> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Config(format!("cannot parse initial function `{text}`"));
    if let Some(args) = s.strip_prefix("indicator(").and_then(|r| r.strip_suffix(')')) {
        let parts: Vec<&str> = args.split(',').collect();
        let [lo, hi, modes] = parts.as_slice() else {
            return Err(bad());
        };
        return Ok(SineSpec::Indicator {
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
            modes: modes.parse().map_err(|_| bad())?,
        });
    }
    let mut terms = Vec::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1.0, &rest[1..]),
            b'-' => (-1.0, &rest[1..]),
            _ if terms.is_empty() => (1.0, rest),
            _ => return Err(bad()),
        };
        let start = body.find("sin(").ok_or_else(bad)?;
        let amplitude = match &body[..start] {
            "" => 1.0,
            coef => coef.strip_suffix('*').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
        };
        let after = &body[start + 4..];
        let close = after.find("x)").ok_or_else(bad)?;
        let l = match &after[..close] {
            "" => 1,
            k => k.parse::<u32>().map_err(|_| bad())?,
        };
        if l == 0 {
            return Err(bad());
        }
        terms.push((l, sign * amplitude));
        rest = &after[close + 2..];
    }
    if terms.is_empty() {
        return Err(bad());
    }
    Ok(SineSpec::Sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_toml() {
        let c = ExperimentConfig::from_toml_str(
            r#"
            experiment = "exit"
            n = 1
            radius = 1.0
            x = 0.0
            samples = 1000000
            h = [1e-3, 5e-4, 2.5e-4]
            alpha = ["1/2", "1"]
            "#,
        )
        .unwrap();
        assert_eq!(c.n.unwrap().to_vec(), vec![1]);
        assert_eq!(c.h.unwrap().to_vec().len(), 3);
        assert_eq!(c.alpha.unwrap().to_vec(), vec![AlphaIndex::HALF, AlphaIndex::CAUCHY]);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(ExperimentConfig::from_toml_str("experiment = \"thm21\"\nkapa = 1.0").is_err());
        assert!(ExperimentConfig::from_toml_str("seed = \"one\"").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::new("thm21");
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = Some(1);
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn sine_specs() {
        assert_eq!(parse_sine_spec("sin(x)").unwrap(), SineSpec::Sum(vec![(1, 1.0)]));
        assert_eq!(
            parse_sine_spec("sin(x) + sin(2x)").unwrap(),
            SineSpec::Sum(vec![(1, 1.0), (2, 1.0)])
        );
        assert_eq!(
            parse_sine_spec("0.5*sin(3x)-sin(x)").unwrap(),
            SineSpec::Sum(vec![(3, 0.5), (1, -1.0)])
        );
        assert_eq!(
            parse_sine_spec("indicator(1, 2, 20)").unwrap(),
            SineSpec::Indicator { lo: 1.0, hi: 2.0, modes: 20 }
        );
        for bad in ["", "cos(x)", "sin(0x)", "sin(x)sin(x)", "indicator(1,2)"] {
            assert!(parse_sine_spec(bad).is_err(), "{bad}");
        }
    }
}
