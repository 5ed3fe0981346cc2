//! Flat key-value config files with `[section]` headers.
//!
//! ```text
//! # comment
//! [chain]
//! n_sites = 10
//! n_left = 5
//! omega_left = 1.0
//! omega_right = 1.618033988749895
//! initial_state = z2
//!
//! [drive]
//! period_left = 4.74
//! period_right = 2.9294228547125
//! theta_left = 3.141592653589793
//! theta_right = 3.141592653589793
//!
//! [run]
//! t_max = 1000
//! sample_dt = 0.05
//! engine = dense
//!
//! [output]
//! out = run.csv
//! ```
//!
//! Unknown keys are rejected so typos surface immediately. Command-line
//! flags override file values.

use std::collections::BTreeMap;
use std::path::Path;

use dtqc_core::{ChainParameters, Engine, NamedState, GOLDEN_RATIO};

use crate::error::{CliError, Result};

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    entries: BTreeMap<(String, String), String>,
}

const KNOWN_KEYS: &[(&str, &str)] = &[
    ("chain", "n_sites"),
    ("chain", "n_left"),
    ("chain", "omega_left"),
    ("chain", "omega_right"),
    ("chain", "initial_state"),
    ("drive", "period_left"),
    ("drive", "period_right"),
    ("drive", "theta_left"),
    ("drive", "theta_right"),
    ("drive", "theta"),
    ("run", "t_max"),
    ("run", "sample_dt"),
    ("run", "engine"),
    ("run", "observable"),
    ("run", "theta_values"),
    ("run", "f_left_values"),
    ("output", "out"),
    ("output", "out_dir"),
];

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    CliError::usage(format!("line {}: unterminated section", lineno + 1))
                })?;
                section = name.trim().to_ascii_lowercase();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().to_ascii_lowercase();
            if !KNOWN_KEYS.contains(&(section.as_str(), key.as_str())) {
                return Err(CliError::usage(format!(
                    "line {}: unknown key `{key}` in section [{section}]",
                    lineno + 1
                )));
            }
            entries.insert((section.clone(), key), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .map(String::as_str)
    }

    fn get_f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CliError::usage(format!("[{section}] {key} = {v}: not a number")))
            })
            .transpose()
    }

    fn get_usize(&self, section: &str, key: &str) -> Result<Option<usize>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    CliError::usage(format!("[{section}] {key} = {v}: not an integer"))
                })
            })
            .transpose()
    }

    /// Applies file values on top of a base parameter set.
    pub fn apply_chain(&self, mut params: ChainParameters) -> Result<ChainParameters> {
        if let Some(n) = self.get_usize("chain", "n_sites")? {
            params.n_sites = n;
            params.n_left = n / 2;
        }
        if let Some(n) = self.get_usize("chain", "n_left")? {
            params.n_left = n;
        }
        if let Some(v) = self.get_f64("chain", "omega_left")? {
            params.omega_left = v;
        }
        if let Some(v) = self.get_f64("chain", "omega_right")? {
            params.omega_right = v;
        }
        if let Some(v) = self.get("chain", "initial_state") {
            params.initial_state = NamedState::parse(v)?;
        }
        if let Some(v) = self.get_f64("drive", "period_left")? {
            params.period_left = v;
            params.period_right = v / GOLDEN_RATIO;
        }
        if let Some(v) = self.get_f64("drive", "period_right")? {
            params.period_right = v;
        }
        if let Some(v) = self.get_f64("drive", "theta")? {
            params.theta_left = v;
            params.theta_right = v;
        }
        if let Some(v) = self.get_f64("drive", "theta_left")? {
            params.theta_left = v;
        }
        if let Some(v) = self.get_f64("drive", "theta_right")? {
            params.theta_right = v;
        }
        Ok(params)
    }

    pub fn t_max(&self) -> Result<Option<f64>> {
        self.get_f64("run", "t_max")
    }

    pub fn sample_dt(&self) -> Result<Option<f64>> {
        self.get_f64("run", "sample_dt")
    }

    pub fn engine(&self) -> Result<Option<Engine>> {
        match self.get("run", "engine") {
            None => Ok(None),
            Some("dense") => Ok(Some(Engine::Dense)),
            Some("krylov") => Ok(Some(Engine::Krylov { tolerance: 1e-10 })),
            Some(other) => Err(CliError::usage(format!(
                "engine = {other}: expected `dense` or `krylov`"
            ))),
        }
    }

    pub fn out(&self) -> Option<&str> {
        self.get("output", "out")
    }

    /// `start:step:end` ranges or comma-separated lists.
    pub fn value_list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(raw) = self.get(section, key) else {
            return Ok(None);
        };
        parse_value_list(raw).map(Some)
    }
}

pub fn parse_value_list(raw: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| CliError::usage(format!("value list `{raw}`: {msg}"));
    if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("range syntax is start:step:end"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
        let step: f64 = parts[1].trim().parse().map_err(|_| bad("bad step"))?;
        let end: f64 = parts[2].trim().parse().map_err(|_| bad("bad end"))?;
        if !step.is_finite() || step <= 0.0 || end < start {
            return Err(bad("need step > 0 and end ≥ start"));
        }
        let n = ((end - start) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| start + k as f64 * step).collect())
    } else {
        raw.split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(&format!("bad entry `{v}`")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_overrides() {
        let text = "
# a comment
[chain]
n_sites = 8
omega_right = 1.5
[drive]
theta = 2.5
[run]
t_max = 10 # trailing comment
";
        let config = FileConfig::parse(text).unwrap();
        let params = config
            .apply_chain(ChainParameters::golden(10, 4.74))
            .unwrap();
        assert_eq!(params.n_sites, 8);
        assert_eq!(params.n_left, 4);
        assert_eq!(params.omega_right, 1.5);
        assert_eq!(params.theta_left, 2.5);
        assert_eq!(params.theta_right, 2.5);
        assert_eq!(config.t_max().unwrap(), Some(10.0));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(FileConfig::parse("[chain]\nn_site = 8\n").is_err());
        assert!(FileConfig::parse("[typo]\nn_sites = 8\n").is_err());
    }

    #[test]
    fn value_lists() {
        assert_eq!(parse_value_list("1, 2, 2.5").unwrap(), vec![1.0, 2.0, 2.5]);
        let range = parse_value_list("2.0:0.5:4.0").unwrap();
        assert_eq!(range, vec![2.0, 2.5, 3.0, 3.5, 4.0]);
        assert!(parse_value_list("1:2").is_err());
    }
}
