use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{ChunkPolicy, CodeKind, CodeSpec, SpecError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("k and l must be positive")]
    ZeroSize,
    #[error("no codes configured")]
    NoCodes,
    #[error("code #{index}: {source}")]
    BadCode { index: usize, source: SpecError },
    #[error("duplicate code label `{0}`")]
    DuplicateCode(String),
    #[error("n grid must be non-empty, strictly ascending and >= 1")]
    BadGrid,
    #[error("bad stop rule `{0}` (expected fixed:<T> or successes:<S>,<cap>)")]
    BadStopRule(String),
    #[error("workers must be positive")]
    ZeroWorkers,
    #[error("symbol_bits must be positive")]
    ZeroSymbolBits,
    #[error("unknown preset `{0}` (expected fig2 or fig3)")]
    UnknownPreset(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: toml::de::Error },
}

/// When to stop sampling a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StopRule {
    Fixed(u64),
    /// Stop at `successes` successful decodings or after `cap` trials.
    Successes { successes: u64, cap: u64 },
}

impl Default for StopRule {
    fn default() -> Self {
        Self::Fixed(1000)
    }
}

impl StopRule {
    /// `successes:100,20000`.
    pub const HUNDRED_SUCCESSES: Self = Self::Successes { successes: 100, cap: 20_000 };

    fn validate(self) -> Result<Self, ConfigError> {
        match self {
            Self::Fixed(0) => Err(ConfigError::BadStopRule(self.to_string())),
            Self::Successes { successes, cap } if successes == 0 || cap < successes => {
                Err(ConfigError::BadStopRule(self.to_string()))
            }
            _ => Ok(self),
        }
    }
}

impl fmt::Display for StopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(t) => write!(f, "fixed:{t}"),
            Self::Successes { successes, cap } => write!(f, "successes:{successes},{cap}"),
        }
    }
}

impl FromStr for StopRule {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::BadStopRule(s.to_string());
        let (name, rest) = s.split_once(':').ok_or_else(bad)?;
        let rule = match name.trim() {
            "fixed" => Self::Fixed(rest.trim().parse().map_err(|_| bad())?),
            "successes" => {
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                Self::Successes {
                    successes: a.trim().parse().map_err(|_| bad())?,
                    cap: b.trim().parse().map_err(|_| bad())?,
                }
            }
            _ => return Err(bad()),
        };
        rule.validate()
    }
}

impl TryFrom<String> for StopRule {
    type Error = ConfigError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<StopRule> for String {
    fn from(r: StopRule) -> Self {
        r.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Track coefficient vectors only.
    #[default]
    Rank,
    /// Also carry random message symbols and check the decoded message.
    Payload,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rank" | "rank-only" => Ok(Self::Rank),
            "payload" => Ok(Self::Payload),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

fn one() -> usize {
    1
}

/// A code as written in a config file; `k` comes from the enclosing config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDescriptor {
    pub kind: CodeKind,
    #[serde(default = "one")]
    pub q: usize,
    #[serde(default = "one")]
    pub tau: usize,
}

impl CodeDescriptor {
    pub fn dense() -> Self {
        Self { kind: CodeKind::Dense, q: 1, tau: 1 }
    }

    pub fn chunked(q: usize) -> Self {
        Self { kind: CodeKind::Chunked, q, tau: 1 }
    }

    pub fn overlapped(q: usize, tau: usize) -> Self {
        Self { kind: CodeKind::Overlapped, q, tau }
    }

    pub fn resolve(&self, k: usize) -> Result<CodeSpec, SpecError> {
        CodeSpec::new(self.kind, k, self.q, self.tau)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub k: usize,
    pub l: u32,
    pub codes: Vec<CodeDescriptor>,
    pub n_grid: Vec<usize>,
    #[serde(default)]
    pub stop_rule: StopRule,
    #[serde(default)]
    pub policy: ChunkPolicy,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "one")]
    pub workers: usize,
    /// Width of each message symbol in payload mode.
    #[serde(default = "one")]
    pub symbol_bits: usize,
}

impl ExperimentConfig {
    pub fn new(k: usize, l: u32, codes: Vec<CodeDescriptor>, n_grid: Vec<usize>) -> Self {
        Self {
            k,
            l,
            codes,
            n_grid,
            stop_rule: StopRule::default(),
            policy: ChunkPolicy::default(),
            mode: Mode::default(),
            master_seed: 0,
            workers: 1,
            symbol_bits: 1,
        }
    }

    /// Resolved code specs, in configuration order.
    pub fn specs(&self) -> Result<Vec<CodeSpec>, ConfigError> {
        self.codes
            .iter()
            .enumerate()
            .map(|(index, c)| c.resolve(self.k).map_err(|source| ConfigError::BadCode { index, source }))
            .collect()
    }

    pub fn validate(&self) -> Result<Vec<CodeSpec>, ConfigError> {
        if self.k == 0 || self.l == 0 {
            return Err(ConfigError::ZeroSize);
        }
        if self.codes.is_empty() {
            return Err(ConfigError::NoCodes);
        }
        let specs = self.specs()?;
        for (i, s) in specs.iter().enumerate() {
            if specs[..i].iter().any(|t| t.label() == s.label()) {
                return Err(ConfigError::DuplicateCode(s.label()));
            }
        }
        let ascending = self.n_grid.windows(2).all(|w| w[0] < w[1]);
        if self.n_grid.is_empty() || self.n_grid[0] == 0 || !ascending {
            return Err(ConfigError::BadGrid);
        }
        self.stop_rule.validate()?;
        if self.workers == 0 {
            return Err(ConfigError::ZeroWorkers);
        }
        if self.symbol_bits == 0 {
            return Err(ConfigError::ZeroSymbolBits);
        }
        Ok(specs)
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: display.clone(),
            source,
        })?;
        let cfg = Self::from_toml(&text).map_err(|source| ConfigError::Parse { path: display, source })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `lo, lo + step, …` up to and including `hi`.
pub fn grid(lo: usize, hi: usize, step: usize) -> Vec<usize> {
    (lo..=hi).step_by(step).collect()
}

pub const PRESET_K: usize = 1024;

/// Four codes over a line of length 4.
pub fn fig2() -> ExperimentConfig {
    ExperimentConfig::new(
        PRESET_K,
        4,
        vec![
            CodeDescriptor::dense(),
            CodeDescriptor::chunked(2),
            CodeDescriptor::chunked(4),
            CodeDescriptor::overlapped(4, 2),
        ],
        grid(1024, 1600, 32),
    )
}

/// Aperture 16 throughout: CC with `q = 64` against OCC with `q` from 128 to 1024.
pub fn fig3(l: u32) -> ExperimentConfig {
    ExperimentConfig::new(
        PRESET_K,
        l,
        vec![
            CodeDescriptor::chunked(64),
            CodeDescriptor::overlapped(128, 2),
            CodeDescriptor::overlapped(256, 4),
            CodeDescriptor::overlapped(512, 8),
            CodeDescriptor::overlapped(1024, 16),
        ],
        grid(1024, 2816, 32),
    )
}

/// Named presets; `fig3` expands to one config per line length.
pub fn preset(name: &str) -> Result<Vec<ExperimentConfig>, ConfigError> {
    match name {
        "fig2" => Ok(vec![fig2()]),
        "fig3" => Ok(vec![fig3(1), fig3(2)]),
        other => Err(ConfigError::UnknownPreset(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stop_rule_round_trip() {
        for s in ["fixed:1000", "successes:100,20000"] {
            assert_eq!(s.parse::<StopRule>().unwrap().to_string(), s);
        }
        assert_eq!("successes:100,20000".parse::<StopRule>().unwrap(), StopRule::HUNDRED_SUCCESSES);
        for bad in ["fixed:0", "fixed", "successes:10,5", "successes:10", "trials:3"] {
            assert!(bad.parse::<StopRule>().is_err(), "{bad}");
        }
    }

    #[test]
    fn presets_are_valid() {
        let specs = fig2().validate().unwrap();
        let labels: Vec<_> = specs.iter().map(CodeSpec::label).collect();
        assert_eq!(labels, ["DC", "CC-q2", "CC-q4", "OCC-q4-t2"]);
        assert_eq!(fig2().n_grid.len(), 19);
        for l in [1, 2] {
            let specs = fig3(l).validate().unwrap();
            assert!(specs.iter().all(|s| s.aperture() == 16));
            assert_eq!(fig3(l).n_grid[1] - fig3(l).n_grid[0], 32);
        }
        assert!(preset("fig4").is_err());
    }

    #[test]
    fn toml_round_trip_and_defaults() {
        let cfg = fig2();
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        let text = r#"
            k = 16
            l = 2
            n_grid = [16, 20, 24]
            codes = [{ kind = "dense" }, { kind = "overlapped", q = 4, tau = 2 }]
            stop_rule = "successes:10,100"
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.codes[0], CodeDescriptor::dense());
        assert_eq!(cfg.stop_rule, StopRule::Successes { successes: 10, cap: 100 });
        assert_eq!(cfg.mode, Mode::Rank);
        assert_eq!(cfg.workers, 1);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = "k = 16\nl = 2\nn_grid = [16]\ncodes = [{ kind = \"dense\" }]\ntrials = 5\n";
        assert!(ExperimentConfig::from_toml(text).is_err());
        let text = "k = 16\nl = 2\nn_grid = [16]\ncodes = [{ kind = \"dense\", alpha = 3 }]\n";
        assert!(ExperimentConfig::from_toml(text).is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = fig2();
        cfg.n_grid = vec![1100, 1100];
        assert!(matches!(cfg.validate(), Err(ConfigError::BadGrid)));
        let mut cfg = fig2();
        cfg.codes.push(CodeDescriptor::chunked(3));
        assert!(matches!(cfg.validate(), Err(ConfigError::BadCode { index: 4, .. })));
        let mut cfg = fig2();
        cfg.codes.push(CodeDescriptor::chunked(2));
        assert!(matches!(cfg.validate(), Err(ConfigError::DuplicateCode(_))));
        let mut cfg = fig2();
        cfg.workers = 0;
        assert!(cfg.validate().is_err());
    }
}
