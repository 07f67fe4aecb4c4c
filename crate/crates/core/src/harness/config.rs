//! Experiment configuration: a flat `key = value` text format with typed
//! parsing. Unknown and repeated keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::KsLevel;
use crate::error::{Error, Result};
use crate::functional::{FunctionalF, FunctionalTag};
use crate::heavy_tail_model::{TailLaw, TruncationFn, TruncationShape};
use crate::partial_sum_engine::IndicatorScale;
use crate::stable_limit_sim::LimitPathConfig;

/// Which limit theorem an experiment exercises.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Regime {
    /// `α ∈ (0, 1)`: untruncated sums against the stable limit.
    Theorem1,
    /// `α ∈ [1, 2)`: ε-truncated sums against the ε-truncated limit.
    Theorem2 { epsilon: f64 },
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Theorem1 => f.write_str("theorem1"),
            Self::Theorem2 { .. } => f.write_str("theorem2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub alpha: f64,
    pub p: f64,
    pub n_values: Vec<usize>,
    pub replicate_count: usize,
    pub f_tag: FunctionalTag,
    pub h_shape: TruncationShape,
    pub regime: Regime,
    /// Jump floor of the directly simulated limit.
    pub delta: f64,
    pub indicator: IndicatorScale,
    pub eval_times: Vec<f64>,
    pub master_seed: u64,
    pub ks_level: KsLevel,
    pub output_dir: PathBuf,
    /// Paths per `n` on which characteristic gaps are averaged.
    pub char_paths: usize,
    /// Points of the uniform grid the characteristic gaps are taken over.
    pub char_grid: usize,
}

pub const KEYS: &[&str] = &[
    "experiment_id",
    "alpha",
    "p",
    "n_values",
    "replicate_count",
    "f_tag",
    "h_shape",
    "regime",
    "epsilon",
    "delta",
    "indicator",
    "eval_times",
    "master_seed",
    "ks_level",
    "output_dir",
    "char_paths",
    "char_grid",
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment_id: "experiment".into(),
            alpha: 0.8,
            p: 0.7,
            n_values: vec![1000],
            replicate_count: 1000,
            f_tag: FunctionalTag::Sine,
            h_shape: TruncationShape::Taper,
            regime: Regime::Theorem1,
            delta: 1e-4,
            indicator: IndicatorScale::Scaled,
            eval_times: vec![1.0],
            master_seed: 0,
            ks_level: KsLevel::P01,
            output_dir: PathBuf::from("."),
            char_paths: 100,
            char_grid: 50,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>()
        .map_err(|e| Error::Config(format!("`{key}`: cannot parse `{raw}`: {e}")))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Parses and validates a config text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<&str, &str> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!(
                    "line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            if entries.insert(key, value.trim()).is_some() {
                return Err(Error::Config(format!(
                    "line {}: key `{key}` given twice",
                    lineno + 1
                )));
            }
        }

        let mut cfg = Self::default();
        let mut explicit_char_paths = false;
        let mut epsilon: Option<f64> = None;
        let mut regime_name = "theorem1";
        for (&key, &raw) in &entries {
            match key {
                "experiment_id" => cfg.experiment_id = raw.to_string(),
                "alpha" => cfg.alpha = parse_value(key, raw)?,
                "p" => cfg.p = parse_value(key, raw)?,
                "n_values" => cfg.n_values = parse_list(key, raw)?,
                "replicate_count" => cfg.replicate_count = parse_value(key, raw)?,
                "f_tag" => cfg.f_tag = parse_value(key, raw)?,
                "h_shape" => {
                    cfg.h_shape = match raw {
                        "taper" => TruncationShape::Taper,
                        "hard" => TruncationShape::Hard,
                        other => {
                            return Err(Error::Config(format!(
                                "`h_shape`: expected taper|hard, got `{other}`"
                            )))
                        }
                    }
                }
                "regime" => regime_name = raw,
                "epsilon" => epsilon = Some(parse_value(key, raw)?),
                "delta" => cfg.delta = parse_value(key, raw)?,
                "indicator" => {
                    cfg.indicator = match raw {
                        "scaled" => IndicatorScale::Scaled,
                        "raw" => IndicatorScale::Raw,
                        other => {
                            return Err(Error::Config(format!(
                                "`indicator`: expected scaled|raw, got `{other}`"
                            )))
                        }
                    }
                }
                "eval_times" => cfg.eval_times = parse_list(key, raw)?,
                "master_seed" => cfg.master_seed = parse_value(key, raw)?,
                "ks_level" => cfg.ks_level = KsLevel::try_from(parse_value::<f64>(key, raw)?)?,
                "output_dir" => cfg.output_dir = PathBuf::from(raw),
                "char_paths" => {
                    cfg.char_paths = parse_value(key, raw)?;
                    explicit_char_paths = true;
                }
                "char_grid" => cfg.char_grid = parse_value(key, raw)?,
                _ => unreachable!("keys checked against KEYS"),
            }
        }
        cfg.regime = match (regime_name, epsilon) {
            ("theorem1", None) => Regime::Theorem1,
            ("theorem1", Some(_)) => {
                return Err(Error::Config(
                    "`epsilon` only applies to regime theorem2".into(),
                ))
            }
            ("theorem2", Some(epsilon)) => Regime::Theorem2 { epsilon },
            ("theorem2", None) => {
                return Err(Error::Config("regime theorem2 needs `epsilon`".into()))
            }
            (other, _) => {
                return Err(Error::Config(format!(
                    "`regime`: expected theorem1|theorem2, got `{other}`"
                )))
            }
        };
        if !explicit_char_paths {
            cfg.char_paths = cfg.char_paths.min(cfg.replicate_count.max(1));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the config in the format [`parse`](Self::parse) accepts.
    pub fn to_config_text(&self) -> String {
        let join = |v: Vec<String>| v.join(", ");
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        line("experiment_id", self.experiment_id.clone());
        line("alpha", format!("{:?}", self.alpha));
        line("p", format!("{:?}", self.p));
        line(
            "n_values",
            join(self.n_values.iter().map(|n| n.to_string()).collect()),
        );
        line("replicate_count", self.replicate_count.to_string());
        line("f_tag", self.f_tag.to_string());
        line(
            "h_shape",
            match self.h_shape {
                TruncationShape::Taper => "taper".into(),
                TruncationShape::Hard => "hard".into(),
            },
        );
        line("regime", self.regime.to_string());
        if let Regime::Theorem2 { epsilon } = self.regime {
            line("epsilon", format!("{epsilon:?}"));
        }
        line("delta", format!("{:?}", self.delta));
        line(
            "indicator",
            match self.indicator {
                IndicatorScale::Scaled => "scaled".into(),
                IndicatorScale::Raw => "raw".into(),
            },
        );
        line(
            "eval_times",
            join(self.eval_times.iter().map(|t| format!("{t:?}")).collect()),
        );
        line("master_seed", self.master_seed.to_string());
        line("ks_level", self.ks_level.to_string());
        line("output_dir", self.output_dir.display().to_string());
        line("char_paths", self.char_paths.to_string());
        line("char_grid", self.char_grid.to_string());
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.experiment_id.is_empty()
            || !self
                .experiment_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
        {
            return bad(format!(
                "experiment_id `{}` must be nonempty and use only [A-Za-z0-9._-]",
                self.experiment_id
            ));
        }
        TailLaw::new(self.alpha, self.p).map_err(|e| Error::Config(e.to_string()))?;
        match self.regime {
            Regime::Theorem1 if !(self.alpha > 0.0 && self.alpha < 1.0) => {
                return bad(format!(
                    "regime theorem1 needs alpha in (0, 1), got {}",
                    self.alpha
                ));
            }
            Regime::Theorem2 { epsilon } => {
                if !(1.0..2.0).contains(&self.alpha) {
                    return bad(format!(
                        "regime theorem2 needs alpha in [1, 2), got {}",
                        self.alpha
                    ));
                }
                if !(epsilon > 0.0 && epsilon < 0.5) {
                    return bad(format!(
                        "regime theorem2 needs epsilon in (0, 1/2), got {epsilon}"
                    ));
                }
            }
            _ => {}
        }
        self.limit_config()
            .validate(self.alpha, &self.truncation())
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return bad("n_values must be a nonempty list of positive integers".into());
        }
        if self.replicate_count == 0 {
            return bad("replicate_count must be positive".into());
        }
        if self.eval_times.is_empty() {
            return bad("eval_times must be nonempty".into());
        }
        if self.eval_times.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
            return bad("eval_times must lie in (0, 1]".into());
        }
        if self.eval_times.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("eval_times must be strictly increasing".into());
        }
        if self.char_paths == 0 || self.char_paths > self.replicate_count {
            return bad(format!(
                "char_paths must lie in 1..={}, got {}",
                self.replicate_count, self.char_paths
            ));
        }
        if self.char_grid == 0 {
            return bad("char_grid must be positive".into());
        }
        FunctionalF::new(self.f_tag).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn law(&self) -> Result<TailLaw> {
        TailLaw::new(self.alpha, self.p)
    }

    pub fn truncation(&self) -> TruncationFn {
        TruncationFn {
            shape: self.h_shape,
        }
    }

    pub fn functional(&self) -> Result<FunctionalF> {
        FunctionalF::new(self.f_tag)
    }

    pub fn limit_config(&self) -> LimitPathConfig {
        match self.regime {
            Regime::Theorem1 => LimitPathConfig::direct(self.delta),
            Regime::Theorem2 { epsilon } => LimitPathConfig::truncated(epsilon),
        }
    }
}
