use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Theorem1,
    Theorem2,
    Ladder,
    Complete,
    Question1Search,
    Question2Search,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Theorem1, Suite::Theorem2, Suite::Ladder, Suite::Complete, Suite::Question1Search, Suite::Question2Search];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Ladder => "ladder",
            Suite::Complete => "complete",
            Suite::Question1Search => "question1-search",
            Suite::Question2Search => "question2-search",
        }
    }

    /// Suites whose violations indicate a bug; question searches only collect data.
    pub fn is_theorem_suite(self) -> bool {
        !matches!(self, Suite::Question1Search | Suite::Question2Search)
    }

    /// Exact suites reproduce quantities bit for bit; theorem2 uses floats.
    pub fn is_exact(self) -> bool {
        self != Suite::Theorem2
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown suite `{s}`")))
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Family {
    /// `trials` random connected graphs with `n_min..=n_max` vertices.
    Random { n_min: usize, n_max: usize, edge_probability: f64 },
    /// Every connected graph with `2..=n_max` vertices, up to isomorphism.
    Exhaustive { n_max: usize },
    /// Path graphs `P_n` (`n + 1` vertices) for `n_min..=n_max`.
    Path { n_min: usize, n_max: usize },
    Complete { n_min: usize, n_max: usize },
    Cycle { n_min: usize, n_max: usize },
    /// A graph file; its weights are used by the flow and resistance suites.
    File { path: PathBuf },
}

/// Largest `n_max` for the exhaustive family.
pub const EXHAUSTIVE_MAX: usize = 7;

impl Family {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let range = |lo: usize, hi: usize, min: usize| {
            if lo < min || lo > hi {
                Err(HarnessError::Config(format!("bad size range {lo}..={hi} (minimum {min})")))
            } else {
                Ok(())
            }
        };
        match *self {
            Family::Random { n_min, n_max, edge_probability } => {
                range(n_min, n_max, 2)?;
                if !(edge_probability > 0.0 && edge_probability <= 1.0) {
                    return Err(HarnessError::Config(format!("edge probability {edge_probability} not in (0, 1]")));
                }
                Ok(())
            }
            Family::Exhaustive { n_max } => {
                if !(2..=EXHAUSTIVE_MAX).contains(&n_max) {
                    return Err(HarnessError::Config(format!("exhaustive n_max must be in 2..={EXHAUSTIVE_MAX}, got {n_max}")));
                }
                Ok(())
            }
            Family::Path { n_min, n_max } => range(n_min, n_max, 1),
            Family::Complete { n_min, n_max } => range(n_min, n_max, 2),
            Family::Cycle { n_min, n_max } => range(n_min, n_max, 3),
            Family::File { .. } => Ok(()),
        }
    }
}

/// Parses the command-line family language:
///
/// ```text
/// path:4            path:2..8          complete:3..5     cycle:3..8
/// exhaustive:6      random:5..7:0.4    file:graphs/k4.txt
/// ```
impl FromStr for Family {
    type Err = HarnessError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| HarnessError::Config(format!("family `{spec}`: {why}"));
        let (kind, rest) = spec.split_once(':').ok_or_else(|| bad("expected KIND:ARGS"))?;
        let int = |s: &str| s.trim().parse::<usize>().map_err(|_| bad(&format!("bad integer `{s}`")));
        let range = |s: &str| -> Result<(usize, usize), HarnessError> {
            match s.split_once("..") {
                Some((a, b)) => Ok((int(a)?, int(b.trim_start_matches('='))?)),
                None => {
                    let n = int(s)?;
                    Ok((n, n))
                }
            }
        };
        let family = match kind {
            "path" | "ladder" => {
                let (n_min, n_max) = range(rest)?;
                Family::Path { n_min, n_max }
            }
            "complete" => {
                let (n_min, n_max) = range(rest)?;
                Family::Complete { n_min, n_max }
            }
            "cycle" => {
                let (n_min, n_max) = range(rest)?;
                Family::Cycle { n_min, n_max }
            }
            "exhaustive" => Family::Exhaustive { n_max: int(rest)? },
            "random" => {
                let (sizes, prob) = rest.split_once(':').ok_or_else(|| bad("expected random:N_MIN..N_MAX:PROB"))?;
                let (n_min, n_max) = range(sizes)?;
                let edge_probability = prob.trim().parse::<f64>().map_err(|_| bad(&format!("bad probability `{prob}`")))?;
                Family::Random { n_min, n_max, edge_probability }
            }
            "file" => Family::File { path: PathBuf::from(rest) },
            other => return Err(bad(&format!("unknown kind `{other}`"))),
        };
        family.validate()?;
        Ok(family)
    }
}

/// Ranges for random rational weights `num/den`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub max_numerator: u64,
    pub max_denominator: u64,
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec { max_numerator: 12, max_denominator: 6 }
    }
}

fn default_p_values() -> Vec<f64> {
    vec![1.5, 2.0, 3.0]
}

/// One experiment. Every instance is reproducible from the config and its
/// trial index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// May be left out of the file and supplied on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
    /// Required for the random family; caps enumerated families otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default = "default_p_values")]
    pub p_values: Vec<f64>,
    #[serde(default)]
    pub weights: WeightSpec,
    /// Wall-clock budget for the whole run, in seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget_secs: Option<f64>,
    /// Per-trial cap; trials past it are recorded as inconclusive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial_time_cap_secs: Option<f64>,
    /// Adds `runtime_ms` to records, which makes output machine-dependent.
    #[serde(default)]
    pub record_runtime: bool,
}

impl ExperimentConfig {
    pub fn new(suite: Suite, family: Family) -> Self {
        ExperimentConfig {
            suite: Some(suite),
            family,
            seed: 0,
            trials: None,
            p_values: default_p_values(),
            weights: WeightSpec::default(),
            time_budget_secs: None,
            trial_time_cap_secs: None,
            record_runtime: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn suite(&self) -> Result<Suite, HarnessError> {
        self.suite.ok_or_else(|| HarnessError::Config("no suite given".into()))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let suite = self.suite()?;
        self.family.validate()?;
        if matches!(self.family, Family::Random { .. }) && self.trials.is_none() {
            return Err(HarnessError::Config("the random family needs `trials`".into()));
        }
        if suite == Suite::Theorem2 {
            if self.p_values.is_empty() {
                return Err(HarnessError::Config("theorem2 needs at least one p value".into()));
            }
            if let Some(p) = self.p_values.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
                return Err(HarnessError::Config(format!("p must be finite and > 1, got {p}")));
            }
        }
        if self.weights.max_numerator == 0 || self.weights.max_denominator == 0 {
            return Err(HarnessError::Config("weight ranges must be positive".into()));
        }
        for (name, v) in [("time_budget_secs", self.time_budget_secs), ("trial_time_cap_secs", self.trial_time_cap_secs)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(HarnessError::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if suite == Suite::Ladder && !matches!(self.family, Family::Path { .. }) {
            return Err(HarnessError::Config("the ladder suite runs on the path family".into()));
        }
        if suite == Suite::Complete && !matches!(self.family, Family::Complete { .. }) {
            return Err(HarnessError::Config("the complete suite runs on the complete family".into()));
        }
        Ok(())
    }
}
