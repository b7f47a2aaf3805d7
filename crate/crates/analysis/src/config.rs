//! JSON run configurations.

use serde::{Deserialize, Serialize};

use crate::experiments::Decoder;
use crate::fit::FitOptions;
use crate::AnalysisError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeCapacityConfig {
    pub n: usize,
    pub rate: f64,
    pub depths: Vec<usize>,
    pub p_grid: Vec<f64>,
    pub trials: usize,
    pub decoder: Decoder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyConfig {
    pub n: usize,
    pub rate: f64,
    pub d: usize,
    /// Distillation rounds at which the entropy is reported.
    pub qs: Vec<usize>,
    pub p_grid: Vec<f64>,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutualInfoConfig {
    pub n: usize,
    pub rate: f64,
    /// Encoding depths; distillation uses `q = d` rounds.
    pub depths: Vec<usize>,
    pub rounds: usize,
    pub p_grid: Vec<f64>,
    pub trials: usize,
}

/// Parities kept in the outcome code of the spacetime experiment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeRows {
    #[default]
    State,
    Code,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeConfig {
    pub n: usize,
    pub rate: f64,
    /// Encoding depths; distillation uses `q = d` rounds.
    pub depths: Vec<usize>,
    pub ec_rounds: usize,
    pub p_grid: Vec<f64>,
    pub trials: usize,
    #[serde(default)]
    pub rows: OutcomeRows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    CodeCapacity(CodeCapacityConfig),
    Entropy(EntropyConfig),
    MutualInfo(MutualInfoConfig),
    Spacetime(SpacetimeConfig),
}

fn default_batches() -> usize {
    50
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Jackknife batch count.
    #[serde(default = "default_batches")]
    pub batches: usize,
    #[serde(flatten)]
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub fit: FitOptions,
}

impl ExperimentConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::CodeCapacity(_) => "code-capacity",
            Self::Entropy(_) => "entropy",
            Self::MutualInfo(_) => "mutual-info",
            Self::Spacetime(_) => "spacetime",
        }
    }

    pub fn trials(&self) -> usize {
        match self {
            Self::CodeCapacity(c) => c.trials,
            Self::Entropy(c) => c.trials,
            Self::MutualInfo(c) => c.trials,
            Self::Spacetime(c) => c.trials,
        }
    }

    pub fn set_trials(&mut self, trials: usize) {
        match self {
            Self::CodeCapacity(c) => c.trials = trials,
            Self::Entropy(c) => c.trials = trials,
            Self::MutualInfo(c) => c.trials = trials,
            Self::Spacetime(c) => c.trials = trials,
        }
    }

    pub fn p_grid(&self) -> &[f64] {
        match self {
            Self::CodeCapacity(c) => &c.p_grid,
            Self::Entropy(c) => &c.p_grid,
            Self::MutualInfo(c) => &c.p_grid,
            Self::Spacetime(c) => &c.p_grid,
        }
    }

    /// Depths, or distillation rounds for the entropy experiment.
    pub fn sizes(&self) -> &[usize] {
        match self {
            Self::CodeCapacity(c) => &c.depths,
            Self::Entropy(c) => &c.qs,
            Self::MutualInfo(c) => &c.depths,
            Self::Spacetime(c) => &c.depths,
        }
    }

    fn code_params(&self) -> (usize, f64) {
        match self {
            Self::CodeCapacity(c) => (c.n, c.rate),
            Self::Entropy(c) => (c.n, c.rate),
            Self::MutualInfo(c) => (c.n, c.rate),
            Self::Spacetime(c) => (c.n, c.rate),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, AnalysisError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| AnalysisError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        let bad = |m: String| Err(AnalysisError::Config(m));
        let e = &self.experiment;
        if e.trials() == 0 {
            return bad("trials must be positive".into());
        }
        if self.batches == 0 {
            return bad("batches must be positive".into());
        }
        if e.p_grid().is_empty() {
            return bad("p_grid is empty".into());
        }
        if let Some(p) = e.p_grid().iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("error rate {p} outside [0, 1]"));
        }
        if e.sizes().is_empty() || e.sizes().contains(&0) {
            return bad("sizes must be a non-empty list of positive integers".into());
        }
        let (n, rate) = e.code_params();
        if n < 2 || !(rate > 0.0 && rate < 1.0) {
            return bad(format!("n = {n}, rate = {rate} do not define a code"));
        }
        if let Self { experiment: ExperimentConfig::Entropy(c), .. } = self {
            if c.d == 0 {
                return bad("depth must be positive".into());
            }
        }
        let max_size = e.sizes().iter().copied().max().unwrap_or(0);
        if !matches!(e, ExperimentConfig::CodeCapacity(_)) && max_size > 12 {
            return bad(format!("{max_size} distillation rounds is too many"));
        }
        if let Some(w) = self.fit.window {
            if !(w[0] < w[1]) {
                return bad(format!("fit window {w:?} is empty"));
            }
        }
        if !(self.fit.truncation_factor >= 1.0) {
            return bad("truncation_factor must be at least 1".into());
        }
        Ok(())
    }
}
