use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Number of candidate features drawn at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeaturesPerSplit {
    /// `floor(sqrt(k))`, at least 1.
    Sqrt,
    All,
    Count(usize),
}

impl FeaturesPerSplit {
    pub fn resolve(self, k: usize) -> usize {
        match self {
            FeaturesPerSplit::Sqrt => ((k as f64).sqrt().floor() as usize).max(1),
            FeaturesPerSplit::All => k,
            FeaturesPerSplit::Count(n) => n.min(k),
        }
        .min(k)
    }
}

impl fmt::Display for FeaturesPerSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeaturesPerSplit::Sqrt => f.write_str("sqrt"),
            FeaturesPerSplit::All => f.write_str("all"),
            FeaturesPerSplit::Count(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for FeaturesPerSplit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sqrt" => Ok(FeaturesPerSplit::Sqrt),
            "all" => Ok(FeaturesPerSplit::All),
            n => n
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .map(FeaturesPerSplit::Count)
                .ok_or_else(|| Error::Config(format!("invalid features_per_split '{n}'"))),
        }
    }
}

/// How each tree's training sample is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BootstrapMode {
    /// N draws with replacement.
    Standard,
    /// `per_class` draws with replacement from every class; `None` uses the
    /// minority-class count.
    Balanced { per_class: Option<usize> },
    /// Every tree sees the full training set once.
    Disabled,
}

impl fmt::Display for BootstrapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BootstrapMode::Standard => f.write_str("standard"),
            BootstrapMode::Balanced { per_class: None } => f.write_str("balanced"),
            BootstrapMode::Balanced { per_class: Some(n) } => write!(f, "balanced:{n}"),
            BootstrapMode::Disabled => f.write_str("none"),
        }
    }
}

impl FromStr for BootstrapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "standard" => Ok(BootstrapMode::Standard),
            "balanced" => Ok(BootstrapMode::Balanced { per_class: None }),
            "none" => Ok(BootstrapMode::Disabled),
            _ => s
                .strip_prefix("balanced:")
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n > 0)
                .map(|n| BootstrapMode::Balanced { per_class: Some(n) })
                .ok_or_else(|| Error::Config(format!("invalid bootstrap mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestConfig {
    pub num_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub features_per_split: FeaturesPerSplit,
    pub bootstrap: BootstrapMode,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            num_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: FeaturesPerSplit::Sqrt,
            bootstrap: BootstrapMode::Standard,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.num_trees == 0 {
            return Err(Error::invalid("num_trees must be at least 1"));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::invalid("min_samples_leaf must be at least 1"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::invalid("max_depth must be positive when set"));
        }
        if let FeaturesPerSplit::Count(n) = self.features_per_split {
            if n == 0 || n > n_features {
                return Err(Error::invalid(format!(
                    "features_per_split {n} outside 1..={n_features}"
                )));
            }
        }
        if let BootstrapMode::Balanced { per_class: Some(0) } = self.bootstrap {
            return Err(Error::invalid("balanced per-class count must be at least 1"));
        }
        Ok(())
    }
}
