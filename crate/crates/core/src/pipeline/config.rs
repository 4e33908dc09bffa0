//! Flat `key = value` batch configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys, with defaults:
//!
//! ```text
//! label_column               = label
//! hierarchy                  = ciciot2023    # or none, or a path to a hierarchy file
//! levels                     = fine34, category8, binary2
//! frameworks                 = ALL+NONE, ALL+ROS, CFS+NONE, CFS+BRFC
//! seed                       = 0             # default for every seed below
//! split.train_fraction       = 0.8
//! split.stratified           = true
//! split.seed                 = <seed>
//! num_bins                   = 10
//! forest.num_trees           = 100
//! forest.max_depth           = none
//! forest.min_samples_leaf    = 1
//! forest.features_per_split  = sqrt          # or all, or a count
//! forest.seed                = <seed>
//! balance.per_class_count    = auto          # BRFC draws per class; auto = minority count
//! balance.seed               = <seed>
//! irm.top_n                  = 25
//! rfe.num_trees              = <forest.num_trees>
//! usc.threshold              = 0.99
//! ```
//!
//! Frameworks are `SELECTOR+BALANCER` pairs. The `ALL+NONE` baseline is
//! always run, since every other framework's gain is measured against it.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::balance::{BalanceMethod, BalanceSpec};
use crate::data::{ClassLevel, LabelHierarchy, SplitSpec, DEFAULT_LABEL_COLUMN};
use crate::error::{Error, Result};
use crate::evaluation::DEFAULT_USC_THRESHOLD;
use crate::forest::{FeaturesPerSplit, ForestConfig};
use crate::selection::{SelectionMethod, DEFAULT_IRM_TOP_N, DEFAULT_NUM_BINS};

use super::framework::{framework_name, FrameworkConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HierarchySource {
    Builtin,
    None,
    File(PathBuf),
}

impl HierarchySource {
    pub fn load(&self) -> Result<Option<LabelHierarchy>> {
        match self {
            HierarchySource::Builtin => Ok(Some(LabelHierarchy::ciciot2023())),
            HierarchySource::None => Ok(None),
            HierarchySource::File(p) => LabelHierarchy::load(p)
                .map(Some)
                .map_err(|e| Error::Config(format!("hierarchy {}: {e}", p.display()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchConfig {
    pub label_column: String,
    pub hierarchy: HierarchySource,
    pub levels: Vec<ClassLevel>,
    pub frameworks: Vec<(SelectionMethod, BalanceMethod)>,
    pub seed: u64,
    pub split_seed: Option<u64>,
    pub train_fraction: f64,
    pub stratified: bool,
    pub num_bins: usize,
    pub num_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub features_per_split: FeaturesPerSplit,
    pub forest_seed: Option<u64>,
    pub per_class_count: Option<usize>,
    pub balance_seed: Option<u64>,
    pub irm_top_n: usize,
    pub rfe_num_trees: Option<usize>,
    pub usc_threshold: f64,
}

impl Default for BatchConfig {
    fn default() -> Self {
        let forest = ForestConfig::default();
        Self {
            label_column: DEFAULT_LABEL_COLUMN.to_string(),
            hierarchy: HierarchySource::Builtin,
            levels: ClassLevel::ALL.to_vec(),
            frameworks: vec![
                (SelectionMethod::All, BalanceMethod::None),
                (SelectionMethod::All, BalanceMethod::Ros),
                (SelectionMethod::Cfs, BalanceMethod::None),
                (SelectionMethod::Cfs, BalanceMethod::Brfc),
            ],
            seed: 0,
            split_seed: None,
            train_fraction: SplitSpec::default().train_fraction,
            stratified: true,
            num_bins: DEFAULT_NUM_BINS,
            num_trees: forest.num_trees,
            max_depth: forest.max_depth,
            min_samples_leaf: forest.min_samples_leaf,
            features_per_split: forest.features_per_split,
            forest_seed: None,
            per_class_count: None,
            balance_seed: None,
            irm_top_n: DEFAULT_IRM_TOP_N,
            rfe_num_trees: None,
            usc_threshold: DEFAULT_USC_THRESHOLD,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{value}'")))
}

fn parse_auto<T: FromStr>(key: &str, value: &str, auto: &str) -> Result<Option<T>> {
    if value.eq_ignore_ascii_case(auto) {
        Ok(None)
    } else {
        parse_num(key, value).map(Some)
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got '{value}'"))),
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

pub fn parse_framework_pair(s: &str) -> Result<(SelectionMethod, BalanceMethod)> {
    let (sel, bal) = s
        .split_once('+')
        .ok_or_else(|| Error::Config(format!("framework '{s}' is not SELECTOR+BALANCER")))?;
    let sel: SelectionMethod = sel.parse()?;
    let bal: BalanceMethod = bal.parse()?;
    if !matches!(sel, SelectionMethod::All | SelectionMethod::Cfs | SelectionMethod::Irm) {
        return Err(Error::Config(format!("framework selector must be ALL, CFS or IRM, got {sel}")));
    }
    Ok((sel, bal))
}

impl BatchConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Applies one key; used for file lines and command-line overrides alike.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "label_column" => self.label_column = value.to_string(),
            "hierarchy" => {
                self.hierarchy = match value {
                    "ciciot2023" | "builtin" => HierarchySource::Builtin,
                    "none" => HierarchySource::None,
                    path => HierarchySource::File(PathBuf::from(path)),
                }
            }
            "levels" => {
                self.levels = list(value).map(str::parse).collect::<Result<_>>()?;
            }
            "frameworks" => {
                self.frameworks = list(value).map(parse_framework_pair).collect::<Result<_>>()?;
            }
            "seed" => self.seed = parse_num(key, value)?,
            "split.seed" => self.split_seed = Some(parse_num(key, value)?),
            "split.train_fraction" => self.train_fraction = parse_num(key, value)?,
            "split.stratified" => self.stratified = parse_bool(key, value)?,
            "num_bins" => self.num_bins = parse_num(key, value)?,
            "forest.num_trees" => self.num_trees = parse_num(key, value)?,
            "forest.max_depth" => self.max_depth = parse_auto(key, value, "none")?,
            "forest.min_samples_leaf" => self.min_samples_leaf = parse_num(key, value)?,
            "forest.features_per_split" => self.features_per_split = value.parse()?,
            "forest.seed" => self.forest_seed = Some(parse_num(key, value)?),
            "balance.per_class_count" => self.per_class_count = parse_auto(key, value, "auto")?,
            "balance.seed" => self.balance_seed = Some(parse_num(key, value)?),
            "irm.top_n" => self.irm_top_n = parse_num(key, value)?,
            "rfe.num_trees" => self.rfe_num_trees = parse_auto(key, value, "auto")?,
            "usc.threshold" => self.usc_threshold = parse_num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Parses a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{assignment}' is not key=value")))?;
        self.set(key.trim(), value.trim())
    }

    /// Framework list with the baseline first, duplicates removed.
    pub fn framework_pairs(&self) -> Vec<(SelectionMethod, BalanceMethod)> {
        let base = (SelectionMethod::All, BalanceMethod::None);
        let mut out = vec![base];
        for &p in &self.frameworks {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    pub fn framework(&self, selector: SelectionMethod, balancer: BalanceMethod, level: ClassLevel) -> FrameworkConfig {
        let forest = ForestConfig {
            num_trees: self.num_trees,
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
            features_per_split: self.features_per_split,
            seed: self.forest_seed.unwrap_or(self.seed),
            ..ForestConfig::default()
        };
        let mut fw = FrameworkConfig {
            name: framework_name(selector, balancer),
            selector,
            balance: BalanceSpec {
                method: balancer,
                seed: self.balance_seed.unwrap_or(self.seed),
                per_class_count: self.per_class_count,
            },
            level,
            forest,
            split: SplitSpec {
                train_fraction: self.train_fraction,
                seed: self.split_seed.unwrap_or(self.seed),
                stratified: self.stratified,
            },
            num_bins: self.num_bins,
            irm_top_n: self.irm_top_n,
            rfe_num_trees: self.rfe_num_trees.unwrap_or(self.num_trees),
            usc_threshold: self.usc_threshold,
        };
        fw.sync_bootstrap();
        fw
    }

    /// All framework configurations in report order: framework-major, then
    /// level in configured order.
    pub fn framework_configs(&self) -> Result<Vec<FrameworkConfig>> {
        if self.levels.is_empty() {
            return Err(Error::Config("no class levels configured".into()));
        }
        let mut out = Vec::new();
        for (sel, bal) in self.framework_pairs() {
            for &level in &self.levels {
                let fw = self.framework(sel, bal, level);
                fw.validate()?;
                out.push(fw);
            }
        }
        Ok(out)
    }
}
