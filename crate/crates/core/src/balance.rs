//! Training-set rebalancing: random oversampling and balanced bootstrap draws.
//!
//! Both operations only ever see the training partition.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BalanceMethod {
    None,
    /// Random oversampling up to the majority-class count.
    Ros,
    /// Balanced random forest: every tree sees a class-balanced bootstrap.
    Brfc,
}

impl BalanceMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BalanceMethod::None => "NONE",
            BalanceMethod::Ros => "ROS",
            BalanceMethod::Brfc => "BRFC",
        }
    }
}

impl fmt::Display for BalanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BalanceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NONE" => Ok(BalanceMethod::None),
            "ROS" => Ok(BalanceMethod::Ros),
            "BRFC" => Ok(BalanceMethod::Brfc),
            other => Err(Error::Config(format!("unknown balancer '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BalanceSpec {
    pub method: BalanceMethod,
    pub seed: u64,
    /// Per-class sample count `N_L` for BRFC; `None` means the minority count.
    pub per_class_count: Option<usize>,
}

impl BalanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.per_class_count == Some(0) {
            return Err(Error::invalid("per_class_count must be at least 1"));
        }
        Ok(())
    }
}

fn nonempty_class_rows(train: &Dataset) -> Result<Vec<Vec<usize>>> {
    let groups = train.class_rows();
    if let Some(c) = groups.iter().position(Vec::is_empty) {
        return Err(Error::EmptyClass(train.class_names()[c].clone()));
    }
    Ok(groups)
}

/// Duplicates random same-class rows until every class matches the
/// majority count. Original rows come first, in their original order.
pub fn random_oversample(train: &Dataset, seed: u64) -> Result<Dataset> {
    let groups = nonempty_class_rows(train)?;
    let target = groups.iter().map(Vec::len).max().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<usize> = (0..train.n_samples()).collect();
    for group in &groups {
        for _ in group.len()..target {
            rows.push(group[rng.random_range(0..group.len())]);
        }
    }
    Ok(train.select_rows(&rows))
}

/// Draws `per_class` indices with replacement from every class, class by class.
pub(crate) fn balanced_draw<R: Rng>(groups: &[Vec<usize>], per_class: usize, rng: &mut R) -> Vec<usize> {
    let mut out = Vec::with_capacity(groups.len() * per_class);
    for group in groups {
        for _ in 0..per_class {
            out.push(group[rng.random_range(0..group.len())]);
        }
    }
    out
}

/// Returns `N_c · N_L` row indices: `N_L` drawn uniformly with replacement
/// from each class, grouped by class index.
pub fn balanced_bootstrap(train: &Dataset, per_class_count: usize, seed: u64) -> Result<Vec<usize>> {
    if per_class_count == 0 {
        return Err(Error::invalid("per_class_count must be at least 1"));
    }
    let groups = nonempty_class_rows(train)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(balanced_draw(&groups, per_class_count, &mut rng))
}

/// Smallest class count, used as the default `N_L` for balanced bootstraps.
pub fn minority_count(train: &Dataset) -> Result<usize> {
    let groups = nonempty_class_rows(train)?;
    Ok(groups.iter().map(Vec::len).min().unwrap_or(0))
}
