//! Feature selection: CFS subset search, mRMR and RFE rankings, and their
//! intersection (IRM).

mod association;
mod cfs;
mod info;
mod irm;
mod mrmr;
mod rfe;

use std::fmt;
use std::str::FromStr;

pub use association::{build_association_matrix, AssociationMatrix};
pub use cfs::{cfs_merit, cfs_search, cfs_select, CFS_PATIENCE};
pub use info::{discretize, entropy, mutual_information, symmetrical_uncertainty};
pub use irm::{irm_select, IrmSelection, DEFAULT_IRM_TOP_N};
pub use mrmr::mrmr_rank;
pub use rfe::rfe_rank;

use crate::error::{Error, Result};

pub const DEFAULT_NUM_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionMethod {
    All,
    Cfs,
    Mrmr,
    Rfe,
    Irm,
}

impl SelectionMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionMethod::All => "ALL",
            SelectionMethod::Cfs => "CFS",
            SelectionMethod::Mrmr => "MRMR",
            SelectionMethod::Rfe => "RFE",
            SelectionMethod::Irm => "IRM",
        }
    }
}

impl fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SelectionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ALL" => Ok(SelectionMethod::All),
            "CFS" => Ok(SelectionMethod::Cfs),
            "MRMR" => Ok(SelectionMethod::Mrmr),
            "RFE" => Ok(SelectionMethod::Rfe),
            "IRM" | "RF_MRMR" => Ok(SelectionMethod::Irm),
            other => Err(Error::Config(format!("unknown selection method '{other}'"))),
        }
    }
}

/// Ordered, distinct feature indices chosen by one selection method.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSubset {
    indices: Vec<usize>,
    method: SelectionMethod,
    scores: Option<Vec<f64>>,
}

impl FeatureSubset {
    pub fn new(
        indices: Vec<usize>,
        method: SelectionMethod,
        scores: Option<Vec<f64>>,
        n_features: usize,
    ) -> Result<Self> {
        let mut seen = vec![false; n_features];
        for &j in &indices {
            if j >= n_features {
                return Err(Error::invalid(format!(
                    "feature index {j} out of range for {n_features} features"
                )));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::invalid(format!("feature index {j} repeated")));
            }
        }
        if let Some(s) = &scores {
            if s.len() != indices.len() {
                return Err(Error::invalid("scores and indices differ in length"));
            }
        }
        Ok(Self {
            indices,
            method,
            scores,
        })
    }

    pub fn all(n_features: usize) -> Self {
        Self {
            indices: (0..n_features).collect(),
            method: SelectionMethod::All,
            scores: None,
        }
    }

    pub(crate) fn empty(method: SelectionMethod) -> Self {
        Self {
            indices: Vec::new(),
            method,
            scores: None,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn method(&self) -> SelectionMethod {
        self.method
    }

    pub fn scores(&self) -> Option<&[f64]> {
        self.scores.as_deref()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Text form: a `method <TAG>` line, then one tab-separated
    /// `index, name, score` line per feature in selection order (`-` marks a
    /// missing score).
    pub fn to_text(&self, feature_names: &[String]) -> String {
        let mut out = format!("method\t{}\n", self.method);
        for (pos, &j) in self.indices.iter().enumerate() {
            let score = self
                .scores
                .as_ref()
                .map_or_else(|| "-".to_string(), |s| s[pos].to_string());
            out.push_str(&format!("{j}\t{}\t{score}\n", feature_names[j]));
        }
        out
    }

    /// Parses [`FeatureSubset::to_text`] output, checking names against the
    /// given feature table.
    pub fn from_text(text: &str, feature_names: &[String]) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let method = lines
            .next()
            .and_then(|l| l.strip_prefix("method\t"))
            .ok_or_else(|| Error::data("subset file must start with 'method<TAB>TAG'"))?
            .parse()?;
        let mut indices = Vec::new();
        let mut scores = Vec::new();
        let mut any_missing = false;
        for line in lines {
            let parts: Vec<&str> = line.split('\t').collect();
            let [idx, name, score] = parts[..] else {
                return Err(Error::data(format!("malformed subset line '{line}'")));
            };
            let j: usize = idx
                .parse()
                .map_err(|_| Error::data(format!("bad feature index '{idx}'")))?;
            if feature_names.get(j).map(String::as_str) != Some(name) {
                return Err(Error::data(format!("feature {j} is not named '{name}'")));
            }
            indices.push(j);
            if score == "-" {
                any_missing = true;
            } else {
                scores.push(
                    score
                        .parse::<f64>()
                        .map_err(|_| Error::data(format!("bad score '{score}'")))?,
                );
            }
        }
        let scores = if any_missing {
            if !scores.is_empty() {
                return Err(Error::data("scores must be given for all features or none"));
            }
            None
        } else {
            Some(scores)
        };
        FeatureSubset::new(indices, method, scores, feature_names.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FeatureSubset::new(vec![0, 0], SelectionMethod::Cfs, None, 3).is_err());
        assert!(FeatureSubset::new(vec![3], SelectionMethod::Cfs, None, 3).is_err());
        assert!(FeatureSubset::new(vec![1], SelectionMethod::Cfs, Some(vec![]), 3).is_err());
        assert_eq!(FeatureSubset::all(3).indices(), &[0, 1, 2]);
    }

    #[test]
    fn text_round_trip() {
        let names: Vec<String> = vec!["a".into(), "Protocol Type".into(), "c".into()];
        let s = FeatureSubset::new(vec![2, 1], SelectionMethod::Mrmr, Some(vec![0.5, -0.125]), 3).unwrap();
        let text = s.to_text(&names);
        assert_eq!(text, "method\tMRMR\n2\tc\t0.5\n1\tProtocol Type\t-0.125\n");
        assert_eq!(FeatureSubset::from_text(&text, &names).unwrap(), s);
        let unscored = FeatureSubset::new(vec![0], SelectionMethod::Irm, None, 3).unwrap();
        assert_eq!(FeatureSubset::from_text(&unscored.to_text(&names), &names).unwrap(), unscored);
        assert!(FeatureSubset::from_text("method\tCFS\n0\twrong\t1\n", &names).is_err());
    }
}
