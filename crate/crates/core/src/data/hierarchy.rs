//! Three-level label hierarchy: fine attack labels, attack categories, and
//! the benign/attack binary split.
//!
//! The mapping is loaded from a small text table so it can be edited without
//! rebuilding. The CICIoT2023 table ships with the crate.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::Dataset;
use crate::error::{Error, Result};

pub const BENIGN_LABEL: &str = "benign";
pub const ATTACK_LABEL: &str = "attack";

const CICIOT2023_TABLE: &str = include_str!("../../data/ciciot2023_hierarchy.txt");

/// Granularity at which a dataset is labelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassLevel {
    Fine34,
    Category8,
    Binary2,
}

impl ClassLevel {
    pub const ALL: [ClassLevel; 3] = [ClassLevel::Fine34, ClassLevel::Category8, ClassLevel::Binary2];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLevel::Fine34 => "fine34",
            ClassLevel::Category8 => "category8",
            ClassLevel::Binary2 => "binary2",
        }
    }
}

impl fmt::Display for ClassLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fine34" | "fine" | "34" => Ok(ClassLevel::Fine34),
            "category8" | "category" | "8" => Ok(ClassLevel::Category8),
            "binary2" | "binary" | "2" => Ok(ClassLevel::Binary2),
            other => Err(Error::Config(format!("unknown class level '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelHierarchy {
    fine_labels: Vec<String>,
    categories: Vec<String>,
    fine_to_category: HashMap<String, usize>,
    benign_category: usize,
}

impl LabelHierarchy {
    /// The shipped CICIoT2023 table (34 labels, 8 categories).
    pub fn ciciot2023() -> Self {
        Self::parse(CICIOT2023_TABLE).expect("shipped hierarchy table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut fine_labels = Vec::new();
        let mut categories: Vec<String> = Vec::new();
        let mut fine_to_category = HashMap::new();
        let mut benign: Option<String> = None;

        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                if key.trim() != "benign" {
                    return Err(Error::data(format!(
                        "hierarchy line {}: unknown directive '{}'",
                        n + 1,
                        key.trim()
                    )));
                }
                if benign.replace(value.trim().to_string()).is_some() {
                    return Err(Error::data("hierarchy names the benign category twice"));
                }
                continue;
            }
            let (fine, category) = line.split_once(',').ok_or_else(|| {
                Error::data(format!("hierarchy line {}: expected 'fine,category'", n + 1))
            })?;
            let (fine, category) = (fine.trim(), category.trim());
            if fine.is_empty() || category.is_empty() || category.contains(',') {
                return Err(Error::data(format!("hierarchy line {}: malformed pair", n + 1)));
            }
            let cat_idx = match categories.iter().position(|c| c == category) {
                Some(i) => i,
                None => {
                    categories.push(category.to_string());
                    categories.len() - 1
                }
            };
            if fine_to_category.insert(fine.to_string(), cat_idx).is_some() {
                return Err(Error::data(format!("fine label '{fine}' mapped twice")));
            }
            fine_labels.push(fine.to_string());
        }

        let benign = benign.ok_or_else(|| Error::data("hierarchy lacks a 'benign = ...' line"))?;
        let benign_category = categories
            .iter()
            .position(|c| *c == benign)
            .ok_or_else(|| Error::data(format!("benign category '{benign}' has no fine labels")))?;
        Ok(Self {
            fine_labels,
            categories,
            fine_to_category,
            benign_category,
        })
    }

    /// Fine labels in canonical order.
    pub fn fine_labels(&self) -> &[String] {
        &self.fine_labels
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn benign_category(&self) -> &str {
        &self.categories[self.benign_category]
    }

    pub fn category_of(&self, fine: &str) -> Option<&str> {
        self.fine_to_category
            .get(fine)
            .map(|&c| self.categories[c].as_str())
    }

    pub fn is_benign_category(&self, category: &str) -> bool {
        category == self.benign_category()
    }

    pub fn binary_of(&self, fine: &str) -> Option<&'static str> {
        self.fine_to_category.get(fine).map(|&c| {
            if c == self.benign_category {
                BENIGN_LABEL
            } else {
                ATTACK_LABEL
            }
        })
    }

    /// Target labels of a level in canonical order.
    pub fn level_labels(&self, level: ClassLevel) -> Vec<String> {
        match level {
            ClassLevel::Fine34 => self.fine_labels.clone(),
            ClassLevel::Category8 => self.categories.clone(),
            ClassLevel::Binary2 => vec![BENIGN_LABEL.to_string(), ATTACK_LABEL.to_string()],
        }
    }
}

/// Maps a fine-labelled dataset to the requested level.
///
/// `Fine34` returns the data unchanged. Coarser levels keep only the target
/// labels that actually occur, in canonical order.
pub fn relabel(data: &Dataset, hierarchy: &LabelHierarchy, level: ClassLevel) -> Result<Dataset> {
    let targets = hierarchy.level_labels(level);
    let mut class_map = Vec::with_capacity(data.n_classes());
    for name in data.class_names() {
        let target = match level {
            ClassLevel::Fine34 => hierarchy.category_of(name).map(|_| name.as_str()),
            ClassLevel::Category8 => hierarchy.category_of(name),
            ClassLevel::Binary2 => hierarchy.binary_of(name),
        }
        .ok_or_else(|| Error::UnmappedLabel(name.clone()))?;
        class_map.push(target.to_string());
    }
    if level == ClassLevel::Fine34 {
        return Ok(data.clone());
    }

    let mut present = vec![false; targets.len()];
    let counts = data.class_counts();
    for (c, target) in class_map.iter().enumerate() {
        if counts[c] > 0 {
            let t = targets.iter().position(|x| x == target).expect("target label listed");
            present[t] = true;
        }
    }
    let kept: Vec<String> = targets
        .iter()
        .zip(&present)
        .filter(|(_, &p)| p)
        .map(|(t, _)| t.clone())
        .collect();
    let index_of: HashMap<&str, usize> = kept.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    let labels = data
        .labels()
        .iter()
        .map(|&l| index_of[class_map[l].as_str()])
        .collect();
    Ok(data.with_labels(labels, kept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Matrix;
    use std::collections::BTreeSet;

    fn with_labels(names: &[&str], labels: Vec<usize>) -> Dataset {
        let n = labels.len();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        Dataset::new(
            Matrix::from_rows(&rows).unwrap(),
            labels,
            vec!["x".into()],
            names.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn shipped_table_shape() {
        let h = LabelHierarchy::ciciot2023();
        assert_eq!(h.fine_labels().len(), 34);
        let cats: BTreeSet<&str> = h.categories().iter().map(String::as_str).collect();
        let expected: BTreeSet<&str> = [
            "DoS",
            "DDoS",
            "Web-based",
            "Recon",
            "Spoofing",
            "Mirai",
            "BruteForce",
            "BenignTraffic",
        ]
        .into_iter()
        .collect();
        assert_eq!(cats, expected);
        let benign: Vec<&String> = h
            .categories()
            .iter()
            .filter(|c| h.is_benign_category(c))
            .collect();
        assert_eq!(benign, vec!["BenignTraffic"]);
    }

    #[test]
    fn fine_level_is_identity() {
        let d = with_labels(&["DDoS-ICMP_Flood", "BenignTraffic"], vec![0, 1, 1, 0]);
        assert_eq!(relabel(&d, &LabelHierarchy::ciciot2023(), ClassLevel::Fine34).unwrap(), d);
    }

    #[test]
    fn binary_level() {
        let d = with_labels(&["DDoS-ICMP_Flood", "BenignTraffic"], vec![0, 1]);
        let b = relabel(&d, &LabelHierarchy::ciciot2023(), ClassLevel::Binary2).unwrap();
        let got: Vec<&str> = b.labels().iter().map(|&l| b.class_names()[l].as_str()).collect();
        assert_eq!(got, vec!["attack", "benign"]);
        assert_eq!(b.features(), d.features());
    }

    #[test]
    fn all_fine_labels_give_eight_categories() {
        let h = LabelHierarchy::ciciot2023();
        let names: Vec<&str> = h.fine_labels().iter().map(String::as_str).collect();
        let d = with_labels(&names, (0..34).collect());
        let c = relabel(&d, &h, ClassLevel::Category8).unwrap();
        let distinct: BTreeSet<usize> = c.labels().iter().copied().collect();
        assert_eq!(distinct.len(), 8);
        assert_eq!(c.n_classes(), 8);
        let b = relabel(&d, &h, ClassLevel::Binary2).unwrap();
        assert_eq!(b.class_counts(), vec![1, 33]);
    }

    #[test]
    fn unmapped_label_fails() {
        let d = with_labels(&["NotAnAttack"], vec![0]);
        let err = relabel(&d, &LabelHierarchy::ciciot2023(), ClassLevel::Binary2).unwrap_err();
        assert!(matches!(err, Error::UnmappedLabel(l) if l == "NotAnAttack"));
    }

    #[test]
    fn parse_errors() {
        assert!(LabelHierarchy::parse("a,b\n").is_err());
        assert!(LabelHierarchy::parse("benign = X\na,b\n").is_err());
        assert!(LabelHierarchy::parse("benign = b\na,b\na,c\n").is_err());
        assert!(LabelHierarchy::parse("benign = b\nfoo\n").is_err());
        let h = LabelHierarchy::parse("benign = ok\n# c\nn,ok\nx,bad\n").unwrap();
        assert_eq!(h.binary_of("x"), Some(ATTACK_LABEL));
        assert_eq!(h.binary_of("n"), Some(BENIGN_LABEL));
    }
}
