use std::collections::HashSet;

use super::Matrix;
use crate::error::{Error, Result};

/// Labelled feature matrix: one row per flow, one label per row.
///
/// Labels are indices into `class_names`. A class may have zero rows (for
/// example when a canonical class table is supplied at load time).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Matrix,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::data(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if feature_names.len() != features.ncols() {
            return Err(Error::data(format!(
                "{} feature columns but {} feature names",
                features.ncols(),
                feature_names.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::data(format!("duplicate feature name '{name}'")));
            }
        }
        let mut seen = HashSet::new();
        for name in &class_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::data(format!("duplicate class name '{name}'")));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::data(format!(
                "label index {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        Ok(Self {
            features,
            labels,
            feature_names,
            class_names,
        })
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.features.column(j)
    }

    /// Per-class row counts, indexed by class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Row indices grouped by class.
    pub fn class_rows(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.n_classes()];
        for (i, &l) in self.labels.iter().enumerate() {
            groups[l].push(i);
        }
        groups
    }

    /// Subset of rows in the given order; repeated indices duplicate rows.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn select_features(&self, indices: &[usize]) -> Result<Dataset> {
        if let Some(&bad) = indices.iter().find(|&&j| j >= self.n_features()) {
            return Err(Error::invalid(format!(
                "feature index {bad} out of range for {} features",
                self.n_features()
            )));
        }
        Dataset::new(
            self.features.select_columns(indices),
            self.labels.clone(),
            indices.iter().map(|&j| self.feature_names[j].clone()).collect(),
            self.class_names.clone(),
        )
    }

    pub(crate) fn with_features(&self, features: Matrix) -> Dataset {
        debug_assert_eq!(features.nrows(), self.n_samples());
        debug_assert_eq!(features.ncols(), self.n_features());
        Dataset {
            features,
            labels: self.labels.clone(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    pub(crate) fn with_labels(&self, labels: Vec<usize>, class_names: Vec<String>) -> Dataset {
        Dataset {
            features: self.features.clone(),
            labels,
            feature_names: self.feature_names.clone(),
            class_names,
        }
    }
}
