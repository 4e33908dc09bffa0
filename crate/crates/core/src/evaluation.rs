//! Confusion matrices, classification metrics, unsaturated-class detection
//! and F1-gain analysis.
//!
//! Precision, recall and F1 use a zero-denominator convention of 0, so a
//! class that is never predicted (or never present) scores 0 rather than
//! being undefined. Headline precision/recall/F1 are macro averages.

use crate::error::{Error, Result};

/// Classes whose baseline F1 is strictly below this are unsaturated.
pub const DEFAULT_USC_THRESHOLD: f64 = 0.99;

/// Rows are true classes, columns are predicted classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
    class_names: Vec<String>,
}

fn default_names(m: usize) -> Vec<String> {
    (0..m).map(|c| c.to_string()).collect()
}

impl ConfusionMatrix {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let m = counts.len();
        if counts.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("confusion matrix must be square"));
        }
        Ok(Self {
            counts,
            class_names: default_names(m),
        })
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_classes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_classes(),
                actual: names.len(),
            });
        }
        self.class_names = names;
        Ok(self)
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|c| self.counts[c][c]).sum()
    }

    pub fn row_sum(&self, c: usize) -> u64 {
        self.counts[c].iter().sum()
    }

    pub fn col_sum(&self, c: usize) -> u64 {
        self.counts.iter().map(|r| r[c]).sum()
    }
}

pub fn confusion_matrix(y_true: &[usize], y_pred: &[usize], m: usize) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            actual: y_pred.len(),
        });
    }
    let mut counts = vec![vec![0u64; m]; m];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= m || p >= m {
            return Err(Error::invalid(format!(
                "label {} out of range for {m} classes",
                t.max(p)
            )));
        }
        counts[t][p] += 1;
    }
    ConfusionMatrix::from_counts(counts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
    pub kappa: f64,
}

impl MetricsReport {
    pub fn n_classes(&self) -> usize {
        self.per_class.len()
    }

    pub fn class_names(&self) -> Vec<&str> {
        self.per_class.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn f1(&self, class: usize) -> f64 {
        self.per_class[class].f1
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn harmonic_f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    let m = cm.n_classes();
    if total == 0 || m == 0 {
        return Err(Error::invalid("cannot compute metrics from an empty confusion matrix"));
    }
    let per_class: Vec<ClassMetrics> = (0..m)
        .map(|c| {
            let tp = cm.get(c, c);
            let precision = ratio(tp, cm.col_sum(c));
            let recall = ratio(tp, cm.row_sum(c));
            ClassMetrics {
                name: cm.class_names()[c].clone(),
                precision,
                recall,
                f1: harmonic_f1(precision, recall),
                support: cm.row_sum(c),
            }
        })
        .collect();
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / m as f64;

    let t = total as f64;
    let p_o = cm.trace() as f64 / t;
    let p_e = (0..m)
        .map(|c| cm.row_sum(c) as f64 * cm.col_sum(c) as f64)
        .sum::<f64>()
        / (t * t);
    let kappa = if p_e >= 1.0 { 1.0 } else { (p_o - p_e) / (1.0 - p_e) };

    Ok(MetricsReport {
        macro_precision: mean(|c| c.precision),
        macro_recall: mean(|c| c.recall),
        macro_f1: mean(|c| c.f1),
        accuracy: p_o,
        kappa,
        per_class,
    })
}

/// Indices of classes whose F1 is strictly below `threshold`.
pub fn identify_usc(baseline: &MetricsReport, threshold: f64) -> Vec<usize> {
    baseline
        .per_class
        .iter()
        .enumerate()
        .filter(|(_, c)| c.f1 < threshold)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainReport {
    pub usc_classes: Vec<usize>,
    pub usc_names: Vec<String>,
    /// Percentage points of F1, aligned with `usc_classes`.
    pub per_class_gain: Vec<f64>,
    /// Unweighted mean of `per_class_gain`; 0 when there are no USC classes.
    pub average_gain: f64,
}

pub fn f1_gain(baseline: &MetricsReport, candidate: &MetricsReport, usc: &[usize]) -> Result<GainReport> {
    if baseline.class_names() != candidate.class_names() {
        return Err(Error::invalid("baseline and candidate reports cover different classes"));
    }
    if let Some(&bad) = usc.iter().find(|&&c| c >= baseline.n_classes()) {
        return Err(Error::invalid(format!("USC class index {bad} out of range")));
    }
    let per_class_gain: Vec<f64> = usc
        .iter()
        .map(|&c| (candidate.f1(c) - baseline.f1(c)) * 100.0)
        .collect();
    let average_gain = if per_class_gain.is_empty() {
        0.0
    } else {
        per_class_gain.iter().sum::<f64>() / per_class_gain.len() as f64
    };
    Ok(GainReport {
        usc_classes: usc.to_vec(),
        usc_names: usc.iter().map(|&c| baseline.per_class[c].name.clone()).collect(),
        per_class_gain,
        average_gain,
    })
}
