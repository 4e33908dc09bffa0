//! Correlation-based feature subset selection with best-first search.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::association::{build_association_matrix, AssociationMatrix};
use super::{FeatureSubset, SelectionMethod};
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Consecutive non-improving expansions before best-first search stops.
pub const CFS_PATIENCE: usize = 5;

/// Subset merit: `s·r̄_cf / sqrt(s + s(s−1)·r̄_ff)`.
pub fn cfs_merit(subset: &[usize], assoc: &AssociationMatrix) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::invalid("merit of an empty subset is undefined"));
    }
    let k = assoc.n_features();
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != subset.len() {
        return Err(Error::invalid("subset contains repeated features"));
    }
    if let Some(&bad) = sorted.iter().find(|&&j| j >= k) {
        return Err(Error::invalid(format!("feature index {bad} out of range")));
    }
    Ok(merit_sorted(&sorted, assoc))
}

/// Merit of a sorted, distinct, in-range subset.
fn merit_sorted(subset: &[usize], assoc: &AssociationMatrix) -> f64 {
    let s = subset.len() as f64;
    let sum_cf: f64 = subset.iter().map(|&j| assoc.feature_class(j)).sum();
    if sum_cf <= 0.0 {
        return 0.0;
    }
    let mut sum_ff = 0.0;
    for (a, &i) in subset.iter().enumerate() {
        for &j in &subset[a + 1..] {
            sum_ff += assoc.feature_feature(i, j);
        }
    }
    // s·mean_cf = sum_cf; s(s−1)·mean_ff = 2·sum_ff over unordered pairs.
    sum_cf / (s + 2.0 * sum_ff).sqrt()
}

#[derive(Debug, Clone)]
struct Candidate {
    merit: f64,
    subset: Vec<usize>,
}

impl Candidate {
    /// Higher merit, then fewer features, then lexicographically smaller.
    fn rank(&self, other: &Self) -> Ordering {
        self.merit
            .total_cmp(&other.merit)
            .then_with(|| other.subset.len().cmp(&self.subset.len()))
            .then_with(|| other.subset.cmp(&self.subset))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.rank(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank(other)
    }
}

/// Best-first forward search over an association matrix.
pub fn cfs_search(assoc: &AssociationMatrix) -> FeatureSubset {
    let k = assoc.n_features();
    let mut open = BinaryHeap::new();
    let mut visited: HashSet<Vec<usize>> = HashSet::new();
    open.push(Candidate {
        merit: 0.0,
        subset: Vec::new(),
    });
    visited.insert(Vec::new());

    let mut best: Option<Candidate> = None;
    let mut stale = 0;
    while let Some(node) = open.pop() {
        let mut improved = false;
        for j in 0..k {
            if node.subset.binary_search(&j).is_ok() {
                continue;
            }
            let mut child = node.subset.clone();
            let pos = child.partition_point(|&x| x < j);
            child.insert(pos, j);
            if !visited.insert(child.clone()) {
                continue;
            }
            let cand = Candidate {
                merit: merit_sorted(&child, assoc),
                subset: child,
            };
            match &best {
                None => {
                    improved = true;
                    best = Some(cand.clone());
                }
                Some(b) => {
                    if cand.merit > b.merit {
                        improved = true;
                    }
                    if cand > *b {
                        best = Some(cand.clone());
                    }
                }
            }
            open.push(cand);
        }
        if improved {
            stale = 0;
        } else {
            stale += 1;
            if stale >= CFS_PATIENCE {
                break;
            }
        }
    }

    match best {
        Some(b) => {
            let scores = b.subset.iter().map(|&j| assoc.feature_class(j)).collect();
            FeatureSubset::new(b.subset, SelectionMethod::Cfs, Some(scores), k)
                .expect("search yields distinct in-range indices")
        }
        None => FeatureSubset::empty(SelectionMethod::Cfs),
    }
}

/// Returns the best-merit subset; per-feature scores are the feature-class
/// associations of the chosen features.
pub fn cfs_select(data: &Dataset, num_bins: usize) -> Result<FeatureSubset> {
    if data.n_features() == 0 {
        return Err(Error::invalid("cfs needs at least one feature"));
    }
    let assoc = build_association_matrix(data, num_bins)?;
    Ok(cfs_search(&assoc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Matrix;

    fn pair_assoc(rcf: [f64; 2], rff: f64) -> AssociationMatrix {
        AssociationMatrix::from_parts(rcf.to_vec(), vec![vec![1.0, rff], vec![rff, 1.0]]).unwrap()
    }

    #[test]
    fn singleton_merit_is_rcf() {
        let a = pair_assoc([0.3, 0.7], 0.2);
        assert_eq!(cfs_merit(&[1], &a).unwrap(), 0.7);
    }

    #[test]
    fn pair_merits_by_hand() {
        let redundant = pair_assoc([0.8, 0.8], 1.0);
        assert!((cfs_merit(&[0, 1], &redundant).unwrap() - 0.8).abs() < 1e-12);
        let independent = pair_assoc([0.8, 0.8], 0.0);
        let m = cfs_merit(&[0, 1], &independent).unwrap();
        assert!((m - 1.6 / 2f64.sqrt()).abs() < 1e-12);
        assert!((m - 1.1314).abs() < 1e-4);
    }

    #[test]
    fn merit_errors_and_zero_relevance() {
        let a = pair_assoc([0.0, 0.0], 0.5);
        assert!(cfs_merit(&[], &a).is_err());
        assert!(cfs_merit(&[0, 0], &a).is_err());
        assert!(cfs_merit(&[2], &a).is_err());
        assert_eq!(cfs_merit(&[0, 1], &a).unwrap(), 0.0);
    }

    #[test]
    fn merit_permutation_invariant() {
        let a = AssociationMatrix::from_parts(
            vec![0.2, 0.5, 0.9],
            vec![vec![1.0, 0.1, 0.3], vec![0.1, 1.0, 0.6], vec![0.3, 0.6, 1.0]],
        )
        .unwrap();
        let base = cfs_merit(&[0, 1, 2], &a).unwrap();
        for p in [[2, 1, 0], [1, 0, 2], [2, 0, 1]] {
            assert_eq!(cfs_merit(&p, &a).unwrap(), base);
        }
    }

    fn dataset(cols: &[Vec<f64>], labels: Vec<usize>) -> Dataset {
        let n = labels.len();
        let rows: Vec<Vec<f64>> = (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        Dataset::new(
            Matrix::from_rows(&rows).unwrap(),
            labels,
            (0..cols.len()).map(|j| format!("f{j}")).collect(),
            vec!["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn dominant_predictor_selected_alone() {
        let labels: Vec<usize> = (0..40).map(|i| (i * 7 % 3 == 0) as usize).collect();
        let signal: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
        let n1: Vec<f64> = (0..40).map(|i| ((i * 37) % 11) as f64).collect();
        let n2: Vec<f64> = (0..40).map(|i| ((i * 13) % 7) as f64).collect();
        let d = dataset(&[n1, signal, n2], labels);
        let s = cfs_select(&d, 10).unwrap();
        assert_eq!(s.indices(), &[1]);
        assert_eq!(s.method(), SelectionMethod::Cfs);
    }

    #[test]
    fn duplicated_predictors_keep_one() {
        let labels: Vec<usize> = (0..30).map(|i| i % 2).collect();
        let signal: Vec<f64> = labels.iter().map(|&l| l as f64 * 3.0).collect();
        let noise: Vec<f64> = (0..30).map(|i| ((i * 17) % 5) as f64).collect();
        let d = dataset(&[signal.clone(), noise, signal], labels);
        let assoc = build_association_matrix(&d, 10).unwrap();
        // Two perfect duplicates tie with one copy: 2 / sqrt(2 + 2) = 1.
        let single = cfs_merit(&[0], &assoc).unwrap();
        let pair = cfs_merit(&[0, 2], &assoc).unwrap();
        assert!((pair - single).abs() < 1e-12);
        // The tie goes to the smaller subset, then the lower index.
        assert_eq!(cfs_search(&assoc).indices(), &[0]);
    }

    #[test]
    fn all_zero_relevance_returns_first_singleton() {
        let a = AssociationMatrix::from_parts(vec![0.0; 3], vec![vec![0.0; 3]; 3]).unwrap();
        assert_eq!(cfs_search(&a).indices(), &[0]);
    }
}
