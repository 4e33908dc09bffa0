//! CART classification trees with Gini splits on numeric features.

use rand::seq::index::sample;
use rand::Rng;

use crate::data::Matrix;
use crate::error::{Error, Result};

/// Splits must improve Gini impurity by more than this to be kept.
const MIN_GAIN: f64 = 1e-12;

pub fn gini_impurity(class_counts: &[u64]) -> Result<f64> {
    let total: u64 = class_counts.iter().sum();
    if total == 0 {
        return Err(Error::invalid("gini impurity of an empty node"));
    }
    Ok(gini_of(class_counts, total))
}

fn gini_of(counts: &[u64], total: u64) -> f64 {
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Node of a flat tree. Children are indices into the owning tree's node array.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class_counts: Vec<u64>,
    },
}

/// Flat array of nodes; the root is node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

/// Majority class of a count vector, ties to the lower class index.
pub(crate) fn majority(counts: &[u64]) -> usize {
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = c;
        }
    }
    best
}

impl Tree {
    pub fn from_nodes(nodes: Vec<TreeNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("a tree needs at least one node"));
        }
        for (i, node) in nodes.iter().enumerate() {
            if let TreeNode::Internal { left, right, .. } = *node {
                // Children always follow their parent, which rules out cycles.
                if left <= i || right <= i || left >= nodes.len() || right >= nodes.len() {
                    return Err(Error::invalid(format!("node {i} has invalid child offsets")));
                }
            }
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[*feature] <= *threshold { *left } else { *right },
                TreeNode::Leaf { .. } => return i,
            }
        }
    }

    pub fn leaf_counts(&self, row: &[f64]) -> &[u64] {
        match &self.nodes[self.leaf_index(row)] {
            TreeNode::Leaf { class_counts } => class_counts,
            TreeNode::Internal { .. } => unreachable!("leaf_index stops at a leaf"),
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> usize {
        majority(self.leaf_counts(row))
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Internal { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
                TreeNode::Leaf { .. } => 0,
            }
        }
        go(&self.nodes, 0)
    }
}

/// Best Gini split of `rows` over `candidate_features`.
///
/// Thresholds are midpoints between consecutive distinct values; rows with
/// `value <= threshold` go left. Both sides must keep `min_samples_leaf`
/// rows. Ties go to the lower feature index, then the lower threshold.
pub fn best_split(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    rows: &[usize],
    candidate_features: &[usize],
    min_samples_leaf: usize,
) -> Option<Split> {
    if rows.is_empty() {
        return None;
    }
    let mut parent = vec![0u64; n_classes];
    for &r in rows {
        parent[y[r]] += 1;
    }
    let n = rows.len();
    let parent_gini = gini_of(&parent, n as u64);
    if parent_gini <= 0.0 {
        return None;
    }
    let parent_sq: f64 = parent.iter().map(|&c| (c as f64).powi(2)).sum();

    let mut features = candidate_features.to_vec();
    features.sort_unstable();
    let msl = min_samples_leaf.max(1);
    let mut best: Option<Split> = None;
    let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut left = vec![0u64; n_classes];

    for &f in &features {
        sorted.clear();
        sorted.extend(rows.iter().map(|&r| (x.get(r, f), y[r])));
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if sorted[0].0 == sorted[n - 1].0 {
            continue;
        }
        left.iter_mut().for_each(|c| *c = 0);
        let mut left_sq = 0.0;
        let mut right_sq = parent_sq;
        for i in 0..n - 1 {
            let c = sorted[i].1;
            let l = left[c] as f64;
            let r = (parent[c] - left[c]) as f64;
            left_sq += 2.0 * l + 1.0;
            right_sq -= 2.0 * r - 1.0;
            left[c] += 1;

            let (v, next) = (sorted[i].0, sorted[i + 1].0);
            if v == next {
                continue;
            }
            let nl = i + 1;
            let nr = n - nl;
            if nl < msl || nr < msl {
                continue;
            }
            let weighted_child = (n as f64 - left_sq / nl as f64 - right_sq / nr as f64) / n as f64;
            let gain = parent_gini - weighted_child;
            if gain > MIN_GAIN && best.is_none_or(|b| gain > b.gain) {
                let mut threshold = v + (next - v) / 2.0;
                if threshold >= next {
                    threshold = v;
                }
                best = Some(Split {
                    feature: f,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub features_per_split: usize,
}

pub(crate) struct GrownTree {
    pub tree: Tree,
    /// Unnormalized weighted impurity decrease per feature.
    pub importance: Vec<f64>,
}

/// Grows a tree on `rows` (repeats allowed) of `x`.
pub(crate) fn grow_tree<R: Rng>(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    rows: Vec<usize>,
    params: TreeParams,
    rng: &mut R,
) -> GrownTree {
    let k = x.ncols();
    let total = rows.len().max(1) as f64;
    let mut importance = vec![0.0; k];
    let mut nodes: Vec<TreeNode> = Vec::new();
    // (rows, depth, slot) work items; the slot is pre-allocated in `nodes`.
    nodes.push(TreeNode::Leaf {
        class_counts: Vec::new(),
    });
    let mut stack = vec![(rows, 0usize, 0usize)];
    let mtry = params.features_per_split.clamp(1, k.max(1));

    while let Some((rows, depth, slot)) = stack.pop() {
        let mut counts = vec![0u64; n_classes];
        for &r in &rows {
            counts[y[r]] += 1;
        }
        let can_split = k > 0
            && rows.len() >= 2 * params.min_samples_leaf.max(1)
            && params.max_depth.is_none_or(|d| depth < d)
            && counts.iter().filter(|&&c| c > 0).count() > 1;
        let split = if can_split {
            let mut features = sample(rng, k, mtry).into_vec();
            features.sort_unstable();
            best_split(x, y, n_classes, &rows, &features, params.min_samples_leaf)
        } else {
            None
        };
        match split {
            None => nodes[slot] = TreeNode::Leaf { class_counts: counts },
            Some(s) => {
                importance[s.feature] += rows.len() as f64 / total * s.gain;
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
                    rows.into_iter().partition(|&r| x.get(r, s.feature) <= s.threshold);
                let left = nodes.len();
                let right = left + 1;
                let placeholder = TreeNode::Leaf {
                    class_counts: Vec::new(),
                };
                nodes.push(placeholder.clone());
                nodes.push(placeholder);
                nodes[slot] = TreeNode::Internal {
                    feature: s.feature,
                    threshold: s.threshold,
                    left,
                    right,
                };
                stack.push((right_rows, depth + 1, right));
                stack.push((left_rows, depth + 1, left));
            }
        }
    }
    GrownTree {
        tree: Tree { nodes },
        importance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gini_values() {
        assert_eq!(gini_impurity(&[10, 0]).unwrap(), 0.0);
        assert_eq!(gini_impurity(&[5, 5]).unwrap(), 0.5);
        assert!((gini_impurity(&[1, 2, 3]).unwrap() - (1.0 - 14.0 / 36.0)).abs() < 1e-12);
        assert!((gini_impurity(&[1, 2, 3]).unwrap() - 0.6111).abs() < 1e-4);
        assert!(gini_impurity(&[0, 0]).is_err());
    }

    #[test]
    fn perfect_split_gain_equals_parent_impurity() {
        let x = Matrix::from_rows(&[[0.0, 5.0], [1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]).unwrap();
        let y = [0, 0, 1, 1];
        let s = best_split(&x, &y, 2, &[0, 1, 2, 3], &[0, 1], 1).unwrap();
        assert_eq!(s.feature, 0);
        assert_eq!(s.threshold, 1.5);
        assert!((s.gain - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identical_rows_unsplittable() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]]).unwrap();
        assert!(best_split(&x, &[0, 1, 0], 2, &[0, 1, 2], &[0, 1], 1).is_none());
    }

    fn exhaustive_split(x: &Matrix, y: &[usize], m: usize, rows: &[usize]) -> Option<Split> {
        let gini = |idx: &[usize]| {
            let mut c = vec![0.0; m];
            for &r in idx {
                c[y[r]] += 1.0;
            }
            let n = idx.len() as f64;
            1.0 - c.iter().map(|v: &f64| (v / n).powi(2)).sum::<f64>()
        };
        let parent = gini(rows);
        let mut best: Option<Split> = None;
        for f in 0..x.ncols() {
            let mut vals: Vec<f64> = rows.iter().map(|&r| x.get(r, f)).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            for w in vals.windows(2) {
                let t = (w[0] + w[1]) / 2.0;
                let l: Vec<usize> = rows.iter().copied().filter(|&r| x.get(r, f) <= t).collect();
                let r: Vec<usize> = rows.iter().copied().filter(|&r| x.get(r, f) > t).collect();
                let n = rows.len() as f64;
                let gain = parent - l.len() as f64 / n * gini(&l) - r.len() as f64 / n * gini(&r);
                if gain > 1e-12 && best.is_none_or(|b| gain > b.gain + 1e-12) {
                    best = Some(Split {
                        feature: f,
                        threshold: t,
                        gain,
                    });
                }
            }
        }
        best
    }

    #[test]
    fn six_row_fixture_matches_exhaustive_scan() {
        let x = Matrix::from_rows(&[
            [1.0, 7.0],
            [2.0, 3.0],
            [3.0, 8.0],
            [4.0, 1.0],
            [5.0, 9.0],
            [6.0, 2.0],
        ])
        .unwrap();
        let y = [0, 1, 0, 1, 0, 1];
        let rows: Vec<usize> = (0..6).collect();
        let fast = best_split(&x, &y, 2, &rows, &[0, 1], 1).unwrap();
        let slow = exhaustive_split(&x, &y, 2, &rows).unwrap();
        assert_eq!(fast.feature, slow.feature);
        assert_eq!(fast.threshold, slow.threshold);
        assert!((fast.gain - slow.gain).abs() < 1e-12);
        assert_eq!((fast.feature, fast.threshold), (1, 5.0));
    }

    #[test]
    fn min_samples_leaf_respected() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).unwrap();
        let y = [0, 1, 1, 1];
        let s = best_split(&x, &y, 2, &[0, 1, 2, 3], &[0], 2).unwrap();
        assert_eq!(s.threshold, 1.5);
        assert!(best_split(&x, &y, 2, &[0, 1, 2, 3], &[0], 3).is_none());
    }

    #[test]
    fn adjacent_floats_threshold_stays_left() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let x = Matrix::from_rows(&[[a], [b]]).unwrap();
        let s = best_split(&x, &[0, 1], 2, &[0, 1], &[0], 1).unwrap();
        assert!(a <= s.threshold && s.threshold < b);
    }

    #[test]
    fn grown_tree_paths_hold_for_training_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<[f64; 3]> = (0..60)
            .map(|_| [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let y: Vec<usize> = rows.iter().map(|r| usize::from(r[0] + r[1] > 1.0)).collect();
        let params = TreeParams {
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: 3,
        };
        let grown = grow_tree(&x, &y, 2, (0..60).collect(), params, &mut rng);
        let nodes = grown.tree.nodes();
        // Walk each training row and check every predicate along its path.
        for r in 0..60 {
            let row = x.row(r);
            let mut i = 0;
            while let TreeNode::Internal {
                feature,
                threshold,
                left,
                right,
            } = nodes[i]
            {
                i = if row[feature] <= threshold { left } else { right };
            }
            assert_eq!(i, grown.tree.leaf_index(row));
        }
        // Fully grown on distinct points: training rows are classified exactly.
        for (r, &label) in y.iter().enumerate().take(60) {
            assert_eq!(grown.tree.predict_row(x.row(r)), label);
        }
        assert!(grown.importance.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn majority_tie_goes_low() {
        assert_eq!(majority(&[3, 3, 1]), 0);
        assert_eq!(majority(&[1, 4, 4]), 1);
    }

    #[test]
    fn from_nodes_rejects_bad_offsets() {
        let leaf = TreeNode::Leaf {
            class_counts: vec![1],
        };
        let bad = TreeNode::Internal {
            feature: 0,
            threshold: 0.0,
            left: 0,
            right: 5,
        };
        assert!(Tree::from_nodes(vec![bad, leaf]).is_err());
        assert!(Tree::from_nodes(vec![]).is_err());
    }
}
