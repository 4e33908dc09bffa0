//! Random forests of CART trees, including the balanced-bootstrap variant.
//!
//! Every tree draws from its own RNG stream derived from `(seed, tree_index)`,
//! so trees can be grown in parallel and still give the same model as a
//! serial run.

mod codec;
mod config;
mod tree;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use codec::{decode_model, encode_model, MODEL_FORMAT_VERSION};
pub use config::{BootstrapMode, FeaturesPerSplit, ForestConfig};
pub use tree::{best_split, gini_impurity, Split, Tree, TreeNode};

use crate::balance::balanced_draw;
use crate::data::{Dataset, Matrix};
use crate::error::{Error, Result};
use tree::{grow_tree, TreeParams};

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub config: ForestConfig,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
    /// Mean decrease in impurity per feature, normalized to sum to 1.
    pub importances: Vec<f64>,
}

impl ForestModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Plurality vote over trees; ties go to the lower class index.
    pub fn predict_row(&self, row: &[f64]) -> usize {
        let mut votes = vec![0usize; self.n_classes()];
        for t in &self.trees {
            votes[t.predict_row(row)] += 1;
        }
        let mut best = 0;
        for (c, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = c;
            }
        }
        best
    }
}

pub(crate) fn tree_rng(seed: u64, tree_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree_index as u64);
    rng
}

fn draw_rows<R: Rng>(
    mode: BootstrapMode,
    n: usize,
    groups: &[Vec<usize>],
    per_class: usize,
    rng: &mut R,
) -> Vec<usize> {
    match mode {
        BootstrapMode::Standard => (0..n).map(|_| rng.random_range(0..n)).collect(),
        BootstrapMode::Balanced { .. } => balanced_draw(groups, per_class, rng),
        BootstrapMode::Disabled => (0..n).collect(),
    }
}

pub fn train_forest(train: &Dataset, config: &ForestConfig) -> Result<ForestModel> {
    config.validate(train.n_features())?;
    if train.n_samples() == 0 {
        return Err(Error::invalid("cannot train on an empty dataset"));
    }
    let counts = train.class_counts();
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::invalid("training data must contain at least two classes"));
    }
    let groups = train.class_rows();
    let per_class = match config.bootstrap {
        BootstrapMode::Balanced { per_class } => {
            if let Some(c) = groups.iter().position(Vec::is_empty) {
                return Err(Error::EmptyClass(train.class_names()[c].clone()));
            }
            per_class.unwrap_or_else(|| groups.iter().map(Vec::len).min().unwrap_or(1))
        }
        _ => 0,
    };

    let x: &Matrix = train.features();
    let y = train.labels();
    let m = train.n_classes();
    let k = train.n_features();
    let params = TreeParams {
        max_depth: config.max_depth,
        min_samples_leaf: config.min_samples_leaf,
        features_per_split: config.features_per_split.resolve(k),
    };

    let grown: Vec<_> = (0..config.num_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(config.seed, t);
            let rows = draw_rows(config.bootstrap, train.n_samples(), &groups, per_class, &mut rng);
            grow_tree(x, y, m, rows, params, &mut rng)
        })
        .collect();

    let mut importances = vec![0.0; k];
    for g in &grown {
        let total: f64 = g.importance.iter().sum();
        if total > 0.0 {
            for (acc, v) in importances.iter_mut().zip(&g.importance) {
                *acc += v / total;
            }
        }
    }
    let total: f64 = importances.iter().sum();
    if total > 0.0 {
        importances.iter_mut().for_each(|v| *v /= total);
    }

    Ok(ForestModel {
        trees: grown.into_iter().map(|g| g.tree).collect(),
        config: *config,
        class_names: train.class_names().to_vec(),
        feature_names: train.feature_names().to_vec(),
        importances,
    })
}

pub fn predict(model: &ForestModel, features: &Matrix) -> Result<Vec<usize>> {
    if features.ncols() != model.n_features() {
        return Err(Error::DimensionMismatch {
            expected: model.n_features(),
            actual: features.ncols(),
        });
    }
    Ok((0..features.nrows())
        .into_par_iter()
        .map(|r| model.predict_row(features.row(r)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs(n_per_class: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for c in 0..2 {
            for _ in 0..n_per_class {
                let shift = if c == 0 { -3.0 } else { 3.0 };
                rows.push((0..4).map(|_| shift + rng.random::<f64>() - 0.5).collect::<Vec<_>>());
                labels.push(c);
            }
        }
        Dataset::new(
            Matrix::from_rows(&rows).unwrap(),
            labels,
            (0..4).map(|j| format!("f{j}")).collect(),
            vec!["neg".into(), "pos".into()],
        )
        .unwrap()
    }

    #[test]
    fn separable_training_accuracy() {
        let d = blobs(100, 1);
        let cfg = ForestConfig {
            num_trees: 25,
            seed: 3,
            ..ForestConfig::default()
        };
        let model = train_forest(&d, &cfg).unwrap();
        assert_eq!(model.trees.len(), 25);
        let pred = predict(&model, d.features()).unwrap();
        let correct = pred.iter().zip(d.labels()).filter(|(a, b)| a == b).count();
        assert!(correct as f64 / 200.0 >= 0.99);
        let s: f64 = model.importances.iter().sum();
        assert!((s - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_tree_no_bootstrap_is_plain_cart() {
        let d = blobs(30, 2);
        let cfg = ForestConfig {
            num_trees: 1,
            features_per_split: FeaturesPerSplit::All,
            bootstrap: BootstrapMode::Disabled,
            seed: 11,
            ..ForestConfig::default()
        };
        let model = train_forest(&d, &cfg).unwrap();
        let mut rng = tree_rng(99, 0);
        let params = TreeParams {
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: 4,
        };
        let direct = grow_tree(d.features(), d.labels(), 2, (0..60).collect(), params, &mut rng);
        assert_eq!(model.trees[0], direct.tree);
    }

    #[test]
    fn deterministic_per_seed() {
        let d = blobs(40, 3);
        let cfg = ForestConfig {
            num_trees: 10,
            seed: 5,
            ..ForestConfig::default()
        };
        assert_eq!(train_forest(&d, &cfg).unwrap(), train_forest(&d, &cfg).unwrap());
    }

    #[test]
    fn vote_tie_goes_to_lower_class() {
        let leaf = |c: usize| {
            Tree::from_nodes(vec![TreeNode::Leaf {
                class_counts: if c == 0 { vec![1, 0] } else { vec![0, 1] },
            }])
            .unwrap()
        };
        let model = ForestModel {
            trees: vec![leaf(1), leaf(0)],
            config: ForestConfig {
                num_trees: 2,
                ..ForestConfig::default()
            },
            class_names: vec!["a".into(), "b".into()],
            feature_names: vec!["x".into()],
            importances: vec![0.0],
        };
        assert_eq!(model.predict_row(&[0.0]), 0);
        let unanimous = ForestModel {
            trees: vec![leaf(1), leaf(1), leaf(1)],
            ..model.clone()
        };
        assert_eq!(unanimous.predict_row(&[0.0]), 1);
        assert!(predict(&model, &Matrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn rejects_single_class() {
        let d = Dataset::new(
            Matrix::zeros(3, 1),
            vec![0, 0, 0],
            vec!["x".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert!(train_forest(&d, &ForestConfig::default()).is_err());
    }

    #[test]
    fn balanced_bootstrap_histograms_uniform() {
        let mut d = blobs(50, 4);
        let keep: Vec<usize> = (0..50).chain(50..60).collect();
        d = d.select_rows(&keep);
        let groups = d.class_rows();
        for t in 0..5 {
            let mut rng = tree_rng(8, t);
            let rows = draw_rows(
                BootstrapMode::Balanced { per_class: None },
                d.n_samples(),
                &groups,
                10,
                &mut rng,
            );
            let mut hist = [0; 2];
            for r in rows {
                hist[d.labels()[r]] += 1;
            }
            assert_eq!(hist, [10, 10]);
        }
        let cfg = ForestConfig {
            num_trees: 5,
            bootstrap: BootstrapMode::Balanced { per_class: None },
            ..ForestConfig::default()
        };
        let model = train_forest(&d, &cfg).unwrap();
        // Root counts of each tree equal the balanced bootstrap histogram.
        for t in &model.trees {
            let mut totals = [0u64; 2];
            for node in t.nodes() {
                if let TreeNode::Leaf { class_counts } = node {
                    totals[0] += class_counts[0];
                    totals[1] += class_counts[1];
                }
            }
            assert_eq!(totals, [10, 10]);
        }
    }
}
