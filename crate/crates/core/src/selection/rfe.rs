use super::{FeatureSubset, SelectionMethod};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::forest::{train_forest, ForestConfig};

/// Recursive feature elimination driven by forest impurity importances.
///
/// One feature is dropped per round (lowest importance; ties drop the higher
/// index) until `top_k` remain. Survivors are returned ordered by their
/// importance in the final forest, with those importances as scores.
pub fn rfe_rank(data: &Dataset, top_k: usize, forest_config: &ForestConfig) -> Result<FeatureSubset> {
    let k = data.n_features();
    if top_k == 0 || top_k > k {
        return Err(Error::invalid(format!("top_k must be in 1..={k}, got {top_k}")));
    }
    let mut surviving: Vec<usize> = (0..k).collect();
    loop {
        let view = data.select_features(&surviving)?;
        let mut config = *forest_config;
        config.features_per_split = clamp_features(config, surviving.len());
        let model = train_forest(&view, &config)?;
        let imp = &model.importances;

        if surviving.len() <= top_k {
            let mut order: Vec<usize> = (0..surviving.len()).collect();
            order.sort_by(|&a, &b| imp[b].total_cmp(&imp[a]).then(a.cmp(&b)));
            let indices = order.iter().map(|&p| surviving[p]).collect();
            let scores = order.iter().map(|&p| imp[p]).collect();
            return FeatureSubset::new(indices, SelectionMethod::Rfe, Some(scores), k);
        }

        // Positions are in ascending feature order, so `<=` keeps the last
        // (highest-index) minimum.
        let mut worst = 0;
        for p in 1..surviving.len() {
            if imp[p] <= imp[worst] {
                worst = p;
            }
        }
        log::debug!(
            "rfe: dropping feature {} (importance {:.6})",
            data.feature_names()[surviving[worst]],
            imp[worst]
        );
        surviving.remove(worst);
    }
}

fn clamp_features(config: ForestConfig, k: usize) -> crate::forest::FeaturesPerSplit {
    use crate::forest::FeaturesPerSplit;
    match config.features_per_split {
        FeaturesPerSplit::Count(n) if n > k => FeaturesPerSplit::Count(k),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise_and_signal(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let rows: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| vec![rng.random::<f64>(), l as f64 + 0.1 * rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        Dataset::new(
            Matrix::from_rows(&rows).unwrap(),
            labels,
            vec!["noise_a".into(), "signal".into(), "noise_b".into()],
            vec!["x".into(), "y".into()],
        )
        .unwrap()
    }

    fn config() -> ForestConfig {
        ForestConfig {
            num_trees: 20,
            seed: 17,
            ..ForestConfig::default()
        }
    }

    #[test]
    fn aligned_feature_survives() {
        let d = noise_and_signal(120, 1);
        let s = rfe_rank(&d, 1, &config()).unwrap();
        assert_eq!(s.indices(), &[1]);
        assert_eq!(s.method(), SelectionMethod::Rfe);
    }

    #[test]
    fn full_width_ranks_only() {
        let d = noise_and_signal(120, 2);
        let s = rfe_rank(&d, 3, &config()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.indices()[0], 1);
        let mut sorted = s.indices().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn deterministic() {
        let d = noise_and_signal(80, 3);
        assert_eq!(rfe_rank(&d, 2, &config()).unwrap(), rfe_rank(&d, 2, &config()).unwrap());
    }

    #[test]
    fn range_checked() {
        let d = noise_and_signal(20, 4);
        assert!(rfe_rank(&d, 0, &config()).is_err());
        assert!(rfe_rank(&d, 4, &config()).is_err());
    }
}
