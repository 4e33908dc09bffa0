//! Minimum-redundancy maximum-relevance ranking (difference criterion).

use rayon::prelude::*;

use super::info::{discretize, mutual_information};
use super::{FeatureSubset, SelectionMethod};
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Greedy forward ranking over discretized features.
///
/// The first pick maximizes relevance `I(x_j; y)`. Each later pick maximizes
/// relevance minus the mean `I(x_j; x_i)` over already-picked features.
/// Scores record the criterion value at the time of each pick.
pub fn mrmr_rank(data: &Dataset, top_k: usize, num_bins: usize) -> Result<FeatureSubset> {
    let k = data.n_features();
    if top_k == 0 || top_k > k {
        return Err(Error::invalid(format!(
            "top_k must be in 1..={k}, got {top_k}"
        )));
    }
    if data.n_samples() == 0 {
        return Err(Error::invalid("mrmr needs at least one sample"));
    }
    let binned: Vec<Vec<usize>> = (0..k)
        .into_par_iter()
        .map(|j| discretize(&data.column(j), num_bins))
        .collect();
    let relevance = binned
        .par_iter()
        .map(|col| mutual_information(col, data.labels()))
        .collect::<Result<Vec<f64>>>()?;

    let mut selected: Vec<usize> = Vec::with_capacity(top_k);
    let mut scores = Vec::with_capacity(top_k);
    let mut remaining = vec![true; k];
    let mut redundancy_sum = vec![0.0; k];

    for step in 0..top_k {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..k).filter(|&j| remaining[j]) {
            let score = if step == 0 {
                relevance[j]
            } else {
                relevance[j] - redundancy_sum[j] / step as f64
            };
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        let (pick, score) = best.expect("top_k <= k leaves a candidate");
        remaining[pick] = false;
        selected.push(pick);
        scores.push(score);

        if step + 1 < top_k {
            let pick_col = &binned[pick];
            let updates = (0..k)
                .into_par_iter()
                .filter(|&j| remaining[j])
                .map(|j| mutual_information(&binned[j], pick_col).map(|mi| (j, mi)))
                .collect::<Result<Vec<_>>>()?;
            for (j, mi) in updates {
                redundancy_sum[j] += mi;
            }
        }
    }
    FeatureSubset::new(selected, SelectionMethod::Mrmr, Some(scores), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Matrix;

    fn dataset(cols: &[Vec<f64>], labels: Vec<usize>, m: usize) -> Dataset {
        let n = labels.len();
        let rows: Vec<Vec<f64>> = (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        Dataset::new(
            Matrix::from_rows(&rows).unwrap(),
            labels,
            (0..cols.len()).map(|j| format!("f{j}")).collect(),
            (0..m).map(|c| format!("c{c}")).collect(),
        )
        .unwrap()
    }

    fn fixture() -> Dataset {
        let labels: Vec<usize> = (0..24).map(|i| i % 4).collect();
        // f0: full label information; f1: partial; f2: exact copy of f0.
        let f0: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
        let f1: Vec<f64> = labels.iter().map(|&l| (l / 2) as f64).collect();
        dataset(&[f0.clone(), f1, f0], labels, 4)
    }

    #[test]
    fn first_pick_is_max_relevance() {
        let s = mrmr_rank(&fixture(), 1, 4).unwrap();
        assert_eq!(s.indices(), &[0]);
        assert!((s.scores().unwrap()[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn duplicate_of_first_pick_ranked_last() {
        // Relevances: f0 = f2 = 2 bits, f1 = 1 bit.
        // Step 2: f1 -> 1 - I(f1;f0) = 1 - 1 = 0; f2 -> 2 - I(f2;f0) = 0.
        // Tie at 0 goes to the lower index, so f1 precedes f2.
        let s = mrmr_rank(&fixture(), 3, 4).unwrap();
        assert_eq!(s.indices(), &[0, 1, 2]);
        let scores = s.scores().unwrap();
        assert!(scores[1].abs() < 1e-12);
        // Step 3: f2 -> 2 - (2 + 1) / 2 = 0.5.
        assert!((scores[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn top_k_range() {
        let d = fixture();
        assert!(mrmr_rank(&d, 0, 4).is_err());
        assert!(mrmr_rank(&d, 4, 4).is_err());
    }

    #[test]
    fn prefix_property() {
        let d = fixture();
        let full = mrmr_rank(&d, 3, 4).unwrap();
        for t in 1..=3 {
            let part = mrmr_rank(&d, t, 4).unwrap();
            assert_eq!(part.indices(), &full.indices()[..t]);
        }
    }
}
