use rayon::prelude::*;

use super::info::{discretize, symmetrical_uncertainty};
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Symmetrical-uncertainty associations between features and with the class.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationMatrix {
    feature_class: Vec<f64>,
    /// Row-major k×k.
    feature_feature: Vec<f64>,
}

impl AssociationMatrix {
    pub fn from_parts(feature_class: Vec<f64>, feature_feature: Vec<Vec<f64>>) -> Result<Self> {
        let k = feature_class.len();
        if feature_feature.len() != k || feature_feature.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("feature_feature must be k×k"));
        }
        let in_unit = |v: &f64| (0.0..=1.0).contains(v);
        if !feature_class.iter().all(in_unit) || !feature_feature.iter().flatten().all(in_unit) {
            return Err(Error::invalid("associations must lie in [0, 1]"));
        }
        for (i, row) in feature_feature.iter().enumerate() {
            if row[..i].iter().enumerate().any(|(j, &v)| v != feature_feature[j][i]) {
                return Err(Error::invalid("feature_feature must be symmetric"));
            }
        }
        Ok(Self {
            feature_class,
            feature_feature: feature_feature.into_iter().flatten().collect(),
        })
    }

    pub fn n_features(&self) -> usize {
        self.feature_class.len()
    }

    pub fn feature_class(&self, j: usize) -> f64 {
        self.feature_class[j]
    }

    pub fn feature_feature(&self, i: usize, j: usize) -> f64 {
        self.feature_feature[i * self.n_features() + j]
    }
}

pub fn build_association_matrix(data: &Dataset, num_bins: usize) -> Result<AssociationMatrix> {
    if data.n_samples() < 2 {
        return Err(Error::invalid("association matrix needs at least two samples"));
    }
    if num_bins == 0 {
        return Err(Error::invalid("num_bins must be positive"));
    }
    let k = data.n_features();
    let binned: Vec<Vec<usize>> = (0..k)
        .into_par_iter()
        .map(|j| discretize(&data.column(j), num_bins))
        .collect();
    let labels = data.labels();
    let feature_class = binned
        .par_iter()
        .map(|col| symmetrical_uncertainty(col, labels))
        .collect::<Result<Vec<_>>>()?;

    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let pair_su = pairs
        .par_iter()
        .map(|&(i, j)| symmetrical_uncertainty(&binned[i], &binned[j]))
        .collect::<Result<Vec<_>>>()?;

    let mut ff = vec![0.0; k * k];
    for (&(i, j), &su) in pairs.iter().zip(&pair_su) {
        ff[i * k + j] = su;
        ff[j * k + i] = su;
    }
    for (i, col) in binned.iter().enumerate() {
        let constant = col.iter().all(|&b| b == col[0]);
        ff[i * k + i] = if constant { 0.0 } else { 1.0 };
    }
    Ok(AssociationMatrix {
        feature_class,
        feature_feature: ff,
    })
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

    /// Independent entropy oracle working on raw value/label pairs via maps.
    fn oracle_su(x: &[usize], y: &[usize]) -> f64 {
        use std::collections::BTreeMap;
        fn h<K: Ord>(items: impl Iterator<Item = K>, n: f64) -> f64 {
            let mut m = BTreeMap::new();
            for k in items {
                *m.entry(k).or_insert(0.0) += 1.0;
            }
            m.values().map(|&c: &f64| -(c / n) * (c / n).ln()).sum::<f64>() / 2f64.ln()
        }
        let n = x.len() as f64;
        let hx = h(x.iter(), n);
        let hy = h(y.iter(), n);
        let hxy = h(x.iter().zip(y), n);
        if hx + hy == 0.0 {
            0.0
        } else {
            2.0 * (hx + hy - hxy) / (hx + hy)
        }
    }

    #[test]
    fn duplicated_columns_and_perfect_predictor() {
        let labels = vec![0, 1, 2, 0, 1, 2, 0, 1, 2];
        let a: Vec<f64> = labels.iter().map(|&l| l as f64 * 10.0).collect();
        let noise = vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0, 5.0];
        let d = dataset(&[a.clone(), a, noise], labels, 3);
        let m = build_association_matrix(&d, 3).unwrap();
        assert!((m.feature_feature(0, 1) - 1.0).abs() < 1e-12);
        assert!((m.feature_class(0) - 1.0).abs() < 1e-12);
        assert_eq!(m.feature_feature(2, 2), 1.0);
    }

    #[test]
    fn matches_entropy_oracle() {
        let labels = vec![0, 0, 1, 1, 2, 2, 0, 1, 2, 1, 0, 2];
        let cols = vec![
            vec![0.1, 0.4, 0.3, 0.9, 1.2, 1.1, 0.2, 0.7, 1.5, 0.8, 0.0, 1.3],
            vec![5.0, 3.0, 5.0, 1.0, 2.0, 2.0, 4.0, 4.0, 1.0, 3.0, 3.0, 6.0],
            vec![1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0],
        ];
        let d = dataset(&cols, labels.clone(), 3);
        let m = build_association_matrix(&d, 4).unwrap();
        let binned: Vec<Vec<usize>> = cols.iter().map(|c| discretize(c, 4)).collect();
        for i in 0..3 {
            assert!((m.feature_class(i) - oracle_su(&binned[i], &labels)).abs() < 1e-9);
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { oracle_su(&binned[i], &binned[j]) };
                assert!((m.feature_feature(i, j) - expected).abs() < 1e-9, "({i},{j})");
                assert_eq!(m.feature_feature(i, j), m.feature_feature(j, i));
            }
        }
    }

    #[test]
    fn constant_feature_has_zero_diagonal() {
        let d = dataset(&[vec![1.0; 4], vec![1.0, 2.0, 3.0, 4.0]], vec![0, 0, 1, 1], 2);
        let m = build_association_matrix(&d, 2).unwrap();
        assert_eq!(m.feature_feature(0, 0), 0.0);
        assert_eq!(m.feature_class(0), 0.0);
    }

    #[test]
    fn from_parts_validates() {
        assert!(AssociationMatrix::from_parts(vec![0.5], vec![vec![1.0]]).is_ok());
        assert!(AssociationMatrix::from_parts(vec![1.5], vec![vec![1.0]]).is_err());
        assert!(AssociationMatrix::from_parts(
            vec![0.1, 0.2],
            vec![vec![1.0, 0.3], vec![0.4, 1.0]]
        )
        .is_err());
    }
}
