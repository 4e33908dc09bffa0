use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::{Dataset, Matrix};
use crate::error::{Error, Result};

/// Parameters for a Gaussian-cluster dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub class_counts: Vec<usize>,
    pub k_informative: usize,
    pub k_noise: usize,
    /// Half the edge length of the hypercube whose vertices hold the class
    /// centres. 0 puts every class at the origin.
    pub class_separation: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn num_classes(&self) -> usize {
        self.class_counts.len()
    }

    fn validate(&self) -> Result<()> {
        let m = self.num_classes();
        if m == 0 {
            return Err(Error::invalid("synthetic spec needs at least one class"));
        }
        if let Some(c) = self.class_counts.iter().position(|&n| n == 0) {
            return Err(Error::invalid(format!("class {c} has zero samples")));
        }
        if self.k_informative + self.k_noise == 0 {
            return Err(Error::invalid("synthetic spec needs at least one feature"));
        }
        if !self.class_separation.is_finite() || self.class_separation < 0.0 {
            return Err(Error::invalid("class separation must be finite and non-negative"));
        }
        if self.class_separation > 0.0 && m > 1 {
            let vertices = 1u128.checked_shl(self.k_informative as u32).unwrap_or(u128::MAX);
            if self.k_informative == 0 || (m as u128) > vertices {
                return Err(Error::invalid(format!(
                    "{m} classes do not fit on the vertices of a {}-dimensional cube",
                    self.k_informative
                )));
            }
        }
        Ok(())
    }
}

/// Unit-variance Gaussian clusters centred on distinct hypercube vertices in
/// the first `k_informative` columns, followed by `k_noise` standard-normal
/// columns. Rows are shuffled. Features are named `inf_*` and `noise_*`,
/// classes `class_*`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = spec.num_classes();
    let ki = spec.k_informative;
    let k = ki + spec.k_noise;

    let centres = pick_vertices(m, ki, &mut rng);
    let mut labels: Vec<usize> = spec
        .class_counts
        .iter()
        .enumerate()
        .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
        .collect();
    labels.shuffle(&mut rng);

    let mut values = Vec::with_capacity(labels.len() * k);
    for &c in &labels {
        for &sign in &centres[c] {
            let z: f64 = rng.sample(StandardNormal);
            values.push(sign * spec.class_separation + z);
        }
        for _ in 0..spec.k_noise {
            values.push(rng.sample(StandardNormal));
        }
    }

    let features = Matrix::new(labels.len(), k, values)?;
    let feature_names = (0..ki)
        .map(|j| format!("inf_{j}"))
        .chain((0..spec.k_noise).map(|j| format!("noise_{j}")))
        .collect();
    let class_names = (0..m).map(|c| format!("class_{c}")).collect();
    Dataset::new(features, labels, feature_names, class_names)
}

fn pick_vertices(m: usize, dims: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    if dims == 0 {
        return vec![Vec::new(); m];
    }
    // More classes than vertices is only accepted at separation 0, where
    // centres coincide anyway.
    let distinct = (m as u128) <= 1u128.checked_shl(dims as u32).unwrap_or(u128::MAX);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let v: Vec<bool> = (0..dims).map(|_| rng.random::<bool>()).collect();
        if !distinct || seen.insert(v.clone()) {
            out.push(v.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(counts: &[usize], sep: f64, seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            class_counts: counts.to_vec(),
            k_informative: 3,
            k_noise: 2,
            class_separation: sep,
            seed,
        }
    }

    #[test]
    fn shape_and_counts() {
        let d = generate_synthetic(&spec(&[960, 40], 3.0, 1)).unwrap();
        assert_eq!(d.n_samples(), 1000);
        assert_eq!(d.n_features(), 5);
        assert_eq!(d.class_counts(), vec![960, 40]);
        assert_eq!(d.feature_names()[3], "noise_0");
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_synthetic(&spec(&[50, 20, 5], 2.0, 9)).unwrap();
        let b = generate_synthetic(&spec(&[50, 20, 5], 2.0, 9)).unwrap();
        let c = generate_synthetic(&spec(&[50, 20, 5], 2.0, 10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn class_means_sit_on_vertices() {
        let d = generate_synthetic(&spec(&[4000, 4000], 3.0, 2)).unwrap();
        for c in 0..2 {
            for j in 0..3 {
                let rows: Vec<f64> = (0..d.n_samples())
                    .filter(|&i| d.labels()[i] == c)
                    .map(|i| d.features().get(i, j))
                    .collect();
                let mean = rows.iter().sum::<f64>() / rows.len() as f64;
                assert!((mean.abs() - 3.0).abs() < 0.1, "mean {mean}");
            }
        }
    }

    #[test]
    fn degenerate_specs() {
        assert!(generate_synthetic(&spec(&[], 1.0, 0)).is_err());
        assert!(generate_synthetic(&spec(&[3, 0], 1.0, 0)).is_err());
        assert!(generate_synthetic(&spec(&[1; 9], 1.0, 0)).is_err());
        assert!(generate_synthetic(&spec(&[3, 3], f64::NAN, 0)).is_err());
        let mut none = spec(&[3], 1.0, 0);
        none.k_informative = 0;
        none.k_noise = 0;
        assert!(generate_synthetic(&none).is_err());
        // Nine classes at separation 0 are allowed: all share the origin.
        assert!(generate_synthetic(&spec(&[1; 9], 0.0, 0)).is_ok());
    }

    #[test]
    fn extreme_skew_generates() {
        let d = generate_synthetic(&spec(&[5751, 1], 3.0, 4)).unwrap();
        assert_eq!(d.class_counts(), vec![5751, 1]);
    }
}
