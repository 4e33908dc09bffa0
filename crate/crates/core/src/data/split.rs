use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64, stratified: bool) -> Result<Self> {
        let spec = Self {
            train_fraction,
            seed,
            stratified,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::invalid(format!(
                "train_fraction must lie strictly between 0 and 1, got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            seed: 0,
            stratified: true,
        }
    }
}

/// Row indices of each partition, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Computes the partition from labels alone; feature values never affect it.
pub fn split_indices(data: &Dataset, spec: &SplitSpec) -> Result<SplitIndices> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    let groups = if spec.stratified {
        let groups = data.class_rows();
        if let Some(c) = groups.iter().position(Vec::is_empty) {
            return Err(Error::EmptyClass(data.class_names()[c].clone()));
        }
        groups
    } else {
        vec![(0..data.n_samples()).collect()]
    };
    for mut rows in groups {
        rows.shuffle(&mut rng);
        let n_train = (spec.train_fraction * rows.len() as f64).round() as usize;
        test.extend_from_slice(&rows[n_train..]);
        rows.truncate(n_train);
        train.extend(rows);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { train, test })
}

pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let idx = split_indices(data, spec)?;
    Ok((data.select_rows(&idx.train), data.select_rows(&idx.test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Matrix;

    fn labelled(counts: &[usize]) -> Dataset {
        let labels: Vec<usize> = counts
            .iter()
            .enumerate()
            .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
            .collect();
        let n = labels.len();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        Dataset::new(
            Matrix::from_rows(&rows).unwrap(),
            labels,
            vec!["x".into()],
            (0..counts.len()).map(|c| format!("c{c}")).collect(),
        )
        .unwrap()
    }

    #[test]
    fn exact_ratio() {
        let d = labelled(&[1000]);
        let spec = SplitSpec::new(0.8, 3, false).unwrap();
        let (train, test) = split(&d, &spec).unwrap();
        assert_eq!(train.n_samples(), 800);
        assert_eq!(test.n_samples(), 200);
    }

    #[test]
    fn stratified_per_class_ratio() {
        let d = labelled(&[900, 100]);
        let spec = SplitSpec::new(0.8, 11, true).unwrap();
        let (train, test) = split(&d, &spec).unwrap();
        assert_eq!(train.class_counts(), vec![720, 80]);
        assert_eq!(test.class_counts(), vec![180, 20]);
    }

    #[test]
    fn deterministic_and_partitioning() {
        let d = labelled(&[37, 51, 12]);
        let spec = SplitSpec::new(0.7, 99, true).unwrap();
        let a = split_indices(&d, &spec).unwrap();
        let b = split_indices(&d, &spec).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<usize> = a.train.iter().chain(&a.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        let other = split_indices(&d, &SplitSpec::new(0.7, 100, true).unwrap()).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn empty_class_under_stratification() {
        let d = labelled(&[5, 0, 3]);
        let spec = SplitSpec::default();
        assert!(matches!(split(&d, &spec), Err(Error::EmptyClass(_))));
        let relaxed = SplitSpec {
            stratified: false,
            ..spec
        };
        assert!(split(&d, &relaxed).is_ok());
    }

    #[test]
    fn fraction_bounds() {
        assert!(SplitSpec::new(0.0, 0, true).is_err());
        assert!(SplitSpec::new(1.0, 0, true).is_err());
        assert!(SplitSpec::new(f64::NAN, 0, true).is_err());
    }
}
