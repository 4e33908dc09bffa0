use super::Dataset;
use crate::error::{Error, Result};

/// Per-column standardization parameters (population standard deviation).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerParams {
    pub means: Vec<f64>,
    pub stddevs: Vec<f64>,
}

impl ScalerParams {
    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    /// Parameters restricted to the given columns.
    pub fn select(&self, indices: &[usize]) -> ScalerParams {
        ScalerParams {
            means: indices.iter().map(|&j| self.means[j]).collect(),
            stddevs: indices.iter().map(|&j| self.stddevs[j]).collect(),
        }
    }

    /// Scales one row in place. Zero-variance columns map to 0.
    pub fn transform_row(&self, row: &mut [f64]) {
        for ((x, &mean), &sd) in row.iter_mut().zip(&self.means).zip(&self.stddevs) {
            *x = if sd > 0.0 { (*x - mean) / sd } else { 0.0 };
        }
    }
}

pub fn fit_scaler(train: &Dataset) -> Result<ScalerParams> {
    let n = train.n_samples();
    if n == 0 {
        return Err(Error::invalid("cannot fit a scaler on an empty dataset"));
    }
    let k = train.n_features();
    let mut means = vec![0.0; k];
    for row in train.features().rows() {
        for (m, &x) in means.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut vars = vec![0.0; k];
    for row in train.features().rows() {
        for ((v, &x), &m) in vars.iter_mut().zip(row).zip(&means) {
            let d = x - m;
            *v += d * d;
        }
    }
    let stddevs = vars.into_iter().map(|v| (v / n as f64).sqrt()).collect();
    Ok(ScalerParams { means, stddevs })
}

pub fn apply_scaler(data: &Dataset, params: &ScalerParams) -> Result<Dataset> {
    if params.n_features() != data.n_features() || params.stddevs.len() != params.means.len() {
        return Err(Error::DimensionMismatch {
            expected: data.n_features(),
            actual: params.n_features(),
        });
    }
    let mut features = data.features().clone();
    for r in 0..features.nrows() {
        params.transform_row(features.row_mut(r));
    }
    Ok(data.with_features(features))
}
