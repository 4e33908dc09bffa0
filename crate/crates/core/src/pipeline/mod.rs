//! End-to-end orchestration of the four framework families, batch
//! configuration, synthetic data, result files, reports and model files.

mod config;
mod framework;
mod report;
mod results;
mod synthetic;

use std::path::Path;

use rayon::prelude::*;

pub use config::{parse_framework_pair, BatchConfig, HierarchySource};
pub use framework::{
    framework_name, run_framework, run_framework_with_model, ExperimentResult, FrameworkConfig,
    FrameworkFamily, StageTrace, TrainedFramework,
};
pub use report::{
    emit_report, metrics_table, per_class_f1_table, usc_gain_summary, METRICS_TABLE_FILE,
    PER_CLASS_F1_FILE, USC_GAINS_FILE,
};
pub use results::{load_result, parse_result, save_result, write_result};
pub use synthetic::{generate_synthetic, SyntheticSpec};

use crate::data::{Dataset, LabelHierarchy, ScalerParams};
use crate::error::{Error, Result};
use crate::forest::{decode_model, encode_model, ForestModel};

/// Writes a model, plus the scaler for its input columns, in the binary model
/// format.
pub fn save_model(model: &ForestModel, scaler: Option<&ScalerParams>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_model(model, scaler)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<(ForestModel, Option<ScalerParams>)> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes)
}

/// Runs every framework of a batch. Baselines for all levels run first and in
/// parallel, then the remaining frameworks in parallel; the output follows
/// [`BatchConfig::framework_configs`] order regardless.
pub fn run_batch(
    data: &Dataset,
    hierarchy: Option<&LabelHierarchy>,
    batch: &BatchConfig,
) -> Result<Vec<TrainedFramework>> {
    let configs = batch.framework_configs()?;
    let is_base = |c: &FrameworkConfig| c.family() == FrameworkFamily::Fw1;

    let baselines: Vec<TrainedFramework> = configs
        .par_iter()
        .filter(|c| is_base(c))
        .map(|c| run_framework_with_model(data, hierarchy, c, None))
        .collect::<Result<_>>()?;
    let others: Vec<TrainedFramework> = configs
        .par_iter()
        .filter(|c| !is_base(c))
        .map(|c| {
            let base = baselines
                .iter()
                .find(|b| b.result.framework.level == c.level)
                .map(|b| &b.result);
            run_framework_with_model(data, hierarchy, c, base)
        })
        .collect::<Result<_>>()?;

    let mut base_iter = baselines.into_iter();
    let mut other_iter = others.into_iter();
    Ok(configs
        .iter()
        .map(|c| {
            let next = if is_base(c) { base_iter.next() } else { other_iter.next() };
            next.expect("one run per config")
        })
        .collect())
}
