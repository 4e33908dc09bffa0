//! Datasets, CSV ingestion, scaling, splitting and label hierarchies.

mod csv_io;
mod dataset;
mod hierarchy;
mod matrix;
mod scaler;
mod split;

pub use csv_io::{
    load_csv, load_csv_with, load_feature_table, read_csv, read_feature_table, write_csv,
    write_csv_to, write_predictions, CsvOptions, FeatureTable, CICIOT2023_FEATURES,
    DEFAULT_LABEL_COLUMN,
};
pub use dataset::Dataset;
pub use hierarchy::{relabel, ClassLevel, LabelHierarchy, ATTACK_LABEL, BENIGN_LABEL};
pub use matrix::Matrix;
pub use scaler::{apply_scaler, fit_scaler, ScalerParams};
pub use split::{split, split_indices, SplitIndices, SplitSpec};
