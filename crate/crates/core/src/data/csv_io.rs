//! CSV ingestion and export.
//!
//! Input is an RFC-4180 CSV with a header row. One column holds the class
//! label (default `label`); every other column must hold finite reals.
//! Class indices follow first appearance in the file unless a canonical
//! class table is supplied, in which case that table fixes the order.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Dataset, Matrix};
use crate::error::{Error, Result};

pub const DEFAULT_LABEL_COLUMN: &str = "label";

/// The 46 flow-statistics columns of the CICIoT2023 CSV release, in file order.
pub const CICIOT2023_FEATURES: [&str; 46] = [
    "flow_duration",
    "Header_Length",
    "Protocol Type",
    "Duration",
    "Rate",
    "Srate",
    "Drate",
    "fin_flag_number",
    "syn_flag_number",
    "rst_flag_number",
    "psh_flag_number",
    "ack_flag_number",
    "ece_flag_number",
    "cwr_flag_number",
    "ack_count",
    "syn_count",
    "fin_count",
    "urg_count",
    "rst_count",
    "HTTP",
    "HTTPS",
    "DNS",
    "Telnet",
    "SMTP",
    "SSH",
    "IRC",
    "TCP",
    "UDP",
    "DHCP",
    "ARP",
    "ICMP",
    "IPv",
    "LLC",
    "Tot sum",
    "Min",
    "Max",
    "AVG",
    "Std",
    "Tot size",
    "IAT",
    "Number",
    "Magnitue",
    "Radius",
    "Covariance",
    "Variance",
    "Weight",
];

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub label_column: String,
    /// Fixed class order; labels outside it are rejected.
    pub class_names: Option<Vec<String>>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            label_column: DEFAULT_LABEL_COLUMN.to_string(),
            class_names: None,
        }
    }
}

impl CsvOptions {
    pub fn with_label_column(label_column: impl Into<String>) -> Self {
        Self {
            label_column: label_column.into(),
            class_names: None,
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset> {
    load_csv_with(path, &CsvOptions::with_label_column(label_column))
}

pub fn load_csv_with(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, options)
}

pub fn read_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::data("empty file: no header row"));
    }
    let mut seen = HashSet::new();
    for name in &header {
        if name.is_empty() {
            return Err(Error::data("header contains an empty column name"));
        }
        if !seen.insert(name.as_str()) {
            return Err(Error::data(format!("duplicate header name '{name}'")));
        }
    }
    let label_idx = header
        .iter()
        .position(|h| h == &options.label_column)
        .ok_or_else(|| {
            Error::data(format!(
                "label column '{}' not found in header",
                options.label_column
            ))
        })?;
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut class_names: Vec<String> = options.class_names.clone().unwrap_or_default();
    let fixed_classes = options.class_names.is_some();
    let mut class_index: HashMap<String, usize> = class_names
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row = r + 1;
        for (i, cell) in record.iter().enumerate() {
            if i == label_idx {
                let idx = match class_index.get(cell) {
                    Some(&idx) => idx,
                    None if fixed_classes => {
                        return Err(Error::data(format!(
                            "row {row}: label '{cell}' is not in the class table"
                        )))
                    }
                    None => {
                        class_names.push(cell.to_string());
                        class_index.insert(cell.to_string(), class_names.len() - 1);
                        class_names.len() - 1
                    }
                };
                labels.push(idx);
            } else {
                let value = cell
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::InvalidCell {
                        row,
                        column: header[i].clone(),
                        value: cell.to_string(),
                    })?;
                values.push(value);
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::data("file has a header but no data rows"));
    }
    let features = Matrix::new(labels.len(), feature_names.len(), values)?;
    Dataset::new(features, labels, feature_names, class_names)
}

pub fn write_csv(data: &Dataset, path: impl AsRef<Path>, label_column: &str) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(data, file, label_column)
}

/// Writes features followed by a trailing label column. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_csv_to<W: Write>(data: &Dataset, writer: W, label_column: &str) -> Result<()> {
    if data.feature_names().iter().any(|n| n == label_column) {
        return Err(Error::invalid(format!(
            "feature name collides with label column '{label_column}'"
        )));
    }
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = data.feature_names().iter().map(String::as_str).collect();
    header.push(label_column);
    wtr.write_record(&header).map_err(csv_error)?;
    let mut record = Vec::with_capacity(header.len());
    for (r, row) in data.features().rows().enumerate() {
        record.clear();
        record.extend(row.iter().map(|v| v.to_string()));
        record.push(data.class_names()[data.labels()[r]].clone());
        wtr.write_record(&record).map_err(csv_error)?;
    }
    wtr.flush()
        .map_err(|e| Error::data(format!("flushing csv output: {e}")))?;
    Ok(())
}

/// Feature columns picked by name from a CSV, plus the label column when
/// present.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub features: Matrix,
    pub labels: Option<Vec<String>>,
}

pub fn load_feature_table(
    path: impl AsRef<Path>,
    feature_names: &[String],
    label_column: &str,
) -> Result<FeatureTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_feature_table(file, feature_names, label_column)
}

/// Reads the named feature columns in the given order. Other columns are
/// ignored; a missing feature column is an error.
pub fn read_feature_table<R: Read>(
    reader: R,
    feature_names: &[String],
    label_column: &str,
) -> Result<FeatureTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    let position = |name: &str| header.iter().position(|h| h == name);
    let columns = feature_names
        .iter()
        .map(|name| {
            position(name).ok_or_else(|| Error::data(format!("input lacks feature column '{name}'")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let label_idx = position(label_column);

    let mut values = Vec::new();
    let mut labels = label_idx.map(|_| Vec::new());
    let mut rows = 0;
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_error)?;
        for &c in &columns {
            let cell = record.get(c).unwrap_or("");
            let value = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidCell {
                    row: r + 1,
                    column: header[c].clone(),
                    value: cell.to_string(),
                })?;
            values.push(value);
        }
        if let (Some(i), Some(out)) = (label_idx, labels.as_mut()) {
            out.push(record.get(i).unwrap_or("").to_string());
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::data("file has a header but no data rows"));
    }
    Ok(FeatureTable {
        features: Matrix::new(rows, columns.len(), values)?,
        labels,
    })
}

/// Writes a `prediction` column, followed by `label` when true labels are
/// given.
pub fn write_predictions(
    path: impl AsRef<Path>,
    predictions: &[&str],
    labels: Option<&[String]>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut wtr = csv::Writer::from_writer(file);
    match labels {
        Some(labels) => {
            if labels.len() != predictions.len() {
                return Err(Error::DimensionMismatch {
                    expected: predictions.len(),
                    actual: labels.len(),
                });
            }
            wtr.write_record(["prediction", "label"]).map_err(csv_error)?;
            for (p, l) in predictions.iter().zip(labels) {
                wtr.write_record([*p, l.as_str()]).map_err(csv_error)?;
            }
        }
        None => {
            wtr.write_record(["prediction"]).map_err(csv_error)?;
            for p in predictions {
                wtr.write_record([*p]).map_err(csv_error)?;
            }
        }
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(e: csv::Error) -> Error {
    Error::data(format!("csv: {e}"))
}
