use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::data::ClassLevel;
use crate::error::{Error, Result};

use super::framework::ExperimentResult;

pub const METRICS_TABLE_FILE: &str = "metrics_table.csv";
pub const PER_CLASS_F1_FILE: &str = "per_class_f1.csv";
pub const USC_GAINS_FILE: &str = "usc_gains.txt";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn levels_in_order(results: &[ExperimentResult]) -> Vec<ClassLevel> {
    let mut out = Vec::new();
    for r in results {
        if !out.contains(&r.framework.level) {
            out.push(r.framework.level);
        }
    }
    out
}

/// One row per result, in input order: macro precision, recall and F1, then
/// accuracy and kappa, all to 4 decimals.
pub fn metrics_table(results: &[ExperimentResult]) -> String {
    let mut s = String::from("framework,level,classes,precision,recall,f1,accuracy,kappa\n");
    for r in results {
        let m = &r.metrics;
        let _ = writeln!(
            s,
            "{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4}",
            csv_field(&r.framework.name),
            r.framework.level,
            m.n_classes(),
            m.macro_precision,
            m.macro_recall,
            m.macro_f1,
            m.accuracy,
            m.kappa
        );
    }
    s
}

/// Per-class F1 for every framework, one row per (level, class). Cells are
/// empty when a framework was not run at that level.
pub fn per_class_f1_table(results: &[ExperimentResult]) -> String {
    let mut names: Vec<&str> = Vec::new();
    for r in results {
        if !names.contains(&r.framework.name.as_str()) {
            names.push(&r.framework.name);
        }
    }
    let mut s = String::from("level,class,support");
    for n in &names {
        s.push(',');
        s.push_str(&csv_field(n));
    }
    s.push('\n');
    for level in levels_in_order(results) {
        let at_level: Vec<&ExperimentResult> =
            results.iter().filter(|r| r.framework.level == level).collect();
        let reference = &at_level[0].metrics;
        for cls in &reference.per_class {
            let _ = write!(s, "{level},{},{}", csv_field(&cls.name), cls.support);
            for n in &names {
                let cell = at_level
                    .iter()
                    .find(|r| r.framework.name == *n)
                    .and_then(|r| r.metrics.per_class.iter().find(|c| c.name == cls.name))
                    .map_or_else(String::new, |c| format!("{:.4}", c.f1));
                let _ = write!(s, ",{cell}");
            }
            s.push('\n');
        }
    }
    s
}

/// Average and per-class F1 gains (percentage points) over the baseline's
/// unsaturated classes, grouped by level.
pub fn usc_gain_summary(results: &[ExperimentResult]) -> String {
    let mut s = String::from("# F1 gain over the FW1 baseline on its unsaturated classes, in percentage points\n");
    for level in levels_in_order(results) {
        let with_gain: Vec<&ExperimentResult> = results
            .iter()
            .filter(|r| r.framework.level == level && r.gain.is_some())
            .collect();
        let _ = writeln!(s, "\n[{level}]");
        let Some(first) = with_gain.first() else {
            s.push_str("usc = \n");
            continue;
        };
        let g0 = first.gain.as_ref().expect("filtered on gain");
        let _ = writeln!(s, "usc_threshold = {}", first.framework.usc_threshold);
        let _ = writeln!(s, "usc = {}", g0.usc_names.join(", "));
        for r in with_gain {
            let g = r.gain.as_ref().expect("filtered on gain");
            let _ = writeln!(s, "{}.average = {:.4}", r.framework.name, g.average_gain);
            for (name, v) in g.usc_names.iter().zip(&g.per_class_gain) {
                let _ = writeln!(s, "{}.{name} = {v:.4}", r.framework.name);
            }
        }
    }
    s
}

/// Writes the metrics table, per-class F1 table and USC gain summary into
/// `dir`, creating it if needed. Timings are left out so that output depends
/// only on data and configuration.
pub fn emit_report(results: &[ExperimentResult], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    if results.is_empty() {
        return Err(Error::invalid("no results to report"));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [
        (METRICS_TABLE_FILE, metrics_table(results)),
        (PER_CLASS_F1_FILE, per_class_f1_table(results)),
        (USC_GAINS_FILE, usc_gain_summary(results)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
