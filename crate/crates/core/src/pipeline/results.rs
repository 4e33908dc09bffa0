//! Flat `key = value` result files, one per framework run, so batches can be
//! merged into a single report later.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::balance::BalanceSpec;
use crate::error::{Error, Result, Stage};
use crate::evaluation::{compute_metrics, ConfusionMatrix, GainReport};
use crate::selection::FeatureSubset;

use super::framework::{ExperimentResult, FrameworkConfig};
use crate::data::SplitSpec;
use crate::forest::ForestConfig;

const FORMAT_TAG: &str = "iids-result-1";

fn opt<T: ToString>(v: Option<T>, none: &str) -> String {
    v.map_or_else(|| none.to_string(), |x| x.to_string())
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

/// Serializes a result. Floats use shortest round-trip formatting, so
/// [`parse_result`] recovers the same values.
pub fn write_result(r: &ExperimentResult) -> String {
    let fw = &r.framework;
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("format", FORMAT_TAG.into());
    kv("framework.name", fw.name.clone());
    kv("framework.selector", fw.selector.to_string());
    kv("framework.balancer", fw.balance.method.to_string());
    kv("framework.level", fw.level.to_string());
    kv("framework.num_bins", fw.num_bins.to_string());
    kv("framework.irm_top_n", fw.irm_top_n.to_string());
    kv("framework.rfe_num_trees", fw.rfe_num_trees.to_string());
    kv("framework.usc_threshold", fw.usc_threshold.to_string());
    kv("split.train_fraction", fw.split.train_fraction.to_string());
    kv("split.seed", fw.split.seed.to_string());
    kv("split.stratified", fw.split.stratified.to_string());
    kv("forest.num_trees", fw.forest.num_trees.to_string());
    kv("forest.max_depth", opt(fw.forest.max_depth, "none"));
    kv("forest.min_samples_leaf", fw.forest.min_samples_leaf.to_string());
    kv("forest.features_per_split", fw.forest.features_per_split.to_string());
    kv("forest.bootstrap", fw.forest.bootstrap.to_string());
    kv("forest.seed", fw.forest.seed.to_string());
    kv("balance.seed", fw.balance.seed.to_string());
    kv("balance.per_class_count", opt(fw.balance.per_class_count, "auto"));

    kv("features.count", r.feature_names.len().to_string());
    for (j, name) in r.feature_names.iter().enumerate() {
        kv(&format!("feature.{j}"), name.clone());
    }
    kv("selected.method", r.selected_features.method().to_string());
    kv("selected.indices", join(r.selected_features.indices()));
    if let Some(scores) = r.selected_features.scores() {
        kv("selected.scores", join(scores));
    }

    let cm = &r.confusion;
    kv("classes.count", cm.n_classes().to_string());
    for (c, name) in cm.class_names().iter().enumerate() {
        kv(&format!("class.{c}"), name.clone());
    }
    for (c, row) in cm.counts().iter().enumerate() {
        kv(&format!("confusion.{c}"), join(row));
    }

    let m = &r.metrics;
    // Headline precision/recall/F1 are unweighted means over classes.
    kv("metrics.averaging", "macro".into());
    kv("metrics.accuracy", m.accuracy.to_string());
    kv("metrics.kappa", m.kappa.to_string());
    kv("metrics.macro_precision", m.macro_precision.to_string());
    kv("metrics.macro_recall", m.macro_recall.to_string());
    kv("metrics.macro_f1", m.macro_f1.to_string());
    for (c, cls) in m.per_class.iter().enumerate() {
        kv(&format!("metrics.class.{c}.f1"), cls.f1.to_string());
    }

    if let Some(g) = &r.gain {
        kv("gain.usc", join(&g.usc_classes));
        kv("gain.per_class", join(&g.per_class_gain));
        kv("gain.average", g.average_gain.to_string());
    }
    for (stage, secs) in &r.timings {
        kv(&format!("timing.{stage}"), secs.to_string());
    }
    s
}

struct Fields {
    map: BTreeMap<String, String>,
}

impl Fields {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .or_else(|| line.split_once('=').map(|(k, v)| (k.trim(), v.trim())))
                .ok_or_else(|| Error::data(format!("result line {}: expected key = value", n + 1)))?;
            if map.insert(k.trim().to_string(), v.to_string()).is_some() {
                return Err(Error::data(format!("result key '{}' repeated", k.trim())));
            }
        }
        Ok(Self { map })
    }

    fn raw(&self, key: &str) -> Result<&str> {
        self.map
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::data(format!("result file lacks '{key}'")))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let v = self.raw(key)?;
        v.trim()
            .parse()
            .map_err(|_| Error::data(format!("result key '{key}': bad value '{v}'")))
    }

    fn typed<T: std::str::FromStr<Err = Error>>(&self, key: &str) -> Result<T> {
        self.raw(key)?.parse().map_err(|e: Error| Error::data(format!("result key '{key}': {e}")))
    }

    fn opt<T: std::str::FromStr>(&self, key: &str, none: &str) -> Result<Option<T>> {
        if self.raw(key)? == none {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>> {
        self.raw(key)?
            .split_whitespace()
            .map(|x| {
                x.parse()
                    .map_err(|_| Error::data(format!("result key '{key}': bad item '{x}'")))
            })
            .collect()
    }
}

pub fn parse_result(text: &str) -> Result<ExperimentResult> {
    let f = Fields::parse(text)?;
    if f.raw("format")? != FORMAT_TAG {
        return Err(Error::data(format!("not a {FORMAT_TAG} file")));
    }
    if f.raw("metrics.averaging")? != "macro" {
        return Err(Error::data("result key 'metrics.averaging': only macro is supported"));
    }
    let framework = FrameworkConfig {
        name: f.raw("framework.name")?.to_string(),
        selector: f.typed("framework.selector")?,
        balance: BalanceSpec {
            method: f.typed("framework.balancer")?,
            seed: f.get("balance.seed")?,
            per_class_count: f.opt("balance.per_class_count", "auto")?,
        },
        level: f.typed("framework.level")?,
        forest: ForestConfig {
            num_trees: f.get("forest.num_trees")?,
            max_depth: f.opt("forest.max_depth", "none")?,
            min_samples_leaf: f.get("forest.min_samples_leaf")?,
            features_per_split: f.typed("forest.features_per_split")?,
            bootstrap: f.typed("forest.bootstrap")?,
            seed: f.get("forest.seed")?,
        },
        split: SplitSpec {
            train_fraction: f.get("split.train_fraction")?,
            seed: f.get("split.seed")?,
            stratified: f.get("split.stratified")?,
        },
        num_bins: f.get("framework.num_bins")?,
        irm_top_n: f.get("framework.irm_top_n")?,
        rfe_num_trees: f.get("framework.rfe_num_trees")?,
        usc_threshold: f.get("framework.usc_threshold")?,
    };

    let k: usize = f.get("features.count")?;
    let feature_names = (0..k)
        .map(|j| f.raw(&format!("feature.{j}")).map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    let scores = if f.map.contains_key("selected.scores") {
        Some(f.list("selected.scores")?)
    } else {
        None
    };
    let selected_features = FeatureSubset::new(
        f.list("selected.indices")?,
        f.typed("selected.method")?,
        scores,
        k,
    )?;

    let m: usize = f.get("classes.count")?;
    let class_names = (0..m)
        .map(|c| f.raw(&format!("class.{c}")).map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    let counts = (0..m)
        .map(|c| f.list::<u64>(&format!("confusion.{c}")))
        .collect::<Result<Vec<_>>>()?;
    let confusion = ConfusionMatrix::from_counts(counts)?.with_class_names(class_names)?;
    let metrics = compute_metrics(&confusion)?;

    let gain = if f.map.contains_key("gain.usc") {
        let usc_classes: Vec<usize> = f.list("gain.usc")?;
        let per_class_gain: Vec<f64> = f.list("gain.per_class")?;
        if usc_classes.len() != per_class_gain.len() || usc_classes.iter().any(|&c| c >= m) {
            return Err(Error::data("gain entries do not match the class table"));
        }
        Some(GainReport {
            usc_names: usc_classes
                .iter()
                .map(|&c| confusion.class_names()[c].clone())
                .collect(),
            usc_classes,
            per_class_gain,
            average_gain: f.get("gain.average")?,
        })
    } else {
        None
    };

    let timings = Stage::ALL
        .iter()
        .filter_map(|&s| {
            let key = format!("timing.{s}");
            f.map.contains_key(&key).then(|| f.get(&key).map(|t| (s, t)))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentResult {
        framework,
        feature_names,
        selected_features,
        confusion,
        metrics,
        gain,
        timings,
        trace: None,
    })
}

pub fn save_result(result: &ExperimentResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_result(result)).map_err(|e| Error::io(path, e))
}

pub fn load_result(path: impl AsRef<Path>) -> Result<ExperimentResult> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_result(&text)
}
