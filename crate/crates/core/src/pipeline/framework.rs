use std::fmt;
use std::time::Instant;

use crate::balance::{minority_count, random_oversample, BalanceMethod, BalanceSpec};
use crate::data::{apply_scaler, fit_scaler, relabel, split_indices, ClassLevel, Dataset, LabelHierarchy, ScalerParams, SplitSpec};
use crate::error::{Error, Result, Stage};
use crate::evaluation::{compute_metrics, confusion_matrix, f1_gain, identify_usc, ConfusionMatrix, GainReport, MetricsReport, DEFAULT_USC_THRESHOLD};
use crate::forest::{predict, train_forest, BootstrapMode, ForestConfig, ForestModel};
use crate::selection::{cfs_select, irm_select, FeatureSubset, SelectionMethod, DEFAULT_IRM_TOP_N, DEFAULT_NUM_BINS};

/// One of the four framework families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FrameworkFamily {
    /// All features, no balancing.
    Fw1,
    /// All features with balancing.
    Fw2,
    /// Feature selection, no balancing.
    Fw3,
    /// Feature selection with balancing.
    Fw4,
}

impl FrameworkFamily {
    pub fn of(selector: SelectionMethod, balancer: BalanceMethod) -> Self {
        match (selector == SelectionMethod::All, balancer == BalanceMethod::None) {
            (true, true) => FrameworkFamily::Fw1,
            (true, false) => FrameworkFamily::Fw2,
            (false, true) => FrameworkFamily::Fw3,
            (false, false) => FrameworkFamily::Fw4,
        }
    }
}

impl fmt::Display for FrameworkFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            FrameworkFamily::Fw1 => 1,
            FrameworkFamily::Fw2 => 2,
            FrameworkFamily::Fw3 => 3,
            FrameworkFamily::Fw4 => 4,
        };
        write!(f, "FW{n}")
    }
}

/// Canonical display name, e.g. `FW1:Base`, `FW2:Base+ROS`, `FW4:CFS+BRFC`.
pub fn framework_name(selector: SelectionMethod, balancer: BalanceMethod) -> String {
    let family = FrameworkFamily::of(selector, balancer);
    match family {
        FrameworkFamily::Fw1 => format!("{family}:Base"),
        FrameworkFamily::Fw2 => format!("{family}:Base+{balancer}"),
        FrameworkFamily::Fw3 => format!("{family}:{selector}"),
        FrameworkFamily::Fw4 => format!("{family}:{selector}+{balancer}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameworkConfig {
    pub name: String,
    pub selector: SelectionMethod,
    pub balance: BalanceSpec,
    pub level: ClassLevel,
    pub forest: ForestConfig,
    pub split: SplitSpec,
    pub num_bins: usize,
    /// Ranking depth for the IRM selector.
    pub irm_top_n: usize,
    /// Trees per forest inside RFE rounds.
    pub rfe_num_trees: usize,
    pub usc_threshold: f64,
}

impl FrameworkConfig {
    /// Builds a framework with default settings and a single master seed.
    pub fn new(selector: SelectionMethod, balancer: BalanceMethod, level: ClassLevel, seed: u64) -> Self {
        let forest = ForestConfig {
            seed,
            ..ForestConfig::default()
        };
        let mut cfg = Self {
            name: framework_name(selector, balancer),
            selector,
            balance: BalanceSpec {
                method: balancer,
                seed,
                per_class_count: None,
            },
            level,
            forest,
            split: SplitSpec {
                seed,
                ..SplitSpec::default()
            },
            num_bins: DEFAULT_NUM_BINS,
            irm_top_n: DEFAULT_IRM_TOP_N,
            rfe_num_trees: forest.num_trees,
            usc_threshold: DEFAULT_USC_THRESHOLD,
        };
        cfg.sync_bootstrap();
        cfg
    }

    pub fn family(&self) -> FrameworkFamily {
        FrameworkFamily::of(self.selector, self.balance.method)
    }

    pub fn balancer(&self) -> BalanceMethod {
        self.balance.method
    }

    /// Sets the forest bootstrap mode to match the balancer.
    pub fn sync_bootstrap(&mut self) {
        self.forest.bootstrap = match self.balance.method {
            BalanceMethod::Brfc => BootstrapMode::Balanced {
                per_class: self.balance.per_class_count,
            },
            _ => match self.forest.bootstrap {
                BootstrapMode::Balanced { .. } => BootstrapMode::Standard,
                other => other,
            },
        };
    }

    pub fn validate(&self) -> Result<()> {
        let config = |msg: String| Err(Error::Config(msg));
        if !matches!(
            self.selector,
            SelectionMethod::All | SelectionMethod::Cfs | SelectionMethod::Irm
        ) {
            return config(format!("selector must be ALL, CFS or IRM, got {}", self.selector));
        }
        let balanced = matches!(self.forest.bootstrap, BootstrapMode::Balanced { .. });
        if (self.balance.method == BalanceMethod::Brfc) != balanced {
            return config("BRFC balancing requires (and is required by) balanced bootstraps".into());
        }
        if self.num_bins == 0 {
            return config("num_bins must be positive".into());
        }
        if self.irm_top_n == 0 || self.rfe_num_trees == 0 {
            return config("irm top_n and rfe tree count must be positive".into());
        }
        if !(self.usc_threshold.is_finite()) {
            return config("usc threshold must be finite".into());
        }
        self.split.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.balance.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.forest.validate(usize::MAX).map_err(|e| Error::Config(e.to_string()))
    }
}

/// What each stage consumed, kept so runs can be audited for leakage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTrace {
    /// Row indices (into the input dataset) of each partition.
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    /// Scaler fitted on the training partition, over all features.
    pub scaler: ScalerParams,
    /// Per-class training counts before balancing.
    pub train_counts: Vec<usize>,
    /// Per-class counts of what each tree trains on after balancing. For BRFC
    /// this is `N_L` per class.
    pub balanced_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub framework: FrameworkConfig,
    /// Names of all candidate features at the selection stage.
    pub feature_names: Vec<String>,
    pub selected_features: FeatureSubset,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
    pub gain: Option<GainReport>,
    /// Wall-clock seconds per stage, in execution order.
    pub timings: Vec<(Stage, f64)>,
    /// Present for in-process runs; not persisted in result files.
    pub trace: Option<StageTrace>,
}

impl ExperimentResult {
    pub fn selected_names(&self) -> Vec<&str> {
        self.selected_features
            .indices()
            .iter()
            .map(|&j| self.feature_names[j].as_str())
            .collect()
    }

    /// Equality ignoring wall-clock timings.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.framework == other.framework
            && self.feature_names == other.feature_names
            && self.selected_features == other.selected_features
            && self.confusion == other.confusion
            && self.metrics == other.metrics
            && self.gain == other.gain
            && self.trace == other.trace
    }
}

/// Model and scaler needed to score new flows with a trained framework.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedFramework {
    pub result: ExperimentResult,
    pub model: ForestModel,
    /// Scaler restricted to the selected features.
    pub scaler: ScalerParams,
}

struct Timer {
    timings: Vec<(Stage, f64)>,
    started: Instant,
}

impl Timer {
    fn new() -> Self {
        Self {
            timings: Vec::new(),
            started: Instant::now(),
        }
    }

    fn stage<T>(&mut self, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
        self.started = Instant::now();
        let out = f().map_err(|e| e.at_stage(stage))?;
        self.timings.push((stage, self.started.elapsed().as_secs_f64()));
        Ok(out)
    }
}

/// Runs one framework end to end: relabel, split, scale, select, balance,
/// train, predict, evaluate. Only the training partition reaches selection,
/// scaler fitting and balancing.
///
/// `hierarchy` may be `None` only at the `Fine34` level. When `baseline` is
/// given, the result carries F1 gains over the baseline's unsaturated classes.
pub fn run_framework(
    data: &Dataset,
    hierarchy: Option<&LabelHierarchy>,
    config: &FrameworkConfig,
    baseline: Option<&ExperimentResult>,
) -> Result<ExperimentResult> {
    run_framework_with_model(data, hierarchy, config, baseline).map(|t| t.result)
}

pub fn run_framework_with_model(
    data: &Dataset,
    hierarchy: Option<&LabelHierarchy>,
    config: &FrameworkConfig,
    baseline: Option<&ExperimentResult>,
) -> Result<TrainedFramework> {
    config.validate()?;
    if let Some(b) = baseline {
        if b.framework.level != config.level {
            return Err(Error::Config(format!(
                "baseline level {} differs from framework level {}",
                b.framework.level, config.level
            )));
        }
    }
    let mut timer = Timer::new();

    let labelled = timer.stage(Stage::Relabel, || match (hierarchy, config.level) {
        (Some(h), level) => relabel(data, h, level),
        (None, ClassLevel::Fine34) => Ok(data.clone()),
        (None, level) => Err(Error::Config(format!("level {level} needs a label hierarchy"))),
    })?;

    let (train_rows, test_rows) = timer.stage(Stage::Split, || {
        let idx = split_indices(&labelled, &config.split)?;
        Ok((idx.train, idx.test))
    })?;
    let train = labelled.select_rows(&train_rows);
    let test = labelled.select_rows(&test_rows);
    if test.n_samples() == 0 {
        return Err(Error::data("test partition is empty").at_stage(Stage::Split));
    }

    let (scaler, train, test) = timer.stage(Stage::Scale, || {
        let scaler = fit_scaler(&train)?;
        let train = apply_scaler(&train, &scaler)?;
        let test = apply_scaler(&test, &scaler)?;
        Ok((scaler, train, test))
    })?;

    let selected = timer.stage(Stage::Selection, || select_features(&train, config))?;
    let train = train.select_features(selected.indices())?;
    let test = test.select_features(selected.indices())?;
    let train_counts = train.class_counts();

    let (train, balanced_counts) = timer.stage(Stage::Balancing, || match config.balance.method {
        BalanceMethod::None => Ok((train, train_counts.clone())),
        BalanceMethod::Ros => {
            let out = random_oversample(&train, config.balance.seed)?;
            let counts = out.class_counts();
            Ok((out, counts))
        }
        BalanceMethod::Brfc => {
            let per_class = match config.balance.per_class_count {
                Some(n) => n,
                None => minority_count(&train)?,
            };
            Ok((train.clone(), vec![per_class; train.n_classes()]))
        }
    })?;

    let model = timer.stage(Stage::Training, || train_forest(&train, &config.forest))?;
    let predictions = timer.stage(Stage::Prediction, || predict(&model, test.features()))?;

    let (confusion, metrics, gain) = timer.stage(Stage::Evaluation, || {
        let cm = confusion_matrix(test.labels(), &predictions, test.n_classes())?
            .with_class_names(test.class_names().to_vec())?;
        let metrics = compute_metrics(&cm)?;
        let gain = baseline
            .map(|b| {
                let usc = identify_usc(&b.metrics, config.usc_threshold);
                f1_gain(&b.metrics, &metrics, &usc)
            })
            .transpose()?;
        Ok((cm, metrics, gain))
    })?;

    let selected_scaler = scaler.select(selected.indices());
    Ok(TrainedFramework {
        result: ExperimentResult {
            framework: config.clone(),
            feature_names: labelled.feature_names().to_vec(),
            selected_features: selected,
            confusion,
            metrics,
            gain,
            timings: timer.timings,
            trace: Some(StageTrace {
                train_rows,
                test_rows,
                scaler,
                train_counts,
                balanced_counts,
            }),
        },
        model,
        scaler: selected_scaler,
    })
}

fn select_features(train: &Dataset, config: &FrameworkConfig) -> Result<FeatureSubset> {
    let k = train.n_features();
    let subset = match config.selector {
        SelectionMethod::All => FeatureSubset::all(k),
        SelectionMethod::Cfs => cfs_select(train, config.num_bins)?,
        SelectionMethod::Irm => {
            let rfe_forest = ForestConfig {
                num_trees: config.rfe_num_trees,
                bootstrap: BootstrapMode::Standard,
                ..config.forest
            };
            let top_n = config.irm_top_n.min(k);
            irm_select(train, top_n, &rfe_forest, config.num_bins)?.subset
        }
        other => return Err(Error::Config(format!("unsupported selector {other}"))),
    };
    if subset.is_empty() {
        return Err(Error::data(format!("{} selected no features", config.selector)));
    }
    log::info!(
        "{}: {} selected {} of {k} features",
        config.name,
        config.selector,
        subset.len()
    );
    Ok(subset)
}
