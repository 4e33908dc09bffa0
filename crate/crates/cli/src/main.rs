use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use iids_core::data::{load_csv, load_feature_table, write_csv, write_predictions, DEFAULT_LABEL_COLUMN};
use iids_core::forest::predict;
use iids_core::pipeline::{
    emit_report, generate_synthetic, load_model, load_result, run_batch, save_model, save_result,
    BatchConfig, ExperimentResult, SyntheticSpec,
};
use iids_core::{Error, ErrorKind};

/// Train and evaluate random-forest intrusion detectors on flow statistics.
///
/// Exit codes: 0 success, 1 i/o or other failure, 2 configuration or usage
/// error, 3 data error, 4 pipeline stage failure.
#[derive(Parser, Debug)]
#[command(name = "iids", version)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a batch of frameworks and write results, models and reports.
    Run {
        /// Batch configuration file (key = value lines); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Input CSV with one label column.
        #[arg(long)]
        data: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Master seed; overrides the file's `seed` key.
        #[arg(long)]
        seed: Option<u64>,
        /// Extra `key=value` overrides, applied after the file and --seed.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Write a synthetic Gaussian-cluster dataset as CSV.
    Generate {
        /// Per-class sample counts, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<usize>,
        #[arg(long, default_value_t = 4)]
        informative: usize,
        #[arg(long, default_value_t = 0)]
        noise: usize,
        #[arg(long, default_value_t = 3.0)]
        separation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = DEFAULT_LABEL_COLUMN)]
        label_column: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge result files (or directories of them) into one report.
    Report {
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Score a CSV with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = DEFAULT_LABEL_COLUMN)]
        label_column: String,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Stage => 4,
        ErrorKind::Io => 1,
    }
}

fn file_stem(r: &ExperimentResult) -> String {
    format!("{}-{}", r.framework.name.replace(':', "-"), r.framework.level)
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn run(config: Option<PathBuf>, data: PathBuf, out: PathBuf, seed: Option<u64>, overrides: Vec<String>) -> Result<(), Error> {
    let mut batch = match &config {
        Some(path) => BatchConfig::load(path)?,
        None => BatchConfig::default(),
    };
    if let Some(seed) = seed {
        batch.seed = seed;
    }
    for o in &overrides {
        batch.apply_override(o)?;
    }
    let hierarchy = batch.hierarchy.load()?;
    let dataset = load_csv(&data, &batch.label_column)?;
    log::info!(
        "loaded {} rows, {} features, {} classes from {}",
        dataset.n_samples(),
        dataset.n_features(),
        dataset.n_classes(),
        data.display()
    );

    let runs = run_batch(&dataset, hierarchy.as_ref(), &batch)?;

    let results_dir = out.join("results");
    let models_dir = out.join("models");
    let features_dir = out.join("features");
    for dir in [&results_dir, &models_dir, &features_dir] {
        create_dir(dir)?;
    }
    for (i, t) in runs.iter().enumerate() {
        let stem = format!("{i:02}-{}", file_stem(&t.result));
        save_result(&t.result, results_dir.join(format!("{stem}.result")))?;
        save_model(&t.model, Some(&t.scaler), models_dir.join(format!("{stem}.iids")))?;
        let subset = t.result.selected_features.to_text(&t.result.feature_names);
        write_text(&features_dir.join(format!("{stem}.txt")), &subset)?;
        let m = &t.result.metrics;
        println!(
            "{:<16} {:<9} macro-F1 {:.4}  accuracy {:.4}  kappa {:.4}{}",
            t.result.framework.name,
            t.result.framework.level.to_string(),
            m.macro_f1,
            m.accuracy,
            m.kappa,
            t.result
                .gain
                .as_ref()
                .map_or_else(String::new, |g| format!("  USC gain {:+.4}", g.average_gain))
        );
    }
    let results: Vec<ExperimentResult> = runs.into_iter().map(|t| t.result).collect();
    emit_report(&results, &out)?;
    Ok(())
}

fn collect_results(inputs: &[PathBuf]) -> Result<Vec<ExperimentResult>, Error> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(input)
                .map_err(|e| Error::Io {
                    path: input.clone(),
                    source: e,
                })?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "result"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    if files.is_empty() {
        return Err(Error::Data("no result files found".into()));
    }
    files.iter().map(load_result).collect()
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            config,
            data,
            out,
            seed,
            overrides,
        } => run(config, data, out, seed, overrides),
        Command::Generate {
            counts,
            informative,
            noise,
            separation,
            seed,
            label_column,
            out,
        } => {
            let data = generate_synthetic(&SyntheticSpec {
                class_counts: counts,
                k_informative: informative,
                k_noise: noise,
                class_separation: separation,
                seed,
            })
            .map_err(|e| Error::Config(e.to_string()))?;
            write_csv(&data, &out, &label_column)
        }
        Command::Report { out, inputs } => {
            let results = collect_results(&inputs)?;
            for path in emit_report(&results, &out)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Predict {
            model,
            input,
            out,
            label_column,
        } => {
            let (forest, scaler) = load_model(&model)?;
            let mut table = load_feature_table(&input, &forest.feature_names, &label_column)?;
            if let Some(scaler) = &scaler {
                for i in 0..table.features.nrows() {
                    scaler.transform_row(table.features.row_mut(i));
                }
            }
            let predicted = predict(&forest, &table.features)?;
            let names: Vec<&str> = predicted
                .iter()
                .map(|&c| forest.class_names[c].as_str())
                .collect();
            write_predictions(&out, &names, table.labels.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
