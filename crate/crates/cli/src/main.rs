use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use tspipe::bench::{run_benchmark, Metric, SeedRule, TrialPlan};
use tspipe::features::statify;
use tspipe::ingest::{read_csv_datetime, write_datetime};
use tspipe::learners::{BoostConfig, ForestConfig, LearnerSpec, TreeConfig};
use tspipe::plot::{render_svg, DEFAULT_HEIGHT, DEFAULT_WIDTH};
use tspipe::preprocess::{
    aggregate, impute_knn, normalize_monotonic, remove_outliers, AggregatorConfig, ImputeOutcome, ImputerConfig,
    MonotonicConfig, OutlierConfig,
};
use tspipe::tsclassifier::{self as tsc, ClassifierConfig, MODEL_FILE};
use tspipe::{DateFormat, DateInterval, Error, FeatureTable, Result, TSFrame};

#[derive(Parser)]
#[command(
    name = "tspipe",
    version,
    about = "Clean, summarize, plot and classify date/value sensor series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the statistics of a series as JSON.
    Stats(StatsArgs),
    /// Aggregate a series and optionally impute, normalize and repair it.
    Clean(CleanArgs),
    /// Render a series as an SVG line chart.
    Plot(PlotArgs),
    /// Train the sensor-type classifier on a directory of CSV files.
    TscTrain(TscTrainArgs),
    /// Classify a directory of CSV files with a trained model.
    TscClassify(TscClassifyArgs),
    /// Compare learners over seeded holdout trials.
    Bench(BenchArgs),
    /// Write synthetic classifier directories.
    Synth(SynthArgs),
}

#[derive(Args)]
struct SeriesArgs {
    input: PathBuf,
    #[arg(long, default_value = "dd/mm/yyyy HH:MM")]
    dateformat: DateFormat,
    /// Aggregation interval such as 30m, 1h or 1d.
    #[arg(long, default_value = "1h")]
    interval: DateInterval,
}

#[derive(Args)]
struct ImputeArgs {
    /// Neighbours per side used by imputation.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Maximum imputation passes.
    #[arg(long, default_value_t = 10)]
    passes: usize,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    series: SeriesArgs,
    #[command(flatten)]
    imputer: ImputeArgs,
    /// Include statistics of missing-value blocks.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    processmissing: bool,
    /// Impute before computing statistics.
    #[arg(long)]
    impute: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CleanArgs {
    #[command(flatten)]
    series: SeriesArgs,
    #[command(flatten)]
    imputer: ImputeArgs,
    #[arg(long)]
    impute: bool,
    /// Difference monotonic counters.
    #[arg(long)]
    monotonic: bool,
    /// Replace values outside the IQR fences.
    #[arg(long)]
    outliers: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    series: SeriesArgs,
    #[command(flatten)]
    imputer: ImputeArgs,
    #[arg(long)]
    impute: bool,
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    width: u32,
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    height: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TscTrainArgs {
    /// Directory of labelled training CSV files.
    #[arg(long)]
    train: PathBuf,
    /// Directory that receives the model and the extracted features.
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 75)]
    num_trees: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "dd/mm/yyyy HH:MM")]
    dateformat: DateFormat,
    #[arg(long, default_value = "1h")]
    interval: DateInterval,
}

#[derive(Args)]
struct TscClassifyArgs {
    /// Directory of CSV files to classify.
    #[arg(long)]
    test: PathBuf,
    /// Directory holding a trained model.
    #[arg(long)]
    model: PathBuf,
    /// Predictions CSV; printed to standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Feature table CSV whose last column is `label`.
    data: PathBuf,
    /// JSON object mapping model names to learner specs.
    #[arg(long)]
    registry: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    /// Base seed; without it trial i uses seed 3i.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    parallel: bool,
    #[arg(long, default_value = "accuracy")]
    metric: Metric,
    /// Report CSV; the aligned table always goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Root directory; `train/` and `test/` are created inside.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    train_per_class: usize,
    #[arg(long, default_value_t = 5)]
    test_per_class: usize,
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes()).map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            })
        }
    }
}

fn load_aggregated(args: &SeriesArgs) -> Result<TSFrame> {
    let raw = read_csv_datetime(&args.input, &args.dateformat)?;
    if raw.is_empty() {
        return Err(Error::Config(format!("{} holds no rows", args.input.display())));
    }
    aggregate(&raw, &AggregatorConfig::new(args.interval))
}

fn impute(ts: &TSFrame, interval: DateInterval, args: &ImputeArgs) -> Result<ImputeOutcome> {
    let cfg = ImputerConfig {
        k: args.k,
        max_passes: args.passes,
        ..ImputerConfig::new(interval)
    };
    impute_knn(ts, &cfg)
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let mut ts = load_aggregated(&args.series)?;
    let mut imputation = None;
    if args.impute {
        let out = impute(&ts, args.series.interval, &args.imputer)?;
        imputation = Some((out.passes, out.remaining));
        ts = out.frame;
    }
    let mut record = statify(&ts, args.processmissing)?.to_json();
    if let (Some((passes, remaining)), Value::Object(map)) = (imputation, &mut record) {
        let mut info = Map::new();
        info.insert("passes".into(), passes.into());
        info.insert("remaining".into(), remaining.into());
        map.insert("imputation".into(), Value::Object(info));
    }
    let text = serde_json::to_string_pretty(&record).expect("json value") + "\n";
    emit(args.out.as_deref(), &text)
}

fn cmd_clean(args: CleanArgs) -> Result<()> {
    let mut ts = load_aggregated(&args.series)?;
    if args.impute {
        ts = impute(&ts, args.series.interval, &args.imputer)?.frame;
    }
    if args.monotonic {
        ts = normalize_monotonic(&ts, &MonotonicConfig::default())?;
    }
    if args.outliers {
        ts = remove_outliers(&ts, &OutlierConfig::new(args.series.interval))?;
    }
    let mut buf = Vec::new();
    write_datetime(&ts, &mut buf, &args.series.dateformat).expect("in-memory write");
    emit(args.out.as_deref(), &String::from_utf8(buf).expect("utf-8 csv"))
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let mut ts = load_aggregated(&args.series)?;
    if args.impute {
        ts = impute(&ts, args.series.interval, &args.imputer)?.frame;
    }
    emit(args.out.as_deref(), &render_svg(&ts, args.width, args.height)?)
}

fn cmd_tsc_train(args: TscTrainArgs) -> Result<()> {
    let cfg = ClassifierConfig {
        num_trees: args.num_trees,
        seed: args.seed,
        dateformat: args.dateformat,
        interval: args.interval,
        ..ClassifierConfig::new(&args.train, &args.train, &args.model)
    };
    let artifact = tsc::train(&cfg)?;
    let warnings = fs::read_to_string(cfg.modeldirectory.join(tsc::WARNINGS_FILE)).unwrap_or_default();
    for line in warnings.lines() {
        eprintln!("warning: {line}");
    }
    println!(
        "trained {} trees on {} classes ({}); {} file(s) skipped",
        args.num_trees,
        artifact.meta.labels.len(),
        artifact.meta.labels.join(", "),
        warnings.lines().count()
    );
    Ok(())
}

fn cmd_tsc_classify(args: TscClassifyArgs) -> Result<()> {
    let artifact = tsc::load_model(&args.model.join(MODEL_FILE))?;
    let cfg = ClassifierConfig {
        dateformat: artifact.meta.config.dateformat.parse()?,
        interval: artifact.meta.config.interval.parse()?,
        ..ClassifierConfig::new(&args.model, &args.test, &args.model)
    };
    let predictions = tsc::classify(&cfg, &artifact)?;
    emit(args.out.as_deref(), &predictions.to_csv())?;
    match tsc::testing_accuracy(&predictions) {
        Ok(acc) => eprintln!("testing accuracy: {acc}"),
        Err(e) => eprintln!("testing accuracy unavailable: {e}"),
    }
    Ok(())
}

fn default_registry(seed: u64) -> Vec<(String, LearnerSpec)> {
    vec![
        ("forest".into(), LearnerSpec::Forest(ForestConfig::with_trees(75, seed))),
        (
            "prunedtree".into(),
            LearnerSpec::Tree(TreeConfig {
                prune_purity: 0.9,
                ..Default::default()
            }),
        ),
        (
            "adaboost".into(),
            LearnerSpec::Adaboost(BoostConfig {
                seed,
                ..Default::default()
            }),
        ),
        ("majority".into(), LearnerSpec::Majority),
    ]
}

fn load_registry(path: &Path) -> Result<Vec<(String, LearnerSpec)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let map: Map<String, Value> =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    map.into_iter()
        .map(|(name, v)| {
            serde_json::from_value(v)
                .map(|spec| (name.clone(), spec))
                .map_err(|e| Error::Config(format!("{}: learner {name:?}: {e}", path.display())))
        })
        .collect()
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let data = FeatureTable::load_csv(&args.data)?;
    let registry = match &args.registry {
        Some(p) => load_registry(p)?,
        None => default_registry(args.seed.unwrap_or(0)),
    };
    let rule = args.seed.map_or(SeedRule::TimesThree, SeedRule::Mixed);
    let plan = TrialPlan::new(args.trials, args.test_fraction, rule);
    let report = run_benchmark(&registry, &data, &plan, args.metric, args.parallel)?;
    for f in &report.failures {
        eprintln!("warning: {} failed on trial {}: {}", f.model, f.trial, f.error);
    }
    print!("{}", report.to_text());
    if let Some(out) = &args.out {
        emit(Some(out), &report.to_csv())?;
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let (train, test) =
        tspipe::synth::write_classifier_dirs(&args.out, args.seed, args.train_per_class, args.test_per_class)?;
    println!("{}\n{}", train.display(), test.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Stats(a) => cmd_stats(a),
        Command::Clean(a) => cmd_clean(a),
        Command::Plot(a) => cmd_plot(a),
        Command::TscTrain(a) => cmd_tsc_train(a),
        Command::TscClassify(a) => cmd_tsc_classify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
