//! Sensor-type classification from directories of date/value CSV files.
//!
//! Each file becomes one row of statistics; its label is the file name with
//! the extension and any trailing digits removed (`Energy10.csv` is
//! `Energy`). A random forest learns the mapping and is persisted to the
//! model directory together with the extracted training table.

mod artifact;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::{block_stats, missing_blocks, stat_names, stats_table, value_stats, StatVector};
use crate::ingest::read_csv_datetime;
use crate::learners::{encode_labels, ForestConfig, Model};
use crate::preprocess::{aggregate, impute_knn, AggregatorConfig, ImputerConfig};
use crate::series::TSFrame;
use crate::table::FeatureTable;
use crate::time::{DateFormat, DateInterval};

pub use artifact::{load_model, save_model, ArtifactMeta, ConfigEcho, ModelArtifact, FORMAT_VERSION, MAGIC};

pub const MODEL_FILE: &str = "model.tspm";
pub const FEATURES_FILE: &str = "features.csv";
pub const WARNINGS_FILE: &str = "extraction_warnings.txt";

/// Strips directories, the extension and the trailing run of digits.
pub fn label_from_filename(name: &str) -> Result<String> {
    let base = Path::new(name)
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let stem = match base.rfind('.') {
        Some(i) if i > 0 => &base[..i],
        _ => base.as_str(),
    };
    let label = stem.trim_end_matches(|c: char| c.is_ascii_digit());
    if label.is_empty() {
        return Err(Error::UnlabeledFile(name.to_string()));
    }
    Ok(label.to_string())
}

#[derive(Debug, Clone)]
pub struct ClassifierConfig {
    pub trdirectory: PathBuf,
    pub tstdirectory: PathBuf,
    pub modeldirectory: PathBuf,
    pub num_trees: usize,
    pub dateformat: DateFormat,
    pub interval: DateInterval,
    pub seed: u64,
}

impl ClassifierConfig {
    pub fn new(
        trdirectory: impl Into<PathBuf>,
        tstdirectory: impl Into<PathBuf>,
        modeldirectory: impl Into<PathBuf>,
    ) -> Self {
        ClassifierConfig {
            trdirectory: trdirectory.into(),
            tstdirectory: tstdirectory.into(),
            modeldirectory: modeldirectory.into(),
            num_trees: 75,
            dateformat: DateFormat::default(),
            interval: DateInterval::hour(),
            seed: 0,
        }
    }

    fn forest(&self) -> ForestConfig {
        ForestConfig::with_trees(self.num_trees, self.seed)
    }
}

/// Statistics of one raw series. Block statistics describe the gaps of the
/// aggregated series before imputation; value statistics are taken after
/// imputation has filled it.
pub fn series_features(raw: &TSFrame, interval: DateInterval) -> Result<StatVector> {
    let grid = aggregate(raw, &AggregatorConfig::new(interval))?;
    let blocks = block_stats(&missing_blocks(&grid));
    let cfg = ImputerConfig {
        max_passes: grid.len().max(1),
        ..ImputerConfig::new(interval)
    };
    let filled = impute_knn(&grid, &cfg)?.frame;
    Ok(StatVector {
        values: value_stats(&filled.present())?,
        blocks: Some(blocks),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionFailure {
    pub file: String,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct ExtractedFeatures {
    /// One row per extracted file, without labels.
    pub table: FeatureTable,
    pub files: Vec<String>,
    /// Label derived from each file name, when there is one.
    pub labels: Vec<Option<String>>,
    pub failures: Vec<ExtractionFailure>,
}

impl ExtractedFeatures {
    /// Labels of all rows, or `None` if any row is unlabeled.
    pub fn all_labels(&self) -> Option<Vec<String>> {
        self.labels.iter().cloned().collect()
    }

    pub fn labeled_table(&self) -> Result<FeatureTable> {
        self.table
            .clone()
            .with_labels(Some(self.all_labels().ok_or(Error::MissingLabels)?))
    }

    pub fn warnings_text(&self) -> String {
        self.failures
            .iter()
            .map(|f| format!("{}: {}\n", f.file, f.error))
            .collect()
    }
}

fn csv_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if is_csv && path.is_file() {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// Extracts one stat row per `*.csv` file in `dir`, ordered by file name.
/// Files that fail are reported in `failures`; with `require_labels`, a
/// file whose name yields no label also counts as a failure.
pub fn extract_features_from_directory(
    dir: &Path,
    dateformat: &DateFormat,
    interval: DateInterval,
    require_labels: bool,
) -> Result<ExtractedFeatures> {
    let files = csv_files(dir)?;
    if files.is_empty() {
        return Err(Error::NoData(format!("no CSV files in {}", dir.display())));
    }
    type Extracted = Result<(StatVector, Option<String>)>;
    let results: Vec<(String, Extracted)> = files
        .par_iter()
        .map(|path| {
            let name = path.file_name().expect("file").to_string_lossy().into_owned();
            let label = label_from_filename(&name);
            let out = match (require_labels, label) {
                (true, Err(e)) => Err(e),
                (_, label) => read_csv_datetime(path, dateformat)
                    .and_then(|raw| series_features(&raw, interval))
                    .map(|s| (s, label.ok())),
            };
            (name, out)
        })
        .collect();

    let mut rows = Vec::new();
    let mut names = Vec::new();
    let mut labels = Vec::new();
    let mut failures = Vec::new();
    for (name, r) in results {
        match r {
            Ok((stats, label)) => {
                rows.push(stats);
                names.push(name);
                labels.push(label);
            }
            Err(e) => {
                log::warn!("skipping {name}: {e}");
                failures.push(ExtractionFailure {
                    file: name,
                    error: e.to_string(),
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::NoData(format!(
            "feature extraction failed for every file in {}",
            dir.display()
        )));
    }
    Ok(ExtractedFeatures {
        table: stats_table(&rows, None)?,
        files: names,
        labels,
        failures,
    })
}

/// Extracts the training directory, fits the forest and writes
/// `model.tspm`, `features.csv` and `extraction_warnings.txt` into the
/// model directory.
pub fn train(cfg: &ClassifierConfig) -> Result<ModelArtifact> {
    if cfg.num_trees == 0 {
        return Err(Error::Config("num_trees must be at least 1".into()));
    }
    let extracted = extract_features_from_directory(&cfg.trdirectory, &cfg.dateformat, cfg.interval, true)?;
    let labels = extracted.all_labels().expect("labels required");
    let (classes, _) = encode_labels(&labels);
    if classes.len() < 2 {
        return Err(Error::DegenerateLabels(format!(
            "training directory holds a single class {:?}",
            classes[0]
        )));
    }
    let rows = extracted.table.numeric_rows()?;
    let model = Model::train(&crate::learners::LearnerSpec::Forest(cfg.forest()), &rows, &labels)?;
    let artifact = ModelArtifact::new(extracted.table.names().to_vec(), model, ConfigEcho::from(cfg));

    fs::create_dir_all(&cfg.modeldirectory).map_err(|e| Error::io(&cfg.modeldirectory, e))?;
    save_model(&artifact, &cfg.modeldirectory.join(MODEL_FILE))?;
    extracted
        .labeled_table()?
        .save_csv(&cfg.modeldirectory.join(FEATURES_FILE))?;
    let warnings = cfg.modeldirectory.join(WARNINGS_FILE);
    fs::write(&warnings, extracted.warnings_text()).map_err(|e| Error::io(&warnings, e))?;
    Ok(artifact)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub filename: String,
    pub true_label: Option<String>,
    pub predicted: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PredictionTable {
    pub rows: Vec<Prediction>,
}

impl PredictionTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("filename,true_label,predicted\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                r.filename,
                r.true_label.as_deref().unwrap_or(""),
                r.predicted
            ));
        }
        out
    }
}

/// Predicts every file of the test directory with a trained artifact.
pub fn classify(cfg: &ClassifierConfig, artifact: &ModelArtifact) -> Result<PredictionTable> {
    artifact.check_schema(&stat_names(true))?;
    let extracted = extract_features_from_directory(&cfg.tstdirectory, &cfg.dateformat, cfg.interval, false)?;
    let predicted = artifact.predict(&extracted.table)?;
    Ok(PredictionTable {
        rows: extracted
            .files
            .into_iter()
            .zip(extracted.labels)
            .zip(predicted)
            .map(|((filename, true_label), predicted)| Prediction {
                filename,
                true_label,
                predicted,
            })
            .collect(),
    })
}

pub fn testing_accuracy(pt: &PredictionTable) -> Result<f64> {
    if pt.rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut correct = 0usize;
    for r in &pt.rows {
        match &r.true_label {
            Some(t) => correct += usize::from(*t == r.predicted),
            None => return Err(Error::UnlabeledFile(r.filename.clone())),
        }
    }
    Ok(correct as f64 / pt.rows.len() as f64)
}
