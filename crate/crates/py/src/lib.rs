//! Python bindings for tspipe.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tspipe::bench::{self, Metric, SeedRule, TrialPlan};
use tspipe::features::{self, WindowConfig};
use tspipe::learners::{FittedModel, LearnerSpec, NativeLearner};
use tspipe::preprocess::{self, AggregatorConfig, ImputerConfig, MonotonicConfig, OutlierConfig};
use tspipe::tsclassifier::{self as tsc, ClassifierConfig};
use tspipe::{DateFormat, DateInterval, Error, FeatureTable, TSFrame, TimeStamp};

create_exception!(pytspipe, TspipeError, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::Config(_) => PyValueError::new_err(e.to_string()),
        _ => TspipeError::new_err(e.to_string()),
    }
}

fn interval(spec: &str) -> PyResult<DateInterval> {
    spec.parse().map_err(to_py)
}

fn dateformat(pattern: &str) -> PyResult<DateFormat> {
    DateFormat::new(pattern).map_err(to_py)
}

/// A date/value series. Timestamps are exchanged as strings in a date format.
#[pyclass(name = "Series", frozen)]
struct PySeries {
    inner: TSFrame,
}

#[pymethods]
impl PySeries {
    /// Regular series starting at `start` (parsed with `dateformat`), one
    /// value per `interval`; `None` marks a missing value.
    #[staticmethod]
    #[pyo3(signature = (start, interval_spec, values, dateformat_pattern = "dd/mm/yyyy HH:MM"))]
    fn regular(start: &str, interval_spec: &str, values: Vec<Option<f64>>, dateformat_pattern: &str) -> PyResult<Self> {
        let fmt = dateformat(dateformat_pattern)?;
        let ts: TimeStamp = fmt
            .parse(start)
            .ok_or_else(|| PyValueError::new_err(format!("{start:?} does not match {dateformat_pattern:?}")))?;
        Ok(PySeries {
            inner: TSFrame::regular(ts, interval(interval_spec)?, &values),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (path, dateformat_pattern = "dd/mm/yyyy HH:MM"))]
    fn read_csv(path: PathBuf, dateformat_pattern: &str) -> PyResult<Self> {
        let inner = tspipe::ingest::read_csv_datetime(&path, &dateformat(dateformat_pattern)?).map_err(to_py)?;
        Ok(PySeries { inner })
    }

    #[pyo3(signature = (path, dateformat_pattern = "dd/mm/yyyy HH:MM"))]
    fn write_csv(&self, path: PathBuf, dateformat_pattern: &str) -> PyResult<()> {
        tspipe::ingest::write_csv_datetime(&self.inner, &path, &dateformat(dateformat_pattern)?).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Series(len={}, missing={})",
            self.inner.len(),
            self.inner.missing_count()
        )
    }

    fn values(&self) -> Vec<Option<f64>> {
        self.inner.values()
    }

    #[pyo3(signature = (dateformat_pattern = "dd/mm/yyyy HH:MM"))]
    fn timestamps(&self, dateformat_pattern: &str) -> PyResult<Vec<String>> {
        let fmt = dateformat(dateformat_pattern)?;
        Ok(self.inner.timestamps().iter().map(|t| fmt.format(t)).collect())
    }

    fn missing_count(&self) -> usize {
        self.inner.missing_count()
    }

    #[pyo3(signature = (interval_spec = "1h"))]
    fn aggregate(&self, interval_spec: &str) -> PyResult<Self> {
        let inner =
            preprocess::aggregate(&self.inner, &AggregatorConfig::new(interval(interval_spec)?)).map_err(to_py)?;
        Ok(PySeries { inner })
    }

    /// Returns `(series, passes, remaining)`.
    #[pyo3(signature = (interval_spec = "1h", k = 1, max_passes = 10))]
    fn impute(&self, interval_spec: &str, k: usize, max_passes: usize) -> PyResult<(Self, usize, usize)> {
        let cfg = ImputerConfig {
            k,
            max_passes,
            ..ImputerConfig::new(interval(interval_spec)?)
        };
        let out = preprocess::impute_knn(&self.inner, &cfg).map_err(to_py)?;
        Ok((PySeries { inner: out.frame }, out.passes, out.remaining))
    }

    fn normalize_monotonic(&self) -> PyResult<Self> {
        let inner = preprocess::normalize_monotonic(&self.inner, &MonotonicConfig::default()).map_err(to_py)?;
        Ok(PySeries { inner })
    }

    #[pyo3(signature = (interval_spec = "1h", fence_multiplier = 1.5))]
    fn remove_outliers(&self, interval_spec: &str, fence_multiplier: f64) -> PyResult<Self> {
        let cfg = OutlierConfig {
            fence_multiplier,
            ..OutlierConfig::new(interval(interval_spec)?)
        };
        let inner = preprocess::remove_outliers(&self.inner, &cfg).map_err(to_py)?;
        Ok(PySeries { inner })
    }

    /// Statistics as a dict in schema order; NaN statistics stay NaN.
    #[pyo3(signature = (processmissing = true))]
    fn stats<'py>(&self, py: Python<'py>, processmissing: bool) -> PyResult<Bound<'py, PyDict>> {
        let sv = features::statify(&self.inner, processmissing).map_err(to_py)?;
        let d = PyDict::new(py);
        for (name, v) in sv.entries() {
            d.set_item(name, v)?;
        }
        Ok(d)
    }

    #[pyo3(signature = (size, stride = 1, ahead = 1))]
    fn matrify(&self, size: usize, stride: usize, ahead: usize) -> PyResult<PyTable> {
        let cfg = WindowConfig::new(size, stride, ahead).map_err(to_py)?;
        Ok(PyTable {
            inner: features::matrify(&self.inner, &cfg).map_err(to_py)?,
        })
    }

    #[pyo3(signature = (width = tspipe::plot::DEFAULT_WIDTH, height = tspipe::plot::DEFAULT_HEIGHT))]
    fn to_svg(&self, width: u32, height: u32) -> PyResult<String> {
        tspipe::plot::render_svg(&self.inner, width, height).map_err(to_py)
    }
}

/// A feature table with optional labels.
#[pyclass(name = "FeatureTable", frozen)]
struct PyTable {
    inner: FeatureTable,
}

#[pymethods]
impl PyTable {
    #[new]
    #[pyo3(signature = (names, rows, labels = None))]
    fn new(names: Vec<String>, rows: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        Ok(PyTable {
            inner: FeatureTable::from_rows(names, &rows, labels).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn load_csv(path: PathBuf) -> PyResult<Self> {
        Ok(PyTable {
            inner: FeatureTable::load_csv(&path).map_err(to_py)?,
        })
    }

    fn save_csv(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save_csv(&path).map_err(to_py)
    }

    fn names(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    fn labels(&self) -> Option<Vec<String>> {
        self.inner.labels().map(<[String]>::to_vec)
    }

    /// Numeric rows; missing cells are NaN.
    fn rows(&self) -> PyResult<Vec<Vec<f64>>> {
        self.inner.numeric_rows().map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.nrows()
    }

    fn __repr__(&self) -> String {
        format!(
            "FeatureTable(rows={}, cols={}, labelled={})",
            self.inner.nrows(),
            self.inner.ncols(),
            self.inner.labels().is_some()
        )
    }
}

/// A trained learner.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    inner: FittedModel,
}

#[pymethods]
impl PyModel {
    fn predict(&self, table: &PyTable) -> PyResult<Vec<String>> {
        self.inner.predict(&table.inner.without_labels()).map_err(to_py)
    }

    fn classes(&self) -> Vec<String> {
        self.inner.model.classes()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("model serializes")
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: FittedModel = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyModel { inner })
    }
}

fn spec_from_json(spec: &str) -> PyResult<LearnerSpec> {
    serde_json::from_str(spec).map_err(|e| PyValueError::new_err(format!("learner spec: {e}")))
}

/// Train a learner described by a JSON spec such as
/// `{"type": "forest", "num_trees": 50}` on a labelled table.
#[pyfunction]
fn train(spec: &str, table: &PyTable) -> PyResult<PyModel> {
    let labels = table.inner.labels().ok_or_else(|| to_py(Error::MissingLabels))?;
    let fitted = NativeLearner::new(spec_from_json(spec)?)
        .train(&table.inner.without_labels(), labels)
        .map_err(to_py)?;
    let inner = fitted.fitted().expect("trained").clone();
    Ok(PyModel { inner })
}

#[pyfunction]
fn accuracy(actual: Vec<String>, predicted: Vec<String>) -> PyResult<f64> {
    bench::accuracy(&actual, &predicted).map_err(to_py)
}

#[pyfunction]
fn mean_fscore(actual: Vec<String>, predicted: Vec<String>) -> PyResult<f64> {
    bench::mean_fscore(&actual, &predicted).map_err(to_py)
}

/// Benchmark named learner specs (a JSON object) over seeded holdout
/// trials. Returns the report as CSV text.
#[pyfunction]
#[pyo3(signature = (registry, table, trials = 3, test_fraction = 0.2, seed = None, parallel = true, metric = "accuracy"))]
fn benchmark(
    registry: &str,
    table: &PyTable,
    trials: usize,
    test_fraction: f64,
    seed: Option<u64>,
    parallel: bool,
    metric: &str,
) -> PyResult<String> {
    let map: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(registry).map_err(|e| PyValueError::new_err(format!("registry: {e}")))?;
    let models = map
        .into_iter()
        .map(|(name, v)| {
            serde_json::from_value(v)
                .map(|s| (name.clone(), s))
                .map_err(|e| PyValueError::new_err(format!("learner {name:?}: {e}")))
        })
        .collect::<PyResult<Vec<(String, LearnerSpec)>>>()?;
    let metric: Metric = metric.parse().map_err(to_py)?;
    let plan = TrialPlan::new(
        trials,
        test_fraction,
        seed.map_or(SeedRule::TimesThree, SeedRule::Mixed),
    );
    let report = bench::run_benchmark(&models, &table.inner, &plan, metric, parallel).map_err(to_py)?;
    Ok(report.to_csv())
}

/// Train the sensor-type classifier; writes the model into `modeldirectory`
/// and returns the class labels.
#[pyfunction]
#[pyo3(signature = (trdirectory, modeldirectory, num_trees = 75, seed = 0, dateformat_pattern = "dd/mm/yyyy HH:MM", interval_spec = "1h"))]
fn train_classifier(
    trdirectory: PathBuf,
    modeldirectory: PathBuf,
    num_trees: usize,
    seed: u64,
    dateformat_pattern: &str,
    interval_spec: &str,
) -> PyResult<Vec<String>> {
    let cfg = ClassifierConfig {
        num_trees,
        seed,
        dateformat: dateformat(dateformat_pattern)?,
        interval: interval(interval_spec)?,
        ..ClassifierConfig::new(&trdirectory, &trdirectory, &modeldirectory)
    };
    Ok(tsc::train(&cfg).map_err(to_py)?.meta.labels)
}

/// Classify every CSV file in `tstdirectory` with the model saved in
/// `modeldirectory`. Returns `(filename, true_label, predicted)` tuples.
#[pyfunction]
fn classify(tstdirectory: PathBuf, modeldirectory: PathBuf) -> PyResult<Vec<(String, Option<String>, String)>> {
    let artifact = tsc::load_model(&modeldirectory.join(tsc::MODEL_FILE)).map_err(to_py)?;
    let cfg = ClassifierConfig {
        dateformat: dateformat(&artifact.meta.config.dateformat)?,
        interval: interval(&artifact.meta.config.interval)?,
        ..ClassifierConfig::new(&modeldirectory, &tstdirectory, &modeldirectory)
    };
    let table = tsc::classify(&cfg, &artifact).map_err(to_py)?;
    Ok(table
        .rows
        .into_iter()
        .map(|p| (p.filename, p.true_label, p.predicted))
        .collect())
}

#[pyfunction]
fn label_from_filename(name: &str) -> PyResult<String> {
    tsc::label_from_filename(name).map_err(to_py)
}

/// Write synthetic labelled sensor files under `root/train` and `root/test`.
#[pyfunction]
#[pyo3(signature = (root, seed = 0, train_per_class = 10, test_per_class = 5))]
fn write_synthetic(
    root: PathBuf,
    seed: u64,
    train_per_class: usize,
    test_per_class: usize,
) -> PyResult<(PathBuf, PathBuf)> {
    tspipe::synth::write_classifier_dirs(&root, seed, train_per_class, test_per_class).map_err(to_py)
}

#[pymodule]
fn pytspipe(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TspipeError", m.py().get_type::<TspipeError>())?;
    m.add_class::<PySeries>()?;
    m.add_class::<PyTable>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(mean_fscore, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark, m)?)?;
    m.add_function(wrap_pyfunction!(train_classifier, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(label_from_filename, m)?)?;
    m.add_function(wrap_pyfunction!(write_synthetic, m)?)?;
    Ok(())
}
