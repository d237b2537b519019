//! Composable fit/transform pipelines for date/value sensor series.
//!
//! The crate is organised around two kinds of [`transformer`]s: filters,
//! which clean and featurize data, and learners, which map feature tables to
//! labels. Filters cover interval aggregation, symmetric k-NN imputation,
//! monotonic normalisation, outlier repair, statistics, sliding windows and
//! tabular conditioning; learners are native decision trees, random forests,
//! SAMME boosting and meta-ensembles. On top sit a directory-driven sensor
//! type classifier and a seeded benchmark harness.

pub mod bench;
pub mod error;
pub mod features;
pub mod ingest;
pub mod learners;
pub mod plot;
pub mod preprocess;
pub mod rng;
pub mod series;
pub mod stats;
pub mod synth;
pub mod table;
pub mod time;
pub mod transformer;
pub mod tsclassifier;

pub use error::{Error, Result};
pub use series::{Observation, TSFrame};
pub use table::{Column, FeatureTable};
pub use time::{DateFormat, DateInterval, IntervalUnit, TimeStamp};
pub use transformer::{Data, Filter, Learner, Pipeline, Transformer, TransformerKind};
