//! Series-repair filters: interval aggregation, symmetric k-NN imputation,
//! monotonic normalisation and outlier repair.

mod aggregate;
mod impute;
mod monotonic;
mod outliers;

pub use aggregate::{aggregate, AggregatorConfig, DateValgator};
pub use impute::{impute_knn, impute_pass, DateValNNer, ImputeOutcome, ImputerConfig};
pub use monotonic::{detect_series_kind, normalize_as, normalize_monotonic, MonotonicConfig, Monotonicer, SeriesKind};
pub use outliers::{outlier_fences, remove_outliers, Fences, OutlierConfig, Outliernicer};
