//! Featurization: series statistics, sliding-window matrices, calendar
//! features and tabular conditioning.

mod statify;
mod tabular;
mod window;

pub use statify::{
    block_stats, lag1_autocorrelation, missing_blocks, stat_names, statify, stats_table, value_stats, BlockStats,
    StatVector, Statifier, ValueStats, BLOCK_STATS, STAT_SCHEMA_VERSION, VALUE_STATS,
};
pub use tabular::{
    fit_encode, fit_impute, fit_scale, impute_columns, one_hot_encode, standard_scale, ColumnImputer, EncoderParams,
    ImputerParams, OneHotEncoder, ScalerParams, StandardScaler,
};
pub use window::{
    date_value_matrix, dateify, matrify, Dateifier, Matrifier, WindowConfig, DATE_FEATURES, TARGET_COLUMN,
};
