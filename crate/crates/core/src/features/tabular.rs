//! Column-wise conditioning of feature tables: one-hot encoding, median
//! imputation and standard scaling.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;
use crate::table::{Column, FeatureTable};
use crate::transformer::{Data, Filter};

fn check_schema(expected: &[String], table: &FeatureTable, who: &str) -> Result<()> {
    if expected != table.names() {
        return Err(Error::Schema(format!(
            "{who} fitted on columns {expected:?}, got {:?}",
            table.names()
        )));
    }
    Ok(())
}

fn rebuild(table: &FeatureTable, names: Vec<String>, columns: Vec<Column>) -> Result<FeatureTable> {
    let out = FeatureTable::new(names, columns, table.labels().map(<[String]>::to_vec))?;
    if out.ncols() == 0 {
        return FeatureTable::empty_rows(table.nrows()).with_labels(table.labels().map(<[String]>::to_vec));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderParams {
    columns: Vec<String>,
    /// Sorted categories per column; `None` for numeric columns.
    categories: Vec<Option<Vec<String>>>,
}

pub fn fit_encode(table: &FeatureTable) -> EncoderParams {
    let categories = table
        .columns()
        .iter()
        .map(|c| match c {
            Column::Numeric(_) => None,
            Column::Categorical(v) => Some(
                v.iter()
                    .flatten()
                    .cloned()
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
            ),
        })
        .collect();
    EncoderParams {
        columns: table.names().to_vec(),
        categories,
    }
}

/// Replaces each categorical column with one 0/1 column per fit-time
/// category, named `column=category`. Missing or unseen categories encode
/// as all zeros.
pub fn one_hot_encode(params: &EncoderParams, table: &FeatureTable) -> Result<FeatureTable> {
    check_schema(&params.columns, table, "one-hot encoder")?;
    let mut names = Vec::new();
    let mut columns = Vec::new();
    for ((name, col), cats) in table.names().iter().zip(table.columns()).zip(&params.categories) {
        match (col, cats) {
            (Column::Numeric(_), None) => {
                names.push(name.clone());
                columns.push(col.clone());
            }
            (Column::Categorical(v), Some(cats)) => {
                for cat in cats {
                    names.push(format!("{name}={cat}"));
                    columns.push(Column::Numeric(
                        v.iter()
                            .map(|x| Some(if x.as_deref() == Some(cat.as_str()) { 1.0 } else { 0.0 }))
                            .collect(),
                    ));
                }
            }
            _ => return Err(Error::Schema(format!("column {name:?} changed type since fit"))),
        }
    }
    rebuild(table, names, columns)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputerParams {
    columns: Vec<String>,
    medians: Vec<Option<f64>>,
}

pub fn fit_impute(table: &FeatureTable) -> Result<ImputerParams> {
    let mut medians = Vec::with_capacity(table.ncols());
    for (name, col) in table.names().iter().zip(table.columns()) {
        medians.push(match col {
            Column::Numeric(v) => {
                let present: Vec<f64> = v.iter().flatten().copied().collect();
                if present.is_empty() {
                    return Err(Error::NoData(format!("column {name:?} has no present values")));
                }
                Some(stats::median(&present))
            }
            Column::Categorical(_) => None,
        });
    }
    Ok(ImputerParams {
        columns: table.names().to_vec(),
        medians,
    })
}

/// Fills missing numeric entries with the fit-time column median.
pub fn impute_columns(params: &ImputerParams, table: &FeatureTable) -> Result<FeatureTable> {
    check_schema(&params.columns, table, "imputer")?;
    let columns = table
        .columns()
        .iter()
        .zip(&params.medians)
        .map(|(col, m)| match (col, m) {
            (Column::Numeric(v), Some(m)) => Column::Numeric(v.iter().map(|x| Some(x.unwrap_or(*m))).collect()),
            (other, _) => other.clone(),
        })
        .collect();
    rebuild(table, table.names().to_vec(), columns)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    columns: Vec<String>,
    /// `(mean, sample std)` per numeric column.
    moments: Vec<Option<(f64, f64)>>,
}

impl ScalerParams {
    pub fn moments(&self) -> &[Option<(f64, f64)>] {
        &self.moments
    }
}

pub fn fit_scale(table: &FeatureTable) -> ScalerParams {
    let moments = table
        .columns()
        .iter()
        .map(|c| match c {
            Column::Numeric(v) => {
                let present: Vec<f64> = v.iter().flatten().copied().collect();
                Some((stats::mean(&present), stats::sample_std(&present)))
            }
            Column::Categorical(_) => None,
        })
        .collect();
    ScalerParams {
        columns: table.names().to_vec(),
        moments,
    }
}

/// `(x - mean) / std` with fit-time moments; zero-variance columns map to 0.
pub fn standard_scale(params: &ScalerParams, table: &FeatureTable) -> Result<FeatureTable> {
    check_schema(&params.columns, table, "scaler")?;
    let columns = table
        .columns()
        .iter()
        .zip(&params.moments)
        .map(|(col, m)| match (col, m) {
            (Column::Numeric(v), Some((mean, std))) => Column::Numeric(
                v.iter()
                    .map(|x| {
                        x.map(|x| {
                            if *std > 0.0 && std.is_finite() {
                                (x - mean) / std
                            } else {
                                0.0
                            }
                        })
                    })
                    .collect(),
            ),
            (other, _) => other.clone(),
        })
        .collect();
    rebuild(table, table.names().to_vec(), columns)
}

macro_rules! table_filter {
    ($(#[$doc:meta])* $name:ident, $label:literal, $params:ty, $fit:expr, $apply:path) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Default)]
        pub struct $name {
            params: Option<$params>,
        }

        impl $name {
            pub fn new() -> Self {
                Self::default()
            }

            pub fn params(&self) -> Option<&$params> {
                self.params.as_ref()
            }
        }

        impl Filter for $name {
            fn name(&self) -> &str {
                $label
            }
            fn is_fitted(&self) -> bool {
                self.params.is_some()
            }
            fn fit(&self, input: &Data) -> Result<Box<dyn Filter>> {
                let table = input.as_table()?;
                if table.nrows() == 0 {
                    return Err(Error::EmptyInput);
                }
                let fit: fn(&FeatureTable) -> Result<$params> = $fit;
                Ok(Box::new($name {
                    params: Some(fit(table)?),
                }))
            }
            fn transform(&self, input: &Data) -> Result<Data> {
                let params = self.params.as_ref().ok_or_else(|| Error::NotFitted($label.into()))?;
                $apply(params, input.as_table()?).map(Data::Table)
            }
            fn clone_box(&self) -> Box<dyn Filter> {
                Box::new(self.clone())
            }
        }
    };
}

table_filter!(
    /// Nominal columns to indicator bits.
    OneHotEncoder, "onehotencoder", EncoderParams, |t| Ok(fit_encode(t)), one_hot_encode
);
table_filter!(
    /// Median imputation of numeric columns.
    ColumnImputer, "imputer", ImputerParams, fit_impute, impute_columns
);
table_filter!(
    /// Zero-mean, unit-variance scaling of numeric columns.
    StandardScaler, "standardscaler", ScalerParams, |t| Ok(fit_scale(t)), standard_scale
);

#[cfg(test)]
mod tests {
    use super::*;

    fn numeric(name: &str, v: &[Option<f64>]) -> FeatureTable {
        FeatureTable::new(vec![name.into()], vec![Column::Numeric(v.to_vec())], None).unwrap()
    }

    fn cat(v: &[&str]) -> FeatureTable {
        FeatureTable::new(
            vec!["c".into()],
            vec![Column::Categorical(v.iter().map(|s| Some(s.to_string())).collect())],
            None,
        )
        .unwrap()
    }

    #[test]
    fn one_hot_seen_and_unseen() {
        let p = fit_encode(&cat(&["a", "b", "a"]));
        let out = one_hot_encode(&p, &cat(&["a", "b", "a"])).unwrap();
        assert_eq!(out.names(), &["c=a", "c=b"]);
        assert_eq!(
            out.numeric_rows().unwrap(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]
        );
        let unseen = one_hot_encode(&p, &cat(&["c"])).unwrap();
        assert_eq!(unseen.numeric_rows().unwrap(), vec![vec![0.0, 0.0]]);
    }

    #[test]
    fn one_hot_passes_numeric_through() {
        let t = numeric("x", &[Some(1.5), None]);
        assert_eq!(one_hot_encode(&fit_encode(&t), &t).unwrap(), t);
    }

    #[test]
    fn median_imputation_uses_fit_time_median() {
        let t = numeric("x", &[Some(1.0), None, Some(3.0)]);
        let p = fit_impute(&t).unwrap();
        assert_eq!(
            impute_columns(&p, &t).unwrap(),
            numeric("x", &[Some(1.0), Some(2.0), Some(3.0)])
        );
        let later = numeric("x", &[None, Some(100.0)]);
        assert_eq!(
            impute_columns(&p, &later).unwrap(),
            numeric("x", &[Some(2.0), Some(100.0)])
        );
        let full = numeric("x", &[Some(4.0)]);
        assert_eq!(impute_columns(&p, &full).unwrap(), full);
    }

    #[test]
    fn all_missing_column_names_itself() {
        let err = fit_impute(&numeric("bmean", &[None, None])).unwrap_err();
        assert!(err.to_string().contains("bmean"));
    }

    #[test]
    fn scaler_values() {
        let t = numeric("x", &[Some(2.0), Some(4.0), Some(6.0)]);
        let p = fit_scale(&t);
        assert_eq!(p.moments()[0], Some((4.0, 2.0)));
        assert_eq!(
            standard_scale(&p, &t).unwrap(),
            numeric("x", &[Some(-1.0), Some(0.0), Some(1.0)])
        );
        assert_eq!(
            standard_scale(&p, &numeric("x", &[Some(4.0)])).unwrap(),
            numeric("x", &[Some(0.0)])
        );
        let c = numeric("x", &[Some(7.0); 3]);
        assert_eq!(
            standard_scale(&fit_scale(&c), &c).unwrap(),
            numeric("x", &[Some(0.0); 3])
        );
    }

    #[test]
    fn schema_mismatch() {
        let p = fit_scale(&numeric("x", &[Some(1.0), Some(2.0)]));
        assert!(matches!(
            standard_scale(&p, &numeric("y", &[Some(1.0)])),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn filters_require_fit() {
        let t = Data::Table(numeric("x", &[Some(1.0)]));
        assert!(matches!(StandardScaler::new().transform(&t), Err(Error::NotFitted(_))));
    }
}
