//! Filters, learners and the pipeline that chains them.
//!
//! Every unit follows the same two-step protocol: `fit` learns whatever
//! parameters the unit needs and returns a new, fitted unit; `transform`
//! applies those parameters to data. Filters map data to data and never see
//! labels. Learners consume a feature table plus labels at fit time and emit
//! labels at transform time. Fitted units are immutable, so a fitted
//! pipeline can be shared freely between threads.

use std::fmt;

use crate::error::{Error, Result};
use crate::series::TSFrame;
use crate::table::FeatureTable;

/// The values flowing between pipeline stages.
#[derive(Debug, Clone, PartialEq)]
pub enum Data {
    /// No input; used to drive source stages such as a CSV reader.
    Empty,
    Series(TSFrame),
    Table(FeatureTable),
    Labels(Vec<String>),
}

impl Data {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Data::Empty => "empty",
            Data::Series(_) => "series",
            Data::Table(_) => "table",
            Data::Labels(_) => "labels",
        }
    }

    pub fn as_series(&self) -> Result<&TSFrame> {
        match self {
            Data::Series(s) => Ok(s),
            other => Err(Error::Schema(format!("expected a series, got {}", other.kind_name()))),
        }
    }

    pub fn as_table(&self) -> Result<&FeatureTable> {
        match self {
            Data::Table(t) => Ok(t),
            other => Err(Error::Schema(format!("expected a table, got {}", other.kind_name()))),
        }
    }

    pub fn into_series(self) -> Result<TSFrame> {
        match self {
            Data::Series(s) => Ok(s),
            other => Err(Error::Schema(format!("expected a series, got {}", other.kind_name()))),
        }
    }

    pub fn into_table(self) -> Result<FeatureTable> {
        match self {
            Data::Table(t) => Ok(t),
            other => Err(Error::Schema(format!("expected a table, got {}", other.kind_name()))),
        }
    }

    pub fn into_labels(self) -> Result<Vec<String>> {
        match self {
            Data::Labels(l) => Ok(l),
            other => Err(Error::Schema(format!("expected labels, got {}", other.kind_name()))),
        }
    }
}

impl From<TSFrame> for Data {
    fn from(s: TSFrame) -> Self {
        Data::Series(s)
    }
}

impl From<FeatureTable> for Data {
    fn from(t: FeatureTable) -> Self {
        Data::Table(t)
    }
}

/// A data-processing unit that needs no labels.
pub trait Filter: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// Stateless filters may transform without a prior fit.
    fn is_stateless(&self) -> bool {
        false
    }

    fn is_fitted(&self) -> bool;

    fn fit(&self, input: &Data) -> Result<Box<dyn Filter>>;

    fn transform(&self, input: &Data) -> Result<Data>;

    fn clone_box(&self) -> Box<dyn Filter>;
}

/// A supervised unit mapping feature tables to labels.
pub trait Learner: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn is_fitted(&self) -> bool;

    fn fit(&self, features: &FeatureTable, labels: &[String]) -> Result<Box<dyn Learner>>;

    fn predict(&self, features: &FeatureTable) -> Result<Vec<String>>;

    fn clone_box(&self) -> Box<dyn Learner>;
}

impl Clone for Box<dyn Filter> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

impl Clone for Box<dyn Learner> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformerKind {
    Filter,
    Learner,
}

/// Any unit that can sit in a pipeline.
#[derive(Debug, Clone)]
pub enum Transformer {
    Filter(Box<dyn Filter>),
    Learner(Box<dyn Learner>),
}

impl Transformer {
    pub fn filter<F: Filter + 'static>(f: F) -> Self {
        Transformer::Filter(Box::new(f))
    }

    pub fn learner<L: Learner + 'static>(l: L) -> Self {
        Transformer::Learner(Box::new(l))
    }

    pub fn kind(&self) -> TransformerKind {
        match self {
            Transformer::Filter(_) => TransformerKind::Filter,
            Transformer::Learner(_) => TransformerKind::Learner,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Transformer::Filter(f) => f.name(),
            Transformer::Learner(l) => l.name(),
        }
    }

    pub fn is_fitted(&self) -> bool {
        match self {
            Transformer::Filter(f) => f.is_fitted(),
            Transformer::Learner(l) => l.is_fitted(),
        }
    }

    /// Fits the unit. Filters ignore `output`; learners require it.
    pub fn fit(&self, input: &Data, output: Option<&[String]>) -> Result<Transformer> {
        match self {
            Transformer::Filter(f) => f.fit(input).map(Transformer::Filter),
            Transformer::Learner(l) => {
                let labels = output.ok_or(Error::MissingLabels)?;
                let table = input.as_table()?;
                if table.nrows() == 0 {
                    return Err(Error::EmptyInput);
                }
                l.fit(table, labels).map(Transformer::Learner)
            }
        }
    }

    pub fn transform(&self, input: &Data) -> Result<Data> {
        match self {
            Transformer::Filter(f) => {
                if !f.is_stateless() && !f.is_fitted() {
                    return Err(Error::NotFitted(f.name().to_string()));
                }
                f.transform(input)
            }
            Transformer::Learner(l) => {
                if !l.is_fitted() {
                    return Err(Error::NotFitted(l.name().to_string()));
                }
                l.predict(input.as_table()?).map(Data::Labels)
            }
        }
    }
}

/// An ordered chain of filters, optionally ending in one learner.
#[derive(Debug, Clone)]
pub struct Pipeline {
    stages: Vec<Transformer>,
}

impl Pipeline {
    pub fn new(stages: Vec<Transformer>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Config("pipeline needs at least one stage".into()));
        }
        let last = stages.len() - 1;
        if let Some(i) = stages[..last].iter().position(|s| s.kind() == TransformerKind::Learner) {
            return Err(Error::Config(format!(
                "stage {i} ({}) is a learner; only the final stage may be a learner",
                stages[i].name()
            )));
        }
        Ok(Pipeline { stages })
    }

    pub fn stages(&self) -> &[Transformer] {
        &self.stages
    }

    pub fn is_fitted(&self) -> bool {
        self.stages.iter().all(Transformer::is_fitted)
    }

    /// Fits each stage in turn, feeding every stage's transformed output to
    /// the next one. Labels only reach a final learner.
    pub fn fit(&self, input: &Data, output: Option<&[String]>) -> Result<Pipeline> {
        let last = self.stages.len() - 1;
        let mut fitted = Vec::with_capacity(self.stages.len());
        let mut current = input.clone();
        for (index, stage) in self.stages.iter().enumerate() {
            let labels = if stage.kind() == TransformerKind::Learner {
                output
            } else {
                None
            };
            let f = stage.fit(&current, labels).map_err(|e| annotate(index, stage, e))?;
            if index < last {
                current = f.transform(&current).map_err(|e| annotate(index, stage, e))?;
            }
            fitted.push(f);
        }
        Ok(Pipeline { stages: fitted })
    }

    /// Left-to-right composition of the stage transforms.
    pub fn transform(&self, input: &Data) -> Result<Data> {
        let mut current = input.clone();
        for (index, stage) in self.stages.iter().enumerate() {
            current = stage.transform(&current).map_err(|e| annotate(index, stage, e))?;
        }
        Ok(current)
    }
}

fn annotate(index: usize, stage: &Transformer, e: Error) -> Error {
    Error::Stage {
        index,
        name: stage.name().to_string(),
        source: Box::new(e),
    }
}

/// Passes its input through unchanged.
#[derive(Debug, Clone, Default)]
pub struct Identity;

impl Filter for Identity {
    fn name(&self) -> &str {
        "identity"
    }
    fn is_stateless(&self) -> bool {
        true
    }
    fn is_fitted(&self) -> bool {
        true
    }
    fn fit(&self, _input: &Data) -> Result<Box<dyn Filter>> {
        Ok(Box::new(Identity))
    }
    fn transform(&self, input: &Data) -> Result<Data> {
        Ok(input.clone())
    }
    fn clone_box(&self) -> Box<dyn Filter> {
        Box::new(self.clone())
    }
}
