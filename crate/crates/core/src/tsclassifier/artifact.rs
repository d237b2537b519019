//! `model.tspm` layout: the 8-byte magic, a little-endian `u64` length,
//! that many bytes of JSON metadata, then the model as JSON.

use std::fs;
use std::path::Path;

use chrono::DateTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::STAT_SCHEMA_VERSION;
use crate::learners::{FittedModel, Model};
use crate::table::FeatureTable;
use crate::time::TimeStamp;

use super::ClassifierConfig;

pub const MAGIC: &[u8; 8] = b"TSPIPEM1";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub num_trees: usize,
    pub dateformat: String,
    pub interval: String,
    pub seed: u64,
}

impl From<&ClassifierConfig> for ConfigEcho {
    fn from(cfg: &ClassifierConfig) -> Self {
        ConfigEcho {
            num_trees: cfg.num_trees,
            dateformat: cfg.dateformat.pattern().to_string(),
            interval: cfg.interval.to_string(),
            seed: cfg.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactMeta {
    pub format_version: u32,
    pub schema_version: String,
    pub features: Vec<String>,
    pub labels: Vec<String>,
    pub config: ConfigEcho,
    pub created_at: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelArtifact {
    pub meta: ArtifactMeta,
    pub model: Model,
}

/// Creation time: `SOURCE_DATE_EPOCH` when set, the clock otherwise.
fn creation_time() -> String {
    let ts = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|s| DateTime::from_timestamp(s, 0))
        .unwrap_or_else(chrono::Utc::now);
    TimeStamp::from_naive(ts.naive_utc()).to_string()
}

impl ModelArtifact {
    pub fn new(features: Vec<String>, model: Model, config: ConfigEcho) -> Self {
        ModelArtifact {
            meta: ArtifactMeta {
                format_version: FORMAT_VERSION,
                schema_version: STAT_SCHEMA_VERSION.to_string(),
                features,
                labels: model.classes(),
                config,
                created_at: creation_time(),
            },
            model,
        }
    }

    pub fn check_schema(&self, features: &[String]) -> Result<()> {
        if self.meta.schema_version != STAT_SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "model uses feature schema {}, this build computes {STAT_SCHEMA_VERSION}",
                self.meta.schema_version
            )));
        }
        if self.meta.features != features {
            return Err(Error::Schema(format!(
                "model expects features {:?}, got {features:?}",
                self.meta.features
            )));
        }
        Ok(())
    }

    pub fn predict(&self, table: &FeatureTable) -> Result<Vec<String>> {
        FittedModel {
            features: self.meta.features.clone(),
            model: self.model.clone(),
        }
        .predict(table)
    }

    pub fn predict_rows(&self, rows: &[Vec<f64>]) -> Result<Vec<String>> {
        if let Some(r) = rows.iter().find(|r| r.len() != self.meta.features.len()) {
            return Err(Error::Schema(format!(
                "model expects {} features, got a row of {}",
                self.meta.features.len(),
                r.len()
            )));
        }
        Ok(self.model.predict_rows(rows))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let meta = serde_json::to_vec(&self.meta).expect("metadata serializes");
        let model = serde_json::to_vec(&self.model).expect("model serializes");
        let mut out = Vec::with_capacity(16 + meta.len() + model.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(meta.len() as u64).to_le_bytes());
        out.extend_from_slice(&meta);
        out.extend_from_slice(&model);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 16 || &bytes[..8] != MAGIC {
            return Err(Error::Format("not a model artifact (bad magic)".into()));
        }
        let len = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
        let end = usize::try_from(len)
            .ok()
            .and_then(|l| l.checked_add(16))
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| Error::Format("metadata length exceeds file size".into()))?;
        let meta: ArtifactMeta =
            serde_json::from_slice(&bytes[16..end]).map_err(|e| Error::Format(format!("metadata: {e}")))?;
        if meta.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "artifact version {} is not supported (expected {FORMAT_VERSION})",
                meta.format_version
            )));
        }
        let model: Model = serde_json::from_slice(&bytes[end..]).map_err(|e| Error::Format(format!("model: {e}")))?;
        model.validate(meta.features.len())?;
        if model.classes() != meta.labels {
            return Err(Error::Format("label set does not match the model".into()));
        }
        Ok(ModelArtifact { meta, model })
    }
}

pub fn save_model(artifact: &ModelArtifact, path: &Path) -> Result<()> {
    fs::write(path, artifact.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<ModelArtifact> {
    ModelArtifact::from_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{ForestConfig, LearnerSpec};

    fn artifact() -> ModelArtifact {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let labels: Vec<String> = (0..20).map(|i| if i < 10 { "lo" } else { "hi" }.to_string()).collect();
        let model = Model::train(&LearnerSpec::Forest(ForestConfig::with_trees(5, 3)), &rows, &labels).unwrap();
        let echo = ConfigEcho {
            num_trees: 5,
            dateformat: "dd/mm/yyyy HH:MM".into(),
            interval: "1h".into(),
            seed: 3,
        };
        ModelArtifact::new(vec!["a".into(), "b".into()], model, echo)
    }

    #[test]
    fn bytes_round_trip() {
        let a = artifact();
        let b = ModelArtifact::from_bytes(&a.to_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.meta.labels, vec!["hi", "lo"]);
    }

    #[test]
    fn corrupt_headers_are_rejected() {
        let mut bytes = artifact().to_bytes();
        bytes[0] = b'X';
        assert!(matches!(ModelArtifact::from_bytes(&bytes), Err(Error::Format(_))));
        assert!(matches!(ModelArtifact::from_bytes(b"TSPIPEM1"), Err(Error::Format(_))));

        let mut a = artifact();
        a.meta.format_version = 99;
        assert!(matches!(
            ModelArtifact::from_bytes(&a.to_bytes()),
            Err(Error::Format(_))
        ));

        let mut bytes = artifact().to_bytes();
        bytes[8..16].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(matches!(ModelArtifact::from_bytes(&bytes), Err(Error::Format(_))));
    }
}
