//! Predefined experiment specifications for public datasets.
//!
//! Bundle file format: a JSON object `{id, citation, notes, spec}` where
//! `spec` is an experiment document. The registry file lists every known id
//! with a status; only `populated` entries can be loaded.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::aggregate::check_experiment;
use crate::error::{Error, Result};
use crate::model::{validate_experiment, ConsistencyResult, ExperimentSpec, ScoreReport, Uncertainty};

const REGISTRY: &str = include_str!("../data/bundles/registry.json");

/// Embedded bundle files by file name.
const FILES: &[(&str, &str)] = &[("isic2016.json", include_str!("../data/bundles/isic2016.json"))];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bundle {
    pub id: String,
    pub citation: String,
    pub notes: String,
    pub spec: ExperimentSpec,
}

impl Bundle {
    /// Parses and validates a bundle document.
    pub fn from_json(text: &str) -> Result<Bundle> {
        let bundle: Bundle = serde_json::from_str(text).map_err(|e| Error::MalformedBundle {
            id: "<unparsed>".into(),
            detail: e.to_string(),
        })?;
        validate_experiment(&bundle.spec).map_err(|e| Error::MalformedBundle {
            id: bundle.id.clone(),
            detail: e.to_string(),
        })?;
        Ok(bundle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleStatus {
    Populated,
    Unpopulated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistryEntry {
    pub id: String,
    pub status: BundleStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub description: String,
}

#[derive(Deserialize)]
struct RegistryFile {
    bundles: Vec<RegistryEntry>,
}

pub fn registry() -> &'static [RegistryEntry] {
    static ENTRIES: OnceLock<Vec<RegistryEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| {
        serde_json::from_str::<RegistryFile>(REGISTRY)
            .expect("embedded bundle registry parses")
            .bundles
    })
}

/// Ids that can be loaded.
pub fn available_bundles() -> Vec<String> {
    registry()
        .iter()
        .filter(|e| e.status == BundleStatus::Populated)
        .map(|e| e.id.clone())
        .collect()
}

pub fn load_bundle(id: &str) -> Result<Bundle> {
    let unknown = || Error::UnknownBundle {
        id: id.to_string(),
        available: available_bundles(),
    };
    let entry = registry()
        .iter()
        .find(|e| e.id == id && e.status == BundleStatus::Populated)
        .ok_or_else(unknown)?;
    let file = entry.file.as_deref().ok_or_else(unknown)?;
    let text = FILES
        .iter()
        .find(|(name, _)| *name == file)
        .map(|(_, text)| *text)
        .ok_or_else(|| Error::MalformedBundle {
            id: id.to_string(),
            detail: format!("missing data file {file}"),
        })?;
    let bundle = Bundle::from_json(text)?;
    if bundle.id != id {
        return Err(Error::MalformedBundle {
            id: id.to_string(),
            detail: format!("file declares id '{}'", bundle.id),
        });
    }
    Ok(bundle)
}

/// `check_experiment` on the bundle's spec.
pub fn check_bundle(id: &str, report: &ScoreReport, unc: &Uncertainty) -> Result<ConsistencyResult> {
    check_experiment(&load_bundle(id)?.spec, report, unc)
}
