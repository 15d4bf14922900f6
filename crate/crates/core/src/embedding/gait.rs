//! Ingestion of cycle-normalized joint-angle exports through a manifest.
//!
//! The manifest is a CSV with header `subject,condition,joint,leg,file`;
//! `file` is relative to the manifest's directory and names a series CSV in
//! which every column is one gait cycle. A selection picks rows by
//! condition, leg, subject and joint, and all selected cycles are averaged
//! pointwise into one representative series.

use std::collections::BTreeSet;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{average_cycles, load_series_csv, TimeSeries};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ManifestEntry {
    pub subject: String,
    pub condition: String,
    pub joint: String,
    pub leg: String,
    pub file: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaitSelection {
    pub condition: String,
    /// Empty selects every subject.
    #[serde(default)]
    pub subjects: Vec<String>,
    #[serde(default = "default_joints")]
    pub joints: Vec<String>,
    #[serde(default = "default_leg")]
    pub leg: String,
    /// Restrict each file to one named column instead of all of them.
    #[serde(default)]
    pub column: Option<String>,
}

fn default_joints() -> Vec<String> {
    vec!["ankle".into(), "knee".into()]
}

fn default_leg() -> String {
    "right".into()
}

impl GaitSelection {
    pub fn new(condition: impl Into<String>) -> Self {
        GaitSelection {
            condition: condition.into(),
            subjects: Vec::new(),
            joints: default_joints(),
            leg: default_leg(),
            column: None,
        }
    }

    fn matches(&self, entry: &ManifestEntry) -> bool {
        entry.condition == self.condition
            && entry.leg == self.leg
            && self.joints.contains(&entry.joint)
            && (self.subjects.is_empty() || self.subjects.contains(&entry.subject))
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut entries = Vec::new();
    for row in r.deserialize::<ManifestEntry>() {
        let entry = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(path, line, e.to_string())
        })?;
        entries.push(entry);
    }
    Ok(entries)
}

/// Resolves a selection against a manifest and averages every selected cycle.
pub fn load_selection(manifest: impl AsRef<Path>, selection: &GaitSelection) -> Result<TimeSeries> {
    let manifest = manifest.as_ref();
    let base = manifest.parent().unwrap_or_else(|| Path::new("."));
    let entries = read_manifest(manifest)?;

    let mut cycles = Vec::new();
    let mut seen_subjects = BTreeSet::new();
    for entry in entries.iter().filter(|e| selection.matches(e)) {
        seen_subjects.insert(entry.subject.as_str());
        let path = base.join(&entry.file);
        let columns = load_series_csv(&path)?;
        let before = cycles.len();
        cycles.extend(
            columns
                .into_iter()
                .filter(|c| selection.column.as_ref().is_none_or(|name| *name == c.name))
                .map(|c| c.series),
        );
        if cycles.len() == before {
            return Err(Error::InvalidConfig(format!(
                "{}: no column matches the selection",
                path.display()
            )));
        }
    }
    if let Some(missing) = selection.subjects.iter().find(|s| !seen_subjects.contains(s.as_str())) {
        return Err(Error::InvalidConfig(format!(
            "subject {missing} has no manifest entry for condition `{}`",
            selection.condition
        )));
    }
    if cycles.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "selection for condition `{}` resolved to no series",
            selection.condition
        )));
    }
    average_cycles(&cycles)
}
