//! Run records and the append-only JSON-lines store.

use std::collections::HashSet;
use std::fs::{self, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use elastika::forest::PfConfig;
use elastika::tuning::TrainedModel;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordModel {
    Tuned(TrainedModel),
    Forest(PfConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub dataset: String,
    pub classifier: String,
    pub model: RecordModel,
    pub test_accuracy: f64,
    pub train_seconds: f64,
    pub test_seconds: f64,
    pub seed: u64,
    pub version: String,
}

impl RunRecord {
    pub fn key(&self) -> (String, String, u64) {
        (self.dataset.clone(), self.classifier.clone(), self.seed)
    }
}

/// One JSON document per line, appended and never rewritten.
#[derive(Debug, Clone)]
pub struct Store {
    path: PathBuf,
}

impl Store {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// All records, or none when the file does not exist yet.
    pub fn load(&self) -> Result<Vec<RunRecord>> {
        match fs::read_to_string(&self.path) {
            Ok(text) => parse_lines(&text, &self.path),
            Err(e) if e.kind() == ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(CliError::io(&self.path, e)),
        }
    }

    /// Records from an input file that must exist.
    pub fn load_existing(&self) -> Result<Vec<RunRecord>> {
        let text = fs::read_to_string(&self.path).map_err(|e| CliError::io(&self.path, e))?;
        parse_lines(&text, &self.path)
    }

    pub fn completed(&self) -> Result<HashSet<(String, String, u64)>> {
        Ok(self.load()?.iter().map(RunRecord::key).collect())
    }

    pub fn append(&self, record: &RunRecord) -> Result<()> {
        let line = serde_json::to_string(record)
            .map_err(|e| CliError::Internal(format!("cannot encode record: {e}")))?;
        append_line(&self.path, &line)
    }
}

fn parse_lines(text: &str, path: &Path) -> Result<Vec<RunRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CliError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub(crate) fn append_line(path: &Path, line: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::io(path, e))?;
    writeln!(file, "{line}").map_err(|e| CliError::io(path, e))
}
