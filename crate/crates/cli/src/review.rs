use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use termcoder_core::Terminology;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReviewError {
    #[error("unknown term id {0}")]
    UnknownTerm(String),
    #[error("{0} must not be empty")]
    MissingField(&'static str),
    #[error("cannot open review log {path}: {source}")]
    Open { path: PathBuf, source: io::Error },
    #[error("cannot append to review log: {0}")]
    Write(#[from] io::Error),
    #[error("review log line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// What the reviewer did with one proposed term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "lowercase")]
pub enum ReviewAction {
    Accept,
    Reject,
    Replace { target_llt_id: String },
}

/// A decision as submitted by the reviewer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewDecision {
    pub case_id: String,
    pub llt_id: String,
    #[serde(flatten)]
    pub action: ReviewAction,
    pub reviewer_id: String,
}

/// A decision as stored: one JSON line per record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewRecord {
    #[serde(flatten)]
    pub decision: ReviewDecision,
    #[serde(with = "rfc3339")]
    pub timestamp: DateTime<Utc>,
}

impl ReviewDecision {
    /// Checks that the ids name terms of `terminology`.
    pub fn validate(&self, terminology: &Terminology) -> Result<(), ReviewError> {
        for (name, value) in [
            ("case_id", &self.case_id),
            ("llt_id", &self.llt_id),
            ("reviewer_id", &self.reviewer_id),
        ] {
            if value.trim().is_empty() {
                return Err(ReviewError::MissingField(name));
            }
        }
        check_known(terminology, &self.llt_id)?;
        if let ReviewAction::Replace { target_llt_id } = &self.action {
            check_known(terminology, target_llt_id)?;
        }
        Ok(())
    }
}

fn check_known(terminology: &Terminology, llt_id: &str) -> Result<(), ReviewError> {
    match terminology.get(llt_id) {
        Some(_) => Ok(()),
        None => Err(ReviewError::UnknownTerm(llt_id.to_string())),
    }
}

/// Append-only JSON-lines log. Appends are serialized through one lock.
#[derive(Debug)]
pub struct ReviewLog {
    file: Mutex<File>,
}

impl ReviewLog {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, ReviewError> {
        let path = path.as_ref();
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|source| ReviewError::Open {
                path: path.to_path_buf(),
                source,
            })?;
        Ok(ReviewLog {
            file: Mutex::new(file),
        })
    }

    /// Stamps and appends a decision, returning the stored record.
    pub fn append(&self, decision: ReviewDecision) -> Result<ReviewRecord, ReviewError> {
        let record = ReviewRecord {
            decision,
            timestamp: Utc::now(),
        };
        let mut line = serde_json::to_string(&record).expect("records serialize");
        line.push('\n');
        let mut file = self.file.lock().unwrap_or_else(|e| e.into_inner());
        file.write_all(line.as_bytes())?;
        file.flush()?;
        Ok(record)
    }
}

/// Reads every record of a log, skipping blank lines.
pub fn read_log<R: io::Read>(reader: R) -> Result<Vec<ReviewRecord>, ReviewError> {
    let mut records = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| ReviewError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Validated term ids per case. The last decision on a (case, term) pair
/// wins; accepted terms keep their id, replaced ones contribute the target.
pub fn replay(records: &[ReviewRecord]) -> BTreeMap<String, Vec<String>> {
    let mut last: BTreeMap<&str, BTreeMap<&str, &ReviewAction>> = BTreeMap::new();
    for r in records {
        last.entry(&r.decision.case_id)
            .or_default()
            .insert(&r.decision.llt_id, &r.decision.action);
    }
    last.into_iter()
        .map(|(case, terms)| {
            let mut ids: Vec<String> = terms
                .into_iter()
                .filter_map(|(llt_id, action)| match action {
                    ReviewAction::Accept => Some(llt_id.to_string()),
                    ReviewAction::Reject => None,
                    ReviewAction::Replace { target_llt_id } => Some(target_llt_id.clone()),
                })
                .collect();
            ids.sort();
            ids.dedup();
            (case.to_string(), ids)
        })
        .collect()
}

mod rfc3339 {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::Millis, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let s = String::deserialize(d)?;
        DateTime::parse_from_rfc3339(&s)
            .map(|t| t.with_timezone(&Utc))
            .map_err(serde::de::Error::custom)
    }
}
