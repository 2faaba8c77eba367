//! ELAN corpus ingestion: tier extraction, duration-bounded segmentation,
//! file-level train/test splits, statistics and translation-training pairs.

mod augment;
mod eaf;
mod segment;
mod split;
mod stats;

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use augment::{build_training_pairs, AugmentOptions, PairProvenance, TrainingPair};
pub use eaf::{parse_eaf, TierNames};
pub use segment::{concatenate_segments, DEFAULT_MAX_DURATION_MS};
pub use split::split_by_file;
pub use stats::{corpus_stats, CategoryStats, CorpusStats};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed ELAN document: {0}")]
    MalformedDocument(String),
    #[error("tier {0:?} not found")]
    MissingTier(String),
    #[error("annotation {annotation} references undefined time slot {slot:?}")]
    UnresolvedTimeSlot { annotation: String, slot: String },
    #[error("need at least 2 distinct source files to split, found {0}")]
    InsufficientFiles(usize),
    #[error("test fraction must be in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("at least one of short/long pairs must be requested")]
    NoSegmentationSelected,
    #[error("predicted pairs requested but no predictions were supplied")]
    MissingPredictions,
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One time-aligned transcription segment, with its translation when the
/// document provides one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub source_file: String,
    pub start_ms: u64,
    pub end_ms: u64,
    pub transcription: String,
    #[serde(default)]
    pub translation: Option<String>,
}

impl Utterance {
    pub fn duration_ms(&self) -> u64 {
        self.end_ms - self.start_ms
    }
}

/// A run of adjacent utterances from one file, packed under a duration budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub source_file: String,
    #[serde(default)]
    pub utterance_ids: Vec<String>,
    pub span_start_ms: u64,
    pub span_end_ms: u64,
    pub transcription: String,
    pub translation: String,
    #[serde(default)]
    pub oversize_flag: bool,
}

impl Sample {
    pub fn duration_ms(&self) -> u64 {
        self.span_end_ms - self.span_start_ms
    }

    /// Media-fragment reference for the sample's audio span, e.g.
    /// `rec01.wav#t=1.500,9.250`.
    pub fn audio_ref(&self) -> String {
        format!(
            "{}#t={:.3},{:.3}",
            self.source_file,
            self.span_start_ms as f64 / 1000.0,
            self.span_end_ms as f64 / 1000.0
        )
    }
}

/// Writes one JSON record per line.
pub fn write_jsonl<T: Serialize, W: Write>(items: &[T], mut out: W) -> Result<(), CorpusError> {
    for item in items {
        let line = serde_json::to_string(item).map_err(|e| CorpusError::Manifest {
            line: 0,
            message: e.to_string(),
        })?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Reads line-delimited JSON records, skipping blank lines.
pub fn read_jsonl<T: for<'de> Deserialize<'de>, R: BufRead>(input: R) -> Result<Vec<T>, CorpusError> {
    let mut items = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| CorpusError::Manifest {
            line: i + 1,
            message: e.to_string(),
        })?;
        items.push(item);
    }
    Ok(items)
}
