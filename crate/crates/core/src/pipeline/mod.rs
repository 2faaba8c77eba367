//! End-to-end runs against ASR/translation services, evaluation, and the
//! (tau, k) lexicon-injection sweep.

mod client;
mod eval;
mod grid;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

pub use client::{
    inject_substitutions, transcriber_for, translator_for, ClientError, HttpSettings, HttpTranscriber, HttpTranslator,
    MockClient, Transcriber, TranscriptionRequest, TranslationRequest, Translator, DEFAULT_RETRIES, DEFAULT_TIMEOUT,
};
pub use eval::{
    run_bounded, run_transcription_eval, run_translation_eval, EvalRun, SampleRecord, SentenceScores, DEFAULT_IN_FLIGHT,
};
pub use grid::{grid_search, BestCell, CellStatus, GridCell, GridResult, GridRun};

use crate::corpus::{write_jsonl, CorpusError};
use crate::matcher::MatchError;
use crate::metrics::MetricsError;
use crate::prompting::PromptError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("client unavailable: {0}")]
    ClientUnavailable(String),
    #[error("grid needs at least one tau and one k")]
    EmptyGrid,
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Output directory of a run: `manifest.json` (full configuration),
/// `records.jsonl` (one line per sample and cell) and `report.json`.
#[derive(Debug, Clone)]
pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self, PipelineError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|source| PipelineError::Io {
            path: root.clone(),
            source,
        })?;
        Ok(Self { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, PipelineError> {
        let path = self.root.join(name);
        fs::write(&path, text).map_err(|source| PipelineError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, PipelineError> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable run artifact");
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn write_records(&self, records: &[SampleRecord]) -> Result<PathBuf, PipelineError> {
        let mut buf = Vec::new();
        write_jsonl(records, &mut buf)?;
        self.write_text("records.jsonl", std::str::from_utf8(&buf).expect("utf-8 json"))
    }
}
