//! Prompt construction for the downstream translation model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{Lexicon, LexiconEntry};
use crate::matcher::{MatchResult, TranscriptMatches};

/// Instruction for lexicon-conditioned translation.
pub const SYSTEM_PROMPT: &str = "Please translate the following Wardaman sentence into English, using the provided lexicons. Each lexicon entry is given in the form of word (character error rate), part of speech, and gloss.";

/// Instruction for the in-context baseline, which has examples instead of
/// lexicon entries.
pub const FEWSHOT_SYSTEM_PROMPT: &str =
    "Please translate the following Wardaman sentence into English, using the provided example translations.";

const ENTRY_SEPARATOR: &str = "; ";
const NO_ENTRIES: &str = "none";
const UNKNOWN_POS: &str = "unk";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PromptError {
    #[error("{requested} exemplars requested but only {available} available")]
    InsufficientExemplars { requested: usize, available: usize },
    #[error("match refers to entry {0:?} which is not in the lexicon")]
    UnknownEntry(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system: String,
    pub user: String,
    /// Whitespace tokens over system and user text. Only an estimate; real
    /// tokenizers are model specific.
    pub token_estimate: usize,
}

impl PromptBundle {
    fn new(system: &str, user: String) -> Self {
        let token_estimate = system.split_whitespace().count() + user.split_whitespace().count();
        Self {
            system: system.to_owned(),
            user,
            token_estimate,
        }
    }
}

/// Trimmed, without a trailing full stop (the template supplies one).
fn sentence(transcript: &str) -> &str {
    let t = transcript.trim();
    t.strip_suffix('.').unwrap_or(t).trim_end()
}

/// `<form> (<cer>), <pos>, <gloss>` with CER to two decimals.
pub fn format_entry(m: &MatchResult, entry: &LexiconEntry) -> String {
    let pos = if entry.pos.trim().is_empty() {
        UNKNOWN_POS
    } else {
        entry.pos.as_str()
    };
    format!("{} ({:.2}), {}, {}", m.matched_form, m.cer, pos, entry.gloss)
}

/// Lexicon-conditioned prompt built from the flattened matches in order.
pub fn build_prompt(
    transcript: &str,
    matches: &TranscriptMatches,
    lexicon: &Lexicon,
) -> Result<PromptBundle, PromptError> {
    let entries = matches
        .flattened
        .iter()
        .map(|m| {
            lexicon
                .get(&m.entry_id)
                .map(|e| format_entry(m, e))
                .ok_or_else(|| PromptError::UnknownEntry(m.entry_id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let entries = if entries.is_empty() {
        NO_ENTRIES.to_owned()
    } else {
        entries.join(ENTRY_SEPARATOR)
    };
    Ok(PromptBundle::new(
        SYSTEM_PROMPT,
        format!("Transcription: {}. Lexicon entries: {entries}.", sentence(transcript)),
    ))
}

/// In-context baseline: the first `n` exemplar pairs, then the transcript.
pub fn build_fewshot_prompt(
    transcript: &str,
    exemplars: &[(String, String)],
    n: usize,
) -> Result<PromptBundle, PromptError> {
    if exemplars.len() < n {
        return Err(PromptError::InsufficientExemplars {
            requested: n,
            available: exemplars.len(),
        });
    }
    let mut user = String::new();
    if n > 0 {
        user.push_str("Examples:\n");
        for (source, target) in &exemplars[..n] {
            user.push_str(&format!("Wardaman: {}\nEnglish: {}\n", source.trim(), target.trim()));
        }
        user.push('\n');
    }
    user.push_str(&format!("Transcription: {}.", sentence(transcript)));
    Ok(PromptBundle::new(FEWSHOT_SYSTEM_PROMPT, user))
}
