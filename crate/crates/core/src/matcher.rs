//! Rule-based lexicon retrieval for transcript words: thresholded top-k by
//! character error rate, plus positional prefix/suffix matches.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{AffixKind, Lexicon, LexiconEntry};
use crate::metrics::edit_distance;
use crate::text::{is_punctuation, nfc_trim};

/// Default CER threshold for retrieval.
pub const DEFAULT_TAU: f64 = 0.2;
/// Default number of CER candidates kept per word.
pub const DEFAULT_K: usize = 3;
/// Shortest affix body (hyphen removed) that may match positionally.
pub const MIN_AFFIX_LEN: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("tau must be in (0, 1], got {0}")]
    InvalidTau(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchType {
    Cer,
    Affix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub word: String,
    pub entry_id: String,
    pub matched_form: String,
    pub cer: f64,
    pub match_type: MatchType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptMatches {
    pub transcript: String,
    pub per_word: Vec<(String, Vec<MatchResult>)>,
    pub flattened: Vec<MatchResult>,
}

/// Normalized edit distance over characters, divided by the longer length.
/// Symmetric, in `[0, 1]`, and 0 for two empty strings.
pub fn cer_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 0.0;
    }
    edit_distance(&a, &b) as f64 / longest as f64
}

fn check(lexicon: &Lexicon, k: usize, tau: f64) -> Result<(), MatchError> {
    if lexicon.is_empty() {
        return Err(MatchError::EmptyLexicon);
    }
    if k == 0 {
        return Err(MatchError::InvalidK);
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(MatchError::InvalidTau(tau));
    }
    Ok(())
}

/// Best-scoring form of an entry; ties keep the earlier form (headword first).
fn best_form<'e>(word: &str, entry: &'e LexiconEntry) -> (&'e str, f64) {
    let mut best: Option<(&str, f64)> = None;
    for form in entry.forms() {
        let c = cer_similarity(word, form);
        if best.is_none_or(|(_, b)| c < b) {
            best = Some((form, c));
        }
    }
    best.expect("entry has a headword")
}

/// The form whose affix body sits at the matching edge of `word`.
fn affix_hit<'e>(word: &str, entry: &'e LexiconEntry) -> Option<&'e str> {
    let word_len = word.chars().count();
    entry.forms().find(|form| {
        let body = match (entry.affix_kind, AffixKind::classify(form)) {
            (AffixKind::Prefix, Some(AffixKind::Prefix)) => form.trim_end_matches('-'),
            (AffixKind::Suffix, Some(AffixKind::Suffix)) => form.trim_start_matches('-'),
            _ => return false,
        };
        let len = body.chars().count();
        if len < MIN_AFFIX_LEN || len >= word_len {
            return false;
        }
        match entry.affix_kind {
            AffixKind::Prefix => word.starts_with(body),
            _ => word.ends_with(body),
        }
    })
}

fn by_cer_then_id(a: &MatchResult, b: &MatchResult) -> std::cmp::Ordering {
    a.cer.total_cmp(&b.cer).then_with(|| a.entry_id.cmp(&b.entry_id))
}

/// Retrieves lexicon entries for one word.
///
/// Every entry is scored by its best form; those with CER strictly below
/// `tau` are sorted by (CER, entry id) and the first `k` kept. Then every
/// prefix or suffix entry whose body appears at the matching edge of the
/// word is appended as an affix match, whatever its CER, unless the entry is
/// already among the CER matches. Affix matches do not count against `k`.
pub fn match_word(word: &str, lexicon: &Lexicon, k: usize, tau: f64) -> Result<Vec<MatchResult>, MatchError> {
    check(lexicon, k, tau)?;
    let word = nfc_trim(word);
    let result = |entry: &LexiconEntry, form: &str, cer: f64, match_type| MatchResult {
        word: word.clone(),
        entry_id: entry.entry_id.clone(),
        matched_form: form.to_owned(),
        cer,
        match_type,
    };

    let mut cer_hits: Vec<MatchResult> = lexicon
        .entries()
        .iter()
        .filter_map(|e| {
            let (form, cer) = best_form(&word, e);
            (cer < tau).then(|| result(e, form, cer, MatchType::Cer))
        })
        .collect();
    cer_hits.sort_by(by_cer_then_id);
    cer_hits.truncate(k);

    let mut affix_hits: Vec<MatchResult> = lexicon
        .entries()
        .iter()
        .filter(|e| e.affix_kind != AffixKind::Stem)
        .filter(|e| !cer_hits.iter().any(|m| m.entry_id == e.entry_id))
        .filter_map(|e| affix_hit(&word, e).map(|form| result(e, form, cer_similarity(&word, form), MatchType::Affix)))
        .collect();
    affix_hits.sort_by(by_cer_then_id);

    cer_hits.extend(affix_hits);
    Ok(cer_hits)
}

/// Whitespace tokens with leading and trailing punctuation stripped.
pub fn tokenize(transcript: &str) -> Vec<String> {
    transcript
        .split_whitespace()
        .map(|t| nfc_trim(t.trim_matches(is_punctuation)))
        .filter(|t| !t.is_empty())
        .collect()
}

/// Runs [`match_word`] on each token. The flattened list keeps one result
/// per (entry, match type) at the position of its first occurrence, with
/// the lowest CER seen for it.
pub fn match_transcript(
    transcript: &str,
    lexicon: &Lexicon,
    k: usize,
    tau: f64,
) -> Result<TranscriptMatches, MatchError> {
    check(lexicon, k, tau)?;
    let mut per_word = Vec::new();
    let mut flattened: Vec<MatchResult> = Vec::new();
    let mut slot: HashMap<(String, MatchType), usize> = HashMap::new();
    for token in tokenize(transcript) {
        let matches = match_word(&token, lexicon, k, tau)?;
        for m in &matches {
            match slot.get(&(m.entry_id.clone(), m.match_type)) {
                Some(&i) => {
                    if m.cer < flattened[i].cer {
                        flattened[i] = m.clone();
                    }
                }
                None => {
                    slot.insert((m.entry_id.clone(), m.match_type), flattened.len());
                    flattened.push(m.clone());
                }
            }
        }
        per_word.push((token, matches));
    }
    Ok(TranscriptMatches {
        transcript: transcript.to_owned(),
        per_word,
        flattened,
    })
}

/// One line of a match report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub token: String,
    pub entry_id: String,
    pub matched_form: String,
    pub cer: f64,
    pub match_type: MatchType,
    pub pos: String,
    pub gloss: String,
}

impl MatchRecord {
    /// CER is rounded to four decimals.
    pub fn new(m: &MatchResult, entry: &LexiconEntry) -> Self {
        Self {
            token: m.word.clone(),
            entry_id: m.entry_id.clone(),
            matched_form: m.matched_form.clone(),
            cer: (m.cer * 1e4).round() / 1e4,
            match_type: m.match_type,
            pos: entry.pos.clone(),
            gloss: entry.gloss.clone(),
        }
    }
}

/// Report records for every per-word match, in token order.
pub fn match_report(matches: &TranscriptMatches, lexicon: &Lexicon) -> Vec<MatchRecord> {
    matches
        .per_word
        .iter()
        .flat_map(|(_, ms)| ms.iter())
        .filter_map(|m| lexicon.get(&m.entry_id).map(|e| MatchRecord::new(m, e)))
        .collect()
}
