//! Dictionary ingestion: normalized entries with affix classification and an
//! exact-form index over headwords and variants.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{collapse_whitespace, nfc_trim};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("record {record}: missing field {field}")]
    MissingField { record: usize, field: &'static str },
    #[error("record {record}: {message}")]
    MalformedRecord { record: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AffixKind {
    Stem,
    /// Bound morpheme written with a trailing hyphen, e.g. `ya-`.
    Prefix,
    /// Bound morpheme written with a leading hyphen, e.g. `-yi`.
    Suffix,
}

impl AffixKind {
    /// Classifies a form by hyphen position. `None` for a form hyphenated on
    /// both ends, which is neither a prefix nor a suffix.
    pub fn classify(form: &str) -> Option<Self> {
        match (form.starts_with('-'), form.ends_with('-')) {
            (true, true) => None,
            (false, true) => Some(Self::Prefix),
            (true, false) => Some(Self::Suffix),
            (false, false) => Some(Self::Stem),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub entry_id: String,
    pub headword: String,
    #[serde(default)]
    pub pos: String,
    pub gloss: String,
    #[serde(default)]
    pub variants: Vec<String>,
    /// (Wardaman sentence, English sentence)
    #[serde(default)]
    pub examples: Vec<(String, String)>,
    pub affix_kind: AffixKind,
}

impl LexiconEntry {
    /// Headword first, then variants in order.
    pub fn forms(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.headword.as_str()).chain(self.variants.iter().map(String::as_str))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LexiconFormat {
    Csv,
    JsonLines,
}

/// Immutable dictionary. Entries are kept sorted by headword then entry id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    by_form: BTreeMap<String, Vec<usize>>,
}

/// Input record before normalization. `examples` accepts pairs as two-item
/// arrays.
#[derive(Debug, Deserialize)]
struct RawRecord {
    #[serde(default)]
    entry_id: Option<String>,
    #[serde(default)]
    headword: Option<String>,
    #[serde(default)]
    pos: Option<String>,
    #[serde(default)]
    gloss: Option<String>,
    #[serde(default)]
    variants: Vec<String>,
    #[serde(default)]
    examples: Vec<(String, String)>,
}

#[derive(Serialize)]
struct DumpRecord<'a> {
    entry_id: &'a str,
    headword: &'a str,
    pos: &'a str,
    gloss: &'a str,
    variants: &'a [String],
    examples: &'a [(String, String)],
}

fn clean(s: &str) -> String {
    collapse_whitespace(&nfc_trim(s))
}

/// Splits a CSV multi-value cell on `|`.
fn split_cell(cell: &str) -> Vec<String> {
    cell.split('|').map(clean).filter(|s| !s.is_empty()).collect()
}

fn csv_records(table: &str) -> Result<Vec<RawRecord>, LexiconError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(table.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| LexiconError::MalformedRecord {
            record: 0,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
    let (id_c, head_c, pos_c, gloss_c, var_c, ex_c) = (
        col("entry_id"),
        col("headword"),
        col("pos"),
        col("gloss"),
        col("variants"),
        col("examples"),
    );
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| LexiconError::MalformedRecord {
            record: i + 1,
            message: e.to_string(),
        })?;
        let get = |c: Option<usize>| c.and_then(|c| rec.get(c)).map(str::to_owned);
        let examples = match get(ex_c) {
            Some(cell) => split_cell(&cell)
                .into_iter()
                .map(|pair| match pair.split_once("=>") {
                    Some((w, e)) => Ok((clean(w), clean(e))),
                    None => Err(LexiconError::MalformedRecord {
                        record: i + 1,
                        message: format!("example {pair:?} is not of the form `wardaman => english`"),
                    }),
                })
                .collect::<Result<_, _>>()?,
            None => Vec::new(),
        };
        out.push(RawRecord {
            entry_id: get(id_c).filter(|s| !s.trim().is_empty()),
            headword: get(head_c),
            pos: get(pos_c),
            gloss: get(gloss_c),
            variants: get(var_c).map(|c| split_cell(&c)).unwrap_or_default(),
            examples,
        });
    }
    Ok(out)
}

fn jsonl_records(table: &str) -> Result<Vec<RawRecord>, LexiconError> {
    table
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| LexiconError::MalformedRecord {
                record: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Parses CSV (`headword,pos,gloss,variants,examples` with optional
/// `entry_id`; multi-valued cells separated by `|`, examples written as
/// `wardaman => english`) or line-delimited JSON records.
pub fn parse_lexicon(table: &str, format: LexiconFormat) -> Result<Lexicon, LexiconError> {
    let raw = match format {
        LexiconFormat::Csv => csv_records(table)?,
        LexiconFormat::JsonLines => jsonl_records(table)?,
    };
    let mut entries = Vec::with_capacity(raw.len());
    let mut ids = HashSet::new();
    for (i, r) in raw.into_iter().enumerate() {
        let record = i + 1;
        let headword = r.headword.as_deref().map(clean).unwrap_or_default();
        if headword.is_empty() {
            return Err(LexiconError::MissingField {
                record,
                field: "headword",
            });
        }
        let gloss = r.gloss.as_deref().map(clean).unwrap_or_default();
        if gloss.is_empty() {
            return Err(LexiconError::MissingField { record, field: "gloss" });
        }
        let affix_kind = AffixKind::classify(&headword).ok_or_else(|| LexiconError::MalformedRecord {
            record,
            message: format!("headword {headword:?} is hyphenated on both ends"),
        })?;
        let pos = r.pos.as_deref().map(clean).unwrap_or_default();
        check_pos(&headword, &pos, affix_kind);

        let mut variants: Vec<String> = Vec::new();
        for v in r.variants.iter().map(|v| clean(v)) {
            if !v.is_empty() && v != headword && !variants.contains(&v) {
                variants.push(v);
            }
        }
        let entry_id = r.entry_id.map(|s| clean(&s)).unwrap_or_else(|| format!("e{record:05}"));
        if !ids.insert(entry_id.clone()) {
            return Err(LexiconError::MalformedRecord {
                record,
                message: format!("duplicate entry_id {entry_id:?}"),
            });
        }
        entries.push(LexiconEntry {
            entry_id,
            headword,
            pos,
            gloss,
            variants,
            examples: r.examples.iter().map(|(w, e)| (clean(w), clean(e))).collect(),
            affix_kind,
        });
    }
    Ok(Lexicon::from_entries(entries))
}

fn check_pos(headword: &str, pos: &str, kind: AffixKind) {
    let pos = pos.to_lowercase();
    let says = if pos.contains("prefix") {
        Some(AffixKind::Prefix)
    } else if pos.contains("suffix") {
        Some(AffixKind::Suffix)
    } else {
        None
    };
    if let Some(says) = says {
        if says != kind {
            log::warn!("{headword:?}: part of speech {pos:?} disagrees with hyphenation ({kind:?})");
        }
    }
}

impl Lexicon {
    /// Builds the form index. Entry ids are assumed unique.
    pub fn from_entries(mut entries: Vec<LexiconEntry>) -> Self {
        entries.sort_by(|a, b| (&a.headword, &a.entry_id).cmp(&(&b.headword, &b.entry_id)));
        let mut by_form: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            for form in e.forms() {
                let ids = by_form.entry(form.to_owned()).or_default();
                if ids.last() != Some(&i) {
                    ids.push(i);
                }
            }
        }
        Self { entries, by_form }
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, entry_id: &str) -> Option<&LexiconEntry> {
        self.entries.iter().find(|e| e.entry_id == entry_id)
    }

    /// Entries whose headword or a variant equals `form` after trimming and
    /// NFC normalization.
    pub fn lookup_exact(&self, form: &str) -> Vec<&LexiconEntry> {
        self.by_form
            .get(&clean(form))
            .map(|ids| ids.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    /// Fraction of distinct tokens that have an exact dictionary hit.
    pub fn coverage<'a, I>(&self, tokens: I) -> f64
    where
        I: IntoIterator<Item = &'a str>,
    {
        let distinct: HashSet<String> = tokens.into_iter().map(clean).filter(|t| !t.is_empty()).collect();
        if distinct.is_empty() {
            return 0.0;
        }
        let hits = distinct.iter().filter(|t| self.by_form.contains_key(*t)).count();
        hits as f64 / distinct.len() as f64
    }

    /// Line-delimited dump in entry order, readable by [`parse_lexicon`].
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), LexiconError> {
        for e in &self.entries {
            let rec = DumpRecord {
                entry_id: &e.entry_id,
                headword: &e.headword,
                pos: &e.pos,
                gloss: &e.gloss,
                variants: &e.variants,
                examples: &e.examples,
            };
            let line = serde_json::to_string(&rec).map_err(|err| LexiconError::MalformedRecord {
                record: 0,
                message: err.to_string(),
            })?;
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}
