//! Phoneme inventories as binary segment-presence vectors, and proxy-language
//! ranking by Hamming distance.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::nfc_trim;

#[derive(Debug, Error)]
pub enum PhonologyError {
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("inventory table has no rows")]
    EmptyTable,
    #[error("malformed inventory table: {0}")]
    Csv(#[from] csv::Error),
    #[error("segment {0:?} is not in the universe")]
    UnknownSegment(String),
    #[error("bit vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no inventory loaded for language {0:?}")]
    UnknownLanguage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergePolicy {
    /// Union every doculect inventory that shares a language code.
    #[default]
    UnionByCode,
    /// Keep only the inventory with the lowest `InventoryID`.
    FirstInventory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhonemeInventory {
    pub language_name: String,
    pub language_code: String,
    pub segments: BTreeSet<String>,
}

/// Ordered set of segments defining the bit positions of an encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentUniverse {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl SegmentUniverse {
    /// Builds a universe from the union of the given inventories, with
    /// symbols in sorted order so the layout does not depend on input order.
    pub fn from_inventories<'a, I>(inventories: I) -> Self
    where
        I: IntoIterator<Item = &'a PhonemeInventory>,
    {
        let all: BTreeSet<&str> = inventories
            .into_iter()
            .flat_map(|inv| inv.segments.iter().map(String::as_str))
            .collect();
        Self::from_symbols(all)
    }

    /// Duplicates after the first occurrence are ignored.
    pub fn from_symbols<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out = Self {
            symbols: Vec::new(),
            index: HashMap::new(),
        };
        for s in symbols {
            let s = nfc_trim(s.as_ref());
            if !out.index.contains_key(&s) {
                out.index.insert(s.clone(), out.symbols.len());
                out.symbols.push(s);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn position(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }
}

/// Fixed-length bit vector packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }
}

impl std::fmt::Display for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn encode_binary(inventory: &PhonemeInventory, universe: &SegmentUniverse) -> Result<BitVector, PhonologyError> {
    let mut bits = BitVector::zeros(universe.len());
    for seg in &inventory.segments {
        let i = universe
            .position(seg)
            .ok_or_else(|| PhonologyError::UnknownSegment(seg.clone()))?;
        bits.set(i);
    }
    Ok(bits)
}

/// Inverse of [`encode_binary`]: the segment set a bit vector denotes.
pub fn decode_binary(bits: &BitVector, universe: &SegmentUniverse) -> BTreeSet<String> {
    bits.iter_ones().map(|i| universe.symbols[i].clone()).collect()
}

/// Number of positions at which two equal-length vectors differ.
pub fn hamming(a: &BitVector, b: &BitVector) -> Result<usize, PhonologyError> {
    if a.len != b.len {
        return Err(PhonologyError::LengthMismatch(a.len, b.len));
    }
    Ok(a.words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum())
}

fn column(headers: &csv::StringRecord, names: &[&str]) -> Option<usize> {
    names.iter().find_map(|n| headers.iter().position(|h| h.trim() == *n))
}

fn present(value: &str) -> Option<&str> {
    let v = value.trim();
    (!v.is_empty() && v != "NA").then_some(v)
}

/// Inventory id (numeric key, raw text) -> (language name, segments).
type DoculectsByInventory = BTreeMap<(u64, String), (String, BTreeSet<String>)>;

/// Reads a PHOIBLE-style CSV (one row per inventory/phoneme pair).
///
/// The language code is the `ISO6393` value when present, else the
/// `Glottocode`. At least one of those columns must exist, plus
/// `InventoryID`, `LanguageName` and `Phoneme`. Inventories are returned in
/// code order.
pub fn load_phoible(table: &str, merge_policy: MergePolicy) -> Result<Vec<PhonemeInventory>, PhonologyError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(table.as_bytes());
    let headers = reader.headers()?.clone();
    let need = |name: &str| column(&headers, &[name]).ok_or_else(|| PhonologyError::MissingColumn(name.into()));
    let inventory_col = need("InventoryID")?;
    let name_col = need("LanguageName")?;
    let phoneme_col = need("Phoneme")?;
    let iso_col = column(&headers, &["ISO6393"]);
    let glotto_col = column(&headers, &["Glottocode"]);
    if iso_col.is_none() && glotto_col.is_none() {
        return Err(PhonologyError::MissingColumn("Glottocode".into()));
    }

    let mut by_code: BTreeMap<String, DoculectsByInventory> = BTreeMap::new();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let code = iso_col
            .and_then(|i| present(field(i)))
            .or_else(|| glotto_col.and_then(|i| present(field(i))));
        let Some(code) = code else {
            continue;
        };
        let phoneme = nfc_trim(field(phoneme_col));
        if phoneme.is_empty() {
            continue;
        }
        let inv_raw = field(inventory_col).trim();
        // Numeric ids sort numerically; anything else sorts after, by text.
        let inv_key = (inv_raw.parse::<u64>().unwrap_or(u64::MAX), inv_raw.to_owned());
        let entry = by_code
            .entry(code.to_owned())
            .or_default()
            .entry(inv_key)
            .or_insert_with(|| (field(name_col).trim().to_owned(), BTreeSet::new()));
        entry.1.insert(phoneme);
        rows += 1;
    }
    if rows == 0 {
        return Err(PhonologyError::EmptyTable);
    }

    Ok(by_code
        .into_iter()
        .map(|(code, inventories)| {
            let mut iter = inventories.into_values();
            let (name, mut segments) = iter.next().expect("at least one inventory per code");
            if merge_policy == MergePolicy::UnionByCode {
                for (_, more) in iter {
                    segments.extend(more);
                }
            }
            PhonemeInventory {
                language_name: name,
                language_code: code,
                segments,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedLanguage {
    pub language_code: String,
    pub language_name: String,
    pub distance: usize,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyRanking {
    pub target: String,
    pub universe_size: usize,
    pub entries: Vec<RankedLanguage>,
}

impl ProxyRanking {
    /// Closest candidate, if any.
    pub fn best(&self) -> Option<&RankedLanguage> {
        self.entries.first()
    }

    pub fn render_table(&self) -> String {
        let mut out = format!("{:<10} {:<24} {:>8} {:>10}\n", "code", "name", "distance", "normalized");
        for e in &self.entries {
            out.push_str(&format!(
                "{:<10} {:<24} {:>8} {:>10.4}\n",
                e.language_code, e.language_name, e.distance, e.normalized
            ));
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("code,name,distance,normalized\n");
        for e in &self.entries {
            let name = if e.language_name.contains([',', '"']) {
                format!("\"{}\"", e.language_name.replace('"', "\"\""))
            } else {
                e.language_name.clone()
            };
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.language_code, name, e.distance, e.normalized
            ));
        }
        out
    }
}

/// Finds a loaded inventory by code, or by case-insensitive language name.
pub fn find_inventory<'a>(inventories: &'a [PhonemeInventory], key: &str) -> Option<&'a PhonemeInventory> {
    inventories.iter().find(|i| i.language_code == key).or_else(|| {
        let key = key.to_lowercase();
        inventories.iter().find(|i| i.language_name.to_lowercase() == key)
    })
}

/// Ranks `candidates` by Hamming distance to `target` over the universe of
/// segments occurring in any of them. Ties go to the lexicographically
/// smaller code. Languages may be named by code or by language name.
pub fn rank_proxies(
    target: &str,
    candidates: &[&str],
    inventories: &[PhonemeInventory],
) -> Result<ProxyRanking, PhonologyError> {
    let resolve =
        |key: &str| find_inventory(inventories, key).ok_or_else(|| PhonologyError::UnknownLanguage(key.into()));
    let target_inv = resolve(target)?;
    let mut chosen: Vec<&PhonemeInventory> = Vec::new();
    for c in candidates {
        let inv = resolve(c)?;
        if !chosen.iter().any(|x| x.language_code == inv.language_code) {
            chosen.push(inv);
        }
    }
    let universe = SegmentUniverse::from_inventories(std::iter::once(target_inv).chain(chosen.iter().copied()));
    let target_bits = encode_binary(target_inv, &universe)?;
    let mut entries = chosen
        .iter()
        .map(|inv| {
            let distance = hamming(&target_bits, &encode_binary(inv, &universe)?)?;
            Ok(RankedLanguage {
                language_code: inv.language_code.clone(),
                language_name: inv.language_name.clone(),
                distance,
                normalized: if universe.is_empty() {
                    0.0
                } else {
                    distance as f64 / universe.len() as f64
                },
            })
        })
        .collect::<Result<Vec<_>, PhonologyError>>()?;
    entries.sort_by(|a, b| (a.distance, &a.language_code).cmp(&(b.distance, &b.language_code)));
    Ok(ProxyRanking {
        target: target_inv.language_code.clone(),
        universe_size: universe.len(),
        entries,
    })
}
