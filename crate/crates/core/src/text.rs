//! Small text utilities shared by the corpus, lexicon, matcher and metrics modules.

use unicode_normalization::UnicodeNormalization;

/// Trim and NFC-normalize.
pub fn nfc_trim(s: &str) -> String {
    s.trim().nfc().collect()
}

/// Collapse runs of whitespace into single spaces and trim the ends.
pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Whitespace token count after trimming.
pub fn word_count(s: &str) -> usize {
    s.split_whitespace().count()
}

/// Punctuation as far as tokenization and scoring are concerned.
pub fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{2018}'..='\u{201F}' // curly quotes
                | '\u{2010}'..='\u{2015}' // dashes
                | '\u{2026}' // ellipsis
                | '\u{00AB}'
                | '\u{00BB}'
                | '\u{00BF}'
                | '\u{00A1}'
        )
}

/// Scoring normalization: NFC, lowercase, punctuation removed, whitespace collapsed.
pub fn normalize_for_scoring(s: &str) -> String {
    let lowered: String = s.nfc().flat_map(char::to_lowercase).collect();
    let stripped: String = lowered.chars().filter(|&c| !is_punctuation(c)).collect();
    collapse_whitespace(&stripped)
}
