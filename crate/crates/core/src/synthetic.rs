//! Seeded synthetic corpora for tests, benchmarks and demos.
//!
//! Words are built from a small syllable inventory; every stem has a
//! one-word English gloss and a gold translation is the gloss sequence of
//! its transcription. Some transcript tokens carry a one-character
//! corruption so that CER matching has non-trivial work to do.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{concatenate_segments, Sample, Utterance};
use crate::lexicon::{AffixKind, Lexicon, LexiconEntry};

const SYLLABLES: &[&str] = &[
    "ba", "bu", "da", "du", "ga", "gu", "ji", "ju", "la", "lu", "ma", "mi", "na", "ni", "rra", "rru", "wa", "wu", "ya",
    "yi",
];

const GLOSSES: &[&str] = &[
    "man", "woman", "river", "stone", "fire", "dog", "tree", "water", "camp", "hill", "kangaroo", "snake", "sun",
    "moon", "child", "spear", "go", "see", "sit", "eat", "hit", "run", "sleep", "talk", "big", "small", "good", "bad",
    "here", "there",
];

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub utterances: Vec<Utterance>,
    pub lexicon: Lexicon,
}

impl SyntheticCorpus {
    pub fn samples(&self, max_duration_ms: u64) -> Vec<Sample> {
        concatenate_segments(&self.utterances, max_duration_ms)
    }
}

fn stems(rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    while out.len() < GLOSSES.len() {
        let n = rng.random_range(2..=3);
        let word: String = (0..n)
            .map(|_| SYLLABLES[rng.random_range(0..SYLLABLES.len())])
            .collect();
        if !out.contains(&word) {
            out.push(word);
        }
    }
    out
}

fn corrupt(word: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    let i = rng.random_range(0..chars.len());
    chars[i] = if chars[i] == 'a' { 'e' } else { 'a' };
    chars.into_iter().collect()
}

/// Builds `files` recordings of `utterances_per_file` utterances each.
/// Utterances last 2-9 s with gaps of up to 1 s.
pub fn synthetic_corpus(seed: u64, files: usize, utterances_per_file: usize) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stems = stems(&mut rng);
    let mut entries: Vec<LexiconEntry> = stems
        .iter()
        .zip(GLOSSES)
        .enumerate()
        .map(|(i, (stem, gloss))| LexiconEntry {
            entry_id: format!("s{i:03}"),
            headword: stem.clone(),
            pos: if i < 16 {
                "n".into()
            } else if i < 24 {
                "v".into()
            } else {
                "adj".into()
            },
            gloss: (*gloss).to_owned(),
            variants: vec![],
            examples: vec![],
            affix_kind: AffixKind::Stem,
        })
        .collect();
    entries.push(LexiconEntry {
        entry_id: "a000".into(),
        headword: "yi-".into(),
        pos: "prefix".into(),
        gloss: "3sg subject".into(),
        variants: vec![],
        examples: vec![],
        affix_kind: AffixKind::Prefix,
    });
    entries.push(LexiconEntry {
        entry_id: "a001".into(),
        headword: "-wu".into(),
        pos: "suffix".into(),
        gloss: "ergative".into(),
        variants: vec![],
        examples: vec![],
        affix_kind: AffixKind::Suffix,
    });

    let mut utterances = Vec::new();
    for f in 0..files {
        let file = format!("rec{f:03}");
        let mut t = rng.random_range(0..2_000u64);
        for u in 0..utterances_per_file {
            let len = rng.random_range(2_000..=9_000u64);
            let words = rng.random_range(3..=6);
            let mut tr = Vec::with_capacity(words);
            let mut tl = Vec::with_capacity(words);
            for _ in 0..words {
                let i = rng.random_range(0..stems.len());
                let form = if rng.random_bool(0.25) {
                    corrupt(&stems[i], &mut rng)
                } else {
                    stems[i].clone()
                };
                tr.push(form);
                tl.push(GLOSSES[i]);
            }
            utterances.push(Utterance {
                id: format!("{file}:u{u:03}"),
                source_file: file.clone(),
                start_ms: t,
                end_ms: t + len,
                transcription: tr.join(" "),
                translation: Some(tl.join(" ")),
            });
            t += len + rng.random_range(0..=1_000u64);
        }
    }
    SyntheticCorpus {
        utterances,
        lexicon: Lexicon::from_entries(entries),
    }
}

/// Exactly `n` samples drawn from a synthetic corpus packed under the
/// default 30 s budget.
pub fn synthetic_samples(seed: u64, n: usize) -> (Vec<Sample>, Lexicon) {
    let mut files = n.div_ceil(2).max(1);
    loop {
        let corpus = synthetic_corpus(seed, files, 8);
        let mut samples = corpus.samples(crate::corpus::DEFAULT_MAX_DURATION_MS);
        if samples.len() >= n {
            samples.truncate(n);
            return (samples, corpus.lexicon);
        }
        files += 1;
    }
}
