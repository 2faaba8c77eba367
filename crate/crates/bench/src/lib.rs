//! Benchmark inputs shared by the criterion targets.

use warden_core::synthetic::synthetic_corpus;
use warden_core::Lexicon;

/// Lexicon plus a flat list of transcript tokens from a seeded corpus.
pub fn matcher_inputs(seed: u64) -> (Lexicon, Vec<String>) {
    let corpus = synthetic_corpus(seed, 4, 20);
    let tokens = corpus
        .utterances
        .iter()
        .flat_map(|u| u.transcription.split_whitespace().map(str::to_owned))
        .collect();
    (corpus.lexicon, tokens)
}
