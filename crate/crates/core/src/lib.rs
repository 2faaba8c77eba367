//! Deterministic machinery for a low-resource speech translation pipeline:
//! ELAN corpus ingestion, phoneme-inventory proxy ranking, dictionary
//! matching, prompt construction, and WER/CER/BLEU evaluation.
//!
//! Model inference stays outside this crate, behind the client traits in
//! [`pipeline`].

pub mod config;
pub mod corpus;
pub mod lexicon;
pub mod matcher;
pub mod metrics;
pub mod phonology;
pub mod pipeline;
pub mod prompting;
pub mod synthetic;
pub mod text;

pub use config::RunConfig;
pub use corpus::{CorpusStats, Sample, TrainingPair, Utterance};
pub use lexicon::{AffixKind, Lexicon, LexiconEntry};
pub use matcher::{MatchResult, MatchType, TranscriptMatches};
pub use metrics::EvalReport;
pub use phonology::{PhonemeInventory, ProxyRanking};
pub use pipeline::{GridResult, Transcriber, Translator};
pub use prompting::PromptBundle;
