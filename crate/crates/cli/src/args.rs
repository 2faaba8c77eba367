use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use warden_core::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "warden",
    version,
    about = "Corpus, lexicon matching and evaluation tools for low-resource speech translation"
)]
pub struct Cli {
    /// Flat TOML file of key = value settings; command-line flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a directory of .eaf files into utterances, samples and statistics.
    Ingest(IngestArgs),
    /// Print corpus statistics for a sample manifest.
    Stats(StatsArgs),
    /// Split a sample manifest into train and test sets by source file.
    Split(SplitArgs),
    /// Rank candidate proxy languages by phoneme-inventory Hamming distance.
    ProxyRank(ProxyRankArgs),
    /// Normalize a dictionary and write it as line-delimited records.
    Lexicon(LexiconArgs),
    /// Match transcript words against the dictionary.
    Match(MatchArgs),
    /// Build translation prompts for transcripts.
    Prompt(PromptArgs),
    /// Build augmented translation-training pairs.
    Augment(AugmentArgs),
    /// Evaluate a transcription service against gold transcriptions.
    EvalAsr(EvalAsrArgs),
    /// Evaluate lexicon-conditioned translation against gold translations.
    EvalMt(EvalMtArgs),
    /// Sweep the CER threshold and top-k grid.
    Grid(GridArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MergePolicyArg {
    Union,
    First,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LexiconFormatArg {
    Csv,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Directory containing .eaf files (searched non-recursively).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Output directory for utterances.jsonl, manifest.jsonl and stats.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Transcription tier name [default: transcription]
    #[arg(long)]
    pub transcription_tier: Option<String>,
    /// Translation tier name [default: translation]
    #[arg(long)]
    pub translation_tier: Option<String>,
    /// Sample duration budget in ms [default: 30000]
    #[arg(long)]
    pub max_duration_ms: Option<u64>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Sample manifest (line-delimited records).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Output format [default: text]
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Fraction of files held out for test [default: 0.1]
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Shuffle seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for train.jsonl and test.jsonl.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProxyRankArgs {
    /// PHOIBLE-style CSV.
    #[arg(long)]
    pub phoible: Option<PathBuf>,
    /// Target language code or name.
    #[arg(long)]
    pub target: String,
    /// Comma-separated candidate codes or names.
    #[arg(long, value_delimiter = ',', required = true)]
    pub candidates: Vec<String>,
    /// How doculects sharing a code are merged [default: union]
    #[arg(long, value_enum)]
    pub merge_policy: Option<MergePolicyArg>,
    /// Output format [default: text]
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
}

#[derive(Debug, Args)]
pub struct LexiconArgs {
    /// Dictionary file (.csv or line-delimited JSON).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Input format [default: from file extension]
    #[arg(long, value_enum)]
    pub lexicon_format: Option<LexiconFormatArg>,
    /// Write the normalized dump here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sample manifest; when given, report dictionary coverage of its tokens.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct MatchParams {
    /// CER threshold; candidates need CER strictly below it [default: 0.2]
    #[arg(long)]
    pub tau: Option<f64>,
    /// CER candidates kept per word [default: 3]
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub lexicon_format: Option<LexiconFormatArg>,
    /// A single transcript; otherwise every sample of --manifest is matched.
    #[arg(long, conflicts_with = "manifest")]
    pub transcript: Option<String>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub params: MatchParams,
    /// Write records here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PromptArgs {
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub lexicon_format: Option<LexiconFormatArg>,
    #[arg(long, conflicts_with = "manifest")]
    pub transcript: Option<String>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub params: MatchParams,
    /// Build in-context prompts from this many example pairs instead of
    /// lexicon entries [default: lexicon prompts]
    #[arg(long)]
    pub shots: Option<usize>,
    /// Example pairs for --shots: line-delimited {"source", "target"}
    /// records; defaults to the dictionary's sentence examples.
    #[arg(long, requires = "shots")]
    pub exemplars: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Sample manifest (long segments).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Utterance list (short segments).
    #[arg(long)]
    pub utterances: Option<PathBuf>,
    /// ASR output: line-delimited {"id", "text"} keyed by sample or utterance id.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Include utterance-level pairs [default: true]
    #[arg(long)]
    pub include_short: Option<bool>,
    /// Include sample-level pairs [default: true]
    #[arg(long)]
    pub include_long: Option<bool>,
    /// Include pairs with predicted source text [default: false]
    #[arg(long)]
    pub include_predicted: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct ServiceParams {
    /// Concurrent requests in flight [default: 4]
    #[arg(long)]
    pub in_flight: Option<usize>,
    /// Per-request timeout in seconds [default: 120]
    #[arg(long)]
    pub timeout_secs: Option<u64>,
    /// Retries with exponential backoff [default: 3]
    #[arg(long)]
    pub retries: Option<u32>,
    /// Model name sent to HTTP translation services [default: default]
    #[arg(long, env = "WARDEN_MODEL")]
    pub model: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvalAsrArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Transcription endpoint: http(s) URL, mock:echo or mock:noise:<rate>
    #[arg(long, env = "WARDEN_ASR_URL")]
    pub asr: Option<String>,
    /// Language token passed to the ASR model [default: su]
    #[arg(long)]
    pub language_token: Option<String>,
    #[command(flatten)]
    pub service: ServiceParams,
    /// Run directory for manifest, records and report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalMtArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub lexicon_format: Option<LexiconFormatArg>,
    /// Translation endpoint: http(s) URL, mock:echo, mock:gloss or mock:noise:<rate>
    #[arg(long, env = "WARDEN_TRANSLATOR_URL")]
    pub translator: Option<String>,
    #[command(flatten)]
    pub params: MatchParams,
    #[command(flatten)]
    pub service: ServiceParams,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub lexicon_format: Option<LexiconFormatArg>,
    /// Translation endpoint: http(s) URL, mock:echo, mock:gloss or mock:noise:<rate>
    #[arg(long, env = "WARDEN_TRANSLATOR_URL")]
    pub translator: Option<String>,
    /// Comma-separated CER thresholds [default: 0.1,0.2,0.3,0.4,0.5]
    #[arg(long, value_delimiter = ',')]
    pub taus: Option<Vec<f64>>,
    /// Comma-separated top-k values [default: 1,2,3,4,5]
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
    #[command(flatten)]
    pub service: ServiceParams,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl MatchParams {
    pub fn to_config(&self) -> RunConfig {
        RunConfig {
            tau: self.tau,
            k: self.k,
            ..Default::default()
        }
    }
}

impl ServiceParams {
    pub fn apply(&self, c: &mut RunConfig) {
        c.in_flight = self.in_flight;
        c.timeout_secs = self.timeout_secs;
        c.retries = self.retries;
    }
}

impl Command {
    /// The subset of flags that correspond to config keys.
    pub fn to_config(&self) -> RunConfig {
        let mut c = RunConfig::default();
        match self {
            Command::Ingest(a) => {
                c.corpus = a.corpus.clone();
                c.out = a.out.clone();
                c.transcription_tier = a.transcription_tier.clone();
                c.translation_tier = a.translation_tier.clone();
                c.max_duration_ms = a.max_duration_ms;
            }
            Command::Stats(a) => c.manifest = a.manifest.clone(),
            Command::Split(a) => {
                c.manifest = a.manifest.clone();
                c.test_fraction = a.test_fraction;
                c.seed = a.seed;
                c.out = a.out.clone();
            }
            Command::ProxyRank(a) => c.phoible = a.phoible.clone(),
            Command::Lexicon(a) => {
                c.lexicon = a.lexicon.clone();
                c.manifest = a.manifest.clone();
            }
            Command::Match(a) => {
                c = a.params.to_config();
                c.lexicon = a.lexicon.clone();
                c.manifest = a.manifest.clone();
            }
            Command::Prompt(a) => {
                c = a.params.to_config();
                c.lexicon = a.lexicon.clone();
                c.manifest = a.manifest.clone();
            }
            Command::Augment(a) => {
                c.manifest = a.manifest.clone();
                c.utterances = a.utterances.clone();
                c.include_short = a.include_short;
                c.include_long = a.include_long;
                c.include_predicted = a.include_predicted;
                c.out = a.out.clone();
            }
            Command::EvalAsr(a) => {
                c.manifest = a.manifest.clone();
                c.asr_url = a.asr.clone();
                c.language_token = a.language_token.clone();
                c.out = a.out.clone();
                a.service.apply(&mut c);
            }
            Command::EvalMt(a) => {
                c = a.params.to_config();
                c.manifest = a.manifest.clone();
                c.lexicon = a.lexicon.clone();
                c.translator_url = a.translator.clone();
                c.out = a.out.clone();
                a.service.apply(&mut c);
            }
            Command::Grid(a) => {
                c.manifest = a.manifest.clone();
                c.lexicon = a.lexicon.clone();
                c.translator_url = a.translator.clone();
                c.taus = a.taus.clone();
                c.ks = a.ks.clone();
                c.out = a.out.clone();
                a.service.apply(&mut c);
            }
        }
        c
    }
}
