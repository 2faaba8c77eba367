use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use warden_core::config::RunConfig;
use warden_core::corpus::{
    build_training_pairs, concatenate_segments, corpus_stats, parse_eaf, read_jsonl, split_by_file, write_jsonl,
    AugmentOptions, Sample, TierNames, Utterance,
};
use warden_core::lexicon::{parse_lexicon, Lexicon, LexiconFormat};
use warden_core::matcher::{match_report, match_transcript};
use warden_core::phonology::{load_phoible, rank_proxies, MergePolicy};
use warden_core::pipeline::{
    grid_search, run_transcription_eval, run_translation_eval, transcriber_for, translator_for, EvalRun, HttpSettings,
    RunDir,
};
use warden_core::prompting::{build_fewshot_prompt, build_prompt, PromptBundle};

use crate::args::*;
use crate::Outcome;

pub fn run(cli: Cli) -> Result<Outcome> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    config = config.overlay(cli.command.to_config());
    config.validate()?;

    match &cli.command {
        Command::Ingest(_) => ingest(&config),
        Command::Stats(a) => stats(&config, a),
        Command::Split(_) => split(&config),
        Command::ProxyRank(a) => proxy_rank(&config, a),
        Command::Lexicon(a) => lexicon(&config, a),
        Command::Match(a) => match_cmd(&config, a),
        Command::Prompt(a) => prompt(&config, a),
        Command::Augment(a) => augment(&config, a),
        Command::EvalAsr(a) => eval_asr(&config, a),
        Command::EvalMt(a) => eval_mt(&config, a),
        Command::Grid(a) => grid(&config, a),
    }
}

fn input(path: &Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    let path = path.clone().ok_or_else(|| anyhow!("missing required --{flag}"))?;
    if !path.exists() {
        bail!("--{flag}: {} does not exist", path.display());
    }
    Ok(path)
}

fn output(path: &Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    path.clone().ok_or_else(|| anyhow!("missing required --{flag}"))
}

fn read_records<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_jsonl(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn jsonl_string<T: Serialize>(items: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_jsonl(items, &mut buf)?;
    Ok(String::from_utf8(buf)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_lexicon(config: &RunConfig, format: Option<LexiconFormatArg>) -> Result<Lexicon> {
    let path = input(&config.lexicon, "lexicon")?;
    let format = match format {
        Some(LexiconFormatArg::Csv) => LexiconFormat::Csv,
        Some(LexiconFormatArg::Jsonl) => LexiconFormat::JsonLines,
        None => match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => LexiconFormat::Csv,
            _ => LexiconFormat::JsonLines,
        },
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    parse_lexicon(&text, format).with_context(|| format!("parsing {}", path.display()))
}

fn load_samples(config: &RunConfig) -> Result<Vec<Sample>> {
    read_records(&input(&config.manifest, "manifest")?)
}

fn settings(config: &RunConfig, service: &ServiceParams) -> HttpSettings {
    HttpSettings {
        timeout: config.timeout(),
        retries: config.retries(),
        api_key: std::env::var("WARDEN_API_KEY").ok().filter(|k| !k.is_empty()),
        model: service.model.clone().unwrap_or_else(|| "default".into()),
    }
}

fn ingest(config: &RunConfig) -> Result<Outcome> {
    let dir = input(&config.corpus, "corpus")?;
    let out = RunDir::create(output(&config.out, "out")?)?;
    let tiers = TierNames {
        transcription: config
            .transcription_tier
            .clone()
            .unwrap_or_else(|| "transcription".into()),
        translation: config.translation_tier.clone().unwrap_or_else(|| "translation".into()),
    };
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("eaf"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .eaf files in {}", dir.display());
    }

    let mut utterances: Vec<Utterance> = Vec::new();
    for path in &files {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| anyhow!("non UTF-8 file name {}", path.display()))?;
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let parsed = parse_eaf(&text, name, &tiers).with_context(|| format!("parsing {}", path.display()))?;
        utterances.extend(parsed);
    }
    let samples = concatenate_segments(&utterances, config.max_duration_ms());
    let stats = corpus_stats(&samples);

    out.write_text("utterances.jsonl", &jsonl_string(&utterances)?)?;
    out.write_text("manifest.jsonl", &jsonl_string(&samples)?)?;
    out.write_text("stats.txt", &stats.render_table())?;
    out.write_text("stats.csv", &stats.render_csv())?;
    print!("{}", stats.render_table());
    let oversize = samples.iter().filter(|s| s.oversize_flag).count();
    eprintln!(
        "{} files, {} utterances, {} samples ({} oversize) -> {}",
        files.len(),
        utterances.len(),
        samples.len(),
        oversize,
        out.path().display()
    );
    Ok(Outcome::Success)
}

fn stats(config: &RunConfig, args: &StatsArgs) -> Result<Outcome> {
    let stats = corpus_stats(&load_samples(config)?);
    let text = match args.format.unwrap_or(TableFormat::Text) {
        TableFormat::Text => stats.render_table(),
        TableFormat::Csv => stats.render_csv(),
        TableFormat::Json => serde_json::to_string_pretty(&stats)? + "\n",
    };
    print!("{text}");
    Ok(Outcome::Success)
}

fn split(config: &RunConfig) -> Result<Outcome> {
    let samples = load_samples(config)?;
    let out = RunDir::create(output(&config.out, "out")?)?;
    let (train, test) = split_by_file(&samples, config.test_fraction(), config.seed())?;
    out.write_text("train.jsonl", &jsonl_string(&train)?)?;
    out.write_text("test.jsonl", &jsonl_string(&test)?)?;
    println!("train: {} samples\ntest: {} samples", train.len(), test.len());
    Ok(Outcome::Success)
}

fn proxy_rank(config: &RunConfig, args: &ProxyRankArgs) -> Result<Outcome> {
    let path = input(&config.phoible, "phoible")?;
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let policy = match args.merge_policy.unwrap_or(MergePolicyArg::Union) {
        MergePolicyArg::Union => MergePolicy::UnionByCode,
        MergePolicyArg::First => MergePolicy::FirstInventory,
    };
    let inventories = load_phoible(&text, policy)?;
    let candidates: Vec<&str> = args
        .candidates
        .iter()
        .map(|c| c.trim())
        .filter(|c| !c.is_empty())
        .collect();
    let ranking = rank_proxies(args.target.trim(), &candidates, &inventories)?;
    match args.format.unwrap_or(TableFormat::Text) {
        TableFormat::Text => {
            print!("{}", ranking.render_table());
            if let Some(best) = ranking.best() {
                println!("proxy: {}", best.language_code);
            }
        }
        TableFormat::Csv => print!("{}", ranking.render_csv()),
        TableFormat::Json => println!("{}", serde_json::to_string_pretty(&ranking)?),
    }
    Ok(Outcome::Success)
}

fn lexicon(config: &RunConfig, args: &LexiconArgs) -> Result<Outcome> {
    let lex = load_lexicon(config, args.lexicon_format)?;
    let mut dump = Vec::new();
    lex.write_jsonl(&mut dump)?;
    emit(args.out.as_deref(), std::str::from_utf8(&dump)?)?;
    eprintln!("{} entries", lex.len());
    if config.manifest.is_some() {
        let samples = load_samples(config)?;
        let coverage = lex.coverage(samples.iter().flat_map(|s| s.transcription.split_whitespace()));
        eprintln!("coverage of distinct transcript tokens: {:.4}", coverage);
    }
    Ok(Outcome::Success)
}

/// Transcripts to process: one from the flag, or one per manifest sample.
fn transcripts(config: &RunConfig, transcript: &Option<String>) -> Result<Vec<(String, String)>> {
    match transcript {
        Some(t) => Ok(vec![("transcript".into(), t.clone())]),
        None => Ok(load_samples(config)?
            .into_iter()
            .map(|s| (s.id, s.transcription))
            .collect()),
    }
}

fn match_cmd(config: &RunConfig, args: &MatchArgs) -> Result<Outcome> {
    let lex = load_lexicon(config, args.lexicon_format)?;
    let mut records = Vec::new();
    for (_, text) in transcripts(config, &args.transcript)? {
        let matches = match_transcript(&text, &lex, config.k(), config.tau())?;
        records.extend(match_report(&matches, &lex));
    }
    emit(args.out.as_deref(), &jsonl_string(&records)?)?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct PromptRecord<'a> {
    id: &'a str,
    system: &'a str,
    user: &'a str,
}

#[derive(Deserialize)]
struct Exemplar {
    source: String,
    target: String,
}

fn prompt(config: &RunConfig, args: &PromptArgs) -> Result<Outcome> {
    let lex = load_lexicon(config, args.lexicon_format)?;
    let exemplars: Vec<(String, String)> = match (&args.exemplars, args.shots) {
        (Some(path), _) => read_records::<Exemplar>(path)?
            .into_iter()
            .map(|e| (e.source, e.target))
            .collect(),
        (None, Some(_)) => lex.entries().iter().flat_map(|e| e.examples.iter().cloned()).collect(),
        (None, None) => Vec::new(),
    };
    let mut bundles: Vec<(String, PromptBundle)> = Vec::new();
    for (id, text) in transcripts(config, &args.transcript)? {
        let bundle = match args.shots {
            Some(n) => build_fewshot_prompt(&text, &exemplars, n)?,
            None => {
                let matches = match_transcript(&text, &lex, config.k(), config.tau())?;
                build_prompt(&text, &matches, &lex)?
            }
        };
        bundles.push((id, bundle));
    }
    let records: Vec<PromptRecord> = bundles
        .iter()
        .map(|(id, b)| PromptRecord {
            id,
            system: &b.system,
            user: &b.user,
        })
        .collect();
    emit(args.out.as_deref(), &jsonl_string(&records)?)?;
    Ok(Outcome::Success)
}

#[derive(Deserialize)]
struct Prediction {
    id: String,
    text: String,
}

fn augment(config: &RunConfig, args: &AugmentArgs) -> Result<Outcome> {
    let options = AugmentOptions {
        include_short: config.include_short.unwrap_or(true),
        include_long: config.include_long.unwrap_or(true),
        include_predicted: config.include_predicted.unwrap_or(false),
    };
    let samples = if options.include_long {
        load_samples(config)?
    } else {
        Vec::new()
    };
    let utterances: Vec<Utterance> = if options.include_short {
        read_records(&input(&config.utterances, "utterances")?)?
    } else {
        Vec::new()
    };
    let predictions: Option<BTreeMap<String, String>> = match &args.predictions {
        Some(path) => Some(
            read_records::<Prediction>(path)?
                .into_iter()
                .map(|p| (p.id, p.text))
                .collect(),
        ),
        None => None,
    };
    let pairs = build_training_pairs(&samples, &utterances, predictions.as_ref(), options)?;
    emit(config.out.as_deref(), &jsonl_string(&pairs)?)?;
    eprintln!("{} training pairs", pairs.len());
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    config: &'a RunConfig,
    samples: usize,
}

fn finish_eval(out: &RunDir, command: &str, config: &RunConfig, samples: usize, run: &EvalRun) -> Result<Outcome> {
    out.write_json(
        "manifest.json",
        &RunManifest {
            command,
            config,
            samples,
        },
    )?;
    out.write_records(&run.records)?;
    out.write_json("report.json", &run.report)?;
    print!("{}", run.report.render_table());
    if run.skipped > 0 {
        eprintln!("{} samples without reference skipped", run.skipped);
    }
    if run.partial {
        eprintln!(
            "{} of {} samples failed; report is partial",
            run.failed,
            run.records.len()
        );
        return Ok(Outcome::Partial);
    }
    Ok(Outcome::Success)
}

fn eval_asr(config: &RunConfig, args: &EvalAsrArgs) -> Result<Outcome> {
    let samples = load_samples(config)?;
    let out = RunDir::create(output(&config.out, "out")?)?;
    let address = config
        .asr_url
        .clone()
        .ok_or_else(|| anyhow!("missing required --asr"))?;
    let client = transcriber_for(&address, &samples, settings(config, &args.service))?;
    let run = run_transcription_eval(&samples, client.as_ref(), config.language_token(), config.in_flight())?;
    finish_eval(&out, "eval-asr", config, samples.len(), &run)
}

fn eval_mt(config: &RunConfig, args: &EvalMtArgs) -> Result<Outcome> {
    let samples = load_samples(config)?;
    let lex = load_lexicon(config, args.lexicon_format)?;
    let out = RunDir::create(output(&config.out, "out")?)?;
    let address = config
        .translator_url
        .clone()
        .ok_or_else(|| anyhow!("missing required --translator"))?;
    let client = translator_for(&address, &samples, settings(config, &args.service))?;
    let run = run_translation_eval(
        &samples,
        &lex,
        config.tau(),
        config.k(),
        client.as_ref(),
        config.in_flight(),
    )?;
    finish_eval(&out, "eval-mt", config, samples.len(), &run)
}

fn grid(config: &RunConfig, args: &GridArgs) -> Result<Outcome> {
    let samples = load_samples(config)?;
    let lex = load_lexicon(config, args.lexicon_format)?;
    let out = RunDir::create(output(&config.out, "out")?)?;
    let address = config
        .translator_url
        .clone()
        .ok_or_else(|| anyhow!("missing required --translator"))?;
    let client = translator_for(&address, &samples, settings(config, &args.service))?;
    let run = grid_search(
        &samples,
        &lex,
        &config.taus(),
        &config.ks(),
        client.as_ref(),
        config.in_flight(),
    )?;

    out.write_json(
        "manifest.json",
        &RunManifest {
            command: "grid",
            config,
            samples: samples.len(),
        },
    )?;
    out.write_records(&run.records)?;
    out.write_json("report.json", &run.result)?;
    let table = run.result.render_table();
    out.write_text("grid.txt", &table)?;
    out.write_text("grid.csv", &run.result.render_csv())?;
    print!("{table}");
    if run.result.is_partial() {
        return Ok(Outcome::Partial);
    }
    Ok(Outcome::Success)
}
