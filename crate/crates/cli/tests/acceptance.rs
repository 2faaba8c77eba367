//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero if any criterion fails or overruns its time budget.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use warden_core::corpus::{concatenate_segments, corpus_stats, write_jsonl};
use warden_core::lexicon::{parse_lexicon, LexiconFormat};
use warden_core::matcher::{match_transcript, match_word};
use warden_core::metrics::{bleu4, cer_eval, levenshtein, wer};
use warden_core::phonology::{encode_binary, hamming, load_phoible, rank_proxies, MergePolicy, SegmentUniverse};
use warden_core::prompting::{build_fewshot_prompt, build_prompt, SYSTEM_PROMPT};
use warden_core::synthetic::{synthetic_corpus, synthetic_samples};
use warden_core::{AffixKind, Lexicon, LexiconEntry, MatchType, PhonemeInventory, Sample, Utterance};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const CORE_TESTS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests");

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

// ---------------------------------------------------------------- metrics

fn all_sequences(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for c in 0..3u8 {
                let mut t: Vec<u8> = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn metrics_suite() -> Outcome {
    let seqs = all_sequences(6);
    let mut pairs = 0usize;
    for a in &seqs {
        for b in &seqs {
            let e = levenshtein(a, b);
            let d = oracles::dp_distance(a, b);
            ensure!(e.distance == d, "{a:?} vs {b:?}: {} != {d}", e.distance);
            ensure!(
                e.substitutions + e.insertions + e.deletions == d,
                "S+I+D != distance for {a:?} {b:?}"
            );
            pairs += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let gen = |rng: &mut ChaCha8Rng| -> Vec<u8> {
            let n = rng.random_range(0..=40);
            (0..n).map(|_| rng.random_range(0..4u8)).collect()
        };
        let a = gen(&mut rng);
        let b = gen(&mut rng);
        let d = levenshtein(&a, &b).distance;
        ensure!(d == oracles::dp_distance(&a, &b), "random pair {a:?} {b:?}");
        ensure!(d == levenshtein(&b, &a).distance, "asymmetric distance for {a:?} {b:?}");
    }

    let hand: [(&str, &str, f64); 4] = [
        ("a b c", "a b c", 0.0),
        ("a b c", "a x c", 1.0 / 3.0),
        ("a", "a b c", 2.0),
        ("the cat sat on the mat", "the cat sat on mat", 1.0 / 6.0),
    ];
    for (r, h, want) in hand {
        let got = wer(r, h).map_err(|e| e.to_string())?;
        ensure!(close(got, want), "wer({r:?}, {h:?}) = {got}, want {want}");
    }
    for (r, h, want) in [("abcd", "abcd", 0.0), ("abcd", "abed", 0.25), ("ab", "abxy", 1.0)] {
        let got = cer_eval(r, h).map_err(|e| e.to_string())?;
        ensure!(close(got, want), "cer_eval({r:?}, {h:?}) = {got}, want {want}");
    }

    // Clipped counts: p1 = 8/10, p2 = 5/8, p3 = 3/6, p4 = 1/4; c = 10, r = 9, no penalty.
    let got = bleu4(
        &["the cat sat on the mat", "a dog ran"],
        &["the cat sat on a mat", "a dog ran fast"],
    )
    .map_err(|e| e.to_string())?;
    let want = (0.8f64 * 0.625 * 0.5 * 0.25).powf(0.25);
    ensure!(close(got, want), "bleu4 = {got}, want {want}");
    // All precisions 1, c = 5 < r = 6.
    let got = bleu4(&["the cat sat on the mat"], &["the cat sat on the"]).map_err(|e| e.to_string())?;
    ensure!(close(got, (1.0f64 - 6.0 / 5.0).exp()), "brevity penalty: {got}");

    Ok(format!("{pairs} exhaustive pairs, 1000 random pairs, hand examples"))
}

// ---------------------------------------------------------------- matcher

fn random_form(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[char] = &['a', 'b', 'd', 'i', 'r', 'u'];
    let n = rng.random_range(1..=7);
    (0..n).map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())]).collect()
}

fn random_lexicon(rng: &mut ChaCha8Rng) -> Lexicon {
    let size = rng.random_range(1..=200);
    let entries = (0..size)
        .map(|i| {
            let kind = match rng.random_range(0..10) {
                0 | 1 => AffixKind::Prefix,
                2 | 3 => AffixKind::Suffix,
                _ => AffixKind::Stem,
            };
            let dress = |f: String| match kind {
                AffixKind::Prefix => format!("{f}-"),
                AffixKind::Suffix => format!("-{f}"),
                AffixKind::Stem => f,
            };
            let headword = dress(random_form(rng));
            let variants = (0..rng.random_range(0..3)).map(|_| dress(random_form(rng))).collect();
            LexiconEntry {
                entry_id: format!("e{i:04}"),
                headword,
                pos: String::new(),
                gloss: format!("g{i}"),
                variants,
                examples: vec![],
                affix_kind: kind,
            }
        })
        .collect();
    Lexicon::from_entries(entries)
}

fn cer_ids(word: &str, lex: &Lexicon, k: usize, tau: f64) -> Result<Vec<String>, String> {
    Ok(match_word(word, lex, k, tau)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|m| m.match_type == MatchType::Cer)
        .map(|m| m.entry_id)
        .collect())
}

fn matcher_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut nonempty = 0;
    for case in 0..500 {
        let lex = random_lexicon(&mut rng);
        let word = random_form(&mut rng);
        let k = rng.random_range(1..=6);
        let tau = rng.random_range(0.05..=1.0);
        let oracle_entries: Vec<oracles::OracleEntry> = lex
            .entries()
            .iter()
            .map(|e| oracles::OracleEntry {
                id: e.entry_id.clone(),
                forms: e.forms().map(String::from).collect(),
            })
            .collect();
        let got: Vec<oracles::OracleHit> = match_word(&word, &lex, k, tau)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|m| (m.entry_id, m.matched_form, m.cer, m.match_type == MatchType::Affix))
            .collect();
        let want = oracles::brute_match_word(&word, &oracle_entries, k, tau);
        ensure!(
            got == want,
            "case {case}: word {word:?} k={k} tau={tau}\n got {got:?}\nwant {want:?}"
        );
        nonempty += usize::from(!got.is_empty());

        let base = cer_ids(&word, &lex, k, tau)?;
        let wider = cer_ids(&word, &lex, k, (tau + 0.2).min(1.0))?;
        ensure!(wider.starts_with(&base), "case {case}: raising tau dropped matches");
        let deeper = cer_ids(&word, &lex, k + 1, tau)?;
        ensure!(deeper.starts_with(&base), "case {case}: raising k dropped matches");
    }
    Ok(format!(
        "500 instances ({nonempty} with matches), monotone in tau and k"
    ))
}

// ---------------------------------------------------------------- segmentation

fn random_corpus(rng: &mut ChaCha8Rng, case: usize) -> Vec<Utterance> {
    if case.is_multiple_of(2) {
        let files = rng.random_range(1..=6);
        let per_file = rng.random_range(1..=25);
        return synthetic_corpus(rng.random(), files, per_file).utterances;
    }
    // Arbitrary overlaps, gaps and some utterances longer than the budget.
    let n = rng.random_range(0..=60);
    (0..n)
        .map(|i| {
            let start = rng.random_range(0..200_000u64);
            let len = if rng.random_bool(0.05) {
                rng.random_range(30_001..=45_000)
            } else {
                rng.random_range(1..=12_000)
            };
            Utterance {
                id: format!("u{i}"),
                source_file: format!("f{}", rng.random_range(0..5)),
                start_ms: start,
                end_ms: start + len,
                transcription: format!("w{i}"),
                translation: Some(format!("t{i}")),
            }
        })
        .collect()
}

fn segmentation_suite() -> Outcome {
    const MAX: u64 = 30_000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut total_samples = 0;
    for case in 0..200 {
        let utts = random_corpus(&mut rng, case);
        let samples = concatenate_segments(&utts, MAX);
        total_samples += samples.len();
        let file_of: BTreeMap<&str, &str> = utts.iter().map(|u| (u.id.as_str(), u.source_file.as_str())).collect();

        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for s in &samples {
            for id in &s.utterance_ids {
                *seen.entry(id.as_str()).or_default() += 1;
                ensure!(
                    file_of.get(id.as_str()) == Some(&s.source_file.as_str()),
                    "case {case}: sample {} crosses files",
                    s.id
                );
            }
            let span = s.span_end_ms - s.span_start_ms;
            if s.utterance_ids.len() > 1 {
                ensure!(span <= MAX, "case {case}: sample {} spans {span} ms", s.id);
            }
            ensure!(
                s.oversize_flag == (span > MAX),
                "case {case}: oversize flag wrong on {}",
                s.id
            );
        }
        ensure!(
            seen.len() == utts.len(),
            "case {case}: {} of {} utterances placed",
            seen.len(),
            utts.len()
        );
        ensure!(
            seen.values().all(|&c| c == 1),
            "case {case}: an utterance appears twice"
        );

        let spans: Vec<oracles::Span> = utts
            .iter()
            .map(|u| (u.source_file.clone(), u.start_ms, u.end_ms))
            .collect();
        let want: Vec<Vec<&str>> = oracles::brute_pack(&spans, MAX)
            .into_iter()
            .map(|g| g.into_iter().map(|i| utts[i].id.as_str()).collect())
            .collect();
        let got: Vec<Vec<&str>> = samples
            .iter()
            .map(|s| s.utterance_ids.iter().map(String::as_str).collect())
            .collect();
        ensure!(got == want, "case {case}: packing differs from the reference packer");
    }
    Ok(format!("200 corpora, {total_samples} samples"))
}

// ---------------------------------------------------------------- phonology

fn random_inventory(rng: &mut ChaCha8Rng, code: String) -> PhonemeInventory {
    let n = rng.random_range(0..=90);
    PhonemeInventory {
        language_name: code.to_uppercase(),
        language_code: code,
        segments: (0..n).map(|_| format!("s{}", rng.random_range(0..140))).collect(),
    }
}

fn phoible_check() -> Outcome {
    let Ok(path) = std::env::var("WARDEN_PHOIBLE_CSV") else {
        return Ok("PHOIBLE check skipped (WARDEN_PHOIBLE_CSV not set)".into());
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    let inventories = load_phoible(&text, MergePolicy::UnionByCode).map_err(|e| e.to_string())?;
    let ranking =
        rank_proxies("wrr", &["sun", "uzb", "hau", "hrv", "oci", "eng"], &inventories).map_err(|e| e.to_string())?;
    let best = ranking.best().map(|b| b.language_code.clone()).unwrap_or_default();
    ensure!(
        best == "sun",
        "nearest neighbour of Wardaman is {best}, not sun:\n{}",
        ranking.render_table()
    );
    Ok("PHOIBLE nearest neighbour of Wardaman: sun".into())
}

fn phonology_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..1000 {
        let a = random_inventory(&mut rng, "a".into());
        let b = random_inventory(&mut rng, "b".into());
        let c = random_inventory(&mut rng, "c".into());
        let u = SegmentUniverse::from_inventories([&a, &b, &c]);
        let enc = |i: &PhonemeInventory| encode_binary(i, &u).map_err(|e| e.to_string());
        let (va, vb, vc) = (enc(&a)?, enc(&b)?, enc(&c)?);
        let d = |x, y| hamming(x, y).map_err(|e| e.to_string());
        ensure!(d(&va, &va)? == 0, "case {case}: self-distance");
        ensure!(d(&va, &vb)? == d(&vb, &va)?, "case {case}: symmetry");
        ensure!(
            d(&va, &vc)? <= d(&va, &vb)? + d(&vb, &vc)?,
            "case {case}: triangle inequality"
        );
        ensure!(
            d(&va, &vb)? == oracles::set_difference_size(&a.segments, &b.segments),
            "case {case}: hamming differs from set difference"
        );
    }
    for case in 0..200 {
        let target = random_inventory(&mut rng, "tgt".into());
        let n = rng.random_range(1..=8);
        let cands: Vec<PhonemeInventory> = (0..n).map(|i| random_inventory(&mut rng, format!("c{i}"))).collect();
        let mut all = vec![target.clone()];
        all.extend(cands.iter().cloned());
        let codes: Vec<&str> = cands.iter().map(|c| c.language_code.as_str()).collect();
        let ranking = rank_proxies("tgt", &codes, &all).map_err(|e| e.to_string())?;
        let got: Vec<(String, usize)> = ranking
            .entries
            .iter()
            .map(|e| (e.language_code.clone(), e.distance))
            .collect();
        let brute: Vec<(String, BTreeSet<String>)> = cands
            .iter()
            .map(|c| (c.language_code.clone(), c.segments.clone()))
            .collect();
        ensure!(
            got == oracles::brute_rank(&target.segments, &brute),
            "case {case}: ranking differs"
        );
    }
    let note = phoible_check()?;
    Ok(format!("1000 triples, 200 rankings; {note}"))
}

// ---------------------------------------------------------------- prompts

fn prompt_suite() -> Outcome {
    let read = |rel: &str| fs::read_to_string(Path::new(CORE_TESTS).join(rel)).map_err(|e| format!("{rel}: {e}"));
    ensure!(
        SYSTEM_PROMPT
            == "Please translate the following Wardaman sentence into English, using the provided lexicons. \
                Each lexicon entry is given in the form of word (character error rate), part of speech, and gloss.",
        "system prompt drifted"
    );
    let lex = parse_lexicon(&read("fixtures/lexicon.csv")?, LexiconFormat::Csv).map_err(|e| e.to_string())?;
    let exemplars: Vec<(String, String)> = read("fixtures/exemplars.tsv")?
        .lines()
        .filter_map(|l| l.split_once('\t').map(|(w, e)| (w.to_owned(), e.to_owned())))
        .collect();
    let transcripts = read("fixtures/transcripts.txt")?;
    let mut ratios = Vec::new();
    for (i, t) in transcripts.lines().enumerate() {
        let m = match_transcript(t, &lex, 3, 0.2).map_err(|e| e.to_string())?;
        let p = build_prompt(t, &m, &lex).map_err(|e| e.to_string())?;
        ensure!(p.system == SYSTEM_PROMPT, "fixture {i}: system prompt");
        let golden = read(&format!("golden/lexicon_prompt_{}.txt", i + 1))?;
        ensure!(
            p.user == golden,
            "fixture {i}: user prompt\n got {:?}\nwant {:?}",
            p.user,
            golden
        );
        let shots = build_fewshot_prompt(t, &exemplars, 3).map_err(|e| e.to_string())?;
        ensure!(
            p.token_estimate < shots.token_estimate,
            "fixture {i}: {} tokens with lexicon vs {} with 3 shots",
            p.token_estimate,
            shots.token_estimate
        );
        ratios.push(p.token_estimate as f64 / shots.token_estimate as f64);
    }
    ensure!(ratios.len() == 3, "expected 3 fixtures, found {}", ratios.len());
    let second = transcripts.lines().nth(1).unwrap_or_default();
    let fewshot = build_fewshot_prompt(second, &exemplars, 3).map_err(|e| e.to_string())?;
    ensure!(
        fewshot.user == read("golden/fewshot_3.txt")?,
        "3-shot prompt differs from golden"
    );
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok(format!(
        "3 goldens + 3-shot golden; lexicon prompt uses {:.0}% of 3-shot tokens",
        mean * 100.0
    ))
}

// ---------------------------------------------------------------- end to end

fn write_inputs(dir: &Path) -> Result<(), String> {
    let (samples, lexicon) = synthetic_samples(20, 20);
    let mut buf = Vec::new();
    write_jsonl(&samples, &mut buf).map_err(|e| e.to_string())?;
    fs::write(dir.join("manifest.jsonl"), buf).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    lexicon.write_jsonl(&mut buf).map_err(|e| e.to_string())?;
    fs::write(dir.join("lexicon.jsonl"), buf).map_err(|e| e.to_string())
}

fn run_grid(dir: &Path, out: &str, in_flight: usize) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_warden"))
        .arg("grid")
        .arg("--manifest")
        .arg(dir.join("manifest.jsonl"))
        .arg("--lexicon")
        .arg(dir.join("lexicon.jsonl"))
        .args([
            "--translator",
            "mock:gloss",
            "--taus",
            "0.1,0.2,0.3,0.4,0.5",
            "--ks",
            "1,2,3,4,5",
        ])
        .args(["--in-flight", &in_flight.to_string()])
        .arg("--out")
        .arg(dir.join(out))
        .env_remove("WARDEN_TRANSLATOR_URL")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        status.status.success(),
        "grid exited with {}: {}",
        status.status,
        String::from_utf8_lossy(&status.stderr)
    );
    Ok(())
}

fn end_to_end_suite() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    write_inputs(dir)?;
    run_grid(dir, "run_a", 4)?;
    run_grid(dir, "run_b", 4)?;
    run_grid(dir, "run_c", 1)?;
    for file in ["grid.txt", "grid.csv", "records.jsonl", "report.json"] {
        let a = fs::read(dir.join("run_a").join(file)).map_err(|e| format!("{file}: {e}"))?;
        for other in ["run_b", "run_c"] {
            let b = fs::read(dir.join(other).join(file)).map_err(|e| format!("{file}: {e}"))?;
            ensure!(a == b, "{file} differs between run_a and {other}");
        }
    }
    let csv = fs::read_to_string(dir.join("run_a/grid.csv")).map_err(|e| e.to_string())?;
    let cells: Vec<&str> = csv.lines().skip(1).collect();
    ensure!(cells.len() == 25, "{} grid cells", cells.len());
    ensure!(
        cells.iter().all(|l| l.split(',').nth(2) == Some("complete")),
        "incomplete cells:\n{csv}"
    );
    let table = fs::read_to_string(dir.join("run_a/grid.txt")).map_err(|e| e.to_string())?;
    let rows: Vec<&str> = table.lines().collect();
    ensure!(
        rows.len() == 7 && rows[1..6].iter().all(|r| r.split_whitespace().count() == 6),
        "table is not 5x5:\n{table}"
    );
    let records = fs::read_to_string(dir.join("run_a/records.jsonl")).map_err(|e| e.to_string())?;
    ensure!(
        records.lines().count() == 25 * 20,
        "{} records",
        records.lines().count()
    );
    Ok(format!(
        "5x5 complete, identical across 2 runs and in-flight 1/4\n{}",
        table.trim_end()
    ))
}

// ---------------------------------------------------------------- stats

struct FixtureRow {
    file: usize,
    duration_ms: u64,
    transcription_words: usize,
    translation_words: usize,
}

/// 37 samples over 4 files; every figure is a closed-form function of the index.
fn stats_fixture() -> Vec<FixtureRow> {
    (0..37)
        .map(|i| FixtureRow {
            file: i % 4,
            duration_ms: 2_000 + 250 * i as u64,
            transcription_words: 3 + i % 5,
            translation_words: 2 + (3 * i) % 7,
        })
        .collect()
}

fn stats_suite() -> Outcome {
    let rows = stats_fixture();
    let samples: Vec<Sample> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| Sample {
            id: format!("f{}#{i}", r.file),
            source_file: format!("f{}", r.file),
            utterance_ids: vec![format!("f{}:{i}", r.file)],
            span_start_ms: 10_000,
            span_end_ms: 10_000 + r.duration_ms,
            transcription: vec!["wa"; r.transcription_words].join(" "),
            translation: vec!["en"; r.translation_words].join("  "),
            oversize_flag: false,
        })
        .collect();
    let st = corpus_stats(&samples);
    let n = rows.len() as f64;
    // sum(2000 + 250 i) for i < 37 = 37 * 2000 + 250 * 666 = 240500 ms
    ensure!(
        close(st.audio_seconds.total, 240.5),
        "audio total {}",
        st.audio_seconds.total
    );
    ensure!(
        close(st.audio_seconds.average, 240.5 / n),
        "audio average {}",
        st.audio_seconds.average
    );
    ensure!(
        st.audio_seconds.min == 2.0 && st.audio_seconds.max == 11.0,
        "audio range"
    );
    // i % 5 over 0..37: seven full cycles (70) + 0 + 1 = 71, plus 3 * 37.
    ensure!(
        st.transcription_words.total == 182.0,
        "transcription total {}",
        st.transcription_words.total
    );
    ensure!(
        (st.transcription_words.min, st.transcription_words.max) == (3.0, 7.0),
        "transcription range"
    );
    // (3 i) % 7 cycles through 0..7 (sum 21) five times over i < 35, then 0 + 3, plus 2 * 37.
    ensure!(
        st.translation_words.total == 182.0,
        "translation total {}",
        st.translation_words.total
    );
    ensure!(
        (st.translation_words.min, st.translation_words.max) == (2.0, 8.0),
        "translation range"
    );
    ensure!(st.sample_count == 37 && st.file_count == 4, "counts");

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = tmp.path().join("manifest.jsonl");
    let mut buf = Vec::new();
    write_jsonl(&samples, &mut buf).map_err(|e| e.to_string())?;
    fs::write(&manifest, buf).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_warden"))
        .arg("stats")
        .arg("--manifest")
        .arg(&manifest)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "stats failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = String::from_utf8_lossy(&out.stdout).into_owned();
    let lines: Vec<&str> = table.lines().collect();
    ensure!(lines.len() >= 4, "short table:\n{table}");
    for header in ["category", "metric", "total", "avg.", "range"] {
        ensure!(lines[0].contains(header), "header lacks {header:?}:\n{table}");
    }
    for (line, (category, metric)) in lines[1..4].iter().zip([
        ("audio", "duration (s)"),
        ("transcription", "#words"),
        ("translation", "#words"),
    ]) {
        ensure!(line.starts_with(category) && line.contains(metric), "row {line:?}");
    }
    ensure!(
        lines[1].contains("240.50") && lines[2].contains("182"),
        "totals missing:\n{table}"
    );
    Ok("exact totals 240.5 s / 182 / 182; table rows match".into())
}

// ---------------------------------------------------------------- driver

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            name: "metrics oracle suite",
            budget: Duration::from_secs(10),
            run: metrics_suite,
        },
        Criterion {
            name: "matcher oracle suite",
            budget: Duration::from_secs(30),
            run: matcher_suite,
        },
        Criterion {
            name: "segmentation invariants",
            budget: Duration::from_secs(10),
            run: segmentation_suite,
        },
        Criterion {
            name: "phonology suite",
            budget: Duration::from_secs(20),
            run: phonology_suite,
        },
        Criterion {
            name: "prompt golden tests",
            budget: Duration::from_secs(10),
            run: prompt_suite,
        },
        Criterion {
            name: "end-to-end mock grid",
            budget: Duration::from_secs(60),
            run: end_to_end_suite,
        },
        Criterion {
            name: "stats reproduction",
            budget: Duration::from_secs(10),
            run: stats_suite,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let timing = format!("{:.2}s / {}s", elapsed.as_secs_f64(), c.budget.as_secs());
        let (ok, detail) = match result {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("over time budget; {d}")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        let mut lines = detail.lines();
        println!(
            "[{}] {} ({timing}): {}",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            lines.next().unwrap_or("")
        );
        for l in lines {
            println!("       {l}");
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
