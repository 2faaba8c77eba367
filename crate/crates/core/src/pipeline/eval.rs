use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::client::{ClientError, Transcriber, TranscriptionRequest, TranslationRequest, Translator};
use super::PipelineError;
use crate::corpus::Sample;
use crate::lexicon::Lexicon;
use crate::matcher::match_transcript;
use crate::metrics::{self, EvalReport};
use crate::prompting::{build_prompt, PromptBundle};
use crate::text::normalize_for_scoring;

pub const DEFAULT_IN_FLIGHT: usize = 4;

/// Applies `f` to every item with at most `in_flight` calls running at once.
/// Results come back in input order regardless of completion order.
pub fn run_bounded<T, R, F>(items: &[T], in_flight: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = in_flight.max(1).min(items.len());
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().expect("result slot") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().expect("result slot").expect("every item processed"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentenceScores {
    pub wer: f64,
    pub cer: f64,
    pub bleu4: f64,
}

/// Everything needed to audit or replay one sample of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// The transcript fed to the matcher, or the audio reference for ASR runs.
    pub input: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt: Option<PromptBundle>,
    pub reference: String,
    pub output: Option<String>,
    pub scores: Option<SentenceScores>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRun {
    /// Scores over the samples that succeeded.
    pub report: EvalReport,
    pub records: Vec<SampleRecord>,
    /// Some samples failed; `report` covers the rest.
    pub partial: bool,
    pub failed: usize,
    /// Samples left out because their reference text is empty.
    pub skipped: usize,
}

fn sentence_scores(reference: &str, output: &str) -> Option<SentenceScores> {
    Some(SentenceScores {
        wer: metrics::wer(reference, output).ok()?,
        cer: metrics::cer_eval(reference, output).ok()?,
        bleu4: metrics::bleu4(&[reference], &[output]).ok()?,
    })
}

fn finish(records: Vec<SampleRecord>, skipped: usize) -> Result<EvalRun, PipelineError> {
    let failed = records.iter().filter(|r| r.output.is_none()).count();
    if failed == records.len() {
        let reason = records
            .iter()
            .find_map(|r| r.error.clone())
            .unwrap_or_else(|| "no samples to evaluate".into());
        return Err(PipelineError::ClientUnavailable(reason));
    }
    let report = EvalReport::from_pairs(
        records
            .iter()
            .filter_map(|r| r.output.as_deref().map(|o| (r.reference.as_str(), o))),
    )?;
    Ok(EvalRun {
        report,
        partial: failed > 0,
        failed,
        skipped,
        records,
    })
}

fn with_reference(samples: &[Sample], reference: impl Fn(&Sample) -> &str) -> (Vec<&Sample>, usize) {
    let kept: Vec<&Sample> = samples
        .iter()
        .filter(|s| !normalize_for_scoring(reference(s)).is_empty())
        .collect();
    let skipped = samples.len() - kept.len();
    if skipped > 0 {
        log::warn!("{skipped} samples have no reference text and are skipped");
    }
    (kept, skipped)
}

fn outcome(
    result: Result<String, ClientError>,
    reference: &str,
) -> (Option<String>, Option<SentenceScores>, Option<String>) {
    match result {
        Ok(out) => {
            let scores = sentence_scores(reference, &out);
            (Some(out), scores, None)
        }
        Err(e) => (None, None, Some(e.to_string())),
    }
}

/// Lexicon-conditioned translation of every sample's transcription, scored
/// against its gold translation.
pub fn run_translation_eval(
    samples: &[Sample],
    lexicon: &Lexicon,
    tau: f64,
    k: usize,
    translator: &dyn Translator,
    in_flight: usize,
) -> Result<EvalRun, PipelineError> {
    let (kept, skipped) = with_reference(samples, |s| &s.translation);
    // Prompts are built up front so matcher errors surface before any request.
    let prepared = kept
        .iter()
        .map(|s| {
            let matches = match_transcript(&s.transcription, lexicon, k, tau)?;
            let bundle = build_prompt(&s.transcription, &matches, lexicon)?;
            let glosses: Vec<String> = matches
                .flattened
                .iter()
                .filter_map(|m| lexicon.get(&m.entry_id).map(|e| e.gloss.clone()))
                .collect();
            Ok((*s, bundle, glosses))
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;

    let records = run_bounded(&prepared, in_flight, |(sample, bundle, glosses)| {
        let result = translator.translate(&TranslationRequest {
            sample_id: &sample.id,
            bundle,
            glosses,
        });
        let (output, scores, error) = outcome(result, &sample.translation);
        SampleRecord {
            sample_id: sample.id.clone(),
            tau: Some(tau),
            k: Some(k),
            input: sample.transcription.clone(),
            prompt: Some(bundle.clone()),
            reference: sample.translation.clone(),
            output,
            scores,
            error,
        }
    });
    finish(records, skipped)
}

/// Transcribes every sample's audio span and scores against the gold
/// transcription.
pub fn run_transcription_eval(
    samples: &[Sample],
    transcriber: &dyn Transcriber,
    language_token: &str,
    in_flight: usize,
) -> Result<EvalRun, PipelineError> {
    let (kept, skipped) = with_reference(samples, |s| &s.transcription);
    let records = run_bounded(&kept, in_flight, |sample| {
        let audio_ref = sample.audio_ref();
        let result = transcriber.transcribe(&TranscriptionRequest {
            sample_id: &sample.id,
            audio_ref: &audio_ref,
            language_token,
        });
        let (output, scores, error) = outcome(result, &sample.transcription);
        SampleRecord {
            sample_id: sample.id.clone(),
            tau: None,
            k: None,
            input: audio_ref,
            prompt: None,
            reference: sample.transcription.clone(),
            output,
            scores,
            error,
        }
    });
    finish(records, skipped)
}
