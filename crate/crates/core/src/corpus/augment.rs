use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{CorpusError, Sample, Utterance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairProvenance {
    GoldShort,
    GoldLong,
    PredictedShort,
    PredictedLong,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingPair {
    pub source: String,
    pub target: String,
    pub provenance: PairProvenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentOptions {
    pub include_short: bool,
    pub include_long: bool,
    pub include_predicted: bool,
}

impl Default for AugmentOptions {
    fn default() -> Self {
        Self {
            include_short: true,
            include_long: true,
            include_predicted: false,
        }
    }
}

/// Builds translation-training pairs from gold text and, optionally, ASR
/// output standing in for the source side.
///
/// Long pairs come from samples, short pairs from utterances. Predicted pairs
/// keep the gold target and take the source from `predictions`, keyed by
/// sample or utterance id; ids without a prediction are skipped with a
/// warning. Items without a translation yield no pair. Exact duplicates are
/// dropped, keeping the first occurrence.
pub fn build_training_pairs(
    samples: &[Sample],
    utterances: &[Utterance],
    predictions: Option<&BTreeMap<String, String>>,
    options: AugmentOptions,
) -> Result<Vec<TrainingPair>, CorpusError> {
    if !options.include_short && !options.include_long {
        return Err(CorpusError::NoSegmentationSelected);
    }
    let predictions = if options.include_predicted {
        match predictions {
            Some(p) if !p.is_empty() => Some(p),
            _ => return Err(CorpusError::MissingPredictions),
        }
    } else {
        None
    };

    let mut pairs = Vec::new();
    let mut emit = |id: &str, source: &str, target: Option<&str>, gold: PairProvenance, predicted: PairProvenance| {
        let target = match target.map(str::trim) {
            Some(t) if !t.is_empty() => t,
            _ => return,
        };
        if !source.trim().is_empty() {
            pairs.push(TrainingPair {
                source: source.trim().to_owned(),
                target: target.to_owned(),
                provenance: gold,
            });
        }
        if let Some(preds) = predictions {
            match preds.get(id).map(|p| p.trim()) {
                Some(p) if !p.is_empty() => pairs.push(TrainingPair {
                    source: p.to_owned(),
                    target: target.to_owned(),
                    provenance: predicted,
                }),
                _ => log::warn!("no prediction for {id}; skipping predicted pair"),
            }
        }
    };

    if options.include_long {
        for s in samples {
            emit(
                &s.id,
                &s.transcription,
                Some(&s.translation),
                PairProvenance::GoldLong,
                PairProvenance::PredictedLong,
            );
        }
    }
    if options.include_short {
        for u in utterances {
            emit(
                &u.id,
                &u.transcription,
                u.translation.as_deref(),
                PairProvenance::GoldShort,
                PairProvenance::PredictedShort,
            );
        }
    }

    let mut seen = HashSet::new();
    pairs.retain(|p| seen.insert((p.source.clone(), p.target.clone(), p.provenance)));
    Ok(pairs)
}
