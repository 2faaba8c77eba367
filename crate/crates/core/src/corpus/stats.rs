use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Sample;
use crate::text::word_count;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryStats {
    pub total: f64,
    pub average: f64,
    pub min: f64,
    pub max: f64,
}

impl CategoryStats {
    fn from_values(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let total: f64 = values.iter().sum();
        Self {
            total,
            average: total / values.len() as f64,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Corpus summary: audio duration in seconds, word counts per side.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub audio_seconds: CategoryStats,
    pub transcription_words: CategoryStats,
    pub translation_words: CategoryStats,
    pub sample_count: usize,
    pub file_count: usize,
    /// Set when computed over no samples; all figures are then zero.
    pub empty: bool,
}

pub fn corpus_stats(samples: &[Sample]) -> CorpusStats {
    let audio: Vec<f64> = samples.iter().map(|s| s.duration_ms() as f64 / 1000.0).collect();
    let tr: Vec<f64> = samples.iter().map(|s| word_count(&s.transcription) as f64).collect();
    let tl: Vec<f64> = samples.iter().map(|s| word_count(&s.translation) as f64).collect();
    CorpusStats {
        audio_seconds: CategoryStats::from_values(&audio),
        transcription_words: CategoryStats::from_values(&tr),
        translation_words: CategoryStats::from_values(&tl),
        sample_count: samples.len(),
        file_count: samples
            .iter()
            .map(|s| s.source_file.as_str())
            .collect::<BTreeSet<_>>()
            .len(),
        empty: samples.is_empty(),
    }
}

impl CorpusStats {
    fn rows(&self) -> [(&'static str, &'static str, &CategoryStats, bool); 3] {
        [
            ("audio", "duration (s)", &self.audio_seconds, false),
            ("transcription", "#words", &self.transcription_words, true),
            ("translation", "#words", &self.translation_words, true),
        ]
    }

    /// Human-readable table with category, metric, total, average and range.
    pub fn render_table(&self) -> String {
        let mut out = format!(
            "{:<14} {:<13} {:>12} {:>8} {:>13}\n",
            "category", "metric", "total", "avg.", "range"
        );
        for (category, metric, s, integral) in self.rows() {
            let (total, range) = if integral {
                (format!("{:.0}", s.total), format!("{:.0}-{:.0}", s.min, s.max))
            } else {
                (format!("{:.2}", s.total), format!("{:.1}-{:.1}", s.min, s.max))
            };
            out.push_str(&format!(
                "{:<14} {:<13} {:>12} {:>8.2} {:>13}\n",
                category, metric, total, s.average, range
            ));
        }
        out.push_str(&format!("samples: {}  files: {}\n", self.sample_count, self.file_count));
        out
    }

    /// Machine-readable form of [`Self::render_table`].
    pub fn render_csv(&self) -> String {
        let mut out = String::from("category,metric,total,avg,min,max\n");
        for (category, metric, s, _) in self.rows() {
            out.push_str(&format!(
                "{category},{metric},{},{},{},{}\n",
                s.total, s.average, s.min, s.max
            ));
        }
        out
    }
}
