//! Edit-distance based error rates and corpus BLEU-4.
//!
//! All scorers normalize reference and hypothesis identically before
//! comparison: lowercase, punctuation removed, whitespace collapsed
//! (see [`crate::text::normalize_for_scoring`]).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::normalize_for_scoring;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("reference is empty after normalization")]
    EmptyReference,
    #[error("{references} references but {hypotheses} hypotheses")]
    LengthMismatch { references: usize, hypotheses: usize },
    #[error("corpus is empty")]
    EmptyCorpus,
}

/// Edit operations aligning a reference to a hypothesis.
///
/// Insertions are hypothesis items with no reference counterpart, deletions
/// are reference items missing from the hypothesis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCounts {
    pub distance: usize,
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
    pub reference_len: usize,
}

impl EditCounts {
    pub fn merge(&mut self, other: &EditCounts) {
        self.distance += other.distance;
        self.substitutions += other.substitutions;
        self.insertions += other.insertions;
        self.deletions += other.deletions;
        self.reference_len += other.reference_len;
    }

    /// Edits per reference item; `None` when the reference was empty.
    pub fn rate(&self) -> Option<f64> {
        (self.reference_len > 0).then(|| self.distance as f64 / self.reference_len as f64)
    }
}

/// Unit-cost edit distance between `reference` and `hypothesis`, with an
/// S/I/D decomposition recovered from the DP table.
pub fn levenshtein<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> EditCounts {
    let n = reference.len();
    let m = hypothesis.len();
    let width = m + 1;
    let mut table = vec![0usize; (n + 1) * width];
    for (j, cell) in table[..width].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        table[i * width] = i;
        for j in 1..=m {
            let cost = usize::from(reference[i - 1] != hypothesis[j - 1]);
            let diag = table[(i - 1) * width + j - 1] + cost;
            let del = table[(i - 1) * width + j] + 1;
            let ins = table[i * width + j - 1] + 1;
            table[i * width + j] = diag.min(del).min(ins);
        }
    }

    let mut counts = EditCounts {
        distance: table[n * width + m],
        reference_len: n,
        ..Default::default()
    };
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = table[i * width + j];
        if i > 0 && j > 0 {
            let cost = usize::from(reference[i - 1] != hypothesis[j - 1]);
            if here == table[(i - 1) * width + j - 1] + cost {
                counts.substitutions += cost;
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && here == table[(i - 1) * width + j] + 1 {
            counts.deletions += 1;
            i -= 1;
        } else {
            counts.insertions += 1;
            j -= 1;
        }
    }
    debug_assert_eq!(
        counts.substitutions + counts.insertions + counts.deletions,
        counts.distance
    );
    counts
}

/// Distance only, two-row variant. Used on hot paths such as the matcher.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let cost = usize::from(x != y);
            cur[j + 1] = (prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn words(s: &str) -> Vec<String> {
    normalize_for_scoring(s)
        .split(' ')
        .filter(|w| !w.is_empty())
        .map(str::to_owned)
        .collect()
}

fn chars_without_spaces(s: &str) -> Vec<char> {
    normalize_for_scoring(s)
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect()
}

/// Word-level edit counts for one reference/hypothesis pair.
pub fn word_edits(reference: &str, hypothesis: &str) -> Result<EditCounts, MetricsError> {
    let r = words(reference);
    if r.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    Ok(levenshtein(&r, &words(hypothesis)))
}

/// Character-level edit counts, spaces removed.
pub fn char_edits(reference: &str, hypothesis: &str) -> Result<EditCounts, MetricsError> {
    let r = chars_without_spaces(reference);
    if r.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    Ok(levenshtein(&r, &chars_without_spaces(hypothesis)))
}

/// Word error rate. Not bounded above: insertions can push it past 1.
pub fn wer(reference: &str, hypothesis: &str) -> Result<f64, MetricsError> {
    let e = word_edits(reference, hypothesis)?;
    Ok(e.distance as f64 / e.reference_len as f64)
}

/// Character error rate for evaluation (spaces removed, reference-length
/// denominator). Distinct from the matcher's bounded similarity score.
pub fn cer_eval(reference: &str, hypothesis: &str) -> Result<f64, MetricsError> {
    let e = char_edits(reference, hypothesis)?;
    Ok(e.distance as f64 / e.reference_len as f64)
}

/// Sufficient statistics for corpus BLEU-4. Summing these over sentences in
/// any order gives the same corpus score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuStats {
    pub matches: [usize; 4],
    pub totals: [usize; 4],
    pub hypothesis_len: usize,
    pub reference_len: usize,
}

impl BleuStats {
    pub fn from_pair(reference: &str, hypothesis: &str) -> Self {
        let r = words(reference);
        let h = words(hypothesis);
        let mut stats = BleuStats {
            hypothesis_len: h.len(),
            reference_len: r.len(),
            ..Default::default()
        };
        for n in 1..=4 {
            let ref_counts = ngram_counts(&r, n);
            let hyp_counts = ngram_counts(&h, n);
            stats.totals[n - 1] = h.len().saturating_sub(n - 1);
            stats.matches[n - 1] = hyp_counts
                .iter()
                .map(|(gram, &c)| c.min(ref_counts.get(gram).copied().unwrap_or(0)))
                .sum();
        }
        stats
    }

    pub fn merge(&mut self, other: &BleuStats) {
        for n in 0..4 {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hypothesis_len += other.hypothesis_len;
        self.reference_len += other.reference_len;
    }

    /// BLEU-4 with uniform weights and brevity penalty. A zero precision at
    /// order 2..4 is replaced by `1 / (2 * hypothesis_len)`; a zero unigram
    /// precision yields 0.
    pub fn score(&self) -> f64 {
        let c = self.hypothesis_len;
        if c == 0 {
            return 0.0;
        }
        let floor = 1.0 / (2.0 * c as f64);
        let mut log_sum = 0.0;
        for n in 0..4 {
            let p = if self.totals[n] == 0 {
                0.0
            } else {
                self.matches[n] as f64 / self.totals[n] as f64
            };
            let p = if p == 0.0 {
                if n == 0 {
                    return 0.0;
                }
                floor
            } else {
                p
            };
            log_sum += p.ln();
        }
        let r = self.reference_len as f64;
        let bp = if (c as f64) < r {
            (1.0 - r / c as f64).exp()
        } else {
            1.0
        };
        bp * (log_sum / 4.0).exp()
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus-level BLEU-4 with a single reference per hypothesis.
pub fn bleu4(references: &[&str], hypotheses: &[&str]) -> Result<f64, MetricsError> {
    if references.len() != hypotheses.len() {
        return Err(MetricsError::LengthMismatch {
            references: references.len(),
            hypotheses: hypotheses.len(),
        });
    }
    if references.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let mut total = BleuStats::default();
    for (r, h) in references.iter().zip(hypotheses) {
        total.merge(&BleuStats::from_pair(r, h));
    }
    Ok(total.score())
}

/// Aggregate scores for a batch of reference/hypothesis pairs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub wer: f64,
    pub cer: f64,
    pub bleu4: f64,
    pub word_counts: EditCounts,
    pub char_counts: EditCounts,
    pub sentences: usize,
}

impl EvalReport {
    /// Scores pairs `(reference, hypothesis)`. Pairs whose reference is empty
    /// after normalization are rejected.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self, MetricsError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut report = EvalReport::default();
        let mut bleu = BleuStats::default();
        for (r, h) in pairs {
            report.word_counts.merge(&word_edits(r, h)?);
            report.char_counts.merge(&char_edits(r, h)?);
            bleu.merge(&BleuStats::from_pair(r, h));
            report.sentences += 1;
        }
        if report.sentences == 0 {
            return Err(MetricsError::EmptyCorpus);
        }
        report.wer = report.word_counts.rate().unwrap_or(0.0);
        report.cer = report.char_counts.rate().unwrap_or(0.0);
        report.bleu4 = bleu.score();
        Ok(report)
    }

    /// Aligned text table, four decimals.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<8} {:>8} {:>6} {:>6} {:>6} {:>8}\n",
            "metric", "score", "S", "I", "D", "ref"
        ));
        for (name, score, c) in [
            ("WER", self.wer, Some(&self.word_counts)),
            ("CER", self.cer, Some(&self.char_counts)),
            ("BLEU-4", self.bleu4, None),
        ] {
            match c {
                Some(c) => out.push_str(&format!(
                    "{:<8} {:>8.4} {:>6} {:>6} {:>6} {:>8}\n",
                    name, score, c.substitutions, c.insertions, c.deletions, c.reference_len
                )),
                None => out.push_str(&format!(
                    "{:<8} {:>8.4} {:>6} {:>6} {:>6} {:>8}\n",
                    name, score, "-", "-", "-", "-"
                )),
            }
        }
        out
    }
}
