use serde::{Deserialize, Serialize};

use super::client::Translator;
use super::eval::{run_translation_eval, SampleRecord};
use super::PipelineError;
use crate::corpus::Sample;
use crate::lexicon::Lexicon;
use crate::metrics::EvalReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Complete,
    Partial,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub tau: f64,
    pub k: usize,
    pub status: CellStatus,
    pub bleu4: Option<f64>,
    pub report: Option<EvalReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestCell {
    pub tau: f64,
    pub k: usize,
    pub bleu4: f64,
}

/// BLEU-4 over a (tau, k) grid. Cells are stored row-major: one row per tau.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub taus: Vec<f64>,
    pub ks: Vec<usize>,
    pub cells: Vec<GridCell>,
    pub best: Option<BestCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRun {
    pub result: GridResult,
    pub records: Vec<SampleRecord>,
}

impl GridResult {
    pub fn cell(&self, tau_index: usize, k_index: usize) -> &GridCell {
        &self.cells[tau_index * self.ks.len() + k_index]
    }

    /// Highest BLEU among complete cells; ties go to the smaller tau, then
    /// the smaller k.
    fn select_best(cells: &[GridCell]) -> Option<BestCell> {
        let mut ordered: Vec<&GridCell> = cells.iter().filter(|c| c.status == CellStatus::Complete).collect();
        ordered.sort_by(|a, b| a.tau.total_cmp(&b.tau).then(a.k.cmp(&b.k)));
        let mut best: Option<BestCell> = None;
        for c in ordered {
            let bleu = c.bleu4.expect("complete cell has a score");
            if best.is_none_or(|b| bleu > b.bleu4) {
                best = Some(BestCell {
                    tau: c.tau,
                    k: c.k,
                    bleu4: bleu,
                });
            }
        }
        best
    }

    pub fn is_partial(&self) -> bool {
        self.cells.iter().any(|c| c.status != CellStatus::Complete)
    }

    /// Rows are thresholds, columns top-k; BLEU-4 shown scaled by 100.
    /// Partial cells carry a `*`, failed cells read `failed`.
    pub fn render_table(&self) -> String {
        let mut out = format!("{:<6}", "CER");
        for k in &self.ks {
            out.push_str(&format!(" {:>8}", format!("Top-{k}")));
        }
        out.push('\n');
        for (ti, tau) in self.taus.iter().enumerate() {
            out.push_str(&format!("{:<6}", format!("{tau}")));
            for ki in 0..self.ks.len() {
                let c = self.cell(ti, ki);
                let text = match (c.status, c.bleu4) {
                    (CellStatus::Complete, Some(b)) => format!("{:.2}", b * 100.0),
                    (CellStatus::Partial, Some(b)) => format!("{:.2}*", b * 100.0),
                    _ => "failed".into(),
                };
                out.push_str(&format!(" {text:>8}"));
            }
            out.push('\n');
        }
        match &self.best {
            Some(b) => out.push_str(&format!("best: tau={} k={} bleu4={:.4}\n", b.tau, b.k, b.bleu4)),
            None => out.push_str("best: none\n"),
        }
        out
    }

    /// One line per cell: `tau,k,status,bleu4`.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("tau,k,status,bleu4\n");
        for c in &self.cells {
            let status = match c.status {
                CellStatus::Complete => "complete",
                CellStatus::Partial => "partial",
                CellStatus::Failed => "failed",
            };
            let bleu = c.bleu4.map(|b| b.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{status},{bleu}\n", c.tau, c.k));
        }
        out
    }
}

/// One translation evaluation per (tau, k) cell. A cell whose run fails
/// outright is marked failed rather than scored zero.
pub fn grid_search(
    samples: &[Sample],
    lexicon: &Lexicon,
    taus: &[f64],
    ks: &[usize],
    translator: &dyn Translator,
    in_flight: usize,
) -> Result<GridRun, PipelineError> {
    if taus.is_empty() || ks.is_empty() {
        return Err(PipelineError::EmptyGrid);
    }
    let mut cells = Vec::with_capacity(taus.len() * ks.len());
    let mut records = Vec::new();
    for &tau in taus {
        for &k in ks {
            match run_translation_eval(samples, lexicon, tau, k, translator, in_flight) {
                Ok(run) => {
                    cells.push(GridCell {
                        tau,
                        k,
                        status: if run.partial {
                            CellStatus::Partial
                        } else {
                            CellStatus::Complete
                        },
                        bleu4: Some(run.report.bleu4),
                        report: Some(run.report),
                        error: None,
                    });
                    records.extend(run.records);
                }
                Err(e @ (PipelineError::ClientUnavailable(_) | PipelineError::Metrics(_))) => cells.push(GridCell {
                    tau,
                    k,
                    status: CellStatus::Failed,
                    bleu4: None,
                    report: None,
                    error: Some(e.to_string()),
                }),
                Err(other) => return Err(other),
            }
        }
    }
    let best = GridResult::select_best(&cells);
    Ok(GridRun {
        result: GridResult {
            taus: taus.to_vec(),
            ks: ks.to_vec(),
            cells,
            best,
        },
        records,
    })
}
