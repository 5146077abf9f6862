//! Evaluation: precision and recall under exact logical-form equality.

use std::fmt::Write as _;

use crate::chart::build_chart;
use crate::corpus::TrainingExample;
use crate::lambda::{equivalent, Term, TypeError};
use crate::learner::TrainedModel;

/// Per-sentence outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub index: usize,
    pub predicted: Option<Term>,
    pub correct: bool,
}

/// Aggregate report. Precision = correct/parsed, recall = correct/total;
/// a model that parses nothing reports precision 0 with `no_parses` set
/// rather than a NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub total: usize,
    pub parsed: usize,
    pub correct: usize,
    pub no_parses: bool,
    pub verdicts: Vec<Verdict>,
}

impl EvalReport {
    pub fn precision(&self) -> f64 {
        if self.parsed == 0 {
            0.0
        } else {
            self.correct as f64 / self.parsed as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    /// Aligned human-readable table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<10} {:>8}", "total", self.total);
        let _ = writeln!(out, "{:<10} {:>8}", "parsed", self.parsed);
        let _ = writeln!(out, "{:<10} {:>8}", "correct", self.correct);
        let _ = writeln!(out, "{:<10} {:>8.4}", "precision", self.precision());
        let _ = writeln!(out, "{:<10} {:>8.4}", "recall", self.recall());
        if self.no_parses {
            let _ = writeln!(out, "flag       no-parses");
        }
        out
    }

    /// Machine-readable lines: `key value` pairs then one
    /// `sentence <i> <parsed|failed> <correct|wrong> <form?>` per input.
    pub fn render_machine(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "total {}", self.total);
        let _ = writeln!(out, "parsed {}", self.parsed);
        let _ = writeln!(out, "correct {}", self.correct);
        let _ = writeln!(out, "precision {}", self.precision());
        let _ = writeln!(out, "recall {}", self.recall());
        let _ = writeln!(out, "no_parses {}", self.no_parses);
        for v in &self.verdicts {
            match &v.predicted {
                Some(form) => {
                    let _ = writeln!(
                        out,
                        "sentence {} parsed {} {}",
                        v.index + 1,
                        if v.correct { "correct" } else { "wrong" },
                        form
                    );
                }
                None => {
                    let _ = writeln!(out, "sentence {} failed", v.index + 1);
                }
            }
        }
        out
    }
}

/// Decodes every sentence with the model and scores it against the gold
/// form. A sentence counts as parsed when the chart yields any logical
/// form, and correct when that form is equivalent to the gold one.
pub fn evaluate(
    model: &TrainedModel,
    examples: &[TrainingExample],
) -> Result<EvalReport, TypeError> {
    let mut report = EvalReport {
        total: examples.len(),
        parsed: 0,
        correct: 0,
        no_parses: false,
        verdicts: Vec::with_capacity(examples.len()),
    };
    for (index, ex) in examples.iter().enumerate() {
        let chart = build_chart(&ex.tokens, &model.lexicon, &model.params, &model.chart)?;
        let predicted = chart.best_logical_form().map(|(l, _)| l);
        let correct = predicted
            .as_ref()
            .map(|l| equivalent(l, &ex.logical_form))
            .unwrap_or(false);
        if predicted.is_some() {
            report.parsed += 1;
        }
        if correct {
            report.correct += 1;
        }
        report.verdicts.push(Verdict { index, predicted, correct });
    }
    report.no_parses = report.parsed == 0;
    Ok(report)
}
