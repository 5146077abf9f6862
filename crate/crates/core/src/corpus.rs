//! Training/test corpora: sentences paired with logical forms.
//!
//! File format: records separated by blank lines. Each record is two
//! lines — the sentence, then its logical form. Lines starting with `#`
//! are comments.

use std::path::Path;

use thiserror::Error;

use crate::lambda::{parse_term, type_of, Ontology, ParseError, Term, TypeError};

/// One (S, L) pair: a tokenized sentence and a closed, well-typed
/// logical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingExample {
    pub tokens: Vec<String>,
    pub logical_form: Term,
}

impl TrainingExample {
    pub fn sentence(&self) -> String {
        self.tokens.join(" ")
    }
}

/// An ordered list of examples with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub examples: Vec<TrainingExample>,
    pub source: String,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("record {record} (line {line}): missing logical form")]
    MissingForm { record: usize, line: usize },
    #[error("record {record} (line {line}): extra line in record")]
    ExtraLine { record: usize, line: usize },
    #[error("record {record} (line {line}): empty sentence")]
    EmptySentence { record: usize, line: usize },
    #[error("record {record} (line {line}): {source}")]
    BadForm {
        record: usize,
        line: usize,
        source: ParseError,
    },
    #[error("record {record} (line {line}): ill-typed logical form: {source}")]
    IllTyped {
        record: usize,
        line: usize,
        source: TypeError,
    },
    #[error("record {record} (line {line}): logical form has free variables")]
    OpenForm { record: usize, line: usize },
}

/// Parses corpus text. Sentences tokenize by whitespace and lowercase;
/// every logical form must parse, type-check, and be closed.
pub fn parse_corpus(text: &str, ont: &Ontology) -> Result<Vec<TrainingExample>, CorpusError> {
    let mut examples = Vec::new();
    let mut record: Vec<(usize, &str)> = Vec::new();
    let mut record_no = 0;

    let mut lines: Vec<(usize, &str)> = text.lines().enumerate().collect();
    // Sentinel blank line flushes the final record.
    lines.push((text.lines().count(), ""));

    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !record.is_empty() {
                record_no += 1;
                examples.push(finish_record(&record, record_no, ont)?);
                record.clear();
            }
            continue;
        }
        record.push((line_no, line));
    }
    Ok(examples)
}

fn finish_record(
    record: &[(usize, &str)],
    record_no: usize,
    ont: &Ontology,
) -> Result<TrainingExample, CorpusError> {
    match record {
        [(line, _)] => Err(CorpusError::MissingForm { record: record_no, line: *line }),
        [(sline, sentence), (fline, form)] => {
            let tokens: Vec<String> = sentence
                .split_whitespace()
                .map(|w| w.to_lowercase())
                .collect();
            if tokens.is_empty() {
                return Err(CorpusError::EmptySentence {
                    record: record_no,
                    line: *sline,
                });
            }
            let logical_form = parse_term(form, ont).map_err(|source| {
                CorpusError::BadForm { record: record_no, line: *fline, source }
            })?;
            if !logical_form.is_closed() {
                return Err(CorpusError::OpenForm { record: record_no, line: *fline });
            }
            type_of(&logical_form).map_err(|source| CorpusError::IllTyped {
                record: record_no,
                line: *fline,
                source,
            })?;
            Ok(TrainingExample { tokens, logical_form })
        }
        [_, _, (line, _), ..] => {
            Err(CorpusError::ExtraLine { record: record_no, line: *line })
        }
        [] => unreachable!("empty records are not flushed"),
    }
}

/// Reads and parses a corpus file.
pub fn load_corpus(path: impl AsRef<Path>, ont: &Ontology) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(Corpus {
        examples: parse_corpus(&text, ont)?,
        source: path.display().to_string(),
    })
}
