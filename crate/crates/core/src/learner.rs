//! The overall learning loop: alternate lexical generation with
//! parameter estimation.
//!
//! Each outer iteration first parses every training pair constrained to
//! its labeled logical form under a sentence-specific candidate lexicon,
//! keeping only the lexical entries of the highest-scoring parses (a
//! drastic pruning of the candidate space), then re-estimates the
//! log-linear weights over the pruned lexicon by gradient ascent.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::ccg::{parse_entry, LexicalItem, Lexicon, LexiconError, RuleSet};
use crate::chart::{build_chart, ChartConfig};
use crate::corpus::TrainingExample;
use crate::genlex::{genlex, CandidateSet};
use crate::lambda::{Ontology, OntologyError, Term};
use crate::model::{estimate, EstimateOptions, ModelError, ParamVector, SgdSchedule};

/// Hyperparameters of the learning loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfig {
    /// Outer iterations (T).
    pub iterations: usize,
    /// Gradient-ascent schedule used by each estimation step.
    pub sched: SgdSchedule,
    /// Chart beam and rule set, shared by training and decoding.
    pub chart: ChartConfig,
    /// Longest candidate phrase, in tokens.
    pub max_phrase_len: usize,
    /// Initial weight for seed-lexicon items.
    pub seed_weight: f64,
    /// Initial weight for all other candidate items.
    pub candidate_weight: f64,
    /// Optional L2 strength passed through to estimation.
    pub l2: Option<f64>,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            iterations: 2,
            sched: SgdSchedule::default(),
            chart: ChartConfig::default(),
            max_phrase_len: 4,
            seed_weight: 0.1,
            candidate_weight: 0.01,
            l2: None,
        }
    }
}

/// Per-example numbers for one iteration of Step 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExampleStats {
    /// |GENLEX(S_i, L_i)|.
    pub candidates: usize,
    /// |λ_i|: entries kept from the tied-best constrained parses
    /// (0 when the example failed to parse).
    pub selected: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IterationReport {
    /// Indices of examples whose logical form could not be derived.
    pub failures: Vec<usize>,
    pub examples: Vec<ExampleStats>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrainingReport {
    pub iterations: Vec<IterationReport>,
}

impl TrainingReport {
    /// Deterministic plain-text rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (t, iter) in self.iterations.iter().enumerate() {
            let _ = writeln!(out, "iteration {}", t + 1);
            let _ = writeln!(out, "  parse failures: {}", iter.failures.len());
            for idx in &iter.failures {
                let _ = writeln!(out, "    failed example {}", idx + 1);
            }
            for (i, st) in iter.examples.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  example {}: genlex {} selected {}",
                    i + 1,
                    st.candidates,
                    st.selected
                );
            }
        }
        out
    }
}

/// The learned parser: pruned lexicon, weights, and the training trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    /// Λ_T: the pruned lexicon of the final iteration.
    pub lexicon: Lexicon,
    /// θ^T over every candidate ever initialized (Λ*).
    pub params: ParamVector,
    pub report: TrainingReport,
    pub chart: ChartConfig,
}

/// Outcome of one Step-1 pass.
#[derive(Debug, Clone)]
pub struct Step1Outcome {
    /// Λ_t = Λ₀ ∪ ⋃ λ_i.
    pub lexicon: Lexicon,
    /// λ_i per example; empty set marks a parse failure.
    pub selected: Vec<BTreeSet<LexicalItem>>,
}

/// θ⁰ over Λ* = Λ₀ ∪ ⋃ GENLEX(S_i, L_i): `seed_weight` for seed items,
/// `candidate_weight` for everything else.
pub fn init_params(
    seed: &Lexicon,
    candidates: &[CandidateSet],
    cfg: &LearnerConfig,
) -> ParamVector {
    let mut params = ParamVector::new();
    for item in seed.items() {
        params.set(item, cfg.seed_weight);
    }
    for set in candidates {
        for item in set.items() {
            if !params.contains(item) {
                params.set(item.clone(), cfg.candidate_weight);
            }
        }
    }
    params
}

/// Step 1 (lexical generation): parse each example with its
/// sentence-specific lexicon Λ₀ ∪ GENLEX(S_i, L_i), constrained to its
/// labeled form; keep the union of lexical entries over all tied-best
/// parses. Failures yield an empty λ_i and are recorded, not raised.
pub fn step1_lexical_generation(
    examples: &[TrainingExample],
    seed: &Lexicon,
    candidates: &[CandidateSet],
    params: &ParamVector,
    cfg: &LearnerConfig,
) -> Result<Step1Outcome, ModelError> {
    assert_eq!(examples.len(), candidates.len());
    let mut selected = Vec::with_capacity(examples.len());
    let mut lexicon = seed.clone();
    for (ex, cand) in examples.iter().zip(candidates) {
        let sentence_lex = seed.merged(&cand.to_lexicon());
        let chart = build_chart(&ex.tokens, &sentence_lex, params, &cfg.chart)?;
        let derivations = chart.constrained_best(&ex.logical_form);
        let mut lambda_i = BTreeSet::new();
        for d in &derivations {
            for (item, _) in d.leaves() {
                lambda_i.insert(item.clone());
            }
        }
        for item in &lambda_i {
            lexicon.insert(item.clone());
        }
        selected.push(lambda_i);
    }
    Ok(Step1Outcome { lexicon, selected })
}

/// Step 2 (parameter estimation): gradient ascent over the pruned
/// lexicon, starting from the previous parameters. Weights of items
/// outside the pruned lexicon are carried over unchanged.
pub fn step2_parameter_estimation(
    lexicon: &Lexicon,
    examples: &[TrainingExample],
    params: &ParamVector,
    cfg: &LearnerConfig,
) -> Result<ParamVector, ModelError> {
    let pairs: Vec<(Vec<String>, Term)> = examples
        .iter()
        .map(|ex| (ex.tokens.clone(), ex.logical_form.clone()))
        .collect();
    let opts = EstimateOptions { chart: cfg.chart, l2: cfg.l2 };
    let outcome = estimate(lexicon, &pairs, params, &cfg.sched, &opts)?;
    Ok(outcome.params)
}

/// The full loop: initialize θ over Λ*, then alternate Step 1 and
/// Step 2 for `iterations` rounds. Deterministic given its inputs;
/// a model that parses nothing is still returned, with the failures in
/// its report.
pub fn train(
    examples: &[TrainingExample],
    seed: &Lexicon,
    cfg: &LearnerConfig,
) -> Result<TrainedModel, ModelError> {
    let candidates: Vec<CandidateSet> = examples
        .iter()
        .map(|ex| genlex(&ex.tokens, &ex.logical_form, cfg.max_phrase_len))
        .collect();
    let mut params = init_params(seed, &candidates, cfg);
    let mut lexicon = seed.clone();
    let mut report = TrainingReport::default();

    for _t in 0..cfg.iterations {
        let step1 = step1_lexical_generation(examples, seed, &candidates, &params, cfg)?;
        lexicon = step1.lexicon;

        let mut iter_report = IterationReport::default();
        let mut parseable = Vec::new();
        for (i, lambda_i) in step1.selected.iter().enumerate() {
            iter_report.examples.push(ExampleStats {
                candidates: candidates[i].len(),
                selected: lambda_i.len(),
            });
            if lambda_i.is_empty() {
                iter_report.failures.push(i);
            } else {
                parseable.push(examples[i].clone());
            }
        }

        params = step2_parameter_estimation(&lexicon, &parseable, &params, cfg)?;
        report.iterations.push(iter_report);
    }

    Ok(TrainedModel { lexicon, params, report, chart: cfg.chart })
}

// ---------------------------------------------------------------------------
// Model files

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("line {line}: unexpected content outside any section")]
    OutsideSection { line: usize },
    #[error("line {line}: unknown section `{name}`")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: malformed `key = value` entry")]
    MalformedConfig { line: usize },
    #[error("line {line}: missing weight after entry")]
    MissingWeight { line: usize },
    #[error("line {line}: bad weight: {text}")]
    BadWeight { line: usize, text: String },
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

/// Serializes a model with its ontology: a `[config]` section, the
/// `[ontology]` declarations, and the `[lexicon]` entries as
/// `<entry> \t <weight>` lines. Weights print as shortest
/// round-tripping decimals, so reloads score bit-identically.
pub fn save_model(model: &TrainedModel, ont: &Ontology) -> String {
    let mut out = String::new();
    out.push_str("[config]\n");
    if model.chart.beam == usize::MAX {
        out.push_str("beam = unlimited\n");
    } else {
        let _ = writeln!(out, "beam = {}", model.chart.beam);
    }
    let _ = writeln!(out, "composition = {}", model.chart.rules.composition);
    let _ = writeln!(out, "type_raising = {}", model.chart.rules.type_raising);
    out.push_str("[ontology]\n");
    out.push_str(&ont.to_text());
    out.push_str("[lexicon]\n");
    for item in model.lexicon.items() {
        let _ = writeln!(out, "{}\t{}", item, model.params.weight(&item));
    }
    out
}

/// Parses a model file back into its parts. Only the pruned lexicon's
/// weights are stored, which is all that decoding needs.
pub fn load_model(text: &str) -> Result<(TrainedModel, Ontology), ModelFileError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Config,
        Ontology,
        Lexicon,
    }
    let mut section = Section::None;
    let mut chart = ChartConfig::default();
    let mut ont_text = String::new();
    let mut lexicon = Lexicon::new();
    let mut params = ParamVector::new();
    let mut lex_lines: Vec<(usize, String, f64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim_end();
        if line.trim().is_empty() {
            continue;
        }
        match line.trim() {
            "[config]" => {
                section = Section::Config;
                continue;
            }
            "[ontology]" => {
                section = Section::Ontology;
                continue;
            }
            "[lexicon]" => {
                section = Section::Lexicon;
                continue;
            }
            s if s.starts_with('[') => {
                return Err(ModelFileError::UnknownSection {
                    line: line_no,
                    name: s.to_string(),
                })
            }
            _ => {}
        }
        match section {
            Section::None => return Err(ModelFileError::OutsideSection { line: line_no }),
            Section::Config => {
                let (key, value) = line
                    .split_once('=')
                    .ok_or(ModelFileError::MalformedConfig { line: line_no })?;
                let (key, value) = (key.trim(), value.trim());
                match key {
                    "beam" => {
                        chart.beam = if value == "unlimited" {
                            usize::MAX
                        } else {
                            value.parse().map_err(|_| ModelFileError::MalformedConfig {
                                line: line_no,
                            })?
                        };
                    }
                    "composition" => {
                        chart.rules.composition = value == "true";
                    }
                    "type_raising" => {
                        chart.rules.type_raising = value == "true";
                    }
                    _ => return Err(ModelFileError::MalformedConfig { line: line_no }),
                }
            }
            Section::Ontology => {
                ont_text.push_str(line);
                ont_text.push('\n');
            }
            Section::Lexicon => {
                let (entry, weight_text) = line
                    .rsplit_once('\t')
                    .ok_or(ModelFileError::MissingWeight { line: line_no })?;
                let weight: f64 = weight_text.trim().parse().map_err(|_| {
                    ModelFileError::BadWeight {
                        line: line_no,
                        text: weight_text.trim().to_string(),
                    }
                })?;
                lex_lines.push((line_no, entry.to_string(), weight));
            }
        }
    }

    let ont = Ontology::parse(&ont_text)?;
    for (line_no, entry, weight) in lex_lines {
        let item = parse_entry(&entry, line_no, &ont)?;
        params.set(item.clone(), weight);
        lexicon.insert(item);
    }
    let _ = RuleSet::default();
    Ok((
        TrainedModel {
            lexicon,
            params,
            report: TrainingReport::default(),
            chart,
        },
        ont,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_term;

    fn geo() -> Ontology {
        Ontology::parse(
            "utah : e\nidaho : e\nmontana : e\nstate : <e,t>\nborders : <e,<e,t>>\n",
        )
        .unwrap()
    }

    fn seed(ont: &Ontology) -> Lexicon {
        Lexicon::parse(
            "utah := NP : utah\nidaho := NP : idaho\nmontana := NP : montana\n",
            ont,
        )
        .unwrap()
    }

    fn example(ont: &Ontology, s: &str, l: &str) -> TrainingExample {
        TrainingExample {
            tokens: s.split_whitespace().map(|w| w.to_string()).collect(),
            logical_form: parse_term(l, ont).unwrap(),
        }
    }

    #[test]
    fn empty_training_set_returns_seed_model() {
        let ont = geo();
        let seed = seed(&ont);
        let model = train(&[], &seed, &LearnerConfig::default()).unwrap();
        assert_eq!(model.lexicon, seed);
        assert_eq!(model.params.len(), seed.len());
        for item in seed.items() {
            assert_eq!(model.params.weight(&item), 0.1);
        }
    }

    #[test]
    fn init_covers_the_candidate_union_with_seed_bias() {
        let ont = geo();
        let seed = seed(&ont);
        let cfg = LearnerConfig::default();
        let ex = example(&ont, "utah borders idaho", "borders(utah, idaho)");
        let cands = vec![genlex(&ex.tokens, &ex.logical_form, cfg.max_phrase_len)];
        let params = init_params(&seed, &cands, &cfg);
        // Every candidate plus seed entries not generated by genlex.
        let mut expected: BTreeSet<LexicalItem> = cands[0].items().cloned().collect();
        expected.extend(seed.items());
        assert_eq!(params.len(), expected.len());
        for item in seed.items() {
            assert_eq!(params.weight(&item), 0.1);
        }
        // A non-seed candidate gets the small default.
        let spurious = cands[0]
            .items()
            .find(|it| !seed.contains(it))
            .expect("candidates beyond the seed");
        assert_eq!(params.weight(spurious), 0.01);
    }

    #[test]
    fn step1_selects_the_correct_entries_for_a_simple_pair() {
        let ont = geo();
        let seed = seed(&ont);
        let cfg = LearnerConfig::default();
        let ex = example(&ont, "utah borders idaho", "borders(utah, idaho)");
        let cands = vec![genlex(&ex.tokens, &ex.logical_form, cfg.max_phrase_len)];
        let params = init_params(&seed, &cands, &cfg);
        let out =
            step1_lexical_generation(&[ex], &seed, &cands, &params, &cfg).unwrap();
        let lambda = &out.selected[0];
        assert!(!lambda.is_empty());
        let texts: Vec<String> = lambda.iter().map(|i| i.to_string()).collect();
        assert!(texts
            .iter()
            .any(|t| t.contains("borders := (S\\NP)/NP")), "{texts:?}");
        // The selected set is far smaller than the candidate pool.
        assert!(lambda.len() <= 4, "{texts:?}");
    }

    #[test]
    fn unreachable_form_is_recorded_not_fatal() {
        let ont = geo();
        let seed = seed(&ont);
        let cfg = LearnerConfig::default();
        // A one-token sentence cannot combine anything, so a two-place
        // literal is underivable no matter what genlex pairs with it.
        let ex = example(&ont, "utah", "borders(utah, montana)");
        let model = train(&[ex], &seed, &cfg).unwrap();
        assert_eq!(model.report.iterations.len(), 2);
        assert_eq!(model.report.iterations[0].failures, vec![0]);
        assert_eq!(model.report.iterations[0].examples[0].selected, 0);
    }

    #[test]
    fn training_is_deterministic() {
        let ont = geo();
        let seed = seed(&ont);
        let cfg = LearnerConfig::default();
        let examples = vec![
            example(&ont, "utah borders idaho", "borders(utah, idaho)"),
            example(&ont, "montana borders idaho", "borders(montana, idaho)"),
        ];
        let a = train(&examples, &seed, &cfg).unwrap();
        let b = train(&examples, &seed, &cfg).unwrap();
        assert_eq!(save_model(&a, &ont), save_model(&b, &ont));
        assert_eq!(a.report, b.report);
    }

    #[test]
    fn model_file_round_trips() {
        let ont = geo();
        let seed = seed(&ont);
        let cfg = LearnerConfig::default();
        let examples = vec![example(&ont, "utah borders idaho", "borders(utah, idaho)")];
        let model = train(&examples, &seed, &cfg).unwrap();
        let text = save_model(&model, &ont);
        let (loaded, loaded_ont) = load_model(&text).unwrap();
        assert_eq!(loaded_ont, ont);
        assert_eq!(loaded.lexicon, model.lexicon);
        assert_eq!(loaded.chart, model.chart);
        for item in model.lexicon.items() {
            assert_eq!(loaded.params.weight(&item), model.params.weight(&item));
        }
        // Save of the load is byte-identical.
        assert_eq!(save_model(&loaded, &loaded_ont), text);
    }
}
