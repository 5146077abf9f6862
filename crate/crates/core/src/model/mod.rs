//! The log-linear model over derivations: lexical features, parameter
//! vectors, scores and probabilities, feature expectations, and
//! stochastic gradient ascent.

mod expectations;
mod sgd;

pub use expectations::{expected_features_clamped, expected_features_free, gradient};
pub use sgd::{estimate, EstimateOptions, EstimateOutcome, SgdSchedule};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ccg::LexicalItem;
use crate::chart::{Chart, Derivation};
use crate::math::logsumexp;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("sentence has no complete parse; the distribution is undefined")]
    EmptyChart,
    #[error("target logical form is not derivable from this chart")]
    UnderivableTarget,
    #[error("ill-formed lexicon: {0}")]
    IllFormedLexicon(#[from] crate::lambda::TypeError),
}

/// Sparse feature counts: how many times each lexical entry is used in a
/// derivation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureVector {
    counts: BTreeMap<LexicalItem, u32>,
}

impl FeatureVector {
    pub fn from_derivation(d: &Derivation) -> Self {
        let mut counts = BTreeMap::new();
        for (item, _) in d.leaves() {
            *counts.entry(item.clone()).or_insert(0) += 1;
        }
        FeatureVector { counts }
    }

    pub fn count(&self, item: &LexicalItem) -> u32 {
        self.counts.get(item).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LexicalItem, u32)> {
        self.counts.iter().map(|(k, v)| (k, *v))
    }
}

/// θ: one real weight per lexical-item identity; unseen identities weigh 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamVector {
    weights: BTreeMap<LexicalItem, f64>,
}

impl ParamVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn weight(&self, item: &LexicalItem) -> f64 {
        self.weights.get(item).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, item: LexicalItem, w: f64) {
        debug_assert!(w.is_finite());
        self.weights.insert(item, w);
    }

    pub fn add(&mut self, item: &LexicalItem, delta: f64) {
        let entry = self.weights.entry(item.clone()).or_insert(0.0);
        *entry += delta;
        debug_assert!(entry.is_finite());
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LexicalItem, f64)> {
        self.weights.iter().map(|(k, v)| (k, *v))
    }

    pub fn contains(&self, item: &LexicalItem) -> bool {
        self.weights.contains_key(item)
    }

    /// Serializes as `<phrase> := <syncat> : <term> \t <weight>` lines.
    /// `f64` Display prints the shortest round-tripping decimal, so a
    /// reload reproduces bit-identical scores.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (item, w) in self.iter() {
            out.push_str(&item.to_string());
            out.push('\t');
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }
}

/// The unnormalized log score f̄(L,T,S)·θ̄ of a derivation: the sum of
/// the weights of its lexical entries, counted with multiplicity.
pub fn score(d: &Derivation, params: &ParamVector) -> f64 {
    d.leaves().iter().map(|(item, _)| params.weight(item)).sum()
}

/// log P(L,T|S;θ) = score − log Z, where Z sums over every complete
/// parse in the chart.
pub fn log_prob(d: &Derivation, chart: &Chart, params: &ParamVector) -> Result<f64, ModelError> {
    let z = chart.log_partition().ok_or(ModelError::EmptyChart)?;
    Ok(score(d, params) - z)
}

/// log P(L|S;θ) for a specific logical form: the root mass of the
/// equivalence class of `target` minus log Z.
pub fn log_prob_of_form(
    chart: &Chart,
    target: &crate::lambda::Term,
) -> Result<f64, ModelError> {
    let z = chart.log_partition().ok_or(ModelError::EmptyChart)?;
    let canonical = crate::lambda::canonical_form(target);
    let mass = logsumexp(
        chart
            .complete_roots()
            .into_iter()
            .filter(|r| chart.item(*r).cat.sem == canonical)
            .map(|r| chart.item(r).inside_log),
    );
    if mass == f64::NEG_INFINITY {
        return Err(ModelError::UnderivableTarget);
    }
    Ok(mass - z)
}
