//! Semantic parsing with probabilistic combinatory categorial grammars.
//!
//! The crate learns to map natural-language sentences to typed
//! lambda-calculus logical forms. Given training pairs of sentences and
//! logical forms plus a small seed lexicon, it generates candidate
//! lexical entries from the structure of each logical form, selects the
//! entries used by the best constrained parses, and fits a log-linear
//! model over derivations by stochastic gradient ascent. Parsing is
//! packed-chart CKY over CCG categories with application, first-order
//! composition, and optional NP type-raising.

pub mod ccg;
pub mod chart;
pub mod corpus;
pub mod eval;
pub mod genlex;
pub mod lambda;
pub mod learner;
mod math;
pub mod model;
