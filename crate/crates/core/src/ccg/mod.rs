//! CCG categories, combinatory rules, and the lexicon.

mod category;
mod combinators;
mod lexicon;
mod syncat;

pub use category::{syn_matches, Category};
pub use combinators::{
    backward_apply, backward_compose, combine, forward_apply, forward_compose,
    type_raise, RuleId, RuleSet,
};
pub use lexicon::{parse_entry, LexicalItem, Lexicon, LexiconError};
pub use syncat::{Atom, SynCat, SynCatParseError};
