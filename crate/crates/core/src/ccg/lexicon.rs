//! Lexical items and the lexicon multimap.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::lambda::{parse_term, Ontology, ParseError, TypeError};

use super::category::Category;
use super::syncat::SynCatParseError;

/// A word sequence paired with a category. Identity — for feature
/// indexing and θ lookup — is the triple (phrase, syntactic category,
/// canonicalized semantics); the constructor canonicalizes, so
/// alphabetic variants collapse to a single item.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexicalItem {
    pub phrase: Vec<String>,
    pub cat: Category,
}

impl LexicalItem {
    pub fn new(phrase: Vec<String>, cat: Category) -> Self {
        debug_assert!(!phrase.is_empty(), "lexical phrase must be nonempty");
        debug_assert!(
            phrase.iter().all(|w| !w.contains(char::is_whitespace) && !w.is_empty()),
            "phrase tokens must be nonempty and whitespace-free"
        );
        LexicalItem {
            phrase,
            cat: Category::canonical(cat.syn, &cat.sem),
        }
    }

    pub fn phrase_text(&self) -> String {
        self.phrase.join(" ")
    }
}

impl fmt::Display for LexicalItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} := {}", self.phrase_text(), self.cat)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: expected `<phrase> := <category> : <term>`")]
    MalformedLine { line: usize },
    #[error("line {line}: empty phrase")]
    EmptyPhrase { line: usize },
    #[error("line {line}: bad syntactic category: {source}")]
    BadSynCat { line: usize, source: SynCatParseError },
    #[error("line {line}: bad term: {source}")]
    BadTerm { line: usize, source: ParseError },
    #[error("line {line}: inconsistent category: {source}")]
    BadCategory { line: usize, source: TypeError },
}

/// Multimap from word sequences to categories. Immutable once built (by
/// convention); lookups are exact on token sequences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<Vec<String>, BTreeSet<Category>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_items(items: impl IntoIterator<Item = LexicalItem>) -> Self {
        let mut lex = Lexicon::new();
        for item in items {
            lex.insert(item);
        }
        lex
    }

    /// Inserts an item; duplicates (by identity) are collapsed.
    pub fn insert(&mut self, item: LexicalItem) {
        self.entries.entry(item.phrase).or_default().insert(item.cat);
    }

    pub fn contains(&self, item: &LexicalItem) -> bool {
        self.entries
            .get(&item.phrase)
            .map(|cats| cats.contains(&item.cat))
            .unwrap_or(false)
    }

    /// Exact-match lookup, sorted by canonical print for deterministic
    /// iteration.
    pub fn lookup(&self, tokens: &[String]) -> Vec<Category> {
        match self.entries.get(tokens) {
            Some(cats) => {
                let mut out: Vec<Category> = cats.iter().cloned().collect();
                out.sort_by_key(|c| c.to_string());
                out
            }
            None => Vec::new(),
        }
    }

    /// Number of (phrase, category) pairs.
    pub fn len(&self) -> usize {
        self.entries.values().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Longest phrase in the lexicon, in tokens.
    pub fn max_phrase_len(&self) -> usize {
        self.entries.keys().map(|p| p.len()).max().unwrap_or(0)
    }

    pub fn items(&self) -> impl Iterator<Item = LexicalItem> + '_ {
        self.entries.iter().flat_map(|(phrase, cats)| {
            cats.iter().map(move |cat| LexicalItem {
                phrase: phrase.clone(),
                cat: cat.clone(),
            })
        })
    }

    /// Union of two lexicons.
    pub fn merged(&self, other: &Lexicon) -> Lexicon {
        let mut out = self.clone();
        for item in other.items() {
            out.insert(item);
        }
        out
    }

    /// Parses the one-entry-per-line text format
    /// `<phrase> := <syncat> : <term>`; `#` comments and blank lines are
    /// skipped. Every entry is type-checked against the category mapping.
    pub fn parse(text: &str, ont: &Ontology) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            lex.insert(parse_entry(line, line_no, ont)?);
        }
        Ok(lex)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for item in self.items() {
            out.push_str(&item.to_string());
            out.push('\n');
        }
        out
    }
}

/// Parses one `<phrase> := <syncat> : <term>` entry.
pub fn parse_entry(
    line: &str,
    line_no: usize,
    ont: &Ontology,
) -> Result<LexicalItem, LexiconError> {
    let (phrase_text, rest) = line
        .split_once(":=")
        .ok_or(LexiconError::MalformedLine { line: line_no })?;
    let phrase: Vec<String> = phrase_text
        .split_whitespace()
        .map(|w| w.to_lowercase())
        .collect();
    if phrase.is_empty() {
        return Err(LexiconError::EmptyPhrase { line: line_no });
    }
    // The category grammar contains no `:`, so the first colon separates
    // the syntactic category from the term.
    let (syn_text, term_text) = rest
        .split_once(':')
        .ok_or(LexiconError::MalformedLine { line: line_no })?;
    let syn = syn_text
        .trim()
        .parse()
        .map_err(|source| LexiconError::BadSynCat { line: line_no, source })?;
    let sem = parse_term(term_text.trim(), ont)
        .map_err(|source| LexiconError::BadTerm { line: line_no, source })?;
    let cat = Category::new(syn, sem);
    cat.check_types()
        .map_err(|source| LexiconError::BadCategory { line: line_no, source })?;
    Ok(LexicalItem::new(phrase, cat))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geo() -> Ontology {
        Ontology::parse(
            "texas : e:state\nutah : e:state\nidaho : e:state\n\
             mississippi_river : e:river\nstate : <e,t>\nborders : <e,<e,t>>\n",
        )
        .unwrap()
    }

    const FIG2_LEXICON: &str = "\
# section 2.2 example lexicon
utah := NP : utah
idaho := NP : idaho
borders := (S\\NP)/NP : lambda x:e . lambda y:e . borders(y, x)
the mississippi := NP : mississippi_river
";

    #[test]
    fn parses_and_round_trips() {
        let ont = geo();
        let lex = Lexicon::parse(FIG2_LEXICON, &ont).unwrap();
        assert_eq!(lex.len(), 4);
        let text = lex.to_text();
        let reparsed = Lexicon::parse(&text, &ont).unwrap();
        assert_eq!(reparsed.to_text(), text);
    }

    #[test]
    fn single_word_lookup() {
        let ont = geo();
        let lex = Lexicon::parse(FIG2_LEXICON, &ont).unwrap();
        let cats = lex.lookup(&["utah".to_string()]);
        assert_eq!(cats.len(), 1);
        assert_eq!(cats[0].to_string(), "NP : utah");
    }

    #[test]
    fn multi_word_lookup() {
        let ont = geo();
        let lex = Lexicon::parse(FIG2_LEXICON, &ont).unwrap();
        let cats = lex.lookup(&["the".to_string(), "mississippi".to_string()]);
        assert_eq!(cats.len(), 1);
        assert_eq!(cats[0].to_string(), "NP : mississippi_river");
        assert_eq!(lex.max_phrase_len(), 2);
    }

    #[test]
    fn unknown_token_yields_empty_set() {
        let ont = geo();
        let lex = Lexicon::parse(FIG2_LEXICON, &ont).unwrap();
        assert!(lex.lookup(&["nevada".to_string()]).is_empty());
    }

    #[test]
    fn duplicate_entries_collapse() {
        let ont = geo();
        let text = "utah := NP : utah\nutah := NP : utah\n";
        let lex = Lexicon::parse(text, &ont).unwrap();
        assert_eq!(lex.len(), 1);
    }

    #[test]
    fn alpha_variant_entries_collapse() {
        let ont = geo();
        let text = "borders := (S\\NP)/NP : lambda x:e . lambda y:e . borders(y, x)\n\
                    borders := (S\\NP)/NP : lambda u:e . lambda w:e . borders(w, u)\n";
        let lex = Lexicon::parse(text, &ont).unwrap();
        assert_eq!(lex.len(), 1);
    }

    #[test]
    fn ill_typed_entry_is_rejected() {
        let ont = geo();
        let text = "utah := N : utah\n";
        assert!(matches!(
            Lexicon::parse(text, &ont).unwrap_err(),
            LexiconError::BadCategory { line: 1, .. }
        ));
    }
}
