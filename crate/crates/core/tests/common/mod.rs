//! Shared helpers for the integration suites: fixture loading, a
//! deterministic RNG, random grammar generation, and independent
//! (chart-free) probability computations.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use pccg::ccg::{Category, LexicalItem, Lexicon};
use pccg::chart::Derivation;
use pccg::corpus::TrainingExample;
use pccg::lambda::{canonical_form, parse_term, Ontology, Term};
use pccg::model::ParamVector;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name))
        .unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn geo_ontology() -> Ontology {
    Ontology::parse(&read_fixture("geo_ontology.txt")).unwrap()
}

pub fn geo_seed(ont: &Ontology) -> Lexicon {
    Lexicon::parse(&read_fixture("geo_seed_lexicon.txt"), ont).unwrap()
}

pub fn geo_train(ont: &Ontology) -> Vec<TrainingExample> {
    pccg::corpus::parse_corpus(&read_fixture("geo_train.txt"), ont).unwrap()
}

pub fn geo_test(ont: &Ontology) -> Vec<TrainingExample> {
    pccg::corpus::parse_corpus(&read_fixture("geo_test.txt"), ont).unwrap()
}

pub fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(|w| w.to_string()).collect()
}

/// The three-entry lexicon of the worked bordering example.
pub fn fig2a_lexicon(ont: &Ontology) -> Lexicon {
    Lexicon::parse(
        "utah := NP : utah\n\
         idaho := NP : idaho\n\
         borders := (S\\NP)/NP : lambda x:e . lambda y:e . borders(y, x)\n",
        ont,
    )
    .unwrap()
}

/// The wh-question lexicon of the worked what-states example.
pub fn fig2b_lexicon(ont: &Ontology) -> Lexicon {
    Lexicon::parse(
        "what := (S/(S\\NP))/N : lambda f:<e,t> . lambda g:<e,t> . lambda x:e . and(f(x), g(x))\n\
         states := N : lambda x:e . state(x)\n\
         border := (S\\NP)/NP : lambda x:e . lambda y:e . borders(y, x)\n\
         texas := NP : texas\n",
        ont,
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Deterministic RNG (xorshift64*), no external crates needed.

pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform in [0, n).
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// Uniform in [-1, 1).
    pub fn weight(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }
}

// ---------------------------------------------------------------------------
// Random small grammars with genuine ambiguity.

pub struct RandomInstance {
    pub ontology: Ontology,
    pub lexicon: Lexicon,
    pub tokens: Vec<String>,
    pub params: ParamVector,
}

/// A small ambiguous grammar over 2–5 tokens. Words draw 1–3 categories
/// from a pool of entity NPs, nouns, intransitives, both transitive
/// argument orders, modifiers, and a wh-entry, so charts usually hold
/// several parses of several forms.
pub fn random_instance(rng: &mut Rng) -> RandomInstance {
    let ontology = Ontology::parse(
        "c1 : e\nc2 : e\nc3 : e\n\
         p1 : <e,t>\np2 : <e,t>\np3 : <e,t>\n\
         q1 : <e,<e,t>>\nq2 : <e,<e,t>>\n\
         m1 : <e,r>\n",
    )
    .unwrap();
    let pool: Vec<&str> = vec![
        "NP : c1",
        "NP : c2",
        "NP : c3",
        "N : lambda x:e . p1(x)",
        "N : lambda x:e . p2(x)",
        "S\\NP : lambda x:e . p1(x)",
        "S\\NP : lambda x:e . p3(x)",
        "(S\\NP)/NP : lambda x:e . lambda y:e . q1(y, x)",
        "(S\\NP)/NP : lambda x:e . lambda y:e . q1(x, y)",
        "(S\\NP)/NP : lambda x:e . lambda y:e . q2(y, x)",
        "N/N : lambda g:<e,t> . lambda x:e . and(p2(x), g(x))",
        "N/N : lambda g:<e,t> . lambda x:e . and(p3(x), g(x))",
        "NP/N : lambda g:<e,t> . argmax(g, lambda x:e . m1(x))",
        "S/NP : lambda x:e . m1(x)",
        "(S/(S\\NP))/N : lambda f:<e,t> . lambda g:<e,t> . lambda x:e . and(f(x), g(x))",
    ];

    let n_words = 2 + rng.below(4);
    let vocab: Vec<String> = (0..n_words).map(|i| format!("w{i}")).collect();
    let mut lexicon = Lexicon::new();
    for word in &vocab {
        let n_cats = 1 + rng.below(3);
        for _ in 0..n_cats {
            let entry = format!("{word} := {}", rng.pick(&pool));
            let lex = Lexicon::parse(&entry, &ontology).unwrap();
            for item in lex.items() {
                lexicon.insert(item);
            }
        }
    }
    // Occasionally a multi-word entry.
    if n_words >= 3 && rng.below(2) == 0 {
        let entry = format!("{} {} := {}", vocab[0], vocab[1], rng.pick(&pool));
        for item in Lexicon::parse(&entry, &ontology).unwrap().items() {
            lexicon.insert(item);
        }
    }

    let mut params = ParamVector::new();
    for item in lexicon.items() {
        params.set(item, rng.weight());
    }

    // The sentence repeats vocabulary words, 2..=5 tokens.
    let len = 2 + rng.below(4);
    let tokens: Vec<String> = (0..len).map(|_| rng.pick(&vocab).clone()).collect();

    RandomInstance { ontology, lexicon, tokens, params }
}

// ---------------------------------------------------------------------------
// Chart-independent probability computations over an enumerated
// derivation list (scores recomputed from leaves, not from the chart).

/// Dot-product score of a derivation under θ, from its leaves alone.
pub fn leaf_score(d: &Derivation, params: &ParamVector) -> f64 {
    d.leaves().iter().map(|(item, _)| params.weight(item)).sum()
}

pub fn logsumexp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// log P(L|S;θ) from an enumerated derivation list.
pub fn enum_log_prob_of_form(
    derivations: &[(Term, Derivation)],
    target: &Term,
    params: &ParamVector,
) -> f64 {
    let canonical = canonical_form(target);
    let class = logsumexp(
        derivations
            .iter()
            .filter(|(l, _)| *l == canonical)
            .map(|(_, d)| leaf_score(d, params)),
    );
    let z = logsumexp(derivations.iter().map(|(_, d)| leaf_score(d, params)));
    class - z
}

/// Enumeration-weighted expected feature counts, optionally restricted
/// to one logical-form class.
pub fn enum_expectations(
    derivations: &[(Term, Derivation)],
    target: Option<&Term>,
    params: &ParamVector,
) -> BTreeMap<LexicalItem, f64> {
    let canonical = target.map(canonical_form);
    let subset: Vec<&Derivation> = derivations
        .iter()
        .filter(|(l, _)| canonical.as_ref().map(|c| l == c).unwrap_or(true))
        .map(|(_, d)| d)
        .collect();
    let z = logsumexp(subset.iter().map(|d| leaf_score(d, params)));
    let mut out: BTreeMap<LexicalItem, f64> = BTreeMap::new();
    for d in subset {
        let p = (leaf_score(d, params) - z).exp();
        let mut counts: BTreeMap<&LexicalItem, f64> = BTreeMap::new();
        for (item, _) in d.leaves() {
            *counts.entry(item).or_insert(0.0) += 1.0;
        }
        for (item, c) in counts {
            *out.entry(item.clone()).or_insert(0.0) += p * c;
        }
    }
    out
}

/// Builds a category from text, for expected-value assertions.
pub fn cat(ont: &Ontology, syn: &str, sem: &str) -> Category {
    Category::new(syn.parse().unwrap(), parse_term(sem, ont).unwrap())
}

/// A lexical item from text parts.
pub fn lex_item(ont: &Ontology, phrase: &str, syn: &str, sem: &str) -> LexicalItem {
    LexicalItem::new(toks(phrase), cat(ont, syn, sem))
}
