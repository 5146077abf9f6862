//! Candidate lexical-item generation: the cross product of the word
//! spans of a sentence with the categories triggered by the
//! sub-structure of its logical form.

use std::collections::{BTreeMap, BTreeSet};

use crate::ccg::{Category, LexicalItem, Lexicon, SynCat};
use crate::lambda::{SemType, Term, Var};

/// Trigger-rule identifiers, numbered by their table row:
///
///  1. constant c                        → `NP : c`
///  2. arity-one predicate p             → `N : λx.p(x)`
///  3. arity-one predicate p             → `S\NP : λx.p(x)`
///  4. arity-two predicate p             → `(S\NP)/NP : λx.λy.p(y,x)`
///  5. arity-two predicate p             → `(S\NP)/NP : λx.λy.p(x,y)`
///  6. arity-one predicate p             → `N/N : λg.λx.p(x) ∧ g(x)`
///  7. literal p(·,c), c a constant      → `N/N : λg.λx.p(x,c) ∧ g(x)`
///  8. arity-two predicate p             → `(N\N)/NP : λx.λg.λy.p(x,y) ∧ g(x)`
///  9. argmax/argmin with measure λx.f(x) → `NP/N : λg.argmax/min(g, λx.f(x))`
/// 10. arity-one real-valued function f  → `S/NP : λx.f(x)`
pub type RuleNumber = u8;

/// Candidate lexical items for one (sentence, logical form) pair, with
/// the rule and matched subterm that produced each category.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateSet {
    items: BTreeSet<LexicalItem>,
    provenance: BTreeMap<Category, BTreeSet<(RuleNumber, Term)>>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> impl Iterator<Item = &LexicalItem> {
        self.items.iter()
    }

    pub fn contains(&self, item: &LexicalItem) -> bool {
        self.items.contains(item)
    }

    pub fn provenance(&self, cat: &Category) -> Option<&BTreeSet<(RuleNumber, Term)>> {
        self.provenance.get(cat)
    }

    pub fn to_lexicon(&self) -> Lexicon {
        Lexicon::from_items(self.items.iter().cloned())
    }

    /// Every (item, rule, matched subterm) row, for inspection dumps.
    pub fn rows(&self) -> impl Iterator<Item = (&LexicalItem, RuleNumber, &Term)> {
        self.items.iter().flat_map(move |item| {
            self.provenance
                .get(&item.cat)
                .into_iter()
                .flatten()
                .map(move |(rule, sub)| (item, *rule, sub))
        })
    }
}

/// All contiguous token subsequences of length 1..=max_len.
pub fn word_spans(tokens: &[String], max_len: usize) -> BTreeSet<Vec<String>> {
    assert!(!tokens.is_empty(), "word_spans of an empty sentence");
    assert!(max_len >= 1);
    let n = tokens.len();
    let mut out = BTreeSet::new();
    for len in 1..=max_len.min(n) {
        for start in 0..=(n - len) {
            out.insert(tokens[start..start + len].to_vec());
        }
    }
    out
}

/// The categories triggered by every matching subterm of `l`, with
/// provenance. Every returned category satisfies the category type
/// mapping.
pub fn categories(l: &Term) -> BTreeMap<Category, BTreeSet<(RuleNumber, Term)>> {
    let mut out: BTreeMap<Category, BTreeSet<(RuleNumber, Term)>> = BTreeMap::new();
    let mut add = |rule: RuleNumber, cat: Category, matched: &Term| {
        debug_assert!(
            cat.check_types().is_ok(),
            "rule {rule} emitted an inconsistent category {cat}"
        );
        out.entry(cat).or_default().insert((rule, matched.clone()));
    };

    l.visit(&mut |sub| {
        match sub {
            Term::Const(name, ty) => {
                trigger_constant(name, ty, sub, &mut add);
            }
            // Rule 7: a literal with an arity-two predicate and a
            // constant second argument, anywhere in the form.
            Term::Apply(inner, second) => {
                if let (Term::Apply(head, _), Term::Const(_, cty)) =
                    (inner.as_ref(), second.as_ref())
                {
                    if let Term::Const(pname, pty) = head.as_ref() {
                        if pred2_check(pty) && cty.is_entity() {
                            add(
                                7,
                                modifier_with_constant(
                                    pname,
                                    pty,
                                    second.as_ref().clone(),
                                ),
                                sub,
                            );
                        }
                    }
                }
            }
            // Rule 9: argmax/argmin whose measure is a single
            // real-valued function of the set variable.
            Term::Argmax(_, measure) => {
                if let Some((fname, fty)) = measure_function(measure) {
                    add(9, superlative(&fname, &fty, true), sub);
                }
            }
            Term::Argmin(_, measure) => {
                if let Some((fname, fty)) = measure_function(measure) {
                    add(9, superlative(&fname, &fty, false), sub);
                }
            }
            _ => {}
        }
    });
    out
}

fn trigger_constant(
    name: &str,
    ty: &SemType,
    matched: &Term,
    add: &mut impl FnMut(RuleNumber, Category, &Term),
) {
    if ty.is_entity() {
        // Rule 1.
        add(
            1,
            Category::canonical(SynCat::NP, &Term::constant(name, ty.clone())),
            matched,
        );
        return;
    }
    if pred1_check(ty) {
        let x = Var::new(0, SemType::entity());
        let p_of = |v: &Var| {
            Term::apply(Term::constant(name, ty.clone()), Term::Var(v.clone()))
        };
        // Rule 2: noun.
        add(
            2,
            Category::canonical(SynCat::N, &Term::lambda(x.clone(), p_of(&x))),
            matched,
        );
        // Rule 3: intransitive verb.
        add(
            3,
            Category::canonical(
                SynCat::backward(SynCat::S, SynCat::NP),
                &Term::lambda(x.clone(), p_of(&x)),
            ),
            matched,
        );
        // Rule 6: adjective-style modifier.
        let g = Var::new(1, SemType::pred1());
        add(
            6,
            Category::canonical(
                SynCat::forward(SynCat::N, SynCat::N),
                &Term::lambda(
                    g.clone(),
                    Term::lambda(
                        x.clone(),
                        Term::And(vec![
                            p_of(&x),
                            Term::apply(Term::Var(g.clone()), Term::Var(x.clone())),
                        ]),
                    ),
                ),
            ),
            matched,
        );
    }
    if pred2_check(ty) {
        let c = Term::constant(name, ty.clone());
        let x = Var::new(0, SemType::entity());
        let y = Var::new(1, SemType::entity());
        let app2 = |a: &Var, b: &Var| {
            Term::apply_all(c.clone(), [Term::Var(a.clone()), Term::Var(b.clone())])
        };
        let transitive = SynCat::forward(
            SynCat::backward(SynCat::S, SynCat::NP),
            SynCat::NP,
        );
        // Rule 4: transitive verb, object bound first.
        add(
            4,
            Category::canonical(
                transitive.clone(),
                &Term::lambda(x.clone(), Term::lambda(y.clone(), app2(&y, &x))),
            ),
            matched,
        );
        // Rule 5: transitive verb, subject bound first.
        add(
            5,
            Category::canonical(
                transitive,
                &Term::lambda(x.clone(), Term::lambda(y.clone(), app2(&x, &y))),
            ),
            matched,
        );
        // Rule 8: relative-clause style modifier.
        let g = Var::new(2, SemType::pred1());
        add(
            8,
            Category::canonical(
                SynCat::forward(SynCat::backward(SynCat::N, SynCat::N), SynCat::NP),
                &Term::lambda(
                    x.clone(),
                    Term::lambda(
                        g.clone(),
                        Term::lambda(
                            y.clone(),
                            Term::And(vec![
                                app2(&x, &y),
                                Term::apply(Term::Var(g.clone()), Term::Var(x.clone())),
                            ]),
                        ),
                    ),
                ),
            ),
            matched,
        );
    }
    if real_function_check(ty) {
        // Rule 10: numeric wh-fragment.
        let x = Var::new(0, SemType::entity());
        add(
            10,
            Category::canonical(
                SynCat::forward(SynCat::S, SynCat::NP),
                &Term::lambda(
                    x.clone(),
                    Term::apply(Term::constant(name, ty.clone()), Term::Var(x)),
                ),
            ),
            matched,
        );
    }
}

/// `<e,t>`-shaped (entity tags allowed).
fn pred1_check(ty: &SemType) -> bool {
    matches!(ty, SemType::Func(a, r) if a.is_entity() && **r == SemType::Truth)
}

/// `<e,<e,t>>`-shaped.
fn pred2_check(ty: &SemType) -> bool {
    match ty {
        SemType::Func(a1, rest) if a1.is_entity() => match rest.as_ref() {
            SemType::Func(a2, r) => a2.is_entity() && **r == SemType::Truth,
            _ => false,
        },
        _ => false,
    }
}

/// `<e,r>`-shaped.
fn real_function_check(ty: &SemType) -> bool {
    matches!(ty, SemType::Func(a, r) if a.is_entity() && **r == SemType::Real)
}

/// Matches a measure of the shape `λx.f(x)` (or bare `f`) for a
/// real-valued constant f.
fn measure_function(measure: &Term) -> Option<(String, SemType)> {
    match measure {
        Term::Lambda(v, body) => match body.as_ref() {
            Term::Apply(head, arg) => match (head.as_ref(), arg.as_ref()) {
                (Term::Const(name, ty), Term::Var(u))
                    if u.id == v.id && real_function_check(ty) =>
                {
                    Some((name.clone(), ty.clone()))
                }
                _ => None,
            },
            _ => None,
        },
        Term::Const(name, ty) if real_function_check(ty) => {
            Some((name.clone(), ty.clone()))
        }
        _ => None,
    }
}

/// Rule 7's category: `N/N : λg.λx.p(x,c) ∧ g(x)`.
fn modifier_with_constant(pname: &str, pty: &SemType, constant: Term) -> Category {
    let g = Var::new(0, SemType::pred1());
    let x = Var::new(1, SemType::entity());
    Category::canonical(
        SynCat::forward(SynCat::N, SynCat::N),
        &Term::lambda(
            g.clone(),
            Term::lambda(
                x.clone(),
                Term::And(vec![
                    Term::apply_all(
                        Term::constant(pname, pty.clone()),
                        [Term::Var(x.clone()), constant],
                    ),
                    Term::apply(Term::Var(g), Term::Var(x)),
                ]),
            ),
        ),
    )
}

/// Rule 9's category: `NP/N : λg.argmax/min(g, λx.f(x))`.
fn superlative(fname: &str, fty: &SemType, max: bool) -> Category {
    let g = Var::new(0, SemType::pred1());
    let x = Var::new(1, SemType::entity());
    let measure = Term::lambda(
        x.clone(),
        Term::apply(Term::constant(fname, fty.clone()), Term::Var(x)),
    );
    let body = if max {
        Term::Argmax(Box::new(Term::Var(g.clone())), Box::new(measure))
    } else {
        Term::Argmin(Box::new(Term::Var(g.clone())), Box::new(measure))
    };
    Category::canonical(
        SynCat::forward(SynCat::NP, SynCat::N),
        &Term::lambda(g, body),
    )
}

/// GENLEX(S, L): every word span of S paired with every category
/// triggered by L.
pub fn genlex(tokens: &[String], l: &Term, max_len: usize) -> CandidateSet {
    let spans = word_spans(tokens, max_len);
    let cats = categories(l);
    let mut set = CandidateSet::default();
    for span in &spans {
        for cat in cats.keys() {
            set.items.insert(LexicalItem::new(span.clone(), cat.clone()));
        }
    }
    set.provenance = cats;
    set
}
