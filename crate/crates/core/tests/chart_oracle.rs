//! The packed chart checked against an exhaustive recursive-descent
//! parser that enumerates every derivation directly from the lexicon:
//! no chart, no packing, no shared structure.

mod common;

use std::collections::HashMap;

use common::{leaf_score, logsumexp, random_instance, toks, Rng};
use pccg::ccg::{combine, type_raise, Category, LexicalItem, Lexicon, RuleSet};
use pccg::chart::{build_chart, Chart, ChartConfig};
use pccg::lambda::Term;
use pccg::model::ParamVector;

/// One fully explicit parse of a span.
#[derive(Clone)]
struct OracleParse {
    cat: Category,
    score: f64,
    leaves: Vec<LexicalItem>,
}

/// Every derivation of every span, by brute-force recursion over all
/// binary bracketings and rule choices.
fn oracle_all(
    tokens: &[String],
    lexicon: &Lexicon,
    params: &ParamVector,
    rules: &RuleSet,
    span: (usize, usize),
    memo: &mut HashMap<(usize, usize), Vec<OracleParse>>,
) -> Vec<OracleParse> {
    if let Some(hit) = memo.get(&span) {
        return hit.clone();
    }
    let (i, j) = span;
    let mut out: Vec<OracleParse> = Vec::new();
    if j - i <= lexicon.max_phrase_len() {
        let phrase: Vec<String> = tokens[i..j].to_vec();
        for cat in lexicon.lookup(&phrase) {
            let item = LexicalItem::new(phrase.clone(), cat);
            out.push(OracleParse {
                cat: item.cat.clone(),
                score: params.weight(&item),
                leaves: vec![item],
            });
        }
    }
    for k in (i + 1)..j {
        let lefts = oracle_all(tokens, lexicon, params, rules, (i, k), memo);
        let rights = oracle_all(tokens, lexicon, params, rules, (k, j), memo);
        for l in &lefts {
            for r in &rights {
                for &rule in rules.binary_rules() {
                    if let Some(cat) = combine(rule, &l.cat, &r.cat).unwrap() {
                        let mut leaves = l.leaves.clone();
                        leaves.extend(r.leaves.iter().cloned());
                        out.push(OracleParse {
                            cat: Category::canonical(cat.syn, &cat.sem),
                            score: l.score + r.score,
                            leaves,
                        });
                    }
                }
            }
        }
    }
    if rules.type_raising {
        let base = out.clone();
        for parse in base {
            for (_, cat) in type_raise(&parse.cat) {
                out.push(OracleParse {
                    cat: Category::canonical(cat.syn, &cat.sem),
                    score: parse.score,
                    leaves: parse.leaves.clone(),
                });
            }
        }
    }
    memo.insert(span, out.clone());
    out
}

fn oracle_roots(
    tokens: &[String],
    lexicon: &Lexicon,
    params: &ParamVector,
    rules: &RuleSet,
) -> Vec<OracleParse> {
    let mut memo = HashMap::new();
    oracle_all(tokens, lexicon, params, rules, (0, tokens.len()), &mut memo)
        .into_iter()
        .filter(|p| p.cat.syn.is_atom() && p.cat.sem.is_closed())
        .collect()
}

fn exact_chart(
    tokens: &[String],
    lexicon: &Lexicon,
    params: &ParamVector,
    rules: RuleSet,
) -> Chart {
    build_chart(tokens, lexicon, params, &ChartConfig { beam: usize::MAX, rules })
        .unwrap()
}

fn sorted_scores(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs
}

fn assert_close_lists(a: &[f64], b: &[f64], tol: f64, what: &str) {
    assert_eq!(a.len(), b.len(), "{what}: cardinality mismatch");
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() < tol, "{what}: {x} vs {y}");
    }
}

fn check_instance(
    tokens: &[String],
    lexicon: &Lexicon,
    params: &ParamVector,
    rules: RuleSet,
) {
    let chart = exact_chart(tokens, lexicon, params, rules);
    let mut memo = HashMap::new();

    // Per-cell packed item counts equal the oracle's distinct
    // (syntax, canonical semantics) pairs, and inside/viterbi scores
    // aggregate the oracle's per-parse scores.
    for span in chart.spans_bottom_up() {
        let parses = oracle_all(tokens, lexicon, params, &rules, span, &mut memo);
        let mut grouped: HashMap<String, Vec<f64>> = HashMap::new();
        for p in &parses {
            grouped.entry(p.cat.to_string()).or_default().push(p.score);
        }
        let items = chart.cell_items(span);
        assert_eq!(
            items.len(),
            grouped.len(),
            "cell {span:?}: packed count vs oracle distinct categories"
        );
        for item in items {
            let scores = grouped
                .get(&item.cat.to_string())
                .unwrap_or_else(|| panic!("cell {span:?}: chart-only item {}", item.cat));
            let inside = logsumexp(scores.iter().copied());
            let viterbi = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(
                (item.inside_log - inside).abs() < 1e-9,
                "inside mismatch for {}",
                item.cat
            );
            assert!(
                (item.viterbi_log - viterbi).abs() < 1e-9,
                "viterbi mismatch for {}",
                item.cat
            );
        }
    }

    // Root enumeration: the unpacked derivations match the oracle's
    // complete parses, score by score.
    let roots = oracle_roots(tokens, lexicon, params, &rules);
    let enumerated = chart.enumerate_root().unwrap();
    assert_close_lists(
        &sorted_scores(roots.iter().map(|p| p.score).collect()),
        &sorted_scores(
            enumerated
                .iter()
                .map(|(_, d, _)| leaf_score(d, params))
                .collect(),
        ),
        1e-9,
        "root derivation scores",
    );
    // Stored scores agree with recomputation from leaves.
    for (_, d, stored) in &enumerated {
        assert!((stored - leaf_score(d, params)).abs() < 1e-9);
    }

    // Best logical form: argmax over summed class mass.
    let mut classes: HashMap<String, Vec<f64>> = HashMap::new();
    for p in &roots {
        classes
            .entry(p.cat.sem.to_string())
            .or_default()
            .push(p.score);
    }
    match chart.best_logical_form() {
        None => assert!(roots.is_empty()),
        Some((best, logp)) => {
            let z = logsumexp(roots.iter().map(|p| p.score));
            let best_mass = classes
                .iter()
                .map(|(_, ss)| logsumexp(ss.iter().copied()))
                .fold(f64::NEG_INFINITY, f64::max);
            let got = logsumexp(classes[&best.to_string()].iter().copied());
            assert!(
                (got - best_mass).abs() < 1e-9,
                "best form is not the max-mass class"
            );
            assert!((logp - (got - z)).abs() < 1e-9);
        }
    }
}

#[test]
fn fig2a_grammar_matches_oracle() {
    let ont = common::geo_ontology();
    let lex = common::fig2a_lexicon(&ont);
    let mut params = ParamVector::new();
    for item in lex.items() {
        params.set(item, 0.1);
    }
    let tokens = toks("utah borders idaho");
    check_instance(&tokens, &lex, &params, RuleSet::default());
    check_instance(
        &tokens,
        &lex,
        &params,
        RuleSet { composition: true, type_raising: true },
    );
}

#[test]
fn random_grammars_match_oracle() {
    let mut rng = Rng::new(0xC0FFEE);
    let mut checked = 0;
    while checked < 40 {
        let inst = random_instance(&mut rng);
        // Skip sentences whose oracle space is tiny AND unparseable;
        // they exercise nothing.
        check_instance(&inst.tokens, &inst.lexicon, &inst.params, RuleSet::default());
        checked += 1;
    }
}

#[test]
fn random_grammars_with_raising_match_oracle() {
    let mut rng = Rng::new(0xBEEF);
    for _ in 0..15 {
        let inst = random_instance(&mut rng);
        check_instance(
            &inst.tokens,
            &inst.lexicon,
            &inst.params,
            RuleSet { composition: true, type_raising: true },
        );
    }
}

#[test]
fn beam_only_removes_derivations() {
    let mut rng = Rng::new(0xDADA);
    for _ in 0..20 {
        let inst = random_instance(&mut rng);
        let rules = RuleSet::default();
        let exact = exact_chart(&inst.tokens, &inst.lexicon, &inst.params, rules);
        let exact_scores: Vec<f64> = exact
            .enumerate_root()
            .unwrap()
            .iter()
            .map(|(_, d, _)| leaf_score(d, &inst.params))
            .collect();
        for beam in [1usize, 2, 4] {
            let beamed = build_chart(
                &inst.tokens,
                &inst.lexicon,
                &inst.params,
                &ChartConfig { beam, rules },
            )
            .unwrap();
            let beamed_scores =
                sorted_scores(beamed.enumerate_root().unwrap().iter().map(|(_, d, _)| leaf_score(d, &inst.params)).collect());
            assert!(
                beamed_scores.len() <= exact_scores.len(),
                "beam invented derivations"
            );
            // Every beamed derivation score appears in the exact list.
            let mut remaining = sorted_scores(exact_scores.clone());
            for s in &beamed_scores {
                let pos = remaining
                    .iter()
                    .position(|e| (e - s).abs() < 1e-9)
                    .expect("beamed derivation missing from exact set");
                remaining.remove(pos);
            }
        }
    }
}

#[test]
fn constrained_parse_ties_match_oracle() {
    let mut rng = Rng::new(0xFEED);
    let mut exercised = 0;
    for _ in 0..60 {
        let inst = random_instance(&mut rng);
        let rules = RuleSet::default();
        let chart = exact_chart(&inst.tokens, &inst.lexicon, &inst.params, rules);
        let roots = oracle_roots(&inst.tokens, &inst.lexicon, &inst.params, &rules);
        if roots.is_empty() {
            continue;
        }
        // Use each distinct derivable form as a target.
        let mut seen: Vec<Term> = Vec::new();
        for p in &roots {
            if seen.contains(&p.cat.sem) {
                continue;
            }
            seen.push(p.cat.sem.clone());
            let target = &p.cat.sem;
            let class: Vec<&OracleParse> =
                roots.iter().filter(|q| q.cat.sem == *target).collect();
            let max = class
                .iter()
                .map(|q| q.score)
                .fold(f64::NEG_INFINITY, f64::max);
            let tied = class
                .iter()
                .filter(|q| (q.score - max).abs() <= 1e-9 * max.abs().max(1.0))
                .count();
            let got = chart.constrained_best(target);
            assert_eq!(got.len(), tied, "tied-set size for {target}");
            for d in &got {
                assert!(
                    (leaf_score(d, &inst.params) - max).abs() <= 1e-9 * max.abs().max(1.0)
                );
                assert_eq!(pccg::lambda::canonical_form(d.logical_form()), *target);
            }
            exercised += 1;
        }
    }
    assert!(exercised > 30, "too few constrained-parse cases exercised");
}

#[test]
fn unparseable_sentence_has_empty_everything() {
    let ont = common::geo_ontology();
    let lex = common::fig2a_lexicon(&ont);
    let chart = exact_chart(
        &toks("utah borders oregon"),
        &lex,
        &ParamVector::new(),
        RuleSet::default(),
    );
    assert!(chart.complete_roots().is_empty());
    assert!(chart.enumerate_root().unwrap().is_empty());
    let target = pccg::lambda::parse_term("borders(utah, idaho)", &ont).unwrap();
    assert!(chart.constrained_best(&target).is_empty());
}
