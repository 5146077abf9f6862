//! Feature expectations by inside-outside over the packed chart, and
//! the log-likelihood gradient.

use std::collections::{BTreeMap, HashMap};

use crate::ccg::{LexicalItem, Lexicon};
use crate::chart::{build_chart, Backpointer, Chart, ChartConfig, ItemRef};
use crate::lambda::Term;
use crate::math::{logsumexp, logsumexp2};
use crate::model::{ModelError, ParamVector};

/// E[f_j] under P(L,T|S;θ): the expected usage count of every lexical
/// entry over all complete parses. Exact for the derivations the chart
/// holds (exact parsing when built with an unbounded beam).
pub fn expected_features_free(
    chart: &Chart,
) -> Result<BTreeMap<LexicalItem, f64>, ModelError> {
    let roots = chart.complete_roots();
    if roots.is_empty() {
        return Err(ModelError::EmptyChart);
    }
    let z = chart.log_partition().expect("roots exist");
    Ok(expectations_from_roots(chart, &roots, z))
}

/// E[f_j] under P(T|S,L;θ): the expectation restricted to parses whose
/// logical form is equivalent to `target`, renormalized over that set.
pub fn expected_features_clamped(
    chart: &Chart,
    target: &Term,
) -> Result<BTreeMap<LexicalItem, f64>, ModelError> {
    let roots = chart.roots_with_form(target);
    if roots.is_empty() {
        return Err(ModelError::UnderivableTarget);
    }
    let z = logsumexp(roots.iter().map(|r| chart.item(*r).inside_log));
    Ok(expectations_from_roots(chart, &roots, z))
}

/// Outside pass from the given root set. Each root contributes outside
/// mass 1; binary backpointers send `outside + sibling inside` to each
/// child, unary ones forward `outside` unchanged, and a lexical
/// backpointer realizes probability mass exp(outside + weight − z) for
/// its entry.
fn expectations_from_roots(
    chart: &Chart,
    roots: &[ItemRef],
    log_z: f64,
) -> BTreeMap<LexicalItem, f64> {
    let mut outside: HashMap<ItemRef, f64> = HashMap::new();
    for r in roots {
        accum(&mut outside, *r, 0.0);
    }
    let mut expect: BTreeMap<LexicalItem, f64> = BTreeMap::new();

    // Top-down over spans; within a cell, later items first so that
    // type-raised parents propagate to their same-cell children before
    // the children are visited.
    let mut spans = chart.spans_bottom_up();
    spans.reverse();
    for span in spans {
        let items = chart.cell_items(span);
        for index in (0..items.len()).rev() {
            let r = ItemRef { span, index };
            let out_r = match outside.get(&r) {
                Some(&v) => v,
                None => continue,
            };
            for bp in &items[index].backpointers {
                match bp {
                    Backpointer::Lex { item, weight } => {
                        let p = (out_r + weight - log_z).exp();
                        *expect.entry(item.clone()).or_insert(0.0) += p;
                    }
                    Backpointer::Unary { child, .. } => {
                        accum(&mut outside, *child, out_r);
                    }
                    Backpointer::Binary { left, right, .. } => {
                        let li = chart.item(*left).inside_log;
                        let ri = chart.item(*right).inside_log;
                        accum(&mut outside, *left, out_r + ri);
                        accum(&mut outside, *right, out_r + li);
                    }
                }
            }
        }
    }
    expect
}

fn accum(outside: &mut HashMap<ItemRef, f64>, r: ItemRef, contribution: f64) {
    let slot = outside.entry(r).or_insert(f64::NEG_INFINITY);
    *slot = logsumexp2(*slot, contribution);
}

/// ∂ log P(L|S;θ) / ∂θ for one example: clamped minus free expectations.
/// Errors when the sentence has no parse or `target` is underivable.
pub fn gradient(
    tokens: &[String],
    target: &Term,
    lexicon: &Lexicon,
    params: &ParamVector,
    config: &ChartConfig,
) -> Result<BTreeMap<LexicalItem, f64>, ModelError> {
    let chart = build_chart(tokens, lexicon, params, config)?;
    gradient_on_chart(&chart, target)
}

/// [`gradient`] against an already built chart.
pub fn gradient_on_chart(
    chart: &Chart,
    target: &Term,
) -> Result<BTreeMap<LexicalItem, f64>, ModelError> {
    let clamped = expected_features_clamped(chart, target)?;
    let free = expected_features_free(chart)?;
    let mut grad = clamped;
    for (item, e) in free {
        *grad.entry(item).or_insert(0.0) -= e;
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::ChartConfig;
    use crate::lambda::{parse_term, Ontology};

    fn ont() -> Ontology {
        Ontology::parse("utah : e\nidaho : e\nborders : <e,<e,t>>\nstate : <e,t>\n")
            .unwrap()
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(|w| w.to_string()).collect()
    }

    #[test]
    fn deterministic_grammar_expectation_is_the_derivation_counts() {
        let ont = ont();
        let lex = Lexicon::parse(
            "utah := NP : utah\n\
             idaho := NP : idaho\n\
             borders := (S\\NP)/NP : lambda x:e . lambda y:e . borders(y, x)\n",
            &ont,
        )
        .unwrap();
        let chart = build_chart(
            &toks("utah borders idaho"),
            &lex,
            &ParamVector::new(),
            &ChartConfig::exact(),
        )
        .unwrap();
        let e = expected_features_free(&chart).unwrap();
        assert_eq!(e.len(), 3);
        for (_, v) in &e {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_ambiguity_splits_mass_evenly() {
        // Two entries for the same word produce two parses of different
        // forms with equal scores; each parse-specific entry expects 0.5.
        let ont = ont();
        let lex = Lexicon::parse(
            "utah := NP : utah\n\
             utah := NP : idaho\n",
            &ont,
        )
        .unwrap();
        let chart = build_chart(
            &toks("utah"),
            &lex,
            &ParamVector::new(),
            &ChartConfig::exact(),
        )
        .unwrap();
        let e = expected_features_free(&chart).unwrap();
        assert_eq!(e.len(), 2);
        for (_, v) in &e {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn clamping_restricts_to_the_target_form() {
        let ont = ont();
        let lex = Lexicon::parse(
            "utah := NP : utah\n\
             utah := NP : idaho\n",
            &ont,
        )
        .unwrap();
        let chart = build_chart(
            &toks("utah"),
            &lex,
            &ParamVector::new(),
            &ChartConfig::exact(),
        )
        .unwrap();
        let target = parse_term("utah", &ont).unwrap();
        let e = expected_features_clamped(&chart, &target).unwrap();
        assert_eq!(e.len(), 1);
        let (item, v) = e.iter().next().unwrap();
        assert_eq!(item.cat.sem, target);
        assert!((v - 1.0).abs() < 1e-12);

        let missing = parse_term("borders(utah, idaho)", &ont).unwrap();
        assert_eq!(
            expected_features_clamped(&chart, &missing).unwrap_err(),
            ModelError::UnderivableTarget
        );
    }
}
