//! Packed-chart CKY parsing over token spans.
//!
//! Items within a cell are unique by (syntactic category, canonical
//! semantics); colliding derivations merge, accumulating inside mass in
//! log space (log-sum-exp) and the Viterbi score by max. Lexical
//! features make scores local to leaves, so packing never changes any
//! root quantity.

mod derivation;

pub use derivation::{Derivation, DerivNode, EnumerationError};

use std::collections::HashMap;

use crate::ccg::{combine, type_raise, Category, LexicalItem, Lexicon, RuleId, RuleSet, SynCat};
use crate::lambda::{canonical_form, Term, TypeError};
use crate::math::{log_close, logsumexp, logsumexp2};
use crate::model::ParamVector;

/// Parser configuration: per-cell beam width and the enabled rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartConfig {
    /// Keep the top `beam` items per cell by Viterbi score.
    /// `usize::MAX` disables beaming (exact parsing).
    pub beam: usize,
    pub rules: RuleSet,
}

impl Default for ChartConfig {
    fn default() -> Self {
        ChartConfig { beam: 200, rules: RuleSet::default() }
    }
}

impl ChartConfig {
    pub fn exact() -> Self {
        ChartConfig { beam: usize::MAX, rules: RuleSet::default() }
    }
}

/// Identifies an item in the chart: span plus index within the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ItemRef {
    pub span: (usize, usize),
    pub index: usize,
}

/// How an item was built. Binary rules point at strictly smaller spans;
/// unary (type-raising) points at an earlier item of the same cell.
#[derive(Debug, Clone)]
pub enum Backpointer {
    /// A lexical entry with its weight at build time.
    Lex { item: LexicalItem, weight: f64 },
    Unary { rule: RuleId, child: ItemRef },
    Binary { rule: RuleId, left: ItemRef, right: ItemRef },
}

#[derive(Debug, Clone)]
pub struct ChartItem {
    /// Category with canonicalized semantics.
    pub cat: Category,
    /// log Σ exp(score) over all derivations of this item.
    pub inside_log: f64,
    /// max score over all derivations of this item.
    pub viterbi_log: f64,
    pub backpointers: Vec<Backpointer>,
}

#[derive(Debug, Clone, Default)]
struct Cell {
    items: Vec<ChartItem>,
    /// Beamed survivors, sorted by Viterbi descending then canonical
    /// print ascending. Pruned items stay addressable for backpointers.
    active: Vec<usize>,
}

/// A packed parse forest over one sentence. Immutable once built.
#[derive(Debug, Clone)]
pub struct Chart {
    tokens: Vec<String>,
    cells: Vec<Cell>,
    config: ChartConfig,
}

impl Chart {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn config(&self) -> &ChartConfig {
        &self.config
    }

    fn cell_index(&self, span: (usize, usize)) -> usize {
        let n = self.tokens.len();
        debug_assert!(span.0 < span.1 && span.1 <= n);
        span.0 * (n + 1) + span.1
    }

    /// Every item stored for a span, pruned or not; indices are stable.
    pub fn cell_items(&self, span: (usize, usize)) -> &[ChartItem] {
        &self.cells[self.cell_index(span)].items
    }

    /// Indices of the beam survivors for a span.
    pub fn active_indices(&self, span: (usize, usize)) -> &[usize] {
        &self.cells[self.cell_index(span)].active
    }

    pub fn item(&self, r: ItemRef) -> &ChartItem {
        &self.cells[self.cell_index(r.span)].items[r.index]
    }

    /// Spans in bottom-up order (width 1 first), each left to right.
    pub fn spans_bottom_up(&self) -> Vec<(usize, usize)> {
        let n = self.tokens.len();
        let mut out = Vec::new();
        for width in 1..=n {
            for start in 0..=(n - width) {
                out.push((start, start + width));
            }
        }
        out
    }

    /// Complete parses: active full-span items with an atomic category
    /// (S, N or NP) and closed semantics.
    pub fn complete_roots(&self) -> Vec<ItemRef> {
        let n = self.tokens.len();
        let span = (0, n);
        self.active_indices(span)
            .iter()
            .map(|&index| ItemRef { span, index })
            .filter(|r| {
                let it = self.item(*r);
                it.cat.syn.is_atom() && it.cat.sem.is_closed()
            })
            .collect()
    }

    /// log Z: total inside mass over complete parses. `None` when the
    /// sentence has no parse.
    pub fn log_partition(&self) -> Option<f64> {
        let roots = self.complete_roots();
        if roots.is_empty() {
            None
        } else {
            Some(logsumexp(
                roots.iter().map(|r| self.item(*r).inside_log),
            ))
        }
    }

    /// Every derivable logical form with its log probability, sorted by
    /// probability descending, ties by canonical print order.
    pub fn logical_form_distribution(&self) -> Vec<(Term, f64)> {
        let roots = self.complete_roots();
        if roots.is_empty() {
            return Vec::new();
        }
        let z = self.log_partition().expect("roots exist");
        let mut groups: Vec<(Term, f64)> = Vec::new();
        for r in roots {
            let it = self.item(r);
            match groups.iter_mut().find(|(sem, _)| *sem == it.cat.sem) {
                Some((_, mass)) => *mass = logsumexp2(*mass, it.inside_log),
                None => groups.push((it.cat.sem.clone(), it.inside_log)),
            }
        }
        groups.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap()
                .then_with(|| a.0.to_string().cmp(&b.0.to_string()))
        });
        groups.into_iter().map(|(sem, mass)| (sem, mass - z)).collect()
    }

    /// The most probable logical form: argmax over L of the summed
    /// derivation mass, with ties broken by canonical print order.
    /// Returns the form and its log probability.
    pub fn best_logical_form(&self) -> Option<(Term, f64)> {
        self.logical_form_distribution().into_iter().next()
    }

    /// Root items whose logical form is equivalent to `target`.
    pub fn roots_with_form(&self, target: &Term) -> Vec<ItemRef> {
        let canonical = canonical_form(target);
        self.complete_roots()
            .into_iter()
            .filter(|r| self.item(*r).cat.sem == canonical)
            .collect()
    }

    /// The highest-probability parses whose logical form is equivalent
    /// to `target` — all of them when several tie at the maximum
    /// (relative tolerance 1e-9 on log scores). Empty when `target` is
    /// not derivable.
    pub fn constrained_best(&self, target: &Term) -> Vec<Derivation> {
        let roots = self.roots_with_form(target);
        if roots.is_empty() {
            return Vec::new();
        }
        let max_v = roots
            .iter()
            .map(|r| self.item(*r).viterbi_log)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut out = Vec::new();
        for r in roots {
            if log_close(self.item(r).viterbi_log, max_v) {
                out.extend(derivation::viterbi_derivations(self, r));
            }
        }
        out
    }
}

/// Fills a chart bottom-up. Lexical entries seed every span up to the
/// longest phrase in the lexicon; adjacent item pairs combine under
/// every enabled binary rule; NP items are type-raised in place when
/// enabled; each completed cell is then truncated to the beam.
///
/// Errors only on a semantically ill-typed combination whose syntactic
/// sides match, which signals an ill-formed lexicon.
pub fn build_chart(
    tokens: &[String],
    lexicon: &Lexicon,
    params: &ParamVector,
    config: &ChartConfig,
) -> Result<Chart, TypeError> {
    assert!(!tokens.is_empty(), "cannot parse an empty sentence");
    let n = tokens.len();
    let mut chart = Chart {
        tokens: tokens.to_vec(),
        cells: vec![Cell::default(); (n + 1) * (n + 1)],
        config: *config,
    };
    let max_phrase = lexicon.max_phrase_len();

    for span in chart.spans_bottom_up() {
        let (i, j) = span;
        let mut cell = Cell::default();
        // Index from (syn, sem) to position, for packing.
        let mut index: HashMap<(SynCat, Term), usize> = HashMap::new();

        // Lexical seeding.
        if j - i <= max_phrase {
            let phrase: Vec<String> = tokens[i..j].to_vec();
            for cat in lexicon.lookup(&phrase) {
                let item = LexicalItem::new(phrase.clone(), cat);
                let weight = params.weight(&item);
                let cat = item.cat.clone();
                add_item(
                    &mut cell,
                    &mut index,
                    cat,
                    weight,
                    weight,
                    Backpointer::Lex { item, weight },
                );
            }
        }

        // Binary combination over all split points.
        for k in (i + 1)..j {
            let left_span = (i, k);
            let right_span = (k, j);
            for &li in chart.active_indices(left_span) {
                for &ri in chart.active_indices(right_span) {
                    let left = &chart.cell_items(left_span)[li];
                    let right = &chart.cell_items(right_span)[ri];
                    for &rule in config.rules.binary_rules() {
                        if let Some(cat) = combine(rule, &left.cat, &right.cat)? {
                            let cat = Category::canonical(cat.syn, &cat.sem);
                            add_item(
                                &mut cell,
                                &mut index,
                                cat,
                                left.inside_log + right.inside_log,
                                left.viterbi_log + right.viterbi_log,
                                Backpointer::Binary {
                                    rule,
                                    left: ItemRef { span: left_span, index: li },
                                    right: ItemRef { span: right_span, index: ri },
                                },
                            );
                        }
                    }
                }
            }
        }

        // Type-raising: unary, same cell, never chains (outputs are not NP).
        if config.rules.type_raising {
            let snapshot = cell.items.len();
            for child_idx in 0..snapshot {
                let child = cell.items[child_idx].clone();
                for (rule, cat) in type_raise(&child.cat) {
                    let cat = Category::canonical(cat.syn, &cat.sem);
                    add_item(
                        &mut cell,
                        &mut index,
                        cat,
                        child.inside_log,
                        child.viterbi_log,
                        Backpointer::Unary {
                            rule,
                            child: ItemRef { span, index: child_idx },
                        },
                    );
                }
            }
        }

        // Beam: keep the top-k by Viterbi, ties by canonical print.
        let mut order: Vec<usize> = (0..cell.items.len()).collect();
        order.sort_by(|&a, &b| {
            let (ia, ib) = (&cell.items[a], &cell.items[b]);
            ib.viterbi_log
                .partial_cmp(&ia.viterbi_log)
                .unwrap()
                .then_with(|| ia.cat.to_string().cmp(&ib.cat.to_string()))
        });
        order.truncate(config.beam);
        cell.active = order;

        let idx = chart.cell_index(span);
        chart.cells[idx] = cell;
    }
    Ok(chart)
}

fn add_item(
    cell: &mut Cell,
    index: &mut HashMap<(SynCat, Term), usize>,
    cat: Category,
    inside_log: f64,
    viterbi_log: f64,
    bp: Backpointer,
) {
    let key = (cat.syn.clone(), cat.sem.clone());
    match index.get(&key) {
        Some(&pos) => {
            let item = &mut cell.items[pos];
            item.inside_log = logsumexp2(item.inside_log, inside_log);
            item.viterbi_log = item.viterbi_log.max(viterbi_log);
            item.backpointers.push(bp);
        }
        None => {
            index.insert(key, cell.items.len());
            cell.items.push(ChartItem {
                cat,
                inside_log,
                viterbi_log,
                backpointers: vec![bp],
            });
        }
    }
}

/// Builds a chart and extracts the highest-probability parses for
/// `target` (the PARSE procedure used during lexical generation).
pub fn parse_constrained(
    tokens: &[String],
    target: &Term,
    lexicon: &Lexicon,
    params: &ParamVector,
    config: &ChartConfig,
) -> Result<Vec<Derivation>, TypeError> {
    let chart = build_chart(tokens, lexicon, params, config)?;
    Ok(chart.constrained_best(target))
}

/// Unpacks every complete derivation (all roots), with its logical form
/// and score. Refuses when the derivation count exceeds `cap`
/// (default 10^6 via [`Chart::enumerate_root`]).
pub fn enumerate_root(
    chart: &Chart,
    cap: u64,
) -> Result<Vec<(Term, Derivation, f64)>, EnumerationError> {
    derivation::enumerate_root(chart, cap)
}

impl Chart {
    /// [`enumerate_root`] with the default cap of 10^6 derivations.
    pub fn enumerate_root(&self) -> Result<Vec<(Term, Derivation, f64)>, EnumerationError> {
        derivation::enumerate_root(self, 1_000_000)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{equivalent, parse_term, Ontology};

    fn geo() -> Ontology {
        Ontology::parse(
            "texas : e:state\nutah : e:state\nidaho : e:state\n\
             state : <e,t>\nborders : <e,<e,t>>\nsize : <e,r>\n",
        )
        .unwrap()
    }

    fn fig2a_lexicon(ont: &Ontology) -> Lexicon {
        Lexicon::parse(
            "utah := NP : utah\n\
             idaho := NP : idaho\n\
             borders := (S\\NP)/NP : lambda x:e . lambda y:e . borders(y, x)\n",
            ont,
        )
        .unwrap()
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(|w| w.to_string()).collect()
    }

    #[test]
    fn utah_borders_idaho_has_one_root() {
        let ont = geo();
        let lex = fig2a_lexicon(&ont);
        let chart = build_chart(
            &toks("utah borders idaho"),
            &lex,
            &ParamVector::new(),
            &ChartConfig::exact(),
        )
        .unwrap();
        let roots = chart.complete_roots();
        assert_eq!(roots.len(), 1);
        let item = chart.item(roots[0]);
        assert_eq!(item.cat.syn, SynCat::S);
        let want = parse_term("borders(utah, idaho)", &ont).unwrap();
        assert!(equivalent(&item.cat.sem, &want));
        let (best, logp) = chart.best_logical_form().unwrap();
        assert!(equivalent(&best, &want));
        assert!(logp.abs() < 1e-12);
    }

    #[test]
    fn unknown_token_yields_no_parse() {
        let ont = geo();
        let lex = fig2a_lexicon(&ont);
        let chart = build_chart(
            &toks("utah borders nevada"),
            &lex,
            &ParamVector::new(),
            &ChartConfig::exact(),
        )
        .unwrap();
        assert!(chart.complete_roots().is_empty());
        assert!(chart.log_partition().is_none());
        assert!(chart.best_logical_form().is_none());
    }

    #[test]
    fn fig2b_wh_question_parses() {
        let ont = Ontology::parse(
            "texas : e:state\nstate : <e,t>\nborders : <e,<e,t>>\n",
        )
        .unwrap();
        let lex = Lexicon::parse(
            "what := (S/(S\\NP))/N : lambda f:<e,t> . lambda g:<e,t> . lambda x:e . and(f(x), g(x))\n\
             states := N : lambda x:e . state(x)\n\
             border := (S\\NP)/NP : lambda x:e . lambda y:e . borders(y, x)\n\
             texas := NP : texas\n",
            &ont,
        )
        .unwrap();
        let chart = build_chart(
            &toks("what states border texas"),
            &lex,
            &ParamVector::new(),
            &ChartConfig::exact(),
        )
        .unwrap();
        let (best, _) = chart.best_logical_form().unwrap();
        let want =
            parse_term("lambda x:e . and(state(x), borders(x, texas))", &ont).unwrap();
        assert!(equivalent(&best, &want));
    }

    #[test]
    fn constrained_parse_finds_the_unique_derivation() {
        let ont = geo();
        let lex = fig2a_lexicon(&ont);
        let target = parse_term("borders(utah, idaho)", &ont).unwrap();
        let derivs = parse_constrained(
            &toks("utah borders idaho"),
            &target,
            &lex,
            &ParamVector::new(),
            &ChartConfig::exact(),
        )
        .unwrap();
        assert_eq!(derivs.len(), 1);
        assert!(equivalent(derivs[0].logical_form(), &target));
        assert_eq!(derivs[0].leaves().len(), 3);
    }

    #[test]
    fn constrained_parse_of_underivable_form_is_empty() {
        let ont = geo();
        let lex = fig2a_lexicon(&ont);
        let target = parse_term("borders(idaho, utah)", &ont).unwrap();
        let derivs = parse_constrained(
            &toks("utah borders idaho"),
            &target,
            &lex,
            &ParamVector::new(),
            &ChartConfig::exact(),
        )
        .unwrap();
        assert!(derivs.is_empty());
    }

    #[test]
    fn enumeration_is_single_parse_and_sums_to_one() {
        let ont = geo();
        let lex = fig2a_lexicon(&ont);
        let chart = build_chart(
            &toks("utah borders idaho"),
            &lex,
            &ParamVector::new(),
            &ChartConfig::exact(),
        )
        .unwrap();
        let all = chart.enumerate_root().unwrap();
        assert_eq!(all.len(), 1);
        let z = chart.log_partition().unwrap();
        let total: f64 = all.iter().map(|(_, _, s)| (s - z).exp()).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn type_raising_adds_derivations_but_no_new_forms() {
        let ont = geo();
        let lex = fig2a_lexicon(&ont);
        let tokens = toks("utah borders idaho");
        let plain = build_chart(&tokens, &lex, &ParamVector::new(), &ChartConfig::exact())
            .unwrap();
        let mut raised_cfg = ChartConfig::exact();
        raised_cfg.rules.type_raising = true;
        let raised =
            build_chart(&tokens, &lex, &ParamVector::new(), &raised_cfg).unwrap();

        let forms = |c: &Chart| {
            let mut v: Vec<String> = c
                .enumerate_root()
                .unwrap()
                .into_iter()
                .map(|(l, _, _)| l.to_string())
                .collect();
            v.sort();
            v.dedup();
            v
        };
        let plain_count = plain.enumerate_root().unwrap().len();
        let raised_count = raised.enumerate_root().unwrap().len();
        assert_eq!(plain_count, 1);
        assert!(raised_count >= plain_count);
        assert_eq!(forms(&plain), forms(&raised));
    }

    #[test]
    fn beam_of_one_keeps_charts_parseable_here() {
        let ont = geo();
        let lex = fig2a_lexicon(&ont);
        let cfg = ChartConfig { beam: 1, rules: RuleSet::default() };
        let chart = build_chart(
            &toks("utah borders idaho"),
            &lex,
            &ParamVector::new(),
            &cfg,
        )
        .unwrap();
        assert_eq!(chart.complete_roots().len(), 1);
    }
}
