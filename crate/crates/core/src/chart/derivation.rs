//! Unpacked derivations: extraction from the chart, exhaustive
//! enumeration, and printing.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::ccg::{Category, LexicalItem, RuleId};
use crate::lambda::Term;
use crate::math::log_close;

use super::{Backpointer, Chart, ItemRef};

/// One node of a derivation tree. Leaves are lexical entries; unary
/// nodes are type-raising; binary nodes are the two-place combinators.
#[derive(Debug, Clone, PartialEq)]
pub enum DerivNode {
    Leaf {
        item: LexicalItem,
        span: (usize, usize),
    },
    Unary {
        rule: RuleId,
        cat: Category,
        span: (usize, usize),
        child: Box<DerivNode>,
    },
    Binary {
        rule: RuleId,
        cat: Category,
        span: (usize, usize),
        left: Box<DerivNode>,
        right: Box<DerivNode>,
    },
}

impl DerivNode {
    pub fn category(&self) -> &Category {
        match self {
            DerivNode::Leaf { item, .. } => &item.cat,
            DerivNode::Unary { cat, .. } | DerivNode::Binary { cat, .. } => cat,
        }
    }

    pub fn span(&self) -> (usize, usize) {
        match self {
            DerivNode::Leaf { span, .. }
            | DerivNode::Unary { span, .. }
            | DerivNode::Binary { span, .. } => *span,
        }
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a DerivNode>) {
        match self {
            DerivNode::Leaf { .. } => out.push(self),
            DerivNode::Unary { child, .. } => child.collect_leaves(out),
            DerivNode::Binary { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }

    fn height(&self) -> usize {
        match self {
            DerivNode::Leaf { .. } => 0,
            DerivNode::Unary { child, .. } => child.height() + 1,
            DerivNode::Binary { left, right, .. } => left.height().max(right.height()) + 1,
        }
    }
}

/// A complete parse: the tree of rule applications over lexical entries.
/// The logical form is the (already normalized, canonical) semantics of
/// the root category.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub root: DerivNode,
}

impl Derivation {
    pub fn category(&self) -> &Category {
        self.root.category()
    }

    pub fn logical_form(&self) -> &Term {
        &self.root.category().sem
    }

    /// Lexical leaves in sentence order with their spans.
    pub fn leaves(&self) -> Vec<(&LexicalItem, (usize, usize))> {
        let mut nodes = Vec::new();
        self.root.collect_leaves(&mut nodes);
        nodes
            .into_iter()
            .map(|n| match n {
                DerivNode::Leaf { item, span } => (item, *span),
                _ => unreachable!(),
            })
            .collect()
    }

    /// Two-row column layout: a word row, then per-constituent rule
    /// lines with the combinator arrow, each followed by a category
    /// line and a semantics line.
    pub fn pretty(&self) -> String {
        pretty(self)
    }

    /// Machine-readable nested dump, one node per line:
    /// `leaf <i> <j> <entry>` / `unary|binary <rule> <i> <j> <category>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        dump_node(&self.root, 0, &mut out);
        out
    }
}

fn rule_name(rule: RuleId) -> &'static str {
    match rule {
        RuleId::FwdApply => "fapply",
        RuleId::BwdApply => "bapply",
        RuleId::FwdCompose => "fcompose",
        RuleId::BwdCompose => "bcompose",
        RuleId::FwdRaise => "fraise",
        RuleId::BwdRaise => "braise",
    }
}

fn dump_node(node: &DerivNode, depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    match node {
        DerivNode::Leaf { item, span } => {
            out.push_str(&format!("leaf {} {} {}\n", span.0, span.1, item));
        }
        DerivNode::Unary { rule, cat, span, child } => {
            out.push_str(&format!(
                "unary {} {} {} {}\n",
                rule_name(*rule),
                span.0,
                span.1,
                cat
            ));
            dump_node(child, depth + 1, out);
        }
        DerivNode::Binary { rule, cat, span, left, right } => {
            out.push_str(&format!(
                "binary {} {} {} {}\n",
                rule_name(*rule),
                span.0,
                span.1,
                cat
            ));
            dump_node(left, depth + 1, out);
            dump_node(right, depth + 1, out);
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty())
    }
}

// ---------------------------------------------------------------------------
// Extraction

/// All derivations of `root` achieving its Viterbi score (ties within
/// relative tolerance 1e-9 on log scores).
pub(crate) fn viterbi_derivations(chart: &Chart, root: ItemRef) -> Vec<Derivation> {
    best_nodes(chart, root)
        .into_iter()
        .map(|root| Derivation { root })
        .collect()
}

fn best_nodes(chart: &Chart, r: ItemRef) -> Vec<DerivNode> {
    let item = chart.item(r);
    let mut out = Vec::new();
    for bp in &item.backpointers {
        match bp {
            Backpointer::Lex { item: lex, weight } => {
                if log_close(*weight, item.viterbi_log) {
                    out.push(DerivNode::Leaf { item: lex.clone(), span: r.span });
                }
            }
            Backpointer::Unary { rule, child } => {
                if log_close(chart.item(*child).viterbi_log, item.viterbi_log) {
                    for c in best_nodes(chart, *child) {
                        out.push(DerivNode::Unary {
                            rule: *rule,
                            cat: item.cat.clone(),
                            span: r.span,
                            child: Box::new(c),
                        });
                    }
                }
            }
            Backpointer::Binary { rule, left, right } => {
                let family = chart.item(*left).viterbi_log + chart.item(*right).viterbi_log;
                if log_close(family, item.viterbi_log) {
                    let ls = best_nodes(chart, *left);
                    let rs = best_nodes(chart, *right);
                    for l in &ls {
                        for rr in &rs {
                            out.push(DerivNode::Binary {
                                rule: *rule,
                                cat: item.cat.clone(),
                                span: r.span,
                                left: Box::new(l.clone()),
                                right: Box::new(rr.clone()),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("chart holds {count} derivations, above the cap of {cap}")]
    TooManyDerivations { count: u64, cap: u64 },
}

/// Unpacks every complete derivation with its logical form and score.
pub(crate) fn enumerate_root(
    chart: &Chart,
    cap: u64,
) -> Result<Vec<(Term, Derivation, f64)>, EnumerationError> {
    let roots = chart.complete_roots();
    let mut memo = HashMap::new();
    let total: u64 = roots
        .iter()
        .map(|r| count_derivations(chart, *r, &mut memo))
        .fold(0u64, u64::saturating_add);
    if total > cap {
        return Err(EnumerationError::TooManyDerivations { count: total, cap });
    }
    let mut out = Vec::new();
    for r in roots {
        let sem = chart.item(r).cat.sem.clone();
        for (node, score) in all_nodes(chart, r) {
            out.push((sem.clone(), Derivation { root: node }, score));
        }
    }
    Ok(out)
}

fn count_derivations(chart: &Chart, r: ItemRef, memo: &mut HashMap<ItemRef, u64>) -> u64 {
    if let Some(&c) = memo.get(&r) {
        return c;
    }
    let mut total = 0u64;
    for bp in &chart.item(r).backpointers {
        let c = match bp {
            Backpointer::Lex { .. } => 1,
            Backpointer::Unary { child, .. } => count_derivations(chart, *child, memo),
            Backpointer::Binary { left, right, .. } => {
                count_derivations(chart, *left, memo)
                    .saturating_mul(count_derivations(chart, *right, memo))
            }
        };
        total = total.saturating_add(c);
    }
    memo.insert(r, total);
    total
}

fn all_nodes(chart: &Chart, r: ItemRef) -> Vec<(DerivNode, f64)> {
    let item = chart.item(r);
    let mut out = Vec::new();
    for bp in &item.backpointers {
        match bp {
            Backpointer::Lex { item: lex, weight } => {
                out.push((DerivNode::Leaf { item: lex.clone(), span: r.span }, *weight));
            }
            Backpointer::Unary { rule, child } => {
                for (c, s) in all_nodes(chart, *child) {
                    out.push((
                        DerivNode::Unary {
                            rule: *rule,
                            cat: item.cat.clone(),
                            span: r.span,
                            child: Box::new(c),
                        },
                        s,
                    ));
                }
            }
            Backpointer::Binary { rule, left, right } => {
                let ls = all_nodes(chart, *left);
                let rs = all_nodes(chart, *right);
                for (l, lscore) in &ls {
                    for (rr, rscore) in &rs {
                        out.push((
                            DerivNode::Binary {
                                rule: *rule,
                                cat: item.cat.clone(),
                                span: r.span,
                                left: Box::new(l.clone()),
                                right: Box::new(rr.clone()),
                            },
                            lscore + rscore,
                        ));
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Pretty printing

struct Canvas {
    rows: Vec<Vec<char>>,
}

impl Canvas {
    fn put(&mut self, row: usize, col: usize, text: &str) {
        while self.rows.len() <= row {
            self.rows.push(Vec::new());
        }
        let line = &mut self.rows[row];
        let chars: Vec<char> = text.chars().collect();
        if line.len() < col + chars.len() {
            line.resize(col + chars.len(), ' ');
        }
        line[col..col + chars.len()].copy_from_slice(&chars);
    }

    fn render(&self) -> String {
        self.rows
            .iter()
            .map(|r| r.iter().collect::<String>().trim_end().to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn pretty(d: &Derivation) -> String {
    const GAP: usize = 2;
    let mut leaves = Vec::new();
    d.root.collect_leaves(&mut leaves);

    // Leaf content widths.
    let mut widths: Vec<usize> = leaves
        .iter()
        .map(|n| match n {
            DerivNode::Leaf { item, .. } => item
                .phrase_text()
                .chars()
                .count()
                .max(item.cat.syn.to_string().chars().count())
                .max(item.cat.sem.to_string().chars().count()),
            _ => unreachable!(),
        })
        .collect();

    // Map spans to leaf ranges: leaves are in sentence order.
    let leaf_range = |span: (usize, usize)| -> (usize, usize) {
        let first = leaves
            .iter()
            .position(|n| n.span().0 == span.0)
            .expect("span aligns with a leaf");
        let last = leaves
            .iter()
            .position(|n| n.span().1 == span.1)
            .expect("span aligns with a leaf");
        (first, last)
    };

    // Grow the rightmost leaf of each constituent so its category and
    // semantics lines fit inside its span. Inner constituents first.
    let mut nodes: Vec<&DerivNode> = Vec::new();
    collect_internal(&d.root, &mut nodes);
    nodes.sort_by_key(|n| n.height());
    for node in &nodes {
        let (first, last) = leaf_range(node.span());
        let have: usize =
            widths[first..=last].iter().sum::<usize>() + GAP * (last - first);
        let cat = node.category();
        let need = cat
            .syn
            .to_string()
            .chars()
            .count()
            .max(cat.sem.to_string().chars().count())
            .max(4);
        if have < need {
            widths[last] += need - have;
        }
    }

    let mut starts = Vec::with_capacity(widths.len());
    let mut col = 0;
    for w in &widths {
        starts.push(col);
        col += w + GAP;
    }

    let mut canvas = Canvas { rows: Vec::new() };
    for (i, leaf) in leaves.iter().enumerate() {
        if let DerivNode::Leaf { item, .. } = leaf {
            canvas.put(0, starts[i], &item.phrase_text());
            canvas.put(1, starts[i], &item.cat.syn.to_string());
            canvas.put(2, starts[i], &item.cat.sem.to_string());
        }
    }

    for node in &nodes {
        let h = node.height();
        let base = 3 * h;
        let (first, last) = leaf_range(node.span());
        let start = starts[first];
        let end = starts[last] + widths[last];
        let rule = match node {
            DerivNode::Unary { rule, .. } | DerivNode::Binary { rule, .. } => *rule,
            DerivNode::Leaf { .. } => unreachable!(),
        };
        let arrow = rule.arrow();
        let dashes = (end - start).saturating_sub(arrow.chars().count());
        let mut line = "-".repeat(dashes);
        line.push_str(arrow);
        canvas.put(base, start, &line);
        let cat = node.category();
        canvas.put(base + 1, start, &cat.syn.to_string());
        canvas.put(base + 2, start, &cat.sem.to_string());
    }

    canvas.render()
}

fn collect_internal<'a>(node: &'a DerivNode, out: &mut Vec<&'a DerivNode>) {
    match node {
        DerivNode::Leaf { .. } => {}
        DerivNode::Unary { child, .. } => {
            collect_internal(child, out);
            out.push(node);
        }
        DerivNode::Binary { left, right, .. } => {
            collect_internal(left, out);
            collect_internal(right, out);
            out.push(node);
        }
    }
}
