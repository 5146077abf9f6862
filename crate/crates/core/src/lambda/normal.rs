//! Beta-normalization, canonical forms, and logical-form equality.
//!
//! Equality of logical forms is alpha-equivalence modulo the
//! commutativity and associativity of `and`/`or`, nothing deeper.

use super::term::{Term, Var};

/// Reduces every redex and flattens nested `and`/`or`. Terminates on any
/// well-typed input (the language is simply typed) and preserves types.
pub fn normalize(t: &Term) -> Term {
    match t {
        Term::Const(..) | Term::Var(_) => t.clone(),
        Term::Apply(f, a) => {
            let nf = normalize(f);
            let na = normalize(a);
            if let Term::Lambda(v, body) = nf {
                normalize(&body.substitute(&v, &na))
            } else {
                Term::apply(nf, na)
            }
        }
        Term::Lambda(v, b) => Term::lambda(v.clone(), normalize(b)),
        Term::And(cs) => Term::And(flatten(cs, true)),
        Term::Or(cs) => Term::Or(flatten(cs, false)),
        Term::Not(a) => Term::Not(Box::new(normalize(a))),
        Term::Implies(a, b) => Term::Implies(Box::new(normalize(a)), Box::new(normalize(b))),
        Term::Exists(v, b) => Term::Exists(v.clone(), Box::new(normalize(b))),
        Term::Forall(v, b) => Term::Forall(v.clone(), Box::new(normalize(b))),
        Term::Count(a) => Term::Count(Box::new(normalize(a))),
        Term::Argmax(a, b) => Term::Argmax(Box::new(normalize(a)), Box::new(normalize(b))),
        Term::Argmin(a, b) => Term::Argmin(Box::new(normalize(a)), Box::new(normalize(b))),
        Term::Iota(a) => Term::Iota(Box::new(normalize(a))),
    }
}

fn flatten(children: &[Term], conj: bool) -> Vec<Term> {
    let mut out = Vec::with_capacity(children.len());
    for c in children {
        let n = normalize(c);
        match (conj, n) {
            (true, Term::And(inner)) => out.extend(inner),
            (false, Term::Or(inner)) => out.extend(inner),
            (_, other) => out.push(other),
        }
    }
    out
}

/// A total, alpha-invariant sort key: the term printed with de Bruijn
/// indices. Variables bound outside `scope` render by id, so distinct
/// free variables stay distinct.
fn db_key(t: &Term, scope: &mut Vec<u32>, out: &mut String) {
    match t {
        Term::Const(name, ty) => {
            out.push('c');
            out.push_str(name);
            out.push(':');
            out.push_str(&ty.to_string());
        }
        Term::Var(v) => {
            match scope.iter().rev().position(|id| *id == v.id) {
                Some(depth) => {
                    out.push('v');
                    out.push_str(&depth.to_string());
                }
                None => {
                    out.push('f');
                    out.push_str(&v.id.to_string());
                }
            }
        }
        Term::Apply(f, a) => key_node(out, "ap", &[f, a], scope),
        Term::Lambda(v, b) => key_binder(out, "lm", v, b, scope),
        Term::Exists(v, b) => key_binder(out, "ex", v, b, scope),
        Term::Forall(v, b) => key_binder(out, "fa", v, b, scope),
        Term::And(cs) => key_list(out, "an", cs, scope),
        Term::Or(cs) => key_list(out, "or", cs, scope),
        Term::Not(a) => key_node(out, "nt", &[a], scope),
        Term::Implies(a, b) => key_node(out, "im", &[a, b], scope),
        Term::Count(a) => key_node(out, "ct", &[a], scope),
        Term::Argmax(a, b) => key_node(out, "ax", &[a, b], scope),
        Term::Argmin(a, b) => key_node(out, "ai", &[a, b], scope),
        Term::Iota(a) => key_node(out, "io", &[a], scope),
    }
}

fn key_node(out: &mut String, tag: &str, children: &[&Term], scope: &mut Vec<u32>) {
    out.push_str(tag);
    out.push('(');
    for (i, c) in children.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        db_key(c, scope, out);
    }
    out.push(')');
}

fn key_list(out: &mut String, tag: &str, children: &[Term], scope: &mut Vec<u32>) {
    out.push_str(tag);
    out.push('(');
    for (i, c) in children.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        db_key(c, scope, out);
    }
    out.push(')');
}

fn key_binder(out: &mut String, tag: &str, v: &Var, body: &Term, scope: &mut Vec<u32>) {
    out.push_str(tag);
    out.push('[');
    out.push_str(&v.ty.to_string());
    out.push(']');
    scope.push(v.id);
    db_key(body, scope, out);
    scope.pop();
}

/// Alpha-equivalence (exact structure otherwise).
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    let mut ka = String::new();
    let mut kb = String::new();
    db_key(a, &mut Vec::new(), &mut ka);
    db_key(b, &mut Vec::new(), &mut kb);
    ka == kb
}

/// Deterministic canonical form of a normalized term: `and`/`or`
/// children sorted by an alpha-invariant key, then bound variables
/// renumbered in traversal order. Idempotent; canonical terms compare
/// with plain structural equality.
pub fn canonicalize(t: &Term) -> Term {
    let sorted = sort_connectives(t, &mut Vec::new());
    let mut next = 0;
    renumber(&sorted, &mut Vec::new(), &mut next)
}

fn sort_connectives(t: &Term, scope: &mut Vec<u32>) -> Term {
    match t {
        Term::Const(..) | Term::Var(_) => t.clone(),
        Term::Apply(f, a) => {
            Term::apply(sort_connectives(f, scope), sort_connectives(a, scope))
        }
        Term::Lambda(v, b) => {
            scope.push(v.id);
            let b = sort_connectives(b, scope);
            scope.pop();
            Term::lambda(v.clone(), b)
        }
        Term::Exists(v, b) => {
            scope.push(v.id);
            let b = sort_connectives(b, scope);
            scope.pop();
            Term::Exists(v.clone(), Box::new(b))
        }
        Term::Forall(v, b) => {
            scope.push(v.id);
            let b = sort_connectives(b, scope);
            scope.pop();
            Term::Forall(v.clone(), Box::new(b))
        }
        Term::And(cs) => Term::And(sort_children(cs, scope)),
        Term::Or(cs) => Term::Or(sort_children(cs, scope)),
        Term::Not(a) => Term::Not(Box::new(sort_connectives(a, scope))),
        Term::Implies(a, b) => Term::Implies(
            Box::new(sort_connectives(a, scope)),
            Box::new(sort_connectives(b, scope)),
        ),
        Term::Count(a) => Term::Count(Box::new(sort_connectives(a, scope))),
        Term::Argmax(a, b) => Term::Argmax(
            Box::new(sort_connectives(a, scope)),
            Box::new(sort_connectives(b, scope)),
        ),
        Term::Argmin(a, b) => Term::Argmin(
            Box::new(sort_connectives(a, scope)),
            Box::new(sort_connectives(b, scope)),
        ),
        Term::Iota(a) => Term::Iota(Box::new(sort_connectives(a, scope))),
    }
}

fn sort_children(cs: &[Term], scope: &mut Vec<u32>) -> Vec<Term> {
    let mut keyed: Vec<(String, Term)> = cs
        .iter()
        .map(|c| {
            let sorted = sort_connectives(c, scope);
            let mut key = String::new();
            db_key(&sorted, scope, &mut key);
            (key, sorted)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, t)| t).collect()
}

fn renumber(t: &Term, scope: &mut Vec<(u32, u32)>, next: &mut u32) -> Term {
    match t {
        Term::Const(..) => t.clone(),
        Term::Var(v) => {
            let id = scope
                .iter()
                .rev()
                .find(|(old, _)| *old == v.id)
                .map(|(_, new)| *new)
                .unwrap_or(v.id);
            Term::Var(Var::new(id, v.ty.clone()))
        }
        Term::Apply(f, a) => {
            Term::apply(renumber(f, scope, next), renumber(a, scope, next))
        }
        Term::Lambda(v, b) => {
            let (v, b) = renumber_binder(v, b, scope, next);
            Term::Lambda(v, b)
        }
        Term::Exists(v, b) => {
            let (v, b) = renumber_binder(v, b, scope, next);
            Term::Exists(v, b)
        }
        Term::Forall(v, b) => {
            let (v, b) = renumber_binder(v, b, scope, next);
            Term::Forall(v, b)
        }
        Term::And(cs) => Term::And(cs.iter().map(|c| renumber(c, scope, next)).collect()),
        Term::Or(cs) => Term::Or(cs.iter().map(|c| renumber(c, scope, next)).collect()),
        Term::Not(a) => Term::Not(Box::new(renumber(a, scope, next))),
        Term::Implies(a, b) => Term::Implies(
            Box::new(renumber(a, scope, next)),
            Box::new(renumber(b, scope, next)),
        ),
        Term::Count(a) => Term::Count(Box::new(renumber(a, scope, next))),
        Term::Argmax(a, b) => Term::Argmax(
            Box::new(renumber(a, scope, next)),
            Box::new(renumber(b, scope, next)),
        ),
        Term::Argmin(a, b) => Term::Argmin(
            Box::new(renumber(a, scope, next)),
            Box::new(renumber(b, scope, next)),
        ),
        Term::Iota(a) => Term::Iota(Box::new(renumber(a, scope, next))),
    }
}

fn renumber_binder(
    v: &Var,
    body: &Term,
    scope: &mut Vec<(u32, u32)>,
    next: &mut u32,
) -> (Var, Box<Term>) {
    let new = Var::new(*next, v.ty.clone());
    *next += 1;
    scope.push((v.id, new.id));
    let b = renumber(body, scope, next);
    scope.pop();
    (new, Box::new(b))
}

/// Normalize-then-canonicalize; the representative used for all
/// logical-form identity throughout the crate.
pub fn canonical_form(t: &Term) -> Term {
    canonicalize(&normalize(t))
}

/// "Completely correct semantics" equality: alpha-equivalence modulo
/// `and`/`or` order after beta-normalization.
pub fn equivalent(a: &Term, b: &Term) -> bool {
    canonical_form(a) == canonical_form(b)
}
