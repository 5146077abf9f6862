//! Typed lambda-calculus expression trees.

use std::collections::BTreeSet;

use super::types::SemType;

/// A typed variable. The id is what binds; the display name is chosen at
/// print time.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub id: u32,
    pub ty: SemType,
}

impl Var {
    pub fn new(id: u32, ty: SemType) -> Self {
        Var { id, ty }
    }
}

/// A logical form: constants, variables, application and abstraction,
/// the logical connectives, quantifiers, and the set operators
/// count/argmax/argmin/iota. `And`/`Or` are n-ary flattened lists.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(String, SemType),
    Var(Var),
    Apply(Box<Term>, Box<Term>),
    Lambda(Var, Box<Term>),
    And(Vec<Term>),
    Or(Vec<Term>),
    Not(Box<Term>),
    Implies(Box<Term>, Box<Term>),
    Exists(Var, Box<Term>),
    Forall(Var, Box<Term>),
    Count(Box<Term>),
    Argmax(Box<Term>, Box<Term>),
    Argmin(Box<Term>, Box<Term>),
    Iota(Box<Term>),
}

impl Term {
    pub fn constant(name: impl Into<String>, ty: SemType) -> Self {
        Term::Const(name.into(), ty)
    }

    pub fn var(v: Var) -> Self {
        Term::Var(v)
    }

    pub fn apply(f: Term, a: Term) -> Self {
        Term::Apply(Box::new(f), Box::new(a))
    }

    /// Curried application of `f` to several arguments.
    pub fn apply_all(f: Term, args: impl IntoIterator<Item = Term>) -> Self {
        args.into_iter().fold(f, Term::apply)
    }

    pub fn lambda(v: Var, body: Term) -> Self {
        Term::Lambda(v, Box::new(body))
    }

    /// Free variables of the term, by id.
    pub fn free_vars(&self) -> BTreeSet<u32> {
        let mut free = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut free);
        free
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn collect_free(&self, bound: &mut Vec<u32>, free: &mut BTreeSet<u32>) {
        match self {
            Term::Const(..) => {}
            Term::Var(v) => {
                if !bound.contains(&v.id) {
                    free.insert(v.id);
                }
            }
            Term::Apply(f, a) => {
                f.collect_free(bound, free);
                a.collect_free(bound, free);
            }
            Term::Lambda(v, b) | Term::Exists(v, b) | Term::Forall(v, b) => {
                bound.push(v.id);
                b.collect_free(bound, free);
                bound.pop();
            }
            Term::And(cs) | Term::Or(cs) => {
                for c in cs {
                    c.collect_free(bound, free);
                }
            }
            Term::Not(a) | Term::Count(a) | Term::Iota(a) => {
                a.collect_free(bound, free)
            }
            Term::Implies(a, b) | Term::Argmax(a, b) | Term::Argmin(a, b) => {
                a.collect_free(bound, free);
                b.collect_free(bound, free);
            }
        }
    }

    /// Largest variable id occurring anywhere (bound or free); 0 when none.
    pub fn max_var_id(&self) -> u32 {
        let mut max = 0;
        self.visit(&mut |t| {
            match t {
                Term::Var(v) => max = max.max(v.id),
                Term::Lambda(v, _) | Term::Exists(v, _) | Term::Forall(v, _) => {
                    max = max.max(v.id)
                }
                _ => {}
            }
        });
        max
    }

    /// Pre-order visit of every subterm, including `self`.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Const(..) | Term::Var(_) => {}
            Term::Apply(a, b) | Term::Implies(a, b) | Term::Argmax(a, b) | Term::Argmin(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::Lambda(_, b) | Term::Exists(_, b) | Term::Forall(_, b) => b.visit(f),
            Term::And(cs) | Term::Or(cs) => {
                for c in cs {
                    c.visit(f);
                }
            }
            Term::Not(a) | Term::Count(a) | Term::Iota(a) => a.visit(f),
        }
    }

    /// All constant occurrences with their carried types (deduplicated).
    pub fn constants(&self) -> BTreeSet<(&str, &SemType)> {
        let mut out = BTreeSet::new();
        self.visit_constants(&mut out);
        out
    }

    fn visit_constants<'a>(&'a self, out: &mut BTreeSet<(&'a str, &'a SemType)>) {
        match self {
            Term::Const(name, ty) => {
                out.insert((name.as_str(), ty));
            }
            Term::Var(_) => {}
            Term::Apply(a, b) | Term::Implies(a, b) | Term::Argmax(a, b) | Term::Argmin(a, b) => {
                a.visit_constants(out);
                b.visit_constants(out);
            }
            Term::Lambda(_, b) | Term::Exists(_, b) | Term::Forall(_, b) => {
                b.visit_constants(out)
            }
            Term::And(cs) | Term::Or(cs) => {
                for c in cs {
                    c.visit_constants(out);
                }
            }
            Term::Not(a) | Term::Count(a) | Term::Iota(a) => a.visit_constants(out),
        }
    }

    /// Capture-avoiding substitution of `value` for free occurrences of
    /// `var`. Binders whose id would capture a free variable of `value`
    /// are renamed.
    pub fn substitute(&self, var: &Var, value: &Term) -> Term {
        let mut fresh = self.max_var_id().max(value.max_var_id()).max(var.id) + 1;
        let value_free = value.free_vars();
        self.subst_rec(var.id, value, &value_free, &mut fresh)
    }

    fn subst_rec(
        &self,
        target: u32,
        value: &Term,
        value_free: &BTreeSet<u32>,
        fresh: &mut u32,
    ) -> Term {
        match self {
            Term::Const(..) => self.clone(),
            Term::Var(v) => {
                if v.id == target {
                    value.clone()
                } else {
                    self.clone()
                }
            }
            Term::Apply(f, a) => Term::apply(
                f.subst_rec(target, value, value_free, fresh),
                a.subst_rec(target, value, value_free, fresh),
            ),
            Term::Lambda(v, b) => {
                let (v, b) = Self::subst_binder(v, b, target, value, value_free, fresh);
                Term::Lambda(v, b)
            }
            Term::Exists(v, b) => {
                let (v, b) = Self::subst_binder(v, b, target, value, value_free, fresh);
                Term::Exists(v, b)
            }
            Term::Forall(v, b) => {
                let (v, b) = Self::subst_binder(v, b, target, value, value_free, fresh);
                Term::Forall(v, b)
            }
            Term::And(cs) => Term::And(
                cs.iter()
                    .map(|c| c.subst_rec(target, value, value_free, fresh))
                    .collect(),
            ),
            Term::Or(cs) => Term::Or(
                cs.iter()
                    .map(|c| c.subst_rec(target, value, value_free, fresh))
                    .collect(),
            ),
            Term::Not(a) => {
                Term::Not(Box::new(a.subst_rec(target, value, value_free, fresh)))
            }
            Term::Implies(a, b) => Term::Implies(
                Box::new(a.subst_rec(target, value, value_free, fresh)),
                Box::new(b.subst_rec(target, value, value_free, fresh)),
            ),
            Term::Count(a) => {
                Term::Count(Box::new(a.subst_rec(target, value, value_free, fresh)))
            }
            Term::Argmax(a, b) => Term::Argmax(
                Box::new(a.subst_rec(target, value, value_free, fresh)),
                Box::new(b.subst_rec(target, value, value_free, fresh)),
            ),
            Term::Argmin(a, b) => Term::Argmin(
                Box::new(a.subst_rec(target, value, value_free, fresh)),
                Box::new(b.subst_rec(target, value, value_free, fresh)),
            ),
            Term::Iota(a) => {
                Term::Iota(Box::new(a.subst_rec(target, value, value_free, fresh)))
            }
        }
    }

    fn subst_binder(
        v: &Var,
        body: &Term,
        target: u32,
        value: &Term,
        value_free: &BTreeSet<u32>,
        fresh: &mut u32,
    ) -> (Var, Box<Term>) {
        if v.id == target {
            // Occurrences below are bound here, not free: stop.
            return (v.clone(), Box::new(body.clone()));
        }
        if value_free.contains(&v.id) {
            // Rename the binder so the incoming free variable is not captured.
            let renamed = Var::new(*fresh, v.ty.clone());
            *fresh += 1;
            let body = body.rename_var(v.id, &renamed);
            let new_body = body.subst_rec(target, value, value_free, fresh);
            (renamed, Box::new(new_body))
        } else {
            (
                v.clone(),
                Box::new(body.subst_rec(target, value, value_free, fresh)),
            )
        }
    }

    /// Replaces free occurrences of variable `old` with variable `new`
    /// (used for binder renaming; `new.id` is always globally fresh).
    fn rename_var(&self, old: u32, new: &Var) -> Term {
        match self {
            Term::Const(..) => self.clone(),
            Term::Var(v) => {
                if v.id == old {
                    Term::Var(new.clone())
                } else {
                    self.clone()
                }
            }
            Term::Apply(f, a) => Term::apply(f.rename_var(old, new), a.rename_var(old, new)),
            Term::Lambda(v, b) => {
                if v.id == old {
                    self.clone()
                } else {
                    Term::Lambda(v.clone(), Box::new(b.rename_var(old, new)))
                }
            }
            Term::Exists(v, b) => {
                if v.id == old {
                    self.clone()
                } else {
                    Term::Exists(v.clone(), Box::new(b.rename_var(old, new)))
                }
            }
            Term::Forall(v, b) => {
                if v.id == old {
                    self.clone()
                } else {
                    Term::Forall(v.clone(), Box::new(b.rename_var(old, new)))
                }
            }
            Term::And(cs) => Term::And(cs.iter().map(|c| c.rename_var(old, new)).collect()),
            Term::Or(cs) => Term::Or(cs.iter().map(|c| c.rename_var(old, new)).collect()),
            Term::Not(a) => Term::Not(Box::new(a.rename_var(old, new))),
            Term::Implies(a, b) => Term::Implies(
                Box::new(a.rename_var(old, new)),
                Box::new(b.rename_var(old, new)),
            ),
            Term::Count(a) => Term::Count(Box::new(a.rename_var(old, new))),
            Term::Argmax(a, b) => Term::Argmax(
                Box::new(a.rename_var(old, new)),
                Box::new(b.rename_var(old, new)),
            ),
            Term::Argmin(a, b) => Term::Argmin(
                Box::new(a.rename_var(old, new)),
                Box::new(b.rename_var(old, new)),
            ),
            Term::Iota(a) => Term::Iota(Box::new(a.rename_var(old, new))),
        }
    }
}
