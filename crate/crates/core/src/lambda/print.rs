//! Printing of terms in the surface syntax. `parse_term(print(t))` is
//! alpha-equivalent to `t`.

use std::collections::BTreeSet;
use std::fmt;

use super::term::{Term, Var};

const NAME_POOL: &[&str] = &["x", "y", "z", "w", "u", "v", "f", "g", "h", "p", "q"];

struct Namer {
    taken: BTreeSet<String>,
    next_fallback: usize,
}

impl Namer {
    fn new(t: &Term) -> Self {
        // Avoid shadowing any constant that appears in the term.
        let mut taken = BTreeSet::new();
        t.visit(&mut |s| {
            if let Term::Const(name, _) = s {
                taken.insert(name.clone());
            }
        });
        Namer { taken, next_fallback: 0 }
    }

    fn fresh(&mut self) -> String {
        for cand in NAME_POOL {
            if !self.taken.contains(*cand) {
                self.taken.insert(cand.to_string());
                return cand.to_string();
            }
        }
        loop {
            let cand = format!("v{}", self.next_fallback);
            self.next_fallback += 1;
            if !self.taken.contains(&cand) {
                self.taken.insert(cand.clone());
                return cand;
            }
        }
    }
}

struct Printer<'a> {
    out: &'a mut dyn fmt::Write,
    namer: Namer,
    // Innermost scope last; looked up by id.
    scope: Vec<(u32, String)>,
}

impl<'a> Printer<'a> {
    fn lookup(&self, id: u32) -> Option<&str> {
        self.scope
            .iter()
            .rev()
            .find(|(vid, _)| *vid == id)
            .map(|(_, name)| name.as_str())
    }

    fn binder(&mut self, keyword: &str, v: &Var, body: &Term) -> fmt::Result {
        let name = self.fresh_for(v);
        write!(self.out, "{keyword} {name}:{} . ", v.ty)?;
        self.scope.push((v.id, name));
        self.term(body)?;
        self.scope.pop();
        Ok(())
    }

    fn fresh_for(&mut self, _v: &Var) -> String {
        self.namer.fresh()
    }

    fn args(&mut self, terms: &[&Term]) -> fmt::Result {
        write!(self.out, "(")?;
        for (i, t) in terms.iter().enumerate() {
            if i > 0 {
                write!(self.out, ", ")?;
            }
            self.term(t)?;
        }
        write!(self.out, ")")
    }

    fn term(&mut self, t: &Term) -> fmt::Result {
        match t {
            Term::Const(name, _) => write!(self.out, "{name}"),
            Term::Var(v) => match self.lookup(v.id).map(str::to_owned) {
                Some(name) => write!(self.out, "{name}"),
                None => write!(self.out, "_free{}", v.id),
            },
            Term::Apply(..) => {
                // Uncurry the spine: f(a, b, ...).
                let mut head = t;
                let mut rev_args = Vec::new();
                while let Term::Apply(f, a) = head {
                    rev_args.push(a.as_ref());
                    head = f;
                }
                rev_args.reverse();
                match head {
                    Term::Const(..) | Term::Var(_) => self.term(head)?,
                    other => {
                        write!(self.out, "(")?;
                        self.term(other)?;
                        write!(self.out, ")")?;
                    }
                }
                self.args(&rev_args)
            }
            Term::Lambda(v, b) => self.binder("lambda", v, b),
            Term::Exists(v, b) => self.binder("exists", v, b),
            Term::Forall(v, b) => self.binder("forall", v, b),
            Term::And(cs) => {
                write!(self.out, "and")?;
                self.args(&cs.iter().collect::<Vec<_>>())
            }
            Term::Or(cs) => {
                write!(self.out, "or")?;
                self.args(&cs.iter().collect::<Vec<_>>())
            }
            Term::Not(a) => {
                write!(self.out, "not")?;
                self.args(&[a.as_ref()])
            }
            Term::Implies(a, b) => {
                write!(self.out, "implies")?;
                self.args(&[a.as_ref(), b.as_ref()])
            }
            Term::Count(a) => {
                write!(self.out, "count")?;
                self.args(&[a.as_ref()])
            }
            Term::Argmax(a, b) => {
                write!(self.out, "argmax")?;
                self.args(&[a.as_ref(), b.as_ref()])
            }
            Term::Argmin(a, b) => {
                write!(self.out, "argmin")?;
                self.args(&[a.as_ref(), b.as_ref()])
            }
            Term::Iota(a) => {
                write!(self.out, "iota")?;
                self.args(&[a.as_ref()])
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer { out: f, namer: Namer::new(self), scope: Vec::new() };
        p.term(self)
    }
}
