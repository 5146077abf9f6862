//! Categories: a syntactic type paired with a lambda-term semantics.

use std::fmt;

use crate::lambda::{canonical_form, type_of, SemType, Term, TypeError};

use super::syncat::{Atom, SynCat};

/// The `A : f` pairing of a syntactic category with its semantics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Category {
    pub syn: SynCat,
    pub sem: Term,
}

impl Category {
    pub fn new(syn: SynCat, sem: Term) -> Self {
        Category { syn, sem }
    }

    /// Builds a category with its semantics normalized and canonicalized,
    /// so alphabetic variants compare equal.
    pub fn canonical(syn: SynCat, sem: &Term) -> Self {
        Category { syn, sem: canonical_form(sem) }
    }

    /// Checks the fixed syntax-to-semantics type mapping: S carries t,
    /// ⟨e,t⟩ or r (wh- and numeric questions relax S), NP carries an
    /// entity, N a set, and a slash category A/B or A\B carries
    /// ⟨type(B), type(A)⟩. Each occurrence of S instantiates
    /// independently.
    pub fn check_types(&self) -> Result<(), TypeError> {
        let ty = type_of(&self.sem)?;
        if syn_matches(&self.syn, &ty) {
            Ok(())
        } else {
            Err(TypeError::Expected {
                context: "category semantics",
                expected: "type consistent with the syntactic category",
                found: format!("{} : {}", self.syn, ty),
            })
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.syn, self.sem)
    }
}

/// True when `ty` is an admissible semantic type for `syn`.
pub fn syn_matches(syn: &SynCat, ty: &SemType) -> bool {
    match syn {
        SynCat::Atom(Atom::S) => matches!(
            ty,
            SemType::Truth | SemType::Real
        ) || is_set_type(ty),
        SynCat::Atom(Atom::Np) => ty.is_entity(),
        SynCat::Atom(Atom::N) => is_set_type(ty),
        SynCat::Forward(res, arg) | SynCat::Backward(res, arg) => match ty {
            SemType::Func(a, r) => syn_matches(arg, a) && syn_matches(res, r),
            _ => false,
        },
    }
}

fn is_set_type(ty: &SemType) -> bool {
    matches!(ty, SemType::Func(a, r) if a.is_entity() && **r == SemType::Truth)
}
