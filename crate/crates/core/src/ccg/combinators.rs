//! The combinatory rules: functional application, first-order
//! composition, and NP type-raising.
//!
//! Applicability is decided purely on the syntactic categories. Once the
//! syntactic sides match, a semantic type failure is a hard error — it
//! signals an ill-formed lexicon, not a benign non-combination.

use std::fmt;

use crate::lambda::{normalize, type_of, SemType, Term, TypeError, Var};

use super::category::Category;
use super::syncat::SynCat;

/// Identifies the rule used at a derivation node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    FwdApply,
    BwdApply,
    FwdCompose,
    BwdCompose,
    FwdRaise,
    BwdRaise,
}

impl RuleId {
    /// Arrow notation used in printed derivations.
    pub fn arrow(self) -> &'static str {
        match self {
            RuleId::FwdApply => "→",
            RuleId::BwdApply => "←",
            RuleId::FwdCompose => "→B",
            RuleId::BwdCompose => "←B",
            RuleId::FwdRaise => "→T",
            RuleId::BwdRaise => "←T",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.arrow())
    }
}

/// Which optional rules participate in parsing. Application is always on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSet {
    pub composition: bool,
    pub type_raising: bool,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet { composition: true, type_raising: false }
    }
}

impl RuleSet {
    /// The binary rules to attempt, in deterministic order.
    pub fn binary_rules(&self) -> &'static [RuleId] {
        if self.composition {
            &[
                RuleId::FwdApply,
                RuleId::BwdApply,
                RuleId::FwdCompose,
                RuleId::BwdCompose,
            ]
        } else {
            &[RuleId::FwdApply, RuleId::BwdApply]
        }
    }
}

/// Runs one binary rule on an adjacent pair.
pub fn combine(
    rule: RuleId,
    left: &Category,
    right: &Category,
) -> Result<Option<Category>, TypeError> {
    match rule {
        RuleId::FwdApply => forward_apply(left, right),
        RuleId::BwdApply => backward_apply(left, right),
        RuleId::FwdCompose => forward_compose(left, right),
        RuleId::BwdCompose => backward_compose(left, right),
        RuleId::FwdRaise | RuleId::BwdRaise => Ok(None),
    }
}

fn finish(
    left: &Category,
    right: &Category,
    syn: SynCat,
    sem: Term,
) -> Result<Option<Category>, TypeError> {
    // The semantics must type-check once the syntax has licensed the
    // combination. Between individually well-typed categories a failure
    // is a benign non-combination: S instantiates loosely (t, ⟨e,t⟩ or
    // r) and entity tags restrict selection, so syntactic equality does
    // not guarantee semantic fit. If either input is itself ill-formed,
    // the failure is a hard error.
    if let Err(err) = type_of(&sem) {
        return if left.check_types().is_ok() && right.check_types().is_ok() {
            Ok(None)
        } else {
            Err(err)
        };
    }
    let cat = Category::new(syn, normalize(&sem));
    debug_assert!(cat.check_types().is_ok(), "ill-typed combinator output {cat}");
    Ok(Some(cat))
}

/// `A/B : f  B : g  ⇒  A : f(g)`
pub fn forward_apply(
    left: &Category,
    right: &Category,
) -> Result<Option<Category>, TypeError> {
    match &left.syn {
        SynCat::Forward(result, arg) if **arg == right.syn => finish(
            left,
            right,
            (**result).clone(),
            Term::apply(left.sem.clone(), right.sem.clone()),
        ),
        _ => Ok(None),
    }
}

/// `B : g  A\B : f  ⇒  A : f(g)`
pub fn backward_apply(
    left: &Category,
    right: &Category,
) -> Result<Option<Category>, TypeError> {
    match &right.syn {
        SynCat::Backward(result, arg) if **arg == left.syn => finish(
            left,
            right,
            (**result).clone(),
            Term::apply(right.sem.clone(), left.sem.clone()),
        ),
        _ => Ok(None),
    }
}

/// `A/B : f  B/C : g  ⇒  A/C : λx.f(g(x))` (first order only).
pub fn forward_compose(
    left: &Category,
    right: &Category,
) -> Result<Option<Category>, TypeError> {
    let (a, b_left) = match &left.syn {
        SynCat::Forward(res, arg) => (res, arg),
        _ => return Ok(None),
    };
    let (b_right, c) = match &right.syn {
        SynCat::Forward(res, arg) => (res, arg),
        _ => return Ok(None),
    };
    if **b_left != **b_right {
        return Ok(None);
    }
    let sem = compose_sem(&left.sem, &right.sem)?;
    finish(left, right, SynCat::forward((**a).clone(), (**c).clone()), sem)
}

/// `B\C : g  A\B : f  ⇒  A\C : λx.f(g(x))` (mirror of forward composition).
pub fn backward_compose(
    left: &Category,
    right: &Category,
) -> Result<Option<Category>, TypeError> {
    let (b_left, c) = match &left.syn {
        SynCat::Backward(res, arg) => (res, arg),
        _ => return Ok(None),
    };
    let (a, b_right) = match &right.syn {
        SynCat::Backward(res, arg) => (res, arg),
        _ => return Ok(None),
    };
    if **b_left != **b_right {
        return Ok(None);
    }
    let sem = compose_sem(&right.sem, &left.sem)?;
    finish(left, right, SynCat::backward((**a).clone(), (**c).clone()), sem)
}

/// λx.f(g(x)) with x typed from g's argument.
fn compose_sem(f: &Term, g: &Term) -> Result<Term, TypeError> {
    let g_ty = type_of(g)?;
    let arg_ty = match g_ty {
        SemType::Func(arg, _) => *arg,
        other => {
            return Err(TypeError::Expected {
                context: "composition operand",
                expected: "a function type",
                found: other.to_string(),
            })
        }
    };
    let x = Var::new(f.max_var_id().max(g.max_var_id()) + 1, arg_ty);
    Ok(Term::lambda(
        x.clone(),
        Term::apply(f.clone(), Term::apply(g.clone(), Term::Var(x))),
    ))
}

/// `NP : f ⇒ S/(S\NP) : λg.g(f)` and the symmetric `S\(S/NP)` variant.
/// Only NP is raised; anything else yields no output.
pub fn type_raise(cat: &Category) -> Vec<(RuleId, Category)> {
    if cat.syn != SynCat::NP {
        return Vec::new();
    }
    let g_fwd = Var::new(
        cat.sem.max_var_id() + 1,
        SemType::func(SemType::entity(), SemType::Truth),
    );
    let sem_fwd = Term::lambda(
        g_fwd.clone(),
        Term::apply(Term::Var(g_fwd), cat.sem.clone()),
    );
    let fwd = Category::new(
        SynCat::forward(SynCat::S, SynCat::backward(SynCat::S, SynCat::NP)),
        normalize(&sem_fwd),
    );
    let bwd = Category::new(
        SynCat::backward(SynCat::S, SynCat::forward(SynCat::S, SynCat::NP)),
        fwd.sem.clone(),
    );
    debug_assert!(fwd.check_types().is_ok());
    debug_assert!(bwd.check_types().is_ok());
    vec![(RuleId::FwdRaise, fwd), (RuleId::BwdRaise, bwd)]
}
