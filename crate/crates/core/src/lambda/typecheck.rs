//! Type checking for terms.

use thiserror::Error;

use super::term::{Term, Var};
use super::types::SemType;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("unbound variable (id {0})")]
    Unbound(u32),
    #[error("variable occurs at type {used} but is bound at type {bound}")]
    VarMismatch { used: String, bound: String },
    #[error("cannot apply a term of type {func} to an argument of type {arg}")]
    NotApplicable { func: String, arg: String },
    #[error("{context} requires type {expected}, found {found}")]
    Expected {
        context: &'static str,
        expected: &'static str,
        found: String,
    },
}

/// The unique type of a well-formed closed term.
pub fn type_of(t: &Term) -> Result<SemType, TypeError> {
    infer(t, &mut Vec::new())
}

fn expect_set(ty: &SemType, context: &'static str) -> Result<SemType, TypeError> {
    match ty {
        SemType::Func(arg, res) if arg.is_entity() && **res == SemType::Truth => {
            Ok((**arg).clone())
        }
        other => Err(TypeError::Expected {
            context,
            expected: "<e,t>",
            found: other.to_string(),
        }),
    }
}

fn expect_truth(ty: &SemType, context: &'static str) -> Result<(), TypeError> {
    if *ty == SemType::Truth {
        Ok(())
    } else {
        Err(TypeError::Expected { context, expected: "t", found: ty.to_string() })
    }
}

fn infer(t: &Term, env: &mut Vec<(u32, SemType)>) -> Result<SemType, TypeError> {
    match t {
        Term::Const(_, ty) => Ok(ty.clone()),
        Term::Var(v) => {
            let bound = env
                .iter()
                .rev()
                .find(|(id, _)| *id == v.id)
                .map(|(_, ty)| ty.clone())
                .ok_or(TypeError::Unbound(v.id))?;
            if bound == v.ty {
                Ok(bound)
            } else {
                Err(TypeError::VarMismatch {
                    used: v.ty.to_string(),
                    bound: bound.to_string(),
                })
            }
        }
        Term::Apply(f, a) => {
            let ft = infer(f, env)?;
            let at = infer(a, env)?;
            match ft {
                SemType::Func(param, result) if param.accepts(&at) => Ok(*result),
                other => Err(TypeError::NotApplicable {
                    func: other.to_string(),
                    arg: at.to_string(),
                }),
            }
        }
        Term::Lambda(v, b) => {
            let body_ty = infer_under(v, b, env)?;
            Ok(SemType::func(v.ty.clone(), body_ty))
        }
        Term::And(cs) | Term::Or(cs) => {
            for c in cs {
                let ty = infer(c, env)?;
                expect_truth(&ty, "connective operand")?;
            }
            Ok(SemType::Truth)
        }
        Term::Not(a) => {
            expect_truth(&infer(a, env)?, "negation operand")?;
            Ok(SemType::Truth)
        }
        Term::Implies(a, b) => {
            expect_truth(&infer(a, env)?, "implication operand")?;
            expect_truth(&infer(b, env)?, "implication operand")?;
            Ok(SemType::Truth)
        }
        Term::Exists(v, b) | Term::Forall(v, b) => {
            let body_ty = infer_under(v, b, env)?;
            expect_truth(&body_ty, "quantifier body")?;
            Ok(SemType::Truth)
        }
        Term::Count(s) => {
            expect_set(&infer(s, env)?, "count argument")?;
            Ok(SemType::Real)
        }
        Term::Argmax(s, m) | Term::Argmin(s, m) => {
            let elem = expect_set(&infer(s, env)?, "argmax/argmin set")?;
            let mt = infer(m, env)?;
            match &mt {
                SemType::Func(arg, res)
                    if arg.accepts(&elem) && **res == SemType::Real => {}
                other => {
                    return Err(TypeError::Expected {
                        context: "argmax/argmin measure",
                        expected: "<e,r>",
                        found: other.to_string(),
                    })
                }
            }
            Ok(elem)
        }
        Term::Iota(s) => expect_set(&infer(s, env)?, "iota argument"),
    }
}

fn infer_under(
    v: &Var,
    body: &Term,
    env: &mut Vec<(u32, SemType)>,
) -> Result<SemType, TypeError> {
    env.push((v.id, v.ty.clone()));
    let r = infer(body, env);
    env.pop();
    r
}
