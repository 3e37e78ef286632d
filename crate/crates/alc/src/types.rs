//! Type inference and checking.
//!
//! Inference requires binder annotations; checking propagates an
//! expected type through the value and combination constructs, so
//! unannotated binders and bare empty sums are accepted wherever the
//! context pins their type down. Weights and sums are transparent:
//! all summands share the type of the combination.

use crate::term::{Term, Type};
use std::collections::BTreeMap;

pub type Ctx = BTreeMap<String, Type>;

pub fn ctx_of(pairs: &[(String, Type)]) -> Ctx {
    pairs.iter().cloned().collect()
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum TypeError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("type mismatch at `{at}`: expected {expected}, found {found}")]
    Mismatch { expected: Type, found: Type, at: String },
    #[error("`{at}` is applied to an argument but has non-function type {found}")]
    NotAFunction { found: Type, at: String },
    #[error("`{at}` is projected but has non-product type {found}")]
    NotAProduct { found: Type, at: String },
    #[error("`{at}` is forced but has non-thunk type {found}")]
    NotAThunk { found: Type, at: String },
    #[error("fixpoint argument `{at}` must have type M A -> M A, found {found}")]
    BadFixArgument { found: Type, at: String },
    #[error("conditional branches disagree at `{at}`: {then_ty} versus {else_ty}")]
    BranchMismatch { then_ty: Type, else_ty: Type, at: String },
    #[error("cannot infer a type for `{at}`; add an annotation")]
    NeedsAnnotation { at: String },
}

fn at(t: &Term) -> String {
    let s = t.to_string();
    if s.len() > 60 {
        format!("{}...", &s[..57])
    } else {
        s
    }
}

/// Infer the type of `t` under `ctx`.
pub fn infer(ctx: &Ctx, t: &Term) -> Result<Type, TypeError> {
    match t {
        Term::Var(x) => ctx
            .get(x)
            .cloned()
            .ok_or_else(|| TypeError::Unbound(x.clone())),
        Term::Star => Ok(Type::Top),
        Term::True | Term::False => Ok(Type::Bit),
        Term::NZero => Ok(Type::Int),
        Term::Zero(Some(ty)) => Ok(ty.clone()),
        Term::Zero(None) => Err(TypeError::NeedsAnnotation { at: at(t) }),
        Term::Lam(x, Some(a), b) => {
            let mut inner = ctx.clone();
            inner.insert(x.clone(), a.clone());
            let bt = infer(&inner, b)?;
            Ok(Type::arrow(a.clone(), bt))
        }
        Term::Lam(_, None, _) => Err(TypeError::NeedsAnnotation { at: at(t) }),
        Term::App(f, a) => {
            let ft = infer(ctx, f)?;
            match ft {
                Type::Arrow(dom, cod) => {
                    check(ctx, a, &dom)?;
                    Ok(*cod)
                }
                other => Err(TypeError::NotAFunction { found: other, at: at(f) }),
            }
        }
        Term::Pair(a, b) => Ok(Type::prod(infer(ctx, a)?, infer(ctx, b)?)),
        Term::Fst(a) => match infer(ctx, a)? {
            Type::Prod(l, _) => Ok(*l),
            other => Err(TypeError::NotAProduct { found: other, at: at(a) }),
        },
        Term::Snd(a) => match infer(ctx, a)? {
            Type::Prod(_, r) => Ok(*r),
            other => Err(TypeError::NotAProduct { found: other, at: at(a) }),
        },
        Term::Sum(a, b) => {
            // Summands share a type; an uninferable summand (like a
            // bare empty sum) is checked against the other side.
            match infer(ctx, a) {
                Ok(ty) => {
                    check(ctx, b, &ty)?;
                    Ok(ty)
                }
                Err(TypeError::NeedsAnnotation { .. }) => {
                    let ty = infer(ctx, b)?;
                    check(ctx, a, &ty)?;
                    Ok(ty)
                }
                Err(e) => Err(e),
            }
        }
        Term::Scale(_, a) => infer(ctx, a),
        Term::Thunk(s) => Ok(Type::m(infer(ctx, s)?)),
        Term::Force(s) => match infer(ctx, s)? {
            Type::M(a) => Ok(*a),
            other => Err(TypeError::NotAThunk { found: other, at: at(s) }),
        },
        Term::Y(s) => {
            let ft = infer(ctx, s)?;
            match &ft {
                Type::Arrow(dom, cod) if dom == cod => match dom.as_ref() {
                    Type::M(a) => Ok(a.as_ref().clone()),
                    _ => Err(TypeError::BadFixArgument { found: ft.clone(), at: at(s) }),
                },
                _ => Err(TypeError::BadFixArgument { found: ft, at: at(s) }),
            }
        }
        Term::Succ(a) | Term::Pred(a) => {
            check(ctx, a, &Type::Int)?;
            Ok(Type::Int)
        }
        Term::IsZero(a) => {
            check(ctx, a, &Type::Int)?;
            Ok(Type::Bit)
        }
        Term::If(c, a, b) => {
            check(ctx, c, &Type::Bit)?;
            match infer(ctx, a) {
                Ok(ty) => {
                    check(ctx, b, &ty).map_err(|_| TypeError::BranchMismatch {
                        then_ty: ty.clone(),
                        else_ty: infer(ctx, b)
                            .map(|t| t.to_string())
                            .map(Type::Base)
                            .unwrap_or(Type::Base("?".into())),
                        at: at(t),
                    })?;
                    Ok(ty)
                }
                Err(TypeError::NeedsAnnotation { .. }) => {
                    let ty = infer(ctx, b)?;
                    check(ctx, a, &ty)?;
                    Ok(ty)
                }
                Err(e) => Err(e),
            }
        }
        Term::Ascribe(a, ty) => {
            check(ctx, a, ty)?;
            Ok(ty.clone())
        }
    }
}

/// Check `t` against the expected type under `ctx`.
pub fn check(ctx: &Ctx, t: &Term, expected: &Type) -> Result<(), TypeError> {
    match (t, expected) {
        (Term::Zero(None), _) => Ok(()),
        (Term::Zero(Some(ty)), _) => {
            if ty == expected {
                Ok(())
            } else {
                Err(TypeError::Mismatch {
                    expected: expected.clone(),
                    found: ty.clone(),
                    at: at(t),
                })
            }
        }
        (Term::Sum(a, b), _) => {
            check(ctx, a, expected)?;
            check(ctx, b, expected)
        }
        (Term::Scale(_, a), _) => check(ctx, a, expected),
        (Term::Thunk(s), Type::M(inner)) => check(ctx, s, inner),
        (Term::Force(s), _) => check(ctx, s, &Type::m(expected.clone())),
        (Term::Pair(a, b), Type::Prod(l, r)) => {
            check(ctx, a, l)?;
            check(ctx, b, r)
        }
        (Term::Lam(x, None, b), Type::Arrow(dom, cod)) => {
            let mut inner = ctx.clone();
            inner.insert(x.clone(), dom.as_ref().clone());
            check(&inner, b, cod)
        }
        (Term::Lam(x, Some(a), b), Type::Arrow(dom, cod)) => {
            if a != dom.as_ref() {
                return Err(TypeError::Mismatch {
                    expected: dom.as_ref().clone(),
                    found: a.clone(),
                    at: at(t),
                });
            }
            let mut inner = ctx.clone();
            inner.insert(x.clone(), a.clone());
            check(&inner, b, cod)
        }
        (Term::If(c, a, b), _) => {
            check(ctx, c, &Type::Bit)?;
            check(ctx, a, expected)?;
            check(ctx, b, expected)
        }
        (Term::Ascribe(a, ty), _) => {
            if ty == expected {
                check(ctx, a, ty)
            } else {
                Err(TypeError::Mismatch {
                    expected: expected.clone(),
                    found: ty.clone(),
                    at: at(t),
                })
            }
        }
        _ => {
            let found = infer(ctx, t)?;
            if &found == expected {
                Ok(())
            } else {
                Err(TypeError::Mismatch {
                    expected: expected.clone(),
                    found,
                    at: at(t),
                })
            }
        }
    }
}

/// Whether every step of a reduction stays at the original type.
/// Returns the first failing pair, if any.
pub fn find_type_break<'a>(
    ctx: &Ctx,
    original: &Type,
    steps: impl IntoIterator<Item = &'a Term>,
) -> Option<(usize, TypeError)> {
    for (i, t) in steps.into_iter().enumerate() {
        if let Err(e) = check(ctx, t, original) {
            return Some((i, e));
        }
    }
    None
}
