//! The axiomatic equivalence checker.
//!
//! Equivalence of two typed terms is approached by rewriting: both
//! sides are normalized with the equational policy (which also works
//! inside thunks), then a set of oriented extensional laws is applied
//! to a fixpoint:
//!
//! * `[!u] -> u` for a value `u`,
//! * `\x. u x -> u` for a value `u` not mentioning `x`,
//! * `<fst u, snd u> -> u` for a value `u`,
//! * `(\x. x) s -> s` for any `s`,
//! * any value of type `T` collapses to `star`.
//!
//! Syntactically identical results mean the terms are provably equal.
//! Distinct results refute equality only when both sides are rigid
//! linear combinations at an observable type, where distinct canonical
//! forms denote distinct elements under some valuation. Everything
//! else is reported as unknown: the checker is sound in both
//! directions but deliberately incomplete.

use crate::canon::{canonicalize, collect_lincomb};
use crate::rewrite::{normalize_capped, Policy, Step};
use crate::term::{Term, Type};
use crate::types::{infer, Ctx};
use crate::Mode;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    NotEqual,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equal => write!(f, "equal"),
            Verdict::NotEqual => write!(f, "notequal"),
            Verdict::Unknown => write!(f, "unknown"),
        }
    }
}

/// Outcome of an equivalence check, with the reduced forms of both
/// sides as evidence.
#[derive(Debug, Clone)]
pub struct EqReport {
    pub verdict: Verdict,
    pub left_normal: Term,
    pub right_normal: Term,
    pub left_trace: Vec<Step>,
    pub right_trace: Vec<Step>,
    pub reason: String,
}

/// Values headed by an introduction form. The extensional laws are
/// sound for these: their value denotation is structural. A value
/// headed by an application or projection has no such reading (its
/// computation may be a proper sum), so it is excluded even though
/// the operational value grammar admits it.
fn canonical_value(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Star | Term::True | Term::False | Term::NZero => true,
        Term::Lam(..) | Term::Thunk(_) => true,
        Term::Pair(a, b) => canonical_value(a) && canonical_value(b),
        Term::Succ(u) => canonical_value(u),
        _ => false,
    }
}

/// One oriented extensional rewrite at the root of `t`, if any. `ty`
/// is the type of `t` when known; it gates the unit collapse.
fn extensional_root(t: &Term, ty: Option<&Type>) -> Option<Term> {
    // a variable of the unit type collapses to star; other unit-typed
    // canonical values are already star
    if ty == Some(&Type::Top) && matches!(t, Term::Var(_)) {
        return Some(Term::Star);
    }
    match t {
        // [!u] -> u
        Term::Thunk(inner) => match inner.as_ref() {
            Term::Force(u) if canonical_value(u) => Some(u.as_ref().clone()),
            _ => None,
        },
        // \x. u x -> u
        Term::Lam(x, _, body) => match body.as_ref() {
            Term::App(u, arg) => match arg.as_ref() {
                Term::Var(y) if y == x && canonical_value(u) && !u.free_vars().contains(x) => {
                    Some(u.as_ref().clone())
                }
                _ => None,
            },
            _ => None,
        },
        // <fst u, snd u> -> u
        Term::Pair(a, b) => match (a.as_ref(), b.as_ref()) {
            (Term::Fst(u), Term::Snd(v)) if u.alpha_eq(v) && canonical_value(u) => {
                Some(u.as_ref().clone())
            }
            _ => None,
        },
        // (\x. x) s -> s
        Term::App(f, s) => match f.as_ref() {
            Term::Lam(x, _, body) if matches!(body.as_ref(), Term::Var(y) if y == x) => {
                Some(s.as_ref().clone())
            }
            _ => None,
        },
        _ => None,
    }
}

/// The type of `t`, either as pushed down or by inference.
fn resolve_ty(ctx: &Ctx, t: &Term, pushed: Option<Type>) -> Option<Type> {
    pushed.or_else(|| infer(ctx, t).ok())
}

/// One bottom-up sweep of the oriented extensional laws, threading
/// expected types down for the unit collapse.
fn extensional_pass(ctx: &Ctx, t: &Term, pushed: Option<Type>) -> Term {
    let ty = resolve_ty(ctx, t, pushed);
    let rebuilt = match t {
        Term::Var(_)
        | Term::Star
        | Term::True
        | Term::False
        | Term::NZero
        | Term::Zero(_) => t.clone(),
        Term::Lam(x, ann, body) => {
            let dom = ann.clone().or_else(|| match &ty {
                Some(Type::Arrow(d, _)) => Some(d.as_ref().clone()),
                _ => None,
            });
            let cod = match &ty {
                Some(Type::Arrow(_, c)) => Some(c.as_ref().clone()),
                _ => None,
            };
            let mut inner = ctx.clone();
            match &dom {
                Some(d) => {
                    inner.insert(x.clone(), d.clone());
                }
                None => {
                    inner.remove(x);
                }
            }
            Term::Lam(x.clone(), ann.clone(), Box::new(extensional_pass(&inner, body, cod)))
        }
        Term::App(f, a) => {
            let f_ty = infer(ctx, f).ok();
            let a_ty = match &f_ty {
                Some(Type::Arrow(d, _)) => Some(d.as_ref().clone()),
                _ => None,
            };
            Term::app(extensional_pass(ctx, f, f_ty), extensional_pass(ctx, a, a_ty))
        }
        Term::Pair(a, b) => {
            let (l, r) = match &ty {
                Some(Type::Prod(l, r)) => (Some(l.as_ref().clone()), Some(r.as_ref().clone())),
                _ => (None, None),
            };
            Term::pair(extensional_pass(ctx, a, l), extensional_pass(ctx, b, r))
        }
        Term::Fst(p) => Term::fst(extensional_pass(ctx, p, infer(ctx, p).ok())),
        Term::Snd(p) => Term::snd(extensional_pass(ctx, p, infer(ctx, p).ok())),
        Term::Sum(a, b) => Term::sum(
            extensional_pass(ctx, a, ty.clone()),
            extensional_pass(ctx, b, ty.clone()),
        ),
        Term::Scale(k, s) => Term::scale(k.clone(), extensional_pass(ctx, s, ty.clone())),
        Term::Thunk(r) => {
            let inner = match &ty {
                Some(Type::M(a)) => Some(a.as_ref().clone()),
                _ => None,
            };
            Term::thunk(extensional_pass(ctx, r, inner))
        }
        Term::Force(s) => {
            let inner = ty.clone().map(Type::m);
            Term::force(extensional_pass(ctx, s, inner))
        }
        Term::Y(s) => {
            let inner = ty
                .clone()
                .map(|a| Type::arrow(Type::m(a.clone()), Type::m(a)));
            Term::fix(extensional_pass(ctx, s, inner))
        }
        Term::Succ(s) => Term::succ(extensional_pass(ctx, s, Some(Type::Int))),
        Term::Pred(s) => Term::pred(extensional_pass(ctx, s, Some(Type::Int))),
        Term::IsZero(s) => Term::iszero(extensional_pass(ctx, s, Some(Type::Int))),
        Term::If(c, a, b) => Term::ite(
            extensional_pass(ctx, c, Some(Type::Bit)),
            extensional_pass(ctx, a, ty.clone()),
            extensional_pass(ctx, b, ty.clone()),
        ),
        Term::Ascribe(s, a) => extensional_pass(ctx, s, Some(a.clone())),
    };
    let mut out = rebuilt;
    while let Some(next) = extensional_root(&out, ty.as_ref()) {
        out = next;
    }
    out
}

/// Normalize and apply extensional laws until nothing changes.
/// Returns the stable form, the first trace, and whether fuel ran out.
fn stabilize(
    ctx: &Ctx,
    t: &Term,
    ty: &Type,
    mode: Mode,
    fuel: u64,
) -> (Term, Vec<Step>, bool) {
    // cap term growth: a diverging fixpoint grows every unfolding, and
    // each step re-examines the whole term
    let cap = 1024.max(t.size() * 8);
    let first = normalize_capped(t, mode, Policy::equational(), fuel, cap);
    if first.fuel_exhausted {
        return (first.term, first.steps, true);
    }
    let mut current = first.term.clone();
    for _ in 0..64 {
        let swept = extensional_pass(ctx, &current, Some(ty.clone()));
        let renorm = normalize_capped(&swept, mode, Policy::equational(), fuel, cap);
        if renorm.fuel_exhausted {
            return (renorm.term, first.steps, true);
        }
        if renorm.term.alpha_eq(&current) {
            return (current, first.steps, false);
        }
        current = renorm.term;
    }
    (current, first.steps, false)
}

/// Whether a canonical value is rigid: syntactically distinct rigid
/// values denote distinct points under some valuation.
fn rigid_value(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Star | Term::True | Term::False | Term::NZero => true,
        Term::Succ(u) => t.as_numeral().is_some() || rigid_value(u),
        Term::Pair(a, b) => rigid_value(a) && rigid_value(b),
        Term::Thunk(r) => rigid_computation(r),
        _ => false,
    }
}

/// Whether a canonical computation is a linear combination of rigid
/// values.
fn rigid_computation(t: &Term) -> bool {
    let (entries, _) = collect_lincomb(t);
    entries.iter().all(|(_, base)| rigid_value(base))
}

/// Decide axiomatic equivalence of `s` and `t`, both of type `ty`
/// under `ctx`.
pub fn ax_equiv(ctx: &Ctx, s: &Term, t: &Term, ty: &Type, mode: Mode, fuel: u64) -> EqReport {
    let (ls, ltrace, lout) = stabilize(ctx, s, ty, mode, fuel);
    let (rs, rtrace, rout) = stabilize(ctx, t, ty, mode, fuel);
    let report = |verdict, reason: String| EqReport {
        verdict,
        left_normal: ls.clone(),
        right_normal: rs.clone(),
        left_trace: ltrace.clone(),
        right_trace: rtrace.clone(),
        reason,
    };
    if lout || rout {
        return report(
            Verdict::Unknown,
            "normalization did not finish within the step budget".into(),
        );
    }
    let lc = canonicalize(&ls, mode);
    let rc = canonicalize(&rs, mode);
    if lc.alpha_eq(&rc) {
        return report(Verdict::Equal, "both sides reduce to the same form".into());
    }
    if ty.is_observable() && rigid_computation(&lc) && rigid_computation(&rc) {
        return report(
            Verdict::NotEqual,
            "distinct rigid forms at an observable type".into(),
        );
    }
    report(
        Verdict::Unknown,
        "reduced forms differ but are not both rigid at an observable type".into(),
    )
}
