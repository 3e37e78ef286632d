//! Canonical forms for linear combinations.
//!
//! Terms are kept in a normal form for the weight laws (zero
//! absorption, weight fusion, distribution of weights over sums,
//! merging of equal summands) and for associativity/commutativity of
//! `+`. Canonicalization applies these laws everywhere in the term,
//! including under binders and inside thunks; it never distributes
//! abstractions, applications or pairs over sums, which is the job of
//! the directed linearity rules.
//!
//! A canonical term is either an empty sum, a single weighted base,
//! or a right-nested sum of weighted bases with pairwise distinct
//! bases sorted in the canonical term order. Bases are never sums,
//! weights or empty sums; weight `1` is left implicit. Strict mode
//! drops weight-zero entries, weak mode keeps them.

use crate::scalar::Scalar;
use crate::term::{Term, Type};
use crate::Mode;

/// Flatten the top-level linear-combination spine of `t` into
/// weighted entries, multiplying through nested weights. Does not
/// recurse into non-spine children. Returns the entries and the
/// first type annotation found on an empty sum, which survives when
/// the whole combination collapses to empty.
pub fn collect_lincomb(t: &Term) -> (Vec<(Scalar, Term)>, Option<Type>) {
    let mut entries = Vec::new();
    let mut ann = None;
    fn go(t: &Term, weight: &Scalar, entries: &mut Vec<(Scalar, Term)>, ann: &mut Option<Type>) {
        match t {
            Term::Sum(a, b) => {
                go(a, weight, entries, ann);
                go(b, weight, entries, ann);
            }
            Term::Scale(k, a) => {
                let w = weight.clone() * k.clone();
                go(a, &w, entries, ann);
            }
            Term::Zero(z) => {
                if ann.is_none() {
                    *ann = z.clone();
                }
            }
            _ => entries.push((weight.clone(), t.clone())),
        }
    }
    go(t, &Scalar::one(), &mut entries, &mut ann);
    (entries, ann)
}

/// Rebuild a term from weighted entries: empty becomes the empty sum,
/// weight `1` is implicit, several entries form a right-nested sum.
pub fn rebuild_lincomb(entries: Vec<(Scalar, Term)>, ann: Option<Type>) -> Term {
    let mut parts: Vec<Term> = entries
        .into_iter()
        .map(|(k, b)| if k.is_one() { b } else { Term::scale(k, b) })
        .collect();
    match parts.len() {
        0 => Term::Zero(ann),
        1 => parts.pop().unwrap(),
        _ => {
            let mut t = parts.pop().unwrap();
            while let Some(p) = parts.pop() {
                t = Term::sum(p, t);
            }
            t
        }
    }
}

/// Merge duplicate bases, sort by the canonical term order, and in
/// strict mode drop weight-zero entries.
pub fn normalize_entries(
    mut entries: Vec<(Scalar, Term)>,
    mode: Mode,
) -> Vec<(Scalar, Term)> {
    entries.sort_by(|(_, a), (_, b)| a.term_cmp(b));
    let mut merged: Vec<(Scalar, Term)> = Vec::new();
    for (k, b) in entries {
        match merged.last_mut() {
            Some((k0, b0)) if b0.alpha_eq(&b) => {
                *k0 = k0.clone() + k;
            }
            _ => merged.push((k, b)),
        }
    }
    if mode.is_strict() {
        merged.retain(|(k, _)| !k.is_zero());
    }
    merged
}

/// Full canonicalization: children first, then the node's own
/// linear-combination spine.
pub fn canonicalize(t: &Term, mode: Mode) -> Term {
    let node = match t {
        Term::Var(_) | Term::Star | Term::True | Term::False | Term::NZero | Term::Zero(_) => {
            t.clone()
        }
        Term::Lam(x, ann, b) => Term::Lam(x.clone(), ann.clone(), Box::new(canonicalize(b, mode))),
        Term::App(f, a) => Term::app(canonicalize(f, mode), canonicalize(a, mode)),
        Term::Pair(a, b) => Term::pair(canonicalize(a, mode), canonicalize(b, mode)),
        Term::Fst(a) => Term::fst(canonicalize(a, mode)),
        Term::Snd(a) => Term::snd(canonicalize(a, mode)),
        Term::Sum(a, b) => Term::sum(canonicalize(a, mode), canonicalize(b, mode)),
        Term::Scale(k, a) => Term::scale(k.clone(), canonicalize(a, mode)),
        Term::Thunk(a) => Term::thunk(canonicalize(a, mode)),
        Term::Force(a) => Term::force(canonicalize(a, mode)),
        Term::Y(a) => Term::fix(canonicalize(a, mode)),
        Term::Succ(a) => Term::succ(canonicalize(a, mode)),
        Term::Pred(a) => Term::pred(canonicalize(a, mode)),
        Term::IsZero(a) => Term::iszero(canonicalize(a, mode)),
        Term::If(c, t1, t2) => Term::ite(
            canonicalize(c, mode),
            canonicalize(t1, mode),
            canonicalize(t2, mode),
        ),
        Term::Ascribe(a, ty) => Term::Ascribe(Box::new(canonicalize(a, mode)), ty.clone()),
    };
    let (entries, ann) = collect_lincomb(&node);
    rebuild_lincomb(normalize_entries(entries, mode), ann)
}

/// Whether `t` is already in canonical form.
pub fn is_canonical(t: &Term, mode: Mode) -> bool {
    canonicalize(t, mode).alpha_eq(t)
}
