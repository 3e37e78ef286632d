//! Abstract syntax: types, terms, alpha-equivalence, substitution,
//! the value predicate, and the two termination measures.
//!
//! Named terms are the working representation. Identity questions
//! (equality, ordering, hashing) go through a locally-nameless view
//! so that alpha-equivalent terms are interchangeable everywhere.

use crate::scalar::Scalar;
use num_bigint::BigUint;
use std::collections::BTreeSet;
use std::fmt;

/// Types: base sorts, booleans, naturals, the unit-like top type,
/// arrows, products, and the thunk type `M A` of frozen computations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Base(String),
    Bit,
    Int,
    Top,
    Arrow(Box<Type>, Box<Type>),
    Prod(Box<Type>, Box<Type>),
    M(Box<Type>),
}

impl Type {
    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    pub fn m(a: Type) -> Type {
        Type::M(Box::new(a))
    }

    pub fn base(name: &str) -> Type {
        Type::Base(name.to_string())
    }

    /// Ground types have decidable value equality.
    pub fn is_ground(&self) -> bool {
        matches!(self, Type::Base(_) | Type::Bit | Type::Int | Type::Top)
    }

    /// Observable types: ground types, thunks of observables, and
    /// products of observables. Inequality verdicts are only sound here.
    pub fn is_observable(&self) -> bool {
        match self {
            t if t.is_ground() => true,
            Type::M(a) => a.is_observable(),
            Type::Prod(a, b) => a.is_observable() && b.is_observable(),
            _ => false,
        }
    }

    pub fn contains_arrow(&self) -> bool {
        match self {
            Type::Arrow(..) => true,
            Type::Prod(a, b) => a.contains_arrow() || b.contains_arrow(),
            Type::M(a) => a.contains_arrow(),
            _ => false,
        }
    }
}

/// Terms of the calculus and its PCF-style extension.
///
/// `Thunk` freezes a computation into a duplicable value (written
/// `[s]`), `Force` runs a frozen computation (written `!s`). `Zero`
/// is the empty linear combination; it carries an optional type
/// ascription because it has no principal type on its own.
#[derive(Debug, Clone)]
pub enum Term {
    Var(String),
    Star,
    True,
    False,
    NZero,
    Zero(Option<Type>),
    Lam(String, Option<Type>, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
    Sum(Box<Term>, Box<Term>),
    Scale(Scalar, Box<Term>),
    Thunk(Box<Term>),
    Force(Box<Term>),
    Y(Box<Term>),
    Succ(Box<Term>),
    Pred(Box<Term>),
    IsZero(Box<Term>),
    If(Box<Term>, Box<Term>, Box<Term>),
    Ascribe(Box<Term>, Type),
}

/// Nameless view used for identity: bound variables are de Bruijn
/// indices, free variables keep their names. Declaration order fixes
/// the constructor rank used by the canonical term ordering; atoms
/// sort before binders and other composites.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Nameless {
    BVar(u32),
    FVar(String),
    Star,
    True,
    False,
    NZero,
    Zero,
    Lam(Option<Type>, Box<Nameless>),
    App(Box<Nameless>, Box<Nameless>),
    Pair(Box<Nameless>, Box<Nameless>),
    Fst(Box<Nameless>),
    Snd(Box<Nameless>),
    Sum(Box<Nameless>, Box<Nameless>),
    Scale(Scalar, Box<Nameless>),
    Thunk(Box<Nameless>),
    Force(Box<Nameless>),
    Y(Box<Nameless>),
    Succ(Box<Nameless>),
    Pred(Box<Nameless>),
    IsZero(Box<Nameless>),
    If(Box<Nameless>, Box<Nameless>, Box<Nameless>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn lam(x: &str, ann: Type, body: Term) -> Term {
        Term::Lam(x.to_string(), Some(ann), Box::new(body))
    }

    pub fn lam_untyped(x: &str, body: Term) -> Term {
        Term::Lam(x.to_string(), None, Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn fst(a: Term) -> Term {
        Term::Fst(Box::new(a))
    }

    pub fn snd(a: Term) -> Term {
        Term::Snd(Box::new(a))
    }

    pub fn sum(a: Term, b: Term) -> Term {
        Term::Sum(Box::new(a), Box::new(b))
    }

    pub fn scale(k: Scalar, a: Term) -> Term {
        Term::Scale(k, Box::new(a))
    }

    pub fn thunk(a: Term) -> Term {
        Term::Thunk(Box::new(a))
    }

    pub fn force(a: Term) -> Term {
        Term::Force(Box::new(a))
    }

    pub fn fix(a: Term) -> Term {
        Term::Y(Box::new(a))
    }

    pub fn succ(a: Term) -> Term {
        Term::Succ(Box::new(a))
    }

    pub fn pred(a: Term) -> Term {
        Term::Pred(Box::new(a))
    }

    pub fn iszero(a: Term) -> Term {
        Term::IsZero(Box::new(a))
    }

    pub fn ite(c: Term, t: Term, e: Term) -> Term {
        Term::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn zero() -> Term {
        Term::Zero(None)
    }

    pub fn zero_at(ty: Type) -> Term {
        Term::Zero(Some(ty))
    }

    pub fn numeral(n: u64) -> Term {
        let mut t = Term::NZero;
        for _ in 0..n {
            t = Term::succ(t);
        }
        t
    }

    /// The numeral value of a `succ^k(n0)` chain, if it is one.
    pub fn as_numeral(&self) -> Option<u64> {
        match self {
            Term::NZero => Some(0),
            Term::Succ(t) => t.as_numeral().map(|n| n + 1),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut acc);
        acc
    }

    fn collect_free(&self, bound: &mut Vec<String>, acc: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    acc.insert(x.clone());
                }
            }
            Term::Lam(x, _, b) => {
                bound.push(x.clone());
                b.collect_free(bound, acc);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, acc);
                }
            }
        }
    }

    /// Immediate subterms, in the order used by positions.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_)
            | Term::Star
            | Term::True
            | Term::False
            | Term::NZero
            | Term::Zero(_) => vec![],
            Term::Lam(_, _, b) => vec![b],
            Term::App(f, a) => vec![f, a],
            Term::Pair(a, b) => vec![a, b],
            Term::Fst(a) | Term::Snd(a) => vec![a],
            Term::Sum(a, b) => vec![a, b],
            Term::Scale(_, a) => vec![a],
            Term::Thunk(a) | Term::Force(a) | Term::Y(a) => vec![a],
            Term::Succ(a) | Term::Pred(a) | Term::IsZero(a) => vec![a],
            Term::If(c, t, e) => vec![c, t, e],
            Term::Ascribe(a, _) => vec![a],
        }
    }

    /// Node count, ascriptions not counted.
    pub fn size(&self) -> usize {
        match self {
            Term::Ascribe(a, _) => a.size(),
            _ => 1 + self.children().iter().map(|c| c.size()).sum::<usize>(),
        }
    }

    /// Nameless view. Type ascriptions on terms are erased; binder
    /// annotations are kept, so differently-annotated binders differ.
    pub fn to_nameless(&self) -> Nameless {
        fn go(t: &Term, env: &mut Vec<String>) -> Nameless {
            match t {
                Term::Var(x) => {
                    match env.iter().rev().position(|b| b == x) {
                        Some(i) => Nameless::BVar(i as u32),
                        None => Nameless::FVar(x.clone()),
                    }
                }
                Term::Star => Nameless::Star,
                Term::True => Nameless::True,
                Term::False => Nameless::False,
                Term::NZero => Nameless::NZero,
                Term::Zero(_) => Nameless::Zero,
                Term::Lam(x, ann, b) => {
                    env.push(x.clone());
                    let nb = go(b, env);
                    env.pop();
                    Nameless::Lam(ann.clone(), Box::new(nb))
                }
                Term::App(f, a) => Nameless::App(Box::new(go(f, env)), Box::new(go(a, env))),
                Term::Pair(a, b) => Nameless::Pair(Box::new(go(a, env)), Box::new(go(b, env))),
                Term::Fst(a) => Nameless::Fst(Box::new(go(a, env))),
                Term::Snd(a) => Nameless::Snd(Box::new(go(a, env))),
                Term::Sum(a, b) => Nameless::Sum(Box::new(go(a, env)), Box::new(go(b, env))),
                Term::Scale(k, a) => Nameless::Scale(k.clone(), Box::new(go(a, env))),
                Term::Thunk(a) => Nameless::Thunk(Box::new(go(a, env))),
                Term::Force(a) => Nameless::Force(Box::new(go(a, env))),
                Term::Y(a) => Nameless::Y(Box::new(go(a, env))),
                Term::Succ(a) => Nameless::Succ(Box::new(go(a, env))),
                Term::Pred(a) => Nameless::Pred(Box::new(go(a, env))),
                Term::IsZero(a) => Nameless::IsZero(Box::new(go(a, env))),
                Term::If(c, t1, t2) => Nameless::If(
                    Box::new(go(c, env)),
                    Box::new(go(t1, env)),
                    Box::new(go(t2, env)),
                ),
                Term::Ascribe(a, _) => go(a, env),
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.to_nameless() == other.to_nameless()
    }

    /// Canonical total order on alpha-classes, used to sort the
    /// entries of canonical linear combinations.
    pub fn term_cmp(&self, other: &Term) -> std::cmp::Ordering {
        self.to_nameless().cmp(&other.to_nameless())
    }

    /// Capture-avoiding substitution of `v` for the free variable `x`.
    pub fn subst(&self, x: &str, v: &Term) -> Term {
        match self {
            Term::Var(y) => {
                if y == x {
                    v.clone()
                } else {
                    self.clone()
                }
            }
            Term::Lam(y, ann, b) => {
                if y == x {
                    self.clone()
                } else if v.free_vars().contains(y) && b.free_vars().contains(x) {
                    let mut avoid = v.free_vars();
                    avoid.extend(b.free_vars());
                    avoid.insert(x.to_string());
                    let fresh = fresh_name(y, &avoid);
                    let renamed = b.subst(y, &Term::Var(fresh.clone()));
                    Term::Lam(fresh, ann.clone(), Box::new(renamed.subst(x, v)))
                } else {
                    Term::Lam(y.clone(), ann.clone(), Box::new(b.subst(x, v)))
                }
            }
            Term::App(f, a) => Term::app(f.subst(x, v), a.subst(x, v)),
            Term::Pair(a, b) => Term::pair(a.subst(x, v), b.subst(x, v)),
            Term::Fst(a) => Term::fst(a.subst(x, v)),
            Term::Snd(a) => Term::snd(a.subst(x, v)),
            Term::Sum(a, b) => Term::sum(a.subst(x, v), b.subst(x, v)),
            Term::Scale(k, a) => Term::scale(k.clone(), a.subst(x, v)),
            Term::Thunk(a) => Term::thunk(a.subst(x, v)),
            Term::Force(a) => Term::force(a.subst(x, v)),
            Term::Y(a) => Term::fix(a.subst(x, v)),
            Term::Succ(a) => Term::succ(a.subst(x, v)),
            Term::Pred(a) => Term::pred(a.subst(x, v)),
            Term::IsZero(a) => Term::iszero(a.subst(x, v)),
            Term::If(c, t, e) => Term::ite(c.subst(x, v), t.subst(x, v), e.subst(x, v)),
            Term::Ascribe(a, ty) => Term::Ascribe(Box::new(a.subst(x, v)), ty.clone()),
            Term::Star | Term::True | Term::False | Term::NZero | Term::Zero(_) => self.clone(),
        }
    }

    /// Drop all term-level type ascriptions (binder annotations stay).
    pub fn strip_ascriptions(&self) -> Term {
        match self {
            Term::Ascribe(a, ty) => match a.as_ref() {
                // An ascribed empty sum keeps its type in the node itself.
                Term::Zero(_) => Term::Zero(Some(ty.clone())),
                _ => a.strip_ascriptions(),
            },
            Term::Var(_) | Term::Star | Term::True | Term::False | Term::NZero | Term::Zero(_) => {
                self.clone()
            }
            Term::Lam(x, ann, b) => {
                Term::Lam(x.clone(), ann.clone(), Box::new(b.strip_ascriptions()))
            }
            Term::App(f, a) => Term::app(f.strip_ascriptions(), a.strip_ascriptions()),
            Term::Pair(a, b) => Term::pair(a.strip_ascriptions(), b.strip_ascriptions()),
            Term::Fst(a) => Term::fst(a.strip_ascriptions()),
            Term::Snd(a) => Term::snd(a.strip_ascriptions()),
            Term::Sum(a, b) => Term::sum(a.strip_ascriptions(), b.strip_ascriptions()),
            Term::Scale(k, a) => Term::scale(k.clone(), a.strip_ascriptions()),
            Term::Thunk(a) => Term::thunk(a.strip_ascriptions()),
            Term::Force(a) => Term::force(a.strip_ascriptions()),
            Term::Y(a) => Term::fix(a.strip_ascriptions()),
            Term::Succ(a) => Term::succ(a.strip_ascriptions()),
            Term::Pred(a) => Term::pred(a.strip_ascriptions()),
            Term::IsZero(a) => Term::iszero(a.strip_ascriptions()),
            Term::If(c, t, e) => Term::ite(
                c.strip_ascriptions(),
                t.strip_ascriptions(),
                e.strip_ascriptions(),
            ),
        }
    }

    /// Values are the duplicable terms: variables, abstractions with
    /// value bodies, applications and pairs of values, projections of
    /// values, the unit, and any frozen computation. Sums, weights,
    /// the empty sum and forces are computations. The arithmetic
    /// heads count as values exactly when no head rule can fire.
    pub fn is_value(&self) -> bool {
        match self {
            Term::Var(_) | Term::Star | Term::True | Term::False | Term::NZero => true,
            Term::Thunk(_) => true,
            Term::Lam(_, _, b) => b.is_value(),
            Term::App(f, a) => f.is_value() && a.is_value(),
            Term::Pair(a, b) => a.is_value() && b.is_value(),
            Term::Fst(a) | Term::Snd(a) => a.is_value(),
            Term::Succ(a) => a.is_value(),
            Term::Pred(a) => a.is_value() && !matches!(a.as_ref(), Term::Succ(_)),
            Term::IsZero(a) => {
                a.is_value()
                    && !matches!(a.as_ref(), Term::Succ(_))
                    && !matches!(a.as_ref(), Term::NZero)
            }
            Term::Sum(..) | Term::Scale(..) | Term::Zero(_) | Term::Force(_) | Term::Y(_) => false,
            Term::If(..) => false,
            Term::Ascribe(..) => false,
        }
    }

    /// First measure: counts potential duplications. Strictly
    /// decreases on every linearity step and never increases on the
    /// others; sums weigh `1 + np + np` so splitting a sum out of a
    /// context shrinks the measure.
    pub fn np(&self) -> BigUint {
        let one = BigUint::from(1u8);
        let two = BigUint::from(2u8);
        match self {
            Term::Var(_)
            | Term::Star
            | Term::True
            | Term::False
            | Term::NZero
            | Term::Zero(_) => one,
            Term::Lam(_, _, b) => two * b.np(),
            Term::Fst(a) | Term::Snd(a) => two * a.np(),
            Term::Scale(_, a) => two * a.np(),
            Term::Thunk(a) | Term::Force(a) | Term::Y(a) => two * a.np(),
            Term::Succ(a) | Term::Pred(a) | Term::IsZero(a) => two * a.np(),
            Term::App(f, a) => two * f.np() * a.np(),
            Term::Pair(a, b) => two * a.np() * b.np(),
            Term::Sum(a, b) => one + a.np() + b.np(),
            Term::If(c, t, e) => two * c.np() * t.np() * e.np(),
            Term::Ascribe(a, _) => a.np(),
        }
    }

    /// Second measure: breaks ties among weight-shuffling steps.
    /// Weights cost `1 + cx` while every other composite multiplies,
    /// so pushing a weight outward strictly shrinks `cx` even deep
    /// inside a context.
    pub fn cx(&self) -> BigUint {
        let one = BigUint::from(1u8);
        let two = BigUint::from(2u8);
        match self {
            Term::Var(_)
            | Term::Star
            | Term::True
            | Term::False
            | Term::NZero
            | Term::Zero(_) => one,
            Term::Lam(_, _, b) => two * b.cx(),
            Term::Fst(a) | Term::Snd(a) => two * a.cx(),
            Term::Scale(_, a) => one + a.cx(),
            Term::Thunk(a) | Term::Force(a) | Term::Y(a) => two * a.cx(),
            Term::Succ(a) | Term::Pred(a) | Term::IsZero(a) => two * a.cx(),
            Term::App(f, a) => two * f.cx() * a.cx(),
            Term::Pair(a, b) => two * a.cx() * b.cx(),
            Term::Sum(a, b) => two * a.cx() * b.cx(),
            Term::If(c, t, e) => two * c.cx() * t.cx() * e.cx(),
            Term::Ascribe(a, _) => a.cx(),
        }
    }

    /// Lexicographic termination measure for the linearity rules.
    pub fn measure(&self) -> (BigUint, BigUint) {
        (self.np(), self.cx())
    }
}

pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches('\'');
    let stem = if stem.is_empty() { "x" } else { stem };
    let mut candidate = format!("{stem}'");
    while avoid.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

/// Positions address subterms by child index from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Position(pub Vec<u32>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn child(&self, i: u32) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "root")
        } else {
            let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl Term {
    pub fn subterm_at(&self, pos: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in &pos.0 {
            t = *t.children().get(i as usize)?;
        }
        Some(t)
    }

    /// Replace the subterm at `pos`. Panics on out-of-range positions;
    /// callers only use positions they enumerated on the same term.
    pub fn replace_at(&self, pos: &Position, new: Term) -> Term {
        fn go(t: &Term, path: &[u32], new: Term) -> Term {
            let Some((&i, rest)) = path.split_first() else {
                return new;
            };
            let rebuild = |k: usize, repl: Term, t: &Term| -> Term {
                let mut kids: Vec<Term> = t.children().into_iter().cloned().collect();
                kids[k] = repl;
                match t {
                    Term::Lam(x, ann, _) => {
                        Term::Lam(x.clone(), ann.clone(), Box::new(kids.remove(0)))
                    }
                    Term::App(..) => Term::app(kids.remove(0), kids.remove(0)),
                    Term::Pair(..) => Term::pair(kids.remove(0), kids.remove(0)),
                    Term::Fst(_) => Term::fst(kids.remove(0)),
                    Term::Snd(_) => Term::snd(kids.remove(0)),
                    Term::Sum(..) => Term::sum(kids.remove(0), kids.remove(0)),
                    Term::Scale(s, _) => Term::scale(s.clone(), kids.remove(0)),
                    Term::Thunk(_) => Term::thunk(kids.remove(0)),
                    Term::Force(_) => Term::force(kids.remove(0)),
                    Term::Y(_) => Term::fix(kids.remove(0)),
                    Term::Succ(_) => Term::succ(kids.remove(0)),
                    Term::Pred(_) => Term::pred(kids.remove(0)),
                    Term::IsZero(_) => Term::iszero(kids.remove(0)),
                    Term::If(..) => Term::ite(kids.remove(0), kids.remove(0), kids.remove(0)),
                    Term::Ascribe(_, ty) => Term::Ascribe(Box::new(kids.remove(0)), ty.clone()),
                    _ => unreachable!("atom has no children"),
                }
            };
            let child = t.children()[i as usize];
            let repl = go(child, rest, new);
            rebuild(i as usize, repl, t)
        }
        go(self, &pos.0, new)
    }
}
