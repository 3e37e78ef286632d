//! Seeded, type-directed generation of well-typed terms.
//!
//! The generator is deterministic in its seed, so any failing corpus
//! term can be reproduced from the seed alone. Generation is directed
//! by the target type: every produced term typechecks in the supplied
//! context, which the property suite re-asserts rather than assumes.
//!
//! Fixpoints are off by default. With them enabled most terms diverge
//! under full normalization, so only the step-local properties
//! (typing, measure) run over that corpus.

use crate::scalar::Scalar;
use crate::term::{Term, Type};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub struct Gen {
    rng: StdRng,
    pub allow_fix: bool,
    fresh: u64,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: StdRng::seed_from_u64(seed), allow_fix: false, fresh: 0 }
    }

    pub fn with_fix(seed: u64) -> Gen {
        Gen { allow_fix: true, ..Gen::new(seed) }
    }

    /// Uniform index below `n`.
    pub fn pick(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    fn fresh_name(&mut self) -> String {
        self.fresh += 1;
        format!("v{}", self.fresh)
    }

    /// A scalar from a small pool mixing integers, ratios, a negative,
    /// an irrational and the imaginary unit.
    pub fn scalar(&mut self) -> Scalar {
        match self.pick(7) {
            0 => Scalar::one(),
            1 => Scalar::int(2),
            2 => Scalar::int(3),
            3 => Scalar::ratio(1, 2),
            4 => Scalar::int(-1),
            5 => Scalar::sqrt2(),
            _ => Scalar::i(),
        }
    }

    /// A random type of bounded depth. Arrows and products shrink the
    /// depth budget; at zero only atoms come out.
    pub fn ty(&mut self, depth: usize) -> Type {
        if depth == 0 {
            return match self.pick(4) {
                0 => Type::Top,
                1 => Type::Bit,
                2 => Type::Int,
                _ => Type::base("u"),
            };
        }
        match self.pick(7) {
            0 => Type::Top,
            1 => Type::Bit,
            2 => Type::Int,
            3 => Type::base("u"),
            4 => Type::arrow(self.ty(depth - 1), self.ty(depth - 1)),
            5 => Type::prod(self.ty(depth - 1), self.ty(depth - 1)),
            _ => Type::m(self.ty(depth - 1)),
        }
    }

    fn vars_of<'c>(ctx: &'c [(String, Type)], want: &Type) -> Vec<&'c str> {
        ctx.iter()
            .filter(|(_, t)| t == want)
            .map(|(x, _)| x.as_str())
            .collect()
    }

    /// The cheapest closed inhabitant of a type: an introduction form
    /// whose subterms are again leaves, or an annotated zero.
    fn leaf(&mut self, ctx: &[(String, Type)], want: &Type) -> Term {
        let vars = Self::vars_of(ctx, want);
        if !vars.is_empty() && self.pick(2) == 0 {
            return Term::var(vars[self.pick(vars.len())]);
        }
        match want {
            Type::Top => Term::Star,
            Type::Bit => {
                if self.pick(2) == 0 {
                    Term::True
                } else {
                    Term::False
                }
            }
            Type::Int => Term::numeral(self.pick(4) as u64),
            Type::Base(_) => Term::zero_at(want.clone()),
            Type::Arrow(a, b) => {
                let x = self.fresh_name();
                let mut inner: Vec<(String, Type)> = ctx.to_vec();
                inner.push((x.clone(), a.as_ref().clone()));
                let body = self.leaf(&inner, b);
                Term::lam(&x, a.as_ref().clone(), body)
            }
            Type::Prod(a, b) => Term::pair(self.leaf(ctx, a), self.leaf(ctx, b)),
            Type::M(a) => Term::thunk(self.leaf(ctx, a)),
        }
    }

    /// A term of the requested type under the context, spending at
    /// most `size` recursive construction steps.
    pub fn term_of(&mut self, ctx: &[(String, Type)], want: &Type, size: usize) -> Term {
        if size == 0 {
            return self.leaf(ctx, want);
        }
        let n = size - 1;
        // Retry until an arm applies to the target type.
        loop {
            match self.pick(12) {
                0 => return self.leaf(ctx, want),
                1 => {
                    return Term::sum(
                        self.term_of(ctx, want, n / 2),
                        self.term_of(ctx, want, n / 2),
                    )
                }
                2 => return Term::scale(self.scalar(), self.term_of(ctx, want, n)),
                3 => {
                    let a = self.ty(1);
                    let f = self.term_of(ctx, &Type::arrow(a.clone(), want.clone()), n / 2);
                    let v = self.term_of(ctx, &a, n / 2);
                    return Term::app(f, v);
                }
                // A planted beta redex, so the corpus always exercises
                // substitution. Falls back to a trivial argument when
                // the drawn type has no closed value.
                4 => {
                    let mut a = self.ty(1);
                    let mut arg = self.value_of(ctx, &a, n / 2);
                    if arg.is_none() {
                        a = Type::Top;
                        arg = Some(Term::Star);
                    }
                    let x = self.fresh_name();
                    let mut inner: Vec<(String, Type)> = ctx.to_vec();
                    inner.push((x.clone(), a.clone()));
                    let body = self.term_of(&inner, want, n / 2);
                    return Term::app(Term::lam(&x, a, body), arg.unwrap());
                }
                5 => {
                    let other = self.ty(1);
                    let (pt, first) = if self.pick(2) == 0 {
                        (Type::prod(want.clone(), other), true)
                    } else {
                        (Type::prod(other, want.clone()), false)
                    };
                    let p = self.term_of(ctx, &pt, n);
                    return if first { Term::fst(p) } else { Term::snd(p) };
                }
                6 => return Term::force(self.term_of(ctx, &Type::m(want.clone()), n)),
                7 => {
                    return Term::ite(
                        self.term_of(ctx, &Type::Bit, n / 3),
                        self.term_of(ctx, want, n / 3),
                        self.term_of(ctx, want, n / 3),
                    )
                }
                8 if *want == Type::Int => {
                    let inner = self.term_of(ctx, &Type::Int, n);
                    return if self.pick(2) == 0 {
                        Term::succ(inner)
                    } else {
                        Term::pred(inner)
                    };
                }
                9 if *want == Type::Bit => {
                    return Term::iszero(self.term_of(ctx, &Type::Int, n))
                }
                10 => return Term::Ascribe(Box::new(self.term_of(ctx, want, n)), want.clone()),
                11 if self.allow_fix => {
                    let m = Type::m(want.clone());
                    let s = self.term_of(ctx, &Type::arrow(m.clone(), m), n);
                    return Term::fix(s);
                }
                _ => continue,
            }
        }
    }

    /// A value of the requested type, or `None` when the type has no
    /// closed value in this context. Lambda bodies must themselves be
    /// values, and the base types have no value introduction at all,
    /// so under an empty context they are uninhabited by values.
    pub fn value_of(&mut self, ctx: &[(String, Type)], want: &Type, size: usize) -> Option<Term> {
        let vars = Self::vars_of(ctx, want);
        if !vars.is_empty() && self.pick(3) == 0 {
            return Some(Term::var(vars[self.pick(vars.len())]));
        }
        let n = size.saturating_sub(1);
        let v = match want {
            Type::Top => Term::Star,
            Type::Bit => {
                if self.pick(2) == 0 {
                    Term::True
                } else {
                    Term::False
                }
            }
            Type::Int => Term::numeral(self.pick(4) as u64),
            Type::Base(_) => Term::var(vars.first()?),
            Type::Arrow(a, b) => {
                let x = self.fresh_name();
                let mut inner: Vec<(String, Type)> = ctx.to_vec();
                inner.push((x.clone(), a.as_ref().clone()));
                let body = self.value_of(&inner, b, n)?;
                Term::lam(&x, a.as_ref().clone(), body)
            }
            Type::Prod(a, b) => {
                Term::pair(self.value_of(ctx, a, n / 2)?, self.value_of(ctx, b, n / 2)?)
            }
            Type::M(a) => Term::thunk(self.term_of(ctx, a, n)),
        };
        Some(v)
    }

    // ---- the evaluation-order source fragment ----

    /// A type of the function fragment: base names and arrows only.
    pub fn fragment_ty(&mut self, depth: usize) -> Type {
        if depth == 0 || self.pick(3) > 0 {
            return if self.pick(2) == 0 {
                Type::base("u")
            } else {
                Type::base("v")
            };
        }
        Type::arrow(self.fragment_ty(depth - 1), self.fragment_ty(depth - 1))
    }

    /// A fragment term of the requested type: variables, annotated
    /// lambdas, applications, sums, scalings and zeros.
    pub fn fragment_term(&mut self, ctx: &[(String, Type)], want: &Type, size: usize) -> Term {
        let vars = Self::vars_of(ctx, want);
        if size == 0 {
            if !vars.is_empty() {
                return Term::var(vars[self.pick(vars.len())]);
            }
            if let Type::Arrow(a, b) = want {
                let x = self.fresh_name();
                let mut inner: Vec<(String, Type)> = ctx.to_vec();
                inner.push((x.clone(), a.as_ref().clone()));
                let body = self.fragment_term(&inner, b, 0);
                return Term::lam(&x, a.as_ref().clone(), body);
            }
            return Term::zero_at(want.clone());
        }
        let n = size - 1;
        loop {
            match self.pick(6) {
                0 => return self.fragment_term(ctx, want, 0),
                1 => {
                    return Term::sum(
                        self.fragment_term(ctx, want, n / 2),
                        self.fragment_term(ctx, want, n / 2),
                    )
                }
                2 => return Term::scale(self.scalar(), self.fragment_term(ctx, want, n)),
                3 => {
                    let a = self.fragment_ty(1);
                    let f = self.fragment_term(ctx, &Type::arrow(a.clone(), want.clone()), n / 2);
                    let v = self.fragment_term(ctx, &a, n / 2);
                    return Term::app(f, v);
                }
                4 if matches!(want, Type::Arrow(..)) => {
                    if let Type::Arrow(a, b) = want {
                        let x = self.fresh_name();
                        let mut inner: Vec<(String, Type)> = ctx.to_vec();
                        inner.push((x.clone(), a.as_ref().clone()));
                        let body = self.fragment_term(&inner, b, n);
                        return Term::lam(&x, a.as_ref().clone(), body);
                    }
                    unreachable!()
                }
                _ => continue,
            }
        }
    }
}

/// Closed terms at assorted observable-ish types, one per seed offset.
pub fn corpus(seed: u64, count: usize, size: usize, allow_fix: bool) -> Vec<(Term, Type)> {
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut g = if allow_fix {
            Gen::with_fix(seed.wrapping_add(k as u64))
        } else {
            Gen::new(seed.wrapping_add(k as u64))
        };
        let ty = match g.pick(8) {
            0 => Type::Top,
            1 => Type::Bit,
            2 => Type::Int,
            3 => Type::m(Type::Top),
            4 => Type::m(Type::Bit),
            5 => Type::m(Type::Int),
            6 => Type::prod(Type::Bit, Type::Int),
            _ => Type::arrow(Type::Bit, Type::Bit),
        };
        let t = g.term_of(&[], &ty, size);
        out.push((t, ty));
    }
    out
}

/// Renames every binder to a fresh name, producing an alpha-variant.
pub fn alpha_variant(t: &Term, counter: &mut u64) -> Term {
    let rec = |s: &Term, c: &mut u64| alpha_variant(s, c);
    match t {
        Term::Lam(x, ann, body) => {
            *counter += 1;
            let nx = format!("{x}_r{counter}");
            let renamed = body.subst(x, &Term::var(&nx));
            Term::Lam(nx, ann.clone(), Box::new(rec(&renamed, counter)))
        }
        Term::Var(_)
        | Term::Star
        | Term::True
        | Term::False
        | Term::NZero
        | Term::Zero(_) => t.clone(),
        Term::App(a, b) => Term::app(rec(a, counter), rec(b, counter)),
        Term::Pair(a, b) => Term::pair(rec(a, counter), rec(b, counter)),
        Term::Fst(a) => Term::fst(rec(a, counter)),
        Term::Snd(a) => Term::snd(rec(a, counter)),
        Term::Sum(a, b) => Term::sum(rec(a, counter), rec(b, counter)),
        Term::Scale(k, a) => Term::scale(k.clone(), rec(a, counter)),
        Term::Thunk(a) => Term::thunk(rec(a, counter)),
        Term::Force(a) => Term::force(rec(a, counter)),
        Term::Y(a) => Term::fix(rec(a, counter)),
        Term::Succ(a) => Term::succ(rec(a, counter)),
        Term::Pred(a) => Term::pred(rec(a, counter)),
        Term::IsZero(a) => Term::iszero(rec(a, counter)),
        Term::If(c, a, b) => Term::ite(rec(c, counter), rec(a, counter), rec(b, counter)),
        Term::Ascribe(a, ty) => Term::Ascribe(Box::new(rec(a, counter)), ty.clone()),
    }
}
