//! Denotational evaluation in two Set-based models.
//!
//! Types denote sets: `T` the one-point set, `bit` booleans, `int`
//! naturals, a base type its named atoms, products pairs, and `A -> B`
//! functions from `A`-values to computations over `B`. A computation
//! over `X` is a weighted table of `X`-values; the two models differ in
//! how they record divergence:
//!
//! * strong model: finite weighted combinations plus an absorbing
//!   `bottom`. Any path through a diverging subcomputation collapses
//!   the whole table to `bottom`, whatever its weight.
//! * weak model: tables `X -> coefficients ∪ {omega}` with a default
//!   for the cofinitely many untouched points. `omega` marks a weight
//!   that grows without bound; it absorbs addition and scaling, even by
//!   zero, so a cancelled diverger stays visibly infected.
//!
//! Tables keep explicitly touched entries apart from the untouched
//! default: a point reached with total weight zero is remembered. Under
//! strict semantics that distinction is meaningless and entries equal
//! to the default are dropped on construction, which makes derived
//! structural equality coincide with element equality in both modes.
//!
//! Fixpoints iterate the defining function: from `bottom` (strong) or
//! the empty table (weak) until the element stabilizes. When the
//! budget runs out the result is approximate and flagged as such: the
//! strong model answers `bottom`, the weak model keeps the coefficients
//! that held steady over a trailing window and marks the rest `omega`.
//! At function types the iterates embed fresh closures and never
//! stabilize, so the last unrolling is returned instead; applying it is
//! exact up to the recursion depth covered by the budget.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::canon::{canonicalize, collect_lincomb};
use crate::scalar::Scalar;
use crate::term::{Nameless, Term, Type};
use crate::types::{infer, Ctx, TypeError};
use crate::rewrite::{normalize, Policy};
use crate::Mode;

/// Which monad interprets computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Finite combinations plus an absorbing bottom element.
    Strong,
    /// Coefficient tables with omega for unbounded weights.
    Weak,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Strong => write!(f, "strong"),
            Model::Weak => write!(f, "weak"),
        }
    }
}

/// A coefficient in the weak model: a scalar, or an unbounded weight.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Coeff {
    Fin(Scalar),
    Omega,
}

impl Coeff {
    pub fn zero() -> Coeff {
        Coeff::Fin(Scalar::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coeff::Fin(s) if s.is_zero())
    }

    fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Fin(a), Coeff::Fin(b)) => Coeff::Fin(a.clone() + b.clone()),
            _ => Coeff::Omega,
        }
    }

    // omega absorbs scaling even by zero: a weight that grew without
    // bound stays unbounded when re-weighted.
    fn scale(&self, by: &Scalar) -> Coeff {
        match self {
            Coeff::Fin(a) => Coeff::Fin(by.clone() * a.clone()),
            Coeff::Omega => Coeff::Omega,
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Fin(s) => write!(f, "{s}"),
            Coeff::Omega => write!(f, "omega"),
        }
    }
}

/// A semantic value: the denotation of a syntactic value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SemValue {
    Unit,
    Bool(bool),
    Nat(u64),
    Atom(String),
    Pair(Box<SemValue>, Box<SemValue>),
    Closure(Closure),
    /// A suspended computation, the denotation of a thunk.
    Mod(Box<Elem>),
}

impl fmt::Display for SemValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemValue::Unit => write!(f, "star"),
            SemValue::Bool(true) => write!(f, "tt"),
            SemValue::Bool(false) => write!(f, "ff"),
            SemValue::Nat(n) => write!(f, "n{n}"),
            SemValue::Atom(a) => write!(f, "{a}"),
            SemValue::Pair(a, b) => write!(f, "<{a}, {b}>"),
            SemValue::Closure(c) => write!(f, "(\\{}. ...)", c.binder),
            SemValue::Mod(e) => write!(f, "[{e}]"),
        }
    }
}

/// A function value. Identity is the shape of the underlying lambda
/// (nameless, so alpha-variants coincide) together with the captured
/// environment, trimmed to the free variables of the body.
#[derive(Debug, Clone)]
pub struct Closure {
    pub binder: String,
    pub binder_ty: Option<Type>,
    pub body: Term,
    pub env: BTreeMap<String, SemValue>,
    pub tenv: Ctx,
    shape: Nameless,
}

impl Closure {
    fn new(
        binder: &str,
        binder_ty: Option<Type>,
        body: Term,
        env: BTreeMap<String, SemValue>,
        tenv: Ctx,
    ) -> Closure {
        let shape =
            Term::Lam(binder.to_string(), binder_ty.clone(), Box::new(body.clone())).to_nameless();
        Closure { binder: binder.to_string(), binder_ty, body, env, tenv, shape }
    }
}

impl PartialEq for Closure {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.env == other.env
    }
}

impl Eq for Closure {}

impl PartialOrd for Closure {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Closure {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.shape, &self.env).cmp(&(&other.shape, &other.env))
    }
}

/// The denotation of a computation: a weighted table of values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Elem {
    /// Strong-model divergence; absorbs every operation.
    Bottom,
    /// Strong model: a finite weighted combination.
    Fin(BTreeMap<SemValue, Scalar>),
    /// Weak model: touched entries plus a default for untouched points.
    Weak { map: BTreeMap<SemValue, Coeff>, default: Coeff },
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Bottom => write!(f, "bottom"),
            Elem::Fin(map) => {
                if map.is_empty() {
                    return write!(f, "0");
                }
                let parts: Vec<String> = map
                    .iter()
                    .map(|(v, c)| if c.is_one() { format!("{v}") } else { format!("{c}*{v}") })
                    .collect();
                write!(f, "{}", parts.join(" + "))
            }
            Elem::Weak { map, default } => {
                let mut parts: Vec<String> =
                    map.iter().map(|(v, c)| format!("{v} -> {c}")).collect();
                parts.push(format!("_ -> {default}"));
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

/// An environment binding term variables to semantic values.
pub type Env = BTreeMap<String, SemValue>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum DenoteError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("applied a value that is not a function")]
    NotAFunction,
    #[error("projected a value that is not a pair")]
    NotAPair,
    #[error("branched on a value that is not a boolean")]
    NotABool,
    #[error("arithmetic on a value that is not a number")]
    NotANat,
    #[error("forced a value that is not a thunk")]
    NotAThunk,
    #[error("evaluation budget exhausted")]
    Exhausted,
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Outcome of comparing two elements at a type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Compare {
    Equal,
    Different(String),
    Unknown(String),
}

/// Evaluator carrying the semantics mode, the model, and budgets.
///
/// `approx` latches when any result depended on a truncated fixpoint
/// or an unenumerable table; callers treat flagged comparisons as
/// inconclusive rather than as verdicts.
pub struct Evaluator {
    pub mode: Mode,
    pub model: Model,
    /// Fixpoint iterations before giving up on stabilization.
    pub y_budget: u32,
    /// Trailing iterates inspected for per-point stabilization.
    pub window: u32,
    /// Extra integer sample points beyond the built-in small range.
    pub int_points: Vec<u64>,
    pub approx: bool,
    fuel: u64,
}

impl Evaluator {
    pub fn new(mode: Mode, model: Model) -> Evaluator {
        Evaluator {
            mode,
            model,
            y_budget: 64,
            window: 8,
            int_points: Vec::new(),
            approx: false,
            fuel: 2_000_000,
        }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Evaluator {
        self.fuel = fuel;
        self
    }

    fn tick(&mut self) -> Result<(), DenoteError> {
        if self.fuel == 0 {
            return Err(DenoteError::Exhausted);
        }
        self.fuel -= 1;
        Ok(())
    }

    // --- element algebra -------------------------------------------------

    pub fn zero(&self) -> Elem {
        match self.model {
            Model::Strong => Elem::Fin(BTreeMap::new()),
            Model::Weak => Elem::Weak { map: BTreeMap::new(), default: Coeff::zero() },
        }
    }

    pub fn unit(&self, v: SemValue) -> Elem {
        match self.model {
            Model::Strong => Elem::Fin(BTreeMap::from([(v, Scalar::one())])),
            Model::Weak => Elem::Weak {
                map: BTreeMap::from([(v, Coeff::Fin(Scalar::one()))]),
                default: Coeff::zero(),
            },
        }
    }

    // Strict semantics identifies a zero-weight entry with an absent
    // one; weak semantics keeps them apart.
    fn mk_fin(&self, map: BTreeMap<SemValue, Scalar>) -> Elem {
        if self.mode == Mode::Strict {
            Elem::Fin(map.into_iter().filter(|(_, c)| !c.is_zero()).collect())
        } else {
            Elem::Fin(map)
        }
    }

    fn mk_weak(&self, map: BTreeMap<SemValue, Coeff>, default: Coeff) -> Elem {
        if self.mode == Mode::Strict {
            let map = map.into_iter().filter(|(_, c)| *c != default).collect();
            Elem::Weak { map, default }
        } else {
            Elem::Weak { map, default }
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Bottom, _) | (_, Elem::Bottom) => Elem::Bottom,
            (Elem::Fin(m1), Elem::Fin(m2)) => {
                let mut out = m1.clone();
                for (k, c) in m2 {
                    out.entry(k.clone())
                        .and_modify(|e| *e = e.clone() + c.clone())
                        .or_insert_with(|| c.clone());
                }
                self.mk_fin(out)
            }
            (Elem::Weak { map: m1, default: d1 }, Elem::Weak { map: m2, default: d2 }) => {
                let mut out = BTreeMap::new();
                for k in m1.keys().chain(m2.keys()) {
                    let c1 = m1.get(k).cloned().unwrap_or_else(|| d1.clone());
                    let c2 = m2.get(k).cloned().unwrap_or_else(|| d2.clone());
                    out.insert(k.clone(), c1.add(&c2));
                }
                self.mk_weak(out, d1.add(d2))
            }
            _ => unreachable!("elements of different models combined"),
        }
    }

    pub fn scale(&self, by: &Scalar, e: &Elem) -> Elem {
        match e {
            Elem::Bottom => Elem::Bottom,
            Elem::Fin(map) => self.mk_fin(
                map.iter().map(|(k, c)| (k.clone(), by.clone() * c.clone())).collect(),
            ),
            Elem::Weak { map, default } => self.mk_weak(
                map.iter().map(|(k, c)| (k.clone(), c.scale(by))).collect(),
                default.scale(by),
            ),
        }
    }

    // Scaling by a table coefficient, as happens inside bind. An omega
    // weight turns every touched entry to omega, but leaves an
    // untouched zero default alone: points no computation path reaches
    // stay unreached however often the computation is rerun.
    fn scale_coeff(&self, by: &Coeff, e: &Elem) -> Elem {
        match by {
            Coeff::Fin(s) => self.scale(s, e),
            Coeff::Omega => match e {
                Elem::Weak { map, default } => {
                    let map = map.iter().map(|(k, _)| (k.clone(), Coeff::Omega)).collect();
                    let default = if default.is_zero() { Coeff::zero() } else { Coeff::Omega };
                    self.mk_weak(map, default)
                }
                _ => unreachable!("omega coefficient outside the weak model"),
            },
        }
    }

    /// Sequencing: feed each touched entry of `e` to `f` and combine
    /// the results with the entry's weight.
    pub fn bind<F>(&mut self, e: &Elem, mut f: F) -> Result<Elem, DenoteError>
    where
        F: FnMut(&mut Evaluator, &SemValue) -> Result<Elem, DenoteError>,
    {
        match e {
            Elem::Bottom => Ok(Elem::Bottom),
            Elem::Fin(map) => {
                let mut acc = self.zero();
                for (v, c) in map {
                    let fe = f(self, v)?;
                    let scaled = self.scale(c, &fe);
                    acc = self.add(&acc, &scaled);
                }
                Ok(acc)
            }
            Elem::Weak { map, default } => {
                let mut acc = self.zero();
                for (v, c) in map {
                    let fe = f(self, v)?;
                    let scaled = self.scale_coeff(c, &fe);
                    acc = self.add(&acc, &scaled);
                }
                if !default.is_zero() {
                    // Cannot enumerate the untouched points of an
                    // infinite-support table; everything is possible.
                    self.approx = true;
                    acc = Elem::Weak { map: BTreeMap::new(), default: Coeff::Omega };
                }
                Ok(acc)
            }
        }
    }

    /// Runs a table of thunks: the monad multiplication.
    pub fn force_elem(&mut self, e: &Elem) -> Result<Elem, DenoteError> {
        self.bind(e, |_, v| match v {
            SemValue::Mod(inner) => Ok((**inner).clone()),
            _ => Err(DenoteError::NotAThunk),
        })
    }

    /// Applies a table of functions to an argument value.
    pub fn app_elem(&mut self, e: &Elem, arg: SemValue) -> Result<Elem, DenoteError> {
        self.bind(e, |ev, f| ev.apply(f, arg.clone()))
    }

    pub fn apply(&mut self, f: &SemValue, arg: SemValue) -> Result<Elem, DenoteError> {
        let SemValue::Closure(c) = f else {
            return Err(DenoteError::NotAFunction);
        };
        let mut env = c.env.clone();
        env.insert(c.binder.clone(), arg);
        let mut tenv = c.tenv.clone();
        match &c.binder_ty {
            Some(ty) => {
                tenv.insert(c.binder.clone(), ty.clone());
            }
            None => {
                tenv.remove(&c.binder);
            }
        }
        let body = c.body.clone();
        self.eval(&env, &tenv, &body)
    }

    fn proj_elem(&mut self, e: &Elem, left: bool) -> Result<Elem, DenoteError> {
        self.bind(e, |ev, v| match v {
            SemValue::Pair(a, b) => Ok(ev.unit(if left { (**a).clone() } else { (**b).clone() })),
            _ => Err(DenoteError::NotAPair),
        })
    }

    // --- evaluation -------------------------------------------------------

    pub fn eval(&mut self, env: &Env, tenv: &Ctx, t: &Term) -> Result<Elem, DenoteError> {
        self.tick()?;
        match t {
            Term::Var(x) => match env.get(x) {
                Some(v) => Ok(self.unit(v.clone())),
                None => Err(DenoteError::Unbound(x.clone())),
            },
            Term::Star => Ok(self.unit(SemValue::Unit)),
            Term::True => Ok(self.unit(SemValue::Bool(true))),
            Term::False => Ok(self.unit(SemValue::Bool(false))),
            Term::NZero => Ok(self.unit(SemValue::Nat(0))),
            Term::Zero(_) => Ok(self.zero()),
            // The function space is a module with pointwise structure,
            // so abstraction is linear in its body: each canonical
            // summand becomes its own closure, weighted by its
            // coefficient, and a zero body denotes the zero element.
            // A dirac on a single sum-bodied closure would instead
            // break the body-linearity steps.
            Term::Lam(x, ann, body) => {
                let (entries, _) = collect_lincomb(&canonicalize(body, self.mode));
                let mut acc = self.zero();
                for (k, t) in entries {
                    let mut fv = t.free_vars();
                    fv.remove(x);
                    let env_t: Env = env
                        .iter()
                        .filter(|(n, _)| fv.contains(*n))
                        .map(|(n, v)| (n.clone(), v.clone()))
                        .collect();
                    let tenv_t: Ctx = tenv
                        .iter()
                        .filter(|(n, _)| fv.contains(*n))
                        .map(|(n, v)| (n.clone(), v.clone()))
                        .collect();
                    let one = self.unit(SemValue::Closure(Closure::new(
                        x,
                        ann.clone(),
                        t,
                        env_t,
                        tenv_t,
                    )));
                    let scaled = self.scale(&k, &one);
                    acc = self.add(&acc, &scaled);
                }
                Ok(acc)
            }
            Term::App(s, t) => {
                let ef = self.eval(env, tenv, s)?;
                let ea = self.eval(env, tenv, t)?;
                self.bind(&ef, |ev, f| ev.bind(&ea, |ev2, a| ev2.apply(f, a.clone())))
            }
            Term::Pair(s, t) => {
                let es = self.eval(env, tenv, s)?;
                let et = self.eval(env, tenv, t)?;
                self.bind(&es, |ev, a| {
                    ev.bind(&et, |ev2, b| {
                        Ok(ev2.unit(SemValue::Pair(Box::new(a.clone()), Box::new(b.clone()))))
                    })
                })
            }
            Term::Fst(s) => {
                let e = self.eval(env, tenv, s)?;
                self.proj_elem(&e, true)
            }
            Term::Snd(s) => {
                let e = self.eval(env, tenv, s)?;
                self.proj_elem(&e, false)
            }
            Term::Sum(s, t) => {
                let a = self.eval(env, tenv, s)?;
                let b = self.eval(env, tenv, t)?;
                Ok(self.add(&a, &b))
            }
            Term::Scale(k, s) => {
                let e = self.eval(env, tenv, s)?;
                Ok(self.scale(k, &e))
            }
            Term::Thunk(s) => {
                let e = self.eval(env, tenv, s)?;
                Ok(self.unit(SemValue::Mod(Box::new(e))))
            }
            Term::Force(s) => {
                let e = self.eval(env, tenv, s)?;
                self.force_elem(&e)
            }
            Term::Y(s) => {
                let result_ty = infer(tenv, s).ok().and_then(|ty| match ty {
                    Type::Arrow(_, cod) => match *cod {
                        Type::M(a) => Some(*a),
                        _ => None,
                    },
                    _ => None,
                });
                let es = self.eval(env, tenv, s)?;
                self.bind(&es, |ev, v| {
                    let v = v.clone();
                    ev.fix(&v, result_ty.as_ref())
                })
            }
            Term::Succ(s) => {
                let e = self.eval(env, tenv, s)?;
                self.bind(&e, |ev, v| match v {
                    SemValue::Nat(n) => Ok(ev.unit(SemValue::Nat(n + 1))),
                    _ => Err(DenoteError::NotANat),
                })
            }
            Term::Pred(s) => {
                let e = self.eval(env, tenv, s)?;
                self.bind(&e, |ev, v| match v {
                    // predecessor is monus: pred 0 = 0
                    SemValue::Nat(n) => Ok(ev.unit(SemValue::Nat(n.saturating_sub(1)))),
                    _ => Err(DenoteError::NotANat),
                })
            }
            Term::IsZero(s) => {
                let e = self.eval(env, tenv, s)?;
                self.bind(&e, |ev, v| match v {
                    SemValue::Nat(n) => Ok(ev.unit(SemValue::Bool(*n == 0))),
                    _ => Err(DenoteError::NotANat),
                })
            }
            Term::If(c, a, b) => {
                let ec = self.eval(env, tenv, c)?;
                self.bind(&ec, |ev, v| match v {
                    SemValue::Bool(true) => ev.eval(env, tenv, a),
                    SemValue::Bool(false) => ev.eval(env, tenv, b),
                    _ => Err(DenoteError::NotABool),
                })
            }
            Term::Ascribe(s, _) => self.eval(env, tenv, s),
        }
    }

    /// Closed-term convenience wrapper.
    pub fn eval_closed(&mut self, t: &Term) -> Result<Elem, DenoteError> {
        self.eval(&Env::new(), &Ctx::new(), t)
    }

    // --- fixpoints ---------------------------------------------------------

    // `result_ty` is the type the fixpoint inhabits, when known; it
    // decides how a truncated iteration is reported.
    fn fix(&mut self, v: &SemValue, result_ty: Option<&Type>) -> Result<Elem, DenoteError> {
        let arrowy = result_ty.map(Type::contains_arrow).unwrap_or(false);
        let mut cur = match self.model {
            Model::Strong => Elem::Bottom,
            Model::Weak => self.zero(),
        };
        let mut history = vec![cur.clone()];
        for _ in 0..self.y_budget {
            self.tick()?;
            let applied = self.apply(v, SemValue::Mod(Box::new(cur.clone())))?;
            let next = self.force_elem(&applied)?;
            if next == cur {
                return Ok(cur);
            }
            history.push(next.clone());
            cur = next;
        }
        self.approx = true;
        Ok(match (self.model, arrowy) {
            // Closure-embedding iterates never stabilize; the last
            // unrolling answers applications up to the budget depth.
            (_, true) => cur,
            (Model::Strong, false) => Elem::Bottom,
            (Model::Weak, false) => self.window_limit(&history),
        })
    }

    // Per-point stabilization over the trailing window: coefficients
    // that held steady are kept, everything else is omega.
    fn window_limit(&self, history: &[Elem]) -> Elem {
        let w = (self.window as usize).clamp(1, history.len());
        let tail = &history[history.len() - w..];
        let mut keys = BTreeSet::new();
        for e in tail {
            if let Elem::Weak { map, .. } = e {
                keys.extend(map.keys().cloned());
            }
        }
        let mut out = BTreeMap::new();
        for k in keys {
            let mut vals = tail.iter().map(|e| match e {
                Elem::Weak { map, default } => {
                    map.get(&k).cloned().unwrap_or_else(|| default.clone())
                }
                _ => unreachable!("strong element in a weak fixpoint chain"),
            });
            let first = vals.next().expect("window is nonempty");
            let coeff = if vals.all(|v| v == first) { first } else { Coeff::Omega };
            out.insert(k, coeff);
        }
        self.mk_weak(out, Coeff::Omega)
    }

    // --- sampling and comparison -------------------------------------------

    /// Finitely many representative values of a type, or `None` when
    /// the type has no enumerable sample (it mentions an arrow in a
    /// position we would have to invent functions for).
    pub fn sample_values(&self, ty: &Type) -> Option<Vec<SemValue>> {
        match ty {
            Type::Top => Some(vec![SemValue::Unit]),
            Type::Bit => Some(vec![SemValue::Bool(false), SemValue::Bool(true)]),
            Type::Int => {
                let mut ns: Vec<u64> = (0..5).collect();
                ns.extend(self.int_points.iter().copied());
                ns.sort_unstable();
                ns.dedup();
                Some(ns.into_iter().map(SemValue::Nat).collect())
            }
            Type::Base(name) => {
                Some(vec![SemValue::Atom(format!("{name}.0")), SemValue::Atom(format!("{name}.1"))])
            }
            Type::Prod(a, b) => {
                let va = self.sample_values(a)?;
                let vb = self.sample_values(b)?;
                let mut out = Vec::new();
                for x in &va {
                    for y in &vb {
                        out.push(SemValue::Pair(Box::new(x.clone()), Box::new(y.clone())));
                        if out.len() >= 9 {
                            return Some(out);
                        }
                    }
                }
                Some(out)
            }
            Type::M(a) => {
                let vs = self.sample_values(a)?;
                let mut elems = vec![self.zero(), self.unit(vs[0].clone())];
                elems.push(self.scale(&Scalar::int(2), &self.unit(vs[0].clone())));
                if vs.len() > 1 {
                    elems.push(self.add(&self.unit(vs[0].clone()), &self.unit(vs[1].clone())));
                }
                Some(elems.into_iter().map(|e| SemValue::Mod(Box::new(e))).collect())
            }
            Type::Arrow(..) => None,
        }
    }

    /// Compares two elements at a type. Arrow-free types compare
    /// tables directly; function types compare observations at sampled
    /// arguments, so agreement there is evidence, not proof, while
    /// disagreement is conclusive.
    pub fn compare_at(&mut self, a: &Elem, b: &Elem, ty: &Type) -> Result<Compare, DenoteError> {
        if !ty.contains_arrow() {
            return Ok(if a == b {
                Compare::Equal
            } else {
                Compare::Different(format!("{a} vs {b}"))
            });
        }
        match ty {
            Type::Arrow(dom, cod) => {
                let Some(args) = self.sample_values(dom) else {
                    return Ok(Compare::Unknown(format!("no sample points at {dom}")));
                };
                let mut out = Compare::Equal;
                for v in args {
                    let ea = self.app_elem(a, v.clone())?;
                    let eb = self.app_elem(b, v.clone())?;
                    match self.compare_at(&ea, &eb, cod)? {
                        Compare::Different(d) => {
                            return Ok(Compare::Different(format!("at argument {v}: {d}")));
                        }
                        Compare::Unknown(u) => out = Compare::Unknown(u),
                        Compare::Equal => {}
                    }
                }
                Ok(out)
            }
            Type::M(inner) => {
                let fa = self.force_elem(a)?;
                let fb = self.force_elem(b)?;
                self.compare_at(&fa, &fb, inner)
            }
            Type::Prod(ta, tb) => {
                let mut out = Compare::Equal;
                for (left, side_ty) in [(true, ta), (false, tb)] {
                    let pa = self.proj_elem(a, left)?;
                    let pb = self.proj_elem(b, left)?;
                    match self.compare_at(&pa, &pb, side_ty)? {
                        d @ Compare::Different(_) => return Ok(d),
                        Compare::Unknown(u) => out = Compare::Unknown(u),
                        Compare::Equal => {}
                    }
                }
                Ok(out)
            }
            _ => unreachable!("arrow-bearing type with no structural case"),
        }
    }
}

/// One-shot evaluation: the element and whether it is approximate.
pub fn denote(
    ctx: &Ctx,
    env: &Env,
    t: &Term,
    mode: Mode,
    model: Model,
) -> Result<(Elem, bool), DenoteError> {
    let mut ev = Evaluator::new(mode, model);
    let e = ev.eval(env, ctx, t)?;
    Ok((e, ev.approx))
}

fn mentions_fix(t: &Term) -> bool {
    matches!(t, Term::Y(_)) || t.children().into_iter().any(mentions_fix)
}

/// Result of checking that every rewrite step preserves denotations.
#[derive(Debug, Default)]
pub struct SoundnessReport {
    pub steps: usize,
    pub envs: usize,
    pub compared: usize,
    pub inconclusive: usize,
    pub skipped: bool,
    pub note: Option<String>,
    pub failures: Vec<String>,
}

impl SoundnessReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

// Sample environments for a typing context: the cross product of the
// per-variable samples, capped.
fn env_samples(ctx: &Ctx, mode: Mode, model: Model, int_points: &[u64]) -> Option<Vec<Env>> {
    let mut ev = Evaluator::new(mode, model);
    ev.int_points = int_points.to_vec();
    let mut envs = vec![Env::new()];
    for (x, ty) in ctx {
        let vals = ev.sample_values(ty)?;
        let mut next = Vec::new();
        'outer: for env in &envs {
            for v in &vals {
                let mut e = env.clone();
                e.insert(x.clone(), v.clone());
                next.push(e);
                if next.len() >= 16 {
                    break 'outer;
                }
            }
        }
        envs = next;
    }
    Some(envs)
}

/// Rewrites `t` and checks, at every step and every sampled
/// environment, that the denotation is preserved. Comparisons tainted
/// by approximate fixpoints are counted inconclusive, not failed.
///
/// Under strict semantics the strong model only validates the
/// fixpoint-free fragment (dropping a zero-weighted diverger is a
/// strict rewrite but changes the table), so terms mentioning the
/// fixpoint operator are skipped there.
pub fn soundness_check(
    ctx: &Ctx,
    t: &Term,
    mode: Mode,
    model: Model,
    fuel: u64,
    int_points: &[u64],
) -> Result<SoundnessReport, DenoteError> {
    let mut report = SoundnessReport::default();
    if mode == Mode::Strict && model == Model::Strong && mentions_fix(t) {
        report.skipped = true;
        report.note = Some(
            "fixpoint terms are outside the validated fragment of the strict/strong pairing"
                .to_string(),
        );
        return Ok(report);
    }
    let ty = infer(ctx, t)?;
    let Some(envs) = env_samples(ctx, mode, model, int_points) else {
        report.skipped = true;
        report.note = Some("context has a type with no sample points".to_string());
        return Ok(report);
    };
    let normalized = normalize(t, mode, Policy::equational(), fuel);
    let mut terms = vec![t.clone()];
    terms.extend(normalized.steps.iter().map(|s| s.term.clone()));
    report.steps = terms.len() - 1;
    report.envs = envs.len();
    for env in &envs {
        let mut prev: Option<(Elem, bool)> = None;
        for (i, term) in terms.iter().enumerate() {
            let mut ev = Evaluator::new(mode, model);
            ev.int_points = int_points.to_vec();
            let d = match ev.eval(env, ctx, term) {
                Ok(d) => d,
                Err(DenoteError::Exhausted) => {
                    report.inconclusive += 1;
                    prev = None;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let approx = ev.approx;
            if let Some((pd, pap)) = &prev {
                let mut cev = Evaluator::new(mode, model);
                cev.int_points = int_points.to_vec();
                let step = &normalized.steps[i - 1];
                match cev.compare_at(pd, &d, &ty)? {
                    Compare::Equal => {
                        if *pap || approx || cev.approx {
                            report.inconclusive += 1;
                        } else {
                            report.compared += 1;
                        }
                    }
                    Compare::Different(why) => {
                        if *pap || approx || cev.approx {
                            report.inconclusive += 1;
                        } else {
                            report.failures.push(format!(
                                "step {i} ({} at {}) changes the denotation: {why}",
                                step.rule, step.pos
                            ));
                        }
                    }
                    Compare::Unknown(_) => report.inconclusive += 1,
                }
            }
            prev = Some((d, approx));
        }
    }
    if report.inconclusive > 0 && report.note.is_none() {
        report.note = Some(
            "some comparisons were inconclusive (approximate fixpoints or unsampleable arguments)"
                .to_string(),
        );
    }
    Ok(report)
}
