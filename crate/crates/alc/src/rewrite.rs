//! The small-step rewrite engine.
//!
//! The relation has three layers:
//!
//! * the canonical-form laws for weights and sums (applied as one
//!   composite `EFCanon` step whenever the term is not canonical),
//! * the directed linearity rules (`A*` families) that pull sums,
//!   weights and empty sums out of applications, abstractions,
//!   forces, fixpoints, pairs and projections,
//! * the computation rules (`B*` families): call-by-value beta,
//!   forcing a thunk, projections, fixpoint unfolding, and the
//!   arithmetic and conditional heads.
//!
//! Rules written with value metavariables carry value side
//! conditions; the linearity rules are unconditional. The
//! deterministic strategy canonicalizes first, then fires the
//! leftmost-innermost computation or linearity redex. The explorer
//! enumerates all one-step reducts of the term as given. Positions
//! never descend into thunk bodies under the operational policy;
//! the equational policy used by the equivalence checker does.

use crate::canon::canonicalize;
use crate::term::{Position, Term};
use crate::Mode;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;

/// Identifiers for the rewrite rules. `EFCanon` is the composite
/// canonicalization step; everything else fires one rule instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[allow(clippy::upper_case_acronyms)]
pub enum RuleId {
    // weight laws (inside EFCanon, listed for reference and audits)
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    // fusion laws (inside EFCanon)
    F1,
    F2,
    F3,
    // linearity of application, abstraction and force
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
    A12,
    // linearity of pairs and projections
    AP1,
    AP2,
    AP3,
    AP4,
    AP5,
    AP6,
    AF1,
    AF2,
    AF3,
    AS1,
    AS2,
    AS3,
    // linearity of the fixpoint
    AY1,
    AY2,
    AY3,
    // computation rules
    B1,
    B2,
    Bproj1,
    Bproj2,
    BY,
    Bsuccpred,
    Biszero0,
    BiszeroS,
    BifTT,
    BifFF,
    // composite canonicalization step
    EFCanon,
}

impl RuleId {
    /// Linearity steps strictly decrease the termination measure.
    pub fn is_linearity(self) -> bool {
        use RuleId::*;
        matches!(
            self,
            A1 | A2
                | A3
                | A4
                | A5
                | A6
                | A7
                | A8
                | A9
                | A10
                | A11
                | A12
                | AP1
                | AP2
                | AP3
                | AP4
                | AP5
                | AP6
                | AF1
                | AF2
                | AF3
                | AS1
                | AS2
                | AS3
                | AY1
                | AY2
                | AY3
        )
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Where the strategy may look for redexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Policy {
    pub enter_lambda: bool,
    pub enter_thunk: bool,
}

impl Policy {
    /// Runtime evaluation: under binders, but thunks stay frozen.
    pub fn operational() -> Policy {
        Policy { enter_lambda: true, enter_thunk: false }
    }

    /// Equational normalization: also inside thunks.
    pub fn equational() -> Policy {
        Policy { enter_lambda: true, enter_thunk: true }
    }
}

/// One step: the rule, where it fired, and the whole term afterwards.
#[derive(Debug, Clone)]
pub struct Step {
    pub rule: RuleId,
    pub pos: Position,
    pub term: Term,
}

#[derive(Debug, Clone)]
pub struct Normalized {
    pub term: Term,
    pub steps: Vec<Step>,
    pub fuel_exhausted: bool,
}

fn unwrap_m(ty: &crate::term::Type) -> Option<crate::term::Type> {
    match ty {
        crate::term::Type::M(a) => Some(a.as_ref().clone()),
        _ => None,
    }
}

/// Try to fire a linearity or computation rule at the root of `t`.
pub fn head_step(t: &Term) -> Option<(RuleId, Term)> {
    use crate::term::Type;
    use RuleId::*;
    match t {
        Term::App(f, a) => match (f.as_ref(), a.as_ref()) {
            (Term::Sum(s, u), r) => Some((
                A1,
                Term::sum(Term::app(*s.clone(), r.clone()), Term::app(*u.clone(), r.clone())),
            )),
            (Term::Scale(k, s), r) => {
                Some((A3, Term::scale(k.clone(), Term::app(*s.clone(), r.clone()))))
            }
            (Term::Zero(z), _) => {
                let ann = z.as_ref().and_then(|ty| match ty {
                    Type::Arrow(_, cod) => Some(cod.as_ref().clone()),
                    _ => None,
                });
                Some((A5, Term::Zero(ann)))
            }
            (r, Term::Sum(s, u)) => Some((
                A2,
                Term::sum(Term::app(r.clone(), *s.clone()), Term::app(r.clone(), *u.clone())),
            )),
            (r, Term::Scale(k, s)) => {
                Some((A4, Term::scale(k.clone(), Term::app(r.clone(), *s.clone()))))
            }
            (_, Term::Zero(_)) => Some((A6, Term::Zero(None))),
            (Term::Lam(x, _, body), v) if v.is_value() => Some((B1, body.subst(x, v))),
            _ => None,
        },
        Term::Lam(x, ann, body) => match body.as_ref() {
            Term::Sum(s, u) => Some((
                A7,
                Term::sum(
                    Term::Lam(x.clone(), ann.clone(), s.clone()),
                    Term::Lam(x.clone(), ann.clone(), u.clone()),
                ),
            )),
            Term::Scale(k, s) => Some((
                A8,
                Term::scale(k.clone(), Term::Lam(x.clone(), ann.clone(), s.clone())),
            )),
            Term::Zero(z) => {
                let out = match (ann, z) {
                    (Some(dom), Some(cod)) => Some(Type::arrow(dom.clone(), cod.clone())),
                    _ => None,
                };
                Some((A9, Term::Zero(out)))
            }
            _ => None,
        },
        Term::Force(inner) => match inner.as_ref() {
            Term::Sum(s, u) => Some((
                A10,
                Term::sum(Term::force(*s.clone()), Term::force(*u.clone())),
            )),
            Term::Scale(k, s) => Some((A11, Term::scale(k.clone(), Term::force(*s.clone())))),
            Term::Zero(z) => Some((A12, Term::Zero(z.as_ref().and_then(unwrap_m)))),
            Term::Thunk(s) => Some((B2, *s.clone())),
            _ => None,
        },
        Term::Pair(a, b) => match (a.as_ref(), b.as_ref()) {
            (Term::Sum(s, u), r) => Some((
                AP1,
                Term::sum(Term::pair(*s.clone(), r.clone()), Term::pair(*u.clone(), r.clone())),
            )),
            (Term::Scale(k, s), r) => {
                Some((AP3, Term::scale(k.clone(), Term::pair(*s.clone(), r.clone()))))
            }
            (Term::Zero(_), _) => Some((AP5, Term::Zero(None))),
            (r, Term::Sum(s, u)) => Some((
                AP2,
                Term::sum(Term::pair(r.clone(), *s.clone()), Term::pair(r.clone(), *u.clone())),
            )),
            (r, Term::Scale(k, s)) => {
                Some((AP4, Term::scale(k.clone(), Term::pair(r.clone(), *s.clone()))))
            }
            (_, Term::Zero(_)) => Some((AP6, Term::Zero(None))),
            _ => None,
        },
        Term::Fst(inner) => match inner.as_ref() {
            Term::Sum(s, u) => Some((
                AF1,
                Term::sum(Term::fst(*s.clone()), Term::fst(*u.clone())),
            )),
            Term::Scale(k, s) => Some((AF2, Term::scale(k.clone(), Term::fst(*s.clone())))),
            Term::Zero(z) => {
                let ann = z.as_ref().and_then(|ty| match ty {
                    Type::Prod(l, _) => Some(l.as_ref().clone()),
                    _ => None,
                });
                Some((AF3, Term::Zero(ann)))
            }
            Term::Pair(u, v) if u.is_value() && v.is_value() => Some((Bproj1, *u.clone())),
            _ => None,
        },
        Term::Snd(inner) => match inner.as_ref() {
            Term::Sum(s, u) => Some((
                AS1,
                Term::sum(Term::snd(*s.clone()), Term::snd(*u.clone())),
            )),
            Term::Scale(k, s) => Some((AS2, Term::scale(k.clone(), Term::snd(*s.clone())))),
            Term::Zero(z) => {
                let ann = z.as_ref().and_then(|ty| match ty {
                    Type::Prod(_, r) => Some(r.as_ref().clone()),
                    _ => None,
                });
                Some((AS3, Term::Zero(ann)))
            }
            Term::Pair(u, v) if u.is_value() && v.is_value() => Some((Bproj2, *v.clone())),
            _ => None,
        },
        Term::Y(inner) => match inner.as_ref() {
            Term::Sum(s, u) => Some((
                AY1,
                Term::sum(Term::fix(*s.clone()), Term::fix(*u.clone())),
            )),
            Term::Scale(k, s) => Some((AY2, Term::scale(k.clone(), Term::fix(*s.clone())))),
            Term::Zero(z) => {
                let ann = z.as_ref().and_then(|ty| match ty {
                    Type::Arrow(dom, cod) if dom == cod => unwrap_m(dom),
                    _ => None,
                });
                Some((AY3, Term::Zero(ann)))
            }
            v if v.is_value() => Some((
                BY,
                Term::force(Term::app(v.clone(), Term::thunk(Term::fix(v.clone())))),
            )),
            _ => None,
        },
        Term::Pred(inner) => match inner.as_ref() {
            Term::Succ(u) if u.is_value() => Some((Bsuccpred, *u.clone())),
            _ => None,
        },
        Term::IsZero(inner) => match inner.as_ref() {
            Term::NZero => Some((Biszero0, Term::True)),
            Term::Succ(u) if u.is_value() => Some((BiszeroS, Term::False)),
            _ => None,
        },
        Term::If(c, a, b) => match c.as_ref() {
            Term::True => Some((BifTT, *a.clone())),
            Term::False => Some((BifFF, *b.clone())),
            _ => None,
        },
        _ => None,
    }
}

/// Which children the strategy may descend into.
fn enterable(t: &Term, i: usize, policy: Policy) -> bool {
    match t {
        Term::Lam(..) => policy.enter_lambda,
        Term::Thunk(_) => policy.enter_thunk,
        Term::If(..) => i == 0,
        _ => true,
    }
}

/// Leftmost-innermost linearity/computation redex, if any.
fn find_inner_step(t: &Term, policy: Policy) -> Option<(RuleId, Position, Term)> {
    for (i, child) in t.children().into_iter().enumerate() {
        if !enterable(t, i, policy) {
            continue;
        }
        if let Some((rule, pos, stepped_child)) = find_inner_step(child, policy) {
            let here = {
                let mut v = vec![i as u32];
                v.extend(pos.0);
                Position(v)
            };
            let rebuilt = t.replace_at(&Position(vec![i as u32]), stepped_child);
            return Some((rule, here, rebuilt));
        }
    }
    head_step(t).map(|(rule, result)| (rule, Position::root(), result))
}

/// One deterministic step: canonicalize if needed, otherwise fire the
/// leftmost-innermost redex.
pub fn next_step(t: &Term, mode: Mode, policy: Policy) -> Option<Step> {
    let canonical = canonicalize(t, mode);
    if !canonical.alpha_eq(t) {
        return Some(Step { rule: RuleId::EFCanon, pos: Position::root(), term: canonical });
    }
    find_inner_step(t, policy).map(|(rule, pos, term)| Step { rule, pos, term })
}

/// Iterated deterministic stepping with a step budget.
pub fn normalize(t: &Term, mode: Mode, policy: Policy, fuel: u64) -> Normalized {
    normalize_capped(t, mode, policy, fuel, usize::MAX)
}

/// Like `normalize`, but additionally gives up (reporting exhaustion)
/// once the term grows past `max_size` nodes. Unfolding fixpoints can
/// grow without bound; the cap keeps exploratory callers responsive.
pub fn normalize_capped(
    t: &Term,
    mode: Mode,
    policy: Policy,
    fuel: u64,
    max_size: usize,
) -> Normalized {
    let mut current = t.strip_ascriptions();
    let mut steps = Vec::new();
    for _ in 0..fuel {
        if current.size() > max_size {
            return Normalized { term: current, steps, fuel_exhausted: true };
        }
        match next_step(&current, mode, policy) {
            Some(step) => {
                current = step.term.clone();
                steps.push(step);
            }
            None => {
                return Normalized { term: current, steps, fuel_exhausted: false };
            }
        }
    }
    let exhausted = next_step(&current, mode, policy).is_some();
    Normalized { term: current, steps, fuel_exhausted: exhausted }
}

/// Whether no step applies.
pub fn is_normal(t: &Term, mode: Mode, policy: Policy) -> bool {
    next_step(t, mode, policy).is_none()
}

/// All one-step reducts of `t` as given: every linearity/computation
/// redex position, plus one canonicalization step when `t` is not
/// canonical. Results are raw single-rule applications.
pub fn reducts(t: &Term, mode: Mode, policy: Policy) -> Vec<Step> {
    let mut out = Vec::new();
    let canonical = canonicalize(t, mode);
    if !canonical.alpha_eq(t) {
        out.push(Step { rule: RuleId::EFCanon, pos: Position::root(), term: canonical });
    }
    fn collect(t: &Term, root: &Term, at: &Position, policy: Policy, out: &mut Vec<Step>) {
        if let Some((rule, result)) = head_step(t) {
            out.push(Step {
                rule,
                pos: at.clone(),
                term: root.replace_at(at, result),
            });
        }
        for (i, child) in t.children().into_iter().enumerate() {
            if enterable(t, i, policy) {
                collect(child, root, &at.child(i as u32), policy, out);
            }
        }
    }
    collect(t, t, &Position::root(), policy, &mut out);
    out
}

/// Result of a joinability search.
#[derive(Debug, Clone)]
pub struct JoinOutcome {
    pub common: Option<Term>,
    pub expanded: usize,
}

/// Breadth-first bidirectional search for a common reduct of `a` and
/// `b`, exploring the reduction graphs modulo canonical forms. Stops
/// after expanding `max_expansions` nodes in total.
pub fn join(a: &Term, b: &Term, mode: Mode, policy: Policy, max_expansions: usize) -> JoinOutcome {
    type Key = crate::term::Nameless;
    let start = |t: &Term| canonicalize(&t.strip_ascriptions(), mode);
    let (a0, b0) = (start(a), start(b));

    let mut seen_a: BTreeMap<Key, Term> = BTreeMap::new();
    let mut seen_b: BTreeMap<Key, Term> = BTreeMap::new();
    let mut frontier_a: VecDeque<Term> = VecDeque::new();
    let mut frontier_b: VecDeque<Term> = VecDeque::new();
    seen_a.insert(a0.to_nameless(), a0.clone());
    seen_b.insert(b0.to_nameless(), b0.clone());
    frontier_a.push_back(a0.clone());
    frontier_b.push_back(b0);

    if let Some(t) = seen_a.keys().find(|k| seen_b.contains_key(*k)) {
        return JoinOutcome { common: Some(seen_a[t].clone()), expanded: 0 };
    }

    let mut expanded = 0usize;
    loop {
        if expanded >= max_expansions || (frontier_a.is_empty() && frontier_b.is_empty()) {
            return JoinOutcome { common: None, expanded };
        }
        // expand the smaller side first
        let expand_a = !frontier_a.is_empty()
            && (frontier_b.is_empty() || frontier_a.len() <= frontier_b.len());
        let (frontier, seen, other_seen) = if expand_a {
            (&mut frontier_a, &mut seen_a, &seen_b)
        } else {
            (&mut frontier_b, &mut seen_b, &seen_a)
        };
        let node = frontier.pop_front().expect("nonempty frontier");
        expanded += 1;
        for step in reducts(&node, mode, policy) {
            let next = canonicalize(&step.term, mode);
            let key = next.to_nameless();
            if other_seen.contains_key(&key) {
                return JoinOutcome { common: Some(next), expanded };
            }
            if !seen.contains_key(&key) {
                seen.insert(key, next.clone());
                frontier.push_back(next);
            }
        }
    }
}

/// Every normal form reachable from `t`, found by a breadth-first
/// walk of the raw reduction graph bounded by `max_expansions` node
/// expansions. Nodes are deliberately not canonicalized up front:
/// merging summands is itself a step, and collapsing it eagerly would
/// hide branches that diverge before the merge. The second component
/// reports whether the walk was cut short by the bound.
pub fn reachable_normal_forms(
    t: &Term,
    mode: Mode,
    policy: Policy,
    max_expansions: usize,
) -> (Vec<Term>, bool) {
    type Key = crate::term::Nameless;
    let start = t.strip_ascriptions();
    let mut seen: BTreeMap<Key, Term> = BTreeMap::new();
    let mut frontier: VecDeque<Term> = VecDeque::new();
    let mut normals: BTreeMap<Key, Term> = BTreeMap::new();
    seen.insert(start.to_nameless(), start.clone());
    frontier.push_back(start);

    let mut expanded = 0usize;
    while let Some(node) = frontier.pop_front() {
        if expanded >= max_expansions {
            return (normals.into_values().collect(), true);
        }
        expanded += 1;
        let steps = reducts(&node, mode, policy);
        if steps.is_empty() {
            normals.insert(node.to_nameless(), node);
            continue;
        }
        for step in steps {
            let key = step.term.to_nameless();
            if !seen.contains_key(&key) {
                seen.insert(key, step.term.clone());
                frontier.push_back(step.term);
            }
        }
    }
    (normals.into_values().collect(), false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;
    use crate::scalar::Scalar;

    fn op() -> Policy {
        Policy::operational()
    }

    fn norm_s(src: &str) -> Normalized {
        normalize(&parse_term(src).unwrap(), Mode::Strict, op(), 1000)
    }

    fn assert_normalizes(src: &str, expect: &str) {
        let n = norm_s(src);
        assert!(!n.fuel_exhausted, "fuel exhausted on {src}");
        // normal forms are canonical, so compare the canonical image
        let e = canonicalize(&parse_term(expect).unwrap(), Mode::Strict);
        assert!(
            n.term.alpha_eq(&e),
            "normalize({src}) = {} but expected {expect}",
            n.term
        );
    }

    #[test]
    fn beta_requires_value_argument() {
        // the argument sum distributes before beta fires
        let n = norm_s(r"(\x. <x, x>) (y + z)");
        let expect = parse_term("<y, y> + <z, z>").unwrap();
        assert!(n.term.alpha_eq(&expect), "got {}", n.term);
        let rules: Vec<RuleId> = n.steps.iter().map(|s| s.rule).collect();
        assert_eq!(rules[0], RuleId::A2, "distribution must precede beta");
        assert_eq!(rules.iter().filter(|r| **r == RuleId::B1).count(), 2);

        // a duplicating body also flattens the copies back into a weight
        let n = norm_s(r"(\x. x + x) (y + z)");
        let expect = parse_term("2*y + 2*z").unwrap();
        assert!(n.term.alpha_eq(&expect), "got {}", n.term);
    }

    #[test]
    fn duplication_example_left_binder_first() {
        // (\x. \f. (f x) x) (y + z) splits into two summands, each
        // applying f to one alternative twice.
        assert_normalizes(
            r"(\x. \f. (f x) x) (y + z)",
            r"(\f. (f y) y) + (\f. (f z) z)",
        );
        let n = norm_s(r"(\x. \f. (f x) x) (y + z)");
        let rules: Vec<RuleId> = n.steps.iter().map(|s| s.rule).collect();
        assert_eq!(rules, vec![RuleId::A2, RuleId::B1, RuleId::B1]);
    }

    #[test]
    fn duplication_example_with_thunks() {
        // Thunked sums duplicate: all four combinations appear.
        assert_normalizes(
            r"(\x. \f. (f !x) !x) [y + z]",
            r"(\f. (f y) y) + (\f. (f y) z) + (\f. (f z) y) + (\f. (f z) z)",
        );
    }

    #[test]
    fn fixpoint_unfolds_once_in_four_steps() {
        let yb = parse_term(r"Y(\x : M u. [b + !x])").unwrap();
        let mut t = yb.clone();
        let mut rules = Vec::new();
        for _ in 0..4 {
            let s = next_step(&t, Mode::Strict, op()).expect("step");
            rules.push(s.rule);
            t = s.term;
        }
        assert_eq!(rules, vec![RuleId::BY, RuleId::B1, RuleId::B2, RuleId::B2]);
        let expect = parse_term(r"b + Y(\x : M u. [b + !x])").unwrap();
        assert!(t.alpha_eq(&expect), "got {t}");
    }

    #[test]
    fn untyped_fix_by_self_application_unfolds_in_two_steps() {
        let l = r"(\x. [b + !(x x)])";
        let yb = parse_term(&format!("!({l} {l})")).unwrap();
        let s1 = next_step(&yb, Mode::Strict, op()).unwrap();
        assert_eq!(s1.rule, RuleId::B1);
        let s2 = next_step(&s1.term, Mode::Strict, op()).unwrap();
        assert_eq!(s2.rule, RuleId::B2);
        let expect = parse_term(&format!("b + !({l} {l})")).unwrap();
        assert!(
            canonicalize(&s2.term, Mode::Strict).alpha_eq(&canonicalize(&expect, Mode::Strict)),
            "got {}",
            s2.term
        );
    }

    #[test]
    fn fuel_exhaustion_reported() {
        let n = normalize(
            &parse_term(r"Y(\x : M u. [b + !x])").unwrap(),
            Mode::Strict,
            op(),
            50,
        );
        assert!(n.fuel_exhausted);
    }

    #[test]
    fn head_rules_fire_individually() {
        let cases: Vec<(&str, &str, &str)> = vec![
            ("(x + y) z", "A1", "x z + y z"),
            ("z (x + y)", "A2", "z x + z y"),
            ("(2*x) z", "A3", "2*(x z)"),
            ("z (2*x)", "A4", "2*(z x)"),
            ("(zero : T -> T) z", "A5", "(zero : T)"),
            ("z zero", "A6", "zero"),
            (r"\w. x + y", "A7", r"(\w. x) + (\w. y)"),
            (r"\w. 2*x", "A8", r"2*(\w. x)"),
            (r"\w : T. (zero : bit)", "A9", "(zero : T -> bit)"),
            ("!(x + y)", "A10", "!x + !y"),
            ("!(2*x)", "A11", "2*!x"),
            ("!(zero : M T)", "A12", "(zero : T)"),
            ("<x + y, z>", "AP1", "<x, z> + <y, z>"),
            ("<z, x + y>", "AP2", "<z, x> + <z, y>"),
            ("<2*x, z>", "AP3", "2*<x, z>"),
            ("<z, 2*x>", "AP4", "2*<z, x>"),
            ("<zero, z>", "AP5", "zero"),
            ("<z, zero>", "AP6", "zero"),
            ("fst (x + y)", "AF1", "fst x + fst y"),
            ("fst (2*x)", "AF2", "2*fst x"),
            ("fst (zero : T * bit)", "AF3", "(zero : T)"),
            ("snd (x + y)", "AS1", "snd x + snd y"),
            ("snd (2*x)", "AS2", "2*snd x"),
            ("snd (zero : T * bit)", "AS3", "(zero : bit)"),
            (r"Y(f + g)", "AY1", "Y(f) + Y(g)"),
            (r"Y(2*f)", "AY2", "2*Y(f)"),
            (r"Y((zero : M T -> M T))", "AY3", "(zero : T)"),
            (r"(\x. x) y", "B1", "y"),
            ("![x + y]", "B2", "x + y"),
            ("fst <x, y>", "Bproj1", "x"),
            ("snd <x, y>", "Bproj2", "y"),
            ("pred (succ n0)", "Bsuccpred", "n0"),
            ("iszero n0", "Biszero0", "tt"),
            ("iszero (succ x)", "BiszeroS", "ff"),
            ("if tt then x else y", "BifTT", "x"),
            ("if ff then x else y", "BifFF", "y"),
        ];
        for (src, rule_name, expect) in cases {
            let t = parse_term(src).unwrap().strip_ascriptions();
            let (rule, result) = head_step(&t)
                .unwrap_or_else(|| panic!("no head step for {src}"));
            assert_eq!(format!("{rule}"), rule_name, "wrong rule for {src}");
            let e = parse_term(expect).unwrap().strip_ascriptions();
            assert!(
                result.alpha_eq(&e),
                "head_step({src}) = {result} but expected {expect}"
            );
        }
    }

    #[test]
    fn fix_unfolding_needs_a_value() {
        let t = parse_term(r"Y((\x. x) (\y : M T. y))").unwrap();
        // the argument is an application that is a value, so BY fires;
        // but a sum argument must distribute first
        assert!(head_step(&t).is_some());
        let t = parse_term("Y(f + g)").unwrap();
        let (rule, _) = head_step(&t).unwrap();
        assert_eq!(rule, RuleId::AY1);
    }

    #[test]
    fn value_conditions_block_projection() {
        // components must be values before projecting
        let t = parse_term("fst <!a, z>").unwrap();
        assert!(head_step(&t).is_none());
        let t = parse_term("fst <x y, z>").unwrap();
        let (rule, result) = head_step(&t).unwrap();
        assert_eq!(rule, RuleId::Bproj1);
        assert!(result.alpha_eq(&parse_term("x y").unwrap()));
    }

    #[test]
    fn conditional_branches_stay_frozen() {
        // no reduction inside unselected branches
        let t = parse_term(r"if x then (\y. y) star else (\y. y) star").unwrap();
        assert!(is_normal(&t, Mode::Strict, op()));
        let t = parse_term(r"if tt then (\y. y) star else w").unwrap();
        let n = normalize(&t, Mode::Strict, op(), 10);
        assert!(n.term.alpha_eq(&parse_term("star").unwrap()));
    }

    #[test]
    fn thunks_stay_frozen_operationally() {
        let t = parse_term(r"[(\x. x) star]").unwrap();
        assert!(is_normal(&t, Mode::Strict, op()));
        // but the equational policy reaches inside
        assert!(!is_normal(&t, Mode::Strict, Policy::equational()));
    }

    #[test]
    fn canonicalization_step_reported_once() {
        let t = parse_term("z + y").unwrap();
        let s = next_step(&t, Mode::Strict, op()).unwrap();
        assert_eq!(s.rule, RuleId::EFCanon);
        assert!(s.term.alpha_eq(&parse_term("y + z").unwrap()));
        assert!(is_normal(&s.term, Mode::Strict, op()));
    }

    #[test]
    fn mode_separation_weak_keeps_dead_weights() {
        let t = parse_term("x + {-1}*x").unwrap();
        let strict = normalize(&t, Mode::Strict, op(), 10);
        assert!(strict.term.alpha_eq(&Term::zero()));
        let weak = normalize(&t, Mode::Weak, op(), 10);
        assert!(weak.term.alpha_eq(&Term::scale(Scalar::zero(), Term::var("x"))));
        // 0*x is normal in weak mode only
        assert!(is_normal(&weak.term, Mode::Weak, op()));
        assert!(!is_normal(&weak.term, Mode::Strict, op()));
    }

    #[test]
    fn explorer_lists_all_redexes() {
        let t = parse_term(r"<(\x. x) star, (\x. x) tt>").unwrap();
        let rs = reducts(&t, Mode::Strict, op());
        assert_eq!(rs.len(), 2);
        let positions: Vec<String> = rs.iter().map(|s| s.pos.to_string()).collect();
        assert!(positions.contains(&"0".to_string()));
        assert!(positions.contains(&"1".to_string()));
        // non-canonical terms additionally offer the canonicalization step
        let t = parse_term(r"((\x. x) star) + ((\x. x) star)").unwrap();
        let rs = reducts(&t, Mode::Strict, op());
        assert!(rs.iter().any(|s| s.rule == RuleId::EFCanon));
        assert!(rs.iter().filter(|s| s.rule == RuleId::B1).count() == 2);
    }

    #[test]
    fn one_step_reducts_rejoin() {
        // all pairs of reducts of a confluent term share a normal form
        let t = parse_term(r"((\x. x) star) + ((\y. <y, y>) ((\x. x) tt))").unwrap();
        let rs = reducts(&t, Mode::Strict, op());
        assert!(rs.len() >= 2);
        for i in 0..rs.len() {
            for j in (i + 1)..rs.len() {
                let out = join(&rs[i].term, &rs[j].term, Mode::Strict, op(), 500);
                assert!(
                    out.common.is_some(),
                    "reducts {} and {} failed to rejoin",
                    rs[i].term,
                    rs[j].term
                );
            }
        }
    }

    #[test]
    fn join_finds_shared_reduct_of_distinct_terms() {
        let a = parse_term(r"(\x. x + x) star").unwrap();
        let b = parse_term("2*star").unwrap();
        let out = join(&a, &b, Mode::Strict, op(), 100);
        assert!(out.common.is_some());
        let c = parse_term("tt").unwrap();
        let out = join(&a, &c, Mode::Strict, op(), 100);
        assert!(out.common.is_none());
    }

    #[test]
    fn exploration_reaches_both_ends_of_a_cancelled_fixpoint() {
        // Merging the two copies first gives zero; unfolding one copy
        // first leaves a bare `star` behind. Both are normal, so the
        // strict rewriting relation is not confluent on fixpoints.
        let t = parse_term(r"Y(\x : M T. [star + !x]) + {-1}*(Y(\x : M T. [star + !x]))")
            .unwrap();
        let (normals, _) = reachable_normal_forms(&t, Mode::Strict, op(), 200);
        assert!(normals.iter().any(|n| matches!(n, Term::Zero(_))), "no zero endpoint");
        assert!(normals.iter().any(|n| n.alpha_eq(&Term::Star)), "no star endpoint");
    }

    #[test]
    fn linearity_steps_strictly_decrease_the_measure() {
        let sources = [
            r"(\x. \f. (f x) x) (y + z)",
            r"(\x. \f. (f !x) !x) [y + z]",
            "x ((2*y) z)",
            "fst (<x + y, z> + <y, w>)",
            "!((2*x) (y + z))",
            r"(\w. 3*(x + w)) (y + 2*z)",
        ];
        for src in sources {
            let t = parse_term(src).unwrap();
            let n = normalize(&t, Mode::Strict, op(), 1000);
            let mut prev = t.measure();
            for step in &n.steps {
                let cur = step.term.measure();
                if step.rule.is_linearity() {
                    assert!(
                        cur < prev,
                        "{:?} did not decrease the measure in {src}",
                        step.rule
                    );
                } else if step.rule == RuleId::EFCanon {
                    // canonicalization never increases the first
                    // component; pure reorderings keep both equal
                    assert!(cur.0 <= prev.0, "EFCanon increased np in {src}");
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn discarding_a_cancelled_diverger_terminates_weakly() {
        // (\y. star) applied to a cancelled thunked diverger: the weight
        // 0 survives in weak mode and the whole program stops at 0*star.
        let ya = r"Y(\x : M u. [b + !x])";
        let five = format!(r"(\y. star) ((\x. x + {{-1}}*x) [{ya}])");
        let t = parse_term(&five).unwrap();
        let weak = normalize(&t, Mode::Weak, op(), 1000);
        assert!(!weak.fuel_exhausted);
        let expect = parse_term("0*star").unwrap();
        assert!(weak.term.alpha_eq(&expect), "got {}", weak.term);
        // strict mode collapses the cancelled argument to the empty sum
        let strict = normalize(&t, Mode::Strict, op(), 1000);
        assert!(strict.term.alpha_eq(&Term::zero()), "got {}", strict.term);
    }

    #[test]
    fn forcing_a_cancelled_diverger_diverges_weakly() {
        // replacing the discard by a force re-enters the diverger: weak
        // mode never finishes, strict mode still collapses to zero.
        let ya = r"Y(\x : M u. [b + !x])";
        let six = format!(r"(\y. !y) ((\x. x + {{-1}}*x) [{ya}])");
        let t = parse_term(&six).unwrap();
        let weak = normalize(&t, Mode::Weak, op(), 200);
        assert!(weak.fuel_exhausted);
        let strict = normalize(&t, Mode::Strict, op(), 1000);
        assert!(!strict.fuel_exhausted);
        assert!(strict.term.alpha_eq(&Term::zero()), "got {}", strict.term);
    }

    #[test]
    fn strict_fix_difference_has_two_separated_branches() {
        // t - t for an unfolding fixpoint: cancelling first yields the
        // empty sum, unfolding first strands the unfolded copy.
        let yb = r"Y(\x : M u. [b + !x])";
        let t = parse_term(&format!("{yb} + {{-1}}*{yb}")).unwrap();
        let rs = reducts(&t, Mode::Strict, op());
        // branch A: the canonicalization step cancels everything
        let cancel = rs
            .iter()
            .find(|s| s.rule == RuleId::EFCanon)
            .expect("cancellation branch");
        assert!(cancel.term.alpha_eq(&Term::zero()));
        // branch B: unfold the left copy first, then normalize
        let unfold = rs
            .iter()
            .find(|s| s.rule == RuleId::BY && s.pos == Position(vec![0]))
            .expect("unfolding branch");
        let n = normalize(&unfold.term, Mode::Strict, op(), 1000);
        assert!(!n.fuel_exhausted);
        assert!(n.term.alpha_eq(&parse_term("b").unwrap()), "got {}", n.term);
        // the two endpoints are distinct normal forms
        assert!(is_normal(&Term::zero(), Mode::Strict, op()));
        assert!(is_normal(&n.term, Mode::Strict, op()));
        assert!(!n.term.alpha_eq(&Term::zero()));
    }

    #[test]
    fn weight_flattening_inside_context() {
        // nested weight pulled out under an application spine
        let t = parse_term("x ((2*y) z)").unwrap();
        let s = next_step(&t, Mode::Strict, op()).unwrap();
        assert_eq!(s.rule, RuleId::A3);
        assert!(s.term.alpha_eq(&parse_term("x (2*(y z))").unwrap()));
        let s2 = next_step(&s.term, Mode::Strict, op()).unwrap();
        assert_eq!(s2.rule, RuleId::A4);
        assert!(s2.term.alpha_eq(&parse_term("2*(x (y z))").unwrap()));
    }

    #[test]
    fn normal_forms_are_stable() {
        for src in ["y + z", "0*x", r"\x : T. x", "[x + y]", "fst <!a, b>", "star"] {
            let t = parse_term(src).unwrap();
            let mode = if src == "0*x" { Mode::Weak } else { Mode::Strict };
            let n = normalize(&t, mode, op(), 100);
            let again = normalize(&n.term, mode, op(), 100);
            assert!(n.term.alpha_eq(&again.term));
            assert!(again.steps.is_empty());
        }
    }

    #[test]
    fn reduction_preserves_types() {
        use crate::types::{ctx_of, find_type_break, infer};
        let cases = [
            (r"(\x : M T. <!x, star>) [star + star]", vec![]),
            (r"(\x : bit. if x then n1 else n0) tt", vec![]),
            (r"(\f : T -> T. f (f star)) (\x : T. x)", vec![]),
            ("fst <succ n1, tt> + pred n2", vec![]),
            (r"!((\x : M bit. x) [iszero n0])", vec![]),
            (r"(\x : M u. 2*!x + {1/2}*!x) [y + z]", vec![("y", "u"), ("z", "u")]),
        ];
        for (src, assumes) in cases {
            let t = parse_term(src).unwrap();
            let pairs: Vec<(String, crate::term::Type)> = assumes
                .iter()
                .map(|(n, ty)| (n.to_string(), crate::parse::parse_type(ty).unwrap()))
                .collect();
            let ctx = ctx_of(&pairs);
            let ty = infer(&ctx, &t.strip_ascriptions()).unwrap_or_else(|e| panic!("{src}: {e}"));
            for mode in [Mode::Strict, Mode::Weak] {
                let n = normalize(&t, mode, op(), 1000);
                assert!(!n.fuel_exhausted, "fuel exhausted on {src}");
                let terms: Vec<Term> = n.steps.iter().map(|s| s.term.clone()).collect();
                if let Some((i, e)) = find_type_break(&ctx, &ty, terms.iter()) {
                    panic!("{src} broke its type at step {i}: {e}");
                }
            }
        }
    }

    #[test]
    fn trace_positions_address_real_subterms() {
        let t = parse_term(r"(\x. \f. (f !x) !x) [y + z]").unwrap();
        let mut cur = t.clone();
        let n = normalize(&t, Mode::Strict, op(), 1000);
        for step in &n.steps {
            // the position must exist in the term being stepped
            assert!(cur.subterm_at(&step.pos).is_some(), "bad position {}", step.pos);
            cur = step.term.clone();
        }
    }
}
