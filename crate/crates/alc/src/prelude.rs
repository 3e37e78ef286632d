//! Library of closed definitions that source files pull in with
//! `#use prelude`, plus the term constructors behind them.
//!
//! Three families live here:
//!
//! - a quantum-gate simulation over thunked booleans: the basis values
//!   `qtt`/`qff`, superpositions built by [`ket`], the Hadamard gate `H`
//!   and its density-matrix lift `HD`, and two measurement operators
//!   (`P`, the literal sum-of-branches form, and `Pdiag`, the corrected
//!   form that actually projects onto the diagonal);
//! - recursion demos: `Exp`, which multiplies the weight of a thunked
//!   argument into the result once per unit of a numeric index, its
//!   uncurried wrapper `Pow`, and the divergence probes
//!   `drop_cancelled`/`force_cancelled`/`broken` built from the
//!   self-adding fixpoint [`yb`];
//! - translations of a small call-by-name / call-by-value source
//!   fragment into the calculus, for comparing evaluation orders.
//!
//! Every named definition is closed, so expanding names into a user
//! term by substitution is capture-safe.

use crate::parse::{parse_term, parse_type};
use crate::scalar::Scalar;
use crate::term::{Term, Type};

/// The type of thunked booleans: a two-argument selector over `M T`.
pub fn qbool() -> Type {
    parse_type("M T -> M T -> M T").expect("fixed type source parses")
}

fn mtop() -> Type {
    Type::m(Type::Top)
}

/// Selector returning its first argument: the `tt` of [`qbool`].
const QTT_SRC: &str = r"\x : M T. \y : M T. [!x]";

/// Selector returning its second argument: the `ff` of [`qbool`].
const QFF_SRC: &str = r"\x : M T. \y : M T. [!y]";

/// Hadamard gate on [`qbool`]: sends each basis selector to an even
/// superposition, with a sign flip on the second component of `qff`.
const H_SRC: &str = r"\x : M T -> M T -> M T. \a : M T. \b : M T.
    [!(x [{1/sqrt2}*(!a + !b)] [{1/sqrt2}*(!a + {-1}*(!b))])]";

/// Density-matrix form of the Hadamard gate: conjugates a selector
/// transformer by `H` on both sides.
const HD_SRC: &str = r"\x : (M T -> M T -> M T) -> M T -> M T -> M T.
    \y : M T -> M T -> M T. H (x (H y))";

/// One-sided conjugation `\x. H (x H)`. Does not typecheck: the inner
/// application feeds `H` itself where `x` expects a [`qbool`].
const HD_LITERAL_SRC: &str = r"\x : (M T -> M T -> M T) -> M T -> M T -> M T.
    H (x H)";

/// Measurement as a sum of the two cancelled-branch runs. Keeping the
/// sum outside the selector application double-counts weight that sits
/// on the diagonal; see `Pdiag` for the corrected operator.
const P_SRC: &str = r"\v : (M T -> M T -> M T) -> M T -> M T -> M T.
    \x : M T -> M T -> M T. \a : M T. \b : M T.
    [!(v x [!a] [(zero : T)] + v x [(zero : T)] [!b])]";

/// Measurement that probes the transformer once per basis selector and
/// reassembles a single diagonal selector from the two runs.
const PDIAG_SRC: &str = r"\v : (M T -> M T -> M T) -> M T -> M T -> M T.
    \x : M T -> M T -> M T. \a : M T. \b : M T.
    [!(x [!(v qtt [!a] [(zero : T)])] [!(v qff [(zero : T)] [!b])])]";

/// Iterated product: `Exp n x` forces `x` once per recursion level, so
/// a thunk carrying weight `k` comes out with weight `k^n`. The forced
/// copy is consumed by a constant function, which is what turns each
/// level's weight into a multiplicative factor.
const EXP_SRC: &str = r"Y(\f : M (int -> M T -> M T). [\n : int. \x : M T.
    if iszero n then [star] else [(\y : T. !(!f (pred n) x)) (!x)]])";

/// `Exp` with the recursive call forced directly in the else branch.
/// Does not typecheck: the branches disagree (`T` against `M T`).
const EXP_LITERAL_SRC: &str = r"Y(\f : M (int -> M T -> M T). [\n : int. \x : M T.
    if iszero n then [star] else !(!f (pred n) x)])";

/// Uncurried entry point for `Exp`: takes the index as a thunk.
const POW_SRC: &str = r"\x : M int. Exp (!x)";

/// A cancelled fixpoint handed to a function that discards it.
const DROP_CANCELLED_SRC: &str =
    r"(\y : M T. star) ((\x : M T. x + {-1}*x) [Y(\x : M T. [star + !x])])";

/// A cancelled fixpoint handed to a function that forces it.
const FORCE_CANCELLED_SRC: &str =
    r"(\y : M T. !y) ((\x : M T. x + {-1}*x) [Y(\x : M T. [star + !x])])";

/// A self-adding fixpoint minus itself.
const BROKEN_SRC: &str =
    r"Y(\x : M T. [star + !x]) + {-1}*(Y(\x : M T. [star + !x]))";

/// The source text of [`exp_literal`]'s ill-typed variant, for callers
/// that want to report the type error itself.
pub fn exp_literal_src() -> &'static str {
    EXP_LITERAL_SRC
}

/// The source text of the ill-typed one-sided conjugation.
pub fn hd_literal_src() -> &'static str {
    HD_LITERAL_SRC
}

/// Superposition `\x y. [a*!x + b*!y]` of the two basis selectors.
pub fn ket(a: &Scalar, b: &Scalar) -> Term {
    let body = Term::sum(
        Term::scale(a.clone(), Term::force(Term::var("x"))),
        Term::scale(b.clone(), Term::force(Term::var("y"))),
    );
    Term::lam("x", mtop(), Term::lam("y", mtop(), Term::thunk(body)))
}

/// Density matrix of [`ket`]`(a, b)` as a transformer of selectors:
/// applies its argument to the two matrix columns.
pub fn dens(a: &Scalar, b: &Scalar) -> Term {
    let aa = a.clone() * a.conj();
    let ab = a.clone() * b.conj();
    let ba = a.conj() * b.clone();
    let bb = b.clone() * b.conj();
    let col1 = Term::sum(
        Term::scale(aa, Term::force(Term::var("a"))),
        Term::scale(ab, Term::force(Term::var("b"))),
    );
    let col2 = Term::sum(
        Term::scale(ba, Term::force(Term::var("a"))),
        Term::scale(bb, Term::force(Term::var("b"))),
    );
    let body = Term::force(Term::app(
        Term::app(Term::var("x"), Term::thunk(col1)),
        Term::thunk(col2),
    ));
    Term::lam(
        "x",
        qbool(),
        Term::lam("a", mtop(), Term::lam("b", mtop(), Term::thunk(body))),
    )
}

/// The diagonal of [`dens`]`(a, b)`: keeps the two squared-magnitude
/// entries and drops the cross terms.
pub fn diag_claim(a: &Scalar, b: &Scalar) -> Term {
    let aa = a.clone() * a.conj();
    let bb = b.clone() * b.conj();
    let body = Term::force(Term::app(
        Term::app(
            Term::var("x"),
            Term::thunk(Term::scale(aa, Term::force(Term::var("a")))),
        ),
        Term::thunk(Term::scale(bb, Term::force(Term::var("b")))),
    ));
    Term::lam(
        "x",
        qbool(),
        Term::lam("a", mtop(), Term::lam("b", mtop(), Term::thunk(body))),
    )
}

/// The fixpoint `Y(\w : M ty. [b + !w])` that adds `b` to itself
/// forever. Picks a binder not free in `b`.
pub fn yb(b: &Term, ty: &Type) -> Term {
    let fv = b.free_vars();
    let mut w = "w".to_string();
    while fv.contains(&w) {
        w.push('\'');
    }
    let body = Term::thunk(Term::sum(b.clone(), Term::force(Term::var(&w))));
    Term::fix(Term::lam(&w, Type::m(ty.clone()), body))
}

/// [`yb`] without a binder annotation, for untyped exploration.
pub fn yb_untyped(b: &Term) -> Term {
    let fv = b.free_vars();
    let mut w = "w".to_string();
    while fv.contains(&w) {
        w.push('\'');
    }
    let body = Term::thunk(Term::sum(b.clone(), Term::force(Term::var(&w))));
    Term::fix(Term::lam_untyped(&w, body))
}

fn inv_sqrt2() -> Scalar {
    Scalar::sqrt2().inverse().expect("sqrt2 is invertible")
}

fn expand_with(defs: &[(&'static str, Term)], t: &Term) -> Term {
    let mut out = t.clone();
    let fv = out.free_vars();
    for (name, def) in defs {
        if fv.contains(*name) {
            out = out.subst(name, def);
        }
    }
    out
}

/// The named definitions, in dependency order, each fully expanded and
/// closed.
pub fn definitions() -> Vec<(&'static str, Term)> {
    let mut defs: Vec<(&'static str, Term)> = Vec::new();
    let add = |defs: &mut Vec<(&'static str, Term)>, name: &'static str, src: &str| {
        let raw = parse_term(src).expect("fixed definition source parses");
        let t = expand_with(defs, &raw);
        defs.push((name, t));
    };
    add(&mut defs, "qtt", QTT_SRC);
    add(&mut defs, "qff", QFF_SRC);
    let r = inv_sqrt2();
    defs.push(("qplus", ket(&r, &r)));
    defs.push(("qdens", dens(&r, &r)));
    defs.push(("qdiag", diag_claim(&r, &r)));
    add(&mut defs, "H", H_SRC);
    add(&mut defs, "HD", HD_SRC);
    add(&mut defs, "P", P_SRC);
    add(&mut defs, "Pdiag", PDIAG_SRC);
    add(&mut defs, "Exp", EXP_SRC);
    add(&mut defs, "Pow", POW_SRC);
    add(&mut defs, "drop_cancelled", DROP_CANCELLED_SRC);
    add(&mut defs, "force_cancelled", FORCE_CANCELLED_SRC);
    add(&mut defs, "broken", BROKEN_SRC);
    defs
}

/// Substitutes every free occurrence of a prelude name in `t` by its
/// definition. Bound occurrences of the same names are untouched.
pub fn expand(t: &Term) -> Term {
    expand_with(&definitions(), t)
}

/// Looks up one definition by name.
pub fn lookup(name: &str) -> Option<Term> {
    definitions()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t)
}

// ---- evaluation-order translations ----
//
// The source fragment is the function calculus with sums and scaling:
// variables, typed lambdas, applications, `s + t`, `k * s`, and `0`.
// Types are base names and arrows. Both translations land in the
// calculus proper and preserve typing; they differ in where the thunk
// constructor goes, which is exactly the call-by-name / call-by-value
// split.

/// Call-by-name type translation: an arrow's argument is a thunk.
pub fn call_by_name_type(ty: &Type) -> Result<Type, String> {
    match ty {
        Type::Base(n) => Ok(Type::Base(n.clone())),
        Type::Arrow(a, b) => Ok(Type::arrow(
            Type::m(call_by_name_type(a)?),
            call_by_name_type(b)?,
        )),
        other => Err(format!("{other} is outside the function fragment")),
    }
}

/// Call-by-name term translation: variables are forced, arguments are
/// thunked at the call site.
pub fn call_by_name(t: &Term) -> Result<Term, String> {
    match t {
        Term::Var(x) => Ok(Term::force(Term::var(x))),
        Term::Lam(x, Some(a), s) => Ok(Term::Lam(
            x.clone(),
            Some(Type::m(call_by_name_type(a)?)),
            Box::new(call_by_name(s)?),
        )),
        Term::Lam(_, None, _) => Err("binders must be annotated".to_string()),
        Term::App(s, u) => Ok(Term::app(call_by_name(s)?, Term::thunk(call_by_name(u)?))),
        Term::Sum(s, u) => Ok(Term::sum(call_by_name(s)?, call_by_name(u)?)),
        Term::Scale(k, s) => Ok(Term::scale(k.clone(), call_by_name(s)?)),
        Term::Zero(Some(a)) => Ok(Term::zero_at(call_by_name_type(a)?)),
        Term::Zero(None) => Ok(Term::zero()),
        other => Err(format!("{other} is outside the function fragment")),
    }
}

/// Call-by-value type translation: an arrow's result is suspended.
pub fn call_by_value_type(ty: &Type) -> Result<Type, String> {
    match ty {
        Type::Base(n) => Ok(Type::Base(n.clone())),
        Type::Arrow(a, b) => Ok(Type::arrow(
            call_by_value_type(a)?,
            Type::m(call_by_value_type(b)?),
        )),
        other => Err(format!("{other} is outside the function fragment")),
    }
}

/// Call-by-value term translation: bodies are thunked, applications
/// are forced.
pub fn call_by_value(t: &Term) -> Result<Term, String> {
    match t {
        Term::Var(x) => Ok(Term::var(x)),
        Term::Lam(x, Some(a), s) => Ok(Term::Lam(
            x.clone(),
            Some(call_by_value_type(a)?),
            Box::new(Term::thunk(call_by_value(s)?)),
        )),
        Term::Lam(_, None, _) => Err("binders must be annotated".to_string()),
        Term::App(s, u) => Ok(Term::force(Term::app(
            call_by_value(s)?,
            call_by_value(u)?,
        ))),
        Term::Sum(s, u) => Ok(Term::sum(call_by_value(s)?, call_by_value(u)?)),
        Term::Scale(k, s) => Ok(Term::scale(k.clone(), call_by_value(s)?)),
        Term::Zero(Some(a)) => Ok(Term::zero_at(call_by_value_type(a)?)),
        Term::Zero(None) => Ok(Term::zero()),
        other => Err(format!("{other} is outside the function fragment")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denote::{denote, Elem, Model, SemValue};
    use crate::equiv::{ax_equiv, Verdict};
    use crate::rewrite::{normalize, Policy};
    use crate::types::{ctx_of, infer};
    use crate::Mode;
    use std::collections::BTreeMap;

    fn fin<const N: usize>(entries: [(SemValue, Scalar); N]) -> Elem {
        Elem::Fin(entries.into_iter().collect())
    }

    fn ty(src: &str) -> Type {
        parse_type(src).unwrap()
    }

    #[test]
    fn every_definition_is_closed_and_typechecks_as_advertised() {
        let expected: BTreeMap<&str, Type> = [
            ("qtt", ty("M T -> M T -> M T")),
            ("qff", ty("M T -> M T -> M T")),
            ("qplus", ty("M T -> M T -> M T")),
            ("qdens", ty("(M T -> M T -> M T) -> M T -> M T -> M T")),
            ("qdiag", ty("(M T -> M T -> M T) -> M T -> M T -> M T")),
            ("H", ty("(M T -> M T -> M T) -> M T -> M T -> M T")),
            (
                "HD",
                ty("((M T -> M T -> M T) -> M T -> M T -> M T) \
                    -> (M T -> M T -> M T) -> M T -> M T -> M T"),
            ),
            (
                "P",
                ty("((M T -> M T -> M T) -> M T -> M T -> M T) \
                    -> (M T -> M T -> M T) -> M T -> M T -> M T"),
            ),
            (
                "Pdiag",
                ty("((M T -> M T -> M T) -> M T -> M T -> M T) \
                    -> (M T -> M T -> M T) -> M T -> M T -> M T"),
            ),
            ("Exp", ty("int -> M T -> M T")),
            ("Pow", ty("M int -> M T -> M T")),
            ("drop_cancelled", ty("T")),
            ("force_cancelled", ty("T")),
            ("broken", ty("T")),
        ]
        .into_iter()
        .collect();

        let defs = definitions();
        assert_eq!(defs.len(), expected.len());
        for (name, t) in &defs {
            assert!(t.free_vars().is_empty(), "{name} is not closed");
            let got = infer(&ctx_of(&[]), t).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(&got, &expected[name], "{name} has the wrong type");
        }

        let b = Term::var("b");
        let got = infer(&ctx_of(&[("b".into(), Type::Top)]), &yb(&b, &Type::Top)).unwrap();
        assert_eq!(got, Type::Top);
    }

    #[test]
    fn expansion_replaces_free_names_and_respects_binders() {
        let open = parse_term("H (H qtt)").unwrap();
        let closed = expand(&open);
        assert!(closed.free_vars().is_empty());
        assert_eq!(infer(&ctx_of(&[]), &closed).unwrap(), qbool());

        // A user binder named like a prelude entry shadows it.
        let shadowed = parse_term(r"(\H : T. H) star").unwrap();
        assert!(expand(&shadowed).alpha_eq(&shadowed));
    }

    #[test]
    fn the_gate_is_an_involution_on_basis_selectors() {
        for basis in ["qtt", "qff"] {
            let twice = expand(&parse_term(&format!("H (H {basis})")).unwrap());
            let target = lookup(basis).unwrap();
            let report = ax_equiv(&ctx_of(&[]), &twice, &target, &qbool(), Mode::Strict, 10_000);
            assert_eq!(report.verdict, Verdict::Equal, "H (H {basis}): {}", report.reason);
        }
    }

    #[test]
    fn literal_measurement_double_counts_diagonal_weight() {
        // Apply both operators to the even-superposition density matrix
        // and observe at the first basis selector. The diagonal entry
        // there weighs 1/2; the literal operator returns it twice.
        let measured = expand(&parse_term("P qdens qtt [star] [star]").unwrap());
        let claimed = expand(&parse_term("qdiag qtt [star] [star]").unwrap());

        let (got, approx) =
            denote(&ctx_of(&[]), &BTreeMap::new(), &measured, Mode::Strict, Model::Strong)
                .unwrap();
        assert!(!approx);
        let (want, approx) =
            denote(&ctx_of(&[]), &BTreeMap::new(), &claimed, Mode::Strict, Model::Strong)
                .unwrap();
        assert!(!approx);

        let point = |k: Scalar| {
            let inner = fin([(SemValue::Unit, k)]);
            fin([(SemValue::Mod(Box::new(inner)), Scalar::one())])
        };
        assert_eq!(got, point(Scalar::one()));
        assert_eq!(want, point(Scalar::ratio(1, 2)));
        assert_ne!(got, want);

        // The discrepancy is already visible in the normal forms.
        let p_applied = expand(&parse_term("P qdens").unwrap());
        let diag = lookup("qdiag").unwrap();
        let p_norm = normalize(&p_applied, Mode::Strict, Policy::equational(), 10_000);
        let d_norm = normalize(&diag, Mode::Strict, Policy::equational(), 10_000);
        assert!(!p_norm.term.alpha_eq(&d_norm.term));
    }

    #[test]
    fn corrected_measurement_projects_onto_the_diagonal() {
        let measured = expand(&parse_term("Pdiag qdens").unwrap());
        let diag = lookup("qdiag").unwrap();
        let report = ax_equiv(
            &ctx_of(&[]),
            &measured,
            &diag,
            &ty("(M T -> M T -> M T) -> M T -> M T -> M T"),
            Mode::Strict,
            10_000,
        );
        assert_eq!(report.verdict, Verdict::Equal, "{}", report.reason);
    }

    #[test]
    fn the_unaccumulated_iteration_source_is_ill_typed() {
        let t = parse_term(exp_literal_src()).unwrap();
        assert!(infer(&ctx_of(&[]), &t).is_err());
    }

    #[test]
    fn the_one_sided_conjugation_source_is_ill_typed() {
        let t = expand(&parse_term(hd_literal_src()).unwrap());
        assert!(infer(&ctx_of(&[]), &t).is_err());
    }

    #[test]
    fn forcing_the_power_wrapper_multiplies_weights() {
        let t = expand(&parse_term("!(Pow [n3] [2*star])").unwrap());
        let (got, _) =
            denote(&ctx_of(&[]), &BTreeMap::new(), &t, Mode::Strict, Model::Strong).unwrap();
        assert_eq!(got, fin([(SemValue::Unit, Scalar::int(8))]));
    }

    #[test]
    fn call_by_name_translation_simulates_its_source() {
        let ctx = ctx_of(&[("y".into(), ty("M u"))]);
        let src = parse_term(r"(\x : u. x + x) y").unwrap();
        let t = call_by_name(&src).unwrap();
        assert_eq!(infer(&ctx, &t).unwrap(), ty("u"));

        let reduced = call_by_name(&parse_term("y + y").unwrap()).unwrap();
        let lhs = normalize(&t, Mode::Strict, Policy::operational(), 10_000);
        let rhs = normalize(&reduced, Mode::Strict, Policy::operational(), 10_000);
        assert!(lhs.term.alpha_eq(&rhs.term));
    }

    #[test]
    fn call_by_value_translation_simulates_its_source() {
        let ctx = ctx_of(&[("y".into(), ty("u")), ("z".into(), ty("u"))]);
        let src = parse_term(r"(\x : u. x) (y + z)").unwrap();
        let t = call_by_value(&src).unwrap();
        assert_eq!(infer(&ctx, &t).unwrap(), ty("u"));

        // Call-by-value distributes the application over the sum before
        // substituting, so the translated term reduces to the sum of
        // the two variable instances.
        let reduced = call_by_value(&parse_term("y + z").unwrap()).unwrap();
        let lhs = normalize(&t, Mode::Strict, Policy::operational(), 10_000);
        let rhs = normalize(&reduced, Mode::Strict, Policy::operational(), 10_000);
        assert!(lhs.term.alpha_eq(&rhs.term));
    }
}
