//! The acceptance gate: twelve checks, one test each. Every test
//! prints a single `criterion NN: PASS/FAIL - detail` line (run with
//! `cargo test --test acceptance -- --nocapture` to see them all;
//! the harness shows the lines of failing tests regardless).
//!
//! Two checks fail by design and the tests say why: the weak-mode
//! rejoin of the cancelled fixpoint stream does not exist (its
//! absence is what keeps the weak theory consistent), and the
//! sum-of-branches measurement operator does not reduce to the
//! diagonal it is claimed to compute. Both failures print the
//! machine-checked analysis before panicking.

use std::collections::{BTreeMap, VecDeque};
use std::time::Instant;

use alc::canon::{canonicalize, collect_lincomb};
use alc::denote::{denote, soundness_check, Coeff, Elem, Model, SemValue};
use alc::equiv::{ax_equiv, Verdict};
use alc::gen::{self, Gen};
use alc::parse::{parse_term, parse_type};
use alc::prelude;
use alc::rewrite::{
    join, next_step, normalize, reachable_normal_forms, reducts, Policy, RuleId,
};
use alc::scalar::Scalar;
use alc::term::{Term, Type};
use alc::types::{check, ctx_of, infer, Ctx, TypeError};
use alc::Mode;

fn report(n: u32, ok: bool, detail: &str) {
    println!("criterion {n:02}: {} - {detail}", if ok { "PASS" } else { "FAIL" });
}

fn empty() -> Ctx {
    ctx_of(&[])
}

fn base_ctx() -> Ctx {
    ctx_of(&[
        ("y".to_string(), parse_type("u").unwrap()),
        ("z".to_string(), parse_type("u").unwrap()),
    ])
}

/// Equality modulo commuting and regrouping sums.
fn ac_eq(a: &Term, b: &Term, mode: Mode) -> bool {
    canonicalize(a, mode).alpha_eq(&canonicalize(b, mode))
}

fn yb_star() -> Term {
    prelude::yb(&Term::Star, &Type::Top)
}

/// Canonical weight of `star` as a bare summand of `t`.
fn star_weight(t: &Term, mode: Mode) -> Scalar {
    let (entries, _) = collect_lincomb(&canonicalize(t, mode));
    entries
        .into_iter()
        .filter(|(_, u)| u.alpha_eq(&Term::Star))
        .fold(Scalar::zero(), |acc, (k, _)| acc + k)
}

/// Every term reachable within `cap` node expansions.
// Breadth-first, so a divergent branch cannot eat the whole budget.
fn reachable_terms(t: &Term, mode: Mode, cap: usize) -> Vec<Term> {
    let mut seen: Vec<Term> = vec![t.clone()];
    let mut queue = VecDeque::from([t.clone()]);
    let mut expansions = 0;
    while let Some(u) = queue.pop_front() {
        if expansions >= cap {
            break;
        }
        expansions += 1;
        for step in reducts(&u, mode, Policy::operational()) {
            if !seen.iter().any(|s| s.alpha_eq(&step.term)) {
                seen.push(step.term.clone());
                queue.push_back(step.term);
            }
        }
    }
    seen
}

#[test]
fn criterion_01_distribution_goldens() {
    let ctx = base_ctx();
    let cases = [
        (
            r"(\x : u. \f : u -> u -> u. (f x) x) (y + z)",
            r"(\f : u -> u -> u. (f y) y) + (\f : u -> u -> u. (f z) z)",
        ),
        (
            r"(\x : M u. \f : u -> u -> u. (f !x) !x) [y + z]",
            r"(\f : u -> u -> u. (f y) y) + (\f : u -> u -> u. (f y) z)
              + (\f : u -> u -> u. (f z) y) + (\f : u -> u -> u. (f z) z)",
        ),
    ];
    let mut times = Vec::new();
    for (src, want_src) in cases {
        let t = parse_term(src).unwrap();
        infer(&ctx, &t).unwrap();
        let want = parse_term(want_src).unwrap();
        let started = Instant::now();
        let n = normalize(&t, Mode::Strict, Policy::operational(), 1000);
        let elapsed = started.elapsed();
        assert!(!n.fuel_exhausted, "{src} exhausted its fuel");
        assert!(
            ac_eq(&n.term, &want, Mode::Strict),
            "{src} normalized to {} instead of {want}",
            n.term
        );
        assert!(elapsed.as_secs_f64() < 1.0, "{src} took {elapsed:?}");
        times.push(elapsed);
    }
    report(
        1,
        true,
        &format!(
            "both distribution examples reach their frozen normal forms \
             modulo sum regrouping (strict, fuel 1000) in {:?} and {:?}",
            times[0], times[1]
        ),
    );
}

#[test]
fn criterion_02_fixpoint_unfolds_in_four_steps() {
    let yb = yb_star();
    let want = Term::sum(Term::Star, yb.clone());
    let mut t = yb;
    let mut rules = Vec::new();
    for _ in 0..4 {
        let step = next_step(&t, Mode::Weak, Policy::operational()).expect("a reduct");
        rules.push(step.rule);
        t = step.term;
        if ac_eq(&t, &want, Mode::Weak) {
            break;
        }
    }
    assert!(
        ac_eq(&t, &want, Mode::Weak),
        "after {rules:?} the term is {t}, not the unfolding"
    );
    assert_eq!(rules, vec![RuleId::BY, RuleId::B1, RuleId::B2, RuleId::B2]);
    report(
        2,
        true,
        "the fixpoint stream unfolds to star + itself in 4 steps, \
         rules BY, B1, B2, B2 exactly",
    );
}

#[test]
fn criterion_03_cancelled_stream_endpoints() {
    let yb = yb_star();
    let t = Term::sum(yb.clone(), Term::scale(Scalar::int(-1), yb.clone()));

    // Strict half: both contradictory endpoints are reachable.
    let (normals, _) = reachable_normal_forms(&t, Mode::Strict, Policy::operational(), 200);
    let has_zero = normals.iter().any(|n| matches!(n, Term::Zero(_)));
    let has_b = normals.iter().any(|n| n.alpha_eq(&Term::Star));
    assert!(
        has_zero && has_b,
        "strict endpoints missing: {normals:?}"
    );

    // Weak half: the merge branch and the unfold branch.
    let d1 = Term::scale(Scalar::int(0), yb.clone());
    let d2 = Term::sum(Term::Star, d1.clone());
    let seen = reachable_terms(&t, Mode::Weak, 2000);
    assert!(
        seen.iter().any(|u| ac_eq(u, &d1, Mode::Weak)),
        "merge branch unreachable"
    );
    assert!(
        seen.iter().any(|u| ac_eq(u, &d2, Mode::Weak)),
        "unfold branch unreachable"
    );

    // The weight of the bare summand star never changes under any
    // weak step, so the branches can never meet. Check the invariant
    // over everything reachable from each branch.
    let from_d1 = reachable_terms(&d1, Mode::Weak, 150);
    let from_d2 = reachable_terms(&d2, Mode::Weak, 150);
    let zeros = from_d1.iter().all(|u| star_weight(u, Mode::Weak) == Scalar::zero());
    let ones = from_d2.iter().all(|u| star_weight(u, Mode::Weak) == Scalar::int(1));
    assert!(zeros && ones, "the star-weight invariant broke");

    // The boxed variant does rejoin: boxing keeps the stream inert,
    // so cancellation is the only move.
    let boxed = parse_term(r"(\x : M T. x + {-1}*x) [Y(\w : M T. [star + !w])]").unwrap();
    let (boxed_normals, boxed_cut) =
        reachable_normal_forms(&boxed, Mode::Weak, Policy::operational(), 100);
    let boxed_ok = !boxed_cut && boxed_normals.len() == 1;

    let out = join(&d1, &d2, Mode::Weak, Policy::operational(), 500);
    if out.common.is_none() {
        report(
            3,
            false,
            "the weak branches admit no join (the strict half passed)",
        );
        println!("  strict half: endpoints zero and star both reached within 200 expansions");
        println!("  weak half: join(0*Yb, star + 0*Yb) not found within 500 expansions");
        println!(
            "  analysis: the canonical weight of the bare summand star is \
             invariant under every weak step (checked {} terms reachable \
             from the merge branch, all weight 0, and {} from the unfold \
             branch, all weight 1), so the branches stay apart at any \
             fuel. A join would equate star + 0*Yb with 0*Yb, which is \
             the exact collapse the weak weight discipline exists to \
             prevent; weak confluence holds only for the fixpoint-free \
             fragment. The boxed variant (\\x : M T. x + {{-1}}*x)[Yb] \
             does settle: its one weak normal form is 0*[Yb] (checked: {}).",
            from_d1.len(),
            from_d2.len(),
            if boxed_ok { "yes" } else { "no" },
        );
        panic!("criterion 03: the weak-mode join does not exist; analysis above");
    }
    assert!(boxed_ok);
    report(3, true, "both halves of the endpoint exploration agree");
}

#[test]
fn criterion_04_progress_and_preservation() {
    let corpus = gen::corpus(11, 1000, 25, false);
    assert_eq!(corpus.len(), 1000);
    let ctx = empty();
    let mut steps = 0usize;
    let mut tolerated = 0usize;
    let mut combinations = 0usize;
    for (raw, ty) in &corpus {
        assert!(raw.free_vars().is_empty(), "{raw} is not closed");
        check(&ctx, raw, ty).expect("corpus term typechecks");
        // The step relation is defined on ascription-free terms.
        let t = &raw.strip_ascriptions();
        for mode in [Mode::Weak, Mode::Strict] {
            let rs = reducts(t, mode, Policy::operational());
            if rs.is_empty() && !t.is_value() {
                // Normal non-values must be canonical weighted sums
                // of values (the shape the value grammar is closed
                // under once sums and weights settle).
                let (entries, _) = collect_lincomb(&canonicalize(t, mode));
                assert!(
                    entries.iter().all(|(_, u)| u.is_value()),
                    "{t} is normal in {mode} mode but not a value combination"
                );
                combinations += 1;
            }
            for step in rs {
                steps += 1;
                match check(&ctx, &step.term, ty) {
                    Ok(()) => {}
                    Err(TypeError::NeedsAnnotation { .. }) => tolerated += 1,
                    Err(e) => panic!(
                        "{t} stepped by {:?} to {} which fails its type: {e}",
                        step.rule, step.term
                    ),
                }
            }
        }
    }
    report(
        4,
        true,
        &format!(
            "1000 closed terms: each is a value, a weighted sum of values \
             ({combinations} term-mode pairs), or reducible; {steps} one-step \
             reducts re-check at the source type ({tolerated} only \
             re-checkable modulo a zero annotation dropped by absorption)"
        ),
    );
}

#[test]
fn criterion_05_normalization_and_measure() {
    let corpus = gen::corpus(11, 1000, 25, false);
    let mut a_steps = 0usize;
    let mut canon_steps = 0usize;
    let mut reorders = 0usize;
    for (t, _) in &corpus {
        for mode in [Mode::Weak, Mode::Strict] {
            let n = normalize(t, mode, Policy::operational(), 100_000);
            assert!(!n.fuel_exhausted, "{t} exhausted fuel in {mode} mode");
            let mut prev = t.clone();
            for step in &n.steps {
                let before = prev.measure();
                let after = step.term.measure();
                if step.rule.is_linearity() {
                    a_steps += 1;
                    assert!(
                        after < before,
                        "{:?} did not shrink the measure on {prev}",
                        step.rule
                    );
                } else if step.rule == RuleId::EFCanon {
                    canon_steps += 1;
                    assert!(
                        after <= before,
                        "canonicalization grew the measure on {prev}"
                    );
                    if after == before {
                        // Pure reorder: no weight or fusion content,
                        // only the sum order changed.
                        reorders += 1;
                    }
                }
                prev = step.term.clone();
            }
        }
    }
    report(
        5,
        true,
        &format!(
            "1000 terms normalize in both modes without fuel exhaustion; \
             (np, cx) strictly decreases on all {a_steps} linearity steps \
             and never increases on {canon_steps} weight-canonicalization \
             steps ({reorders} of those only reorder sums)"
        ),
    );
}

#[test]
fn criterion_06_one_step_diamonds_close() {
    let corpus = gen::corpus(11, 1000, 25, false);
    let mut pairs = 0usize;
    for (raw, _) in &corpus {
        let t = raw.strip_ascriptions();
        let rs = reducts(&t, Mode::Strict, Policy::operational());
        // Every reduct rewrites to a normal form; confluence makes
        // that normal form unique, so divergent one-step reducts must
        // come back to the same place.
        let normals: Vec<Term> = rs
            .iter()
            .map(|s| {
                let n = normalize(&s.term, Mode::Strict, Policy::operational(), 100_000);
                assert!(!n.fuel_exhausted);
                canonicalize(&n.term, Mode::Strict)
            })
            .collect();
        for i in 0..normals.len() {
            for j in (i + 1)..normals.len() {
                pairs += 1;
                assert!(
                    normals[i].alpha_eq(&normals[j]),
                    "reducts of {t} end at distinct normal forms: {} vs {}",
                    normals[i],
                    normals[j]
                );
            }
        }
    }
    report(
        6,
        true,
        &format!(
            "all {pairs} one-step reduct pairs over 1000 strict fixpoint-free \
             terms share a unique normal form"
        ),
    );
}

#[test]
fn criterion_07_weak_zero_is_not_the_empty_sum() {
    let drop_term = prelude::lookup("drop_cancelled").unwrap();
    let force_term = prelude::lookup("force_cancelled").unwrap();

    // Discarding the cancelled stream leaves an inert zero weight.
    let n = normalize(&drop_term, Mode::Weak, Policy::operational(), 1000);
    assert!(!n.fuel_exhausted);
    let want = Term::scale(Scalar::int(0), Term::Star);
    assert!(
        ac_eq(&n.term, &want, Mode::Weak),
        "discarding normalized to {}",
        n.term
    );

    // Forcing it unfolds forever and never reaches the empty sum.
    let m = normalize(&force_term, Mode::Weak, Policy::operational(), 2000);
    assert!(m.fuel_exhausted, "forcing unexpectedly settled at {}", m.term);
    for step in &m.steps {
        assert!(
            !matches!(canonicalize(&step.term, Mode::Weak), Term::Zero(_)),
            "forcing passed through the empty sum"
        );
    }

    // 0*u and the empty sum: equal strictly, separated weakly.
    let ctx = empty();
    for (u, ty_src) in [(Term::Star, "T"), (Term::thunk(Term::Star), "M T")] {
        let zero_weighted = Term::scale(Scalar::int(0), u);
        let nothing = Term::zero_at(parse_type(ty_src).unwrap());
        let ty = parse_type(ty_src).unwrap();
        let strict = ax_equiv(&ctx, &zero_weighted, &nothing, &ty, Mode::Strict, 1000);
        let weak = ax_equiv(&ctx, &zero_weighted, &nothing, &ty, Mode::Weak, 1000);
        assert_eq!(strict.verdict, Verdict::Equal, "at {ty_src}");
        assert_eq!(weak.verdict, Verdict::NotEqual, "at {ty_src}");
    }
    report(
        7,
        true,
        "discarding the cancelled stream gives 0*star; forcing it never \
         settles and never passes through the empty sum; 0*u is equal to \
         the empty sum strictly and separated from it weakly",
    );
}

#[test]
fn criterion_08_gate_involution_and_measurement() {
    let ctx = empty();
    let qb = prelude::qbool();
    let fuel = 10_000;

    // The involution, with exact quadratic scalars.
    for basis in ["qtt", "qff"] {
        let twice = prelude::expand(&parse_term(&format!("H (H {basis})")).unwrap());
        let target = prelude::lookup(basis).unwrap();
        let r = ax_equiv(&ctx, &twice, &target, &qb, Mode::Strict, fuel);
        assert_eq!(r.verdict, Verdict::Equal, "H (H {basis})");
    }

    // The claimed diagonal of the 3/5, 4/5 density matrix.
    let a = Scalar::ratio(3, 5);
    let b = Scalar::ratio(4, 5);
    let dens = prelude::dens(&a, &b);
    let diag = prelude::diag_claim(&a, &b);
    let applied = Term::app(prelude::lookup("P").unwrap(), dens.clone());
    let n = normalize(&applied, Mode::Strict, Policy::operational(), fuel);
    assert!(!n.fuel_exhausted);
    let diag_n = normalize(&diag, Mode::Strict, Policy::operational(), fuel);

    if !ac_eq(&n.term, &diag_n.term, Mode::Strict) {
        report(
            8,
            false,
            "the involution holds with exact quadratic scalars, but the \
             sum-of-branches measurement does not reduce to the diagonal",
        );
        println!("  measured term normalizes to: {}", n.term);
        println!("  the claimed diagonal is:     {}", diag_n.term);
        println!(
            "  analysis: the operator feeds the whole density row to each \
             selector slot, so the cross weights 12/25 survive next to the \
             diagonal 9/25 and 16/25 instead of vanishing."
        );
        let probe = |op: Term| {
            let t = Term::app(
                Term::app(Term::app(op, prelude::lookup("qtt").unwrap()), Term::thunk(Term::Star)),
                Term::thunk(Term::Star),
            );
            denote(&ctx, &BTreeMap::new(), &t, Mode::Strict, Model::Strong)
                .map(|(e, _)| e)
                .unwrap()
        };
        println!(
            "  observed at the first basis selector: {} against {} claimed",
            probe(Term::app(prelude::lookup("P").unwrap(), dens.clone())),
            probe(diag.clone()),
        );
        let fn_ty = Type::arrow(qb.clone(), qb.clone());
        let corrected = Term::app(prelude::lookup("Pdiag").unwrap(), dens);
        let r = ax_equiv(&ctx, &corrected, &diag, &fn_ty, Mode::Strict, fuel);
        println!(
            "  the per-basis probe operator does reach the diagonal \
             (verdict: {}); the discrepancy is in the operator as written.",
            r.verdict
        );
        assert_eq!(r.verdict, Verdict::Equal);
        panic!("criterion 08: the measurement operator misses its diagonal; analysis above");
    }
    report(8, true, "involution and measurement both land exactly");
}

#[test]
fn criterion_09_rewrites_preserve_denotation() {
    let pairings = [(Mode::Weak, Model::Weak), (Mode::Strict, Model::Strong)];
    let points = [0u64, 1, 2];

    // The pinned reduction examples first. Their type is a function
    // type, which the checker cannot compare pointwise, so each is
    // also applied to a closed selector to give the same trace an
    // observable tail end.
    let ctx = base_ctx();
    let goldens = [
        parse_term(r"(\x : u. \f : u -> u -> u. (f x) x) (y + z)").unwrap(),
        parse_term(r"(\x : M u. \f : u -> u -> u. (f !x) !x) [y + z]").unwrap(),
    ];
    let selector = parse_term(r"\a : u. \b : u. a").unwrap();
    for t in &goldens {
        for (mode, model) in pairings {
            let r = soundness_check(&ctx, t, mode, model, 2000, &points).unwrap();
            assert!(r.ok(), "{t} in {mode}: {:?}", r.failures);
            let applied = Term::app(t.clone(), selector.clone());
            let r = soundness_check(&ctx, &applied, mode, model, 2000, &points).unwrap();
            assert!(r.ok(), "{applied} in {mode}: {:?}", r.failures);
            assert!(r.compared > 0, "{applied} was never actually compared");
        }
    }
    // Ten unfolding cycles of the divergent stream. Every comparison
    // along this trace is inconclusive by construction (the fixpoint
    // is approximate), so the walk only certifies the absence of a
    // confirmed violation; longer walks add cost, not evidence.
    let yb = yb_star();
    let r = soundness_check(&empty(), &yb, Mode::Weak, Model::Weak, 40, &points).unwrap();
    assert!(r.ok(), "{:?}", r.failures);

    // Then a random corpus generated directly at observable types.
    let observable_targets = [
        parse_type("T").unwrap(),
        parse_type("bit").unwrap(),
        parse_type("int").unwrap(),
        parse_type("M T").unwrap(),
        parse_type("M bit").unwrap(),
        parse_type("M int").unwrap(),
    ];
    let mut checked = 0usize;
    let mut compared = 0usize;
    let mut inconclusive = 0usize;
    for (k, ty) in (0..90).flat_map(|k| observable_targets.iter().map(move |ty| (k, ty))) {
        let mut g = Gen::new(1700 + k);
        let t = g.term_of(&[], ty, 12);
        checked += 1;
        for (mode, model) in pairings {
            let r = soundness_check(&empty(), &t, mode, model, 2000, &points).unwrap();
            assert!(r.ok(), "{t} in {mode} mode: {:?}", r.failures);
            compared += r.compared;
            inconclusive += r.inconclusive;
        }
    }
    assert!(checked >= 500, "only {checked} observable corpus terms");
    report(
        9,
        true,
        &format!(
            "denotation preserved along both pinned traces, the fixpoint \
             unfolding, and {checked} random closed terms ({compared} \
             step-and-environment comparisons, {inconclusive} inconclusive \
             under approximate fixpoints, 0 violations)"
        ),
    );
}

#[test]
fn criterion_10_fixpoint_model_behaviors() {
    let ctx = empty();
    let env = BTreeMap::new();
    let self_force = parse_term(r"Y(\x : M T. [!x])").unwrap();

    let (strong, approx) = denote(&ctx, &env, &self_force, Mode::Strict, Model::Strong).unwrap();
    assert_eq!(strong, Elem::Bottom);
    assert!(!approx, "the constant chain should stabilize exactly");

    let (weak, _) = denote(&ctx, &env, &self_force, Mode::Weak, Model::Weak).unwrap();
    let unit_coeff = match &weak {
        Elem::Weak { map, default } => map
            .get(&SemValue::Unit)
            .cloned()
            .unwrap_or_else(|| default.clone()),
        Elem::Fin(map) => Coeff::Fin(map.get(&SemValue::Unit).cloned().unwrap_or_else(Scalar::zero)),
        Elem::Bottom => panic!("the weak model has no bottom"),
    };
    assert_eq!(unit_coeff, Coeff::Fin(Scalar::zero()));

    let counter = parse_term(r"Y(\x : M int. [n0 + succ !x])").unwrap();
    let (ones, _) = denote(&ctx, &env, &counter, Mode::Weak, Model::Weak).unwrap();
    for k in 0..=10u64 {
        let c = match &ones {
            Elem::Weak { map, default } => map
                .get(&SemValue::Nat(k))
                .cloned()
                .unwrap_or_else(|| default.clone()),
            _ => panic!("expected a weak element, got {ones}"),
        };
        assert_eq!(c, Coeff::Fin(Scalar::int(1)), "coefficient at {k}");
    }
    report(
        10,
        true,
        "the self-forcing stream is bottom strongly and all-zeros weakly; \
         the counting stream is all-ones at points 0..=10",
    );
}

#[test]
fn criterion_11_iterated_application_matches_the_polynomial() {
    // Independent oracle: a weighted sum of point masses at n_i,
    // raised by iterated application to sum(beta_i * alpha^n_i).
    fn oracle(spec: &[(i64, u32)], alpha: &Scalar) -> Scalar {
        spec.iter().fold(Scalar::zero(), |acc, (beta, n)| {
            acc + Scalar::int(*beta) * alpha.pow(*n)
        })
    }
    fn run(spec: &[(i64, u32)], alpha: &Scalar) {
        let nums = spec
            .iter()
            .map(|(beta, n)| format!("{beta}*n{n}"))
            .collect::<Vec<_>>()
            .join(" + ");
        let src = format!("!(Pow [{nums}] [{{{alpha}}}*star])");
        let t = prelude::expand(&parse_term(&src).unwrap());
        let want = oracle(spec, alpha);
        for (mode, model) in [(Mode::Weak, Model::Weak), (Mode::Strict, Model::Strong)] {
            let (elem, _) = denote(&ctx_of(&[]), &BTreeMap::new(), &t, mode, model).unwrap();
            let got = match &elem {
                Elem::Fin(map) => map.get(&SemValue::Unit).cloned().unwrap_or_else(Scalar::zero),
                Elem::Weak { map, .. } => match map.get(&SemValue::Unit) {
                    Some(Coeff::Fin(k)) => k.clone(),
                    Some(Coeff::Omega) => panic!("{src} diverged"),
                    None => Scalar::zero(),
                },
                Elem::Bottom => panic!("{src} denoted bottom"),
            };
            assert_eq!(got, want, "{src} under the {model:?} model");
        }
    }

    run(&[(1, 2), (2, 3)], &Scalar::int(2));
    let mut g = Gen::new(23);
    let mut shown = Vec::new();
    for _ in 0..3 {
        let len = 1 + g.pick(2) as usize;
        let spec: Vec<(i64, u32)> = (0..len)
            .map(|_| (1 + g.pick(4) as i64, g.pick(5) as u32))
            .collect();
        let alpha = g.scalar();
        run(&spec, &alpha);
        shown.push(format!("{spec:?} at {alpha}"));
    }
    report(
        11,
        true,
        &format!(
            "the pinned square-and-cube case denotes star -> 20 and three \
             random cases match the polynomial oracle exactly: {}",
            shown.join("; ")
        ),
    );
}

#[test]
fn criterion_12_evaluation_order_translations_typecheck() {
    let mut ok = 0usize;
    for seed in 0..500u64 {
        let mut g = Gen::new(2000 + seed);
        let src_ctx = vec![
            ("y".to_string(), parse_type("u").unwrap()),
            ("f".to_string(), parse_type("u -> v").unwrap()),
        ];
        let want = g.fragment_ty(2);
        let t = g.fragment_term(&src_ctx, &want, 12);

        let by_name_ctx: Vec<(String, Type)> = src_ctx
            .iter()
            .map(|(x, a)| {
                (x.clone(), Type::m(prelude::call_by_name_type(a).unwrap()))
            })
            .collect();
        let translated = prelude::call_by_name(&t).unwrap();
        let want_n = prelude::call_by_name_type(&want).unwrap();
        check(&ctx_of(&by_name_ctx), &translated, &want_n)
            .unwrap_or_else(|e| panic!("by-name translation of {t}: {e}"));

        let by_value_ctx: Vec<(String, Type)> = src_ctx
            .iter()
            .map(|(x, a)| (x.clone(), prelude::call_by_value_type(a).unwrap()))
            .collect();
        let translated = prelude::call_by_value(&t).unwrap();
        let want_v = prelude::call_by_value_type(&want).unwrap();
        check(&ctx_of(&by_value_ctx), &translated, &want_v)
            .unwrap_or_else(|e| panic!("by-value translation of {t}: {e}"));
        ok += 1;
    }
    report(
        12,
        true,
        &format!(
            "{ok} random function-fragment terms translate under both \
             evaluation orders and check at the translated types"
        ),
    );
}
