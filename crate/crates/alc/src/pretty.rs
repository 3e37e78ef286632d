//! Rendering of types and terms in the concrete syntax.
//!
//! Precedence, loosest to tightest: lambda and conditional bodies
//! extend right as far as possible; then sums; then scalar weights;
//! then application (left-associative); then the prefix operators
//! `!`, `fst`, `snd`, `succ`, `pred`, `iszero`; then atoms. Types:
//! `->` is right-associative and loosest, `*` binds tighter, `M`
//! tightest. The printer emits the minimal parentheses that reparse
//! to the same tree.

use crate::scalar::Scalar;
use crate::term::{Term, Type};
use std::fmt;

fn type_prec(t: &Type, prec: u8, out: &mut String) {
    match t {
        Type::Arrow(a, b) => {
            let open = prec > 0;
            if open {
                out.push('(');
            }
            type_prec(a, 1, out);
            out.push_str(" -> ");
            type_prec(b, 0, out);
            if open {
                out.push(')');
            }
        }
        Type::Prod(a, b) => {
            let open = prec > 1;
            if open {
                out.push('(');
            }
            type_prec(a, 1, out);
            out.push_str(" * ");
            type_prec(b, 2, out);
            if open {
                out.push(')');
            }
        }
        Type::M(a) => {
            out.push_str("M ");
            type_prec(a, 2, out);
        }
        Type::Top => out.push('T'),
        Type::Bit => out.push_str("bit"),
        Type::Int => out.push_str("int"),
        Type::Base(n) => out.push_str(n),
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        type_prec(self, 0, &mut s);
        write!(f, "{s}")
    }
}

/// Scalar literal in term position: nonnegative integers are bare,
/// everything else goes in braces.
fn scalar_lit(k: &Scalar) -> String {
    use num_traits::Signed;
    if let Some(n) = k.as_integer() {
        if !n.is_negative() {
            return n.to_string();
        }
    }
    format!("{{{k}}}")
}

// Term precedence levels.
const P_TOP: u8 = 0; // lambda, if
const P_SUM: u8 = 1;
const P_SCALE: u8 = 2;
const P_APP: u8 = 3;
const P_PREFIX: u8 = 4;

fn prefix_op(t: &Term) -> Option<(&'static str, &Term)> {
    match t {
        Term::Force(a) => Some(("!", a)),
        Term::Fst(a) => Some(("fst ", a)),
        Term::Snd(a) => Some(("snd ", a)),
        Term::Succ(a) => Some(("succ ", a)),
        Term::Pred(a) => Some(("pred ", a)),
        Term::IsZero(a) => Some(("iszero ", a)),
        _ => None,
    }
}

fn term_prec(t: &Term, prec: u8, out: &mut String) {
    // Numeral chains print as literals.
    if let Some(n) = t.as_numeral() {
        out.push('n');
        out.push_str(&n.to_string());
        return;
    }
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Star => out.push_str("star"),
        Term::True => out.push_str("tt"),
        Term::False => out.push_str("ff"),
        Term::NZero => out.push_str("n0"),
        Term::Zero(None) => out.push_str("zero"),
        Term::Zero(Some(ty)) => {
            out.push_str("(zero : ");
            out.push_str(&ty.to_string());
            out.push(')');
        }
        Term::Lam(x, ann, b) => {
            let open = prec > P_TOP;
            if open {
                out.push('(');
            }
            out.push('\\');
            out.push_str(x);
            if let Some(ty) = ann {
                out.push_str(" : ");
                out.push_str(&ty.to_string());
            }
            out.push_str(". ");
            term_prec(b, P_TOP, out);
            if open {
                out.push(')');
            }
        }
        Term::If(c, a, b) => {
            let open = prec > P_TOP;
            if open {
                out.push('(');
            }
            out.push_str("if ");
            term_prec(c, P_SUM, out);
            out.push_str(" then ");
            term_prec(a, P_SUM, out);
            out.push_str(" else ");
            term_prec(b, P_TOP, out);
            if open {
                out.push(')');
            }
        }
        Term::Sum(a, b) => {
            let open = prec > P_SUM;
            if open {
                out.push('(');
            }
            term_prec(a, P_SCALE, out);
            out.push_str(" + ");
            term_prec(b, P_SUM, out);
            if open {
                out.push(')');
            }
        }
        Term::Scale(k, a) => {
            let open = prec > P_SCALE;
            if open {
                out.push('(');
            }
            out.push_str(&scalar_lit(k));
            out.push('*');
            term_prec(a, P_SCALE, out);
            if open {
                out.push(')');
            }
        }
        Term::App(f, a) => {
            let open = prec > P_APP;
            if open {
                out.push('(');
            }
            term_prec(f, P_APP, out);
            out.push(' ');
            term_prec(a, P_PREFIX, out);
            if open {
                out.push(')');
            }
        }
        _ => {
            if let Some((op, a)) = prefix_op(t) {
                let open = prec > P_PREFIX;
                if open {
                    out.push('(');
                }
                out.push_str(op);
                term_prec(a, P_PREFIX, out);
                if open {
                    out.push(')');
                }
                return;
            }
            match t {
                Term::Thunk(a) => {
                    out.push('[');
                    term_prec(a, P_TOP, out);
                    out.push(']');
                }
                Term::Pair(a, b) => {
                    out.push('<');
                    term_prec(a, P_TOP, out);
                    out.push_str(", ");
                    term_prec(b, P_TOP, out);
                    out.push('>');
                }
                Term::Y(a) => {
                    out.push_str("Y(");
                    term_prec(a, P_TOP, out);
                    out.push(')');
                }
                Term::Ascribe(a, ty) => {
                    out.push('(');
                    term_prec(a, P_TOP, out);
                    out.push_str(" : ");
                    out.push_str(&ty.to_string());
                    out.push(')');
                }
                _ => unreachable!("covered above"),
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        term_prec(self, P_TOP, &mut s);
        write!(f, "{s}")
    }
}
