//! Lexer and recursive-descent parser for the concrete syntax, plus
//! the `.alc` file format with its directive header.
//!
//! Grammar sketch (loosest to tightest):
//!
//! ```text
//! term   ::= '\' ident (':' type)? '.' term
//!          | 'if' sum 'then' sum 'else' term
//!          | sum
//! sum    ::= scale ('+' scale)*
//! scale  ::= scalar '*' scale | app
//! app    ::= prefix prefix*
//! prefix ::= ('!' | 'fst' | 'snd' | 'succ' | 'pred' | 'iszero') prefix | atom
//! atom   ::= ident | 'star' | 'tt' | 'ff' | numeral | 'zero'
//!          | '[' term ']' | '<' term ',' term '>' | 'Y' '(' term ')'
//!          | '(' term (':' type)? ')'
//! scalar ::= nonnegative-integer | '{' scalar-expr '}'
//! type   ::= ptype ('->' type)?
//! ptype  ::= mtype ('*' mtype)*
//! mtype  ::= 'M' mtype | 'T' | 'bit' | 'int' | ident | '(' type ')'
//! ```
//!
//! Scalar expressions inside braces support `+ - * /`, parentheses,
//! integers, and the constants `i` and `sqrt2`. Numerals `n0`, `n1`,
//! ... abbreviate `succ^k n0`. `//` comments run to end of line.

use crate::scalar::{Rat, Scalar};
use crate::term::{Term, Type};
use crate::Mode;
use num_bigint::BigInt;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Backslash,
    Dot,
    Colon,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Bang,
    Arrow,
    SemiSemi,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("parse error at line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let (line, col) = (self.line, self.col);
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                }
                b'/' if self.peek2() == Some(b'/') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == b'_' || c == b'\'' {
                            s.push(self.bump() as char);
                        } else {
                            break;
                        }
                    }
                    out.push((Tok::Ident(s), line, col));
                }
                b'0'..=b'9' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_digit() {
                            s.push(self.bump() as char);
                        } else {
                            break;
                        }
                    }
                    let n: BigInt = s.parse().expect("digits");
                    out.push((Tok::Int(n), line, col));
                }
                _ => {
                    self.bump();
                    let tok = match c {
                        b'\\' => Tok::Backslash,
                        b'.' => Tok::Dot,
                        b':' => Tok::Colon,
                        b'(' => Tok::LParen,
                        b')' => Tok::RParen,
                        b'[' => Tok::LBrack,
                        b']' => Tok::RBrack,
                        b'{' => Tok::LBrace,
                        b'}' => Tok::RBrace,
                        b'<' => Tok::Lt,
                        b'>' => Tok::Gt,
                        b',' => Tok::Comma,
                        b'+' => Tok::Plus,
                        b'*' => Tok::Star,
                        b'/' => Tok::Slash,
                        b'!' => Tok::Bang,
                        b';' if self.peek() == Some(b';') => {
                            self.bump();
                            Tok::SemiSemi
                        }
                        b'-' if self.peek() == Some(b'>') => {
                            self.bump();
                            Tok::Arrow
                        }
                        b'-' => Tok::Minus,
                        other => {
                            return Err(ParseError {
                                line,
                                col,
                                msg: format!("unexpected character {:?}", other as char),
                            })
                        }
                    };
                    out.push((tok, line, col));
                }
            }
        }
        Ok(out)
    }
}

const TYPE_KEYWORDS: &[&str] = &["M", "T", "bit", "int"];
const TERM_KEYWORDS: &[&str] = &[
    "fst", "snd", "succ", "pred", "iszero", "if", "then", "else", "star", "tt", "ff", "zero", "Y",
];

fn is_reserved(name: &str) -> bool {
    TYPE_KEYWORDS.contains(&name)
        || TERM_KEYWORDS.contains(&name)
        || numeral_value(name).is_some()
}

fn numeral_value(name: &str) -> Option<u64> {
    let digits = name.strip_prefix('n')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

pub struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: Lexer::new(src).tokens()?, pos: 0 })
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some((_, l, c)) => (*l, *c),
            None => self
                .toks
                .last()
                .map(|(_, l, c)| (*l, *c + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, msg: msg.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.err(format!("expected {what}, found {:?}", self.peek())))
        }
    }

    fn eat_ident(&mut self, kw: &str) -> bool {
        if let Some(Tok::Ident(s)) = self.peek() {
            if s == kw {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn at_ident(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    // ---- types ----

    pub fn parse_type(&mut self) -> Result<Type, ParseError> {
        let left = self.parse_prod_type()?;
        if self.eat(&Tok::Arrow) {
            let right = self.parse_type()?;
            Ok(Type::arrow(left, right))
        } else {
            Ok(left)
        }
    }

    fn parse_prod_type(&mut self) -> Result<Type, ParseError> {
        let mut t = self.parse_m_type()?;
        while self.eat(&Tok::Star) {
            let r = self.parse_m_type()?;
            t = Type::prod(t, r);
        }
        Ok(t)
    }

    fn parse_m_type(&mut self) -> Result<Type, ParseError> {
        if self.eat_ident("M") {
            let inner = self.parse_m_type()?;
            return Ok(Type::m(inner));
        }
        match self.bump() {
            Some(Tok::Ident(s)) => match s.as_str() {
                "T" => Ok(Type::Top),
                "bit" => Ok(Type::Bit),
                "int" => Ok(Type::Int),
                _ if is_reserved(&s) => Err(self.err(format!("reserved word {s:?} in type"))),
                _ => Ok(Type::Base(s)),
            },
            Some(Tok::LParen) => {
                let t = self.parse_type()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(t)
            }
            other => Err(self.err(format!("expected type, found {other:?}"))),
        }
    }

    // ---- scalar expressions ----

    fn parse_scalar_expr(&mut self) -> Result<Scalar, ParseError> {
        let mut acc = self.parse_scalar_mul()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc + self.parse_scalar_mul()?;
            } else if self.eat(&Tok::Minus) {
                acc = acc - self.parse_scalar_mul()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_scalar_mul(&mut self) -> Result<Scalar, ParseError> {
        let mut acc = self.parse_scalar_unary()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = acc * self.parse_scalar_unary()?;
            } else if self.eat(&Tok::Slash) {
                let d = self.parse_scalar_unary()?;
                let inv = d
                    .inverse()
                    .ok_or_else(|| self.err("division by zero in scalar expression"))?;
                acc = acc * inv;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_scalar_unary(&mut self) -> Result<Scalar, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(-self.parse_scalar_unary()?);
        }
        match self.bump() {
            Some(Tok::Int(n)) => Ok(Scalar::from_rat(Rat::from_integer(n))),
            Some(Tok::Ident(s)) if s == "i" => Ok(Scalar::i()),
            Some(Tok::Ident(s)) if s == "sqrt2" => Ok(Scalar::sqrt2()),
            Some(Tok::LParen) => {
                let v = self.parse_scalar_expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(v)
            }
            other => Err(self.err(format!("expected scalar, found {other:?}"))),
        }
    }

    // ---- terms ----

    pub fn parse_term(&mut self) -> Result<Term, ParseError> {
        if self.eat(&Tok::Backslash) {
            let name = match self.bump() {
                Some(Tok::Ident(s)) if !is_reserved(&s) => s,
                other => return Err(self.err(format!("expected binder name, found {other:?}"))),
            };
            let ann = if self.eat(&Tok::Colon) {
                Some(self.parse_type()?)
            } else {
                None
            };
            self.expect(&Tok::Dot, "'.' after binder")?;
            let body = self.parse_term()?;
            return Ok(Term::Lam(name, ann, Box::new(body)));
        }
        if self.eat_ident("if") {
            let c = self.parse_sum()?;
            if !self.eat_ident("then") {
                return Err(self.err("expected 'then'"));
            }
            let a = self.parse_sum()?;
            if !self.eat_ident("else") {
                return Err(self.err("expected 'else'"));
            }
            let b = self.parse_term()?;
            return Ok(Term::ite(c, a, b));
        }
        self.parse_sum()
    }

    fn parse_sum(&mut self) -> Result<Term, ParseError> {
        let mut t = self.parse_scale()?;
        while self.eat(&Tok::Plus) {
            let r = self.parse_scale()?;
            t = Term::sum(t, r);
        }
        Ok(t)
    }

    fn at_scalar(&self) -> bool {
        matches!(self.peek(), Some(Tok::Int(_)) | Some(Tok::LBrace))
    }

    fn parse_scale(&mut self) -> Result<Term, ParseError> {
        if self.at_scalar() {
            let k = match self.bump() {
                Some(Tok::Int(n)) => Scalar::from_rat(Rat::from_integer(n)),
                Some(Tok::LBrace) => {
                    let v = self.parse_scalar_expr()?;
                    self.expect(&Tok::RBrace, "'}'")?;
                    v
                }
                _ => unreachable!(),
            };
            self.expect(&Tok::Star, "'*' after scalar")?;
            let body = self.parse_scale()?;
            return Ok(Term::scale(k, body));
        }
        self.parse_app()
    }

    fn at_term_start(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => !matches!(s.as_str(), "then" | "else" | "M" | "T" | "bit" | "int"),
            Some(Tok::LParen) | Some(Tok::LBrack) | Some(Tok::Lt) | Some(Tok::Bang) => true,
            _ => false,
        }
    }

    fn parse_app(&mut self) -> Result<Term, ParseError> {
        let mut t = self.parse_prefix()?;
        while self.at_term_start() && !self.at_ident("if") {
            let arg = self.parse_prefix()?;
            t = Term::app(t, arg);
        }
        Ok(t)
    }

    fn parse_prefix(&mut self) -> Result<Term, ParseError> {
        if self.eat(&Tok::Bang) {
            return Ok(Term::force(self.parse_prefix()?));
        }
        for (kw, mk) in [
            ("fst", Term::fst as fn(Term) -> Term),
            ("snd", Term::snd),
            ("succ", Term::succ),
            ("pred", Term::pred),
            ("iszero", Term::iszero),
        ] {
            if self.at_ident(kw) {
                self.pos += 1;
                return Ok(mk(self.parse_prefix()?));
            }
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> Result<Term, ParseError> {
        match self.bump() {
            Some(Tok::Ident(s)) => match s.as_str() {
                "star" => Ok(Term::Star),
                "tt" => Ok(Term::True),
                "ff" => Ok(Term::False),
                "zero" => Ok(Term::zero()),
                "Y" => {
                    self.expect(&Tok::LParen, "'(' after Y")?;
                    let t = self.parse_term()?;
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(Term::fix(t))
                }
                _ => {
                    if let Some(n) = numeral_value(&s) {
                        return Ok(Term::numeral(n));
                    }
                    if is_reserved(&s) {
                        return Err(self.err(format!("reserved word {s:?} in term position")));
                    }
                    Ok(Term::Var(s))
                }
            },
            Some(Tok::LBrack) => {
                let t = self.parse_term()?;
                self.expect(&Tok::RBrack, "']'")?;
                Ok(Term::thunk(t))
            }
            Some(Tok::Lt) => {
                let a = self.parse_term()?;
                self.expect(&Tok::Comma, "','")?;
                let b = self.parse_term()?;
                self.expect(&Tok::Gt, "'>'")?;
                Ok(Term::pair(a, b))
            }
            Some(Tok::LParen) => {
                let t = self.parse_term()?;
                if self.eat(&Tok::Colon) {
                    let ty = self.parse_type()?;
                    self.expect(&Tok::RParen, "')'")?;
                    return Ok(match t {
                        Term::Zero(None) => Term::zero_at(ty),
                        _ => Term::Ascribe(Box::new(t), ty),
                    });
                }
                self.expect(&Tok::RParen, "')'")?;
                Ok(t)
            }
            other => Err(self.err(format!("expected term, found {other:?}"))),
        }
    }
}

/// Parse one complete term, requiring all input to be consumed.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.parse_term()?;
    if !p.done() {
        return Err(p.err("trailing input after term"));
    }
    Ok(t)
}

/// Parse one complete type.
pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.parse_type()?;
    if !p.done() {
        return Err(p.err("trailing input after type"));
    }
    Ok(t)
}

/// Expected equivalence verdict in an `#expect-eq` directive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqExpect {
    Equal,
    NotEqual,
    Unknown,
}

impl fmt::Display for EqExpect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EqExpect::Equal => write!(f, "equal"),
            EqExpect::NotEqual => write!(f, "notequal"),
            EqExpect::Unknown => write!(f, "unknown"),
        }
    }
}

/// A parsed `.alc` file: a directive header followed by one term, or
/// two terms separated by `;;` for equivalence checking.
#[derive(Debug, Clone, Default)]
pub struct FileInput {
    pub use_prelude: bool,
    pub mode: Option<Mode>,
    pub fuel: Option<u64>,
    pub assumes: Vec<(String, Type)>,
    pub expect_normal: Option<Term>,
    pub expect_type: Option<Type>,
    pub expect_eq: Option<EqExpect>,
    pub terms: Vec<Term>,
}

/// Parse a source file. Directive lines start with `#`; the rest of
/// the file is the term body.
pub fn parse_file(src: &str) -> Result<FileInput, ParseError> {
    let mut out = FileInput::default();
    let mut body = String::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            let (head, tail) = match rest.split_once(char::is_whitespace) {
                Some((h, t)) => (h, t.trim()),
                None => (rest, ""),
            };
            let derr = |msg: String| ParseError { line: line_no, col: 1, msg };
            match head {
                "use" => {
                    if tail != "prelude" {
                        return Err(derr(format!("unknown import {tail:?}")));
                    }
                    out.use_prelude = true;
                }
                "mode" => {
                    out.mode = Some(match tail {
                        "strict" => Mode::Strict,
                        "weak" => Mode::Weak,
                        _ => return Err(derr(format!("unknown mode {tail:?}"))),
                    });
                }
                "fuel" => {
                    out.fuel = Some(
                        tail.parse()
                            .map_err(|_| derr(format!("bad fuel value {tail:?}")))?,
                    );
                }
                "assume" => {
                    let (name, ty_src) = tail
                        .split_once(':')
                        .ok_or_else(|| derr("expected 'name : type'".into()))?;
                    let name = name.trim().to_string();
                    if name.is_empty() || is_reserved(&name) {
                        return Err(derr(format!("bad assumption name {name:?}")));
                    }
                    let ty = parse_type(ty_src.trim())?;
                    out.assumes.push((name, ty));
                }
                "expect-normal" => {
                    out.expect_normal = Some(parse_term(tail)?);
                }
                "expect-type" => {
                    out.expect_type = Some(parse_type(tail)?);
                }
                "expect-eq" => {
                    out.expect_eq = Some(match tail {
                        "equal" => EqExpect::Equal,
                        "notequal" => EqExpect::NotEqual,
                        "unknown" => EqExpect::Unknown,
                        _ => return Err(derr(format!("unknown verdict {tail:?}"))),
                    });
                }
                _ => return Err(derr(format!("unknown directive #{head}"))),
            }
        } else {
            body.push_str(raw);
            body.push('\n');
        }
    }
    let mut p = Parser::new(&body)?;
    if p.done() {
        return Err(p.err("file contains no term"));
    }
    let first = p.parse_term()?;
    out.terms.push(first);
    if p.eat(&Tok::SemiSemi) {
        out.terms.push(p.parse_term()?);
    }
    if !p.done() {
        return Err(p.err("trailing input after term"));
    }
    Ok(out)
}
