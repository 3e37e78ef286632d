//! Scalar weights for linear combinations of terms.
//!
//! Two rings are supported: arbitrary-precision rationals, and the
//! field Q(sqrt2, i) represented exactly on the basis
//! `1, sqrt2, i, i*sqrt2` with rational coordinates. The [`Scalar`]
//! enum keeps a canonical-variant invariant: a quadratic value whose
//! sqrt2/i coordinates are all zero is demoted to the rational
//! variant on construction, so derived equality and ordering agree
//! with ring equality.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Element of Q(sqrt2, i): `a + b*sqrt2 + c*i + d*i*sqrt2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quad {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
}

impl Quad {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Quad {
        Quad { a, b, c, d }
    }

    pub fn from_rat(a: Rat) -> Quad {
        Quad::new(a, Rat::zero(), Rat::zero(), Rat::zero())
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.is_rational() && self.a.is_zero()
    }

    fn add(&self, o: &Quad) -> Quad {
        Quad::new(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c, &self.d + &o.d)
    }

    fn neg(&self) -> Quad {
        Quad::new(-self.a.clone(), -self.b.clone(), -self.c.clone(), -self.d.clone())
    }

    /// Basis products: sqrt2*sqrt2 = 2, i*i = -1, sqrt2*i = i*sqrt2.
    fn mul(&self, o: &Quad) -> Quad {
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&o.a, &o.b, &o.c, &o.d);
        let two = rat_int(2);
        let a = a1 * a2 + &two * (b1 * b2) - c1 * c2 - &two * (d1 * d2);
        let b = a1 * b2 + b1 * a2 - c1 * d2 - d1 * c2;
        let c = a1 * c2 + c1 * a2 + &two * (b1 * d2) + &two * (d1 * b2);
        let d = a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2;
        Quad::new(a, b, c, d)
    }

    /// Complex conjugation: negates the i and i*sqrt2 coordinates.
    fn conj(&self) -> Quad {
        Quad::new(self.a.clone(), self.b.clone(), -self.c.clone(), -self.d.clone())
    }

    /// Galois conjugation sqrt2 -> -sqrt2.
    fn gal(&self) -> Quad {
        Quad::new(self.a.clone(), -self.b.clone(), self.c.clone(), -self.d.clone())
    }

    /// Multiplicative inverse via the rational norm
    /// `N(q) = q * conj(q) * gal(q) * gal(conj(q))`.
    fn inv(&self) -> Option<Quad> {
        if self.is_zero() {
            return None;
        }
        let cofactor = self.conj().mul(&self.gal()).mul(&self.gal().conj());
        let norm = self.mul(&cofactor);
        debug_assert!(norm.is_rational() && !norm.a.is_zero());
        let scale = Quad::from_rat(norm.a.recip());
        Some(cofactor.mul(&scale))
    }
}

/// A scalar weight: rational, or quadratic over sqrt2 and i.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    Rat(Rat),
    Quad(Quad),
}

impl Scalar {
    /// Canonicalizing constructor: demotes purely rational quadratics.
    pub fn quad(q: Quad) -> Scalar {
        if q.is_rational() {
            Scalar::Rat(q.a)
        } else {
            Scalar::Quad(q)
        }
    }

    pub fn from_rat(r: Rat) -> Scalar {
        Scalar::Rat(r)
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::Rat(rat_int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Scalar {
        Scalar::Rat(rat(num, den))
    }

    pub fn zero() -> Scalar {
        Scalar::int(0)
    }

    pub fn one() -> Scalar {
        Scalar::int(1)
    }

    pub fn sqrt2() -> Scalar {
        Scalar::Quad(Quad::new(Rat::zero(), Rat::one(), Rat::zero(), Rat::zero()))
    }

    pub fn i() -> Scalar {
        Scalar::Quad(Quad::new(Rat::zero(), Rat::zero(), Rat::one(), Rat::zero()))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_one())
    }

    /// Whether the value lies in Q, and its rational value if so.
    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Quad(_) => None,
        }
    }

    /// Integer value, if the scalar is an integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Scalar::Rat(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    pub fn uses_quad(&self) -> bool {
        matches!(self, Scalar::Quad(_))
    }

    fn to_quad(&self) -> Quad {
        match self {
            Scalar::Rat(r) => Quad::from_rat(r.clone()),
            Scalar::Quad(q) => q.clone(),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(r.clone()),
            Scalar::Quad(q) => Scalar::quad(q.conj()),
        }
    }

    pub fn inverse(&self) -> Option<Scalar> {
        match self {
            Scalar::Rat(r) => {
                if r.is_zero() {
                    None
                } else {
                    Some(Scalar::Rat(r.recip()))
                }
            }
            Scalar::Quad(q) => q.inv().map(Scalar::quad),
        }
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        match (&self, &o) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            _ => Scalar::quad(self.to_quad().add(&o.to_quad())),
        }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self + (-o)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Quad(q) => Scalar::Quad(q.neg()),
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        match (&self, &o) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            _ => Scalar::quad(self.to_quad().mul(&o.to_quad())),
        }
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// One `coeff * unit` product, where `unit` is a basis element name.
fn fmt_part(coeff: &Rat, unit: &str) -> String {
    if unit.is_empty() {
        return fmt_rat(coeff);
    }
    if coeff.is_one() {
        return unit.to_string();
    }
    if (-coeff.clone()).is_one() {
        return format!("-{unit}");
    }
    format!("{}*{}", fmt_rat(coeff), unit)
}

impl fmt::Display for Scalar {
    /// Renders in the concrete scalar-expression syntax, e.g.
    /// `-1/2`, `i`, `1/2*sqrt2 + i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{}", fmt_rat(r)),
            Scalar::Quad(q) => {
                let mut parts: Vec<String> = Vec::new();
                if !q.a.is_zero() {
                    parts.push(fmt_part(&q.a, ""));
                }
                if !q.b.is_zero() {
                    parts.push(fmt_part(&q.b, "sqrt2"));
                }
                if !q.c.is_zero() {
                    parts.push(fmt_part(&q.c, "i"));
                }
                if !q.d.is_zero() {
                    parts.push(fmt_part(&q.d, "i*sqrt2"));
                }
                let mut out = String::new();
                for (k, p) in parts.iter().enumerate() {
                    if k == 0 {
                        out.push_str(p);
                    } else if let Some(rest) = p.strip_prefix('-') {
                        out.push_str(" - ");
                        out.push_str(rest);
                    } else {
                        out.push_str(" + ");
                        out.push_str(p);
                    }
                }
                write!(f, "{out}")
            }
        }
    }
}
