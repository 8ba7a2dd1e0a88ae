//! Exact arithmetic in the biquadratic field Q(√2, √5).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// `a + b√2 + c√5 + d√10` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldScalar {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

pub(crate) fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub(crate) fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

impl FieldScalar {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Self { a, b, c, d }
    }

    pub fn zero() -> Self {
        Self::rational(r(0))
    }

    pub fn one() -> Self {
        Self::rational(r(1))
    }

    pub fn rational(a: Rational) -> Self {
        Self { a, b: r(0), c: r(0), d: r(0) }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(r(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(q(n, d))
    }

    pub fn sqrt2() -> Self {
        Self { a: r(0), b: r(1), c: r(0), d: r(0) }
    }

    pub fn sqrt5() -> Self {
        Self { a: r(0), b: r(0), c: r(1), d: r(0) }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self { a: &self.a * k, b: &self.b * k, c: &self.c * k, d: &self.d * k }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let f = |q: &Rational| q.to_f64().unwrap_or(f64::NAN);
        f(&self.a) + f(&self.b) * 2f64.sqrt() + f(&self.c) * 5f64.sqrt() + f(&self.d) * 10f64.sqrt()
    }

    /// Conjugation `√5 ↦ −√5`.
    fn conj5(&self) -> Self {
        Self { a: self.a.clone(), b: self.b.clone(), c: -&self.c, d: -&self.d }
    }

    /// Conjugation `√2 ↦ −√2`.
    fn conj2(&self) -> Self {
        Self { a: self.a.clone(), b: -&self.b, c: self.c.clone(), d: -&self.d }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // x·conj5(x) lies in Q(√2); multiply through by its √2-conjugate.
        let n1 = self * &self.conj5();
        let n2 = &n1 * &n1.conj2();
        debug_assert!(n2.b.is_zero() && n2.c.is_zero() && n2.d.is_zero());
        Some((&self.conj5() * &n1.conj2()).scale(&n2.a.recip()))
    }

    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let v = self.to_f64();
        if v.abs() > 1e-9 {
            return if v > 0.0 { 1 } else { -1 };
        }
        exact_sign(self)
    }
}

// Sign of p + q√5 with p, q in Q(√2), decided exactly.
fn exact_sign(x: &FieldScalar) -> i32 {
    let p = (x.a.clone(), x.b.clone());
    let q = (x.c.clone(), x.d.clone());
    let sp = sign2(&p);
    let sq = sign2(&q);
    if sq == 0 {
        return sp;
    }
    if sp == 0 {
        return sq;
    }
    if sp == sq {
        return sp;
    }
    // compare p² with 5q²
    let p2 = mul2(&p, &p);
    let q2 = mul2(&q, &q);
    let diff = (p2.0 - q2.0 * r(5), p2.1 - q2.1 * r(5));
    let sd = sign2(&diff);
    if sd > 0 {
        sp
    } else {
        sq
    }
}

fn mul2(x: &(Rational, Rational), y: &(Rational, Rational)) -> (Rational, Rational) {
    (&x.0 * &y.0 + &x.1 * &y.1 * r(2), &x.0 * &y.1 + &x.1 * &y.0)
}

// Sign of u + v√2.
fn sign2((u, v): &(Rational, Rational)) -> i32 {
    let su = sgn(u);
    let sv = sgn(v);
    if sv == 0 {
        return su;
    }
    if su == 0 || su == sv {
        return sv;
    }
    // u² vs 2v²
    let d = u * u - v * v * r(2);
    if d.is_positive() {
        su
    } else {
        sv
    }
}

fn sgn(q: &Rational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

impl Add for &FieldScalar {
    type Output = FieldScalar;
    fn add(self, o: Self) -> FieldScalar {
        FieldScalar { a: &self.a + &o.a, b: &self.b + &o.b, c: &self.c + &o.c, d: &self.d + &o.d }
    }
}

impl Sub for &FieldScalar {
    type Output = FieldScalar;
    fn sub(self, o: Self) -> FieldScalar {
        FieldScalar { a: &self.a - &o.a, b: &self.b - &o.b, c: &self.c - &o.c, d: &self.d - &o.d }
    }
}

impl Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        FieldScalar { a: -&self.a, b: -&self.b, c: -&self.c, d: -&self.d }
    }
}

impl Mul for &FieldScalar {
    type Output = FieldScalar;
    fn mul(self, o: Self) -> FieldScalar {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (e, f, g, h) = (&o.a, &o.b, &o.c, &o.d);
        // √2² = 2, √5² = 5, √10² = 10, √2√5 = √10, √2√10 = 2√5, √5√10 = 5√2
        FieldScalar {
            a: a * e + b * f * r(2) + c * g * r(5) + d * h * r(10),
            b: a * f + b * e + (c * h + d * g) * r(5),
            c: a * g + c * e + (b * h + d * f) * r(2),
            d: a * h + d * e + b * g + c * f,
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for FieldScalar {
            type Output = FieldScalar;
            fn $f(self, o: Self) -> FieldScalar {
                (&self).$f(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        -&self
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (q, s) in [(&self.a, ""), (&self.b, "√2"), (&self.c, "√5"), (&self.d, "√10")] {
            if !q.is_zero() {
                parts.push(format!("{q}{s}"));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_squares() {
        assert_eq!(FieldScalar::sqrt2() * FieldScalar::sqrt2(), FieldScalar::int(2));
        assert_eq!(FieldScalar::sqrt5() * FieldScalar::sqrt5(), FieldScalar::int(5));
        let s10 = FieldScalar::sqrt2() * FieldScalar::sqrt5();
        assert_eq!(&s10 * &s10, FieldScalar::int(10));
        assert_eq!(s10 * FieldScalar::sqrt2(), FieldScalar::sqrt5().scale(&r(2)));
    }

    #[test]
    fn inverse_roundtrip() {
        let x = FieldScalar::new(q(1, 3), r(-2), q(5, 7), r(1));
        let y = x.inverse().unwrap();
        assert_eq!(x * y, FieldScalar::one());
        assert!(FieldScalar::zero().inverse().is_none());
    }

    #[test]
    fn golden_ratio_identity() {
        let phi = (FieldScalar::one() + FieldScalar::sqrt5()).scale(&q(1, 2));
        assert_eq!(&phi * &phi, &phi + &FieldScalar::one());
        assert!((phi.to_f64() - 1.618_033_988_749_895).abs() < 1e-15);
    }

    #[test]
    fn exact_sign_near_cancellation() {
        let above = FieldScalar::frac(99, 70) - FieldScalar::sqrt2();
        let below = FieldScalar::frac(1393, 985) - FieldScalar::sqrt2();
        assert_eq!(exact_sign(&above), 1);
        assert_eq!(exact_sign(&below), -1);
        let neg = FieldScalar::frac(140, 99) - FieldScalar::sqrt2();
        assert_eq!(exact_sign(&neg), -1);
        assert_eq!(neg.signum(), -1);
    }
}
