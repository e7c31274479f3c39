//! Exact arithmetic in a real quadratic field `Q(sqrt d)`.
//!
//! Every [`ExactScalar`] is `a + b*sqrt(d)` with `a`, `b` rational and `d`
//! squarefree. Rationals carry no field tag (`d = 0`), so they combine with
//! any field; two irrationals from different fields do not.
//!
//! No floating point takes part in any decision made here: sign, comparison
//! and floor are settled by exact squaring, and approximations come from
//! rational bisection of `sqrt d`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element `a + b*sqrt(d)` of a real quadratic field, or of `Q` when `d = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    a: BigRational,
    b: BigRational,
    d: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

pub fn is_squarefree(d: u64) -> bool {
    if d < 4 {
        return true;
    }
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl ExactScalar {
    /// Builds `a + b*sqrt(d)`, rejecting non-squarefree `d`.
    ///
    /// `d = 1` folds into the rational part and any scalar with `b = 0` is
    /// stored with `d = 0`.
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Result<Self> {
        if !is_squarefree(d) {
            return Err(Error::NotSquarefree(d));
        }
        Ok(Self::canonical(a, b, d))
    }

    fn canonical(a: BigRational, b: BigRational, d: u64) -> Self {
        match d {
            0 => ExactScalar { a, b: BigRational::zero(), d: 0 },
            1 => ExactScalar { a: a + b, b: BigRational::zero(), d: 0 },
            _ if b.is_zero() => ExactScalar { a, b, d: 0 },
            _ => ExactScalar { a, b, d },
        }
    }

    pub fn rational(a: BigRational) -> Self {
        ExactScalar { a, b: BigRational::zero(), d: 0 }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::rational(rat(n, d))
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `b * sqrt(d)` with `b = n/m`.
    pub fn surd(n: i64, m: i64, d: u64) -> Result<Self> {
        Self::new(BigRational::zero(), rat(n, m), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    /// Field tag; `0` for rationals.
    pub fn field(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact integer value, if this scalar is an integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        (self.is_rational() && self.a.is_integer()).then(|| self.a.to_integer())
    }

    fn joint_field(&self, other: &Self) -> Result<u64> {
        match (self.d, other.d) {
            (0, e) | (e, 0) => Ok(e),
            (d, e) if d == e => Ok(d),
            (d, e) => Err(Error::FieldMismatch(d, e)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.joint_field(other)?;
        Ok(Self::canonical(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let d = self.joint_field(other)?;
        Ok(Self::canonical(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.joint_field(other)?;
        let dd = BigRational::from_integer(BigInt::from(d));
        let a = &self.a * &other.a + &self.b * &other.b * dd;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::canonical(a, b, d))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let dd = BigRational::from_integer(BigInt::from(self.d));
        let norm = &self.a * &self.a - &self.b * &self.b * dd;
        Some(Self::canonical(&self.a / &norm, -&self.b / &norm, self.d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        let inv = other.recip().ok_or(Error::DivisionByZero)?;
        self.checked_mul(&inv)
    }

    pub fn neg(&self) -> Self {
        Self::canonical(-&self.a, -&self.b, self.d)
    }

    /// Scaling by a rational.
    pub fn scale(&self, k: &BigRational) -> Self {
        Self::canonical(&self.a * k, &self.b * k, self.d)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    pub fn arith(op: ArithOp, s: &Self, t: &Self) -> Result<Self> {
        match op {
            ArithOp::Add => s.checked_add(t),
            ArithOp::Sub => s.checked_sub(t),
            ArithOp::Mul => s.checked_mul(t),
            ArithOp::Neg => Ok(s.neg()),
        }
    }

    /// Exact sign of `a + b*sqrt(d)`.
    pub fn sign(&self) -> i32 {
        let sa = sgn(&self.a);
        let sb = sgn(&self.b);
        if sb == 0 || self.d == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with d*b^2
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d));
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Exact comparison; errors only when the fields disagree.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        Ok(self.checked_sub(other)?.sign().cmp(&0))
    }

    /// Splits into `k + r` with `k` an integer and `0 <= r < 1`.
    pub fn floor_mod1(&self) -> (BigInt, ExactScalar) {
        let k = self.floor();
        let r = self.checked_sub(&Self::rational(BigRational::from_integer(k.clone()))).expect("rational shift");
        (k, r)
    }

    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        let (lo, hi) = self.enclosure(&rat(1, 4));
        let mut k = lo.floor().to_integer();
        let hi_floor = hi.floor().to_integer();
        // the enclosure has width < 1/4, so at most one integer boundary separates lo and hi
        if k != hi_floor {
            let boundary = Self::rational(BigRational::from_integer(hi_floor.clone()));
            if self.checked_sub(&boundary).expect("rational shift").sign() >= 0 {
                k = hi_floor;
            }
        }
        k
    }

    /// Fractional part in `[0, 1)`.
    pub fn frac(&self) -> ExactScalar {
        self.floor_mod1().1
    }

    /// A rational enclosure `[lo, hi]` of this value with `hi - lo < width`.
    pub fn enclosure(&self, width: &BigRational) -> (BigRational, BigRational) {
        if self.is_rational() {
            return (self.a.clone(), self.a.clone());
        }
        let babs = self.b.abs();
        let target = width / &babs;
        let (slo, shi) = sqrt_enclosure(self.d, &target);
        if self.b.is_positive() {
            (&self.a + &self.b * slo, &self.a + &self.b * shi)
        } else {
            (&self.a + &self.b * shi, &self.a + &self.b * slo)
        }
    }

    /// A rational within `eps` of this value; rationals pass through unchanged.
    pub fn approx(&self, eps: &BigRational) -> Result<BigRational> {
        if !eps.is_positive() {
            return Err(Error::InvalidInput("approx tolerance must be positive".into()));
        }
        if self.is_rational() {
            return Ok(self.a.clone());
        }
        let (lo, hi) = self.enclosure(eps);
        Ok((lo + hi) / BigRational::from_integer(BigInt::from(2)))
    }

    /// Nearest-ish `f64`; accurate to well below one ulp before rounding.
    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            return ratio_to_f64(&self.a);
        }
        let eps = BigRational::new(BigInt::one(), BigInt::one() << 70usize);
        let r = self.approx(&eps).expect("positive eps");
        ratio_to_f64(&r)
    }
}

fn sgn(r: &BigRational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(v) => v,
        None => r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN),
    }
}

/// Rational enclosure of `sqrt(d)` of width below `width`, by bisection
/// from the integer bracket `[isqrt(d), isqrt(d) + 1]`.
pub fn sqrt_enclosure(d: u64, width: &BigRational) -> (BigRational, BigRational) {
    let n = d.sqrt();
    let mut lo = BigRational::from_integer(BigInt::from(n));
    let mut hi = BigRational::from_integer(BigInt::from(n + 1));
    if n * n == d {
        return (lo.clone(), lo);
    }
    let dd = BigRational::from_integer(BigInt::from(d));
    let two = BigRational::from_integer(BigInt::from(2));
    while &(&hi - &lo) >= width {
        let mid = (&lo + &hi) / &two;
        if &mid * &mid < dd {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

impl PartialOrd for ExactScalar {
    /// `None` only for irrationals from different fields.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other).ok()
    }
}

fn write_ratio(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write_ratio(f, &self.a);
        }
        if !self.a.is_zero() {
            write_ratio(f, &self.a)?;
            if self.b.is_negative() {
                f.write_str(" - ")?;
                write_ratio(f, &-&self.b)?;
            } else {
                f.write_str(" + ")?;
                write_ratio(f, &self.b)?;
            }
        } else {
            write_ratio(f, &self.b)?;
        }
        write!(f, "*sqrt({})", self.d)
    }
}

// ---------------------------------------------------------------------------
// text syntax: `p/q`, `p/q*sqrt(d)`, `p/q + r/s*sqrt(d)`, whitespace-insensitive

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse { column: self.pos + 1, message: msg.to_string() }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }
}

/// One signed term: a rational, optionally times `sqrt(d)`, or a bare `sqrt(d)`.
fn parse_term(c: &mut Cursor<'_>, negative: bool) -> Result<(BigRational, Option<u64>)> {
    let mut coef = BigRational::one();
    let mut has_number = false;
    if matches!(c.peek(), Some(b'0'..=b'9')) {
        let n = c.integer()?;
        let mut r = BigRational::from_integer(n);
        if c.eat("/") {
            let col = c.pos;
            let den = c.integer()?;
            if den.is_zero() {
                return Err(Error::Parse { column: col + 1, message: "zero denominator".into() });
            }
            r /= BigRational::from_integer(den);
        }
        coef = r;
        has_number = true;
    }
    let mut surd = None;
    let star = has_number && c.eat("*");
    if c.eat("sqrt(") {
        let d = c.integer()?;
        if !c.eat(")") {
            return Err(c.err("expected ')'"));
        }
        let d = d.to_u64().ok_or_else(|| c.err("radicand too large"))?;
        surd = Some(d);
    } else if star || !has_number {
        return Err(c.err("expected number or sqrt(d)"));
    }
    if negative {
        coef = -coef;
    }
    Ok((coef, surd))
}

impl FromStr for ExactScalar {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut c = Cursor { s: compact.as_bytes(), pos: 0 };
        if c.s.is_empty() {
            return Err(c.err("empty scalar"));
        }
        let mut a = BigRational::zero();
        let mut b = BigRational::zero();
        let mut field: Option<u64> = None;
        let mut first = true;
        while c.peek().is_some() {
            let negative = match c.peek() {
                Some(b'-') => {
                    c.pos += 1;
                    true
                }
                Some(b'+') => {
                    c.pos += 1;
                    false
                }
                _ if first => false,
                _ => return Err(c.err("expected '+' or '-'")),
            };
            first = false;
            let (coef, surd) = parse_term(&mut c, negative)?;
            match surd {
                None => a += coef,
                Some(d) => {
                    if !is_squarefree(d) {
                        return Err(Error::NotSquarefree(d));
                    }
                    match field {
                        Some(e) if e != d => return Err(Error::FieldMismatch(e, d)),
                        _ => field = Some(d),
                    }
                    if d == 1 {
                        a += coef;
                    } else {
                        b += coef;
                    }
                }
            }
        }
        ExactScalar::new(a, b, field.unwrap_or(0))
    }
}

impl serde::Serialize for ExactScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for ExactScalar {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(de)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Integer helpers shared by the lattice code.
#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> ExactScalar {
        text.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(s("1/2").checked_add(&s("1/3 + 1*sqrt(2)")).unwrap(), s("5/6 + sqrt(2)"));
        assert_eq!(s("sqrt(2)").checked_mul(&s("sqrt(2)")).unwrap(), s("2"));
        assert_eq!(s("1 + sqrt(5)").checked_mul(&s("1 - sqrt(5)")).unwrap(), s("-4"));
    }

    #[test]
    fn mismatched_fields_rejected() {
        let err = s("sqrt(2)").checked_add(&s("sqrt(3)")).unwrap_err();
        assert!(matches!(err, Error::FieldMismatch(2, 3)));
        // rationals mix with anything
        assert!(s("1/2").checked_mul(&s("sqrt(3)")).is_ok());
    }

    #[test]
    fn sign_examples() {
        assert_eq!(s("0").sign(), 0);
        assert_eq!(s("-1 + sqrt(2)").sign(), 1);
        // (3/2)^2 = 9/4 > 2
        assert_eq!(s("3/2 - sqrt(2)").sign(), 1);
        assert_eq!(s("7/5 - sqrt(2)").sign(), -1);
        assert_eq!(s("-2 - sqrt(3)").sign(), -1);
    }

    #[test]
    fn floor_examples() {
        assert_eq!(s("7/3").floor_mod1(), (BigInt::from(2), s("1/3")));
        assert_eq!(s("sqrt(2)").floor_mod1(), (BigInt::from(1), s("-1 + sqrt(2)")));
        assert_eq!(s("-1/2").floor_mod1(), (BigInt::from(-1), s("1/2")));
        assert_eq!(s("-sqrt(2)").floor(), BigInt::from(-2));
        // golden ratio conjugate: (-1 + sqrt 5)/2 = 0.618..
        assert_eq!(s("-1/2 + 1/2*sqrt(5)").floor(), BigInt::from(0));
        assert_eq!(s("1000 - 1/1000*sqrt(2)").floor(), BigInt::from(999));
    }

    #[test]
    fn approx_examples() {
        let eps = rat(1, 100);
        let r = s("sqrt(2)").approx(&eps).unwrap();
        // independent check: |r^2 - 2| small means |r - sqrt2| < |r^2-2|/(r+sqrt2)
        let err = (&r * &r - rat(2, 1)).abs();
        assert!(err < rat(2, 100));
        assert!((ratio_to_f64(&r) - 2f64.sqrt()).abs() < 0.01);
        assert_eq!(s("3/7").approx(&rat(1, 1)).unwrap(), rat(3, 7));
        assert!(s("1").approx(&rat(0, 1)).is_err());
    }

    #[test]
    fn non_squarefree_rejected() {
        assert!(matches!(ExactScalar::surd(1, 1, 4), Err(Error::NotSquarefree(4))));
        assert!(matches!("1/3*sqrt(4)".parse::<ExactScalar>(), Err(Error::NotSquarefree(4))));
        assert!(matches!("1 - sqrt(12)".parse::<ExactScalar>(), Err(Error::NotSquarefree(12))));
    }

    #[test]
    fn d_one_folds_into_rationals() {
        assert_eq!(s("2 + 3*sqrt(1)"), s("5"));
        assert_eq!(ExactScalar::surd(1, 2, 1).unwrap(), s("1/2"));
    }

    #[test]
    fn printing() {
        assert_eq!(s("-1/2+1/2*sqrt(5)").to_string(), "-1/2 + 1/2*sqrt(5)");
        assert_eq!(s("1/2*sqrt(2)").to_string(), "1/2*sqrt(2)");
        assert_eq!(s(" 3 - 2 * sqrt( 7 ) ").to_string(), "3 - 2*sqrt(7)");
        assert_eq!(s("4/6").to_string(), "2/3");
        assert_eq!(s("-sqrt(3)").to_string(), "-1*sqrt(3)");
    }

    #[test]
    fn parse_errors_carry_columns() {
        match "1/".parse::<ExactScalar>() {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 3),
            other => panic!("{other:?}"),
        }
        assert!("1/0".parse::<ExactScalar>().is_err());
        assert!("".parse::<ExactScalar>().is_err());
        assert!("1//2".parse::<ExactScalar>().is_err());
        assert!("1/2*".parse::<ExactScalar>().is_err());
        assert!("sqrt(2)+sqrt(3)".parse::<ExactScalar>().is_err());
    }

    #[test]
    fn to_f64_is_accurate() {
        assert_eq!(s("sqrt(2)").to_f64(), std::f64::consts::SQRT_2);
        assert_eq!(s("-1/2 + 1/2*sqrt(5)").to_f64(), 0.618_033_988_749_894_9);
    }
}
