//! Expression trees for the function parts of algebra elements.
//!
//! An [`Expr`] is a complex-valued function of `(x, y)`. The node set is
//! closed under product, complex conjugation and argument translation, which
//! is what lets convolution products and adjoints stay symbolic: the result
//! of every algebra operation is again an `Expr`, evaluated on demand, with
//! no resampling.
//!
//! Discontinuities only ever occur in `x` (strip indicators, floor phases,
//! wrap seams). Their positions are exact scalars, so [`Expr::x_breakpoints`]
//! can report them exactly for piecewise quadrature.

use std::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::scalar::ExactScalar;

/// Exact scalar paired with its `f64` image, so hot evaluation loops never
/// touch big rationals.
#[derive(Clone, Debug)]
pub struct Pinned {
    exact: ExactScalar,
    approx: f64,
}

impl PartialEq for Pinned {
    fn eq(&self, other: &Self) -> bool {
        self.exact == other.exact
    }
}

impl Pinned {
    pub fn new(exact: ExactScalar) -> Self {
        let approx = exact.to_f64();
        Pinned { exact, approx }
    }

    pub fn int(n: i64) -> Self {
        Pinned { exact: ExactScalar::from_int(n), approx: n as f64 }
    }

    pub fn exact(&self) -> &ExactScalar {
        &self.exact
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }

    fn add(&self, other: &Pinned) -> Pinned {
        Pinned::new(self.exact.checked_add(&other.exact).expect("expression scalars share one field"))
    }

    fn mul(&self, other: &Pinned) -> Pinned {
        Pinned::new(self.exact.checked_mul(&other.exact).expect("expression scalars share one field"))
    }

    fn neg(&self) -> Pinned {
        Pinned { exact: self.exact.neg(), approx: -self.approx }
    }

    fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }
}

impl From<ExactScalar> for Pinned {
    fn from(s: ExactScalar) -> Self {
        Pinned::new(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Real constant.
    Const(Pinned),
    Var(Var),
    /// `exp(2 pi i (q x + r y + s))`.
    Exp { q: Pinned, r: Pinned, s: Pinned },
    SinPi(Var),
    CosPi(Var),
    Abs(Box<Expr>),
    /// Indicator of `a <= x < b`.
    Chi { a: Pinned, b: Pinned },
    /// `exp(2 pi i alpha floor(x + t) (y + beta))`.
    FloorPhase { alpha: Pinned, beta: Pinned, t: Pinned },
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Conj(Box<Expr>),
    /// `inner(x + u, y + v)`.
    Translate { u: Pinned, v: Pinned, inner: Box<Expr> },
    /// `inner(frac x, frac y)`.
    Wrap(Box<Expr>),
}

/// Relative margin below which an `f64` comparison is re-decided exactly.
const CERTIFY_MARGIN: f64 = 1e-11;

/// Largest `f64` below one; `frac` never returns 1.0.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// An `x` coordinate that evaluation can shift, wrap, floor and compare.
///
/// Plain `f64` coordinates are compared in floating point and re-decided
/// exactly (treating the `f64` as the dyadic rational it is) when too close
/// to call. [`ExactX`] carries the exact value throughout.
pub trait XCoord: Clone {
    fn approx(&self) -> f64;
    fn shifted(&self, u: &Pinned) -> Self;
    fn wrapped(&self) -> Self;
    /// `floor(x + t)`.
    fn floor_plus(&self, t: &Pinned) -> i64;
    /// `x >= a`.
    fn at_least(&self, a: &Pinned) -> bool;
}

fn dyadic(x: f64) -> ExactScalar {
    ExactScalar::rational(BigRational::from_float(x).expect("finite coordinate"))
}

/// `floor(x + t)` for an `f64` point, exact near integer boundaries.
pub fn certified_floor(x: f64, t_approx: f64, t_exact: impl FnOnce() -> ExactScalar) -> i64 {
    let v = x + t_approx;
    let n = v.floor();
    let tol = CERTIFY_MARGIN * v.abs().max(1.0);
    if v - n > tol && (n + 1.0) - v > tol {
        return n as i64;
    }
    let exact = dyadic(x).checked_add(&t_exact()).expect("same field");
    exact.floor().to_i64().expect("floor fits in i64")
}

impl XCoord for f64 {
    fn approx(&self) -> f64 {
        *self
    }

    fn shifted(&self, u: &Pinned) -> Self {
        self + u.approx
    }

    fn wrapped(&self) -> Self {
        frac_f64(*self)
    }

    fn floor_plus(&self, t: &Pinned) -> i64 {
        certified_floor(*self, t.approx, || t.exact.clone())
    }

    fn at_least(&self, a: &Pinned) -> bool {
        let diff = self - a.approx;
        if diff.abs() > CERTIFY_MARGIN * self.abs().max(1.0) {
            return diff > 0.0;
        }
        dyadic(*self).checked_sub(&a.exact).expect("same field").sign() >= 0
    }
}

/// Fractional part in `[0, 1)`.
pub fn frac_f64(v: f64) -> f64 {
    let r = v - v.floor();
    if r >= 1.0 {
        BELOW_ONE
    } else {
        r
    }
}

/// An exactly known `x` coordinate, used for atomic measures whose atoms
/// may sit exactly on strip boundaries.
#[derive(Clone, Debug)]
pub struct ExactX {
    exact: ExactScalar,
    approx: f64,
}

impl ExactX {
    pub fn new(exact: ExactScalar) -> Self {
        let approx = exact.to_f64();
        ExactX { exact, approx }
    }
}

impl XCoord for ExactX {
    fn approx(&self) -> f64 {
        self.approx
    }

    fn shifted(&self, u: &Pinned) -> Self {
        ExactX { exact: self.exact.checked_add(&u.exact).expect("same field"), approx: self.approx + u.approx }
    }

    fn wrapped(&self) -> Self {
        let exact = self.exact.frac();
        let approx = frac_f64(exact.to_f64());
        ExactX { exact, approx }
    }

    fn floor_plus(&self, t: &Pinned) -> i64 {
        self.exact.checked_add(&t.exact).expect("same field").floor().to_i64().expect("floor fits in i64")
    }

    fn at_least(&self, a: &Pinned) -> bool {
        self.exact.checked_sub(&a.exact).expect("same field").sign() >= 0
    }
}

/// `exp(2 pi i t)` with the phase reduced first.
pub fn unit(t: f64) -> Complex64 {
    let (s, c) = (TAU * t.rem_euclid(1.0)).sin_cos();
    Complex64::new(c, s)
}

impl Expr {
    pub fn constant(s: ExactScalar) -> Expr {
        Expr::Const(Pinned::new(s))
    }

    pub fn rational(n: i64, d: i64) -> Expr {
        Expr::constant(ExactScalar::from_ratio(n, d))
    }

    pub fn one() -> Expr {
        Expr::Const(Pinned::int(1))
    }

    pub fn zero() -> Expr {
        Expr::Const(Pinned::int(0))
    }

    /// `e(q x + r y + s)`.
    pub fn exp(q: ExactScalar, r: ExactScalar, s: ExactScalar) -> Expr {
        Expr::Exp { q: q.into(), r: r.into(), s: s.into() }
    }

    /// `e(q x + r y)` with integer frequencies.
    pub fn wave(q: i64, r: i64) -> Expr {
        Expr::Exp { q: Pinned::int(q), r: Pinned::int(r), s: Pinned::int(0) }
    }

    /// Unit complex scalar `e(s)`.
    pub fn phase(s: ExactScalar) -> Expr {
        Expr::exp(ExactScalar::zero(), ExactScalar::zero(), s)
    }

    pub fn chi(a: ExactScalar, b: ExactScalar) -> Expr {
        Expr::Chi { a: a.into(), b: b.into() }
    }

    pub fn floor_phase(alpha: ExactScalar, beta: ExactScalar, t: ExactScalar) -> Expr {
        Expr::FloorPhase { alpha: alpha.into(), beta: beta.into(), t: t.into() }
    }

    pub fn abs(inner: Expr) -> Expr {
        match inner {
            Expr::Exp { .. } | Expr::FloorPhase { .. } => Expr::one(),
            Expr::Chi { .. } => inner,
            Expr::Abs(_) => inner,
            Expr::Const(c) if c.exact.sign() >= 0 => Expr::Const(c),
            Expr::Const(c) => Expr::Const(c.neg()),
            other => Expr::Abs(Box::new(other)),
        }
    }

    pub fn wrap(inner: Expr) -> Expr {
        match inner {
            Expr::Const(_) => inner,
            Expr::Wrap(_) => inner,
            other => Expr::Wrap(Box::new(other)),
        }
    }

    fn as_const(&self) -> Option<&Pinned> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.as_const(), Some(c) if c.is_zero())
    }

    /// Constant value, if the whole expression is a real constant.
    pub fn constant_value(&self) -> Option<&ExactScalar> {
        self.as_const().map(|c| &c.exact)
    }

    /// Sum with flattening and zero removal.
    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            match t {
                Expr::Sum(inner) => out.extend(inner),
                t if t.is_zero() => {}
                t => out.push(t),
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::Sum(out),
        }
    }

    /// Product with flattening and constant folding.
    pub fn product(factors: Vec<Expr>) -> Expr {
        let mut scale = Pinned::int(1);
        let mut out = Vec::with_capacity(factors.len());
        let mut stack: Vec<Expr> = factors.into_iter().rev().collect();
        while let Some(f) = stack.pop() {
            match f {
                Expr::Product(inner) => stack.extend(inner.into_iter().rev()),
                Expr::Const(c) => scale = scale.mul(&c),
                f => out.push(f),
            }
        }
        if scale.is_zero() {
            return Expr::zero();
        }
        if scale.exact != ExactScalar::one() || out.is_empty() {
            out.insert(0, Expr::Const(scale));
        }
        match out.len() {
            1 => out.pop().unwrap(),
            _ => Expr::Product(out),
        }
    }

    pub fn times(self, other: Expr) -> Expr {
        Expr::product(vec![self, other])
    }

    pub fn plus(self, other: Expr) -> Expr {
        Expr::sum(vec![self, other])
    }

    pub fn scaled(self, k: ExactScalar) -> Expr {
        Expr::product(vec![Expr::constant(k), self])
    }

    /// Complex conjugate, pushed to the leaves.
    pub fn conj(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::SinPi(_) | Expr::CosPi(_) | Expr::Abs(_) | Expr::Chi { .. } => {
                self.clone()
            }
            Expr::Exp { q, r, s } => Expr::Exp { q: q.neg(), r: r.neg(), s: s.neg() },
            Expr::FloorPhase { alpha, beta, t } => {
                Expr::FloorPhase { alpha: alpha.neg(), beta: beta.clone(), t: t.clone() }
            }
            Expr::Sum(ts) => Expr::Sum(ts.iter().map(Expr::conj).collect()),
            Expr::Product(fs) => Expr::Product(fs.iter().map(Expr::conj).collect()),
            Expr::Conj(inner) => (**inner).clone(),
            Expr::Translate { u, v, inner } => {
                Expr::Translate { u: u.clone(), v: v.clone(), inner: Box::new(inner.conj()) }
            }
            Expr::Wrap(inner) => Expr::Wrap(Box::new(inner.conj())),
        }
    }

    /// `(x, y) -> self(x + u, y + v)`, pushed through nodes whose
    /// translate is again a single node.
    pub fn translate(&self, u: &ExactScalar, v: &ExactScalar) -> Expr {
        self.translate_pinned(&Pinned::new(u.clone()), &Pinned::new(v.clone()))
    }

    fn translate_pinned(&self, u: &Pinned, v: &Pinned) -> Expr {
        if u.is_zero() && v.is_zero() {
            return self.clone();
        }
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Exp { q, r, s } => {
                let s = s.add(&q.mul(u)).add(&r.mul(v));
                Expr::Exp { q: q.clone(), r: r.clone(), s }
            }
            Expr::Chi { a, b } => Expr::Chi { a: a.add(&u.neg()), b: b.add(&u.neg()) },
            Expr::FloorPhase { alpha, beta, t } => {
                Expr::FloorPhase { alpha: alpha.clone(), beta: beta.add(v), t: t.add(u) }
            }
            Expr::Sum(ts) => Expr::Sum(ts.iter().map(|e| e.translate_pinned(u, v)).collect()),
            Expr::Product(fs) => Expr::Product(fs.iter().map(|e| e.translate_pinned(u, v)).collect()),
            Expr::Conj(inner) => Expr::Conj(Box::new(inner.translate_pinned(u, v))),
            Expr::Abs(inner) => Expr::Abs(Box::new(inner.translate_pinned(u, v))),
            Expr::Translate { u: u0, v: v0, inner } => {
                let (u1, v1) = (u0.add(u), v0.add(v));
                if u1.is_zero() && v1.is_zero() {
                    (**inner).clone()
                } else {
                    Expr::Translate { u: u1, v: v1, inner: inner.clone() }
                }
            }
            Expr::Var(_) | Expr::SinPi(_) | Expr::CosPi(_) | Expr::Wrap(_) => {
                Expr::Translate { u: u.clone(), v: v.clone(), inner: Box::new(self.clone()) }
            }
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.eval_at(&x, y)
    }

    /// Evaluation at an exactly known `x`.
    pub fn eval_exact_x(&self, x: &ExactScalar, y: f64) -> Complex64 {
        self.eval_at(&ExactX::new(x.clone()), y)
    }

    pub fn eval_at<X: XCoord>(&self, x: &X, y: f64) -> Complex64 {
        match self {
            Expr::Const(c) => Complex64::new(c.approx, 0.0),
            Expr::Var(Var::X) => Complex64::new(x.approx(), 0.0),
            Expr::Var(Var::Y) => Complex64::new(y, 0.0),
            Expr::Exp { q, r, s } => unit(q.approx * x.approx() + r.approx * y + s.approx),
            Expr::SinPi(var) => Complex64::new((PI * pick(var, x, y)).sin(), 0.0),
            Expr::CosPi(var) => Complex64::new((PI * pick(var, x, y)).cos(), 0.0),
            Expr::Abs(inner) => Complex64::new(inner.eval_at(x, y).norm(), 0.0),
            Expr::Chi { a, b } => {
                let inside = x.at_least(a) && !x.at_least(b);
                Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
            }
            Expr::FloorPhase { alpha, beta, t } => {
                let k = x.floor_plus(t) as f64;
                unit(alpha.approx * k * y + (alpha.approx * k * beta.approx).rem_euclid(1.0))
            }
            Expr::Sum(ts) => ts.iter().map(|e| e.eval_at(x, y)).sum(),
            Expr::Product(fs) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in fs {
                    acc *= f.eval_at(x, y);
                    if acc == Complex64::zero() {
                        break;
                    }
                }
                acc
            }
            Expr::Conj(inner) => inner.eval_at(x, y).conj(),
            Expr::Translate { u, v, inner } => inner.eval_at(&x.shifted(u), y + v.approx),
            Expr::Wrap(inner) => inner.eval_at(&x.wrapped(), frac_f64(y)),
        }
    }

    /// Candidate non-smooth points in `x`, reduced into `[0, 1)`.
    ///
    /// The set is a superset of the jumps and kinks the expression can have
    /// on `[0, 1)`, except for kinks of `abs` applied to something other
    /// than `sinpi(x)` or `cospi(x)`.
    pub fn x_breakpoints(&self) -> Vec<ExactScalar> {
        let mut out = vec![ExactScalar::zero()];
        self.collect_breakpoints(&mut out);
        let mut reduced: Vec<ExactScalar> = out.into_iter().map(|s| s.frac()).collect();
        reduced.sort_by(|a, b| a.try_cmp(b).expect("same field"));
        reduced.dedup();
        reduced
    }

    fn collect_breakpoints(&self, out: &mut Vec<ExactScalar>) {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Exp { .. } | Expr::SinPi(_) | Expr::CosPi(_) => {}
            Expr::Abs(inner) => match **inner {
                Expr::SinPi(Var::X) => out.push(ExactScalar::zero()),
                Expr::CosPi(Var::X) => out.push(ExactScalar::from_ratio(1, 2)),
                _ => inner.collect_breakpoints(out),
            },
            Expr::Chi { a, b } => {
                out.push(a.exact.clone());
                out.push(b.exact.clone());
            }
            Expr::FloorPhase { t, .. } => out.push(t.exact.neg()),
            Expr::Sum(es) | Expr::Product(es) => es.iter().for_each(|e| e.collect_breakpoints(out)),
            Expr::Conj(inner) => inner.collect_breakpoints(out),
            Expr::Translate { u, inner, .. } => {
                // inner breakpoint sets are 1-periodic, so shifting them is enough
                let mut local = Vec::new();
                inner.collect_breakpoints(&mut local);
                out.extend(local.into_iter().map(|b| b.checked_sub(&u.exact).expect("same field")));
            }
            Expr::Wrap(inner) => {
                out.push(ExactScalar::zero());
                inner.collect_breakpoints(out);
            }
        }
    }

    /// Number of nodes, for diagnostics.
    pub fn size(&self) -> usize {
        match self {
            Expr::Abs(e) | Expr::Conj(e) | Expr::Wrap(e) => 1 + e.size(),
            Expr::Translate { inner, .. } => 1 + inner.size(),
            Expr::Sum(es) | Expr::Product(es) => 1 + es.iter().map(Expr::size).sum::<usize>(),
            _ => 1,
        }
    }
}

fn pick<X: XCoord>(var: &Var, x: &X, y: f64) -> f64 {
    match var {
        Var::X => x.approx(),
        Var::Y => y,
    }
}

/// Integer `k` as an exact scalar; convenience for callers building phases.
pub fn int(k: i64) -> ExactScalar {
    ExactScalar::rational(BigRational::from_integer(BigInt::from(k)))
}
