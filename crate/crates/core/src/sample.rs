//! Seeded random inputs for the verification harnesses.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::Gl2z;
use crate::element::QhmElement;
use crate::expr::{Expr, Var};
use crate::params::Params;
use crate::scalar::ExactScalar;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn point<R: Rng>(rng: &mut R) -> (f64, f64) {
    (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))
}

pub fn points<R: Rng>(rng: &mut R, n: usize) -> Vec<(f64, f64)> {
    (0..n).map(|_| point(rng)).collect()
}

/// `p/q` with `|p| <= 9`, `1 <= q <= 4`.
pub fn small_rational<R: Rng>(rng: &mut R) -> ExactScalar {
    ExactScalar::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

/// A trigonometric polynomial with integer frequencies `|q|, |r| <= freq`.
pub fn trig_poly<R: Rng>(rng: &mut R, terms: usize, freq: i64) -> Expr {
    let parts = (0..terms.max(1))
        .map(|_| {
            let coeff = ExactScalar::from_ratio(rng.gen_range(1..=8) * if rng.gen() { 1 } else { -1 }, 4);
            let phase = ExactScalar::from_ratio(rng.gen_range(0..8), 8);
            Expr::exp(
                ExactScalar::from_int(rng.gen_range(-freq..=freq)),
                ExactScalar::from_int(rng.gen_range(-freq..=freq)),
                phase,
            )
            .scaled(coeff)
        })
        .collect();
    Expr::sum(parts)
}

/// Random element with support inside `[-max_p, max_p]` and trig-polynomial
/// components; `shaped` also multiplies some components by `|sin(pi x)|`.
pub fn element<R: Rng>(params: &Params, rng: &mut R, max_p: i64, shaped: bool) -> QhmElement {
    let mut ps: Vec<i64> = (-max_p..=max_p).collect();
    ps.shuffle(rng);
    let count = rng.gen_range(1..=ps.len().min(3));
    let mut comps = BTreeMap::new();
    for &p in &ps[..count] {
        let terms = rng.gen_range(1..=3);
        let mut f = trig_poly(rng, terms, 2);
        if shaped && rng.gen_bool(0.5) {
            f = f.times(Expr::abs(Expr::SinPi(Var::X)));
        }
        comps.insert(p, f);
    }
    QhmElement::new(params.clone(), comps)
}

pub fn gl2z_word<R: Rng>(rng: &mut R, max_len: usize) -> Vec<Gl2z> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| *Gl2z::generators().choose(rng).expect("three generators")).collect()
}

/// `a + b sqrt(d)` with small rational `a` and nonzero `b`.
pub fn quadratic<R: Rng>(rng: &mut R, d: u64) -> ExactScalar {
    let a = small_rational(rng);
    let mut b = small_rational(rng);
    while b.is_zero() {
        b = small_rational(rng);
    }
    ExactScalar::new(a.rational_part().clone(), b.rational_part().clone(), d).expect("squarefree field")
}

/// `a/q` with `0 <= a < q` and `1 <= q <= max_den`.
pub fn unit_rational<R: Rng>(rng: &mut R, max_den: i64) -> ExactScalar {
    let q = rng.gen_range(1..=max_den);
    ExactScalar::from_ratio(rng.gen_range(0..q), q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_element() {
        let p = Params::rational(1, (1, 4), (1, 6)).unwrap();
        let a = element(&p, &mut rng(3), 3, true);
        let b = element(&p, &mut rng(3), 3, true);
        assert_eq!(a, b);
        assert!(a.support().iter().all(|q| q.abs() <= 3));
    }

    #[test]
    fn quadratic_is_irrational() {
        let mut r = rng(1);
        for _ in 0..20 {
            assert!(!quadratic(&mut r, 5).is_rational());
        }
    }
}
