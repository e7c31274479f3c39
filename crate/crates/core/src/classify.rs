//! Isomorphism decisions between quantum Heisenberg manifolds: the
//! `GL_2(Z)` action on parameter pairs, Hermite normal forms, and an
//! exhaustive orbit search for rational parameters.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::Params;
use crate::scalar::ExactScalar;
use crate::traces::{trace_range, TraceRangeGroup};

/// Row Hermite normal form of the lattice spanned by `rows`.
///
/// Zero rows are dropped, pivots are positive and entries above a pivot lie
/// in `[0, pivot)`. Rows may have different lengths; short ones are padded
/// with zeros.
pub fn hnf(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| r.iter().any(|v| !v.is_zero()))
        .map(|r| {
            let mut r = r.clone();
            r.resize(width, BigInt::zero());
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..width {
        loop {
            let pivot = (rank..m.len()).filter(|&i| !m[i][col].is_zero()).min_by_key(|&i| m[i][col].abs());
            let Some(pivot) = pivot else { break };
            m.swap(rank, pivot);
            let mut cleared = true;
            for i in rank + 1..m.len() {
                if !m[i][col].is_zero() {
                    let q = m[i][col].div_floor(&m[rank][col]);
                    sub_multiple(&mut m, i, rank, &q);
                    cleared &= m[i][col].is_zero();
                }
            }
            if cleared {
                break;
            }
        }
        if rank < m.len() && !m[rank][col].is_zero() {
            if m[rank][col].is_negative() {
                for v in m[rank].iter_mut() {
                    *v = -v.clone();
                }
            }
            for i in 0..rank {
                let q = m[i][col].div_floor(&m[rank][col]);
                sub_multiple(&mut m, i, rank, &q);
            }
            rank += 1;
        }
    }
    m.truncate(rank);
    m
}

fn sub_multiple(m: &mut [Vec<BigInt>], target: usize, source: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let src = m[source].clone();
    for (t, s) in m[target].iter_mut().zip(src) {
        *t -= q * s;
    }
}

/// Whether the integer vector `v` lies in the row lattice of an HNF basis.
pub fn hnf_contains(basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let mut v = v.to_vec();
    for row in basis {
        let Some(pc) = row.iter().position(|x| !x.is_zero()) else { continue };
        if v[..pc].iter().any(|x| !x.is_zero()) {
            return false;
        }
        let (q, r) = v[pc].div_rem(&row[pc]);
        if !r.is_zero() {
            return false;
        }
        for (a, b) in v.iter_mut().zip(row) {
            *a -= &q * b;
        }
    }
    v.iter().all(Zero::is_zero)
}

/// An integer matrix `((a, b), (c, d))` with determinant `+-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Gl2z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Gl2z {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a * d - b * c;
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det));
        }
        Ok(Gl2z { a, b, c, d })
    }

    pub const IDENTITY: Gl2z = Gl2z { a: 1, b: 0, c: 0, d: 1 };
    pub const S: Gl2z = Gl2z { a: 0, b: -1, c: 1, d: 0 };
    pub const T: Gl2z = Gl2z { a: 1, b: 1, c: 0, d: 1 };
    pub const R: Gl2z = Gl2z { a: 1, b: 0, c: 0, d: -1 };

    pub fn generators() -> [Gl2z; 3] {
        [Self::S, Self::T, Self::R]
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn compose(&self, o: &Gl2z) -> Gl2z {
        Gl2z {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Product of a word in the generators, leftmost first.
    pub fn word(letters: &[Gl2z]) -> Gl2z {
        letters.iter().fold(Self::IDENTITY, |acc, g| acc.compose(g))
    }

    /// `(a u + b v, c u + d v)` mod `q`.
    pub fn apply_mod(&self, (u, v): (i64, i64), q: i64) -> (i64, i64) {
        (
            (self.a * u + self.b * v).rem_euclid(q),
            (self.c * u + self.d * v).rem_euclid(q),
        )
    }
}

/// `(mu, nu) -> (a mu + b nu mod 1, c mu + d nu mod 1)`.
pub fn apply_gl2z(g: &Gl2z, (mu, nu): (&ExactScalar, &ExactScalar)) -> Result<(ExactScalar, ExactScalar)> {
    let m = mu.scale_int(g.a).checked_add(&nu.scale_int(g.b))?;
    let n = mu.scale_int(g.c).checked_add(&nu.scale_int(g.d))?;
    Ok((m.frac(), n.frac()))
}

/// Same group as sets. Groups over `Q` compare against groups over
/// `Q(sqrt d)` by embedding along the rational axis.
pub fn group_equal(g: &TraceRangeGroup, h: &TraceRangeGroup) -> Result<bool> {
    match (g.d, h.d) {
        (a, b) if a == b => Ok(g == h),
        (0, b) => Ok(&g.lift(b) == h),
        (a, 0) => Ok(g == &h.lift(a)),
        (a, b) => Err(Error::FieldMismatch(a, b)),
    }
}

/// Orbit membership of `(a', b')` under `GL_2(Z)` acting on `(Z/q)^2`,
/// by breadth-first search from `(a, b)` with generators `S`, `T`, `R`.
pub fn brute_force_orbit_rational(q: i64, from: (i64, i64), to: (i64, i64)) -> bool {
    let q = q.max(1);
    let start = (from.0.rem_euclid(q), from.1.rem_euclid(q));
    let goal = (to.0.rem_euclid(q), to.1.rem_euclid(q));
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(pt) = queue.pop_front() {
        if pt == goal {
            return true;
        }
        for g in Gl2z::generators() {
            let next = g.apply_mod(pt, q);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "same_orbit")]
pub enum Verdict {
    Isomorphic,
    NotIsomorphic,
    RationalCaseOrbitOnly(bool),
}

#[derive(Clone, Debug, Serialize)]
pub struct Decision {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub justification: String,
    pub groups: Option<(TraceRangeGroup, TraceRangeGroup)>,
}

/// Decides whether `D^c_{mu nu}` and `D^c'_{mu' nu'}` are isomorphic.
pub fn decide_isomorphism(p: &Params, q: &Params) -> Result<Decision> {
    if p.c != q.c {
        return Ok(Decision {
            verdict: Verdict::NotIsomorphic,
            justification: format!(
                "K_0 = Z^3 + Z_{} versus Z^3 + Z_{}: the torsion parts differ",
                p.c, q.c
            ),
            groups: None,
        });
    }
    if p.is_rational() && q.is_rational() {
        let den = [&p.mu, &p.nu, &q.mu, &q.nu]
            .iter()
            .fold(BigInt::from(1), |acc, s| acc.lcm(s.rational_part().denom()));
        let modulus = i64::try_from(&den).map_err(|_| Error::InvalidInput("denominator too large".into()))?;
        let coord = |s: &ExactScalar| -> i64 {
            let v = s.rational_part() * num_rational::BigRational::from_integer(den.clone());
            i64::try_from(v.to_integer()).expect("reduced below the modulus")
        };
        let same = brute_force_orbit_rational(modulus, (coord(&p.mu), coord(&p.nu)), (coord(&q.mu), coord(&q.nu)));
        return Ok(Decision {
            verdict: Verdict::RationalCaseOrbitOnly(same),
            justification: format!(
                "all parameters rational; orbit search in (Z/{modulus})^2 only, no isomorphism verdict"
            ),
            groups: None,
        });
    }
    let (g, h) = (trace_range(p), trace_range(q));
    let equal = group_equal(&g, &h)?;
    Ok(Decision {
        verdict: if equal { Verdict::Isomorphic } else { Verdict::NotIsomorphic },
        justification: format!(
            "trace ranges Z + 2mu Z + 2nu Z: {} {} {}",
            g.describe(),
            if equal { "==" } else { "!=" },
            h.describe()
        ),
        groups: Some((g, h)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(hnf(&rows(&[&[1, 0], &[0, 1]])), rows(&[&[1, 0], &[0, 1]]));
        assert_eq!(hnf(&rows(&[&[3, 0], &[0, 3], &[2, 0]])), rows(&[&[1, 0], &[0, 3]]));
        assert_eq!(hnf(&rows(&[&[2, 4]])), rows(&[&[2, 4]]));
        assert_eq!(hnf(&rows(&[&[-6], &[4]])), rows(&[&[2]]));
        assert_eq!(hnf(&rows(&[&[2, 5], &[0, 3]])), rows(&[&[2, 2], &[0, 3]]));
        assert!(hnf(&rows(&[&[0, 0]])).is_empty());
    }

    #[test]
    fn lattice_membership() {
        let b = rows(&[&[1, 0], &[0, 3]]);
        assert!(hnf_contains(&b, &rows(&[&[5, 6]])[0]));
        assert!(!hnf_contains(&b, &rows(&[&[5, 7]])[0]));
    }

    #[test]
    fn gl2z_examples() {
        let s = |t: &str| t.parse::<ExactScalar>().unwrap();
        let (m, n) = (s("1/4"), s("1/6"));
        assert_eq!(apply_gl2z(&Gl2z::IDENTITY, (&m, &n)).unwrap(), (m.clone(), n.clone()));
        let swap = Gl2z::new(0, 1, 1, 0).unwrap();
        assert_eq!(apply_gl2z(&swap, (&m, &n)).unwrap(), (n.clone(), m.clone()));
        let golden = s("-1/2 + 1/2*sqrt(5)");
        let shear = apply_gl2z(&Gl2z::T, (&golden, &s("1/3"))).unwrap();
        assert_eq!(shear, (s("-1/6 + 1/2*sqrt(5)"), s("1/3")));
        assert_eq!(Gl2z::new(2, 0, 0, 1).unwrap_err(), Error::NotUnimodular(2));
        for g in Gl2z::generators() {
            assert_eq!(g.det().abs(), 1);
        }
    }

    #[test]
    fn orbit_examples() {
        assert!(brute_force_orbit_rational(1, (0, 0), (0, 0)));
        assert!(brute_force_orbit_rational(5, (1, 0), (2, 0)));
        assert!(!brute_force_orbit_rational(5, (1, 0), (0, 0)));
        assert!(!brute_force_orbit_rational(6, (2, 0), (3, 0)));
    }

    #[test]
    fn decide_examples() {
        let s = |t: &str| t.parse::<ExactScalar>().unwrap();
        let a = Params::new(1, s("1/2*sqrt(2)"), s("0"), 2).unwrap();
        let b = Params::new(1, s("1/2*sqrt(2)"), s("1/2"), 2).unwrap();
        assert_eq!(decide_isomorphism(&a, &b).unwrap().verdict, Verdict::Isomorphic);
        let r1 = Params::rational(1, (1, 5), (0, 1)).unwrap();
        let r2 = Params::rational(1, (0, 1), (0, 1)).unwrap();
        assert_eq!(decide_isomorphism(&r1, &r2).unwrap().verdict, Verdict::RationalCaseOrbitOnly(false));
        let r3 = Params::rational(2, (1, 5), (0, 1)).unwrap();
        assert_eq!(decide_isomorphism(&r1, &r3).unwrap().verdict, Verdict::NotIsomorphic);
        let c = Params::new(1, s("1/2*sqrt(2)"), s("1/3"), 2).unwrap();
        assert_eq!(decide_isomorphism(&a, &c).unwrap().verdict, Verdict::NotIsomorphic);
    }
}
