//! Trace ranges and orbit verdicts against independently coded oracles.

use num_bigint::BigInt;
use qhm_core::classify::{brute_force_orbit_rational, decide_isomorphism, Verdict};
use qhm_core::traces::trace_range;
use qhm_core::{sample, ExactScalar, Params};
use rand::Rng;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// `Z + (a/b) Z + (c/e) Z = (1/D) Z`, as `D`.
fn gcd_oracle(mu: (i64, i64), nu: (i64, i64)) -> i64 {
    let (m, n) = ((2 * mu.0, mu.1), (2 * nu.0, nu.1));
    let l = lcm(lcm(m.1, n.1), 1);
    let g = gcd(gcd(l, m.0 * (l / m.1)), n.0 * (l / n.1));
    l / g
}

fn frac(n: i64, d: i64) -> (i64, i64) {
    let g = gcd(n, d);
    (n / g, d / g)
}

type Ratio = (i64, i64);

/// Canonical `(D, a, b, c)` for the lattice `(1/D) < (a, b), (0, c) >`
/// generated by rational coordinate pairs, via the determinant of 2x2 minors.
fn minors_oracle(gens: &[(Ratio, Ratio)]) -> (i64, [i64; 3]) {
    let l = gens.iter().fold(1, |acc, (a, b)| lcm(lcm(acc, a.1), b.1));
    let rows: Vec<(i64, i64)> = gens.iter().map(|(a, b)| (a.0 * (l / a.1), b.0 * (l / b.1))).collect();
    let a = rows.iter().fold(0, |g, r| gcd(g, r.0));
    let mut det = 0;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            det = gcd(det, rows[i].0 * rows[j].1 - rows[i].1 * rows[j].0);
        }
    }
    let c = det / a;
    let (mut acc_a, mut acc_b) = (0i64, 0i64);
    for r in &rows {
        let (g, x, y) = ext_gcd(acc_a, r.0);
        acc_b = x * acc_b + y * r.1;
        acc_a = g;
    }
    assert_eq!(acc_a, a);
    let b = acc_b.rem_euclid(c);
    let g = gcd(gcd(gcd(l, a), b), c);
    (l / g, [a / g, b / g, c / g])
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

#[test]
fn rational_trace_ranges_match_gcd_oracle() {
    let mut rng = sample::rng(17);
    for _ in 0..100 {
        let mu = frac(rng.gen_range(0..40), rng.gen_range(1..40));
        let nu = frac(rng.gen_range(0..40), rng.gen_range(1..40));
        let p = Params::rational(1, mu, nu).unwrap();
        let g = trace_range(&p);
        assert_eq!(g.denom, big(gcd_oracle(mu, nu)), "{mu:?} {nu:?}");
        assert_eq!(g.h, vec![vec![big(1)]]);
    }
}

#[test]
fn quadratic_trace_ranges_match_minors_oracle() {
    let mut rng = sample::rng(23);
    for d in [2u64, 5] {
        for _ in 0..50 {
            let pick = |rng: &mut sample::SampleRng| frac(rng.gen_range(-20..20), rng.gen_range(1..15));
            let (ma, mb, na, nb) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let mb = if mb.0 == 0 { (1, mb.1) } else { mb };
            let mk = |a: (i64, i64), b: (i64, i64)| {
                ExactScalar::new(
                    num_rational::BigRational::new(big(a.0), big(a.1)),
                    num_rational::BigRational::new(big(b.0), big(b.1)),
                    d,
                )
                .unwrap()
            };
            let p = Params::new(1, mk(ma, mb), mk(na, nb), d).unwrap();
            let two = |s: &ExactScalar| {
                let r = s.rational_part();
                let t = s.surd_part();
                let r: (i64, i64) = (2 * i64::try_from(r.numer()).unwrap(), i64::try_from(r.denom()).unwrap());
                let t: (i64, i64) = (2 * i64::try_from(t.numer()).unwrap(), i64::try_from(t.denom()).unwrap());
                (r, t)
            };
            let gens = [((1, 1), (0, 1)), two(&p.mu), two(&p.nu)];
            let (dd, [a, b, c]) = minors_oracle(&gens);
            let g = trace_range(&p);
            assert_eq!(g.denom, big(dd));
            assert_eq!(g.h, vec![vec![big(a), big(b)], vec![big(0), big(c)]]);
        }
    }
}

#[test]
fn orbit_search_matches_gcd_invariant() {
    for q in 1..=8i64 {
        for a in 0..q {
            for b in 0..q {
                for a2 in 0..q {
                    for b2 in 0..q {
                        let want = gcd(gcd(a, b), q) == gcd(gcd(a2, b2), q);
                        assert_eq!(brute_force_orbit_rational(q, (a, b), (a2, b2)), want);
                    }
                }
            }
        }
    }
}

#[test]
fn rational_decisions_report_orbits_only() {
    let mut rng = sample::rng(29);
    for _ in 0..200 {
        let q = rng.gen_range(1..=12);
        let (a, b, a2, b2) = (rng.gen_range(0..q), rng.gen_range(0..q), rng.gen_range(0..q), rng.gen_range(0..q));
        let p = Params::rational(1, (a, q), (b, q)).unwrap();
        let p2 = Params::rational(1, (a2, q), (b2, q)).unwrap();
        let want = gcd(gcd(a, b), q) == gcd(gcd(a2, b2), q);
        assert_eq!(decide_isomorphism(&p, &p2).unwrap().verdict, Verdict::RationalCaseOrbitOnly(want));
    }
}

#[test]
fn decisions_are_symmetric_and_reflexive() {
    let mut rng = sample::rng(31);
    for _ in 0..50 {
        let d = if rng.gen() { 2 } else { 5 };
        let p = Params::new(1, sample::quadratic(&mut rng, d), sample::unit_rational(&mut rng, 6), d).unwrap();
        let p2 = Params::new(1, sample::quadratic(&mut rng, d), sample::quadratic(&mut rng, d), d).unwrap();
        assert_eq!(decide_isomorphism(&p, &p).unwrap().verdict, Verdict::Isomorphic);
        assert_eq!(
            decide_isomorphism(&p, &p2).unwrap().verdict,
            decide_isomorphism(&p2, &p).unwrap().verdict
        );
    }
}
