use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use qhm_core::classify::{apply_gl2z, group_equal, hnf, hnf_contains, Gl2z};
use qhm_core::traces::trace_range_of;
use qhm_core::{ExactScalar, Expr};

fn rational() -> impl Strategy<Value = BigRational> {
    (-60i64..=60, 1i64..=12).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn scalar_in(d: u64) -> impl Strategy<Value = ExactScalar> {
    (rational(), rational()).prop_map(move |(a, b)| ExactScalar::new(a, b, d).unwrap())
}

fn field() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

fn triple() -> impl Strategy<Value = (ExactScalar, ExactScalar, ExactScalar)> {
    field().prop_flat_map(|d| (scalar_in(d), scalar_in(d), scalar_in(d)))
}

fn word() -> impl Strategy<Value = Vec<Gl2z>> {
    prop::collection::vec(prop::sample::select(Gl2z::generators().to_vec()), 0..=12)
}

proptest! {
    #[test]
    fn field_axioms((s, t, u) in triple()) {
        prop_assert_eq!(s.checked_add(&t).unwrap(), t.checked_add(&s).unwrap());
        prop_assert_eq!(s.checked_mul(&t).unwrap(), t.checked_mul(&s).unwrap());
        let st = s.checked_add(&t).unwrap();
        prop_assert_eq!(st.checked_add(&u).unwrap(), s.checked_add(&t.checked_add(&u).unwrap()).unwrap());
        let left = s.checked_mul(&t.checked_mul(&u).unwrap()).unwrap();
        prop_assert_eq!(left, s.checked_mul(&t).unwrap().checked_mul(&u).unwrap());
        let dist = s.checked_mul(&t.checked_add(&u).unwrap()).unwrap();
        prop_assert_eq!(dist, s.checked_mul(&t).unwrap().checked_add(&s.checked_mul(&u).unwrap()).unwrap());
        prop_assert!(s.checked_sub(&s).unwrap().is_zero());
        if !s.is_zero() {
            prop_assert_eq!(s.checked_mul(&s.recip().unwrap()).unwrap(), ExactScalar::one());
        }
    }

    #[test]
    fn sign_is_multiplicative((s, t, _) in triple()) {
        prop_assert_eq!(s.checked_mul(&t).unwrap().sign(), s.sign() * t.sign());
        prop_assert_eq!(s.neg().sign(), -s.sign());
    }

    #[test]
    fn sign_agrees_with_floating_point((s, _, _) in triple()) {
        let f = s.to_f64();
        if f.abs() > 1e-9 {
            prop_assert_eq!(s.sign(), if f > 0.0 { 1 } else { -1 });
        }
    }

    #[test]
    fn floor_reconstructs((s, _, _) in triple()) {
        let (k, r) = s.floor_mod1();
        prop_assert!(r.sign() >= 0);
        prop_assert!(r.try_cmp(&ExactScalar::one()).unwrap().is_lt());
        let k = ExactScalar::rational(BigRational::from_integer(k));
        prop_assert_eq!(k.checked_add(&r).unwrap(), s);
    }

    #[test]
    fn print_parse_round_trip((s, _, _) in triple()) {
        let back: ExactScalar = s.to_string().parse().unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn hnf_is_idempotent_and_spans(rows in prop::collection::vec((-30i64..=30, -30i64..=30), 1..6)) {
        let rows: Vec<Vec<BigInt>> = rows.iter().map(|&(a, b)| vec![a.into(), b.into()]).collect();
        let h = hnf(&rows);
        prop_assert_eq!(hnf(&h), h.clone());
        for r in &rows {
            prop_assert!(hnf_contains(&h, r));
        }
    }

    #[test]
    fn trace_range_ignores_integer_shifts((s, t, _) in triple(), n in -5i64..=5, m in -5i64..=5) {
        let d = s.field().max(t.field());
        let base = trace_range_of(d, &s, &t).unwrap();
        let moved = trace_range_of(
            d,
            &s.checked_add(&ExactScalar::from_int(n)).unwrap(),
            &t.checked_add(&ExactScalar::from_int(m)).unwrap(),
        ).unwrap();
        prop_assert_eq!(&base, &moved);
        prop_assert!(base.contains(&ExactScalar::one()));
    }

    #[test]
    fn trace_range_is_gl2z_invariant((s, t, _) in triple(), w in word()) {
        let d = s.field().max(t.field());
        let g = Gl2z::word(&w);
        let (s2, t2) = apply_gl2z(&g, (&s, &t)).unwrap();
        let a = trace_range_of(d, &s, &t).unwrap();
        let b = trace_range_of(d, &s2, &t2).unwrap();
        prop_assert!(group_equal(&a, &b).unwrap());
    }

    #[test]
    fn translation_moves_the_argument(q in -3i64..=3, r in -3i64..=3, u in rational(), v in rational(), x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let f = Expr::wave(q, r).plus(Expr::Var(qhm_core::Var::X));
        let (us, vs) = (ExactScalar::rational(u.clone()), ExactScalar::rational(v.clone()));
        let moved = f.translate(&us, &vs);
        let (uf, vf) = (us.to_f64(), vs.to_f64());
        prop_assert!((moved.eval(x, y) - f.eval(x + uf, y + vf)).norm() < 1e-9);
    }
}
