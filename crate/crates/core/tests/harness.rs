use qhm_core::{verify, Params};

fn param_sets() -> Vec<Params> {
    let s = |t: &str| t.parse().unwrap();
    vec![
        Params::rational(1, (1, 4), (1, 6)).unwrap(),
        Params::rational(2, (1, 3), (1, 5)).unwrap(),
        Params::new(1, s("1/2*sqrt(2)"), s("1/3"), 2).unwrap(),
        Params::new(3, s("-1/2 + 1/2*sqrt(5)"), s("-2 + sqrt(5)"), 5).unwrap(),
    ]
}

#[test]
fn cocycle_suite() {
    for p in param_sets() {
        let r = verify::cocycle(&p, 1000, 7);
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn embedding_suite() {
    for p in param_sets() {
        let r = verify::embedding(&p, 5, 64, 3, 7).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn partition_suite() {
    for p in param_sets() {
        let r = verify::partition(&p, 256, 7).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn covariance_suite() {
    for p in param_sets() {
        let r = verify::covariance(&p, 5, 50, 7);
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn tracial_suite() {
    for p in param_sets() {
        let r = verify::tracial(&p, 4, 256, 7).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn norm_suite() {
    let p = param_sets().remove(3);
    let mut rng = qhm_core::sample::rng(7);
    for _ in 0..3 {
        let phi = qhm_core::sample::element(&p, &mut rng, 2, true);
        let r = verify::norms(&phi, &verify::nested_specs(2, 3)).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
