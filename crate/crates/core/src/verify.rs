//! Verification harnesses: sampled checks of the algebraic identities, each
//! returning a serializable report that records its tolerance and sample count.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::cocycle::{embed, h_cocycle, sigma_act, verify_lemma_coc, CocycleReport};
use crate::element::{check_covariance, decompose_delta, delta_functions, QhmElement};
use crate::error::Result;
use crate::expr::{Expr, Var};
use crate::norm::{norm_lower_bound, theta_matrix, NormBound, TruncationSpec};
use crate::params::Params;
use crate::sample;
use crate::traces::{trace, InvariantMeasure};

pub const EMBED_TOL: f64 = 1e-9;
pub const SIGMA_TOL: f64 = 1e-12;
pub const PARTITION_TOL: f64 = 1e-12;
pub const RECONSTRUCT_TOL: f64 = 1e-10;
pub const COVARIANCE_TOL: f64 = 1e-12;
pub const TRACIAL_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-9;

pub fn cocycle(params: &Params, samples: usize, seed: u64) -> CocycleReport {
    verify_lemma_coc(params, samples, &mut sample::rng(seed))
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingReport {
    pub pairs: usize,
    pub samples: usize,
    pub tolerance: f64,
    pub product_deviation: f64,
    pub adjoint_deviation: f64,
    pub sigma_tolerance: f64,
    pub sigma_deviation: f64,
    /// Component breakpoints of `J Phi` outside `2mu Z + Z`.
    pub foreign_breakpoints: usize,
    pub pass: bool,
}

/// `J(Phi * Psi) = J Phi * J Psi`, `J(Phi^*) = (J Phi)^*` and
/// sigma-invariance of `H_p Phi(., p)` on random pairs.
pub fn embedding(params: &Params, pairs: usize, samples: usize, max_p: i64, seed: u64) -> Result<EmbeddingReport> {
    let mut rng = sample::rng(seed);
    let (mut prod, mut adj, mut sig) = (0.0f64, 0.0f64, 0.0f64);
    let mut foreign = 0;
    for _ in 0..pairs {
        let phi = sample::element(params, &mut rng, max_p, true);
        let psi = sample::element(params, &mut rng, max_p, true);
        let (jphi, jpsi) = (embed(&phi), embed(&psi));
        let lhs = embed(&phi.multiply(&psi)?);
        let rhs = jphi.multiply(&jpsi)?;
        let jstar = embed(&phi.adjoint());
        let starj = jphi.adjoint();
        foreign += jphi.foreign_breakpoints().len() + jpsi.foreign_breakpoints().len();
        let ps: Vec<i64> = (-2 * max_p..=2 * max_p).collect();
        for _ in 0..samples {
            let (x, y) = sample::point(&mut rng);
            for &p in &ps {
                prod = prod.max((lhs.eval(x, y, p) - rhs.eval(x, y, p)).norm());
                adj = adj.max((jstar.eval(x, y, p) - starj.eval(x, y, p)).norm());
            }
            let m = (rng.gen_range(-3.0..3.0), y);
            let k = rng.gen_range(-3i64..=3);
            let moved = sigma_act(-k, m);
            for p in phi.support() {
                let a = h_cocycle(params, p, moved) * phi.extend_eval(moved.0, moved.1, p);
                let b = h_cocycle(params, p, m) * phi.extend_eval(m.0, m.1, p);
                sig = sig.max((a - b).norm());
            }
        }
    }
    Ok(EmbeddingReport {
        pairs,
        samples,
        tolerance: EMBED_TOL,
        product_deviation: prod,
        adjoint_deviation: adj,
        sigma_tolerance: SIGMA_TOL,
        sigma_deviation: sig,
        foreign_breakpoints: foreign,
        pass: prod < EMBED_TOL && adj < EMBED_TOL && sig < SIGMA_TOL && foreign == 0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub partition_samples: usize,
    pub partition_tolerance: f64,
    pub partition_deviation: f64,
    pub reconstruction_samples: usize,
    pub reconstruction_tolerance: f64,
    pub reconstruction_deviation: f64,
    pub seams_continuous: bool,
    pub pass: bool,
}

/// `|Delta_1|^2 + |Delta_2|^2 = 1` and the two-term reconstruction of
/// `Phi delta_p` for `p` in `-2..=2`.
pub fn partition(params: &Params, samples: usize, seed: u64) -> Result<PartitionReport> {
    let mut rng = sample::rng(seed);
    let (mut part, mut rec) = (0.0f64, 0.0f64);
    let mut seams = true;
    let partition_samples = 1000;
    for p in -2..=2 {
        let (d1, d2) = delta_functions(params, p);
        for _ in 0..partition_samples {
            let (x, y) = sample::point(&mut rng);
            part = part.max((d1.eval(x, y).norm_sqr() + d2.eval(x, y).norm_sqr() - 1.0).abs());
        }
        seams &= QhmElement::single(params.clone(), p, d2).seam_check(64).iter().all(|s| s.continuous);
        let phi = QhmElement::single(params.clone(), p, sample::trig_poly(&mut rng, 3, 2));
        let back = decompose_delta(&phi)?.reconstruct()?;
        for _ in 0..samples {
            let (x, y) = sample::point(&mut rng);
            let x = x + rng.gen_range(-2i64..=2) as f64;
            rec = rec.max((back.extend_eval(x, y, p) - phi.extend_eval(x, y, p)).norm());
        }
    }
    Ok(PartitionReport {
        partition_samples: 5 * partition_samples,
        partition_tolerance: PARTITION_TOL,
        partition_deviation: part,
        reconstruction_samples: 5 * samples,
        reconstruction_tolerance: RECONSTRUCT_TOL,
        reconstruction_deviation: rec,
        seams_continuous: seams,
        pass: part < PARTITION_TOL && rec < RECONSTRUCT_TOL && seams,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CovarianceSummary {
    pub elements: usize,
    pub samples: usize,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Covariance of random and partition-of-unity elements for `k` in `-3..=3`.
pub fn covariance(params: &Params, elements: usize, samples: usize, seed: u64) -> CovarianceSummary {
    let mut rng = sample::rng(seed);
    let ks: Vec<i64> = (-3..=3).collect();
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut els: Vec<QhmElement> = (0..elements).map(|_| sample::element(params, &mut rng, 3, true)).collect();
    for p in -2..=2 {
        let (d1, d2) = delta_functions(params, p);
        els.push(QhmElement::single(params.clone(), p, d1));
        els.push(QhmElement::single(params.clone(), p, d2));
    }
    for e in &els {
        let pts = sample::points(&mut rng, samples);
        let r = check_covariance(e, &ks, &pts);
        worst = worst.max(r.max_deviation);
        count += r.samples;
    }
    CovarianceSummary {
        elements: els.len(),
        samples: count,
        tolerance: COVARIANCE_TOL,
        max_deviation: worst,
        pass: worst <= COVARIANCE_TOL,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureTraceReport {
    pub measure: String,
    pub tracial_deviation: f64,
    pub min_positive_part: f64,
    pub max_imaginary_part: f64,
    pub unit_trace: f64,
    pub strip_function_trace: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TracialReport {
    pub pairs: usize,
    pub grid: usize,
    pub tolerance: f64,
    pub measures: Vec<MeasureTraceReport>,
    pub pass: bool,
}

/// Traciality, positivity and normalization for every registered measure.
pub fn tracial(params: &Params, pairs: usize, grid: usize, seed: u64) -> Result<TracialReport> {
    let mut rng = sample::rng(seed);
    let elements: Vec<(QhmElement, QhmElement)> = (0..pairs)
        .map(|_| (sample::element(params, &mut rng, 2, false), sample::element(params, &mut rng, 2, false)))
        .collect();
    let unit = QhmElement::unit(params.clone());
    let f1 = QhmElement::single(params.clone(), 1, Expr::abs(Expr::SinPi(Var::X)));
    let f1f1 = f1.multiply(&f1.adjoint())?;
    let mut reports = Vec::new();
    let mut pass = true;
    for (name, m) in InvariantMeasure::registry(params, grid) {
        let mut dev = 0.0f64;
        let mut min_pos = f64::INFINITY;
        let mut max_im = 0.0f64;
        for (phi, psi) in &elements {
            let ab = trace(&phi.multiply(psi)?, &m)?;
            let ba = trace(&psi.multiply(phi)?, &m)?;
            dev = dev.max((ab - ba).norm());
            let pos: Complex64 = trace(&phi.multiply(&phi.adjoint())?, &m)?;
            min_pos = min_pos.min(pos.re);
            max_im = max_im.max(pos.im.abs());
        }
        let unit_trace = trace(&unit, &m)?.re;
        let strip = trace(&f1f1, &m)?.re;
        pass &= dev < TRACIAL_TOL && min_pos > -TRACIAL_TOL && max_im < TRACIAL_TOL && unit_trace == 1.0;
        if name == "haar" {
            pass &= (strip - 0.5).abs() < TRACIAL_TOL;
        }
        reports.push(MeasureTraceReport {
            measure: name,
            tracial_deviation: dev,
            min_positive_part: if min_pos.is_finite() { min_pos } else { 0.0 },
            max_imaginary_part: max_im,
            unit_trace,
            strip_function_trace: strip,
        });
    }
    Ok(TracialReport { pairs, grid, tolerance: TRACIAL_TOL, measures: reports, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub bounds: Vec<NormBound>,
    pub adjoint_bounds: Vec<NormBound>,
    pub tolerance: f64,
    pub adjoint_deviation: f64,
    pub monotone: bool,
    pub pass: bool,
}

/// Nested lower bounds for `Phi` and `Phi^*`.
pub fn norms(phi: &QhmElement, specs: &[TruncationSpec]) -> Result<NormReport> {
    let bounds = norm_lower_bound(phi, specs)?;
    let adjoint_bounds = norm_lower_bound(&phi.adjoint(), specs)?;
    let mut dev = 0.0f64;
    for spec in specs {
        let a = theta_matrix(phi, spec)?.norm();
        let b = theta_matrix(&phi.adjoint(), spec)?.norm();
        dev = dev.max((a - b).abs());
    }
    let monotone = bounds.windows(2).all(|w| w[1].bound >= w[0].bound);
    Ok(NormReport {
        tolerance: NORM_TOL,
        adjoint_deviation: dev,
        monotone,
        pass: monotone && dev < NORM_TOL,
        bounds,
        adjoint_bounds,
    })
}

/// Nested specs with grids `k, 3k, 9k, ...` and cutoffs growing by one.
pub fn nested_specs(base_cutoff: usize, levels: usize) -> Vec<TruncationSpec> {
    (0..levels)
        .map(|i| TruncationSpec::uniform(3usize.pow(i as u32), base_cutoff + i))
        .collect()
}
