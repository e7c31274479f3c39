//! Elements of the dense subalgebra `C^c_{mu nu}`.
//!
//! An element is a finitely supported family `p -> Phi(., ., p)` of functions
//! on the fundamental domain `F = [0,1) x T`. Values off `F` are defined by
//! the quasi-periodic extension
//!
//! ```text
//! Phi(x + k, y, p) = exp(-2 pi i c p k (y - p nu)) Phi(x, y, p)
//! ```
//!
//! which is exactly the fixed-point condition for the twisted action, so
//! covariance holds by construction. Products and adjoints are built as
//! closed expression trees on `F`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{certified_floor, frac_f64, int, unit, Expr, Var};
use crate::params::Params;
use crate::scalar::ExactScalar;

#[derive(Clone, Debug, PartialEq)]
pub struct QhmElement {
    params: Params,
    components: BTreeMap<i64, Expr>,
}

/// Per-component result of the seam continuity check at `x -> 1-`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SeamReport {
    pub p: i64,
    pub max_jump: f64,
    pub continuous: bool,
}

/// Step used to approach the seam from the left.
const SEAM_STEP: f64 = 1e-9;
const SEAM_TOL: f64 = 1e-6;

impl QhmElement {
    pub fn new(params: Params, components: BTreeMap<i64, Expr>) -> Self {
        let components = components.into_iter().filter(|(_, e)| !e.is_zero()).collect();
        QhmElement { params, components }
    }

    pub fn zero(params: Params) -> Self {
        Self::new(params, BTreeMap::new())
    }

    /// `1 * delta_0`, the unit.
    pub fn unit(params: Params) -> Self {
        Self::single(params, 0, Expr::one())
    }

    /// `f * delta_p`.
    pub fn single(params: Params, p: i64, f: Expr) -> Self {
        Self::new(params, BTreeMap::from([(p, f)]))
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn components(&self) -> &BTreeMap<i64, Expr> {
        &self.components
    }

    pub fn component(&self, p: i64) -> Option<&Expr> {
        self.components.get(&p)
    }

    pub fn support(&self) -> Vec<i64> {
        self.components.keys().copied().collect()
    }

    /// Largest `|p|` in the support; `0` for the zero element.
    pub fn support_radius(&self) -> usize {
        self.components.keys().map(|p| p.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// `Phi(x, y, p)` anywhere on `R x T`.
    pub fn extend_eval(&self, x: f64, y: f64, p: i64) -> Complex64 {
        let Some(f) = self.components.get(&p) else {
            return Complex64::new(0.0, 0.0);
        };
        let k = certified_floor(x, 0.0, ExactScalar::zero);
        let x0 = frac_f64(x - k as f64);
        let y0 = frac_f64(y);
        extension_phase(&self.params, p, k, y0) * f.eval(x0, y0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_params(other)?;
        let mut out = self.components.clone();
        for (p, g) in &other.components {
            let merged = match out.remove(p) {
                Some(f) => f.plus(g.clone()),
                None => g.clone(),
            };
            out.insert(*p, merged);
        }
        Ok(Self::new(self.params.clone(), out))
    }

    pub fn scale(&self, k: &ExactScalar) -> Self {
        let comps = self.components.iter().map(|(p, f)| (*p, f.clone().scaled(k.clone()))).collect();
        Self::new(self.params.clone(), comps)
    }

    fn same_params(&self, other: &Self) -> Result<()> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        Ok(())
    }

    /// Twisted convolution
    /// `(Phi * Psi)(m, p) = sum_q Phi(m, q) Psi(lambda_{-q} m, p - q)`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same_params(other)?;
        let mut terms: BTreeMap<i64, Vec<Expr>> = BTreeMap::new();
        for (&q, f) in &self.components {
            for (&r, g) in &other.components {
                let moved = extended_translate(&self.params, g, r, q);
                terms.entry(q + r).or_default().push(f.clone().times(moved));
            }
        }
        let comps = terms.into_iter().map(|(p, ts)| (p, Expr::sum(ts))).collect();
        Ok(Self::new(self.params.clone(), comps))
    }

    /// `Phi^*(m, p) = conj(Phi(lambda_{-p} m, -p))`.
    pub fn adjoint(&self) -> Self {
        let comps = self
            .components
            .iter()
            .map(|(&r, f)| (-r, extended_translate(&self.params, f, r, -r).conj()))
            .collect();
        Self::new(self.params.clone(), comps)
    }

    /// Seam continuity `Phi(1-, y, p) = exp(-2 pi i c p (y - p nu)) Phi(0, y, p)`,
    /// sampled at `samples` values of `y`.
    pub fn seam_check(&self, samples: usize) -> Vec<SeamReport> {
        let n = samples.max(1);
        self.components
            .iter()
            .map(|(&p, f)| {
                let max_jump = (0..n)
                    .map(|j| {
                        let y = (j as f64 + 0.5) / n as f64;
                        let left = f.eval(1.0 - SEAM_STEP, y);
                        let right = extension_phase(&self.params, p, 1, y) * f.eval(0.0, y);
                        (left - right).norm()
                    })
                    .fold(0.0, f64::max);
                SeamReport { p, max_jump, continuous: max_jump < SEAM_TOL }
            })
            .collect()
    }
}

/// `exp(-2 pi i c p k (y - p nu))`, the factor relating `Phi(x + k, y, p)` to `Phi(x, y, p)`.
pub fn extension_phase(params: &Params, p: i64, k: i64, y: f64) -> Complex64 {
    let cpk = params.c as f64 * p as f64 * k as f64;
    let offset = (cpk * p as f64 * params.nu_f64()).rem_euclid(1.0);
    unit(-cpk * y + offset)
}

/// The function `m -> Psi(lambda_{-q} m, r)` on `F`, where `g` is the `r`
/// component of `Psi` on `F`: an argument translation of the wrapped
/// component times the floor phase supplied by the extension rule.
fn extended_translate(params: &Params, g: &Expr, r: i64, q: i64) -> Expr {
    if q == 0 {
        return g.clone();
    }
    let u = params.shift_x(-q);
    let v = params.shift_y(-q);
    // exp(-2 pi i c r floor(x - 2q mu) (y - 2q nu - r nu))
    let alpha = int(-(params.c as i64) * r);
    let beta = v.checked_sub(&params.nu.scale_int(r)).expect("params share one field");
    let phase = Expr::floor_phase(alpha, beta, u.clone());
    phase.times(Expr::wrap(g.clone()).translate(&u, &v))
}

/// The partition-of-unity pair `(Delta_1, Delta_2)` on `F` for index `p`,
/// built from `d(x) = sin^2(pi x)`.
pub fn delta_functions(params: &Params, p: i64) -> (Expr, Expr) {
    let delta1 = Expr::abs(Expr::SinPi(Var::X));
    let half = ExactScalar::from_ratio(1, 2);
    let cp = params.c as i64 * p;
    // exp(-2 pi i c p (y - p nu)) on [1/2, 1)
    let twist = Expr::exp(ExactScalar::zero(), int(-cp), params.nu.scale_int(cp * p));
    let cos = Expr::abs(Expr::CosPi(Var::X));
    let delta2 = Expr::sum(vec![
        Expr::chi(ExactScalar::zero(), half.clone()).times(cos.clone()),
        Expr::product(vec![Expr::chi(half, ExactScalar::one()), cos, twist]),
    ]);
    (delta1, delta2)
}

/// Factors of `Phi delta_p = Phi conj(D1) delta_0 * D1 delta_p + Phi conj(D2) delta_0 * D2 delta_p`.
#[derive(Clone, Debug)]
pub struct DeltaDecomposition {
    pub left1: QhmElement,
    pub right1: QhmElement,
    pub left2: QhmElement,
    pub right2: QhmElement,
}

impl DeltaDecomposition {
    pub fn reconstruct(&self) -> Result<QhmElement> {
        self.left1.multiply(&self.right1)?.add(&self.left2.multiply(&self.right2)?)
    }
}

pub fn decompose_delta(element: &QhmElement) -> Result<DeltaDecomposition> {
    if element.components.len() != 1 {
        return Err(Error::NotSingleComponent(element.components.len()));
    }
    let (&p, f) = element.components.iter().next().expect("one component");
    let params = element.params.clone();
    let (d1, d2) = delta_functions(&params, p);
    Ok(DeltaDecomposition {
        left1: QhmElement::single(params.clone(), 0, f.clone().times(d1.conj())),
        right1: QhmElement::single(params.clone(), p, d1),
        left2: QhmElement::single(params.clone(), 0, f.clone().times(d2.conj())),
        right2: QhmElement::single(params, p, d2),
    })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CovarianceReport {
    pub samples: usize,
    pub max_deviation: f64,
}

/// Max of `|u(p,k)(m) Phi(sigma_{-k} m, p) - Phi(m, p)|` over the given
/// points and shifts.
pub fn check_covariance(element: &QhmElement, ks: &[i64], points: &[(f64, f64)]) -> CovarianceReport {
    check_covariance_with(element, ks, points, |e, x, y, p| e.extend_eval(x, y, p))
}

/// Same check with a caller-supplied evaluator, so a corrupted extension
/// rule can serve as a negative control.
pub fn check_covariance_with(
    element: &QhmElement,
    ks: &[i64],
    points: &[(f64, f64)],
    eval: impl Fn(&QhmElement, f64, f64, i64) -> Complex64,
) -> CovarianceReport {
    let mut max_deviation: f64 = 0.0;
    let mut samples = 0;
    for &p in element.components.keys() {
        for &k in ks {
            for &(x, y) in points {
                let u = crate::cocycle::u_cocycle(&element.params, p, k, y);
                let lhs = u * eval(element, x + k as f64, y, p);
                let rhs = eval(element, x, y, p);
                max_deviation = max_deviation.max((lhs - rhs).norm());
                samples += 1;
            }
        }
    }
    CovarianceReport { samples, max_deviation }
}
