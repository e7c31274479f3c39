//! The actions `lambda` and `sigma` on `R x T`, the cocycle `u`, the
//! `lambda`-cocycle `H` that untwists covariant functions, the embedding
//! `J` into the crossed product, and the crossed-product algebra itself.
//!
//! Conventions: `lambda_k(x, y) = (x + 2k mu, y + 2k nu)`,
//! `sigma_k(x, y) = (x - k, y)`, `u(p, k) = exp(2 pi i c k p (y - p nu))`,
//! functions are translated by `(lambda_q f)(m) = f(lambda_{-q} m)`, and
//! `H_1(x, y) = exp(2 pi i c floor(x) (y - nu))`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::element::QhmElement;
use crate::error::{Error, Result};
use crate::expr::{certified_floor, frac_f64, int, unit, Expr};
use crate::params::Params;
use crate::scalar::ExactScalar;

pub type Point = (f64, f64);

/// `lambda_k` on `R x T` (x unreduced, y reduced into `[0,1)`).
pub fn lambda_act(params: &Params, k: i64, (x, y): Point) -> Point {
    (x + 2.0 * k as f64 * params.mu_f64(), frac_f64(y + 2.0 * k as f64 * params.nu_f64()))
}

/// `lambda_k` on the torus.
pub fn lambda_act_torus(params: &Params, k: i64, (x, y): Point) -> Point {
    let (x, y) = lambda_act(params, k, (x, y));
    (frac_f64(x), y)
}

/// Exact `lambda_k`; `torus` selects whether `x` is reduced too.
pub fn lambda_act_exact(
    params: &Params,
    k: i64,
    (x, y): (&ExactScalar, &ExactScalar),
    torus: bool,
) -> Result<(ExactScalar, ExactScalar)> {
    let nx = x.checked_add(&params.shift_x(k))?;
    let ny = y.checked_add(&params.shift_y(k))?.frac();
    Ok((if torus { nx.frac() } else { nx }, ny))
}

pub fn sigma_act(k: i64, (x, y): Point) -> Point {
    (x - k as f64, y)
}

pub fn sigma_act_exact(k: i64, (x, y): (&ExactScalar, &ExactScalar)) -> (ExactScalar, ExactScalar) {
    (x.checked_sub(&ExactScalar::from_int(k)).expect("integer shift"), y.clone())
}

/// `u(p, k)(y) = exp(2 pi i c k p (y - p nu))`.
pub fn u_cocycle(params: &Params, p: i64, k: i64, y: f64) -> Complex64 {
    let ckp = params.c as f64 * k as f64 * p as f64;
    let offset = (ckp * p as f64 * params.nu_f64()).rem_euclid(1.0);
    unit(ckp * y - offset)
}

/// Phase (in turns) of `H_1(lambda_{-q} m)`.
fn h1_phase_shifted(params: &Params, q: i64, (x, y): Point) -> f64 {
    let t = -2.0 * q as f64 * params.mu_f64();
    let k = certified_floor(x, t, || params.shift_x(-q));
    let c = params.c as f64;
    // c k (y - 2q nu - nu)
    let off = (c * k as f64 * (2 * q + 1) as f64 * params.nu_f64()).rem_euclid(1.0);
    c * k as f64 * y - off
}

/// `H_p(m)`: `prod_{q=0}^{p-1} H_1(lambda_{-q} m)` for `p > 0`, `1` for
/// `p = 0`, and `prod_{q=p}^{-1} conj(H_1(lambda_{-q} m))` for `p < 0`.
pub fn h_cocycle(params: &Params, p: i64, m: Point) -> Complex64 {
    let turns: f64 = if p >= 0 {
        (0..p).map(|q| h1_phase_shifted(params, q, m)).sum()
    } else {
        -(p..0).map(|q| h1_phase_shifted(params, q, m)).sum::<f64>()
    };
    unit(turns)
}

/// `H_p` restricted to `F`, as an expression.
pub fn h_expr(params: &Params, p: i64) -> Expr {
    let c = params.c as i64;
    let factor = |q: i64, sign: i64| {
        let beta = params.nu.scale_int(-(2 * q + 1));
        Expr::floor_phase(int(sign * c), beta, params.shift_x(-q))
    };
    let factors: Vec<Expr> = if p >= 0 { (0..p).map(|q| factor(q, 1)).collect() } else { (p..0).map(|q| factor(q, -1)).collect() };
    Expr::product(factors)
}

/// Element of `A x|_lambda Z`: a finitely supported family of functions on
/// the torus, each stored on `[0,1)^2` and evaluated periodically.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossedElement {
    params: Params,
    components: BTreeMap<i64, Expr>,
}

impl CrossedElement {
    pub fn new(params: Params, components: BTreeMap<i64, Expr>) -> Self {
        let components = components.into_iter().filter(|(_, e)| !e.is_zero()).collect();
        CrossedElement { params, components }
    }

    pub fn unit(params: Params) -> Self {
        Self::new(params, BTreeMap::from([(0, Expr::one())]))
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn components(&self) -> &BTreeMap<i64, Expr> {
        &self.components
    }

    pub fn support(&self) -> Vec<i64> {
        self.components.keys().copied().collect()
    }

    pub fn eval(&self, x: f64, y: f64, p: i64) -> Complex64 {
        match self.components.get(&p) {
            Some(f) => f.eval(frac_f64(x), frac_f64(y)),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// `(F * G)(m, p) = sum_q F(m, q) G(lambda_{-q} m, p - q)`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        let mut terms: BTreeMap<i64, Vec<Expr>> = BTreeMap::new();
        for (&q, f) in &self.components {
            for (&r, g) in &other.components {
                terms.entry(q + r).or_default().push(f.clone().times(torus_translate(&self.params, g, q)));
            }
        }
        let comps = terms.into_iter().map(|(p, ts)| (p, Expr::sum(ts))).collect();
        Ok(Self::new(self.params.clone(), comps))
    }

    /// `F^*(m, p) = conj(F(lambda_{-p} m, -p))`.
    pub fn adjoint(&self) -> Self {
        let comps = self.components.iter().map(|(&r, f)| (-r, torus_translate(&self.params, f, -r).conj())).collect();
        Self::new(self.params.clone(), comps)
    }

    /// Breakpoints of every component that fall outside `2 mu Z + Z` (mod 1).
    /// Empty means every component is built from strips the algebra `A` allows.
    pub fn foreign_breakpoints(&self) -> Vec<(i64, ExactScalar)> {
        let mut out = Vec::new();
        for (&p, f) in &self.components {
            for b in f.x_breakpoints() {
                if !in_strip_lattice(&self.params, &b) {
                    out.push((p, b));
                }
            }
        }
        out
    }
}

/// `m -> g(lambda_{-q} m)` on the torus.
fn torus_translate(params: &Params, g: &Expr, q: i64) -> Expr {
    if q == 0 {
        return g.clone();
    }
    Expr::wrap(g.clone()).translate(&params.shift_x(-q), &params.shift_y(-q))
}

/// Whether `s` lies in `2 mu Z + Z`.
pub fn in_strip_lattice(params: &Params, s: &ExactScalar) -> bool {
    let two_mu = params.shift_x(1);
    if two_mu.is_rational() {
        if !s.is_rational() {
            return false;
        }
        // 2 mu = P/Q in lowest terms, so 2 mu Z + Z = (1/Q) Z
        let q = two_mu.rational_part().denom().clone();
        (s.rational_part() * num_rational::BigRational::from_integer(q)).is_integer()
    } else {
        let k = s.surd_part() / two_mu.surd_part();
        if !k.is_integer() {
            return false;
        }
        let rest = s.checked_sub(&two_mu.scale(&k));
        matches!(rest, Ok(r) if r.as_integer().is_some())
    }
}

/// The embedding `J`: `(J Phi)(m, p) = H_p(m) Phi(m, p)` on `F`.
pub fn embed(phi: &QhmElement) -> CrossedElement {
    let params = phi.params().clone();
    let comps = phi.components().iter().map(|(&p, f)| (p, h_expr(&params, p).times(f.clone()))).collect();
    CrossedElement::new(params, comps)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CocycleReport {
    pub samples: usize,
    pub tolerance: f64,
    /// `H_{p+q}(m) = H_p(m) H_q(lambda_{-p} m)`.
    pub h_cocycle_law: f64,
    /// `conj(H_{-p}(lambda_{-p} m)) = H_p(m)`.
    pub h_reflection: f64,
    /// `H_p(sigma_{-k} m) = u(p,k)(m) H_p(m)`.
    pub h_sigma_twist: f64,
    /// `u(p+q,k) = u(p,k) lambda_p[u(q,k)]`.
    pub u_lambda_law: f64,
    /// `u(p,k+l) = u(p,k) sigma_k[u(p,l)]`.
    pub u_sigma_law: f64,
    pub pass: bool,
}

pub const COCYCLE_TOL: f64 = 1e-10;

/// Samples the cocycle identities at random `m in [-3, 3) x [0, 1)` with
/// `|p|, |q|, |k|, |l| <= 4`.
pub fn verify_lemma_coc<R: Rng>(params: &Params, samples: usize, rng: &mut R) -> CocycleReport {
    let mut dev = [0.0f64; 5];
    for _ in 0..samples {
        let m = (rng.gen_range(-3.0..3.0), rng.gen_range(0.0..1.0));
        let p = rng.gen_range(-4i64..=4);
        let q = rng.gen_range(-4i64..=4);
        let k = rng.gen_range(-4i64..=4);
        let l = rng.gen_range(-4i64..=4);
        let lm = lambda_act(params, -p, m);

        let i = h_cocycle(params, p + q, m) - h_cocycle(params, p, m) * h_cocycle(params, q, lm);
        let ii = h_cocycle(params, -p, lm).conj() - h_cocycle(params, p, m);
        let iii = h_cocycle(params, p, sigma_act(-k, m)) - u_cocycle(params, p, k, m.1) * h_cocycle(params, p, m);
        let ul = u_cocycle(params, p + q, k, m.1) - u_cocycle(params, p, k, m.1) * u_cocycle(params, q, k, lm.1);
        // sigma leaves y alone, so sigma_k[u(p,l)] = u(p,l)
        let us = u_cocycle(params, p, k + l, m.1) - u_cocycle(params, p, k, m.1) * u_cocycle(params, p, l, m.1);
        for (d, z) in dev.iter_mut().zip([i, ii, iii, ul, us]) {
            *d = d.max(z.norm());
        }
    }
    CocycleReport {
        samples,
        tolerance: COCYCLE_TOL,
        h_cocycle_law: dev[0],
        h_reflection: dev[1],
        h_sigma_twist: dev[2],
        u_lambda_law: dev[3],
        u_sigma_law: dev[4],
        pass: dev.iter().all(|d| *d < COCYCLE_TOL),
    }
}
