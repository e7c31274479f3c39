//! Tracial states from `lambda`-invariant probability measures on the torus,
//! the strip mass of `[0, 2 mu) x T`, the trace-range group
//! `Z + 2mu Z + 2nu Z` and the winding value of the `Delta^lambda` map.

use std::collections::BTreeMap;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::classify::{hnf, hnf_contains};
use crate::cocycle::{in_strip_lattice, lambda_act_exact};
use crate::element::QhmElement;
use crate::error::{Error, Result};
use crate::expr::{frac_f64, Expr};
use crate::params::Params;
use crate::scalar::{ratio_to_f64, ExactScalar};

pub const DEFAULT_GRID: usize = 512;
/// Gauss-Legendre order on each x subinterval.
const GL_ORDER: usize = 16;
/// Largest orbit the registry will enumerate.
const MAX_ORBIT: usize = 1 << 14;

/// `E(Phi) = Phi(., ., 0)`, the zero function when `0` is not in the support.
pub fn cond_expect(phi: &QhmElement) -> Expr {
    phi.component(0).cloned().unwrap_or_else(Expr::zero)
}

/// One coordinate of a product measure.
#[derive(Clone, Debug, PartialEq)]
pub enum Marginal {
    Haar,
    Atoms(Vec<(ExactScalar, BigRational)>),
}

/// A `lambda`-invariant probability measure on `T^2`.
#[derive(Clone, Debug, PartialEq)]
pub enum InvariantMeasure {
    /// Lebesgue measure, integrated with `n` points per axis.
    Haar { n: usize },
    Atomic { atoms: Vec<((ExactScalar, ExactScalar), BigRational)> },
    Product { x: Marginal, y: Marginal, n: usize },
}

fn check_weights(weights: &[BigRational]) -> Result<()> {
    if weights.iter().any(|w| !w.is_positive()) {
        return Err(Error::InvalidInput("weights must be positive".into()));
    }
    let total: BigRational = weights.iter().sum();
    if !total.is_one() {
        return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// Merges atoms that share a key, adding their weights.
fn merge<K: Ord, T>(items: impl IntoIterator<Item = (K, T, BigRational)>) -> Vec<(T, BigRational)> {
    let mut map: BTreeMap<K, (T, BigRational)> = BTreeMap::new();
    for (k, item, w) in items {
        map.entry(k).or_insert_with(|| (item, BigRational::zero())).1 += w;
    }
    map.into_values().collect()
}

/// Sort key for exact scalars: the canonical printed form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Key(String);

fn key(s: &ExactScalar) -> Key {
    Key(s.to_string())
}

impl InvariantMeasure {
    pub fn haar(n: usize) -> Self {
        InvariantMeasure::Haar { n: n.max(1) }
    }

    pub fn atomic(points: Vec<(ExactScalar, ExactScalar)>, weights: Vec<BigRational>) -> Result<Self> {
        if points.len() != weights.len() || points.is_empty() {
            return Err(Error::InvalidInput("need one weight per point".into()));
        }
        check_weights(&weights)?;
        let atoms = merge(points.into_iter().zip(weights).map(|((x, y), w)| {
            let (x, y) = (x.frac(), y.frac());
            ((key(&x), key(&y)), (x, y), w)
        }));
        Ok(InvariantMeasure::Atomic { atoms })
    }

    /// Uniform measure on the finite `lambda`-orbit of `start`.
    pub fn orbit(params: &Params, start: (ExactScalar, ExactScalar)) -> Result<Self> {
        let start = (start.0.frac(), start.1.frac());
        let mut points = vec![start.clone()];
        loop {
            let last = points.last().expect("nonempty");
            let next = lambda_act_exact(params, 1, (&last.0, &last.1), true)?;
            if next == start {
                break;
            }
            if points.len() >= MAX_ORBIT {
                return Err(Error::InvalidInput("orbit is infinite or too long".into()));
            }
            points.push(next);
        }
        let w = BigRational::new(BigInt::one(), BigInt::from(points.len()));
        let weights = vec![w; points.len()];
        Self::atomic(points, weights)
    }

    /// Uniform atoms on the orbit of `x0` under `x -> x + 2 mu`, times Haar in `y`.
    pub fn orbit_x_haar_y(params: &Params, x0: ExactScalar, n: usize) -> Result<Self> {
        let atoms = circle_orbit(&x0, &params.shift_x(1))?;
        Ok(InvariantMeasure::Product { x: Marginal::Atoms(atoms), y: Marginal::Haar, n: n.max(1) })
    }

    /// Haar in `x` times uniform atoms on the orbit of `y0` under `y -> y + 2 nu`.
    pub fn haar_x_orbit_y(params: &Params, y0: ExactScalar, n: usize) -> Result<Self> {
        let atoms = circle_orbit(&y0, &params.shift_y(1))?;
        Ok(InvariantMeasure::Product { x: Marginal::Haar, y: Marginal::Atoms(atoms), n: n.max(1) })
    }

    pub fn product(x: Marginal, y: Marginal, n: usize) -> Result<Self> {
        for m in [&x, &y] {
            if let Marginal::Atoms(a) = m {
                if a.is_empty() {
                    return Err(Error::InvalidInput("empty marginal".into()));
                }
                check_weights(&a.iter().map(|(_, w)| w.clone()).collect::<Vec<_>>())?;
            }
        }
        let norm = |m: Marginal| match m {
            Marginal::Haar => Marginal::Haar,
            Marginal::Atoms(a) => Marginal::Atoms(merge(a.into_iter().map(|(p, w)| {
                let p = p.frac();
                (key(&p), p, w)
            }))),
        };
        Ok(InvariantMeasure::Product { x: norm(x), y: norm(y), n: n.max(1) })
    }

    /// The constructively invariant measures available for `params`.
    pub fn registry(params: &Params, n: usize) -> Vec<(String, InvariantMeasure)> {
        let mut out = vec![("haar".to_string(), Self::haar(n))];
        let zero = ExactScalar::zero;
        if params.is_rational() {
            if let Ok(m) = Self::orbit(params, (zero(), zero())) {
                out.push(("orbit".into(), m));
            }
        }
        if params.mu.is_rational() {
            if let Ok(m) = Self::orbit_x_haar_y(params, zero(), n) {
                out.push(("orbit_x_haar_y".into(), m));
            }
        }
        if params.nu.is_rational() {
            if let Ok(m) = Self::haar_x_orbit_y(params, zero(), n) {
                out.push(("haar_x_orbit_y".into(), m));
            }
        }
        out
    }

    /// Total variation between the measure and its push-forward under
    /// `lambda_1`; exactly zero for invariant atomic parts.
    pub fn invariance_defect(&self, params: &Params) -> f64 {
        match self {
            InvariantMeasure::Haar { .. } => 0.0,
            InvariantMeasure::Atomic { atoms } => {
                let weights: BTreeMap<(Key, Key), &BigRational> =
                    atoms.iter().map(|((x, y), w)| ((key(x), key(y)), w)).collect();
                let moved: Result<BTreeMap<(Key, Key), &BigRational>> = atoms
                    .iter()
                    .map(|((x, y), w)| {
                        let (x, y) = lambda_act_exact(params, 1, (x, y), true)?;
                        Ok(((key(&x), key(&y)), w))
                    })
                    .collect();
                moved.map_or(f64::INFINITY, |moved| tv_distance(&weights, &moved))
            }
            InvariantMeasure::Product { x, y, .. } => {
                marginal_defect(x, &params.shift_x(1)) + marginal_defect(y, &params.shift_y(1))
            }
        }
    }

    pub fn check_invariant(&self, params: &Params) -> Result<()> {
        let defect = self.invariance_defect(params);
        if defect > 0.0 {
            return Err(Error::NotInvariant(defect));
        }
        Ok(())
    }

    /// `int f dm` for a function on `T^2` given by its values on `[0,1)^2`.
    pub fn integrate(&self, f: &Expr) -> Complex64 {
        if let Some(c) = f.constant_value() {
            return Complex64::new(c.to_f64(), 0.0);
        }
        match self {
            InvariantMeasure::Haar { n } => {
                let xs = x_nodes(f, *n);
                let ys = y_nodes(*n);
                sum_grid(&xs, &ys, |x, y| f.eval(x, y))
            }
            InvariantMeasure::Atomic { atoms } => atoms
                .iter()
                .map(|((x, y), w)| f.eval_exact_x(x, y.to_f64()) * ratio_to_f64(w))
                .sum(),
            InvariantMeasure::Product { x, y, n } => match (x, y) {
                (Marginal::Haar, Marginal::Haar) => InvariantMeasure::Haar { n: *n }.integrate(f),
                (Marginal::Atoms(xa), Marginal::Haar) => {
                    let ys = y_nodes(*n);
                    xa.iter()
                        .map(|(x, w)| ys.iter().map(|&(y, v)| f.eval_exact_x(x, y) * v).sum::<Complex64>() * ratio_to_f64(w))
                        .sum()
                }
                (Marginal::Haar, Marginal::Atoms(ya)) => {
                    let xs = x_nodes(f, *n);
                    ya.iter()
                        .map(|(y, w)| {
                            let y = y.to_f64();
                            xs.iter().map(|&(x, v)| f.eval(x, y) * v).sum::<Complex64>() * ratio_to_f64(w)
                        })
                        .sum()
                }
                (Marginal::Atoms(xa), Marginal::Atoms(ya)) => xa
                    .iter()
                    .flat_map(|(x, wx)| {
                        ya.iter().map(move |(y, wy)| f.eval_exact_x(x, y.to_f64()) * ratio_to_f64(&(wx * wy)))
                    })
                    .sum(),
            },
        }
    }
}

fn tv_distance(a: &BTreeMap<(Key, Key), &BigRational>, b: &BTreeMap<(Key, Key), &BigRational>) -> f64 {
    let zero = BigRational::zero();
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    let total: BigRational = keys
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(&zero) - b.get(k).copied().unwrap_or(&zero)).abs())
        .sum();
    ratio_to_f64(&total)
}

fn marginal_defect(m: &Marginal, shift: &ExactScalar) -> f64 {
    let Marginal::Atoms(atoms) = m else { return 0.0 };
    let zero = Key(String::new());
    let a: BTreeMap<(Key, Key), &BigRational> = atoms.iter().map(|(p, w)| ((key(p), zero.clone()), w)).collect();
    let b: Result<BTreeMap<(Key, Key), &BigRational>> = atoms
        .iter()
        .map(|(p, w)| Ok(((key(&p.checked_add(shift)?.frac()), zero.clone()), w)))
        .collect();
    b.map_or(f64::INFINITY, |b| tv_distance(&a, &b))
}

/// Uniform atoms on the finite orbit of `start` under `t -> t + shift` mod 1.
fn circle_orbit(start: &ExactScalar, shift: &ExactScalar) -> Result<Vec<(ExactScalar, BigRational)>> {
    if !shift.is_rational() {
        return Err(Error::InvalidInput("orbit of an irrational rotation is infinite".into()));
    }
    let start = start.frac();
    let mut points = vec![start.clone()];
    loop {
        let next = points.last().expect("nonempty").checked_add(shift)?.frac();
        if next == start {
            break;
        }
        if points.len() >= MAX_ORBIT {
            return Err(Error::InvalidInput("orbit too long".into()));
        }
        points.push(next);
    }
    let w = BigRational::new(BigInt::one(), BigInt::from(points.len()));
    Ok(points.into_iter().map(|p| (p, w.clone())).collect())
}

fn y_nodes(n: usize) -> Vec<(f64, f64)> {
    (0..n).map(|j| ((j as f64 + 0.5) / n as f64, 1.0 / n as f64)).collect()
}

/// Composite Gauss-Legendre nodes on `[0,1)` split at the breakpoints of
/// `f`, about `n` nodes in total.
fn x_nodes(f: &Expr, n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(GL_ORDER).expect("nonzero"));
    let pairs = rule.as_node_weight_pairs();
    let mut cuts: Vec<f64> = f.x_breakpoints().iter().map(ExactScalar::to_f64).collect();
    cuts.push(1.0);
    let mut nodes = Vec::with_capacity(n + GL_ORDER * cuts.len());
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let pieces = (((b - a) * n as f64) / GL_ORDER as f64).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        for i in 0..pieces {
            let lo = a + i as f64 * h;
            for &(t, wt) in pairs {
                nodes.push((lo + 0.5 * h * (t + 1.0), 0.5 * h * wt));
            }
        }
    }
    nodes
}

fn sum_grid(xs: &[(f64, f64)], ys: &[(f64, f64)], f: impl Fn(f64, f64) -> Complex64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for &(x, wx) in xs {
        let row: Complex64 = ys.iter().map(|&(y, wy)| f(x, y) * wy).sum();
        total += row * wx;
    }
    total
}

/// `tau(Phi) = int Phi(x, y, 0) dm`.
pub fn trace(phi: &QhmElement, m: &InvariantMeasure) -> Result<Complex64> {
    m.check_invariant(phi.params())?;
    Ok(m.integrate(&cond_expect(phi)))
}

/// `|tau(Phi * Psi) - tau(Psi * Phi)|`.
pub fn trace_is_tracial(phi: &QhmElement, psi: &QhmElement, m: &InvariantMeasure) -> Result<f64> {
    let ab = trace(&phi.multiply(psi)?, m)?;
    let ba = trace(&psi.multiply(phi)?, m)?;
    Ok((ab - ba).norm())
}

#[derive(Clone, Debug, Serialize)]
pub struct StripMass {
    /// Exact mass when the measure allows it.
    pub exact: Option<ExactScalar>,
    pub value: f64,
    pub expected: ExactScalar,
    /// Set when `mu > 1/2`, outside the range where the law is claimed.
    pub hypothesis_violated: bool,
}

/// Mass of `[0, 2 mu) x T`.
pub fn strip_mass(m: &InvariantMeasure, params: &Params) -> Result<StripMass> {
    m.check_invariant(params)?;
    let two_mu = params.shift_x(1);
    let expected = if two_mu.try_cmp(&ExactScalar::one())?.is_ge() { ExactScalar::one() } else { two_mu.clone() };
    let atoms_mass = |xs: &mut dyn Iterator<Item = (&ExactScalar, &BigRational)>| -> Result<ExactScalar> {
        let mut total = BigRational::zero();
        for (x, w) in xs {
            if x.try_cmp(&two_mu)?.is_lt() {
                total += w;
            }
        }
        Ok(ExactScalar::rational(total))
    };
    let exact = match m {
        InvariantMeasure::Haar { .. } | InvariantMeasure::Product { x: Marginal::Haar, .. } => expected.clone(),
        InvariantMeasure::Atomic { atoms } => atoms_mass(&mut atoms.iter().map(|((x, _), w)| (x, w)))?,
        InvariantMeasure::Product { x: Marginal::Atoms(a), .. } => atoms_mass(&mut a.iter().map(|(x, w)| (x, w)))?,
    };
    Ok(StripMass {
        value: exact.to_f64(),
        exact: Some(exact),
        expected,
        hypothesis_violated: params.mu.try_cmp(&ExactScalar::from_ratio(1, 2))?.is_gt(),
    })
}

/// The strip mass computed by integrating `chi[0, 2mu)` with the measure's
/// quadrature.
pub fn strip_mass_quadrature(m: &InvariantMeasure, params: &Params) -> Result<f64> {
    m.check_invariant(params)?;
    Ok(m.integrate(&Expr::chi(ExactScalar::zero(), params.shift_x(1))).re)
}

/// The subgroup `(1/D) * rowspan(H)` of `Q(sqrt d)`, in coordinates `(1, sqrt d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRangeGroup {
    pub d: u64,
    pub denom: BigInt,
    pub h: Vec<Vec<BigInt>>,
}

fn int_ser<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(i) => s.serialize_i64(i),
        None => s.serialize_str(&v.to_string()),
    }
}

impl Serialize for TraceRangeGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        struct Int<'a>(&'a BigInt);
        impl Serialize for Int<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                int_ser(self.0, s)
            }
        }
        let rows: Vec<Vec<Int>> = self.h.iter().map(|r| r.iter().map(Int).collect()).collect();
        let mut st = s.serialize_struct("TraceRangeGroup", 2)?;
        st.serialize_field("D", &Int(&self.denom))?;
        st.serialize_field("H", &rows)?;
        st.end()
    }
}

impl TraceRangeGroup {
    /// Canonical form of the group generated by `gens` inside `Q(sqrt d)`.
    pub fn generated_by(d: u64, gens: &[ExactScalar]) -> Result<Self> {
        for g in gens {
            if g.field() != 0 && g.field() != d {
                return Err(Error::FieldMismatch(d, g.field()));
            }
        }
        let denom = gens.iter().fold(BigInt::one(), |acc, g| {
            acc.lcm(g.rational_part().denom()).lcm(g.surd_part().denom())
        });
        let width = if d == 0 { 1 } else { 2 };
        let rows: Vec<Vec<BigInt>> = gens.iter().map(|g| scaled_coords(g, &denom, width)).collect();
        let h = hnf(&rows);
        let g = h.iter().flatten().fold(denom.clone(), |acc, v| acc.gcd(v));
        let h = h.into_iter().map(|r| r.into_iter().map(|v| v / &g).collect()).collect();
        Ok(TraceRangeGroup { d, denom: denom / g, h })
    }

    pub fn contains(&self, s: &ExactScalar) -> bool {
        if s.field() != 0 && s.field() != self.d {
            return false;
        }
        let width = if self.d == 0 { 1 } else { 2 };
        let scaled = |r: &BigRational| r * BigRational::from_integer(self.denom.clone());
        let a = scaled(s.rational_part());
        let b = scaled(s.surd_part());
        if !a.is_integer() || !b.is_integer() {
            return false;
        }
        let v: Vec<BigInt> = [a.to_integer(), b.to_integer()].into_iter().take(width).collect();
        if width == 1 && !b.is_zero() {
            return false;
        }
        hnf_contains(&self.h, &v)
    }

    /// The same group viewed inside `Q(sqrt d)`; only meaningful for `self.d == 0`.
    pub fn lift(&self, d: u64) -> TraceRangeGroup {
        if self.d != 0 {
            return self.clone();
        }
        let h = self.h.iter().map(|r| vec![r[0].clone(), BigInt::zero()]).collect();
        TraceRangeGroup { d, denom: self.denom.clone(), h }
    }

    pub fn describe(&self) -> String {
        let rows: Vec<String> = self
            .h
            .iter()
            .map(|r| format!("[{}]", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        format!("(1/{})<{}>", self.denom, rows.join(","))
    }
}

fn scaled_coords(g: &ExactScalar, denom: &BigInt, width: usize) -> Vec<BigInt> {
    let f = BigRational::from_integer(denom.clone());
    let a = (g.rational_part() * &f).to_integer();
    let b = (g.surd_part() * &f).to_integer();
    [a, b].into_iter().take(width).collect()
}

/// `Z + 2 mu Z + 2 nu Z` for unreduced `mu`, `nu`.
pub fn trace_range_of(d: u64, mu: &ExactScalar, nu: &ExactScalar) -> Result<TraceRangeGroup> {
    TraceRangeGroup::generated_by(d, &[ExactScalar::one(), mu.scale_int(2), nu.scale_int(2)])
}

pub fn trace_range(params: &Params) -> TraceRangeGroup {
    trace_range_of(params.d, &params.mu, &params.nu).expect("params share one field")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Winding {
    Fixed(ExactScalar),
    NotFixed,
}

/// Value of `Delta^lambda` on the class of a unitary in `A` that winds
/// `windings[i]` times on the `i`-th interval cut out by `breakpoints`.
pub fn delta_lambda_winding(params: &Params, breakpoints: &[ExactScalar], windings: &[i64]) -> Result<Winding> {
    if windings.len() != breakpoints.len() + 1 {
        return Err(Error::InvalidInput(format!(
            "{} breakpoints cut the circle into {} intervals, got {} windings",
            breakpoints.len(),
            breakpoints.len() + 1,
            windings.len()
        )));
    }
    let mut prev = ExactScalar::zero();
    for b in breakpoints {
        if !b.try_cmp(&prev)?.is_gt() || !b.try_cmp(&ExactScalar::one())?.is_lt() {
            return Err(Error::BreakpointDomain(format!("{b} is not increasing inside (0,1)")));
        }
        if !in_strip_lattice(params, b) {
            return Err(Error::BreakpointDomain(format!("{b} is not in 2mu Z + Z")));
        }
        prev = b.clone();
    }
    let n0 = windings[0];
    if windings.iter().all(|&n| n == n0) {
        Ok(Winding::Fixed(params.nu.scale_int(2 * n0)))
    } else {
        Ok(Winding::NotFixed)
    }
}

/// Measure description as found in measure files.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MeasureSpec {
    Haar {
        #[serde(rename = "N", default = "default_grid")]
        n: usize,
    },
    Atomic {
        points: Vec<(ExactScalar, ExactScalar)>,
        weights: Vec<ExactScalar>,
    },
    Product {
        x: MarginalSpec,
        y: MarginalSpec,
        #[serde(rename = "N", default = "default_grid")]
        n: usize,
    },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MarginalSpec {
    Haar,
    Atomic { points: Vec<ExactScalar>, weights: Vec<ExactScalar> },
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

fn rational_weights(ws: &[ExactScalar]) -> Result<Vec<BigRational>> {
    ws.iter()
        .map(|w| {
            if w.is_rational() {
                Ok(w.rational_part().clone())
            } else {
                Err(Error::InvalidInput(format!("weight {w} is not rational")))
            }
        })
        .collect()
}

impl MeasureSpec {
    pub fn build(&self) -> Result<InvariantMeasure> {
        match self {
            MeasureSpec::Haar { n } => Ok(InvariantMeasure::haar(*n)),
            MeasureSpec::Atomic { points, weights } => {
                InvariantMeasure::atomic(points.clone(), rational_weights(weights)?)
            }
            MeasureSpec::Product { x, y, n } => {
                let marg = |m: &MarginalSpec| -> Result<Marginal> {
                    Ok(match m {
                        MarginalSpec::Haar => Marginal::Haar,
                        MarginalSpec::Atomic { points, weights } => {
                            if points.len() != weights.len() {
                                return Err(Error::InvalidInput("need one weight per point".into()));
                            }
                            Marginal::Atoms(points.iter().cloned().zip(rational_weights(weights)?).collect())
                        }
                    })
                };
                InvariantMeasure::product(marg(x)?, marg(y)?, *n)
            }
        }
    }
}

/// Keeps a value in `[0, 1)` for sampling code.
pub fn torus_point(x: f64, y: f64) -> (f64, f64) {
    (frac_f64(x), frac_f64(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Var;

    fn s(t: &str) -> ExactScalar {
        t.parse().unwrap()
    }

    fn params() -> Params {
        Params::rational(1, (1, 4), (1, 6)).unwrap()
    }

    #[test]
    fn cond_expect_examples() {
        let p = params();
        assert_eq!(cond_expect(&QhmElement::unit(p.clone())), Expr::one());
        assert!(cond_expect(&QhmElement::single(p, 2, Expr::wave(1, 0))).is_zero());
    }

    #[test]
    fn unit_trace_is_one_for_every_measure() {
        let p = params();
        for (_, m) in InvariantMeasure::registry(&p, 64) {
            assert_eq!(trace(&QhmElement::unit(p.clone()), &m).unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn haar_kills_oscillation() {
        let p = params();
        let t = trace(&QhmElement::single(p, 0, Expr::wave(1, 0)), &InvariantMeasure::haar(512)).unwrap();
        assert!(t.norm() < 1e-14);
    }

    #[test]
    fn sin_squared_integral() {
        let p = params();
        let f = QhmElement::single(p, 0, Expr::product(vec![Expr::abs(Expr::SinPi(Var::X)), Expr::abs(Expr::SinPi(Var::X))]));
        let t = trace(&f, &InvariantMeasure::haar(512)).unwrap();
        assert!((t.re - 0.5).abs() < 1e-13 && t.im.abs() < 1e-15);
    }

    #[test]
    fn orbit_measure_is_invariant_and_bad_one_is_not() {
        let p = params();
        let m = InvariantMeasure::orbit(&p, (s("0"), s("0"))).unwrap();
        let InvariantMeasure::Atomic { atoms } = &m else { panic!() };
        assert_eq!(atoms.len(), 6);
        assert_eq!(m.invariance_defect(&p), 0.0);
        let bad = InvariantMeasure::atomic(vec![(s("0"), s("0"))], vec![BigRational::one()]).unwrap();
        assert!(matches!(bad.check_invariant(&p), Err(Error::NotInvariant(d)) if d == 2.0));
    }

    #[test]
    fn strip_mass_examples() {
        let p = Params::rational(1, (3, 10), (1, 7)).unwrap();
        let haar = strip_mass(&InvariantMeasure::haar(512), &p).unwrap();
        assert_eq!(haar.exact, Some(s("3/5")));
        let m = InvariantMeasure::orbit_x_haar_y(&p, s("1/11"), 64).unwrap();
        assert_eq!(strip_mass(&m, &p).unwrap().exact, Some(s("3/5")));
        let zero = Params::rational(1, (0, 1), (1, 7)).unwrap();
        assert_eq!(strip_mass(&InvariantMeasure::haar(8), &zero).unwrap().exact, Some(s("0")));
        let q = strip_mass_quadrature(&InvariantMeasure::haar(512), &p).unwrap();
        assert!((q - 0.6).abs() < 1e-12);
        let big = Params::rational(1, (3, 4), (0, 1)).unwrap();
        assert!(strip_mass(&InvariantMeasure::haar(8), &big).unwrap().hypothesis_violated);
    }

    #[test]
    fn trace_range_examples() {
        let g = trace_range(&params());
        assert_eq!((g.denom.clone(), g.h.clone()), (BigInt::from(6), vec![vec![BigInt::from(1)]]));
        let z = trace_range(&Params::rational(1, (0, 1), (0, 1)).unwrap());
        assert_eq!((z.denom.clone(), z.h.clone()), (BigInt::from(1), vec![vec![BigInt::from(1)]]));
        let r = trace_range(&Params::new(1, s("1/2*sqrt(2)"), s("1/3"), 2).unwrap());
        let expect: Vec<Vec<BigInt>> = vec![vec![1.into(), 0.into()], vec![0.into(), 3.into()]];
        assert_eq!((r.denom.clone(), r.h.clone()), (BigInt::from(3), expect));
        assert!(r.contains(&s("1")) && r.contains(&s("1/3 + sqrt(2)")) && !r.contains(&s("1/2")));
    }

    #[test]
    fn winding_examples() {
        let p = params();
        assert_eq!(delta_lambda_winding(&p, &[s("1/2")], &[3, 3]).unwrap(), Winding::Fixed(s("1")));
        assert_eq!(delta_lambda_winding(&p, &[s("1/2")], &[1, 2]).unwrap(), Winding::NotFixed);
        assert_eq!(delta_lambda_winding(&p, &[], &[0]).unwrap(), Winding::Fixed(s("0")));
        assert!(matches!(delta_lambda_winding(&p, &[s("1/3")], &[1, 1]), Err(Error::BreakpointDomain(_))));
    }

    #[test]
    fn measure_spec_parses() {
        let spec = MeasureSpec::Atomic {
            points: vec![(s("0"), s("0")), (s("1/2"), s("1/3"))],
            weights: vec![s("1/2"), s("1/2")],
        };
        let m = spec.build().unwrap();
        let InvariantMeasure::Atomic { atoms } = m else { panic!() };
        assert_eq!(atoms.len(), 2);
    }
}
