//! Finite sections of the regular representations
//! `(Theta_Phi eta)(m, p) = sum_q Phi(lambda_p m, q) eta(m, p - q)`
//! and its crossed-product counterpart, giving lower bounds for the C*-norm.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::cocycle::{lambda_act, CrossedElement, Point};
use crate::element::QhmElement;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationSpec {
    pub grid: Vec<Point>,
    /// Indices `|p| <= cutoff` are kept.
    pub cutoff: usize,
}

impl TruncationSpec {
    pub fn new(grid: Vec<Point>, cutoff: usize) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidInput("empty grid".into()));
        }
        Ok(TruncationSpec { grid, cutoff })
    }

    /// Midpoints of a `k x k` grid on `[0,1)^2`; grids for `k` and `3k` nest.
    pub fn uniform(k: usize, cutoff: usize) -> Self {
        let k = k.max(1);
        let grid = (0..k * k)
            .map(|i| ((2 * (i / k) + 1) as f64 / (2 * k) as f64, (2 * (i % k) + 1) as f64 / (2 * k) as f64))
            .collect();
        TruncationSpec { grid, cutoff }
    }

    /// `self` sits inside `other`: smaller cutoff and a subset of its grid.
    pub fn nested_in(&self, other: &TruncationSpec) -> bool {
        self.cutoff <= other.cutoff && self.grid.iter().all(|m| other.grid.contains(m))
    }
}

/// Direct sum of one `(2P+1) x (2P+1)` block per grid point.
#[derive(Clone, Debug)]
pub struct ThetaMatrix {
    pub blocks: Vec<DMatrix<Complex64>>,
}

impl ThetaMatrix {
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n: usize = self.blocks.iter().map(DMatrix::nrows).sum();
        let mut out = DMatrix::zeros(n, n);
        let mut at = 0;
        for b in &self.blocks {
            out.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
            at += b.nrows();
        }
        out
    }

    /// Largest singular value over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(block_norm).fold(0.0, f64::max)
    }
}

fn block_norm(b: &DMatrix<Complex64>) -> f64 {
    let diagonal = (0..b.nrows()).all(|i| (0..b.ncols()).all(|j| i == j || b[(i, j)] == Complex64::new(0.0, 0.0)));
    if diagonal {
        return (0..b.nrows()).map(|i| b[(i, i)].norm()).fold(0.0, f64::max);
    }
    b.clone().singular_values().max()
}

fn block(cutoff: usize, m: Point, entry: impl Fn(Point, i64) -> Complex64, params: &crate::params::Params) -> DMatrix<Complex64> {
    let n = 2 * cutoff + 1;
    let p_max = cutoff as i64;
    DMatrix::from_fn(n, n, |i, j| {
        let p = i as i64 - p_max;
        let q = p - (j as i64 - p_max);
        entry(lambda_act(params, p, m), q)
    })
}

pub fn theta_block(phi: &QhmElement, m: Point, cutoff: usize) -> DMatrix<Complex64> {
    block(cutoff, m, |pt, q| phi.extend_eval(pt.0, pt.1, q), phi.params())
}

pub fn theta_tilde_block(f: &CrossedElement, m: Point, cutoff: usize) -> DMatrix<Complex64> {
    block(cutoff, m, |pt, q| f.eval(pt.0, pt.1, q), f.params())
}

pub fn theta_matrix(phi: &QhmElement, spec: &TruncationSpec) -> Result<ThetaMatrix> {
    check_cutoff(phi.support_radius(), spec)?;
    Ok(ThetaMatrix { blocks: spec.grid.iter().map(|&m| theta_block(phi, m, spec.cutoff)).collect() })
}

pub fn theta_tilde_matrix(f: &CrossedElement, spec: &TruncationSpec) -> Result<ThetaMatrix> {
    let radius = f.support().iter().map(|p| p.unsigned_abs() as usize).max().unwrap_or(0);
    check_cutoff(radius, spec)?;
    Ok(ThetaMatrix { blocks: spec.grid.iter().map(|&m| theta_tilde_block(f, m, spec.cutoff)).collect() })
}

fn check_cutoff(support: usize, spec: &TruncationSpec) -> Result<()> {
    if spec.grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    if spec.cutoff < support {
        return Err(Error::CutoffTooSmall { cutoff: spec.cutoff, support });
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct NormBound {
    pub grid_size: usize,
    pub cutoff: usize,
    pub bound: f64,
}

/// Lower bounds for `||Phi||` along nested truncations.
///
/// Each block of a smaller truncation is a submatrix of the corresponding
/// block of a larger one, so the bounds cannot decrease; the running maximum
/// absorbs rounding noise in the singular values.
pub fn norm_lower_bound(phi: &QhmElement, specs: &[TruncationSpec]) -> Result<Vec<NormBound>> {
    for (i, w) in specs.windows(2).enumerate() {
        if !w[0].nested_in(&w[1]) {
            return Err(Error::NotNested(i + 1));
        }
    }
    let mut best: f64 = 0.0;
    specs
        .iter()
        .map(|spec| {
            best = best.max(theta_matrix(phi, spec)?.norm());
            Ok(NormBound { grid_size: spec.grid.len(), cutoff: spec.cutoff, bound: best })
        })
        .collect()
}

/// Singular values of each block, sorted descending.
pub fn block_singular_values(t: &ThetaMatrix) -> Vec<Vec<f64>> {
    t.blocks
        .iter()
        .map(|b| {
            let mut s: Vec<f64> = b.clone().singular_values().iter().copied().collect();
            s.sort_by(|a, b| b.total_cmp(a));
            s
        })
        .collect()
}
