use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;

/// Deformation parameters `(c, mu, nu)` of `D^c_{mu nu}`, with `mu` and
/// `nu` reduced into `[0, 1)` and living in the field `Q(sqrt d)`.
#[derive(Clone, Debug, Serialize)]
pub struct Params {
    pub c: u32,
    pub mu: ExactScalar,
    pub nu: ExactScalar,
    pub d: u64,
    #[serde(skip)]
    mu_f: f64,
    #[serde(skip)]
    nu_f: f64,
}

impl PartialEq for Params {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && self.mu == other.mu && self.nu == other.nu && self.d == other.d
    }
}

impl Params {
    pub fn new(c: u32, mu: ExactScalar, nu: ExactScalar, d: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidParams("c must be a positive integer".into()));
        }
        if !crate::scalar::is_squarefree(d) {
            return Err(Error::NotSquarefree(d));
        }
        let d = if d == 1 { 0 } else { d };
        for s in [&mu, &nu] {
            if s.field() != 0 && s.field() != d {
                return Err(Error::FieldMismatch(d, s.field()));
            }
        }
        let mu = mu.frac();
        let nu = nu.frac();
        Ok(Params { c, mu_f: mu.to_f64(), nu_f: nu.to_f64(), mu, nu, d })
    }

    /// Rational parameters, mostly for tests.
    pub fn rational(c: u32, mu: (i64, i64), nu: (i64, i64)) -> Result<Self> {
        Self::new(c, ExactScalar::from_ratio(mu.0, mu.1), ExactScalar::from_ratio(nu.0, nu.1), 0)
    }

    /// Infers the field from the scalars themselves.
    pub fn infer(c: u32, mu: ExactScalar, nu: ExactScalar) -> Result<Self> {
        let d = match (mu.field(), nu.field()) {
            (0, e) | (e, 0) => e,
            (a, b) if a == b => a,
            (a, b) => return Err(Error::FieldMismatch(a, b)),
        };
        Self::new(c, mu, nu, d)
    }

    pub fn mu_f64(&self) -> f64 {
        self.mu_f
    }

    pub fn nu_f64(&self) -> f64 {
        self.nu_f
    }

    /// `2 k mu` exactly.
    pub fn shift_x(&self, k: i64) -> ExactScalar {
        self.mu.scale_int(2 * k)
    }

    /// `2 k nu` exactly.
    pub fn shift_y(&self, k: i64) -> ExactScalar {
        self.nu.scale_int(2 * k)
    }

    pub fn is_rational(&self) -> bool {
        self.mu.is_rational() && self.nu.is_rational()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_mod_one() {
        let p = Params::new(1, "5/4".parse().unwrap(), "-1/6".parse().unwrap(), 0).unwrap();
        assert_eq!(p.mu, ExactScalar::from_ratio(1, 4));
        assert_eq!(p.nu, ExactScalar::from_ratio(5, 6));
        let q = Params::new(1, "sqrt(2)".parse().unwrap(), "0".parse().unwrap(), 2).unwrap();
        assert_eq!(q.mu, "-1 + sqrt(2)".parse().unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Params::rational(0, (1, 4), (1, 6)).is_err());
        assert!(Params::new(1, "sqrt(2)".parse().unwrap(), ExactScalar::zero(), 3).is_err());
        assert!(Params::new(1, ExactScalar::zero(), ExactScalar::zero(), 8).is_err());
        assert!(Params::infer(1, "sqrt(2)".parse().unwrap(), "sqrt(5)".parse().unwrap()).is_err());
    }
}
