use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// A Lebesgue exponent in `[1, inf]`, stored exactly as its reciprocal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Exponent {
    reciprocal: Rational,
}

impl Exponent {
    pub const INFINITY: Exponent = Exponent {
        reciprocal: Ratio::new_raw(0, 1),
    };

    pub fn from_reciprocal(reciprocal: Rational) -> Self {
        Self { reciprocal }
    }

    pub fn integer(p: i64) -> Self {
        Self::from_reciprocal(Ratio::new(1, p))
    }

    /// Nearest exact exponent to a float; `inf` is accepted.
    pub fn from_f64(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(Self::INFINITY);
        }
        let inv = rational_from_f64(1.0 / p).ok_or_else(|| Error::param("exponent", format!("{p} is not representable")))?;
        Ok(Self::from_reciprocal(inv))
    }

    pub fn reciprocal(&self) -> Rational {
        self.reciprocal
    }

    pub fn is_infinite(&self) -> bool {
        self.reciprocal.is_zero()
    }

    pub fn value(&self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            1.0 / self.reciprocal.to_f64().unwrap()
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            let p = self.reciprocal.recip();
            if p.is_integer() {
                write!(f, "{}", p.numer())
            } else {
                write!(f, "{}/{}", p.numer(), p.denom())
            }
        }
    }
}

pub(crate) fn rational_from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    Ratio::<i64>::approximate_float(x)
}

/// Which dispersion relation the pair is admissible for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    /// `2/q + d/r = d/2`, excluding `(2, inf, 2)`.
    Schrodinger,
    /// `4/q + d/r = d/2`, excluding `(2, inf, 4)`.
    Biharmonic,
}

/// Exact admissibility check for `q, r` in `[2, inf]`.
pub fn is_admissible(q: Exponent, r: Exponent, dim: usize, kind: PairKind) -> bool {
    let half = Ratio::new(1, 2);
    let in_range = |e: Exponent| e.reciprocal() >= Rational::zero() && e.reciprocal() <= half;
    if !in_range(q) || !in_range(r) {
        return false;
    }
    let d = Rational::from_integer(dim as i64);
    let (time, excluded_dim) = match kind {
        PairKind::Schrodinger => (Rational::from_integer(2), 2),
        PairKind::Biharmonic => (Rational::from_integer(4), 4),
    };
    if q.reciprocal() == half && r.is_infinite() && dim == excluded_dim {
        return false;
    }
    time * q.reciprocal() + d * r.reciprocal() == d * half
}

/// A validated admissible pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub q: Exponent,
    pub r: Exponent,
    pub kind: PairKind,
    pub dim: usize,
}

impl AdmissiblePair {
    pub fn new(q: Exponent, r: Exponent, dim: usize, kind: PairKind) -> Result<Self> {
        if !is_admissible(q, r, dim, kind) {
            return Err(Error::NotAdmissible(format!(
                "(q, r) = ({q}, {r}) is not {kind:?}-admissible in d = {dim}"
            )));
        }
        Ok(Self { q, r, kind, dim })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let e = Exponent::integer;
        assert!(is_admissible(e(2), e(6), 3, PairKind::Schrodinger));
        assert!(!is_admissible(e(2), Exponent::INFINITY, 2, PairKind::Schrodinger));
        for d in 1..=4 {
            assert!(is_admissible(Exponent::INFINITY, e(2), d, PairKind::Biharmonic));
        }
    }

    #[test]
    fn biharmonic_endpoint_excluded_in_four_dimensions() {
        assert!(!is_admissible(Exponent::integer(2), Exponent::INFINITY, 4, PairKind::Biharmonic));
        assert!(!is_admissible(Exponent::integer(2), Exponent::integer(6), 4, PairKind::Biharmonic));
        // 4/4 + 3/6 = 3/2
        assert!(is_admissible(Exponent::integer(4), Exponent::integer(6), 3, PairKind::Biharmonic));
        // 4/4 + 3/3 = 2, not 3/2
        assert!(!is_admissible(Exponent::integer(4), Exponent::integer(3), 3, PairKind::Biharmonic));
        assert!(is_admissible(Exponent::integer(4), Exponent::integer(3), 3, PairKind::Schrodinger));
    }

    #[test]
    fn float_round_trip() {
        let p = Exponent::from_f64(100.0).unwrap();
        assert_eq!(p.reciprocal(), Ratio::new(1, 100));
        assert_eq!(p.to_string(), "100");
        assert_eq!(Exponent::from_f64(f64::INFINITY).unwrap(), Exponent::INFINITY);
        assert_eq!(Exponent::from_reciprocal(Ratio::new(2, 5)).to_string(), "5/2");
    }
}
