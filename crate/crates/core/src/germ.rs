//! Cyclic quotient germs `A^d / Z_r(a_1, ..., a_d)` and their weight lattice
//! `N = Z^d + Z (1/r)(a_1, ..., a_d)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "GermJson", into = "GermJson")]
pub struct CyclicQuotientGerm {
    r: u64,
    a: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct GermJson {
    r: u64,
    a: Vec<i64>,
}

impl TryFrom<GermJson> for CyclicQuotientGerm {
    type Error = Error;
    fn try_from(g: GermJson) -> Result<Self> {
        CyclicQuotientGerm::new(g.r, &g.a)
    }
}

impl From<CyclicQuotientGerm> for GermJson {
    fn from(g: CyclicQuotientGerm) -> Self {
        GermJson { r: g.r, a: g.a.iter().map(|&v| v as i64).collect() }
    }
}

impl fmt::Display for CyclicQuotientGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_smooth() {
            return write!(f, "A^{}", self.dim());
        }
        write!(f, "1/{}(", self.r)?;
        for (i, v) in self.a.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl CyclicQuotientGerm {
    /// Entries of `a` are reduced into `[0, r)`.
    pub fn new(r: u64, a: &[i64]) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("quotient order r must be positive"));
        }
        if a.len() < 2 {
            return Err(Error::invalid("germ dimension must be at least 2"));
        }
        let a = a.iter().map(|&v| v.rem_euclid(r as i64) as u64).collect();
        Ok(CyclicQuotientGerm { r, a })
    }

    pub fn smooth(dim: usize) -> Self {
        CyclicQuotientGerm { r: 1, a: vec![0; dim] }
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn is_smooth(&self) -> bool {
        self.r == 1
    }

    /// `x^s` is invariant under the group action.
    pub fn is_invariant(&self, s: &[u32]) -> bool {
        let total: u128 = self.a.iter().zip(s).map(|(&a, &e)| a as u128 * e as u128).sum();
        total.is_multiple_of(self.r as u128)
    }

    /// No nontrivial element fixes a coordinate hyperplane, so the quotient
    /// map is étale in codimension one and `a_E = sum of weights`.
    pub fn is_well_formed(&self) -> bool {
        (0..self.dim()).all(|i| {
            let g = self
                .a
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(self.r, |g, (_, &v)| g.gcd(&v));
            g == 1
        })
    }

    /// Equal up to multiplying the weight tuple by a unit mod `r`.
    pub fn equivalent(&self, other: &CyclicQuotientGerm) -> bool {
        if self.r != other.r || self.dim() != other.dim() {
            return false;
        }
        let r = self.r;
        (1..=r.max(1)).filter(|u| u.gcd(&r) == 1).any(|u| {
            self.a.iter().zip(&other.a).all(|(&x, &y)| (x as u128 * u as u128 % r as u128) as u64 == y)
        })
    }

    /// Membership of `W/r` in `N`, for an integer vector `W`.
    pub fn contains_scaled(&self, w: &[i64]) -> bool {
        let r = self.r as i64;
        if r == 1 {
            return true;
        }
        (0..r).any(|k| {
            w.iter()
                .zip(&self.a)
                .all(|(&x, &a)| (x - k * a as i64).rem_euclid(r) == 0)
        })
    }

    /// `r·w` as integers, if every entry of `w` lies in `(1/r)Z`.
    pub fn scale(&self, w: &[Rational]) -> Option<Vec<i64>> {
        let r = BigInt::from(self.r);
        w.iter()
            .map(|q| {
                let v = q * Rational::from_integer(r.clone());
                if v.denom().is_one() {
                    v.numer().to_i64()
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn unscale(&self, w: &[i64]) -> Vec<Rational> {
        w.iter()
            .map(|&x| Rational::new(BigInt::from(x), BigInt::from(self.r)))
            .collect()
    }

    pub fn in_lattice(&self, w: &[Rational]) -> bool {
        w.len() == self.dim() && self.scale(w).is_some_and(|s| self.contains_scaled(&s))
    }

    /// Scaled primitivity: no `m >= 2` with `W/m` again a scaled lattice point.
    pub fn is_primitive_scaled(&self, w: &[i64]) -> bool {
        let g = w.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g <= 1 {
            return g == 1;
        }
        !divisors_above_one(g).any(|m| {
            let v: Vec<i64> = w.iter().map(|x| x / m).collect();
            self.contains_scaled(&v)
        })
    }

    pub fn is_primitive(&self, w: &[Rational]) -> bool {
        match self.scale(w) {
            Some(s) => self.contains_scaled(&s) && self.is_primitive_scaled(&s),
            None => false,
        }
    }

    /// The primitive lattice vector on the ray through `w`.
    pub fn primitive_of(&self, w: &[Rational]) -> Result<Vec<Rational>> {
        if w.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: w.len() });
        }
        if w.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroWeight);
        }
        if w.iter().any(|x| x.is_negative()) {
            return Err(Error::invalid("weights must be nonnegative"));
        }
        let den = w.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let ints: Vec<BigInt> = w.iter().map(|q| (q * Rational::from_integer(den.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let base: Vec<i64> = ints
            .iter()
            .map(|x| (x / &g).to_i64().ok_or_else(|| Error::invalid("weight too large")))
            .collect::<Result<_>>()?;
        // base is primitive in Z^d; the ray meets N in multiples of base/m for
        // the largest m with base/m in N, and m divides r
        let r = self.r as i64;
        let best = (1..=r)
            .rev()
            .find(|m| r % m == 0 && {
                let scaled: Vec<i64> = base.iter().map(|x| x * (r / m)).collect();
                self.contains_scaled(&scaled)
            })
            .unwrap_or(1);
        Ok(base.iter().map(|&x| Rational::new(BigInt::from(x), BigInt::from(best))).collect())
    }
}

fn divisors_above_one(g: i64) -> impl Iterator<Item = i64> {
    (2..=g).filter(move |m| g % m == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn lattice_membership() {
        let g = CyclicQuotientGerm::new(2, &[1, 1, 1]).unwrap();
        assert!(g.in_lattice(&[frac(1, 2), frac(1, 2), frac(1, 2)]));
        assert!(!g.in_lattice(&[frac(1, 2), int(0), int(0)]));
        assert!(g.is_primitive(&[frac(1, 2), frac(1, 2), frac(1, 2)]));
        assert!(!g.is_primitive(&[int(1), int(1), int(1)]));
        assert!(g.is_primitive(&[int(1), int(0), int(0)]));
        assert_eq!(g.primitive_of(&[int(3), int(3), int(3)]).unwrap(), vec![frac(1, 2); 3]);
        assert!(g.is_well_formed());
    }

    #[test]
    fn smooth_primitivity_is_gcd_one() {
        let g = CyclicQuotientGerm::smooth(3);
        assert!(g.is_primitive(&[int(3), int(2), int(1)]));
        assert!(!g.is_primitive(&[int(4), int(2), int(0)]));
        assert!(!g.is_primitive(&[int(0), int(0), int(0)]));
        assert_eq!(g.primitive_of(&[int(4), int(2), int(0)]).unwrap(), vec![int(2), int(1), int(0)]);
    }

    #[test]
    fn unit_equivalence() {
        let a = CyclicQuotientGerm::new(5, &[2, -2, 1]).unwrap();
        let b = CyclicQuotientGerm::new(5, &[2, 3, 1]).unwrap();
        let c = CyclicQuotientGerm::new(5, &[4, 1, 2]).unwrap();
        assert!(a.equivalent(&b));
        assert!(a.equivalent(&c));
        assert!(!a.equivalent(&CyclicQuotientGerm::new(5, &[1, 1, 1]).unwrap()));
        assert_eq!(b.to_string(), "1/5(2,3,1)");
    }
}
