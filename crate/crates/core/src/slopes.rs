//! Slopes of codimension-two weighted blow-ups: the sets `P`, `P_n`, the
//! reduction of a slope outside `P_n`, lc-slope detection and positive
//! combinations of slopes.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::{IdealComponent, RIdeal};
use crate::mld::{require_lc, PairSpec};
use crate::rational::Rational;

/// `(w1, w2)` coprime with `1 <= w2 <= w1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SlopePair {
    pub w1: u64,
    pub w2: u64,
}

impl SlopePair {
    pub fn new(w1: u64, w2: u64) -> Result<Self> {
        if w1 == 0 || w2 == 0 {
            return Err(Error::ZeroWeight);
        }
        if w2 > w1 {
            return Err(Error::invalid(format!("({w1},{w2}) has w2 > w1")));
        }
        if w1.gcd(&w2) != 1 {
            return Err(Error::NotPrimitive(format!("({w1},{w2})")));
        }
        Ok(SlopePair { w1, w2 })
    }

    pub fn slope(&self) -> Rational {
        Rational::new(self.w1.into(), self.w2.into())
    }

    /// Weights `(w1, w2, 0)` of the blow-up along `x1 = x2 = 0`.
    pub fn weights(&self) -> Vec<Rational> {
        vec![Rational::from_integer(self.w1.into()), Rational::from_integer(self.w2.into()), Rational::zero()]
    }

    fn cmp_slope(&self, other: &SlopePair) -> Ordering {
        (self.w1 as u128 * other.w2 as u128)
            .cmp(&(other.w1 as u128 * self.w2 as u128))
            .then((self.w1, self.w2).cmp(&(other.w1, other.w2)))
    }
}

impl fmt::Display for SlopePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.w1, self.w2)
    }
}

impl<'de> Deserialize<'de> for SlopePair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (w1, w2) = <(u64, u64)>::deserialize(d)?;
        SlopePair::new(w1, w2).map_err(serde::de::Error::custom)
    }
}

/// `P_n`, ordered by slope.
pub fn enumerate_pn(n: u64) -> Result<Vec<SlopePair>> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let mut out: Vec<SlopePair> = (1..=n)
        .flat_map(|w1| (1..=w1).filter(move |&w2| w1.gcd(&w2) == 1).map(move |w2| SlopePair { w1, w2 }))
        .collect();
    out.sort_by(SlopePair::cmp_slope);
    Ok(out)
}

/// The pair `(v1, v2)` with `w1 v2 - w2 v1 = 1` and `0 <= v1 < w1`, for
/// `p` outside `P_n`.
pub fn reduce_slope(p: SlopePair, n: u64) -> Result<SlopePair> {
    if p.w1 <= n {
        return Err(Error::invalid(format!("{p} already lies in P_{n}")));
    }
    let (w1, w2) = (p.w1 as i128, p.w2 as i128);
    // -w2 v1 ≡ 1 (mod w1)
    let e = w2.extended_gcd(&w1);
    debug_assert_eq!(e.gcd, 1);
    let v1 = (-e.x).mod_floor(&w1);
    let num = 1 + w2 * v1;
    if v1 == 0 || num % w1 != 0 {
        return Err(Error::invariant(format!("no normalized reduction of {p}")));
    }
    let v2 = num / w1;
    let out = SlopePair::new(v1 as u64, v2 as u64)
        .map_err(|e| Error::invariant(format!("reduction of {p} left P: {e}")))?;
    if w1 * v2 - w2 * v1 != 1 {
        return Err(Error::invariant(format!("reduction of {p} fails the determinant identity")));
    }
    Ok(out)
}

fn has_polynomial_components(a: &RIdeal) -> bool {
    a.components().iter().any(|(c, _)| matches!(c, IdealComponent::Polys(_)))
}

/// `ord_F a = w1 + w2` for the blow-up with weights `(w1, w2, 0)`. Monomial
/// pairs are checked to be lc first; an order above `w1 + w2` is itself an
/// lc violation and is reported as such.
pub fn detect_lc_slope(a: &RIdeal, p: SlopePair) -> Result<bool> {
    if a.dim().is_some_and(|d| d != 3) {
        return Err(Error::DimensionMismatch { expected: 3, found: a.dim().unwrap() });
    }
    let w = p.weights();
    let ord = a.weighted_order(&w)?;
    let target = Rational::from_integer((p.w1 + p.w2).into());
    if ord > target {
        return Err(Error::NotLc { direction: w, value: target - ord });
    }
    if !has_polynomial_components(a) {
        require_lc(&PairSpec::smooth(3, a.clone())?)?;
    }
    Ok(ord == target)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Combination {
    pub pair: SlopePair,
    /// Coefficients with `pair = c1 p1 + c2 p2` after removing the content.
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub coefficients: Vec<Rational>,
}

/// `c1 p1 + c2 p2`, divided by its content so that it lies in `P`.
pub fn mediant_combine(p1: SlopePair, p2: SlopePair, c1: &Rational, c2: &Rational) -> Result<Combination> {
    if !c1.is_positive() || !c2.is_positive() {
        return Err(Error::invalid("coefficients must be positive"));
    }
    let a = c1 * Rational::from_integer(p1.w1.into()) + c2 * Rational::from_integer(p2.w1.into());
    let b = c1 * Rational::from_integer(p1.w2.into()) + c2 * Rational::from_integer(p2.w2.into());
    if !a.is_integer() || !b.is_integer() {
        return Err(Error::invalid(format!("{c1}·{p1} + {c2}·{p2} is not integral")));
    }
    let (a, b) = (a.to_integer(), b.to_integer());
    let g = a.gcd(&b);
    let to_u64 = |x: num_bigint::BigInt| u64::try_from(x).map_err(|_| Error::invalid("combination overflows"));
    let pair = SlopePair::new(to_u64(&a / &g)?, to_u64(&b / &g)?)?;
    let g = Rational::from_integer(g);
    Ok(Combination { pair, coefficients: vec![c1 / &g, c2 / &g] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::MonomialIdeal;
    use crate::rational::{frac, int};

    fn sp(a: u64, b: u64) -> SlopePair {
        SlopePair::new(a, b).unwrap()
    }

    fn ideal(gens: &[&[u32]], e: Rational) -> RIdeal {
        RIdeal::monomial(MonomialIdeal::from_exponents(3, gens).unwrap(), e).unwrap()
    }

    #[test]
    fn small_pn() {
        assert_eq!(enumerate_pn(1).unwrap(), vec![sp(1, 1)]);
        let p3 = enumerate_pn(3).unwrap();
        assert_eq!(p3, vec![sp(1, 1), sp(3, 2), sp(2, 1), sp(3, 1)]);
        let q: Vec<Rational> = p3.iter().map(|p| p.slope()).collect();
        assert_eq!(q, vec![int(1), frac(3, 2), int(2), int(3)]);
        assert!(enumerate_pn(0).is_err());
    }

    #[test]
    fn reductions() {
        assert_eq!(reduce_slope(sp(7, 3), 5).unwrap(), sp(2, 1));
        assert_eq!(reduce_slope(sp(5, 2), 4).unwrap(), sp(2, 1));
        assert_eq!(reduce_slope(sp(9, 1), 3).unwrap(), sp(8, 1));
        assert!(reduce_slope(sp(3, 2), 3).is_err());
    }

    #[test]
    fn membership() {
        assert!(SlopePair::new(4, 2).is_err());
        assert!(SlopePair::new(2, 3).is_err());
        assert!(serde_json::from_str::<SlopePair>("[6,4]").is_err());
        assert_eq!(serde_json::from_str::<SlopePair>("[7,3]").unwrap(), sp(7, 3));
    }

    #[test]
    fn detection() {
        assert!(detect_lc_slope(&ideal(&[&[1, 1, 0]], int(1)), sp(1, 1)).unwrap());
        assert!(detect_lc_slope(&ideal(&[&[2, 0, 0], &[0, 3, 0]], frac(5, 6)), sp(3, 2)).unwrap());
        assert!(!detect_lc_slope(&ideal(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], int(1)), sp(2, 1)).unwrap());
        let too_big = ideal(&[&[2, 0, 0], &[0, 3, 0]], int(1));
        assert!(matches!(detect_lc_slope(&too_big, sp(3, 2)), Err(Error::NotLc { .. })));
        // lc along (3,2,0) but not lc at the origin
        let not_lc = ideal(&[&[1, 1, 0], &[0, 0, 5]], int(1)).product(&ideal(&[&[0, 0, 1]], int(2))).unwrap();
        assert!(matches!(detect_lc_slope(&not_lc, sp(3, 2)), Err(Error::NotLc { .. })));
    }

    #[test]
    fn mediants() {
        assert_eq!(mediant_combine(sp(2, 1), sp(3, 1), &int(1), &int(1)).unwrap().pair, sp(5, 2));
        assert_eq!(mediant_combine(sp(1, 1), sp(3, 2), &int(1), &int(1)).unwrap().pair, sp(4, 3));
        let c = mediant_combine(sp(1, 1), sp(3, 1), &int(1), &int(1)).unwrap();
        assert_eq!(c.pair, sp(2, 1));
        assert_eq!(c.coefficients, vec![frac(1, 2), frac(1, 2)]);
        assert!(mediant_combine(sp(2, 1), sp(3, 1), &frac(1, 2), &int(1)).is_err());
        assert!(mediant_combine(sp(2, 1), sp(3, 1), &int(0), &int(1)).is_err());
    }
}
