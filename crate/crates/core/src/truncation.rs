//! Truncation ideals `{x^s : w1 s1 + w2 s2 + s3 >= (w1 + w2) n}` on `A^3`,
//! the index sets `S`, `S^-`, `S^+` and weighted leading parts.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideal::MonomialIdeal;
use crate::poly::{ExponentVector, Polynomial};
use crate::rational::Rational;

/// An element of `S^-` with its complementary `x3` exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MinusPoint {
    pub s1: u32,
    pub s2: u32,
    pub s3: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SDecomposition {
    #[serde(with = "crate::rational::serde_rational")]
    pub mu: Rational,
    /// All of `S = {s1 + s2 < (mu + 1) n + mu}`, sorted.
    pub s: Vec<(u32, u32)>,
    /// `mu s1 + s2 <= (mu + 1) n`, with `s3 = (w1 + w2) n - (w1 s1 + w2 s2)`.
    pub minus: Vec<MinusPoint>,
    pub plus: Vec<(u32, u32)>,
}

impl SDecomposition {
    /// The part of `S^-` lying on the line `s3 = 0`.
    pub fn minus_zero(&self) -> impl Iterator<Item = &MinusPoint> {
        self.minus.iter().filter(|p| p.s3 == 0)
    }
}

fn check_weights(w1: u64, w2: u64, n: u64) -> Result<()> {
    if w1 == 0 || w2 == 0 || n == 0 {
        return Err(Error::invalid("weights and n must be positive"));
    }
    if w2 > w1 {
        return Err(Error::invalid(format!("expected w2 <= w1, got ({w1},{w2})")));
    }
    Ok(())
}

pub fn s_decomposition(w1: u64, w2: u64, n: u64) -> Result<SDecomposition> {
    check_weights(w1, w2, n)?;
    let mu = Rational::new(BigInt::from(w1), BigInt::from(w2));
    let t = (w1 + w2) * n;
    // s1 + s2 < (mu + 1) n + mu  <=>  w2 (s1 + s2) < (w1 + w2) n + w1
    let limit = t + w1;
    let mut s = Vec::new();
    let mut minus = Vec::new();
    let mut plus = Vec::new();
    let mut total = 0u64;
    while w2 * total < limit {
        for s1 in 0..=total {
            let s2 = total - s1;
            s.push((s1 as u32, s2 as u32));
        }
        total += 1;
    }
    s.sort();
    for &(s1, s2) in &s {
        let lhs = w1 * s1 as u64 + w2 * s2 as u64;
        if lhs <= t {
            minus.push(MinusPoint { s1, s2, s3: (t - lhs) as u32 });
        } else {
            plus.push((s1, s2));
        }
    }
    Ok(SDecomposition { mu, s, minus, plus })
}

/// The monomial ideal of exponents with `w1 s1 + w2 s2 + s3 >= (w1 + w2) n`,
/// generated by `x1^s1 x2^s2 x3^s3` over `S^-` and `x1^s1 x2^s2` over `S^+`.
pub fn truncation_ideal(w1: u64, w2: u64, n: u64) -> Result<MonomialIdeal> {
    let dec = s_decomposition(w1, w2, n)?;
    let gens = dec
        .minus
        .iter()
        .map(|p| ExponentVector(vec![p.s1, p.s2, p.s3]))
        .chain(dec.plus.iter().map(|&(a, b)| ExponentVector(vec![a, b, 0])))
        .collect();
    MonomialIdeal::new(3, gens)
}

pub fn truncation_contains(w1: u64, w2: u64, n: u64, s: &[u32]) -> bool {
    w1 * s[0] as u64 + w2 * s[1] as u64 + s[2] as u64 >= (w1 + w2) * n
}

/// Terms of `f` whose `(w1, w2, 0)`-weighted degree equals `degree`.
pub fn weighted_leading_part(f: &Polynomial, w1: u64, w2: u64, degree: u64) -> Result<Polynomial> {
    if f.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: f.dim() });
    }
    Ok(f.homogeneous_part(&[w1, w2, 0], degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::minimalize;
    use crate::rational::{frac, int};

    fn brute(w1: u64, w2: u64, n: u64) -> Vec<ExponentVector> {
        let t = (w1 + w2) * n;
        let top = t as u32 + 1;
        let mut gens = Vec::new();
        for a in 0..=top {
            for b in 0..=top {
                for c in 0..=top {
                    if truncation_contains(w1, w2, n, &[a, b, c]) {
                        gens.push(ExponentVector(vec![a, b, c]));
                    }
                }
            }
        }
        minimalize(gens)
    }

    #[test]
    fn small_truncation_ideals() {
        let i = truncation_ideal(2, 1, 1).unwrap();
        let listed: Vec<Vec<u32>> = vec![
            vec![0, 0, 3],
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![0, 3, 0],
            vec![1, 0, 1],
            vec![1, 1, 0],
            vec![2, 0, 0],
        ];
        assert_eq!(i.gens().iter().map(|e| e.0.clone()).collect::<Vec<_>>(), listed);
        assert_eq!(i.gens(), brute(2, 1, 1).as_slice());
        assert_eq!(truncation_ideal(1, 1, 1).unwrap(), MonomialIdeal::maximal_power(3, 2));
        assert!(truncation_ideal(1, 2, 1).is_err());
    }

    #[test]
    fn generator_degrees_lie_in_the_window() {
        for (w1, w2, n) in [(2, 1, 1), (3, 2, 1), (5, 3, 2), (7, 2, 3), (4, 1, 2)] {
            let t = (w1 + w2) * n;
            for g in truncation_ideal(w1, w2, n).unwrap().gens() {
                let v = w1 * g.0[0] as u64 + w2 * g.0[1] as u64 + g.0[2] as u64;
                assert!(v >= t && v < t + w1, "{g} for {:?}", (w1, w2, n));
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let d = s_decomposition(2, 1, 1).unwrap();
        assert_eq!(d.mu, int(2));
        assert!(d.s.iter().all(|&(a, b)| a + b < 5));
        assert_eq!(d.s.len(), 15);
        assert!(d.minus.contains(&MinusPoint { s1: 1, s2: 1, s3: 0 }));
        for (w1, w2, n) in [(2, 1, 1), (3, 2, 4), (9, 4, 2)] {
            let d = s_decomposition(w1, w2, n).unwrap();
            assert!(d.minus_zero().any(|p| p.s1 as u64 == n && p.s2 as u64 == n));
        }
        let d = s_decomposition(3, 2, 1).unwrap();
        assert_eq!(d.mu, frac(3, 2));
        assert!(d.plus.contains(&(0, 3)));
    }

    #[test]
    fn leading_part_examples() {
        let f: Polynomial = serde_json::from_str(
            r#"{"dim":3,"terms":[{"c":"1","e":[2,0,0]},{"c":"1","e":[0,3,0]},{"c":"1","e":[1,1,5]}]}"#,
        )
        .unwrap();
        let expected: Polynomial =
            serde_json::from_str(r#"{"dim":3,"terms":[{"c":"1","e":[2,0,0]},{"c":"1","e":[0,3,0]}]}"#).unwrap();
        assert_eq!(weighted_leading_part(&f, 3, 2, 6).unwrap(), expected);
        assert_eq!(weighted_leading_part(&expected, 3, 2, 6).unwrap(), expected);

        let g: Polynomial = serde_json::from_str(
            r#"{"dim":3,"terms":[{"c":"1","e":[2,0,0]},{"c":"1","e":[0,3,0]},{"c":"1","e":[0,2,2]}]}"#,
        )
        .unwrap();
        assert_eq!(weighted_leading_part(&g, 3, 2, 6).unwrap(), expected);
        let tail: Polynomial = serde_json::from_str(r#"{"dim":3,"terms":[{"c":"1","e":[0,2,2]}]}"#).unwrap();
        assert_eq!(weighted_leading_part(&g, 3, 2, 4).unwrap(), tail);
    }
}
