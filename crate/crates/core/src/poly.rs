//! Exponent vectors and sparse multivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rational::{serde_rational, Rational};

/// Exponent of a monomial `x^s`; ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn zero(dim: usize) -> Self {
        ExponentVector(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        ExponentVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Componentwise `self <= other`, i.e. `x^self` divides `x^other`.
    pub fn divides(&self, other: &ExponentVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Weighted degree with integer weights.
    pub fn weighted_degree(&self, weights: &[u64]) -> u64 {
        self.0.iter().zip(weights).map(|(&e, &w)| e as u64 * w).sum()
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// The pairing `<w, s>` of a weight vector with an exponent.
pub fn dot(w: &[Rational], s: &ExponentVector) -> Result<Rational> {
    check_dim(w.len(), s.dim())?;
    Ok(w.iter()
        .zip(&s.0)
        .filter(|(_, &e)| e != 0)
        .fold(Rational::zero(), |acc, (wi, &e)| acc + wi * Rational::from_integer(e.into())))
}

/// Sparse polynomial in `dim` variables. Coefficients are nonzero, exponents
/// are distinct and kept in lexicographic order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(c, ExponentVector::zero(dim))
    }

    /// The coordinate function `x_i` (zero based).
    pub fn var(dim: usize, i: usize) -> Self {
        Self::monomial(Rational::one(), ExponentVector::unit(dim, i))
    }

    pub fn monomial(c: Rational, e: ExponentVector) -> Self {
        let dim = e.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Polynomial { dim, terms }
    }

    /// Builds a polynomial from possibly repeated or zero terms.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Rational, ExponentVector)>) -> Result<Self> {
        let mut p = Polynomial::zero(dim);
        for (c, e) in terms {
            check_dim(dim, e.dim())?;
            p.add_term(c, e);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &ExponentVector) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&ExponentVector::zero(self.dim))
    }

    pub(crate) fn add_term(&mut self, c: Rational, e: ExponentVector) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(c.clone(), e.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    /// Multiplies every term by the monomial `x^e`.
    pub fn shift(&self, e: &ExponentVector) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(s, a)| (s.add(e), a.clone())).collect(),
        }
    }

    pub fn multiply(&self, other: &Polynomial) -> Result<Polynomial> {
        check_dim(self.dim, other.dim)?;
        Ok(self.mul_filtered(other, |_| true))
    }

    /// Product keeping only exponents accepted by `keep`.
    pub(crate) fn mul_filtered(&self, other: &Polynomial, keep: impl Fn(&ExponentVector) -> bool) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.add(eb);
                if keep(&e) {
                    out.add_term(ca * cb, e);
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.dim);
        for _ in 0..n {
            acc = acc.mul_filtered(self, |_| true);
        }
        acc
    }

    /// Exact composite `f(images)`. The images share a dimension which
    /// becomes the dimension of the result.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        check_dim(self.dim, images.len())?;
        let target = match images.first() {
            Some(p) => p.dim,
            None => return Err(Error::invalid("substitution needs at least one image")),
        };
        for img in images {
            check_dim(target, img.dim)?;
        }
        let mut powers: Vec<Vec<Polynomial>> = images.iter().map(|p| vec![Polynomial::one(p.dim), p.clone()]).collect();
        let mut out = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= k as usize {
                    let next = cache.last().unwrap().mul_filtered(&images[i], |_| true);
                    cache.push(next);
                }
                term = term.mul_filtered(&cache[k as usize], |_| true);
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Minimum of `<w, s>` over the exponents of the terms.
    pub fn min_pairing(&self, w: &[Rational]) -> Result<Option<Rational>> {
        let mut best: Option<Rational> = None;
        for e in self.terms.keys() {
            let v = dot(w, e)?;
            if best.as_ref().is_none_or(|b| &v < b) {
                best = Some(v);
            }
        }
        Ok(best)
    }

    /// Terms whose weighted degree (integer weights) equals `degree`.
    pub fn homogeneous_part(&self, weights: &[u64], degree: u64) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.weighted_degree(weights) == degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops terms of weighted degree above `bound`.
    pub fn truncate(&self, weights: &[u64], bound: u64) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.weighted_degree(weights) <= bound)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Smallest weighted degree among the terms, `None` for zero.
    pub fn weighted_order(&self, weights: &[u64]) -> Option<u64> {
        self.terms.keys().map(|e| e.weighted_degree(weights)).min()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (i, &p) in e.0.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, p)?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    #[serde(with = "serde_rational")]
    c: Rational,
    e: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    dim: usize,
    terms: Vec<TermJson>,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialJson {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson { c: c.clone(), e: e.0.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolynomialJson::deserialize(d)?;
        Polynomial::from_terms(raw.dim, raw.terms.into_iter().map(|t| (t.c, ExponentVector(t.e))))
            .map_err(serde::de::Error::custom)
    }
}
