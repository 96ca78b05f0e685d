//! Toric divisorial valuations and two-stage composed valuations.
//!
//! A composed valuation comes from the weighted blow-up of `A^3` with
//! weights `(w1, w2, 1)`, followed on the `x3`-chart, with coordinates
//! `z1 = x1 x3^{-w1}`, `z2 = x2 x3^{-w2}`, by the weighted blow-up with
//! weights `(v1, v2, 1)` in a regular system `(y1, y2, x3)`. Orders are
//! computed by inverting `z = phi(y, x3)` in a truncated power series ring.

use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::germ::CyclicQuotientGerm;
use crate::ideal::{IdealComponent, RIdeal};
use crate::poly::{ExponentVector, Polynomial};
use crate::rational::Rational;

pub const DEFAULT_ORDER_CAP: u64 = 1 << 16;

/// The toric divisor of a primitive lattice weight on a germ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricDivisor {
    germ: CyclicQuotientGerm,
    weight: Vec<Rational>,
}

impl ToricDivisor {
    pub fn new(germ: CyclicQuotientGerm, weight: Vec<Rational>) -> Result<Self> {
        check_dim(germ.dim(), weight.len())?;
        if weight.iter().all(|w| w.is_zero()) {
            return Err(Error::ZeroWeight);
        }
        if weight.iter().any(|w| w < &Rational::zero()) {
            return Err(Error::invalid("weights must be nonnegative"));
        }
        let shown = fmt_weights(&weight);
        if !germ.in_lattice(&weight) {
            return Err(Error::NotInLattice(shown));
        }
        if !germ.is_primitive(&weight) {
            return Err(Error::NotPrimitive(shown));
        }
        Ok(ToricDivisor { germ, weight })
    }

    pub fn smooth(weight: &[u64]) -> Result<Self> {
        Self::new(
            CyclicQuotientGerm::smooth(weight.len()),
            weight.iter().map(|&w| Rational::from_integer(w.into())).collect(),
        )
    }

    pub fn germ(&self) -> &CyclicQuotientGerm {
        &self.germ
    }

    pub fn weight(&self) -> &[Rational] {
        &self.weight
    }

    /// Indices of the coordinates vanishing on the centre.
    pub fn centre_support(&self) -> Vec<usize> {
        (0..self.weight.len()).filter(|&i| !self.weight[i].is_zero()).collect()
    }

    /// `a_E(X)`, the sum of the weights.
    pub fn discrepancy_base(&self) -> Rational {
        self.weight.iter().fold(Rational::zero(), |a, b| a + b)
    }
}

pub fn fmt_weights(w: &[Rational]) -> String {
    let parts: Vec<String> = w.iter().map(|q| q.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn toric_ord(e: &ToricDivisor, a: &RIdeal) -> Result<Rational> {
    a.check_germ(&e.germ)?;
    if a.is_trivial() {
        return Ok(Rational::zero());
    }
    a.weighted_order(&e.weight)
}

/// `a_E(X, a) = sum of weights - ord_E a`.
pub fn log_discrepancy(e: &ToricDivisor, a: &RIdeal) -> Result<Rational> {
    Ok(e.discrepancy_base() - toric_ord(e, a)?)
}

fn wdeg(e: &ExponentVector, weights: &[u64; 3]) -> u64 {
    e.weighted_degree(weights)
}

fn mul_trunc(a: &Polynomial, b: &Polynomial, weights: &[u64; 3], bound: u64) -> Polynomial {
    a.mul_filtered(b, |e| wdeg(e, weights) <= bound)
}

/// `f(images)` with every intermediate product truncated above `bound` in
/// the weighted degree `weights` of the target ring.
pub fn substitute_truncated(f: &Polynomial, images: &[Polynomial], weights: &[u64; 3], bound: u64) -> Result<Polynomial> {
    check_dim(f.dim(), images.len())?;
    let mut powers: Vec<Vec<Polynomial>> = images.iter().map(|p| vec![Polynomial::one(3), p.truncate(weights, bound)]).collect();
    let mut out = Polynomial::zero(3);
    for (e, c) in f.terms() {
        let mut term = Polynomial::constant(3, c.clone());
        for (i, &k) in e.0.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let cache = &mut powers[i];
            while cache.len() <= k as usize {
                let next = mul_trunc(cache.last().unwrap(), &cache[1], weights, bound);
                cache.push(next);
            }
            term = mul_trunc(&term, &cache[k as usize], weights, bound);
            if term.is_zero() {
                break;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

fn jacobian(y1: &Polynomial, y2: &Polynomial) -> [[Rational; 2]; 2] {
    let e = |i| ExponentVector::unit(3, i);
    [[y1.coefficient(&e(0)), y1.coefficient(&e(1))], [y2.coefficient(&e(0)), y2.coefficient(&e(1))]]
}

fn check_regular(y1: &Polynomial, y2: &Polynomial) -> Result<[[Rational; 2]; 2]> {
    check_dim(3, y1.dim())?;
    check_dim(3, y2.dim())?;
    if !y1.constant_term().is_zero() || !y2.constant_term().is_zero() {
        return Err(Error::invalid("second regular system must vanish at the origin"));
    }
    let j = jacobian(y1, y2);
    let det = &j[0][0] * &j[1][1] - &j[0][1] * &j[1][0];
    if det.is_zero() {
        return Err(Error::SingularJacobian);
    }
    Ok([[&j[1][1] / &det, -&j[0][1] / &det], [-&j[1][0] / &det, &j[0][0] / &det]])
}

/// Solves `y_i = y_i(z1, z2, x3)` for `z1, z2` as polynomials in
/// `(y1, y2, x3)`, exact modulo terms of `(v1, v2, 1)`-weighted degree above
/// `order_bound`. Uses the fixed point `z = J^{-1}(y - N(z, x3))`, each
/// round of which gains at least one in weighted order.
pub fn invert_regular_system(y1: &Polynomial, y2: &Polynomial, v: (u64, u64), order_bound: u64) -> Result<(Polynomial, Polynomial)> {
    if order_bound == 0 {
        return Err(Error::invalid("order bound must be at least 1"));
    }
    if v.0 == 0 || v.1 == 0 {
        return Err(Error::ZeroWeight);
    }
    let jinv = check_regular(y1, y2)?;
    let weights = [v.0, v.1, 1];
    let j = jacobian(y1, y2);
    let lin = |i: usize| {
        Polynomial::var(3, 0)
            .scale(&j[i][0])
            .add(&Polynomial::var(3, 1).scale(&j[i][1]))
            .expect("same dimension")
    };
    let n1 = y1.sub(&lin(0))?;
    let n2 = y2.sub(&lin(1))?;
    let target = [Polynomial::var(3, 0), Polynomial::var(3, 1)];
    let mut z = [Polynomial::zero(3), Polynomial::zero(3)];
    for _ in 0..=order_bound + 1 {
        let images = [z[0].clone(), z[1].clone(), Polynomial::var(3, 2)];
        let r1 = target[0].sub(&substitute_truncated(&n1, &images, &weights, order_bound)?)?;
        let r2 = target[1].sub(&substitute_truncated(&n2, &images, &weights, order_bound)?)?;
        let next = [
            r1.scale(&jinv[0][0]).add(&r2.scale(&jinv[0][1]))?,
            r1.scale(&jinv[1][0]).add(&r2.scale(&jinv[1][1]))?,
        ];
        if next == z {
            return Ok((z[0].clone(), z[1].clone()));
        }
        z = next;
    }
    Err(Error::invariant("coordinate inversion failed to stabilize"))
}

#[derive(Debug, Clone)]
struct Inverse {
    precision: u64,
    z1: Polynomial,
    z2: Polynomial,
}

/// Two-stage valuation on `A^3`; see the module documentation.
#[derive(Debug)]
pub struct ComposedValuation {
    w: (u64, u64),
    v: (u64, u64),
    y1: Polynomial,
    y2: Polynomial,
    order_cap: u64,
    cache: Arc<Mutex<Option<Inverse>>>,
}

impl Clone for ComposedValuation {
    fn clone(&self) -> Self {
        let cached = self.cache.lock().map(|c| c.clone()).unwrap_or(None);
        ComposedValuation {
            w: self.w,
            v: self.v,
            y1: self.y1.clone(),
            y2: self.y2.clone(),
            order_cap: self.order_cap,
            cache: Arc::new(Mutex::new(cached)),
        }
    }
}

impl PartialEq for ComposedValuation {
    fn eq(&self, other: &Self) -> bool {
        self.w == other.w && self.v == other.v && self.y1 == other.y1 && self.y2 == other.y2
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct ComposedJson {
    pub w: [u64; 2],
    pub v: [u64; 2],
    pub y1: Polynomial,
    pub y2: Polynomial,
}

impl Serialize for ComposedValuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComposedJson { w: [self.w.0, self.w.1], v: [self.v.0, self.v.1], y1: self.y1.clone(), y2: self.y2.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComposedValuation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ComposedJson::deserialize(d)?;
        ComposedValuation::new((j.w[0], j.w[1]), (j.v[0], j.v[1]), j.y1, j.y2).map_err(serde::de::Error::custom)
    }
}

impl ComposedValuation {
    /// `y1, y2` are polynomials in `(z1, z2, x3)`.
    pub fn new(w: (u64, u64), v: (u64, u64), y1: Polynomial, y2: Polynomial) -> Result<Self> {
        if w.0 == 0 || w.1 == 0 || v.0 == 0 || v.1 == 0 {
            return Err(Error::ZeroWeight);
        }
        if w.1 > w.0 || v.1 > v.0 {
            return Err(Error::invalid(format!("expected w2 <= w1 and v2 <= v1, got w={w:?}, v={v:?}")));
        }
        check_regular(&y1, &y2)?;
        Ok(ComposedValuation { w, v, y1, y2, order_cap: DEFAULT_ORDER_CAP, cache: Arc::new(Mutex::new(None)) })
    }

    /// The tower with the identity second system `(y1, y2) = (z1, z2)`.
    pub fn monomial(w: (u64, u64), v: (u64, u64)) -> Result<Self> {
        Self::new(w, v, Polynomial::var(3, 0), Polynomial::var(3, 1))
    }

    pub fn with_order_cap(mut self, cap: u64) -> Self {
        self.order_cap = cap.max(1);
        self
    }

    pub fn w(&self) -> (u64, u64) {
        self.w
    }

    pub fn v(&self) -> (u64, u64) {
        self.v
    }

    pub fn y1(&self) -> &Polynomial {
        &self.y1
    }

    pub fn y2(&self) -> &Polynomial {
        &self.y2
    }

    pub fn order_cap(&self) -> u64 {
        self.order_cap
    }

    fn weights(&self) -> [u64; 3] {
        [self.v.0, self.v.1, 1]
    }

    /// `a_F(X)` with trivial ideal: `(v1 + v2 + 1) + (w1 + w2)`, the
    /// exceptional divisor `x3 = 0` of the first stage having order one.
    pub fn discrepancy_base(&self) -> u64 {
        self.v.0 + self.v.1 + 1 + self.w.0 + self.w.1
    }

    fn inverse(&self, precision: u64) -> Result<(Polynomial, Polynomial)> {
        let mut guard = self.cache.lock().map_err(|_| Error::invariant("inverse cache poisoned"))?;
        if let Some(inv) = guard.as_ref() {
            if inv.precision >= precision {
                return Ok((inv.z1.clone(), inv.z2.clone()));
            }
        }
        let (z1, z2) = invert_regular_system(&self.y1, &self.y2, self.v, precision)?;
        *guard = Some(Inverse { precision, z1: z1.clone(), z2: z2.clone() });
        Ok((z1, z2))
    }

    /// The image of `f(x1, x2, x3)` in `Q[y1, y2, x3]`, exact in every
    /// weighted degree up to `bound`.
    pub fn pullback_truncated(&self, f: &Polynomial, bound: u64) -> Result<Polynomial> {
        check_dim(3, f.dim())?;
        let shifts: Vec<u64> = f.terms().map(|(e, _)| self.x3_shift(e)).collect();
        let Some(&m_min) = shifts.iter().min() else {
            return Ok(Polynomial::zero(3));
        };
        if m_min > bound {
            return Ok(Polynomial::zero(3));
        }
        let (z1, z2) = self.inverse((bound - m_min).max(1))?;
        let weights = self.weights();
        let mut p1 = vec![Polynomial::one(3)];
        let mut p2 = vec![Polynomial::one(3)];
        let mut out = Polynomial::zero(3);
        for ((e, c), m) in f.terms().zip(shifts) {
            if m > bound {
                continue;
            }
            let budget = bound - m;
            let (a, b) = (e.0[0] as usize, e.0[1] as usize);
            while p1.len() <= a {
                let next = mul_trunc(p1.last().unwrap(), &z1, &weights, bound - m_min);
                p1.push(next);
            }
            while p2.len() <= b {
                let next = mul_trunc(p2.last().unwrap(), &z2, &weights, bound - m_min);
                p2.push(next);
            }
            let prod = mul_trunc(&p1[a], &p2[b], &weights, budget);
            let shifted = prod.shift(&ExponentVector(vec![0, 0, m as u32])).scale(c);
            out = out.add(&shifted)?;
        }
        Ok(out)
    }

    fn x3_shift(&self, e: &ExponentVector) -> u64 {
        e.0[2] as u64 + e.0[0] as u64 * self.w.0 + e.0[1] as u64 * self.w.1
    }

    /// Order at a fixed relative precision: `Ok(None)` when everything up to
    /// the bound cancels.
    pub fn order_at_precision(&self, f: &Polynomial, precision: u64) -> Result<Option<u64>> {
        let m_min = f.terms().map(|(e, _)| self.x3_shift(e)).min().ok_or(Error::ZeroIdeal)?;
        let image = self.pullback_truncated(f, m_min + precision)?;
        Ok(image.weighted_order(&self.weights()))
    }

    /// `ord_F f`, certified: every discarded term has weighted degree above
    /// the bound at which a nonzero part was found.
    pub fn composed_ord(&self, f: &Polynomial) -> Result<u64> {
        if f.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        let mut precision = (2 * (self.v.0 + self.v.1)).min(self.order_cap);
        loop {
            if let Some(v) = self.order_at_precision(f, precision)? {
                return Ok(v);
            }
            if precision >= self.order_cap {
                return Err(Error::NonTermination { cap: self.order_cap });
            }
            precision = (precision * 2).min(self.order_cap);
        }
    }

    /// `ord_F` of the coordinates `(x1, x2, x3)`.
    pub fn coordinate_profile(&self) -> Result<[u64; 3]> {
        let mut out = [0u64; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.composed_ord(&Polynomial::var(3, i))?;
        }
        Ok(out)
    }

    /// `sum_j r_j ord_F a_j`. Monomial components use the coordinate
    /// profile; polynomial components are valued exactly.
    pub fn ideal_order(&self, a: &RIdeal) -> Result<Rational> {
        let mut total = Rational::zero();
        let mut profile: Option<[u64; 3]> = None;
        for (c, r) in a.components() {
            let best = match c {
                IdealComponent::Monomial(m) => {
                    if m.dim() != 3 {
                        return Err(Error::DimensionMismatch { expected: 3, found: m.dim() });
                    }
                    if m.quotient().is_some() {
                        return Err(Error::invalid("composed valuations live on smooth germs"));
                    }
                    let p = match profile {
                        Some(p) => p,
                        None => *profile.insert(self.coordinate_profile()?),
                    };
                    m.gens()
                        .iter()
                        .map(|g| g.weighted_degree(&p))
                        .min()
                        .ok_or(Error::ZeroIdeal)?
                }
                IdealComponent::Polys(ps) => {
                    let mut best: Option<u64> = None;
                    for p in ps {
                        let v = self.composed_ord(p)?;
                        best = Some(best.map_or(v, |b| b.min(v)));
                    }
                    best.ok_or(Error::ZeroIdeal)?
                }
            };
            total += r * BigRational::from_integer(best.into());
        }
        Ok(total)
    }
}

pub fn composed_ord(v: &ComposedValuation, f: &Polynomial) -> Result<u64> {
    v.composed_ord(f)
}

/// `a_F(X, a) = (v1 + v2 + 1) + (w1 + w2) - ord_F a`.
pub fn composed_log_discrepancy(v: &ComposedValuation, a: &RIdeal) -> Result<Rational> {
    Ok(Rational::from_integer(v.discrepancy_base().into()) - v.ideal_order(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::MonomialIdeal;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn var(i: usize) -> Polynomial {
        Polynomial::var(3, i)
    }

    fn mono(e: [u32; 3]) -> Polynomial {
        Polynomial::monomial(int(1), ExponentVector(e.to_vec()))
    }

    fn cusp_system() -> ComposedValuation {
        let y1 = var(0).add(&var(1).pow(2)).unwrap();
        ComposedValuation::new((3, 2), (5, 2), y1, var(1)).unwrap()
    }

    #[test]
    fn toric_orders() {
        let e = ToricDivisor::smooth(&[3, 2, 1]).unwrap();
        let cusp = RIdeal::from(MonomialIdeal::from_exponents(3, &[&[2, 0, 0], &[0, 3, 0]]).unwrap());
        assert_eq!(toric_ord(&e, &cusp).unwrap(), int(6));
        assert_eq!(log_discrepancy(&e, &RIdeal::trivial()).unwrap(), int(6));

        let axis = ToricDivisor::smooth(&[1, 1, 0]).unwrap();
        let xy = RIdeal::from(MonomialIdeal::from_exponents(3, &[&[1, 1, 0]]).unwrap());
        assert_eq!(toric_ord(&axis, &xy).unwrap(), int(2));
        assert_eq!(axis.centre_support(), vec![0, 1]);

        let g = CyclicQuotientGerm::new(2, &[1, 1, 1]).unwrap();
        let half = ToricDivisor::new(g.clone(), vec![frac(1, 2); 3]).unwrap();
        let m = RIdeal::from(MonomialIdeal::invariant_maximal(&g));
        assert_eq!(toric_ord(&half, &m).unwrap(), int(1));
        assert!(matches!(ToricDivisor::new(g, vec![frac(1, 2), int(0), int(0)]), Err(Error::NotInLattice(_))));
        assert!(matches!(ToricDivisor::smooth(&[2, 2, 2]), Err(Error::NotPrimitive(_))));
    }

    #[test]
    fn slope_condition_and_terminal_quotient() {
        // (x1^2, x2^3)^{5/6} along (3,2,0): order 5 = 3 + 2
        let e = ToricDivisor::smooth(&[3, 2, 0]).unwrap();
        let cusp = RIdeal::monomial(MonomialIdeal::from_exponents(3, &[&[2, 0, 0], &[0, 3, 0]]).unwrap(), frac(5, 6)).unwrap();
        assert_eq!(log_discrepancy(&e, &cusp).unwrap(), int(0));

        for (r, w) in [(5i64, 2i64), (7, 3), (2, 1)] {
            let g = CyclicQuotientGerm::new(r as u64, &[w, -w, 1]).unwrap();
            let f = ToricDivisor::new(g, vec![frac(w, r), frac(r - w, r), frac(1, r)]).unwrap();
            assert_eq!(log_discrepancy(&f, &RIdeal::trivial()).unwrap(), int(1) + frac(1, r));
        }
    }

    #[test]
    fn inversion_examples() {
        let (z1, z2) = invert_regular_system(&var(0), &var(1), (2, 1), 10).unwrap();
        assert_eq!((z1, z2), (var(0), var(1)));

        let y1 = var(0).add(&var(1).pow(2)).unwrap();
        let (z1, z2) = invert_regular_system(&y1, &var(1), (5, 2), 40).unwrap();
        assert_eq!(z1, var(0).sub(&var(1).pow(2)).unwrap());
        assert_eq!(z2, var(1));

        let shear = var(0).add(&var(1).multiply(&var(2)).unwrap()).unwrap();
        let (z1, _) = invert_regular_system(&shear, &var(1), (3, 1), 12).unwrap();
        assert_eq!(z1, var(0).sub(&var(1).multiply(&var(2)).unwrap()).unwrap());

        let bad = var(0).add(&var(1)).unwrap();
        assert_eq!(invert_regular_system(&bad, &bad, (1, 1), 4), Err(Error::SingularJacobian));
    }

    #[test]
    fn inversion_of_a_genuine_series() {
        // y1 = z1 + z1 z2 has z1 = y1 / (1 + y2), an infinite series
        let y1 = var(0).add(&var(0).multiply(&var(1)).unwrap()).unwrap();
        let (z1, _) = invert_regular_system(&y1, &var(1), (1, 1), 6).unwrap();
        for k in 0..6u32 {
            let sign = if k % 2 == 0 { int(1) } else { int(-1) };
            assert_eq!(z1.coefficient(&ExponentVector(vec![1, k, 0])), sign);
        }
        // composing back is the identity modulo the bound
        let images = [z1, var(1), var(2)];
        let back = substitute_truncated(&y1, &images, &[1, 1, 1], 6).unwrap();
        assert_eq!(back, var(0));
    }

    #[test]
    fn cusp_tower_profile() {
        let v = cusp_system();
        assert_eq!(v.coordinate_profile().unwrap(), [7, 4, 1]);
        assert_eq!(composed_log_discrepancy(&v, &RIdeal::trivial()).unwrap(), int(13));
    }

    #[test]
    fn trivial_discrepancies() {
        let v = ComposedValuation::monomial((1, 1), (1, 1)).unwrap();
        assert_eq!(composed_log_discrepancy(&v, &RIdeal::trivial()).unwrap(), int(5));
        let v = ComposedValuation::monomial((7, 2), (2, 1)).unwrap();
        assert_eq!(composed_log_discrepancy(&v, &RIdeal::trivial()).unwrap(), int(13));
        assert_eq!(v.composed_ord(&var(2)).unwrap(), 1);
    }

    #[test]
    fn zero_input_is_rejected() {
        assert_eq!(cusp_system().composed_ord(&Polynomial::zero(3)), Err(Error::ZeroIdeal));
    }

    #[test]
    fn cancellation_is_seen() {
        // x1 - x2^2 pulls back to (z1 - z2^2) x3^2 = y1 x3^2
        let v = ComposedValuation::new((2, 1), (3, 1), var(0).sub(&var(1).pow(2)).unwrap(), var(1)).unwrap();
        let f = mono([1, 0, 0]).sub(&mono([0, 2, 0])).unwrap();
        assert_eq!(v.composed_ord(&f).unwrap(), 3 + 2);
        assert_eq!(v.composed_ord(&mono([0, 2, 0])).unwrap(), 4);
    }

    #[test]
    fn json_round_trip() {
        let v = cusp_system();
        let text = serde_json::to_string(&v).unwrap();
        let back: ComposedValuation = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }

    fn arb_monomial() -> impl Strategy<Value = [u32; 3]> {
        (0u32..4, 0u32..4, 0u32..4).prop_filter("degree", |(a, b, c)| a + b + c <= 8).prop_map(|(a, b, c)| [a, b, c])
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((1i64..4, arb_monomial()), 1..4).prop_map(|ts| {
            Polynomial::from_terms(3, ts.into_iter().map(|(c, e)| (int(c), ExponentVector(e.to_vec())))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn monomial_towers_are_toric(w1 in 1u64..6, dw in 0u64..5, v1 in 1u64..6, dv in 0u64..5, s in arb_monomial()) {
            let w = (w1 + dw, w1);
            let v = (v1 + dv, v1);
            let val = ComposedValuation::monomial(w, v).unwrap();
            let expected = (w.0 + v.0) * s[0] as u64 + (w.1 + v.1) * s[1] as u64 + s[2] as u64;
            prop_assert_eq!(val.composed_ord(&mono(s)).unwrap(), expected);
        }

        #[test]
        fn composed_ord_is_a_valuation(f in arb_poly(), g in arb_poly(), c in -2i64..3) {
            let y1 = var(0).add(&var(1).pow(2).scale(&int(c))).unwrap();
            let y2 = var(1).add(&var(2).scale(&int(c))).unwrap();
            let val = ComposedValuation::new((3, 2), (3, 1), y1, y2).unwrap();
            let fg = f.multiply(&g).unwrap();
            prop_assert_eq!(val.composed_ord(&fg).unwrap(), val.composed_ord(&f).unwrap() + val.composed_ord(&g).unwrap());
        }

        #[test]
        fn certified_orders_are_stable(f in arb_poly()) {
            let val = cusp_system();
            let o = val.composed_ord(&f).unwrap();
            for extra in [0u64, 5, 17] {
                let p = 2 * 7 + extra + o;
                prop_assert_eq!(val.order_at_precision(&f, p).unwrap(), Some(o));
            }
        }

        #[test]
        fn discrepancy_is_affine_in_t(a in arb_monomial(), num in 0i64..9, den in 1i64..5) {
            prop_assume!(a.iter().any(|x| *x > 0));
            let e = ToricDivisor::smooth(&[3, 2, 1]).unwrap();
            let ideal = RIdeal::from(MonomialIdeal::new(3, vec![ExponentVector(a.to_vec())]).unwrap());
            let t = frac(num, den);
            let lhs = log_discrepancy(&e, &ideal.pow(&t).unwrap()).unwrap();
            let rhs = log_discrepancy(&e, &RIdeal::trivial()).unwrap() - &t * toric_ord(&e, &ideal).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
