//! Monomial ideals, ideal components and R-ideals `prod_j a_j^{r_j}`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::germ::CyclicQuotientGerm;
use crate::poly::{dot, ExponentVector, Polynomial};
use crate::rational::{serde_rational, Rational};

/// A monomial ideal stored by its minimal generators (sorted). No generators
/// means the zero ideal; the single generator `0` is the unit ideal.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "MonomialIdealJson", into = "MonomialIdealJson")]
pub struct MonomialIdeal {
    dim: usize,
    gens: Vec<ExponentVector>,
    quotient: Option<CyclicQuotientGerm>,
}

#[derive(Serialize, Deserialize)]
struct MonomialIdealJson {
    dim: usize,
    gens: Vec<Vec<u32>>,
    #[serde(default)]
    quotient: Option<CyclicQuotientGerm>,
}

impl TryFrom<MonomialIdealJson> for MonomialIdeal {
    type Error = Error;
    fn try_from(j: MonomialIdealJson) -> Result<Self> {
        MonomialIdeal::with_quotient(j.dim, j.gens.into_iter().map(ExponentVector).collect(), j.quotient)
    }
}

impl From<MonomialIdeal> for MonomialIdealJson {
    fn from(m: MonomialIdeal) -> Self {
        MonomialIdealJson { dim: m.dim, gens: m.gens.into_iter().map(|e| e.0).collect(), quotient: m.quotient }
    }
}

/// Keeps the generators not divisible by another one, sorted.
pub fn minimalize(mut gens: Vec<ExponentVector>) -> Vec<ExponentVector> {
    gens.sort_by(|a, b| a.total_degree().cmp(&b.total_degree()).then_with(|| a.cmp(b)));
    gens.dedup();
    let mut kept: Vec<ExponentVector> = Vec::new();
    for g in gens {
        if !kept.iter().any(|k| k.divides(&g)) {
            kept.push(g);
        }
    }
    kept.sort();
    kept
}

impl MonomialIdeal {
    pub fn new(dim: usize, gens: Vec<ExponentVector>) -> Result<Self> {
        Self::with_quotient(dim, gens, None)
    }

    /// Generators on a quotient germ must be invariant monomials.
    pub fn with_quotient(dim: usize, gens: Vec<ExponentVector>, quotient: Option<CyclicQuotientGerm>) -> Result<Self> {
        for g in &gens {
            check_dim(dim, g.dim())?;
        }
        let quotient = quotient.filter(|q| !q.is_smooth());
        if let Some(q) = &quotient {
            check_dim(dim, q.dim())?;
            if let Some(bad) = gens.iter().find(|g| !q.is_invariant(&g.0)) {
                return Err(Error::invalid(format!("generator {bad} is not invariant under {q}")));
            }
        }
        Ok(MonomialIdeal { dim, gens: minimalize(gens), quotient })
    }

    pub fn from_exponents(dim: usize, gens: &[&[u32]]) -> Result<Self> {
        Self::new(dim, gens.iter().map(|g| ExponentVector(g.to_vec())).collect())
    }

    pub fn zero(dim: usize) -> Self {
        MonomialIdeal { dim, gens: Vec::new(), quotient: None }
    }

    pub fn unit(dim: usize) -> Self {
        MonomialIdeal { dim, gens: vec![ExponentVector::zero(dim)], quotient: None }
    }

    /// The maximal ideal `(x_1, ..., x_d)`.
    pub fn maximal(dim: usize) -> Self {
        Self::maximal_power(dim, 1)
    }

    /// All monomials of total degree `k`.
    pub fn maximal_power(dim: usize, k: u32) -> Self {
        let mut gens = Vec::new();
        let mut e = vec![0u32; dim];
        fill_degree(&mut e, 0, k, &mut gens);
        MonomialIdeal { dim, gens: minimalize(gens), quotient: None }
    }

    /// The maximal ideal of the invariant ring of a quotient germ, generated
    /// by the invariant monomials of degree at most `r`.
    pub fn invariant_maximal(germ: &CyclicQuotientGerm) -> Self {
        let d = germ.dim();
        let mut gens = Vec::new();
        for k in 1..=germ.r() as u32 {
            let mut e = vec![0u32; d];
            fill_degree(&mut e, 0, k, &mut gens);
        }
        gens.retain(|g| germ.is_invariant(&g.0));
        MonomialIdeal { dim: d, gens: minimalize(gens), quotient: Some(germ.clone()).filter(|g| !g.is_smooth()) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[ExponentVector] {
        &self.gens
    }

    pub fn quotient(&self) -> Option<&CyclicQuotientGerm> {
        self.quotient.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.gens.iter().any(|g| g.total_degree() == 0)
    }

    pub fn contains_monomial(&self, s: &ExponentVector) -> bool {
        self.gens.iter().any(|g| g.divides(s))
    }

    fn check_ambient(&self, other: &MonomialIdeal) -> Result<()> {
        check_dim(self.dim, other.dim)?;
        match (&self.quotient, &other.quotient) {
            (Some(a), Some(b)) if a != b => Err(Error::GermMismatch(format!("{a} vs {b}"))),
            _ => Ok(()),
        }
    }

    fn ambient(&self, other: &MonomialIdeal) -> Option<CyclicQuotientGerm> {
        self.quotient.clone().or_else(|| other.quotient.clone())
    }

    pub fn sum(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        self.check_ambient(other)?;
        let gens = self.gens.iter().chain(&other.gens).cloned().collect();
        MonomialIdeal::with_quotient(self.dim, gens, self.ambient(other))
    }

    pub fn product(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        self.check_ambient(other)?;
        let gens = self.gens.iter().flat_map(|a| other.gens.iter().map(move |b| a.add(b))).collect();
        MonomialIdeal::with_quotient(self.dim, gens, self.ambient(other))
    }

    pub fn power(&self, n: u32) -> MonomialIdeal {
        let mut acc = MonomialIdeal { dim: self.dim, gens: vec![ExponentVector::zero(self.dim)], quotient: self.quotient.clone() };
        for _ in 0..n {
            acc = acc.product(self).expect("same ambient");
        }
        acc
    }

    /// `min_s <w, s>` over generators; `None` for the zero ideal.
    pub fn order(&self, w: &[Rational]) -> Result<Option<Rational>> {
        check_dim(self.dim, w.len())?;
        let mut best: Option<Rational> = None;
        for g in &self.gens {
            let v = dot(w, g)?;
            if best.as_ref().is_none_or(|b| &v < b) {
                best = Some(v);
            }
        }
        Ok(best)
    }
}

fn fill_degree(e: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<ExponentVector>) {
    if i + 1 == e.len() {
        e[i] = left;
        out.push(ExponentVector(e.clone()));
        return;
    }
    for k in (0..=left).rev() {
        e[i] = k;
        fill_degree(e, i + 1, left - k, out);
    }
    e[i] = 0;
}

/// One factor of an R-ideal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IdealComponent {
    Monomial(MonomialIdeal),
    Polys(Vec<Polynomial>),
}

impl IdealComponent {
    pub fn dim(&self) -> Option<usize> {
        match self {
            IdealComponent::Monomial(m) => Some(m.dim()),
            IdealComponent::Polys(ps) => ps.first().map(|p| p.dim()),
        }
    }

    /// Term-wise monomial order: the minimum of `<w, s>` over all generator
    /// exponents (respectively all terms of the polynomial generators).
    pub fn order(&self, w: &[Rational]) -> Result<Option<Rational>> {
        match self {
            IdealComponent::Monomial(m) => m.order(w),
            IdealComponent::Polys(ps) => {
                let mut best: Option<Rational> = None;
                for p in ps {
                    check_dim(w.len(), p.dim())?;
                    if let Some(v) = p.min_pairing(w)? {
                        if best.as_ref().is_none_or(|b| &v < b) {
                            best = Some(v);
                        }
                    }
                }
                Ok(best)
            }
        }
    }

    /// The monomial ideal spanned by all exponents that occur.
    pub fn monomial_hull(&self) -> Result<MonomialIdeal> {
        match self {
            IdealComponent::Monomial(m) => Ok(m.clone()),
            IdealComponent::Polys(ps) => {
                let dim = self.dim().ok_or_else(|| Error::invalid("empty polynomial component"))?;
                MonomialIdeal::new(dim, ps.iter().flat_map(|p| p.terms().map(|(e, _)| e.clone())).collect())
            }
        }
    }
}

/// A formal product `prod_j a_j^{r_j}` with positive rational exponents.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RIdeal {
    components: Vec<(IdealComponent, Rational)>,
}

impl RIdeal {
    pub fn trivial() -> Self {
        RIdeal { components: Vec::new() }
    }

    pub fn new(components: Vec<(IdealComponent, Rational)>) -> Result<Self> {
        let mut dim = None;
        for (c, r) in &components {
            if !r.is_positive() {
                return Err(Error::invalid(format!("R-ideal exponent {r} is not positive")));
            }
            if let IdealComponent::Polys(ps) = c {
                if ps.is_empty() || ps.iter().any(|p| p.is_zero()) {
                    return Err(Error::invalid("polynomial generators must be nonzero"));
                }
                let d0 = ps[0].dim();
                for p in ps {
                    check_dim(d0, p.dim())?;
                }
            }
            let d = c.dim();
            match (dim, d) {
                (Some(a), Some(b)) => check_dim(a, b)?,
                (None, d) => dim = d,
                _ => {}
            }
        }
        Ok(RIdeal { components })
    }

    pub fn monomial(ideal: MonomialIdeal, exp: Rational) -> Result<Self> {
        Self::new(vec![(IdealComponent::Monomial(ideal), exp)])
    }

    pub fn components(&self) -> &[(IdealComponent, Rational)] {
        &self.components
    }

    pub fn is_trivial(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.components.iter().find_map(|(c, _)| c.dim())
    }

    /// Formal product: concatenation of the factor lists.
    pub fn product(&self, other: &RIdeal) -> Result<RIdeal> {
        Self::new(self.components.iter().chain(&other.components).cloned().collect())
    }

    /// `a^t`: every exponent scaled by `t`; `t = 0` gives the trivial R-ideal.
    pub fn pow(&self, t: &Rational) -> Result<RIdeal> {
        if t.is_negative() {
            return Err(Error::invalid("R-ideal power must be nonnegative"));
        }
        if t.is_zero() {
            return Ok(RIdeal::trivial());
        }
        Ok(RIdeal { components: self.components.iter().map(|(c, r)| (c.clone(), r * t)).collect() })
    }

    /// The factors as monomial ideals; polynomial factors are rejected.
    pub fn monomial_components(&self) -> Result<Vec<(&MonomialIdeal, &Rational)>> {
        self.components
            .iter()
            .map(|(c, r)| match c {
                IdealComponent::Monomial(m) => Ok((m, r)),
                IdealComponent::Polys(_) => Err(Error::invalid("only monomial components are supported here")),
            })
            .collect()
    }

    /// `sum_j r_j ord_w(a_j)` with term-wise orders.
    pub fn weighted_order(&self, w: &[Rational]) -> Result<Rational> {
        if w.iter().any(|x| x.is_negative()) {
            return Err(Error::invalid("weights must be nonnegative"));
        }
        if w.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroWeight);
        }
        let mut total = Rational::zero();
        for (c, r) in &self.components {
            match c.order(w)? {
                Some(v) => total += r * v,
                None => return Err(Error::ZeroIdeal),
            }
        }
        Ok(total)
    }

    /// Every monomial component lives on `germ` (or on its smooth cover when
    /// no quotient datum is attached) and its generators are invariant.
    pub fn check_germ(&self, germ: &CyclicQuotientGerm) -> Result<()> {
        for (c, _) in &self.components {
            if let Some(d) = c.dim() {
                check_dim(germ.dim(), d)?;
            }
            match c {
                IdealComponent::Monomial(m) => {
                    if let Some(q) = m.quotient() {
                        if q != germ {
                            return Err(Error::GermMismatch(format!("ideal lives on {q}, pair on {germ}")));
                        }
                    }
                    if let Some(bad) = m.gens().iter().find(|g| !germ.is_invariant(&g.0)) {
                        return Err(Error::GermMismatch(format!("generator {bad} is not invariant under {germ}")));
                    }
                }
                IdealComponent::Polys(ps) => {
                    for p in ps {
                        if let Some((bad, _)) = p.terms().find(|(e, _)| !germ.is_invariant(&e.0)) {
                            return Err(Error::GermMismatch(format!("term {bad} is not invariant under {germ}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ideal: Option<MonomialIdeal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    polys: Option<Vec<Polynomial>>,
    #[serde(with = "serde_rational")]
    exp: Rational,
}

#[derive(Serialize, Deserialize)]
struct RIdealJson {
    components: Vec<ComponentJson>,
}

impl Serialize for RIdeal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RIdealJson {
            components: self
                .components
                .iter()
                .map(|(c, r)| match c {
                    IdealComponent::Monomial(m) => ComponentJson { ideal: Some(m.clone()), polys: None, exp: r.clone() },
                    IdealComponent::Polys(ps) => ComponentJson { ideal: None, polys: Some(ps.clone()), exp: r.clone() },
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RIdeal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RIdealJson::deserialize(d)?;
        let mut comps = Vec::new();
        for c in raw.components {
            let comp = match (c.ideal, c.polys) {
                (Some(m), None) => IdealComponent::Monomial(m),
                (None, Some(p)) => IdealComponent::Polys(p),
                _ => return Err(serde::de::Error::custom("component needs exactly one of \"ideal\" or \"polys\"")),
            };
            comps.push((comp, c.exp));
        }
        RIdeal::new(comps).map_err(serde::de::Error::custom)
    }
}

impl From<MonomialIdeal> for RIdeal {
    fn from(m: MonomialIdeal) -> Self {
        RIdeal { components: vec![(IdealComponent::Monomial(m), Rational::one())] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn mono(dim: usize, gens: &[&[u32]]) -> MonomialIdeal {
        MonomialIdeal::from_exponents(dim, gens).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn sum_examples() {
        assert_eq!(mono(2, &[&[2, 0]]).sum(&mono(2, &[&[3, 0], &[0, 1]])).unwrap(), mono(2, &[&[2, 0], &[0, 1]]));
        let a = mono(2, &[&[1, 1]]);
        assert_eq!(a.sum(&MonomialIdeal::zero(2)).unwrap(), a);

        let s = mono(3, &[&[1, 1, 0]]).sum(&MonomialIdeal::maximal_power(3, 3)).unwrap();
        let mut expected = vec![ExponentVector(vec![1, 1, 0])];
        for i in 0..=3u32 {
            for j in 0..=3 - i {
                let e = ExponentVector(vec![i, j, 3 - i - j]);
                if !(i >= 1 && j >= 1) {
                    expected.push(e);
                }
            }
        }
        assert_eq!(s, MonomialIdeal::new(3, expected).unwrap());
        assert_eq!(s.gens().len(), 8);
    }

    #[test]
    fn product_examples() {
        assert_eq!(mono(2, &[&[1, 0]]).product(&mono(2, &[&[0, 1]])).unwrap(), mono(2, &[&[1, 1]]));
        assert_eq!(MonomialIdeal::maximal(2).power(2), mono(2, &[&[2, 0], &[1, 1], &[0, 2]]));
        assert_eq!(mono(2, &[&[2, 0], &[0, 3]]).power(2), mono(2, &[&[4, 0], &[2, 3], &[0, 6]]));
    }

    #[test]
    fn weighted_order_examples() {
        let cusp = RIdeal::from(mono(3, &[&[2, 0, 0], &[0, 3, 0]]));
        assert_eq!(cusp.weighted_order(&ints(&[3, 2, 1])).unwrap(), int(6));
        let m = RIdeal::from(MonomialIdeal::maximal(3));
        assert_eq!(m.weighted_order(&ints(&[5, 2, 7])).unwrap(), int(2));
        let a = RIdeal::new(vec![
            (IdealComponent::Monomial(mono(3, &[&[1, 1, 0]])), frac(1, 2)),
            (IdealComponent::Monomial(MonomialIdeal::maximal(3)), int(2)),
        ])
        .unwrap();
        assert_eq!(a.weighted_order(&ints(&[1, 1, 1])).unwrap(), int(3));
        assert_eq!(a.weighted_order(&ints(&[0, 0, 0])), Err(Error::ZeroWeight));
    }

    #[test]
    fn invariant_maximal_of_half_quotient_is_degree_two() {
        let g = CyclicQuotientGerm::new(2, &[1, 1, 1]).unwrap();
        let m = MonomialIdeal::invariant_maximal(&g);
        assert_eq!(m.gens().len(), 6);
        assert!(m.gens().iter().all(|e| e.total_degree() == 2));
        assert!(MonomialIdeal::with_quotient(3, vec![ExponentVector(vec![1, 0, 0])], Some(g)).is_err());
    }

    #[test]
    fn rideal_json_round_trip() {
        let text = r#"{"components":[{"ideal":{"dim":3,"gens":[[0,3,0],[2,0,0]],"quotient":null},"exp":"1/2"}]}"#;
        let a: RIdeal = serde_json::from_str(text).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), text);
        assert!(serde_json::from_str::<RIdeal>(r#"{"components":[{"ideal":{"dim":2,"gens":[[1,0]]},"exp":"0"}]}"#).is_err());
    }

    fn arb_ideal() -> impl Strategy<Value = MonomialIdeal> {
        prop::collection::vec(prop::collection::vec(0u32..5, 3), 1..4)
            .prop_map(|gs| MonomialIdeal::new(3, gs.into_iter().map(ExponentVector).collect()).unwrap())
    }

    fn arb_weight() -> impl Strategy<Value = Vec<Rational>> {
        prop::collection::vec(0i64..6, 3)
            .prop_filter("nonzero", |v| v.iter().any(|x| *x > 0))
            .prop_map(|v| ints(&v))
    }

    proptest! {
        #[test]
        fn order_is_multiplicative(a in arb_ideal(), b in arb_ideal(), w in arb_weight()) {
            let ab = RIdeal::from(a.product(&b).unwrap());
            let lhs = ab.weighted_order(&w).unwrap();
            let rhs = RIdeal::from(a.clone()).weighted_order(&w).unwrap() + RIdeal::from(b.clone()).weighted_order(&w).unwrap();
            prop_assert_eq!(lhs, rhs);
            let formal = RIdeal::from(a).product(&RIdeal::from(b)).unwrap();
            prop_assert_eq!(formal.weighted_order(&w).unwrap(), ab.weighted_order(&w).unwrap());
        }

        #[test]
        fn order_of_sum_is_min(a in arb_ideal(), b in arb_ideal(), w in arb_weight()) {
            let s = a.sum(&b).unwrap().order(&w).unwrap().unwrap();
            let m = a.order(&w).unwrap().unwrap().min(b.order(&w).unwrap().unwrap());
            prop_assert_eq!(s, m);
        }

        #[test]
        fn order_is_superadditive_in_weights(
            a in arb_ideal(), w1 in arb_weight(), w2 in arb_weight(),
            p1 in (1i64..5, 1i64..4), p2 in (1i64..5, 1i64..4),
        ) {
            let (p1, p2) = (frac(p1.0, p1.1), frac(p2.0, p2.1));
            let combo: Vec<Rational> = w1.iter().zip(&w2).map(|(x, y)| &p1 * x + &p2 * y).collect();
            let r = RIdeal::from(a);
            let lhs = r.weighted_order(&combo).unwrap();
            let rhs = &p1 * r.weighted_order(&w1).unwrap() + &p2 * r.weighted_order(&w2).unwrap();
            prop_assert!(lhs >= rhs);
        }
    }
}
