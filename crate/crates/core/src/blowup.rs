//! Weighted blow-ups of smooth and cyclic quotient germs: chart atlases,
//! weak transforms and the classifier of divisorial contractions to a
//! threefold point.
//!
//! Chart conventions: the chart of the `i`-th coordinate has coordinates
//! `xi_1, ..., xi_d` dual to the basis of `N` obtained from the standard one
//! by replacing `e_i` with the blow-up weight `w`. The exceptional divisor is
//! `xi_i = 0` and a monomial `x^s` pulls back to `xi^t` with `t_j = s_j` for
//! `j != i` and `t_i = <w, s>`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::germ::CyclicQuotientGerm;
use crate::ideal::{IdealComponent, MonomialIdeal, RIdeal};
use crate::poly::{dot, ExponentVector};
use crate::rational::{serde_rational, serde_rational_vec, Rational};
use crate::valuation::fmt_weights;

/// A weighted blow-up of a germ.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowUpSpec {
    germ: CyclicQuotientGerm,
    weights: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    germ: Option<CyclicQuotientGerm>,
    #[serde(with = "serde_rational_vec")]
    weights: Vec<Rational>,
}

impl Serialize for BlowUpSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecJson { germ: Some(self.germ.clone()), weights: self.weights.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlowUpSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SpecJson::deserialize(d)?;
        let germ = j.germ.unwrap_or_else(|| CyclicQuotientGerm::smooth(j.weights.len()));
        BlowUpSpec::new(germ, j.weights).map_err(serde::de::Error::custom)
    }
}

impl BlowUpSpec {
    pub fn new(germ: CyclicQuotientGerm, weights: Vec<Rational>) -> Result<Self> {
        check_dim(germ.dim(), weights.len())?;
        if weights.iter().all(|w| w.is_zero()) {
            return Err(Error::ZeroWeight);
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::invalid("weights must be nonnegative"));
        }
        let shown = fmt_weights(&weights);
        if !germ.in_lattice(&weights) {
            return Err(Error::NotInLattice(shown));
        }
        if !germ.is_primitive(&weights) {
            return Err(Error::NotPrimitive(shown));
        }
        Ok(BlowUpSpec { germ, weights })
    }

    pub fn smooth(weights: &[u64]) -> Result<Self> {
        Self::new(
            CyclicQuotientGerm::smooth(weights.len()),
            weights.iter().map(|&w| Rational::from_integer(w.into())).collect(),
        )
    }

    pub fn germ(&self) -> &CyclicQuotientGerm {
        &self.germ
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.germ.dim()
    }

    /// `a_E(X)` of the exceptional divisor.
    pub fn discrepancy(&self) -> Rational {
        self.weights.iter().fold(Rational::zero(), |a, b| a + b)
    }
}

/// One affine chart of a weighted blow-up.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chart {
    /// One-based index of the coordinate whose chart this is.
    pub coordinate: usize,
    pub germ: CyclicQuotientGerm,
    #[serde(rename = "type")]
    pub type_label: String,
    pub smooth: bool,
    /// Row `j` is the exponent vector of the pullback of `x_j`.
    #[serde(serialize_with = "ser_matrix")]
    pub transition: Vec<Vec<Rational>>,
}

fn ser_matrix<S: serde::Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|q| q.to_string()).collect()).collect();
    rows.serialize(s)
}

impl Chart {
    fn index(&self) -> usize {
        self.coordinate - 1
    }

    /// Exponents of the pullback of `x^s`.
    pub fn pull(&self, s: &[Rational]) -> Result<Vec<Rational>> {
        check_dim(self.transition.len(), s.len())?;
        let d = s.len();
        Ok((0..d)
            .map(|k| (0..d).fold(Rational::zero(), |acc, j| acc + &s[j] * &self.transition[j][k]))
            .collect())
    }

    /// Inverse of [`Chart::pull`].
    pub fn push(&self, t: &[Rational]) -> Result<Vec<Rational>> {
        check_dim(self.transition.len(), t.len())?;
        let i = self.index();
        let wi = &self.transition[i][i];
        let mut s = t.to_vec();
        let mut rest = t[i].clone();
        for j in (0..t.len()).filter(|&j| j != i) {
            rest -= &t[j] * &self.transition[j][i];
        }
        s[i] = rest / wi;
        Ok(s)
    }

    fn pull_monomial(&self, s: &ExponentVector) -> Result<Vec<BigInt>> {
        let v: Vec<Rational> = s.0.iter().map(|&e| Rational::from_integer(e.into())).collect();
        self.pull(&v)?
            .into_iter()
            .map(|q| {
                if q.is_integer() {
                    Ok(q.to_integer())
                } else {
                    Err(Error::invalid(format!("monomial {s} is not invariant on the base germ")))
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChartAtlas {
    pub spec: BlowUpSpec,
    #[serde(with = "serde_rational")]
    pub discrepancy: Rational,
    pub charts: Vec<Chart>,
}

impl ChartAtlas {
    pub fn chart(&self, coordinate: usize) -> Result<&Chart> {
        self.charts
            .iter()
            .find(|c| c.index() == coordinate)
            .ok_or_else(|| Error::invalid(format!("no chart for coordinate {} (weight zero or out of range)", coordinate + 1)))
    }

    /// Types of the singular charts.
    pub fn singular_types(&self) -> Vec<&CyclicQuotientGerm> {
        self.charts.iter().filter(|c| !c.smooth).map(|c| &c.germ).collect()
    }
}

fn frac_part(q: &Rational) -> Rational {
    q - q.floor()
}

fn order_mod_one(v: &[Rational]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, q| acc.lcm(frac_part(q).denom()))
}

const GROUP_LIMIT: usize = 1 << 20;

/// The chart group `N / <u>` as the subgroup of `(Q/Z)^d` generated by
/// `gens`; returns a cyclic generator and the group order.
fn cyclic_generator(gens: &[Vec<Rational>]) -> Result<(Vec<Rational>, u64)> {
    let d = gens[0].len();
    let zero = vec![Rational::zero(); d];
    let mut seen: BTreeSet<Vec<Rational>> = BTreeSet::new();
    seen.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y: Vec<Rational> = x.iter().zip(g).map(|(a, b)| frac_part(&(a + b))).collect();
            if seen.insert(y.clone()) {
                if seen.len() > GROUP_LIMIT {
                    return Err(Error::invalid("chart group too large"));
                }
                frontier.push(y);
            }
        }
    }
    let m = seen.len() as u64;
    let m_big = BigInt::from(m);
    let gen = seen
        .into_iter()
        .find(|x| order_mod_one(x) == m_big)
        .ok_or_else(|| Error::invalid("chart group is not cyclic"))?;
    Ok((gen, m))
}

/// The representative of `1/m(b)` up to units with the last unit entry 1.
fn normalized_type(m: u64, b: &[u64]) -> Result<CyclicQuotientGerm> {
    if m == 1 {
        return Ok(CyclicQuotientGerm::smooth(b.len()));
    }
    let unit = b.iter().rev().find(|&&x| x.gcd(&m) == 1).copied();
    let scaled: Vec<i64> = match unit {
        Some(u) => {
            let inv = mod_inverse(u, m);
            b.iter().map(|&x| ((x as u128 * inv as u128) % m as u128) as i64).collect()
        }
        None => b.iter().map(|&x| x as i64).collect(),
    };
    CyclicQuotientGerm::new(m, &scaled)
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(m as i128));
    e.x.rem_euclid(m as i128) as u64
}

/// Display form `1/m(b1,...,bd)` with entries as residues.
pub fn type_label(g: &CyclicQuotientGerm) -> String {
    if g.is_smooth() {
        return "smooth".into();
    }
    let parts: Vec<String> = g.a().iter().map(|x| x.to_string()).collect();
    format!("1/{}({})", g.r(), parts.join(","))
}

/// The chart atlas of a weighted blow-up: one chart per coordinate of
/// positive weight.
pub fn charts(spec: &BlowUpSpec) -> Result<ChartAtlas> {
    let d = spec.dim();
    let w = &spec.weights;
    let germ = &spec.germ;
    let mut out = Vec::new();
    for i in (0..d).filter(|&i| w[i].is_positive()) {
        // u-coordinates of a vector x: c_i = x_i / w_i, c_j = x_j - x_i w_j / w_i
        let coords = |x: &[Rational]| -> Vec<Rational> {
            let ci = &x[i] / &w[i];
            (0..d).map(|j| if j == i { ci.clone() } else { &x[j] - &ci * &w[j] }).collect()
        };
        let mut gens = Vec::new();
        let mut ei = vec![Rational::zero(); d];
        ei[i] = Rational::one();
        gens.push(coords(&ei));
        if !germ.is_smooth() {
            let g: Vec<Rational> = germ.a().iter().map(|&a| Rational::new(a.into(), germ.r().into())).collect();
            gens.push(coords(&g));
        }
        let (gen, m) = cyclic_generator(&gens)?;
        let b: Vec<u64> = gen
            .iter()
            .map(|q| (frac_part(q) * Rational::from_integer(m.into())).to_integer().to_u64().unwrap_or(0))
            .collect();
        let chart_germ = normalized_type(m, &b)?;
        let transition = (0..d)
            .map(|j| {
                let mut row = vec![Rational::zero(); d];
                if j != i {
                    row[j] = Rational::one();
                }
                row[i] = w[j].clone();
                row
            })
            .collect();
        out.push(Chart {
            coordinate: i + 1,
            type_label: type_label(&chart_germ),
            smooth: chart_germ.is_smooth(),
            germ: chart_germ,
            transition,
        });
    }
    Ok(ChartAtlas { discrepancy: spec.discrepancy(), spec: spec.clone(), charts: out })
}

/// Weak transform of a monomial ideal on one chart. `power` is the `n` of a
/// weak Q-transform: the transform of `a^n`, to be read with exponent `1/n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakTransform {
    pub ideal: MonomialIdeal,
    pub power: u64,
    /// `ord_E a`.
    #[serde(with = "serde_rational")]
    pub order: Rational,
}

/// `a O_Y (ord_E(a) E)` on the chart of `coordinate` (zero-based). When
/// dividing by `xi_i^{ord}` leaves non-invariant monomials, `q_mode`
/// switches to the smallest power `a^n` for which it does not.
pub fn weak_transform(a: &MonomialIdeal, spec: &BlowUpSpec, coordinate: usize, q_mode: bool) -> Result<WeakTransform> {
    check_dim(spec.dim(), a.dim())?;
    if a.is_zero() {
        return Err(Error::ZeroIdeal);
    }
    match (a.quotient(), spec.germ.is_smooth()) {
        (Some(q), false) if q.equivalent(&spec.germ) => {}
        (None, true) => {}
        _ => return Err(Error::GermMismatch("ideal and blow-up live on different germs".into())),
    }
    let atlas = charts(spec)?;
    let chart = atlas.chart(coordinate)?;
    let order = a.order(&spec.weights)?.ok_or(Error::ZeroIdeal)?;
    let i = coordinate;
    let cg = &chart.germ;
    let n = if cg.is_smooth() {
        1
    } else {
        // xi_i^{n ord} is invariant iff m | n · ord · b_i
        let m = cg.r();
        let o = order.to_integer().to_u64().ok_or_else(|| Error::invariant("non-integral order of an invariant ideal"))?;
        let need = m / m.gcd(&((o as u128 * cg.a()[i] as u128 % m as u128) as u64));
        if need > 1 && !q_mode {
            return Err(Error::NonIntegralTransform { chart: i + 1, order });
        }
        need
    };
    let base = if n == 1 { a.clone() } else { a.power(n as u32) };
    let shift = &order * Rational::from_integer(n.into());
    let shift = shift.to_integer();
    let mut gens = Vec::new();
    for g in base.gens() {
        let mut t = chart.pull_monomial(g)?;
        t[i] -= &shift;
        let e: Vec<u32> = t
            .iter()
            .map(|x| x.to_u32().ok_or_else(|| Error::invariant("negative exponent in weak transform")))
            .collect::<Result<_>>()?;
        gens.push(ExponentVector(e));
    }
    let ideal = MonomialIdeal::with_quotient(a.dim(), gens, Some(cg.clone()))?;
    Ok(WeakTransform { ideal, power: n, order })
}

/// Component-wise weak (Q-)transform of a monomial R-ideal.
pub fn weak_transform_rideal(a: &RIdeal, spec: &BlowUpSpec, coordinate: usize, q_mode: bool) -> Result<RIdeal> {
    let mut comps = Vec::new();
    for (c, r) in a.components() {
        let IdealComponent::Monomial(m) = c else {
            return Err(Error::invalid("weak transforms are computed for monomial components"));
        };
        let t = weak_transform(m, spec, coordinate, q_mode)?;
        comps.push((IdealComponent::Monomial(t.ideal), r / Rational::from_integer(t.power.into())));
    }
    RIdeal::new(comps)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionRecord {
    /// "quotient" or "smooth".
    pub kind: String,
    pub is_contraction: bool,
    #[serde(with = "serde_rational_vec")]
    pub weights: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub discrepancy: Rational,
    pub singularities: Vec<String>,
    #[serde(skip)]
    pub singular_germs: Vec<CyclicQuotientGerm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// The `w` of a terminal quotient type `1/r(w, -w, 1)` equivalent to `germ`.
pub fn terminal_quotient_parameter(germ: &CyclicQuotientGerm) -> Option<u64> {
    let r = germ.r();
    if germ.dim() != 3 || r < 2 {
        return None;
    }
    let a = germ.a();
    if a[2].gcd(&r) != 1 {
        return None;
    }
    let u = mod_inverse(a[2], r) as u128;
    let w = (a[0] as u128 * u % r as u128) as u64;
    let minus = (a[1] as u128 * u % r as u128) as u64;
    (w != 0 && (w + minus).is_multiple_of(r) && w.gcd(&r) == 1).then_some(w)
}

/// Divisorial contractions to a threefold point. For a terminal quotient
/// `1/r(w, -w, 1)` the contraction is unique; on a smooth germ the
/// candidate `(w1, w2)` is tested for membership in `P`.
pub fn classify_contraction(germ: &CyclicQuotientGerm, candidate: Option<(u64, u64)>) -> Result<ContractionRecord> {
    if germ.dim() != 3 {
        return Err(Error::invalid("contractions are classified over threefold germs"));
    }
    let record = |kind: &str, spec: &BlowUpSpec, ok: bool, reason: Option<String>| -> Result<ContractionRecord> {
        let atlas = charts(spec)?;
        let singular: Vec<CyclicQuotientGerm> = atlas.singular_types().into_iter().cloned().collect();
        Ok(ContractionRecord {
            kind: kind.into(),
            is_contraction: ok,
            weights: spec.weights.clone(),
            discrepancy: spec.discrepancy(),
            singularities: singular.iter().map(type_label).collect(),
            singular_germs: singular,
            reason,
        })
    };
    if germ.is_smooth() {
        let (w1, w2) = candidate.ok_or_else(|| Error::invalid("a smooth germ needs candidate weights (w1, w2)"))?;
        if w1 == 0 || w2 == 0 {
            return Err(Error::ZeroWeight);
        }
        let spec = BlowUpSpec::smooth(&[w1, w2, 1])?;
        let reason = if w1.gcd(&w2) != 1 {
            Some(format!("w1 = {w1} and w2 = {w2} have a common factor; the blow-up is singular along a curve"))
        } else if w2 > w1 {
            Some(format!("w2 = {w2} exceeds w1 = {w1}; swap the coordinates"))
        } else {
            None
        };
        return record("smooth", &spec, reason.is_none(), reason);
    }
    if candidate.is_some() {
        return Err(Error::invalid("candidate weights apply to smooth germs only"));
    }
    let w = terminal_quotient_parameter(germ)
        .ok_or_else(|| Error::invalid(format!("{germ} is not of terminal type 1/r(w,-w,1)")))?;
    let r = germ.r();
    let standard = CyclicQuotientGerm::new(r, &[w as i64, (r - w) as i64, 1])?;
    // weights in the coordinates of the given presentation: the unit that
    // maps `germ` to the standard form leaves the coordinates fixed
    let weights = vec![
        Rational::new(w.into(), r.into()),
        Rational::new((r - w).into(), r.into()),
        Rational::new(1.into(), r.into()),
    ];
    let spec = BlowUpSpec::new(standard, weights)?;
    let mut rec = record("quotient", &spec, true, None)?;
    debug_assert_eq!(rec.discrepancy, Rational::one() + Rational::new(1.into(), r.into()));
    rec.kind = "quotient".into();
    Ok(rec)
}

/// `ord_E x^s` for the toric divisor of `spec`.
pub fn monomial_order(spec: &BlowUpSpec, s: &ExponentVector) -> Result<Rational> {
    dot(&spec.weights, s)
}
