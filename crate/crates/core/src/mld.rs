//! Minimal log discrepancies and thresholds of monomial pairs.
//!
//! For a germ of type `1/r(a)` and a monomial R-ideal `a`, toric divisors
//! are indexed by primitive lattice weights `w` and have log discrepancy
//! `g(w) = sum(w) - ord_w(a)`. `g` is convex, piecewise linear and
//! positively homogeneous, so the minimum over a stratum is found in three
//! phases: an LP over the closed simplex of directions (detects minus
//! infinity), bounded enumeration of lattice weights, and an LP lower bound
//! on everything outside the enumeration box.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::germ::CyclicQuotientGerm;
use crate::ideal::{IdealComponent, MonomialIdeal, RIdeal};
use crate::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::par::{self, Execution};
use crate::rational::{serde_rational, serde_rational_matrix, serde_rational_opt, Rational};

/// A germ together with a monomial R-ideal on it.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSpec {
    germ: CyclicQuotientGerm,
    rideal: RIdeal,
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    germ: Option<CyclicQuotientGerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default)]
    rideal: RIdeal,
}

impl Serialize for PairSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PairJson { germ: Some(self.germ.clone()), dim: None, rideal: self.rideal.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PairSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PairJson::deserialize(d)?;
        let germ = match (j.germ, j.dim, j.rideal.dim()) {
            (Some(g), _, _) => g,
            (None, Some(n), _) | (None, None, Some(n)) => CyclicQuotientGerm::smooth(n),
            (None, None, None) => return Err(serde::de::Error::custom("pair needs \"germ\" or \"dim\"")),
        };
        PairSpec::new(germ, j.rideal).map_err(serde::de::Error::custom)
    }
}

impl PairSpec {
    pub fn new(germ: CyclicQuotientGerm, rideal: RIdeal) -> Result<Self> {
        if !germ.is_smooth() && !germ.is_well_formed() {
            return Err(Error::invalid(format!(
                "quotient germ {germ} has a reflection in codimension one; pass a well-formed type"
            )));
        }
        rideal.check_germ(&germ)?;
        for (m, _) in rideal.monomial_components()? {
            if m.is_zero() {
                return Err(Error::ZeroIdeal);
            }
        }
        Ok(PairSpec { germ, rideal })
    }

    pub fn smooth(dim: usize, rideal: RIdeal) -> Result<Self> {
        Self::new(CyclicQuotientGerm::smooth(dim), rideal)
    }

    pub fn germ(&self) -> &CyclicQuotientGerm {
        &self.germ
    }

    pub fn rideal(&self) -> &RIdeal {
        &self.rideal
    }

    pub fn dim(&self) -> usize {
        self.germ.dim()
    }

    /// The same germ with `a` replaced by `a · b^t`.
    pub fn twisted(&self, b: &RIdeal, t: &Rational) -> Result<PairSpec> {
        PairSpec::new(self.germ.clone(), self.rideal.product(&b.pow(t)?)?)
    }

    fn components(&self) -> Vec<(&MonomialIdeal, &Rational)> {
        self.rideal.monomial_components().expect("checked at construction")
    }
}

/// `g(w) = sum(w) - ord_w(a)` for a lattice weight `w`.
pub fn discrepancy_functional(pair: &PairSpec, w: &[Rational]) -> Result<Rational> {
    check_dim(pair.dim(), w.len())?;
    if w.iter().all(|x| x.is_zero()) {
        return Err(Error::ZeroWeight);
    }
    if w.iter().any(|x| x.is_negative()) {
        return Err(Error::invalid("weights must be nonnegative"));
    }
    if !pair.germ.in_lattice(w) {
        return Err(Error::NotInLattice(crate::valuation::fmt_weights(w)));
    }
    let total = w.iter().fold(Rational::zero(), |a, b| a + b);
    if pair.rideal.is_trivial() {
        return Ok(total);
    }
    Ok(total - pair.rideal.weighted_order(w)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MldStatus {
    Value,
    MinusInfinity,
    UncertifiedAboveBound,
}

impl fmt::Display for MldStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MldStatus::Value => "value",
            MldStatus::MinusInfinity => "minus_infinity",
            MldStatus::UncertifiedAboveBound => "uncertified_above_bound",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MldReport {
    pub status: MldStatus,
    /// The certified value, or the best value found when uncertified.
    #[serde(with = "serde_rational_opt")]
    pub value: Option<Rational>,
    /// Minimizing primitive weights found within the bound, sorted; for
    /// minus infinity a direction with negative discrepancy.
    #[serde(with = "serde_rational_matrix")]
    pub witnesses: Vec<Vec<Rational>>,
    pub bound_used: u64,
    #[serde(with = "serde_rational_opt")]
    pub lp_simplex_min: Option<Rational>,
    /// A proven lower bound for the minimum (equal to `value` once certified).
    #[serde(with = "serde_rational_opt")]
    pub lower_bound: Option<Rational>,
}

impl MldReport {
    pub fn certified_value(&self) -> Option<&Rational> {
        match self.status {
            MldStatus::Value => self.value.as_ref(),
            _ => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.status != MldStatus::UncertifiedAboveBound
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MldConfig {
    /// Enumeration bound on `|w|_1`; `None` picks the default for the pair.
    pub bound: Option<u64>,
    pub certify: bool,
    pub execution: Execution,
    /// Ceiling for automatic bound growth when the certificate fails.
    pub max_bound: Option<u64>,
}

impl Default for MldConfig {
    fn default() -> Self {
        MldConfig { bound: None, certify: true, execution: Execution::default(), max_bound: None }
    }
}

impl MldConfig {
    pub fn with_bound(mut self, b: u64) -> Self {
        self.bound = Some(b);
        self
    }

    pub fn with_execution(mut self, e: Execution) -> Self {
        self.execution = e;
        self
    }
}

/// Largest default starting bound; certificate-driven growth takes over
/// beyond it.
pub const DEFAULT_BOUND_CAP: u64 = 48;

/// `max(12, min(4 · d · (largest exponent denominator), 48))`.
pub fn default_bound(pair: &PairSpec) -> u64 {
    let den = pair
        .components()
        .iter()
        .map(|(_, r)| r.denom().to_u64().unwrap_or(u64::MAX / 64))
        .max()
        .unwrap_or(1);
    (4 * pair.dim() as u64).saturating_mul(den).min(DEFAULT_BOUND_CAP).max(12)
}

fn normalize_support(d: usize, support: &[usize]) -> Result<Vec<usize>> {
    if support.is_empty() {
        return Err(Error::invalid("stratum support must be nonempty"));
    }
    let mut s = support.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&bad) = s.iter().find(|&&i| i >= d) {
        return Err(Error::invalid(format!("coordinate index {bad} out of range for dimension {d}")));
    }
    Ok(s)
}

enum SumConstraint {
    EqualsOne,
    AtLeast(Rational),
}

/// LP in the variables `(w_i)_{i in S}, (t_j)_j` minimizing
/// `sum w - sum r_j t_j` with `t_j <= <w, s>` for every generator `s`.
fn discrepancy_lp(pair: &PairSpec, support: &[usize], lower: &[Rational], sum: SumConstraint) -> LinearProgram {
    let comps = pair.components();
    let k = support.len();
    let n = k + comps.len();
    let mut objective = vec![Rational::one(); k];
    objective.extend(comps.iter().map(|(_, r)| -(*r).clone()));
    let mut lower_bounds: Vec<Option<Rational>> = lower.iter().cloned().map(Some).collect();
    lower_bounds.extend(std::iter::repeat_n(None, comps.len()));
    let mut lp = LinearProgram { objective, constraints: Vec::new(), lower_bounds };
    for (j, (m, _)) in comps.iter().enumerate() {
        for g in m.gens() {
            let mut row = vec![Rational::zero(); n];
            for (col, &i) in support.iter().enumerate() {
                row[col] = Rational::from_integer(g.0[i].into());
            }
            row[k + j] = -Rational::one();
            lp.push(row, Rational::zero());
        }
    }
    let mut ones = vec![Rational::one(); k];
    ones.extend(std::iter::repeat_n(Rational::zero(), comps.len()));
    match sum {
        SumConstraint::EqualsOne => lp.push_eq(ones, Rational::one()),
        SumConstraint::AtLeast(b) => lp.push(ones, b),
    }
    lp
}

fn optimal(out: LpOutcome) -> Result<(Rational, Vec<Rational>)> {
    match out {
        LpOutcome::Optimal { value, point, .. } => Ok((value, point)),
        other => Err(Error::invariant(format!("discrepancy LP was {}", other.tag()))),
    }
}

/// Minimum of `g` over the closed simplex of directions supported in `S`,
/// with the minimizing direction expanded to all coordinates.
fn simplex_min(pair: &PairSpec, support: &[usize]) -> Result<(Rational, Vec<Rational>)> {
    let zeros = vec![Rational::zero(); support.len()];
    let (m, point) = optimal(solve_lp(&discrepancy_lp(pair, support, &zeros, SumConstraint::EqualsOne))?)?;
    let mut w = vec![Rational::zero(); pair.dim()];
    for (col, &i) in support.iter().enumerate() {
        w[i] = point[col].clone();
    }
    Ok((m, w))
}

/// The LP behind [`lc_margin`] on the directions supported in `support`
/// (zero-based), for inspection.
pub fn margin_lp(pair: &PairSpec, support: &[usize]) -> LinearProgram {
    let zeros = vec![Rational::zero(); support.len()];
    discrepancy_lp(pair, support, &zeros, SumConstraint::EqualsOne)
}

/// Global lc test: `min g` over all directions.
pub fn lc_margin(pair: &PairSpec) -> Result<(Rational, Vec<Rational>)> {
    let all: Vec<usize> = (0..pair.dim()).collect();
    simplex_min(pair, &all)
}

/// Integer data for fast evaluation of `L · r · g(W / r)` on scaled weights.
struct Compiled {
    l: i128,
    comps: Vec<(Vec<Vec<i128>>, i128)>,
}

impl Compiled {
    fn new(pair: &PairSpec) -> Option<Compiled> {
        let comps = pair.components();
        let l = comps.iter().fold(BigInt::one(), |acc, (_, r)| acc.lcm(r.denom()));
        let lq = Rational::from_integer(l.clone());
        let mut out = Vec::new();
        for (m, r) in comps {
            let e = (r * &lq).to_integer().to_i128()?;
            let gens = m.gens().iter().map(|g| g.0.iter().map(|&x| x as i128).collect()).collect();
            out.push((gens, e));
        }
        Some(Compiled { l: l.to_i128()?, comps: out })
    }

    fn eval(&self, w: &[i64]) -> Option<i128> {
        let sum: i128 = w.iter().map(|&x| x as i128).sum();
        let mut acc = self.l.checked_mul(sum)?;
        for (gens, e) in &self.comps {
            let mut best: Option<i128> = None;
            for g in gens {
                let mut v: i128 = 0;
                for (a, &b) in g.iter().zip(w) {
                    if *a != 0 && b != 0 {
                        v = v.checked_add(a.checked_mul(b as i128)?)?;
                    }
                }
                best = Some(best.map_or(v, |x| x.min(v)));
            }
            acc = acc.checked_sub(e.checked_mul(best.unwrap_or(0))?)?;
        }
        Some(acc)
    }
}

/// Residue vectors `k·a mod r` vanishing off the support, deduplicated.
fn residues(germ: &CyclicQuotientGerm, support: &[usize]) -> Vec<Vec<i64>> {
    let r = germ.r();
    let mut out: Vec<Vec<i64>> = (0..r)
        .map(|k| germ.a().iter().map(|&a| ((k as u128 * a as u128) % r as u128) as i64).collect::<Vec<i64>>())
        .filter(|c| c.iter().enumerate().all(|(i, &v)| v == 0 || support.contains(&i)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Smallest positive scaled value of each supported coordinate.
fn scaled_floor(germ: &CyclicQuotientGerm, support: &[usize], res: &[Vec<i64>]) -> Vec<i64> {
    let r = germ.r() as i64;
    support
        .iter()
        .map(|&i| res.iter().map(|c| if c[i] > 0 { c[i] } else { r }).min().unwrap_or(r))
        .collect()
}

struct Search<'a> {
    germ: &'a CyclicQuotientGerm,
    support: &'a [usize],
    budget: i64,
}

#[derive(Clone)]
struct Best<T> {
    value: Option<T>,
    witnesses: Vec<Vec<i64>>,
}

impl<T: Ord + Clone> Best<T> {
    fn empty() -> Self {
        Best { value: None, witnesses: Vec::new() }
    }

    fn offer(&mut self, v: T, w: &[i64], germ: &CyclicQuotientGerm) {
        let ord = self.value.as_ref().map(|b| v.cmp(b));
        if matches!(ord, Some(Ordering::Greater)) {
            return;
        }
        if !germ.is_primitive_scaled(w) {
            return;
        }
        match ord {
            Some(Ordering::Equal) => self.witnesses.push(w.to_vec()),
            _ => {
                self.value = Some(v);
                self.witnesses = vec![w.to_vec()];
            }
        }
    }

    fn merge(mut self, other: Best<T>) -> Self {
        match (&self.value, &other.value) {
            (_, None) => {}
            (None, Some(_)) => return other,
            (Some(a), Some(b)) => match a.cmp(b) {
                Ordering::Less => {}
                Ordering::Greater => return other,
                Ordering::Equal => self.witnesses.extend(other.witnesses),
            },
        }
        self
    }
}

impl Search<'_> {
    /// Enumerates scaled weights `W = c + r n` on the support with
    /// `sum W <= budget`, first coordinate fixed to `first`.
    fn run<T: Ord + Clone>(&self, c: &[i64], first: i64, score: &dyn Fn(&[i64]) -> Option<T>) -> Option<Best<T>> {
        let mut w = vec![0i64; self.germ.dim()];
        w[self.support[0]] = first;
        let mut best = Best::empty();
        self.rec(c, 1, first, &mut w, score, &mut best)?;
        Some(best)
    }

    fn rec<T: Ord + Clone>(
        &self,
        c: &[i64],
        pos: usize,
        used: i64,
        w: &mut Vec<i64>,
        score: &dyn Fn(&[i64]) -> Option<T>,
        best: &mut Best<T>,
    ) -> Option<()> {
        if pos == self.support.len() {
            let v = score(w)?;
            best.offer(v, w, self.germ);
            return Some(());
        }
        let i = self.support[pos];
        let r = self.germ.r() as i64;
        let mut x = if c[i] > 0 { c[i] } else { r };
        while used + x <= self.budget {
            w[i] = x;
            self.rec(c, pos + 1, used + x, w, score, best)?;
            x += r;
        }
        w[i] = 0;
        Some(())
    }
}

/// Runs the enumeration with a scorer; `None` when the scorer overflowed.
fn enumerate_with<T: Ord + Clone + Send>(
    germ: &CyclicQuotientGerm,
    support: &[usize],
    res: &[Vec<i64>],
    budget: i64,
    exec: Execution,
    score: &(dyn Fn(&[i64]) -> Option<T> + Sync),
) -> Option<Best<T>> {
    let r = germ.r() as i64;
    let s0 = support[0];
    let mut tasks: Vec<(usize, i64)> = Vec::new();
    for (ci, c) in res.iter().enumerate() {
        let mut x = if c[s0] > 0 { c[s0] } else { r };
        while x <= budget {
            tasks.push((ci, x));
            x += r;
        }
    }
    let search = Search { germ, support, budget };
    let parts = par::map(exec, &tasks, |&(ci, first)| search.run(&res[ci], first, score));
    let mut best = Best::empty();
    for p in parts {
        best = best.merge(p?);
    }
    best.witnesses.sort();
    best.witnesses.dedup();
    Some(best)
}

/// Minimum of `g` over primitive lattice weights with support exactly `S`
/// and `|w|_1 <= bound`, with all minimizers.
fn enumerate_stratum(
    pair: &PairSpec,
    support: &[usize],
    res: &[Vec<i64>],
    bound: u64,
    exec: Execution,
) -> Result<(Option<Rational>, Vec<Vec<Rational>>)> {
    let germ = &pair.germ;
    let r = germ.r() as i64;
    let budget = (bound as i64).checked_mul(r).ok_or_else(|| Error::invalid("bound too large"))?;
    let unscale = |b: Best<Rational>| (b.value, b.witnesses.iter().map(|w| germ.unscale(w)).collect());
    if let Some(c) = Compiled::new(pair) {
        let denom = Rational::from_integer(BigInt::from(c.l) * BigInt::from(r));
        let fast = |w: &[i64]| c.eval(w);
        if let Some(b) = enumerate_with(germ, support, res, budget, exec, &fast) {
            let value = b.value.map(|v| Rational::from_integer(BigInt::from(v)) / &denom);
            return Ok(unscale(Best { value, witnesses: b.witnesses }));
        }
    }
    let slow = |w: &[i64]| discrepancy_functional(pair, &germ.unscale(w)).ok();
    let b = enumerate_with(germ, support, res, budget, exec, &slow)
        .ok_or_else(|| Error::invariant("lattice point rejected by exact evaluation"))?;
    Ok(unscale(b))
}

/// The primitive integral multiple of a nonnegative rational direction.
fn lattice_direction(w: &[Rational]) -> Vec<Rational> {
    let den = w.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = w.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| Rational::from_integer(if g.is_zero() { x } else { x / &g })).collect()
}

/// Minimal log discrepancy at the generic point of the stratum
/// `{x_i = 0 : i in support}` (zero-based indices).
pub fn mld_at_stratum(pair: &PairSpec, support: &[usize], cfg: &MldConfig) -> Result<MldReport> {
    let support = normalize_support(pair.dim(), support)?;
    let (m, direction) = simplex_min(pair, &support)?;
    let initial = cfg.bound.unwrap_or_else(|| default_bound(pair)).max(1);
    if m.is_negative() {
        return Ok(MldReport {
            status: MldStatus::MinusInfinity,
            value: None,
            witnesses: vec![lattice_direction(&direction)],
            bound_used: initial,
            lp_simplex_min: Some(m),
            lower_bound: None,
        });
    }
    let germ = &pair.germ;
    let r = germ.r();
    let res = residues(germ, &support);
    let floor = scaled_floor(germ, &support, &res);
    let lower: Vec<Rational> = floor.iter().map(|&f| Rational::new(f.into(), (r as i64).into())).collect();
    let max_bound = cfg.max_bound.unwrap_or(initial.saturating_mul(4)).max(initial);
    let mut bound = initial;
    loop {
        let (best, witnesses) = enumerate_stratum(pair, &support, &res, bound, cfg.execution)?;
        let uncertified = |lower_bound: Option<Rational>| MldReport {
            status: MldStatus::UncertifiedAboveBound,
            value: best.clone(),
            witnesses: witnesses.clone(),
            bound_used: bound,
            lp_simplex_min: Some(m.clone()),
            lower_bound,
        };
        if !cfg.certify {
            return Ok(uncertified(Some(m.clone().max(Rational::zero()))));
        }
        // everything outside the box has sum(w) >= bound + 1/r
        let beyond = Rational::from_integer(bound.into()) + Rational::new(BigInt::one(), BigInt::from(r));
        let (lb, _) = optimal(solve_lp(&discrepancy_lp(pair, &support, &lower, SumConstraint::AtLeast(beyond)))?)?;
        if let Some(b) = &best {
            if b <= &lb || b.is_zero() {
                return Ok(MldReport {
                    status: MldStatus::Value,
                    value: Some(b.clone()),
                    witnesses,
                    bound_used: bound,
                    lp_simplex_min: Some(m),
                    lower_bound: Some(b.clone()),
                });
            }
        }
        if bound >= max_bound {
            let lower_bound = match &best {
                Some(b) => b.clone().min(lb),
                None => lb,
            };
            return Ok(uncertified(Some(lower_bound.max(Rational::zero()))));
        }
        let needed = match (&best, m.is_positive()) {
            (Some(b), true) => (b / &m).ceil().to_integer().to_u64().unwrap_or(u64::MAX),
            _ => 0,
        };
        bound = max_bound.min(needed.max(bound.saturating_mul(2)));
    }
}

/// The minimal log discrepancy at the closed point.
pub fn mld_at_origin(pair: &PairSpec, cfg: &MldConfig) -> Result<MldReport> {
    let all: Vec<usize> = (0..pair.dim()).collect();
    mld_at_stratum(pair, &all, cfg)
}

/// A threshold that may be infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Threshold {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(q) => write!(f, "{q}"),
            Threshold::Infinite => f.write_str("+inf"),
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub(crate) fn require_lc(pair: &PairSpec) -> Result<()> {
    let (m, direction) = lc_margin(pair)?;
    if m.is_negative() {
        return Err(Error::NotLc { direction, value: m });
    }
    Ok(())
}

/// The largest `t >= 0` with `(X, a · b^t)` lc, via the linear-fractional
/// program `min g_a(w) / ord_b(w)` in Charnes-Cooper form.
pub fn lct(base: &PairSpec, b: &RIdeal) -> Result<Threshold> {
    b.check_germ(&base.germ)?;
    let bcomps = b.monomial_components()?;
    if bcomps.iter().any(|(m, _)| m.is_zero()) {
        return Err(Error::ZeroIdeal);
    }
    require_lc(base)?;
    let d = base.dim();
    let all: Vec<usize> = (0..d).collect();
    let zeros = vec![Rational::zero(); d];
    let mut lp = discrepancy_lp(base, &all, &zeros, SumConstraint::AtLeast(Rational::zero()));
    lp.constraints.pop();
    let nb = bcomps.len();
    let n0 = lp.num_vars();
    for c in lp.constraints.iter_mut() {
        c.coeffs.extend(std::iter::repeat_n(Rational::zero(), nb));
    }
    lp.objective.extend(std::iter::repeat_n(Rational::zero(), nb));
    lp.lower_bounds.extend(std::iter::repeat_n(None, nb));
    let n = n0 + nb;
    for (j, (m, _)) in bcomps.iter().enumerate() {
        for g in m.gens() {
            let mut row = vec![Rational::zero(); n];
            for i in 0..d {
                row[i] = Rational::from_integer(g.0[i].into());
            }
            row[n0 + j] = -Rational::one();
            lp.push(row, Rational::zero());
        }
    }
    let mut norm = vec![Rational::zero(); n];
    for (j, (_, r)) in bcomps.iter().enumerate() {
        norm[n0 + j] = (*r).clone();
    }
    lp.push(norm, Rational::one());
    match solve_lp(&lp)? {
        LpOutcome::Optimal { value, .. } => Ok(Threshold::Finite(value)),
        LpOutcome::Infeasible { .. } => Ok(Threshold::Infinite),
        LpOutcome::Unbounded { .. } => Err(Error::invariant("threshold LP unbounded on an lc pair")),
    }
}

/// The `t >= 0` with `mld_x(X, a · b^t) = target`, or `None` when no such
/// `t` exists. `t -> mld` is concave and nonincreasing up to the lc
/// threshold, so Newton steps from the threshold along active pieces reach
/// the exact crossing.
pub fn alc_threshold(a: &PairSpec, b: &RIdeal, target: &Rational, cfg: &MldConfig) -> Result<Option<Rational>> {
    if target.is_negative() {
        return Err(Error::invalid("target must be nonnegative"));
    }
    b.check_germ(&a.germ)?;
    let value_at = |t: &Rational| -> Result<Option<Rational>> {
        let rep = mld_at_origin(&a.twisted(b, t)?, cfg)?;
        match rep.status {
            MldStatus::MinusInfinity => Ok(None),
            MldStatus::Value => Ok(rep.value),
            MldStatus::UncertifiedAboveBound => Err(Error::Uncertified(format!("mld at t = {t} not certified"))),
        }
    };
    let f0 = match value_at(&Rational::zero())? {
        Some(v) => v,
        None => return Ok(None),
    };
    if &f0 < target {
        return Ok(None);
    }
    if &f0 == target {
        return Ok(Some(Rational::zero()));
    }
    let mut t = match lct(a, b)? {
        Threshold::Infinite => return Ok(None),
        Threshold::Finite(t) => t,
    };
    let start = t.clone();
    for _ in 0..512 {
        let twisted = a.twisted(b, &t)?;
        let rep = mld_at_origin(&twisted, cfg)?;
        let v = match (rep.status, rep.value.as_ref()) {
            (MldStatus::Value, Some(v)) => v.clone(),
            (MldStatus::MinusInfinity, _) => return Err(Error::invariant(format!("pair not lc at t = {t} below the threshold"))),
            _ => return Err(Error::Uncertified(format!("mld at t = {t} not certified"))),
        };
        match v.cmp(target) {
            Ordering::Equal => return Ok(Some(t)),
            Ordering::Greater if t == start => return Ok(None),
            Ordering::Greater => return Err(Error::invariant("Newton step overshot the target")),
            Ordering::Less => {}
        }
        let mut active: Option<(Rational, Vec<Rational>)> = None;
        for w in &rep.witnesses {
            let o = b.weighted_order(w)?;
            if active.as_ref().is_none_or(|(best, _)| &o < best) {
                active = Some((o, w.clone()));
            }
        }
        let (ord_b, w) = active.ok_or_else(|| Error::invariant("certified mld without witnesses"))?;
        if ord_b.is_zero() {
            return Ok(None);
        }
        let ga = discrepancy_functional(a, &w)?;
        t = (ga - target) / ord_b;
        if t.is_negative() {
            return Ok(None);
        }
    }
    Err(Error::invariant("threshold search did not converge"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StratumReport {
    /// One-based indices of the coordinates vanishing on the stratum.
    pub coordinates: Vec<usize>,
    pub dimension: usize,
    pub lc_centre: bool,
    pub mld: MldReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LcCentreReport {
    pub strata: Vec<StratumReport>,
    pub lc_centres: Vec<Vec<usize>>,
    pub smallest: Option<Vec<usize>>,
    pub smallest_dimension: Option<usize>,
}

fn all_supports(d: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << d))
        .map(|mask| (0..d).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Exact test: some weight with support exactly `S` has `g(w) = 0`.
fn stratum_is_lc_centre(pair: &PairSpec, support: &[usize]) -> Result<bool> {
    let ones = vec![Rational::one(); support.len()];
    let mut lp = discrepancy_lp(pair, support, &ones, SumConstraint::AtLeast(Rational::zero()));
    // replace the objective by the constraint g(w) <= 0
    let g = lp.objective.clone();
    lp.push(g.iter().map(|c| -c).collect(), Rational::zero());
    lp.objective = vec![Rational::zero(); g.len()];
    match solve_lp(&lp)? {
        LpOutcome::Optimal { .. } => Ok(true),
        LpOutcome::Infeasible { .. } => Ok(false),
        LpOutcome::Unbounded { .. } => Err(Error::invariant("feasibility LP unbounded")),
    }
}

pub fn lc_centres(pair: &PairSpec, cfg: &MldConfig) -> Result<LcCentreReport> {
    require_lc(pair)?;
    let d = pair.dim();
    let mut strata = Vec::new();
    for s in all_supports(d) {
        let lc_centre = stratum_is_lc_centre(pair, &s)?;
        let mld = mld_at_stratum(pair, &s, cfg)?;
        if let Some(v) = mld.certified_value() {
            if v.is_zero() != lc_centre {
                return Err(Error::invariant(format!("stratum {s:?}: mld {v} disagrees with lc-centre test")));
            }
        }
        strata.push(StratumReport { coordinates: s.iter().map(|i| i + 1).collect(), dimension: d - s.len(), lc_centre, mld });
    }
    let centres: Vec<&StratumReport> = strata.iter().filter(|s| s.lc_centre).collect();
    let smallest = centres
        .iter()
        .find(|c| centres.iter().all(|t| t.coordinates.iter().all(|i| c.coordinates.contains(i))))
        .map(|c| (c.coordinates.clone(), c.dimension));
    Ok(LcCentreReport {
        lc_centres: centres.iter().map(|c| c.coordinates.clone()).collect(),
        smallest_dimension: smallest.as_ref().map(|s| s.1),
        smallest: smallest.map(|s| s.0),
        strata,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Singularity {
    Terminal,
    CanonicalNotTerminal,
    KltNotCanonical,
    LcNotKlt,
    NotLc,
    /// The exceptional minimum lies in `[lower, upper]` but the bounds do
    /// not decide the class.
    Unknown { lower: Rational, upper: Option<Rational> },
}

impl Singularity {
    pub fn label(&self) -> &'static str {
        match self {
            Singularity::Terminal => "terminal",
            Singularity::CanonicalNotTerminal => "canonical-not-terminal",
            Singularity::KltNotCanonical => "klt-not-canonical",
            Singularity::LcNotKlt => "lc-not-klt",
            Singularity::NotLc => "not-lc",
            Singularity::Unknown { .. } => "unknown",
        }
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self, Singularity::Terminal | Singularity::CanonicalNotTerminal)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub class: String,
    #[serde(with = "serde_rational")]
    pub lp_min: Rational,
    /// Bounds on the minimum of `g` over exceptional divisors.
    #[serde(with = "serde_rational_opt")]
    pub exceptional_lower: Option<Rational>,
    #[serde(with = "serde_rational_opt")]
    pub exceptional_upper: Option<Rational>,
    #[serde(skip)]
    pub singularity: Singularity,
}

/// Places the pair in the chain terminal, canonical, klt, lc.
pub fn classify_pair(pair: &PairSpec, cfg: &MldConfig) -> Result<Classification> {
    let (m, _) = lc_margin(pair)?;
    let done = |s: Singularity, lo: Option<Rational>, hi: Option<Rational>| Classification {
        class: s.label().to_string(),
        lp_min: m.clone(),
        exceptional_lower: lo,
        exceptional_upper: hi,
        singularity: s,
    };
    if m.is_negative() {
        return Ok(done(Singularity::NotLc, None, None));
    }
    if m.is_zero() {
        return Ok(done(Singularity::LcNotKlt, None, None));
    }
    // exceptional divisors of a well-formed germ are the primitive weights
    // with at least two positive entries
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    for s in all_supports(pair.dim()).into_iter().filter(|s| s.len() >= 2) {
        let rep = mld_at_stratum(pair, &s, cfg)?;
        let lo = rep
            .lower_bound
            .clone()
            .ok_or_else(|| Error::invariant("klt pair with minus infinity on a stratum"))?;
        lower = Some(lower.map_or(lo.clone(), |x: Rational| x.min(lo)));
        if let Some(v) = rep.value {
            upper = Some(upper.map_or(v.clone(), |x: Rational| x.min(v)));
        }
    }
    let one = Rational::one();
    let lo = lower.unwrap_or_else(|| one.clone() + &one);
    let class = match &upper {
        _ if lo > one => Singularity::Terminal,
        Some(u) if u < &one => Singularity::KltNotCanonical,
        Some(u) if u == &one && lo >= one => Singularity::CanonicalNotTerminal,
        _ => Singularity::Unknown { lower: lo.clone(), upper: upper.clone() },
    };
    Ok(done(class, Some(lo), upper))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl Verdict {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::Yes => Some(true),
            Verdict::No => Some(false),
            Verdict::Unknown => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "true",
            Verdict::No => "false",
            Verdict::Unknown => "unknown",
        })
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemistableReport {
    pub verdict: Verdict,
    pub mld: MldReport,
    /// Minimizers found within the bound.
    #[serde(with = "serde_rational_matrix")]
    pub minimizers: Vec<Vec<Rational>>,
    /// LP lower bound of `g` over weights with `ord m >= 2`.
    #[serde(with = "serde_rational_opt")]
    pub higher_order_bound: Option<Rational>,
}

fn require_smooth_threefold(pair: &PairSpec) -> Result<()> {
    if pair.dim() != 3 || !pair.germ.is_smooth() {
        return Err(Error::invalid("this predicate is defined for pairs on a smooth threefold germ"));
    }
    Ok(())
}

/// mld 1 at the closed point, computed only by divisors with `ord m = 1`.
pub fn is_semistable_type(pair: &PairSpec, cfg: &MldConfig) -> Result<SemistableReport> {
    require_smooth_threefold(pair)?;
    let rep = mld_at_origin(pair, cfg)?;
    let one = Rational::one();
    let finish = |verdict, bound| SemistableReport { verdict, minimizers: rep.witnesses.clone(), mld: rep.clone(), higher_order_bound: bound };
    match (rep.status, rep.value.as_ref()) {
        (MldStatus::MinusInfinity, _) => return Ok(finish(Verdict::No, None)),
        (MldStatus::UncertifiedAboveBound, Some(v)) if v < &one => return Ok(finish(Verdict::No, None)),
        (MldStatus::UncertifiedAboveBound, _) => return Ok(finish(Verdict::Unknown, None)),
        (MldStatus::Value, Some(v)) if v != &one => return Ok(finish(Verdict::No, None)),
        _ => {}
    }
    let ord_m = |w: &Vec<Rational>| w.iter().min().cloned().unwrap_or_else(Rational::zero);
    if rep.witnesses.iter().any(|w| ord_m(w) != one) {
        return Ok(finish(Verdict::No, None));
    }
    let two = Rational::from_integer(2.into());
    let all: Vec<usize> = (0..3).collect();
    let (lb, _) = optimal(solve_lp(&discrepancy_lp(pair, &all, &[two.clone(), two.clone(), two], SumConstraint::AtLeast(Rational::zero())))?)?;
    let verdict = if lb > one { Verdict::Yes } else { Verdict::Unknown };
    Ok(finish(verdict, Some(lb)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecialReport {
    pub verdict: Verdict,
    pub lc: bool,
    #[serde(with = "serde_rational_opt")]
    pub mld: Option<Rational>,
    pub mld_status: MldStatus,
    pub smallest_lc_centre: Option<Vec<usize>>,
    pub smallest_dimension: Option<usize>,
}

/// lc, mld 1 at the closed point, and a smallest lc centre that is a curve.
pub fn is_special(pair: &PairSpec, cfg: &MldConfig) -> Result<SpecialReport> {
    require_smooth_threefold(pair)?;
    let (m, _) = lc_margin(pair)?;
    if m.is_negative() {
        return Ok(SpecialReport {
            verdict: Verdict::No,
            lc: false,
            mld: None,
            mld_status: MldStatus::MinusInfinity,
            smallest_lc_centre: None,
            smallest_dimension: None,
        });
    }
    let centres = lc_centres(pair, cfg)?;
    let origin = centres.strata.last().expect("closed point stratum").mld.clone();
    let one = Rational::one();
    let mld_ok = match (origin.status, origin.value.as_ref()) {
        (MldStatus::Value, Some(v)) => Verdict::from_bool(v == &one),
        (MldStatus::UncertifiedAboveBound, Some(v)) if v < &one => Verdict::No,
        _ => Verdict::Unknown,
    };
    let centre_ok = Verdict::from_bool(centres.smallest_dimension == Some(1));
    let verdict = match (mld_ok, centre_ok) {
        (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
        (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
        _ => Verdict::Unknown,
    };
    Ok(SpecialReport {
        verdict,
        lc: true,
        mld: origin.value.clone(),
        mld_status: origin.status,
        smallest_lc_centre: centres.smallest.clone(),
        smallest_dimension: centres.smallest_dimension,
    })
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

/// Convenience: a single monomial component.
pub fn monomial_pair(dim: usize, gens: &[&[u32]], exp: Rational) -> Result<PairSpec> {
    let m = MonomialIdeal::from_exponents(dim, gens)?;
    PairSpec::smooth(dim, RIdeal::new(vec![(IdealComponent::Monomial(m), exp)])?)
}
