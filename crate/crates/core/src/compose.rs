//! Composition of two weighted blow-ups of a smooth threefold germ.
//!
//! The tower is the blow-up with weights `(w1, w2, 1)` followed, at the
//! origin of the `x3`-chart with coordinates `z_i = x_i x3^{-w_i}`, by the
//! blow-up with weights `(v1, v2, 1)` in a regular system `(y1, y2, x3)`.
//! When `floor((v1-1)/v2) <= (w1 - v1^2)/w2` the composite divisor is a
//! single weighted blow-up in new coordinates `(x1', x2', x3)`. The engine
//! builds those coordinates by successive corrections, reading every
//! congruence off the graded pieces of `ord_F` in the `(y1, y2, x3)`
//! expansion, and verifies the result with an independent order profile.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::RIdeal;
use crate::poly::{ExponentVector, Polynomial};
use crate::rational::{serde_rational, Rational};
use crate::valuation::{composed_log_discrepancy, log_discrepancy, ComposedValuation, ToricDivisor};

fn default_y1() -> Polynomial {
    Polynomial::var(3, 0)
}

fn default_y2() -> Polynomial {
    Polynomial::var(3, 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionProblem {
    pub w: (u64, u64),
    pub v: (u64, u64),
    /// Second regular system in `(z1, z2, x3)`.
    #[serde(default = "default_y1")]
    pub y1: Polynomial,
    #[serde(default = "default_y2")]
    pub y2: Polynomial,
    /// R-ideal on `A^3` for the crepancy checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<RIdeal>,
}

impl CompositionProblem {
    pub fn monomial(w: (u64, u64), v: (u64, u64)) -> Self {
        CompositionProblem { w, v, y1: default_y1(), y2: default_y2(), ideal: None }
    }

    pub fn new(w: (u64, u64), v: (u64, u64), y1: Polynomial, y2: Polynomial) -> Self {
        CompositionProblem { w, v, y1, y2, ideal: None }
    }

    pub fn with_ideal(mut self, a: RIdeal) -> Self {
        self.ideal = Some(a);
        self
    }

    pub fn valuation(&self) -> Result<ComposedValuation> {
        ComposedValuation::new(self.w, self.v, self.y1.clone(), self.y2.clone())
    }

    fn check_orderings(&self) -> Result<()> {
        let ((w1, w2), (v1, v2)) = (self.w, self.v);
        if w1 == 0 || w2 == 0 || v1 == 0 || v2 == 0 {
            return Err(Error::ZeroWeight);
        }
        if w2 > w1 || v2 > v1 {
            return Err(Error::invalid(format!("expected w2 <= w1 and v2 <= v1, got w={:?}, v={:?}", self.w, self.v)));
        }
        Ok(())
    }
}

/// `floor((v1 - 1)/v2) <= (w1 - v1^2)/w2`, exactly.
pub fn compose_hypothesis(p: &CompositionProblem) -> Result<bool> {
    p.check_orderings()?;
    let ((w1, w2), (v1, v2)) = (p.w, p.v);
    let lhs = Rational::from_integer(((v1 - 1) / v2).into());
    let rhs = Rational::new((w1 as i64 - (v1 * v1) as i64).into(), (w2 as i64).into());
    Ok(lhs <= rhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompositionCase {
    Step2,
    Step3Q2zero,
    Step3General,
    EqualWeights,
}

impl CompositionCase {
    pub fn label(self) -> &'static str {
        match self {
            CompositionCase::Step2 => "step2",
            CompositionCase::Step3Q2zero => "step3-q2zero",
            CompositionCase::Step3General => "step3-general",
            CompositionCase::EqualWeights => "equal-weights",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParallelVerdict {
    Equal,
    StrictlySmaller,
    NotParallel,
}

impl ParallelVerdict {
    pub fn label(self) -> &'static str {
        match self {
            ParallelVerdict::Equal => "equal",
            ParallelVerdict::StrictlySmaller => "strictly-smaller",
            ParallelVerdict::NotParallel => "not-parallel",
        }
    }
}

/// Compares a divisor `E` with order profile `profile` on the coordinates
/// and log discrepancy `discrepancy` against the weighted blow-up `F` with
/// weights `weights`: when the profile is parallel to the weights,
/// `a_F <= a_E` with equality exactly when `E = F`.
pub fn parallel_check(weights: &[u64], profile: &[u64], discrepancy: &Rational) -> Result<ParallelVerdict> {
    if weights.len() != profile.len() {
        return Err(Error::DimensionMismatch { expected: weights.len(), found: profile.len() });
    }
    if weights.iter().all(|&w| w == 0) || profile.iter().all(|&p| p == 0) {
        return Err(Error::ZeroWeight);
    }
    let g = weights.iter().fold(0u64, |a, &b| a.gcd(&b));
    let prim: Vec<u64> = weights.iter().map(|w| w / g).collect();
    let h = profile.iter().fold(0u64, |a, &b| a.gcd(&b));
    let pp: Vec<u64> = profile.iter().map(|p| p / h).collect();
    if prim != pp {
        return Ok(ParallelVerdict::NotParallel);
    }
    let a_f = Rational::from_integer(prim.iter().sum::<u64>().into());
    match a_f.cmp(discrepancy) {
        std::cmp::Ordering::Equal => Ok(ParallelVerdict::Equal),
        std::cmp::Ordering::Less => Ok(ParallelVerdict::StrictlySmaller),
        std::cmp::Ordering::Greater => Err(Error::invariant(format!(
            "a divisor with profile parallel to {weights:?} has log discrepancy {discrepancy} below {a_f}"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    /// `ord_F` of `(x1', x2', x3)`.
    pub profile: [u64; 3],
    /// `a_F(X) = w1 + w2 + v1 + v2 + 1`.
    pub discrepancy: u64,
    pub parallel: ParallelVerdict,
    /// `a_F(X, a)` when an ideal was supplied.
    #[serde(skip_serializing_if = "Option::is_none", with = "crate::rational::serde_rational_opt")]
    pub discrepancy_with_ideal: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompositionResult {
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<CompositionCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x1: Option<Polynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x2: Option<Polynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<[u64; 3]>,
    /// Step 3 used `a' = 1` without an ideal to check crepancy against.
    pub aprime_assumed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl CompositionResult {
    fn not_applicable(reason: String) -> Self {
        CompositionResult {
            applicable: false,
            case: None,
            d: None,
            x1: None,
            x2: None,
            weights: None,
            aprime_assumed: false,
            verification: None,
            reason: Some(reason),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ComposeOptions {
    /// Proceed through the general Step 3 branch without an ideal.
    pub assume_aprime: bool,
    /// Hard cap for the truncation schedule of the composed valuation.
    pub order_cap: Option<u64>,
}

fn x3_pow(e: u64) -> Polynomial {
    Polynomial::monomial(Rational::one(), ExponentVector(vec![0, 0, e as u32]))
}

/// `x * x3^{-k}`, a function on the second stage written through a
/// polynomial in `(x1, x2, x3)`.
#[derive(Clone, Debug)]
struct ZFun {
    x: Polynomial,
    k: u64,
}

/// Graded piece of degree `v`: `(s1, s2, e) -> c` for `c y1^s1 y2^s2 x3^e`,
/// where `e` may be negative.
type Piece = BTreeMap<(u32, u32, i64), Rational>;

impl ZFun {
    fn new(x: Polynomial, k: u64) -> Self {
        ZFun { x, k }
    }

    /// `self - c · other · x3^b`.
    fn sub(&self, other: &ZFun, c: &Rational, b: i64) -> Result<ZFun> {
        // other · x3^b = other.x · x3^{-(other.k - b)}
        let ok = other.k as i64 - b;
        let k = (self.k as i64).max(ok).max(0);
        let lhs = self.x.multiply(&x3_pow((k - self.k as i64) as u64))?;
        let rhs = other.x.multiply(&x3_pow((k - ok) as u64))?.scale(c);
        Ok(ZFun { x: lhs.sub(&rhs)?, k: k as u64 })
    }

    fn pow(&self, a: u32) -> ZFun {
        ZFun { x: self.x.pow(a), k: self.k * a as u64 }
    }

    /// All graded pieces of degree at most `hi`.
    fn pieces(&self, cv: &ComposedValuation, hi: u64) -> Result<BTreeMap<i64, Piece>> {
        let mut out: BTreeMap<i64, Piece> = BTreeMap::new();
        if self.x.is_zero() {
            return Ok(out);
        }
        let (v1, v2) = cv.v();
        let image = cv.pullback_truncated(&self.x, hi + self.k)?;
        for (e, c) in image.terms() {
            let (s1, s2, s3) = (e.0[0], e.0[1], e.0[2] as i64);
            let deg = (v1 * s1 as u64 + v2 * s2 as u64) as i64 + s3 - self.k as i64;
            if deg <= hi as i64 {
                out.entry(deg).or_default().insert((s1, s2, s3 - self.k as i64), c.clone());
            }
        }
        Ok(out)
    }

    fn piece(&self, cv: &ComposedValuation, v: u64) -> Result<Piece> {
        let mut all = self.pieces(cv, v)?;
        if let Some((&low, _)) = all.iter().next() {
            if low < v as i64 {
                return Err(Error::invariant(format!("function expected in n({v}) has a part of degree {low}")));
            }
        }
        Ok(all.remove(&(v as i64)).unwrap_or_default())
    }

    fn vanishes_below(&self, cv: &ComposedValuation, v: u64) -> Result<bool> {
        if v == 0 {
            return Ok(true);
        }
        Ok(self.pieces(cv, v - 1)?.is_empty())
    }
}

/// Leading form `alpha y2 + beta x3^{v2}` of a coordinate of order `v2`.
fn linear_lead(cv: &ComposedValuation, u: &ZFun) -> Result<(Rational, Rational)> {
    let v2 = cv.v().1;
    let piece = u.piece(cv, v2)?;
    let mut alpha = Rational::zero();
    let mut beta = Rational::zero();
    for (&(s1, s2, e), c) in &piece {
        match (s1, s2, e) {
            (0, 1, 0) => alpha = c.clone(),
            (0, 0, e) if e == v2 as i64 => beta = c.clone(),
            _ => return Err(Error::invariant("coordinate of order v2 has a nonlinear leading form")),
        }
    }
    Ok((alpha, beta))
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * Rational::from_integer((n - i).into()) / Rational::from_integer((i + 1).into());
    }
    acc
}

/// Writes a degree-`v` piece (no `y1`) as `sum_a c_a (alpha y2 + beta
/// x3^{v2})^a x3^{v - v2 a}`; returns `(a, c_a)`.
fn solve_piece(piece: &Piece, v: u64, v2: u64, alpha: &Rational, beta: &Rational) -> Result<Vec<(u32, Rational)>> {
    let mut rest: BTreeMap<u32, Rational> = BTreeMap::new();
    for (&(s1, s2, _), c) in piece {
        if s1 > 0 {
            return Err(Error::invariant(format!("y1 appears in degree {v} below v1")));
        }
        rest.insert(s2, c.clone());
    }
    let mut out = Vec::new();
    while let Some((&top, _)) = rest.iter().next_back() {
        let c = rest.remove(&top).unwrap() / num_traits::pow(alpha.clone(), top as usize);
        // subtract c (alpha y2 + beta x3^{v2})^top minus its leading term
        for j in 0..top {
            let coef = &c * binomial(top, j) * num_traits::pow(alpha.clone(), j as usize) * num_traits::pow(beta.clone(), (top - j) as usize);
            if coef.is_zero() {
                continue;
            }
            let entry = rest.entry(j).or_insert_with(Rational::zero);
            *entry -= coef;
            if entry.is_zero() {
                rest.remove(&j);
            }
        }
        out.push((top, c));
    }
    let _ = v2;
    out.sort_by_key(|(a, _)| *a);
    Ok(out)
}

/// Coefficients `c_ab`, `v2 a + b = v` for `lo <= v <= hi`, with
/// `target ≡ sum c_ab u^a x3^b` modulo `n(hi + 1)`.
fn expand_in_basis(cv: &ComposedValuation, target: &ZFun, u: &ZFun, lo: u64, hi: u64) -> Result<Vec<(u32, i64, Rational)>> {
    let v2 = cv.v().1;
    let (alpha, beta) = linear_lead(cv, u)?;
    if alpha.is_zero() {
        return Err(Error::invariant("basis coordinate is dependent on x3^v2"));
    }
    let mut rest = target.clone();
    let mut out = Vec::new();
    for v in lo..=hi {
        let piece = rest.piece(cv, v)?;
        for (a, c) in solve_piece(&piece, v, v2, &alpha, &beta)? {
            let b = v as i64 - (v2 * a as u64) as i64;
            rest = rest.sub(&u.pow(a), &c, b)?;
            out.push((a, b, c));
        }
    }
    if !rest.vanishes_below(cv, hi + 1)? {
        return Err(Error::invariant("basis expansion left a residue"));
    }
    Ok(out)
}

fn exponent(e: i64, what: &str) -> Result<u64> {
    u64::try_from(e).map_err(|_| Error::invariant(format!("negative x3 exponent {e} in {what}")))
}

fn check_crepancy(p: &CompositionProblem, cv: &ComposedValuation, a: &RIdeal) -> Result<Rational> {
    let one = Rational::one();
    let e = ToricDivisor::smooth(&[p.w.0, p.w.1, 1])?;
    let a_e = log_discrepancy(&e, a)?;
    if a_e != one {
        return Err(Error::CrepancyViolated(format!("a_E(X, a) = {a_e}, expected 1")));
    }
    // with a_E(X, a) = 1 the second stage satisfies a_F(Y, a_Y) = a_F(X, a)
    let a_f = composed_log_discrepancy(cv, a)?;
    if a_f != one {
        return Err(Error::CrepancyViolated(format!("a_F(Y, a_Y) = {a_f}, expected 1")));
    }
    Ok(a_f)
}

/// Runs the normalization and returns the weighted blow-up realizing the
/// composite divisor, verified against the composed valuation.
pub fn compose_blowups(p: &CompositionProblem, opts: ComposeOptions) -> Result<CompositionResult> {
    if !compose_hypothesis(p)? {
        let ((w1, w2), (v1, v2)) = (p.w, p.v);
        return Ok(CompositionResult::not_applicable(format!(
            "floor(({v1}-1)/{v2}) = {} exceeds ({w1}-{v1}^2)/{w2}",
            (v1 - 1) / v2
        )));
    }
    let mut cv = p.valuation()?;
    if let Some(cap) = opts.order_cap {
        cv = cv.with_order_cap(cap);
    }
    let with_ideal = match &p.ideal {
        Some(a) => Some(check_crepancy(p, &cv, a)?),
        None => None,
    };
    let ((w1, w2), (v1, v2)) = (p.w, p.v);
    let mut x1 = Polynomial::var(3, 0);
    let mut x2 = Polynomial::var(3, 1);

    // Step 1: remove the pure x3 part of z_i below degree v2
    for (xi, wi) in [(&mut x1, w1), (&mut x2, w2)] {
        let z = ZFun::new(xi.clone(), wi);
        let mut tail = Polynomial::zero(3);
        for (deg, piece) in z.pieces(&cv, v2.saturating_sub(1))? {
            if deg >= v2 as i64 {
                continue;
            }
            for (&(s1, s2, e), c) in &piece {
                if s1 != 0 || s2 != 0 || e < 0 {
                    return Err(Error::invariant("low-degree part of z_i is not a polynomial in x3"));
                }
                tail = tail.add(&Polynomial::monomial(c.clone(), ExponentVector(vec![0, 0, e as u32])))?;
            }
        }
        *xi = xi.sub(&tail.multiply(&x3_pow(wi))?)?;
    }

    let (case, d, aprime_assumed) = if v1 == v2 {
        (CompositionCase::EqualWeights, 0, false)
    } else {
        let (alpha2, beta2) = linear_lead(&cv, &ZFun::new(x2.clone(), w2))?;
        if !alpha2.is_zero() {
            // Step 2: z1 ≡ q1(z2, x3) modulo n(v1)
            let coeffs = expand_in_basis(&cv, &ZFun::new(x1.clone(), w1), &ZFun::new(x2.clone(), w2), v2, v1 - 1)?;
            for (a, b, c) in coeffs {
                let e = exponent(w1 as i64 - (w2 * a as u64) as i64 + b, "the Step 2 correction")?;
                x1 = x1.sub(&x2.pow(a).multiply(&x3_pow(e))?.scale(&c))?;
            }
            (CompositionCase::Step2, 0, false)
        } else {
            // Step 3: z2 ≡ beta x3^{v2}; then z2 ≡ q2(z1, x3) modulo n(v1)
            x2 = x2.sub(&x3_pow(w2 + v2).scale(&beta2))?;
            let coeffs = if v2 < v1 - 1 {
                expand_in_basis(&cv, &ZFun::new(x2.clone(), w2), &ZFun::new(x1.clone(), w1), v2 + 1, v1 - 1)?
            } else {
                Vec::new()
            };
            let mut pure = Polynomial::zero(3);
            for (a, b, c) in coeffs.iter().filter(|(a, _, _)| *a == 0) {
                let _ = a;
                pure = pure.add(&x3_pow(exponent(*b, "q2")?).scale(c))?;
            }
            x2 = x2.sub(&pure.multiply(&x3_pow(w2))?)?;
            let rest: Vec<&(u32, i64, Rational)> = coeffs.iter().filter(|(a, _, _)| *a > 0).collect();
            if rest.is_empty() {
                (CompositionCase::Step3Q2zero, v1 - v2, false)
            } else {
                let v2p = rest.iter().map(|(a, b, _)| (v2 * *a as u64) as i64 + b).min().unwrap();
                let aprime = rest
                    .iter()
                    .filter(|(a, b, _)| (v2 * *a as u64) as i64 + b == v2p)
                    .map(|(a, _, _)| *a)
                    .max()
                    .unwrap();
                if aprime != 1 {
                    return Err(Error::CrepancyViolated(format!("a' = {aprime}; the tower is not crepant for any ideal")));
                }
                if p.ideal.is_none() && !opts.assume_aprime {
                    return Err(Error::Uncertified(
                        "the general Step 3 branch needs an ideal for the crepancy check, or the a' = 1 assumption".into(),
                    ));
                }
                let v2p = v2p as u64;
                let d = v2p - v2;
                let c1d = rest
                    .iter()
                    .find(|(a, b, _)| *a == 1 && *b == d as i64)
                    .map(|(_, _, c)| c.clone())
                    .ok_or_else(|| Error::invariant("missing linear coefficient"))?;
                // Step 4
                x1 = x1.scale(&c1d);
                let mut x1v = x1.sub(&x2.multiply(&x3_pow(exponent(w1 as i64 - w2 as i64 - d as i64, "Step 4")?))?)?;
                let u = ZFun::new(x1.clone(), w1);
                let (alpha, beta) = linear_lead(&cv, &u)?;
                for v in v2p + 1..v1 {
                    let z = ZFun::new(x1v.clone(), w1 - d);
                    let piece = z.piece(&cv, v)?;
                    for (a, c) in solve_piece(&piece, v, v2, &alpha, &beta)? {
                        let b = v as i64 - (v2 * a as u64) as i64;
                        let e = w1 as i64 - (w2 * a as u64) as i64 - (d * (a as u64 + 1)) as i64 + b;
                        let e = exponent(e, "the Step 4 correction")?;
                        x1v = x1v.sub(&x2.pow(a).multiply(&x3_pow(e))?.scale(&c))?;
                    }
                }
                x1 = x1v;
                (CompositionCase::Step3General, d, p.ideal.is_none())
            }
        }
    };

    let weights = [w1 + v1 - d, w2 + v2 + d, 1];
    let profile = [cv.composed_ord(&x1)?, cv.composed_ord(&x2)?, cv.composed_ord(&Polynomial::var(3, 2))?];
    if profile != weights {
        return Err(Error::invariant(format!("constructed system has profile {profile:?}, expected {weights:?}")));
    }
    check_regular_system(&x1, &x2)?;
    let discrepancy = cv.discrepancy_base();
    let parallel = parallel_check(&weights, &profile, &Rational::from_integer(discrepancy.into()))?;
    if parallel != ParallelVerdict::Equal {
        return Err(Error::invariant("composite divisor differs from the weighted blow-up"));
    }
    Ok(CompositionResult {
        applicable: true,
        case: Some(case),
        d: Some(d),
        x1: Some(x1),
        x2: Some(x2),
        weights: Some(weights),
        aprime_assumed,
        verification: Some(Verification { profile, discrepancy, parallel, discrepancy_with_ideal: with_ideal }),
        reason: None,
    })
}

fn check_regular_system(x1: &Polynomial, x2: &Polynomial) -> Result<()> {
    let lin = |f: &Polynomial, i: usize| f.coefficient(&ExponentVector::unit(3, i));
    let det = lin(x1, 0) * lin(x2, 1) - lin(x1, 1) * lin(x2, 0);
    if det.is_zero() {
        return Err(Error::invariant("constructed coordinates are not a regular system"));
    }
    Ok(())
}

/// Serialized view of the engine outcome for a whole corpus entry.
#[derive(Clone, Debug, Serialize)]
pub struct CorpusRow {
    pub problem: CompositionProblem,
    pub result: CompositionResult,
    #[serde(with = "serde_rational")]
    pub weight_sum: Rational,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::{IdealComponent, MonomialIdeal};
    use crate::rational::int;

    fn var(i: usize) -> Polynomial {
        Polynomial::var(3, i)
    }

    fn mono(e: [u32; 3], c: i64) -> Polynomial {
        Polynomial::monomial(int(c), ExponentVector(e.to_vec()))
    }

    #[test]
    fn hypothesis_examples() {
        assert!(compose_hypothesis(&CompositionProblem::monomial((7, 2), (2, 1))).unwrap());
        assert!(!compose_hypothesis(&CompositionProblem::monomial((3, 2), (5, 2))).unwrap());
        assert!(compose_hypothesis(&CompositionProblem::monomial((9, 1), (2, 2))).unwrap());
        assert!(compose_hypothesis(&CompositionProblem::monomial((2, 3), (1, 1))).is_err());
    }

    #[test]
    fn monomial_tower() {
        let r = compose_blowups(&CompositionProblem::monomial((7, 2), (2, 1)), ComposeOptions::default()).unwrap();
        assert_eq!(r.case, Some(CompositionCase::Step2));
        assert_eq!(r.d, Some(0));
        assert_eq!(r.weights, Some([9, 3, 1]));
        assert_eq!(r.x1, Some(var(0)));
        assert_eq!(r.x2, Some(var(1)));
        assert_eq!(r.verification.unwrap().profile, [9, 3, 1]);
    }

    #[test]
    fn translated_second_system() {
        let y2 = var(1).sub(&mono([0, 0, 1], 5)).unwrap();
        let p = CompositionProblem::new((7, 2), (2, 1), var(0), y2);
        let r = compose_blowups(&p, ComposeOptions::default()).unwrap();
        assert_eq!(r.case, Some(CompositionCase::Step2));
        assert_eq!(r.weights, Some([9, 3, 1]));
    }

    #[test]
    fn equal_weights() {
        let r = compose_blowups(&CompositionProblem::monomial((9, 1), (2, 2)), ComposeOptions::default()).unwrap();
        assert_eq!(r.case, Some(CompositionCase::EqualWeights));
        assert_eq!(r.weights, Some([11, 3, 1]));
    }

    #[test]
    fn step_one_fires_on_a_low_order_tail() {
        // y2 = z2 - x3 with v2 = 2: z2 has the x3 term below order v2
        let y2 = var(1).sub(&mono([0, 0, 1], 1)).unwrap();
        let p = CompositionProblem::new((9, 1), (2, 2), var(0), y2);
        let r = compose_blowups(&p, ComposeOptions::default()).unwrap();
        assert_eq!(r.weights, Some([11, 3, 1]));
        assert_eq!(r.x2, Some(var(1).sub(&mono([0, 0, 2], 1)).unwrap()));
    }

    #[test]
    fn swapped_system_reaches_step_three() {
        // y1 = z2, y2 = z1: z2 has order v1 and q2 = 0
        let p = CompositionProblem::new((12, 1), (3, 1), var(1), var(0));
        let r = compose_blowups(&p, ComposeOptions::default()).unwrap();
        assert_eq!(r.case, Some(CompositionCase::Step3Q2zero));
        assert_eq!(r.d, Some(2));
        assert_eq!(r.weights, Some([13, 4, 1]));
    }

    #[test]
    fn general_step_three() {
        // y1 = z2 - z1 x3, y2 = z1: z2 ≡ z1 x3 so v2' = 2, d = 1
        let y1 = var(1).sub(&mono([1, 0, 1], 1)).unwrap();
        let p = CompositionProblem::new((11, 1), (3, 1), y1, var(0));
        assert!(matches!(compose_blowups(&p, ComposeOptions::default()), Err(Error::Uncertified(_))));
        let r = compose_blowups(&p, ComposeOptions { assume_aprime: true, order_cap: None }).unwrap();
        assert_eq!(r.case, Some(CompositionCase::Step3General));
        assert_eq!(r.d, Some(1));
        assert_eq!(r.weights, Some([13, 3, 1]));
        assert_eq!(r.x1, Some(var(0).sub(&mono([0, 1, 9], 1)).unwrap()));
        assert!(r.aprime_assumed);
    }

    #[test]
    fn quadratic_q2_is_not_crepant() {
        let y1 = var(1).sub(&mono([2, 0, 0], 1)).unwrap();
        let p = CompositionProblem::new((19, 1), (4, 1), y1, var(0));
        assert!(matches!(compose_blowups(&p, ComposeOptions { assume_aprime: true, order_cap: None }), Err(Error::CrepancyViolated(_))));
    }

    #[test]
    fn inapplicable_configuration() {
        let y1 = var(0).add(&mono([0, 2, 0], 1)).unwrap();
        let p = CompositionProblem::new((3, 2), (5, 2), y1, var(1));
        let r = compose_blowups(&p, ComposeOptions::default()).unwrap();
        assert!(!r.applicable);
    }

    #[test]
    fn crepancy_is_checked_with_an_ideal() {
        // (x1, x2^4)^{1/...}: take a with a_E(X, a) = 1 on (7,2,1): ord = 9
        let a = RIdeal::new(vec![(
            IdealComponent::Monomial(MonomialIdeal::from_exponents(3, &[&[1, 0, 0], &[0, 4, 0]]).unwrap()),
            Rational::new(9.into(), 7.into()),
        )])
        .unwrap();
        let p = CompositionProblem::monomial((7, 2), (2, 1)).with_ideal(a);
        assert!(matches!(compose_blowups(&p, ComposeOptions::default()), Err(Error::CrepancyViolated(_))));
    }

    #[test]
    fn parallel_examples() {
        assert_eq!(parallel_check(&[9, 3, 1], &[9, 3, 1], &int(13)).unwrap(), ParallelVerdict::Equal);
        assert_eq!(parallel_check(&[7, 4, 1], &[7, 4, 1], &int(13)).unwrap(), ParallelVerdict::StrictlySmaller);
        assert_eq!(parallel_check(&[2, 1, 1], &[4, 2, 2], &int(4)).unwrap(), ParallelVerdict::Equal);
        assert_eq!(parallel_check(&[2, 1, 1], &[3, 2, 1], &int(6)).unwrap(), ParallelVerdict::NotParallel);
    }

    #[test]
    fn cusp_tower_is_not_a_weighted_blow_up() {
        let y1 = var(0).add(&mono([0, 2, 0], 1)).unwrap();
        let cv = ComposedValuation::new((3, 2), (5, 2), y1, var(1)).unwrap();
        let profile = cv.coordinate_profile().unwrap();
        assert_eq!(profile, [7, 4, 1]);
        let ld = Rational::from_integer(cv.discrepancy_base().into());
        assert_eq!(ld, int(13));
        assert_eq!(parallel_check(&profile, &profile, &ld).unwrap(), ParallelVerdict::StrictlySmaller);
    }
}
