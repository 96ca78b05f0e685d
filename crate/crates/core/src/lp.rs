//! Exact simplex over the rationals with mandatory certificates.
//!
//! Programs have the shape `minimize c·x  s.t.  a_i·x >= b_i`, with an
//! optional lower bound per variable (variables without one are free). The
//! solver converts to standard form, runs a two-phase tableau simplex with
//! Bland's rule and reads primal, dual, ray and Farkas data off the final
//! tableau. Every outcome is re-verified before it is returned.

use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rational::{serde_rational, serde_rational_vec, Rational};

static LPS_SOLVED: AtomicU64 = AtomicU64::new(0);
static CERTIFICATE_FAILURES: AtomicU64 = AtomicU64::new(0);

/// Process-wide counters of solved programs and certificates that failed to
/// re-verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LpStats {
    pub solved: u64,
    pub certificate_failures: u64,
}

pub fn lp_stats() -> LpStats {
    LpStats {
        solved: LPS_SOLVED.load(Ordering::Relaxed),
        certificate_failures: CERTIFICATE_FAILURES.load(Ordering::Relaxed),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    #[serde(with = "serde_rational_vec")]
    pub coeffs: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Constraint { coeffs, rhs }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    #[serde(with = "serde_rational_vec")]
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    #[serde(with = "bounds_serde")]
    pub lower_bounds: Vec<Option<Rational>>,
}

mod bounds_serde {
    use super::*;
    use crate::rational::parse_rational;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Option<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<Option<String>> = v.iter().map(|b| b.as_ref().map(|q| q.to_string())).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Option<Rational>>, D::Error> {
        let raw = Vec::<Option<String>>::deserialize(d)?;
        raw.into_iter()
            .map(|b| b.map(|s| parse_rational(&s)).transpose().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl LinearProgram {
    /// A program in `n` variables, all bounded below by zero.
    pub fn nonnegative(objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram { objective, constraints: Vec::new(), lower_bounds: vec![Some(Rational::zero()); n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, rhs });
    }

    /// Adds `a·x = b` as a pair of inequalities.
    pub fn push_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        let neg: Vec<Rational> = coeffs.iter().map(|c| -c).collect();
        self.push(coeffs, rhs.clone());
        self.push(neg, -rhs);
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        check_dim(n, self.lower_bounds.len())?;
        for c in &self.constraints {
            check_dim(n, c.coeffs.len())?;
        }
        Ok(())
    }

    fn row_value(&self, i: usize, x: &[Rational]) -> Rational {
        dotq(&self.constraints[i].coeffs, x)
    }

    /// `A^T y` as a vector indexed by variables.
    fn transpose_times(&self, y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.num_vars()];
        for (c, yi) in self.constraints.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(&c.coeffs) {
                *o += a * yi;
            }
        }
        out
    }

    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.lower_bounds.iter().zip(x).all(|(l, v)| l.as_ref().is_none_or(|l| v >= l))
            && (0..self.constraints.len()).all(|i| self.row_value(i, x) >= self.constraints[i].rhs)
    }
}

fn dotq(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (p, q)| acc + p * q)
}

/// Dual data: `y` for the rows, `z` for the variable bounds (zero on free
/// variables).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    #[serde(with = "serde_rational_vec")]
    pub y: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub z: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum LpOutcome {
    Optimal {
        #[serde(with = "serde_rational")]
        value: Rational,
        #[serde(with = "serde_rational_vec")]
        point: Vec<Rational>,
        dual: DualCertificate,
    },
    Unbounded {
        #[serde(with = "serde_rational_vec")]
        point: Vec<Rational>,
        #[serde(with = "serde_rational_vec")]
        ray: Vec<Rational>,
    },
    /// `y, z >= 0` with `A^T y + z = 0` and `b·y + l·z > 0`.
    Infeasible { farkas: DualCertificate },
}

impl LpOutcome {
    pub fn optimal_value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } | LpOutcome::Unbounded { point, .. } => Some(point),
            LpOutcome::Infeasible { .. } => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            LpOutcome::Optimal { .. } => "optimal",
            LpOutcome::Unbounded { .. } => "unbounded",
            LpOutcome::Infeasible { .. } => "infeasible",
        }
    }

    /// Checks the attached certificate against `lp` by exact arithmetic.
    pub fn verify(&self, lp: &LinearProgram) -> Result<()> {
        lp.validate()?;
        let n = lp.num_vars();
        let m = lp.constraints.len();
        let fail = |msg: &str| Err(Error::invariant(format!("LP certificate: {msg}")));
        match self {
            LpOutcome::Optimal { value, point, dual } => {
                if point.len() != n || dual.y.len() != m || dual.z.len() != n {
                    return fail("wrong certificate dimensions");
                }
                if !lp.is_feasible_point(point) {
                    return fail("primal point infeasible");
                }
                if &dotq(&lp.objective, point) != value {
                    return fail("objective value mismatch");
                }
                if dual.y.iter().any(|y| y.is_negative()) {
                    return fail("negative row multiplier");
                }
                let aty = lp.transpose_times(&dual.y);
                let mut dual_value = dotq(&dual.y, &lp.constraints.iter().map(|c| c.rhs.clone()).collect::<Vec<_>>());
                for j in 0..n {
                    if aty[j].clone() + &dual.z[j] != lp.objective[j] {
                        return fail("dual equation fails");
                    }
                    match &lp.lower_bounds[j] {
                        Some(l) => {
                            if dual.z[j].is_negative() {
                                return fail("negative bound multiplier");
                            }
                            dual_value += l * &dual.z[j];
                        }
                        None => {
                            if !dual.z[j].is_zero() {
                                return fail("free variable with bound multiplier");
                            }
                        }
                    }
                }
                if &dual_value != value {
                    return fail("duality gap");
                }
                Ok(())
            }
            LpOutcome::Unbounded { point, ray } => {
                if point.len() != n || ray.len() != n {
                    return fail("wrong ray dimensions");
                }
                if !lp.is_feasible_point(point) {
                    return fail("base point infeasible");
                }
                for (l, r) in lp.lower_bounds.iter().zip(ray) {
                    if l.is_some() && r.is_negative() {
                        return fail("ray leaves a variable bound");
                    }
                }
                if lp.constraints.iter().any(|c| dotq(&c.coeffs, ray).is_negative()) {
                    return fail("ray leaves a constraint");
                }
                if !dotq(&lp.objective, ray).is_negative() {
                    return fail("ray does not improve the objective");
                }
                Ok(())
            }
            LpOutcome::Infeasible { farkas } => {
                if farkas.y.len() != m || farkas.z.len() != n {
                    return fail("wrong Farkas dimensions");
                }
                if farkas.y.iter().chain(&farkas.z).any(|v| v.is_negative()) {
                    return fail("negative Farkas multiplier");
                }
                let aty = lp.transpose_times(&farkas.y);
                let mut total = Rational::zero();
                for (i, c) in lp.constraints.iter().enumerate() {
                    total += &c.rhs * &farkas.y[i];
                }
                for j in 0..n {
                    if !(aty[j].clone() + &farkas.z[j]).is_zero() {
                        return fail("Farkas combination is not zero");
                    }
                    match &lp.lower_bounds[j] {
                        Some(l) => total += l * &farkas.z[j],
                        None => {
                            if !farkas.z[j].is_zero() {
                                return fail("free variable in Farkas bound part");
                            }
                        }
                    }
                }
                if !total.is_positive() {
                    return fail("Farkas right-hand side not positive");
                }
                Ok(())
            }
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Original row index of each tableau row.
    origin: Vec<usize>,
}

enum SimplexEnd {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                *v /= &p;
            }
            self.rhs[r] /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, cost: &[Rational], j: usize) -> Rational {
        let mut v = cost[j].clone();
        for (i, b) in self.basis.iter().enumerate() {
            if !cost[*b].is_zero() && !self.rows[i][j].is_zero() {
                v -= &cost[*b] * &self.rows[i][j];
            }
        }
        v
    }

    /// Bland's rule: smallest improving column enters, ties in the ratio test
    /// go to the smallest basic index.
    fn run(&mut self, cost: &[Rational], allowed: usize) -> Result<SimplexEnd> {
        let cap = 100_000usize;
        for _ in 0..cap {
            let entering = (0..allowed).find(|&j| !self.basis.contains(&j) && self.reduced_cost(cost, j).is_negative());
            let Some(e) = entering else {
                return Ok(SimplexEnd::Optimal);
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return Ok(SimplexEnd::Unbounded(e)),
                Some((r, _)) => self.pivot(r, e),
            }
        }
        Err(Error::invariant("simplex iteration cap reached"))
    }

    /// Multipliers `c_B^T B^{-1}` read off the artificial block.
    fn multipliers(&self, cost: &[Rational], art_start: usize, m: usize) -> Vec<Rational> {
        (0..m)
            .map(|k| {
                let mut v = Rational::zero();
                for (i, b) in self.basis.iter().enumerate() {
                    if !cost[*b].is_zero() {
                        v += &cost[*b] * &self.rows[i][art_start + k];
                    }
                }
                v
            })
            .collect()
    }
}

/// Solves `lp` exactly and re-verifies the returned certificate.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    LPS_SOLVED.fetch_add(1, Ordering::Relaxed);
    let outcome = simplex(lp)?;
    if let Err(e) = outcome.verify(lp) {
        CERTIFICATE_FAILURES.fetch_add(1, Ordering::Relaxed);
        return Err(e);
    }
    Ok(outcome)
}

fn simplex(lp: &LinearProgram) -> Result<LpOutcome> {
    let n = lp.num_vars();
    let m = lp.constraints.len();

    // structural columns: (variable, sign)
    let mut cols: Vec<(usize, bool)> = Vec::new();
    for j in 0..n {
        cols.push((j, true));
        if lp.lower_bounds[j].is_none() {
            cols.push((j, false));
        }
    }
    let ns = cols.len();
    let surplus = ns;
    let art = ns + m;
    let width = ns + 2 * m;

    let shift: Vec<Rational> = lp.lower_bounds.iter().map(|l| l.clone().unwrap_or_else(Rational::zero)).collect();
    let mut sigma = vec![true; m];
    let mut tab = Tableau { rows: Vec::with_capacity(m), rhs: Vec::with_capacity(m), basis: Vec::with_capacity(m), origin: (0..m).collect() };
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); width];
        for (k, &(j, pos)) in cols.iter().enumerate() {
            row[k] = if pos { c.coeffs[j].clone() } else { -&c.coeffs[j] };
        }
        row[surplus + i] = -Rational::one();
        let mut b = c.rhs.clone() - dotq(&c.coeffs, &shift);
        if b.is_negative() {
            sigma[i] = false;
            for v in row.iter_mut() {
                *v = -&*v;
            }
            b = -b;
        }
        row[art + i] = Rational::one();
        tab.rows.push(row);
        tab.rhs.push(b);
        tab.basis.push(art + i);
    }

    // phase 1
    let mut cost1 = vec![Rational::zero(); width];
    for c in cost1.iter_mut().skip(art) {
        *c = Rational::one();
    }
    tab.run(&cost1, width)?;
    let infeasibility: Rational = tab
        .basis
        .iter()
        .zip(&tab.rhs)
        .filter(|(b, _)| **b >= art)
        .fold(Rational::zero(), |acc, (_, v)| acc + v);
    if infeasibility.is_positive() {
        let y1 = tab.multipliers(&cost1, art, m);
        let y: Vec<Rational> = y1.iter().zip(&sigma).map(|(v, &s)| if s { v.clone() } else { -v }).collect();
        let aty = lp.transpose_times(&y);
        let z = (0..n)
            .map(|j| if lp.lower_bounds[j].is_some() { -&aty[j] } else { Rational::zero() })
            .collect();
        return Ok(LpOutcome::Infeasible { farkas: DualCertificate { y, z } });
    }

    // drive remaining artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= art {
            match (0..art).find(|&j| !tab.rows[r][j].is_zero()) {
                Some(j) => tab.pivot(r, j),
                None => {
                    tab.rows.remove(r);
                    tab.rhs.remove(r);
                    tab.basis.remove(r);
                    tab.origin.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // phase 2
    let mut cost2 = vec![Rational::zero(); width];
    for (k, &(j, pos)) in cols.iter().enumerate() {
        cost2[k] = if pos { lp.objective[j].clone() } else { -&lp.objective[j] };
    }
    let end = tab.run(&cost2, art)?;

    let mut xs = vec![Rational::zero(); width];
    for (i, b) in tab.basis.iter().enumerate() {
        xs[*b] = tab.rhs[i].clone();
    }
    let point = assemble(&cols, &xs, &shift, n);

    match end {
        SimplexEnd::Optimal => {
            let ystd = tab.multipliers(&cost2, art, m);
            let y: Vec<Rational> = ystd.iter().zip(&sigma).map(|(v, &s)| if s { v.clone() } else { -v }).collect();
            let aty = lp.transpose_times(&y);
            let z = (0..n).map(|j| &lp.objective[j] - &aty[j]).collect();
            let value = dotq(&lp.objective, &point);
            Ok(LpOutcome::Optimal { value, point, dual: DualCertificate { y, z } })
        }
        SimplexEnd::Unbounded(e) => {
            let mut ds = vec![Rational::zero(); width];
            ds[e] = Rational::one();
            for (i, b) in tab.basis.iter().enumerate() {
                ds[*b] = -&tab.rows[i][e];
            }
            let zero = vec![Rational::zero(); n];
            let ray = assemble(&cols, &ds, &zero, n);
            Ok(LpOutcome::Unbounded { point, ray })
        }
    }
}

fn assemble(cols: &[(usize, bool)], xs: &[Rational], shift: &[Rational], n: usize) -> Vec<Rational> {
    let mut x = shift.to_vec();
    for (k, &(j, pos)) in cols.iter().enumerate() {
        if pos {
            x[j] += &xs[k];
        } else {
            x[j] -= &xs[k];
        }
    }
    debug_assert_eq!(x.len(), n);
    x
}

/// An affine function `coeffs·w + constant`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePiece {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

/// Minimizes `max_j piece_j(w)` over the domain given by `domain`'s
/// constraints and bounds (its objective is ignored). The returned outcome
/// belongs to the program in variables `(w, t)`.
pub fn min_convex_pl(pieces: &[AffinePiece], domain: &LinearProgram) -> Result<(LinearProgram, LpOutcome)> {
    if pieces.is_empty() {
        return Err(Error::invalid("min_convex_pl needs at least one piece"));
    }
    let n = domain.num_vars();
    for p in pieces {
        check_dim(n, p.coeffs.len())?;
    }
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = Rational::one();
    let mut lower_bounds = domain.lower_bounds.clone();
    lower_bounds.push(None);
    let mut lp = LinearProgram { objective, constraints: Vec::new(), lower_bounds };
    for c in &domain.constraints {
        let mut coeffs = c.coeffs.clone();
        coeffs.push(Rational::zero());
        lp.push(coeffs, c.rhs.clone());
    }
    for p in pieces {
        let mut coeffs: Vec<Rational> = p.coeffs.iter().map(|c| -c).collect();
        coeffs.push(Rational::one());
        lp.push(coeffs, p.constant.clone());
    }
    let out = solve_lp(&lp)?;
    Ok((lp, out))
}
