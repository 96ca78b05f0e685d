//! Frozen reference values, checked end to end through the public API.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::blowup::{charts, classify_contraction, BlowUpSpec};
use crate::compose::{compose_blowups, compose_hypothesis, parallel_check, ComposeOptions, CompositionCase, CompositionProblem, ParallelVerdict};
use crate::error::Result;
use crate::germ::CyclicQuotientGerm;
use crate::ideal::{MonomialIdeal, RIdeal};
use crate::poly::{ExponentVector, Polynomial};
use crate::rational::{frac, int, Rational};
use crate::slopes::{detect_lc_slope, enumerate_pn, mediant_combine, SlopePair};
use crate::truncation::{s_decomposition, truncation_ideal};
use crate::valuation::{invert_regular_system, log_discrepancy, substitute_truncated, ComposedValuation, ToricDivisor};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoldenItem {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoldenReport {
    pub items: Vec<GoldenItem>,
}

impl GoldenReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

fn mono(c: i64, e: [u32; 3]) -> Polynomial {
    Polynomial::monomial(int(c), ExponentVector(e.to_vec()))
}

fn var(i: usize) -> Polynomial {
    Polynomial::var(3, i)
}

fn germ(r: u64, a: [i64; 3]) -> CyclicQuotientGerm {
    CyclicQuotientGerm::new(r, &a).expect("valid reference germ")
}

fn same_types(found: &[CyclicQuotientGerm], expected: &[CyclicQuotientGerm]) -> bool {
    found.len() == expected.len() && expected.iter().all(|e| found.iter().any(|f| f.equivalent(e)))
}

/// The cusp tower `w = (3,2)`, `(y1, y2) = (z1 + z2^2, z2)`, `v = (5,2)`.
pub fn cusp_tower() -> CompositionProblem {
    CompositionProblem::new((3, 2), (5, 2), var(0).add(&mono(1, [0, 2, 0])).expect("same dimension"), var(1))
}

type Check = (&'static str, fn() -> Result<(bool, String)>);

fn checks() -> Vec<Check> {
    vec![
        ("chart substitution", || {
            let images = [mono(1, [1, 0, 3]), mono(1, [0, 1, 2]), var(2)];
            let out = substitute_truncated(&var(0), &images, &[5, 2, 1], 20)?;
            Ok((out == mono(1, [1, 0, 3]), out.to_string()))
        }),
        ("cusp system inversion", || {
            let (z1, z2) = invert_regular_system(&var(0).add(&mono(1, [0, 2, 0]))?, &var(1), (5, 2), 30)?;
            let ok = z1 == var(0).sub(&mono(1, [0, 2, 0]))? && z2 == var(1);
            Ok((ok, format!("z1 = {z1}, z2 = {z2}")))
        }),
        ("cusp tower orders", || {
            let p = cusp_tower().valuation()?.coordinate_profile()?;
            Ok((p == [7, 4, 1], format!("{p:?}")))
        }),
        ("cusp tower log discrepancy", || {
            let cv: ComposedValuation = cusp_tower().valuation()?;
            let a = cv.discrepancy_base();
            Ok((a == 13, a.to_string()))
        }),
        ("cusp tower hypothesis", || {
            let h = compose_hypothesis(&cusp_tower())?;
            Ok((!h, h.to_string()))
        }),
        ("cusp tower is not a weighted blow-up", || {
            let cv = cusp_tower().valuation()?;
            let profile = cv.coordinate_profile()?;
            let v = parallel_check(&[7, 4, 1], &profile, &Rational::from_integer(cv.discrepancy_base().into()))?;
            Ok((v == ParallelVerdict::StrictlySmaller, v.label().into()))
        }),
        ("equal second weights", || {
            let r = compose_blowups(&CompositionProblem::monomial((9, 1), (2, 2)), ComposeOptions::default())?;
            let ok = r.case == Some(CompositionCase::EqualWeights) && r.weights == Some([11, 3, 1]);
            Ok((ok, format!("{} {:?}", r.case.map_or("none", |c| c.label()), r.weights.unwrap_or_default())))
        }),
        ("smooth weighted blow-up discrepancy", || {
            let a = log_discrepancy(&ToricDivisor::smooth(&[3, 2, 1])?, &RIdeal::trivial())?;
            Ok((a == int(6), a.to_string()))
        }),
        ("lc slope as a zero discrepancy", || {
            let cusp = RIdeal::monomial(MonomialIdeal::from_exponents(3, &[&[2, 0, 0], &[0, 3, 0]])?, frac(5, 6))?;
            let e = ToricDivisor::new(CyclicQuotientGerm::smooth(3), vec![int(3), int(2), Rational::zero()])?;
            let a = log_discrepancy(&e, &cusp)?;
            let slope = detect_lc_slope(&cusp, SlopePair::new(3, 2)?)?;
            Ok((a.is_zero() && slope, format!("a = {a}, slope = {slope}")))
        }),
        ("terminal quotient discrepancy", || {
            let e = ToricDivisor::new(germ(5, [2, -2, 1]), vec![frac(2, 5), frac(3, 5), frac(1, 5)])?;
            let a = log_discrepancy(&e, &RIdeal::trivial())?;
            Ok((a == frac(6, 5), a.to_string()))
        }),
        ("smooth chart types", || {
            let atlas = charts(&BlowUpSpec::smooth(&[3, 2, 1])?)?;
            let found: Vec<CyclicQuotientGerm> = atlas.singular_types().into_iter().cloned().collect();
            let ok = same_types(&found, &[germ(3, [-1, 2, 1]), germ(2, [3, -1, 1])]) && atlas.chart(2)?.smooth;
            Ok((ok, found.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")))
        }),
        ("quotient chart types", || {
            let spec = BlowUpSpec::new(germ(5, [2, -2, 1]), vec![frac(2, 5), frac(3, 5), frac(1, 5)])?;
            let found: Vec<CyclicQuotientGerm> = charts(&spec)?.singular_types().into_iter().cloned().collect();
            let ok = same_types(&found, &[germ(2, [-5, 5, 1]), germ(3, [5, -5, 1])]);
            Ok((ok, found.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")))
        }),
        ("quotient contraction", || {
            let rec = classify_contraction(&germ(5, [2, 3, 1]), None)?;
            let ok = rec.is_contraction
                && rec.discrepancy == frac(6, 5)
                && same_types(&rec.singular_germs, &[germ(2, [-5, 5, 1]), germ(3, [5, -5, 1])]);
            Ok((ok, format!("a = {}, {}", rec.discrepancy, rec.singularities.join(", "))))
        }),
        ("smooth contraction", || {
            let rec = classify_contraction(&CyclicQuotientGerm::smooth(3), Some((3, 2)))?;
            let ok = rec.is_contraction
                && rec.discrepancy == int(6)
                && same_types(&rec.singular_germs, &[germ(3, [-1, 2, 1]), germ(2, [3, -1, 1])]);
            Ok((ok, format!("a = {}, {}", rec.discrepancy, rec.singularities.join(", "))))
        }),
        ("common factor is not a contraction", || {
            let rec = classify_contraction(&CyclicQuotientGerm::smooth(3), Some((4, 2)))?;
            Ok((!rec.is_contraction, rec.reason.unwrap_or_default()))
        }),
        ("truncation generator degrees", || {
            let mut ok = true;
            for (w1, w2, n) in [(3u64, 2u64, 2u64), (5, 3, 1), (4, 1, 3)] {
                let lo = (w1 + w2) * n;
                for g in truncation_ideal(w1, w2, n)?.gens() {
                    let deg = w1 * g.0[0] as u64 + w2 * g.0[1] as u64 + g.0[2] as u64;
                    ok &= lo <= deg && deg < lo + w1;
                }
            }
            Ok((ok, String::new()))
        }),
        ("diagonal point on the zero line", || {
            let mut ok = true;
            for (w1, w2, n) in [(3u64, 2u64, 2u64), (5, 3, 1), (4, 1, 3), (7, 5, 4)] {
                let s = s_decomposition(w1, w2, n)?;
                ok &= s.minus_zero().any(|p| p.s1 as u64 == n && p.s2 as u64 == n);
            }
            Ok((ok, String::new()))
        }),
        ("P_3", || {
            let p: Vec<(u64, u64)> = enumerate_pn(3)?.iter().map(|p| (p.w1, p.w2)).collect();
            Ok((p == [(1, 1), (3, 2), (2, 1), (3, 1)], format!("{p:?}")))
        }),
        ("lc slopes combine", || {
            let a = RIdeal::monomial(MonomialIdeal::from_exponents(3, &[&[1, 0, 0]])?, Rational::one())?
                .product(&RIdeal::monomial(MonomialIdeal::from_exponents(3, &[&[1, 0, 0], &[0, 2, 0]])?, frac(1, 2))?)?;
            let (p1, p2) = (SlopePair::new(2, 1)?, SlopePair::new(3, 1)?);
            let c = mediant_combine(p1, p2, &Rational::one(), &Rational::one())?;
            let ord = |p: SlopePair| a.weighted_order(&p.weights());
            let ok = detect_lc_slope(&a, p1)?
                && detect_lc_slope(&a, p2)?
                && ord(c.pair)? >= ord(p1)? + ord(p2)?
                && detect_lc_slope(&a, c.pair)?;
            Ok((ok, c.pair.to_string()))
        }),
    ]
}

/// Runs every reference check; failures and errors become report entries.
pub fn verify_paper_examples() -> GoldenReport {
    let items = checks()
        .into_iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => GoldenItem { name, passed, detail },
            Err(e) => GoldenItem { name, passed: false, detail: format!("error: {e}") },
        })
        .collect();
    GoldenReport { items }
}
