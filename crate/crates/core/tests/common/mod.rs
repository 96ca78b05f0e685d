#![allow(dead_code)]

use mldlab::ideal::{IdealComponent, MonomialIdeal, RIdeal};
use mldlab::mld::PairSpec;
use mldlab::{ExponentVector, Rational};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_ideal(rng: &mut ChaCha8Rng, max_exp: u32) -> MonomialIdeal {
    let n = rng.gen_range(1..=3);
    let gens = (0..n)
        .map(|_| loop {
            let e: Vec<u32> = (0..3).map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(1..=max_exp) }).collect();
            if e.iter().any(|&x| x > 0) {
                break ExponentVector(e);
            }
        })
        .collect();
    MonomialIdeal::new(3, gens).unwrap()
}

pub fn random_exponent(rng: &mut ChaCha8Rng) -> Rational {
    let q: i64 = rng.gen_range(1..=4);
    let p: i64 = if rng.gen_bool(0.6) { 1 } else { rng.gen_range(1..=q) };
    Rational::new(p.into(), q.into())
}

/// Random pair on A^3: at most three components, generator exponents at
/// most 6, exponent denominators at most 4.
pub fn random_pair(rng: &mut ChaCha8Rng) -> PairSpec {
    let k = [1, 1, 2, 3][rng.gen_range(0..4)];
    let comps = (0..k)
        .map(|_| {
            let cap = rng.gen_range(1..=6);
            (IdealComponent::Monomial(random_ideal(rng, cap)), random_exponent(rng))
        })
        .collect();
    PairSpec::smooth(3, RIdeal::new(comps).unwrap()).unwrap()
}

pub fn corpus(seed: u64, n: usize) -> Vec<PairSpec> {
    let mut r = rng(seed);
    (0..n).map(|_| random_pair(&mut r)).collect()
}

use mldlab::mld::{MldReport, MldStatus};
use num_traits::Signed;

/// Agreement between a certified engine report and the box oracle at
/// bound `b`: equal when an engine minimizer lies in the box, otherwise the
/// oracle can only be larger; a negative oracle value forces minus infinity.
pub fn agrees(engine: &MldReport, oracle: &MldReport, b: u64) -> Result<(), String> {
    let bound = Rational::from_integer(b.into());
    match (engine.status, oracle.status) {
        (MldStatus::MinusInfinity, _) => Ok(()),
        (_, MldStatus::MinusInfinity) => Err("oracle found a negative weight, engine did not".into()),
        (MldStatus::Value, _) => {
            let e = engine.value.as_ref().unwrap();
            let o = oracle.value.as_ref().ok_or("oracle box has no lattice point")?;
            if e.is_negative() {
                return Err(format!("engine certified negative value {e}"));
            }
            let inside = engine.witnesses.iter().any(|w| w.iter().all(|x| x <= &bound));
            if (inside && o != e) || o < e {
                return Err(format!("engine {e} vs oracle {o}"));
            }
            Ok(())
        }
        (MldStatus::UncertifiedAboveBound, _) => Ok(()),
    }
}

use mldlab::compose::{compose_hypothesis, CompositionProblem};
use mldlab::Polynomial;

fn random_tail(rng: &mut ChaCha8Rng) -> Polynomial {
    let mut p = Polynomial::zero(3);
    for _ in 0..rng.gen_range(0..=3) {
        let e = loop {
            let e: Vec<u32> = (0..3).map(|_| rng.gen_range(0..=3)).collect();
            let deg: u32 = e.iter().sum();
            // higher order terms, or pure powers of x3
            if deg >= 2 || (deg == 1 && e[2] == 1) {
                break ExponentVector(e);
            }
        };
        let c: i64 = rng.gen_range(-3..=3);
        if c != 0 {
            p = p.add(&Polynomial::monomial(Rational::from_integer(c.into()), e)).unwrap();
        }
    }
    p
}

/// Hypothesis-satisfying tower with weights at most 30 and a perturbed,
/// possibly swapped, second system.
pub fn random_composition(rng: &mut ChaCha8Rng) -> CompositionProblem {
    loop {
        let v1 = rng.gen_range(1..=5u64);
        let v2 = rng.gen_range(1..=v1);
        if v1 == v2 && rng.gen_bool(0.8) {
            continue;
        }
        let w2 = rng.gen_range(1..=4u64);
        let floor_w1 = (v1 * v1 + w2 * ((v1 - 1) / v2)).max(w2);
        if floor_w1 > 30 {
            continue;
        }
        let w1 = rng.gen_range(floor_w1..=30);
        let mut y1 = Polynomial::var(3, 0).add(&random_tail(rng)).unwrap();
        let mut y2 = Polynomial::var(3, 1).add(&random_tail(rng)).unwrap();
        if rng.gen_bool(0.3) {
            std::mem::swap(&mut y1, &mut y2);
            if rng.gen_bool(0.5) {
                let k = rng.gen_range(1..=3);
                let c: i64 = rng.gen_range(1..=3);
                let cross = Polynomial::monomial(Rational::from_integer(c.into()), ExponentVector(vec![1, 0, k]));
                y1 = y1.add(&cross).unwrap();
            }
        }
        let p = CompositionProblem::new((w1, w2), (v1, v2), y1, y2);
        if compose_hypothesis(&p).unwrap() && p.valuation().is_ok() {
            return p;
        }
    }
}

use mldlab::slopes::SlopePair;

/// Euler's totient by trial factorization.
pub fn totient(mut n: u64) -> u64 {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

fn power(gens: &[&[u32]], e: Rational) -> Option<(IdealComponent, Rational)> {
    use num_traits::Zero;
    if e.is_zero() {
        return None;
    }
    Some((IdealComponent::Monomial(MonomialIdeal::from_exponents(3, gens).unwrap()), e))
}

/// Lc monomial pair `(x1 x2)^{1-t} x1^t (x1, x2^k)^{t/k} x3^s` whose
/// lc slopes along `(w1, w2, 0)` are exactly those with `k w2 <= w1`
/// (every slope when `t = 0`). All exponents lie in `(1/n)Z`.
pub fn slope_family(k: u64, t: Rational, s: Rational) -> RIdeal {
    let one = Rational::from_integer(1.into());
    let kk = Rational::from_integer(k.into());
    let comps: Vec<_> = [
        power(&[&[1, 1, 0]], &one - &t),
        power(&[&[1, 0, 0]], t.clone()),
        power(&[&[1, 0, 0], &[0, k as u32, 0]], &t / &kk),
        power(&[&[0, 0, 1]], s),
    ]
    .into_iter()
    .flatten()
    .collect();
    RIdeal::new(comps).unwrap()
}

pub struct SlopeCase {
    pub n: u64,
    pub k: u64,
    pub ideal: RIdeal,
}

/// Random member of `slope_family` with `k | n` and `t > 0`.
pub fn random_slope_case(rng: &mut ChaCha8Rng) -> SlopeCase {
    let n = rng.gen_range(1..=6u64);
    let divisors: Vec<u64> = (1..=n).filter(|k| n % k == 0).collect();
    let k = divisors[rng.gen_range(0..divisors.len())];
    let t = Rational::new(rng.gen_range(1..=n as i64).into(), (n as i64).into());
    let s = Rational::new(rng.gen_range(0..=n as i64).into(), (n as i64).into());
    SlopeCase { n, k, ideal: slope_family(k, t, s) }
}

/// Random slope in `P` with `k w2 <= w1` and `w1 > floor`.
pub fn random_slope_above(rng: &mut ChaCha8Rng, k: u64, floor: u64) -> SlopePair {
    loop {
        let w2 = rng.gen_range(1..=12u64);
        let lo = (k * w2).max(floor + 1);
        let w1 = rng.gen_range(lo..=lo + 20);
        if let Ok(p) = SlopePair::new(w1, w2) {
            return p;
        }
    }
}
