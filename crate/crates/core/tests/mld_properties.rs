mod common;

use mldlab::ideal::{IdealComponent, MonomialIdeal, RIdeal};
use mldlab::mld::{
    alc_threshold, classify_pair, discrepancy_functional, is_special, lct, mld_at_origin, mld_at_stratum, MldConfig,
    MldStatus, PairSpec, Singularity, Threshold, Verdict,
};
use mldlab::oracle::brute_force_mld;
use mldlab::par::Execution;
use mldlab::{Error, ExponentVector, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

fn r(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

#[test]
fn engine_matches_oracle_on_random_pairs() {
    let cfg = MldConfig::default();
    let supports: [&[usize]; 3] = [&[0, 1, 2], &[0, 1], &[2]];
    for (i, pair) in common::corpus(11, 60).iter().enumerate() {
        for s in supports {
            let engine = mld_at_stratum(pair, s, &cfg).unwrap();
            let oracle = brute_force_mld(pair, s, 8).unwrap();
            if let Err(e) = common::agrees(&engine, &oracle, 8) {
                panic!("pair {i} support {s:?}: {e}");
            }
        }
    }
}

#[test]
fn monotonicity_on_the_corpus() {
    let cfg = MldConfig::default();
    let mut rng = common::rng(5);
    let value = |p: &PairSpec| {
        let rep = mld_at_origin(p, &cfg).unwrap();
        match rep.status {
            MldStatus::MinusInfinity => Some(None),
            MldStatus::Value => Some(rep.value),
            MldStatus::UncertifiedAboveBound => None,
        }
    };
    for pair in common::corpus(23, 40) {
        let comps = pair.rideal().components().to_vec();
        let j = rng.gen_range(0..comps.len());
        let IdealComponent::Monomial(m) = &comps[j].0 else { unreachable!() };
        let extra: Vec<u32> = (0..3).map(|_| rng.gen_range(0..=6)).collect();
        let mut gens = m.gens().to_vec();
        gens.push(ExponentVector(extra));
        let mut bigger = comps.clone();
        bigger[j].0 = IdealComponent::Monomial(MonomialIdeal::new(3, gens).unwrap());
        let mut heavier = comps.clone();
        heavier[j].1 = &heavier[j].1 + r(1, 2);
        let base = value(&pair);
        let enlarged = value(&PairSpec::smooth(3, RIdeal::new(bigger).unwrap()).unwrap());
        let raised = value(&PairSpec::smooth(3, RIdeal::new(heavier).unwrap()).unwrap());
        // None < Some(_) matches minus infinity below every value
        if let (Some(b), Some(e)) = (&base, &enlarged) {
            assert!(e >= b, "adding a generator lowered mld");
        }
        if let (Some(b), Some(h)) = (&base, &raised) {
            assert!(h <= b, "raising an exponent raised mld");
        }
    }
}

#[test]
fn lct_brackets_the_lc_region() {
    let cfg = MldConfig::default();
    let eps = r(1, 1000);
    let trivial = PairSpec::smooth(3, RIdeal::trivial()).unwrap();
    let mut rng = common::rng(17);
    for _ in 0..25 {
        let b = RIdeal::from(common::random_ideal(&mut rng, 6));
        let t = match lct(&trivial, &b).unwrap() {
            Threshold::Finite(t) => t,
            Threshold::Infinite => continue,
        };
        let below = classify_pair(&trivial.twisted(&b, &(&t - &eps)).unwrap(), &cfg).unwrap();
        let at = classify_pair(&trivial.twisted(&b, &t).unwrap(), &cfg).unwrap();
        let above = classify_pair(&trivial.twisted(&b, &(&t + &eps)).unwrap(), &cfg).unwrap();
        assert_ne!(below.singularity, Singularity::NotLc);
        assert_eq!(at.singularity, Singularity::LcNotKlt);
        assert_eq!(above.singularity, Singularity::NotLc);
    }
}

#[test]
fn alc_threshold_hits_its_target() {
    let cfg = MldConfig::default();
    let trivial = PairSpec::smooth(3, RIdeal::trivial()).unwrap();
    let mut rng = common::rng(29);
    let mut found = 0;
    for _ in 0..20 {
        let b = RIdeal::from(common::random_ideal(&mut rng, 4));
        let target = r(rng.gen_range(0..=5), 2);
        let t = match alc_threshold(&trivial, &b, &target, &cfg) {
            Ok(t) => t,
            Err(Error::Uncertified(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        if let Some(t) = t {
            let rep = mld_at_origin(&trivial.twisted(&b, &t).unwrap(), &cfg).unwrap();
            assert_eq!(rep.certified_value(), Some(&target));
            found += 1;
        }
    }
    assert!(found >= 5);
}

#[test]
fn special_pairs_have_mld_one() {
    let cfg = MldConfig::default();
    for pair in common::corpus(41, 40) {
        if is_special(&pair, &cfg).unwrap().verdict == Verdict::Yes {
            let class = classify_pair(&pair, &cfg).unwrap().singularity;
            assert!(class == Singularity::LcNotKlt || class.is_canonical());
            assert_eq!(mld_at_origin(&pair, &cfg).unwrap().certified_value(), Some(&Rational::one()));
        }
    }
}

#[test]
fn parallel_and_sequential_reports_are_identical() {
    let seq = MldConfig::default().with_execution(Execution::Sequential);
    let par = MldConfig::default().with_execution(Execution::Parallel);
    for pair in common::corpus(3, 20) {
        assert_eq!(mld_at_origin(&pair, &seq).unwrap(), mld_at_origin(&pair, &par).unwrap());
    }
}

proptest! {
    #[test]
    fn functional_is_homogeneous(seed in any::<u64>(), w in proptest::collection::vec(1i64..8, 3), l in 1i64..6) {
        let pair = common::random_pair(&mut common::rng(seed));
        let w: Vec<Rational> = w.into_iter().map(|x| Rational::from_integer(x.into())).collect();
        let scaled: Vec<Rational> = w.iter().map(|x| x * Rational::from_integer(l.into())).collect();
        let g = discrepancy_functional(&pair, &w).unwrap();
        prop_assert_eq!(discrepancy_functional(&pair, &scaled).unwrap(), g * Rational::from_integer(l.into()));
    }

    #[test]
    fn functional_matches_component_orders(seed in any::<u64>(), w in proptest::collection::vec(0i64..6, 3)) {
        prop_assume!(w.iter().any(|&x| x > 0));
        let pair = common::random_pair(&mut common::rng(seed));
        let w: Vec<Rational> = w.into_iter().map(|x| Rational::from_integer(x.into())).collect();
        let mut expected = w.iter().fold(Rational::zero(), |a, b| a + b);
        for (c, e) in pair.rideal().components() {
            expected -= c.order(&w).unwrap().unwrap() * e;
        }
        prop_assert_eq!(discrepancy_functional(&pair, &w).unwrap(), expected);
    }
}
