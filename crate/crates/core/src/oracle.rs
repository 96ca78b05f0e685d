//! Brute-force mld: plain enumeration of lattice weights in a box, with no
//! LP and no certificate. Used as the independent reference for the engine.

use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::mld::{MldReport, MldStatus, PairSpec};
use crate::rational::Rational;

/// Minimum of `g` over primitive lattice weights with `max(w) <= bound` and
/// support exactly `support` (zero-based). Exponents of `w` are summed with
/// exact rationals through the ideal's own weighted order.
pub fn brute_force_mld(pair: &PairSpec, support: &[usize], bound: u64) -> Result<MldReport> {
    let d = pair.dim();
    let germ = pair.germ();
    let r = germ.r() as i64;
    let top = (bound as i64) * r;
    let mut best: Option<Rational> = None;
    let mut witnesses: Vec<Vec<Rational>> = Vec::new();
    let mut negative: Option<Vec<Rational>> = None;
    let mut scaled = vec![0i64; d];
    loop {
        let pattern_ok = (0..d).all(|i| (scaled[i] > 0) == support.contains(&i));
        if pattern_ok && germ.contains_scaled(&scaled) && germ.is_primitive_scaled(&scaled) {
            let w = germ.unscale(&scaled);
            let total = w.iter().fold(Rational::zero(), |a, b| a + b);
            let g = if pair.rideal().is_trivial() { total } else { total - pair.rideal().weighted_order(&w)? };
            if g.is_negative() && negative.is_none() {
                negative = Some(w.clone());
            }
            match &best {
                Some(b) if &g > b => {}
                Some(b) if &g == b => witnesses.push(w),
                _ => {
                    best = Some(g);
                    witnesses = vec![w];
                }
            }
        }
        // odometer over 0..=top in every coordinate
        let mut i = 0;
        loop {
            if i == d {
                witnesses.sort();
                return Ok(match negative {
                    Some(w) => MldReport {
                        status: MldStatus::MinusInfinity,
                        value: None,
                        witnesses: vec![w],
                        bound_used: bound,
                        lp_simplex_min: None,
                        lower_bound: None,
                    },
                    None => MldReport {
                        status: MldStatus::UncertifiedAboveBound,
                        value: best,
                        witnesses,
                        bound_used: bound,
                        lp_simplex_min: None,
                        lower_bound: None,
                    },
                });
            }
            if scaled[i] < top {
                scaled[i] += 1;
                break;
            }
            scaled[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::CyclicQuotientGerm;
    use crate::ideal::{MonomialIdeal, RIdeal};
    use crate::mld::monomial_pair;
    use crate::rational::{frac, int};

    #[test]
    fn oracle_examples() {
        let m = monomial_pair(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], int(1)).unwrap();
        let rep = brute_force_mld(&m, &[0, 1, 2], 3).unwrap();
        assert_eq!(rep.value, Some(int(2)));
        assert_eq!(rep.witnesses, vec![vec![int(1); 3]]);
        assert_eq!(rep.status, MldStatus::UncertifiedAboveBound);

        let cusp = monomial_pair(3, &[&[2, 0, 0], &[0, 3, 0]], frac(1, 2)).unwrap();
        let rep = brute_force_mld(&cusp, &[0, 1, 2], 6).unwrap();
        assert_eq!(rep.value, Some(int(2)));
        assert!(rep.witnesses.contains(&vec![int(1); 3]));

        let big = PairSpec::smooth(3, RIdeal::monomial(MonomialIdeal::maximal(3), frac(7, 2)).unwrap()).unwrap();
        assert_eq!(brute_force_mld(&big, &[0, 1, 2], 2).unwrap().status, MldStatus::MinusInfinity);
    }

    #[test]
    fn quotient_lattice_points() {
        let pair = PairSpec::new(CyclicQuotientGerm::new(2, &[1, 1, 1]).unwrap(), RIdeal::trivial()).unwrap();
        let rep = brute_force_mld(&pair, &[0, 1, 2], 3).unwrap();
        assert_eq!(rep.value, Some(frac(3, 2)));
        assert_eq!(rep.witnesses, vec![vec![frac(1, 2); 3]]);
    }
}
