//! Newton polyhedra `conv(generators) + R^d_{>=0}`, stored by generators.

use num_traits::{One, Zero};

use crate::error::{check_dim, Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::poly::ExponentVector;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolyhedron {
    dim: usize,
    generators: Vec<ExponentVector>,
}

impl NewtonPolyhedron {
    /// Builds the polyhedron and prunes generators spanned by the others.
    pub fn new(dim: usize, generators: Vec<ExponentVector>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::invalid("Newton polyhedron needs a generator"));
        }
        for g in &generators {
            check_dim(dim, g.dim())?;
        }
        let mut gens = generators;
        gens.sort();
        gens.dedup();
        let mut i = 0;
        while i < gens.len() {
            if gens.len() > 1 {
                let others: Vec<ExponentVector> =
                    gens.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, g)| g.clone()).collect();
                let point: Vec<Rational> = gens[i].0.iter().map(|&e| Rational::from_integer(e.into())).collect();
                if hull_contains(dim, &others, &point)? {
                    gens.remove(i);
                    continue;
                }
            }
            i += 1;
        }
        Ok(NewtonPolyhedron { dim, generators: gens })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[ExponentVector] {
        &self.generators
    }
}

/// Membership of `s` in the Newton polyhedron, decided by one feasibility LP.
pub fn polyhedron_contains(np: &NewtonPolyhedron, s: &[Rational]) -> Result<bool> {
    check_dim(np.dim, s.len())?;
    hull_contains(np.dim, &np.generators, s)
}

fn hull_contains(dim: usize, gens: &[ExponentVector], s: &[Rational]) -> Result<bool> {
    // lambda >= 0, sum lambda = 1, sum lambda_k g_k <= s
    let k = gens.len();
    let mut lp = LinearProgram::nonnegative(vec![Rational::zero(); k]);
    lp.push_eq(vec![Rational::one(); k], Rational::one());
    for (i, si) in s.iter().enumerate().take(dim) {
        let coeffs = gens.iter().map(|g| -Rational::from_integer(g.0[i].into())).collect();
        lp.push(coeffs, -si.clone());
    }
    match solve_lp(&lp)? {
        LpOutcome::Optimal { .. } => Ok(true),
        LpOutcome::Infeasible { .. } => Ok(false),
        LpOutcome::Unbounded { .. } => Err(Error::invariant("feasibility LP reported unbounded")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn ev(v: &[u32]) -> ExponentVector {
        ExponentVector(v.to_vec())
    }

    #[test]
    fn membership_examples() {
        let np = NewtonPolyhedron::new(2, vec![ev(&[2, 0]), ev(&[0, 3])]).unwrap();
        // half of each generator
        let mid = [frac(1, 2) * int(2), frac(1, 2) * int(3)];
        assert_eq!(mid, [int(1), frac(3, 2)]);
        assert!(polyhedron_contains(&np, &mid).unwrap());
        assert!(!polyhedron_contains(&np, &[int(0), int(0)]).unwrap());
        let np3 = NewtonPolyhedron::new(3, vec![ev(&[1, 1, 1])]).unwrap();
        assert!(polyhedron_contains(&np3, &[int(2), int(1), int(1)]).unwrap());
        assert!(polyhedron_contains(&np3, &[int(1)]).is_err());
    }

    #[test]
    fn redundant_generators_are_pruned() {
        let np = NewtonPolyhedron::new(2, vec![ev(&[2, 0]), ev(&[0, 2]), ev(&[1, 1]), ev(&[3, 3])]).unwrap();
        assert_eq!(np.generators(), &[ev(&[0, 2]), ev(&[2, 0])]);
    }

    proptest! {
        #[test]
        fn agrees_with_convex_combination_search(
            a in prop::collection::vec(0u32..5, 2),
            b in prop::collection::vec(0u32..5, 2),
            s in prop::collection::vec(0i64..10, 2),
        ) {
            let np = NewtonPolyhedron::new(2, vec![ExponentVector(a.clone()), ExponentVector(b.clone())]).unwrap();
            let s: Vec<Rational> = s.iter().map(|&v| frac(v, 2)).collect();
            // the feasible set of lambda in [0,1] is an interval cut out by two
            // linear inequalities; its endpoints are among these candidates
            let mut candidates = vec![int(0), int(1)];
            for i in 0..2 {
                let (ai, bi) = (int(a[i] as i64), int(b[i] as i64));
                if ai != bi {
                    candidates.push((&s[i] - &bi) / (&ai - &bi));
                }
            }
            let brute = candidates.iter().any(|l| {
                *l >= int(0) && *l <= int(1)
                    && (0..2).all(|i| l * int(a[i] as i64) + (int(1) - l) * int(b[i] as i64) <= s[i])
            });
            prop_assert_eq!(polyhedron_contains(&np, &s).unwrap(), brute);
        }
    }
}
