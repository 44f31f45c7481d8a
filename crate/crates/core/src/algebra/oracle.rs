use std::collections::BTreeMap;

use num_traits::Zero;

use super::poly::Poly;
use crate::correlations::{enumerate_perfect_deterministic, DeterministicStrategy};
use crate::game::Game;
use crate::rational::Rational;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    /// Vanishes under every perfect deterministic strategy (necessary evidence only).
    HoldsInAll,
    /// Nonzero under this strategy, so the polynomial is not zero in the algebra.
    Counterexample(DeterministicStrategy),
}

/// Evaluates polynomials in the one-dimensional representations
/// `e_{a,x} ↦ δ_{a, f(x)}` of the perfect deterministic strategies `f`.
#[derive(Debug, Clone)]
pub struct DetOracle {
    k: usize,
    strategies: Vec<DeterministicStrategy>,
    words: usize,
    /// Per generator, the strategies under which it evaluates to 1.
    support: Vec<Vec<u64>>,
}

impl DetOracle {
    pub fn new(g: &Game) -> Result<Self> {
        Ok(Self::from_strategies(g.n(), g.k(), enumerate_perfect_deterministic(g)?))
    }

    pub fn from_strategies(n: usize, k: usize, strategies: Vec<DeterministicStrategy>) -> Self {
        let words = strategies.len().div_ceil(64);
        let mut support = vec![vec![0u64; words]; n * k];
        for (s, f) in strategies.iter().enumerate() {
            for (x, &a) in f.0.iter().enumerate() {
                support[x * k + a][s / 64] |= 1 << (s % 64);
            }
        }
        DetOracle {
            k,
            strategies,
            words,
            support,
        }
    }

    pub fn strategies(&self) -> &[DeterministicStrategy] {
        &self.strategies
    }

    /// Index of a strategy under which `p` is nonzero, if any.
    pub fn find_counterexample(&self, p: &Poly) -> Option<usize> {
        let count = self.strategies.len();
        let full: Vec<u64> = (0..self.words)
            .map(|w| {
                let bits = (count - w * 64).min(64);
                if bits == 64 {
                    u64::MAX
                } else {
                    (1u64 << bits) - 1
                }
            })
            .collect();
        let mut values: BTreeMap<usize, Rational> = BTreeMap::new();
        for (word, c) in p.terms() {
            let mut set = full.clone();
            for g in word {
                for (s, t) in set.iter_mut().zip(&self.support[g.index(self.k)]) {
                    *s &= t;
                }
            }
            for (w, &bits) in set.iter().enumerate() {
                let mut bits = bits;
                while bits != 0 {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    *values.entry(w * 64 + t).or_insert_with(Rational::zero) += c;
                }
            }
        }
        values.into_iter().find(|(_, v)| !v.is_zero()).map(|(s, _)| s)
    }

    pub fn verdict(&self, p: &Poly) -> OracleVerdict {
        match self.find_counterexample(p) {
            Some(s) => OracleVerdict::Counterexample(self.strategies[s].clone()),
            None => OracleVerdict::HoldsInAll,
        }
    }
}

/// Evaluates `p` under every perfect deterministic strategy of `g`.
pub fn check_in_deterministic_reps(p: &Poly, g: &Game) -> Result<OracleVerdict> {
    Ok(DetOracle::new(g)?.verdict(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GeneratorId;
    use crate::zoo::trivial_sync;

    #[test]
    fn trivial_examples() {
        let g = trivial_sync(1, 2).unwrap();
        let e = |a| Poly::generator(GeneratorId::new(0, a));
        assert_eq!(
            check_in_deterministic_reps(&(&e(0) * &e(1)), &g).unwrap(),
            OracleVerdict::HoldsInAll
        );
        assert_eq!(
            check_in_deterministic_reps(&(&e(0) - &e(1)), &g).unwrap(),
            OracleVerdict::Counterexample(DeterministicStrategy(vec![0]))
        );
        assert_eq!(
            check_in_deterministic_reps(&(&(&e(0) + &e(1)) - &Poly::one()), &g).unwrap(),
            OracleVerdict::HoldsInAll
        );
    }

    #[test]
    fn many_strategies() {
        // 3^4 = 81 strategies span two support words.
        let g = trivial_sync(4, 3).unwrap();
        let oracle = DetOracle::new(&g).unwrap();
        assert_eq!(oracle.strategies().len(), 81);
        let p = &Poly::generator(GeneratorId::new(3, 2)) * &Poly::generator(GeneratorId::new(0, 2));
        let s = oracle.find_counterexample(&p).unwrap();
        assert_eq!(oracle.strategies()[s].0[0], 2);
        assert_eq!(oracle.strategies()[s].0[3], 2);
    }
}
