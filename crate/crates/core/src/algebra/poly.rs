use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

/// The generator `e_{answer, question}` of a game algebra.
///
/// Ordered by question first, so generators of one question are contiguous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GeneratorId {
    pub question: usize,
    pub answer: usize,
}

impl GeneratorId {
    pub fn new(question: usize, answer: usize) -> Self {
        GeneratorId { question, answer }
    }

    /// Dense index `question * k + answer`.
    pub fn index(self, k: usize) -> usize {
        self.question * k + self.answer
    }

    pub fn from_index(index: usize, k: usize) -> Self {
        GeneratorId::new(index / k, index % k)
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e[{},{}]", self.answer, self.question)
    }
}

/// A monomial; the empty word is the identity.
pub type Word = Vec<GeneratorId>;

/// Noncommutative polynomial with exact rational coefficients.
///
/// Terms with coefficient zero are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Word, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    /// `[question, answer]` pairs, left to right.
    pub word: Vec<[usize; 2]>,
    pub coeff: String,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Poly {
        Poly::term(Vec::new(), c)
    }

    pub fn generator(g: GeneratorId) -> Poly {
        Poly::term(vec![g], Rational::one())
    }

    pub fn term(word: Word, c: Rational) -> Poly {
        let mut p = Poly::zero();
        p.add_term(word, c);
        p
    }

    /// Sum of the given generators with coefficient one.
    pub fn sum_of(gens: impl IntoIterator<Item = GeneratorId>) -> Poly {
        let mut p = Poly::zero();
        for g in gens {
            p.add_term(vec![g], Rational::one());
        }
        p
    }

    pub fn add_term(&mut self, word: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(word);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn coeff(&self, word: &[GeneratorId]) -> Rational {
        self.terms.get(word).copied().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Word, Rational)> {
        self.terms.into_iter()
    }

    pub fn scale(&self, c: Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(w, v)| (w.clone(), *v * c)).collect(),
        }
    }

    pub fn generators(&self) -> impl Iterator<Item = GeneratorId> + '_ {
        self.terms.keys().flatten().copied()
    }

    /// Replaces every generator by its image and expands.
    pub fn substitute(&self, image: impl Fn(GeneratorId) -> Poly) -> Poly {
        let mut out = Poly::zero();
        for (word, c) in &self.terms {
            let mut acc = Poly::constant(*c);
            for &g in word {
                acc = &acc * &image(g);
                if acc.is_zero() {
                    break;
                }
            }
            out = &out + &acc;
        }
        out
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(w, c)| TermJson {
                word: w.iter().map(|g| [g.question, g.answer]).collect(),
                coeff: rational::format(c),
            })
            .collect()
    }
}

impl FromIterator<(Word, Rational)> for Poly {
    fn from_iter<I: IntoIterator<Item = (Word, Rational)>>(iter: I) -> Self {
        let mut p = Poly::zero();
        for (w, c) in iter {
            p.add_term(w, c);
        }
        p
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), *c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -*c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        self.scale(-Rational::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (u, c) in &self.terms {
            for (v, d) in &rhs.terms {
                let mut w = Vec::with_capacity(u.len() + v.len());
                w.extend_from_slice(u);
                w.extend_from_slice(v);
                out.add_term(w, *c * *d);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", rational::format(c))?;
            for g in w {
                write!(f, "*{g}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn g(q: usize, a: usize) -> Poly {
        Poly::generator(GeneratorId::new(q, a))
    }

    #[test]
    fn arithmetic_is_canonical() {
        let p = &g(0, 0) + &g(0, 1);
        let q = &p - &g(0, 1);
        assert_eq!(q, g(0, 0));
        assert!((&q - &q).is_zero());
        let sq = &p * &p;
        assert_eq!(sq.len(), 4);
        assert_eq!(sq.degree(), 2);
        assert_eq!((&Poly::one() * &p), p);
        assert_eq!(p.scale(frac(1, 2)).coeff(&[GeneratorId::new(0, 1)]), frac(1, 2));
        assert!(p.scale(int(0)).is_zero());
    }

    #[test]
    fn noncommutative_product() {
        let ab = &g(0, 0) * &g(1, 0);
        let ba = &g(1, 0) * &g(0, 0);
        assert_ne!(ab, ba);
        assert!(!(&ab - &ba).is_zero());
    }

    #[test]
    fn substitution_and_json() {
        let p = &(&g(0, 0) * &g(1, 1)) - &Poly::one();
        let image = |x: GeneratorId| {
            if x.question == 0 {
                Poly::one()
            } else {
                g(2, 0).scale(int(3))
            }
        };
        let s = p.substitute(image);
        assert_eq!(s, &g(2, 0).scale(int(3)) - &Poly::one());
        let json = serde_json::to_string(&s.to_json()).unwrap();
        assert_eq!(json, r#"[{"word":[],"coeff":"-1"},{"word":[[2,0]],"coeff":"3"}]"#);
    }

    #[test]
    fn generator_indexing() {
        let e = GeneratorId::new(3, 2);
        assert_eq!(e.index(4), 14);
        assert_eq!(GeneratorId::from_index(14, 4), e);
        assert!(GeneratorId::new(0, 5) < GeneratorId::new(1, 0));
    }
}
