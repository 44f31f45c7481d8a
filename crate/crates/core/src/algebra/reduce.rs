use std::collections::{BTreeMap, HashMap};

use num_traits::One;

use super::closure::Closure;
use super::poly::{GeneratorId, Poly, Word};
use crate::rational::Rational;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReduceConfig {
    /// Largest word length allowed in any intermediate polynomial.
    pub degree_bound: usize,
    /// Rounds of completeness elimination after the local rules stall.
    pub elimination_passes: usize,
    /// Cap on local rewrite steps per call.
    pub max_steps: usize,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig {
            degree_bound: 4,
            elimination_passes: 3,
            max_steps: 100_000,
        }
    }
}

/// Rewrites `poly` with identities of the closure's algebra.
///
/// A zero result certifies that `poly` vanishes in the algebra; a nonzero
/// result proves nothing.
pub fn reduce(poly: &Poly, closure: &Closure) -> Result<Poly> {
    reduce_with(poly, closure, ReduceConfig::default())
}

pub fn reduce_with(poly: &Poly, closure: &Closure, cfg: ReduceConfig) -> Result<Poly> {
    if poly.degree() > cfg.degree_bound {
        return Err(Error::DegreeOverflow {
            degree: poly.degree(),
            bound: cfg.degree_bound,
        });
    }
    if closure.is_degenerate() {
        return Ok(Poly::zero());
    }
    let mut r = Reducer::new(closure, cfg);
    let mut p = r.local(r.normalize(poly));
    for _ in 0..cfg.elimination_passes {
        if p.is_zero() {
            break;
        }
        let expanded = r.eliminate(&p);
        let next = r.local(r.normalize(&expanded));
        if next == p {
            break;
        }
        p = next;
    }
    Ok(p)
}

struct Reducer<'a> {
    c: &'a Closure,
    cfg: ReduceConfig,
    facts: HashMap<GeneratorId, Vec<(GeneratorId, GeneratorId)>>,
    expansion: Option<BTreeMap<GeneratorId, Poly>>,
}

impl<'a> Reducer<'a> {
    fn new(c: &'a Closure, cfg: ReduceConfig) -> Self {
        let mut facts: HashMap<GeneratorId, Vec<(GeneratorId, GeneratorId)>> = HashMap::new();
        for f in c.sum_facts() {
            let [a, b] = f.left;
            facts.entry(a).or_default().push((b, f.right));
        }
        Reducer {
            c,
            cfg,
            facts,
            expansion: None,
        }
    }

    /// Representatives in place of generators, idempotence and zero pairs.
    fn normalize_word(&self, word: &[GeneratorId]) -> Option<Word> {
        let mut out: Word = Vec::with_capacity(word.len());
        for &g in word {
            let g = self.c.rep(g)?;
            match out.last() {
                Some(&top) if top == g => {}
                Some(&top) if self.c.is_zero_pair(top, g) => return None,
                _ => out.push(g),
            }
        }
        Some(out)
    }

    fn normalize(&self, p: &Poly) -> Poly {
        p.terms()
            .filter_map(|(w, c)| self.normalize_word(w).map(|w| (w, *c)))
            .collect()
    }

    /// Applies sum-fact substitution and group collapse until neither fires.
    fn local(&self, mut p: Poly) -> Poly {
        for _ in 0..self.cfg.max_steps {
            match self.sum_fact_step(&p).or_else(|| self.collapse_step(&p)) {
                Some(next) => p = next,
                None => break,
            }
        }
        p
    }

    /// `c·u q₁ v + c·u q₂ v → c·u r v` for a recorded `q₁ + q₂ = r`.
    fn sum_fact_step(&self, p: &Poly) -> Option<Poly> {
        for (w, &c) in p.terms() {
            for (i, g) in w.iter().enumerate() {
                let Some(list) = self.facts.get(g) else { continue };
                for &(other, right) in list {
                    let mut partner = w.clone();
                    partner[i] = other;
                    if p.coeff(&partner) != c {
                        continue;
                    }
                    let mut merged = w.clone();
                    merged[i] = right;
                    let mut next = p.clone();
                    next.add_term(w.clone(), -c);
                    next.add_term(partner, -c);
                    if let Some(m) = self.normalize_word(&merged) {
                        next.add_term(m, c);
                    }
                    return Some(next);
                }
            }
        }
        None
    }

    /// `Σ_{m ∈ P} c·u m v → c·u v` for a whole group `P`; products that
    /// normalize to zero may be absent.
    fn collapse_step(&self, p: &Poly) -> Option<Poly> {
        for (w, &c) in p.terms() {
            for (i, &l) in w.iter().enumerate() {
                for &q in self.c.groups_containing(l) {
                    let (u, v) = (&w[..i], &w[i + 1..]);
                    let mut targets: BTreeMap<Word, i64> = BTreeMap::new();
                    for &m in self.c.group(q) {
                        let mut word = u.to_vec();
                        word.push(m);
                        word.extend_from_slice(v);
                        if let Some(t) = self.normalize_word(&word) {
                            *targets.entry(t).or_default() += 1;
                        }
                    }
                    let base = self.normalize_word(&[u, v].concat());
                    if base.as_ref().is_some_and(|b| targets.contains_key(b)) {
                        continue;
                    }
                    if !targets
                        .iter()
                        .all(|(t, &mult)| p.coeff(t) == c * Rational::from_integer(mult))
                    {
                        continue;
                    }
                    let mut next = p.clone();
                    for (t, mult) in targets {
                        next.add_term(t, -c * Rational::from_integer(mult));
                    }
                    if let Some(b) = base {
                        next.add_term(b, c);
                    }
                    return Some(next);
                }
            }
        }
        None
    }

    /// Substitutes `r ↦ 1 - Σ (other members)` for the largest representative
    /// of each group. Every substitution only mentions smaller representatives,
    /// so the expansion is well founded.
    fn eliminate(&mut self, p: &Poly) -> Poly {
        if self.expansion.is_none() {
            let mut rules: BTreeMap<GeneratorId, Vec<GeneratorId>> = BTreeMap::new();
            for q in 0..self.c.n() {
                let grp = self.c.group(q);
                let Some(&top) = grp.last() else { continue };
                rules.entry(top).or_insert_with(|| grp[..grp.len() - 1].to_vec());
            }
            let mut expansion = BTreeMap::new();
            for &top in rules.keys() {
                let e = expand(top, &rules, &mut expansion);
                expansion.insert(top, e);
            }
            self.expansion = Some(expansion);
        }
        let exp = self.expansion.as_ref().expect("built above");
        p.substitute(|g| exp.get(&g).cloned().unwrap_or_else(|| Poly::generator(g)))
    }
}

fn expand(
    g: GeneratorId,
    rules: &BTreeMap<GeneratorId, Vec<GeneratorId>>,
    memo: &mut BTreeMap<GeneratorId, Poly>,
) -> Poly {
    if let Some(p) = memo.get(&g) {
        return p.clone();
    }
    let Some(others) = rules.get(&g) else {
        return Poly::generator(g);
    };
    let mut out = Poly::constant(Rational::one());
    for &m in others {
        debug_assert!(m < g);
        let e = expand(m, rules, memo);
        out = &out - &e;
    }
    memo.insert(g, out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::closure::{presentation_of, saturate};
    use crate::zoo::trivial_sync;

    fn e(q: usize, a: usize) -> Poly {
        Poly::generator(GeneratorId::new(q, a))
    }

    #[test]
    fn basic_identities() {
        let g = trivial_sync(2, 3).unwrap();
        let c = saturate(&presentation_of(&g).unwrap());
        assert!(reduce(&(&e(0, 0) * &e(0, 1)), &c).unwrap().is_zero());
        let complete = &Poly::sum_of((0..3).map(|a| GeneratorId::new(1, a))) - &Poly::one();
        assert!(reduce(&complete, &c).unwrap().is_zero());
        let idem = &(&e(1, 2) * &e(1, 2)) - &e(1, 2);
        assert!(reduce(&idem, &c).unwrap().is_zero());
        assert!(!reduce(&(&e(0, 0) - &e(1, 0)), &c).unwrap().is_zero());
        assert!(!reduce(&(&e(0, 0) * &e(1, 0)), &c).unwrap().is_zero());
    }

    #[test]
    fn degree_bound_is_enforced() {
        let c = saturate(&presentation_of(&trivial_sync(2, 2).unwrap()).unwrap());
        let mut w = Poly::one();
        for i in 0..5 {
            w = &w * &e(i % 2, 0);
        }
        assert!(matches!(
            reduce(&w, &c),
            Err(Error::DegreeOverflow { degree: 5, bound: 4 })
        ));
    }

    #[test]
    fn collapse_with_context() {
        let c = saturate(&presentation_of(&trivial_sync(2, 3).unwrap()).unwrap());
        // e00 (Σ_a e_{a,1}) e00 - e00 = 0.
        let mut p = Poly::zero();
        for a in 0..3 {
            p = &p + &(&(&e(0, 0) * &e(1, a)) * &e(0, 0));
        }
        let p = &p - &e(0, 0);
        assert!(reduce(&p, &c).unwrap().is_zero());
        assert!(reduce(&Poly::zero(), &c).unwrap().is_zero());
        let scaled = p.scale(Rational::new(-3, 7));
        assert!(reduce(&scaled, &c).unwrap().is_zero());
    }
}
