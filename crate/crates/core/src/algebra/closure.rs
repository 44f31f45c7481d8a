use std::collections::BTreeSet;

use serde::Serialize;

use super::poly::GeneratorId;
use crate::bits::BitMatrix;
use crate::game::Game;
use crate::{Error, Result};

/// Generators, per-question groups and seed zero products of a game algebra.
#[derive(Debug, Clone)]
pub struct Presentation {
    n: usize,
    k: usize,
    seed: BitMatrix,
}

/// Builds the presentation of a synchronous game: one zero pair per λ = 0 cell.
pub fn presentation_of(g: &Game) -> Result<Presentation> {
    if !g.is_synchronous() {
        return Err(Error::Precondition("game algebra needs a synchronous game".into()));
    }
    let (n, k) = (g.n(), g.k());
    let mut seed = BitMatrix::new(n * k);
    for [a, b, x, y] in g.zeros() {
        seed.set(x * k + a, y * k + b);
    }
    Ok(Presentation { n, k, seed })
}

impl Presentation {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator_count(&self) -> usize {
        self.n * self.k
    }

    pub fn group(&self, question: usize) -> Vec<GeneratorId> {
        (0..self.k).map(|a| GeneratorId::new(question, a)).collect()
    }

    pub fn is_seed_zero(&self, g: GeneratorId, h: GeneratorId) -> bool {
        self.seed.get(g.index(self.k), h.index(self.k))
    }

    /// Seed zero pairs in lexicographic order.
    pub fn seed_pairs(&self) -> Vec<(GeneratorId, GeneratorId)> {
        let k = self.k;
        (0..self.generator_count())
            .flat_map(|i| {
                self.seed
                    .iter_row(i)
                    .map(move |j| (GeneratorId::from_index(i, k), GeneratorId::from_index(j, k)))
            })
            .collect()
    }
}

/// `left[0] + left[1] = right`, all three equality-class representatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SumFact {
    pub left: [GeneratorId; 2],
    pub right: GeneratorId,
}

/// Saturated consequences of a presentation.
#[derive(Debug, Clone)]
pub struct Closure {
    n: usize,
    k: usize,
    null: Vec<bool>,
    zero: BitMatrix,
    rep: Vec<usize>,
    groups: Vec<Vec<GeneratorId>>,
    containing: Vec<Vec<usize>>,
    sum_facts: Vec<SumFact>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.0[hi] = lo;
        true
    }
}

fn mark_null(zero: &mut BitMatrix, null: &mut [bool], g: usize) {
    null[g] = true;
    zero.set_row_all(g);
    for h in 0..null.len() {
        zero.set(h, g);
    }
}

/// Runs the null, absorb, adjoint, equality and propagation rules to a
/// fixpoint, then derives sum facts for three-member groups.
pub fn saturate(p: &Presentation) -> Closure {
    let (n, k) = (p.n, p.k);
    let size = n * k;
    let mut zero = p.seed.clone();
    zero.symmetrize();
    let mut null = vec![false; size];
    let mut uf = UnionFind((0..size).collect());

    loop {
        let mut changed = false;
        for g in 0..size {
            if !null[g] && zero.get(g, g) {
                mark_null(&mut zero, &mut null, g);
                changed = true;
            }
        }

        for g in 0..size {
            if null[g] {
                continue;
            }
            let qg = g / k;
            for qh in 0..n {
                if qh == qg {
                    continue;
                }
                // Members of h's question not yet known orthogonal to g.
                let missing: Vec<usize> = (qh * k..qh * k + k).filter(|&h| !zero.get(g, h)).collect();
                if missing.is_empty() {
                    // g = g·Σ_h e_h = 0.
                    mark_null(&mut zero, &mut null, g);
                    changed = true;
                    break;
                }
                if missing.len() > 1 {
                    continue;
                }
                let h = missing[0];
                if null[h] || uf.find(g) == uf.find(h) {
                    continue;
                }
                let rest_orthogonal = (qg * k..qg * k + k).all(|g2| g2 == g || zero.get(g2, h));
                if rest_orthogonal {
                    uf.union(g, h);
                    changed = true;
                }
            }
        }

        let mut classes: Vec<Vec<usize>> = vec![Vec::new(); size];
        for g in 0..size {
            let r = uf.find(g);
            classes[r].push(g);
        }
        for members in classes.iter().filter(|c| c.len() > 1) {
            let mut merged = zero.row(members[0]).to_vec();
            for &m in &members[1..] {
                for (d, s) in merged.iter_mut().zip(zero.row(m)) {
                    *d |= s;
                }
            }
            for &m in members {
                changed |= zero.or_row_into(&merged, m);
            }
        }
        changed |= zero.symmetrize();
        if !changed {
            break;
        }
    }

    let rep: Vec<usize> = (0..size).map(|g| uf.find(g)).collect();
    let mut groups: Vec<Vec<GeneratorId>> = (0..n)
        .map(|q| {
            let set: BTreeSet<usize> = (q * k..q * k + k).filter(|&g| !null[g]).map(|g| rep[g]).collect();
            set.into_iter().map(|g| GeneratorId::from_index(g, k)).collect()
        })
        .collect();
    for g in groups.iter_mut() {
        g.sort();
    }
    let mut containing = vec![Vec::new(); size];
    for (q, grp) in groups.iter().enumerate() {
        for g in grp {
            containing[g.index(k)].push(q);
        }
    }

    let mut closure = Closure {
        n,
        k,
        null,
        zero,
        rep,
        groups,
        containing,
        sum_facts: Vec::new(),
    };
    closure.sum_facts = closure.derive_sum_facts();
    closure
}

impl Closure {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_null(&self, g: GeneratorId) -> bool {
        self.null[g.index(self.k)]
    }

    pub fn nulls(&self) -> Vec<GeneratorId> {
        (0..self.null.len())
            .filter(|&i| self.null[i])
            .map(|i| GeneratorId::from_index(i, self.k))
            .collect()
    }

    pub fn is_zero_pair(&self, g: GeneratorId, h: GeneratorId) -> bool {
        self.zero.get(g.index(self.k), h.index(self.k))
    }

    pub fn zero_pair_count(&self) -> usize {
        (0..self.null.len()).map(|i| self.zero.iter_row(i).count()).sum()
    }

    /// The class representative (least member), or `None` for a null generator.
    pub fn rep(&self, g: GeneratorId) -> Option<GeneratorId> {
        let i = g.index(self.k);
        (!self.null[i]).then(|| GeneratorId::from_index(self.rep[i], self.k))
    }

    /// Equality classes of non-null generators, each sorted, ordered by representative.
    pub fn classes(&self) -> Vec<Vec<GeneratorId>> {
        let mut by_rep: Vec<Vec<GeneratorId>> = vec![Vec::new(); self.null.len()];
        for i in (0..self.null.len()).filter(|&i| !self.null[i]) {
            by_rep[self.rep[i]].push(GeneratorId::from_index(i, self.k));
        }
        by_rep.into_iter().filter(|c| !c.is_empty()).collect()
    }

    /// Representatives of the non-null generators of `question`.
    pub fn group(&self, question: usize) -> &[GeneratorId] {
        &self.groups[question]
    }

    /// Questions whose group contains the representative `g`.
    pub fn groups_containing(&self, g: GeneratorId) -> &[usize] {
        &self.containing[g.index(self.k)]
    }

    /// True when some question has only null generators, which forces `1 = 0`.
    pub fn is_degenerate(&self) -> bool {
        self.groups.iter().any(Vec::is_empty)
    }

    pub fn sum_facts(&self) -> &[SumFact] {
        &self.sum_facts
    }

    /// A presentation seeded with every derived zero pair.
    pub fn to_presentation(&self) -> Presentation {
        Presentation {
            n: self.n,
            k: self.k,
            seed: self.zero.clone(),
        }
    }

    fn derive_sum_facts(&self) -> Vec<SumFact> {
        let z = |a: GeneratorId, b: GeneratorId| self.is_zero_pair(a, b);
        let mut facts = BTreeSet::new();
        for (x, qs) in self.groups.iter().enumerate() {
            if qs.len() != 3 {
                continue;
            }
            for (y, rs) in self.groups.iter().enumerate() {
                if y == x || rs.len() != 3 {
                    continue;
                }
                for i3 in 0..3 {
                    let q3 = qs[i3];
                    let (q1, q2) = (qs[(i3 + 1) % 3], qs[(i3 + 2) % 3]);
                    for j1 in 0..3 {
                        let r1 = rs[j1];
                        let (r2, r3) = (rs[(j1 + 1) % 3], rs[(j1 + 2) % 3]);
                        let holds = z(r1, q3) && [q1, q2].iter().all(|&q| z(q, r2) && z(q, r3));
                        if holds {
                            facts.insert(SumFact {
                                left: [q1.min(q2), q1.max(q2)],
                                right: r1,
                            });
                        }
                    }
                }
            }
        }
        facts.into_iter().collect()
    }
}
