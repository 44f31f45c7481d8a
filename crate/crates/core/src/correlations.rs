//! Correlations `p(a,b|x,y)` with exact rational entries, their transport
//! along generator maps, and perfect deterministic strategies.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{GeneratorId, GeneratorMap};
use crate::game::Game;
use crate::par::{self, Exec};
use crate::rational::{self, Rational};
use crate::transforms::bisynchronize;
use crate::zoo::trivial_sync;
use crate::{Error, Result};

/// A sparse correlation; absent entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correlation {
    n: usize,
    k: usize,
    entries: BTreeMap<[usize; 4], Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorrelationFile {
    n: usize,
    k: usize,
    entries: Vec<(usize, usize, usize, usize, String)>,
}

impl Correlation {
    pub fn new(n: usize, k: usize) -> Self {
        Correlation {
            n,
            k,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a correlation from `p(a, b, x, y)`.
    pub fn from_fn(n: usize, k: usize, p: impl Fn(usize, usize, usize, usize) -> Rational) -> Self {
        let mut c = Correlation::new(n, k);
        for a in 0..k {
            for b in 0..k {
                for x in 0..n {
                    for y in 0..n {
                        c.add(a, b, x, y, p(a, b, x, y));
                    }
                }
            }
        }
        c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> Rational {
        self.entries.get(&[a, b, x, y]).copied().unwrap_or_else(Rational::zero)
    }

    pub fn add(&mut self, a: usize, b: usize, x: usize, y: usize, v: Rational) {
        if v.is_zero() {
            return;
        }
        let e = self.entries.entry([a, b, x, y]).or_insert_with(Rational::zero);
        *e += v;
        if e.is_zero() {
            self.entries.remove(&[a, b, x, y]);
        }
    }

    /// Nonzero entries keyed by `[a, b, x, y]`.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize; 4], &Rational)> {
        self.entries.iter()
    }

    pub fn scale(&self, s: Rational) -> Correlation {
        let mut out = Correlation::new(self.n, self.k);
        for (&[a, b, x, y], v) in &self.entries {
            out.add(a, b, x, y, *v * s);
        }
        out
    }

    pub fn plus(&self, other: &Correlation) -> Result<Correlation> {
        same_dims(self, other.n, other.k)?;
        let mut out = self.clone();
        for (&[a, b, x, y], v) in &other.entries {
            out.add(a, b, x, y, *v);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let file = CorrelationFile {
            n: self.n,
            k: self.k,
            entries: self
                .entries
                .iter()
                .map(|(&[a, b, x, y], v)| (a, b, x, y, rational::format(v)))
                .collect(),
        };
        serde_json::to_string(&file).expect("correlation serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CorrelationFile = serde_json::from_str(text).map_err(Error::from_json)?;
        let mut c = Correlation::new(file.n, file.k);
        for (a, b, x, y, v) in file.entries {
            if a >= file.k || b >= file.k || x >= file.n || y >= file.n {
                return Err(Error::OutOfRange(format!(
                    "entry ({a},{b},{x},{y}) outside n={}, k={}",
                    file.n, file.k
                )));
            }
            c.add(a, b, x, y, rational::parse(&v)?);
        }
        Ok(c)
    }
}

fn same_dims(c: &Correlation, n: usize, k: usize) -> Result<()> {
    if (c.n, c.k) != (n, k) {
        return Err(Error::Dimension(format!(
            "correlation has n={}, k={}; expected n={n}, k={k}",
            c.n, c.k
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub nonnegative: bool,
    pub normalized: bool,
    pub nonsignalling: bool,
    pub synchronous: bool,
    pub bisynchronous_support: bool,
    pub winning: bool,
}

impl Flags {
    /// Non-signalling, normalized, nonnegative and winning.
    pub fn is_ns_winning(&self) -> bool {
        self.nonnegative && self.normalized && self.nonsignalling && self.winning
    }
}

/// Exact structural checks of `c` against the rules of `g`.
pub fn classify(c: &Correlation, g: &Game) -> Result<Flags> {
    same_dims(c, g.n(), g.k())?;
    let (n, k) = (c.n, c.k);
    let nonnegative = c.entries.values().all(|v| *v >= Rational::zero());
    let mut totals = vec![Rational::zero(); n * n];
    let mut alice = vec![vec![vec![Rational::zero(); n]; k]; n];
    let mut bob = vec![vec![vec![Rational::zero(); n]; k]; n];
    for (&[a, b, x, y], v) in &c.entries {
        totals[x * n + y] += v;
        alice[x][a][y] += v;
        bob[y][b][x] += v;
    }
    let normalized = totals.iter().all(|t| t.is_one());
    let constant =
        |rows: &Vec<Vec<Vec<Rational>>>| rows.iter().flatten().all(|vals| vals.iter().all(|v| *v == vals[0]));
    let nonsignalling = constant(&alice) && constant(&bob);
    let synchronous = c.entries.keys().all(|&[a, b, x, y]| x != y || a == b);
    let bisynchronous_support = synchronous && c.entries.keys().all(|&[a, b, x, y]| a != b || x == y);
    let winning = c.entries.keys().all(|&[a, b, x, y]| g.allowed(a, b, x, y));
    Ok(Flags {
        nonnegative,
        normalized,
        nonsignalling,
        synchronous,
        bisynchronous_support,
        winning,
    })
}

/// A function from questions to answers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy(pub Vec<usize>);

impl DeterministicStrategy {
    pub fn is_perfect(&self, g: &Game) -> bool {
        let f = &self.0;
        f.len() == g.n()
            && f.iter().all(|&a| a < g.k())
            && (0..g.n()).all(|x| (0..g.n()).all(|y| g.allowed(f[x], f[y], x, y)))
    }
}

/// `p(a,b|x,y) = δ_{a,f(x)} δ_{b,f(y)}`.
pub fn strategy_to_correlation(f: &DeterministicStrategy, g: &Game) -> Result<Correlation> {
    if f.0.len() != g.n() || f.0.iter().any(|&a| a >= g.k()) {
        return Err(Error::Dimension(format!(
            "strategy of length {} does not fit n={}, k={}",
            f.0.len(),
            g.n(),
            g.k()
        )));
    }
    let mut c = Correlation::new(g.n(), g.k());
    for x in 0..g.n() {
        for y in 0..g.n() {
            c.add(f.0[x], f.0[y], x, y, Rational::one());
        }
    }
    Ok(c)
}

/// Nodes visited by the default enumeration before giving up.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// `SYNCGAME_BUDGET` if set and valid, else [`DEFAULT_BUDGET`].
pub fn default_budget() -> u64 {
    std::env::var("SYNCGAME_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Debug, Clone, Copy)]
pub struct EnumOptions {
    /// Maximum number of partial assignments explored.
    pub budget: u64,
    pub exec: Exec,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            budget: default_budget(),
            exec: Exec::default(),
        }
    }
}

pub fn enumerate_perfect_deterministic(g: &Game) -> Result<Vec<DeterministicStrategy>> {
    enumerate_with(g, EnumOptions::default())
}

struct Search<'a> {
    g: &'a Game,
    order: Vec<usize>,
    /// For each depth, earlier positions whose questions interact with this one.
    links: Vec<Vec<usize>>,
    candidates: Vec<Vec<usize>>,
    budget: u64,
    /// Nodes counted locally before updating the shared total.
    batch: u64,
    spent: &'a AtomicU64,
}

impl Search<'_> {
    fn fits(&self, depth: usize, a: usize, assigned: &[usize]) -> bool {
        let x = self.order[depth];
        self.links[depth].iter().all(|&d| {
            let (y, b) = (self.order[d], assigned[d]);
            self.g.allowed(a, b, x, y) && self.g.allowed(b, a, y, x)
        })
    }

    fn run(&self, assigned: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, local: &mut u64) -> Result<()> {
        let depth = assigned.len();
        if depth == self.order.len() {
            out.push(assigned.clone());
            return Ok(());
        }
        for &a in &self.candidates[depth] {
            *local += 1;
            if *local >= self.batch {
                let total = self.spent.fetch_add(*local, Ordering::Relaxed) + *local;
                *local = 0;
                if total > self.budget {
                    return Err(Error::Resource(format!(
                        "enumeration exceeded its budget of {} nodes",
                        self.budget
                    )));
                }
            }
            if self.fits(depth, a, assigned) {
                assigned.push(a);
                self.run(assigned, out, local)?;
                assigned.pop();
            }
        }
        Ok(())
    }
}

/// All `f` with `λ(f(x), f(y), x, y) = 1` for every `x, y`, in lexicographic order.
///
/// Backtracks over questions ordered so that each placement is checked
/// against as many earlier placements as possible; `opts.budget` caps the
/// number of visited nodes.
pub fn enumerate_with(g: &Game, opts: EnumOptions) -> Result<Vec<DeterministicStrategy>> {
    if !g.is_synchronous() {
        return Err(Error::Precondition("enumeration needs a synchronous game".into()));
    }
    let (n, k) = (g.n(), g.k());
    if n == 0 {
        return Ok(vec![DeterministicStrategy(Vec::new())]);
    }
    let own: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..k).filter(|&a| g.allowed(a, a, x, x)).collect())
        .collect();
    let interacts =
        |x: usize, y: usize| x != y && (0..k).any(|a| (0..k).any(|b| !g.allowed(a, b, x, y) || !g.allowed(b, a, y, x)));
    let adj: Vec<Vec<bool>> = (0..n).map(|x| (0..n).map(|y| interacts(x, y)).collect()).collect();

    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&x| !placed[x])
            .max_by_key(|&x| {
                let to_placed = order.iter().filter(|&&y| adj[x][y]).count();
                let degree = adj[x].iter().filter(|&&b| b).count();
                (to_placed, std::cmp::Reverse(own[x].len()), degree, std::cmp::Reverse(x))
            })
            .expect("an unplaced question remains");
        placed[next] = true;
        order.push(next);
    }
    let links: Vec<Vec<usize>> = (0..n)
        .map(|d| (0..d).filter(|&e| adj[order[d]][order[e]]).collect())
        .collect();
    let candidates: Vec<Vec<usize>> = order.iter().map(|&x| own[x].clone()).collect();
    let spent = AtomicU64::new(0);
    let search = Search {
        g,
        order,
        links,
        candidates,
        budget: opts.budget,
        batch: (opts.budget / 64).clamp(1, 4096),
        spent: &spent,
    };

    let shards = par::map(opts.exec, &search.candidates[0], |&a| {
        let mut out = Vec::new();
        let mut local = 1;
        let mut assigned = vec![a];
        search.run(&mut assigned, &mut out, &mut local).map(|()| out)
    });
    let mut found = Vec::new();
    for shard in shards {
        for assigned in shard? {
            let mut f = vec![0; n];
            for (d, a) in assigned.into_iter().enumerate() {
                f[search.order[d]] = a;
            }
            found.push(DeterministicStrategy(f));
        }
    }
    found.sort();
    Ok(found)
}

/// `(Φ r)(a,b|x,y) = Σ α_{a,x,c,z} α_{b,y,d,w} r(c,d|z,w)` where `α` holds the
/// coefficients of `m: A(S) → A(T)`; `r` lives on `T` and the result on `S`.
pub fn transport(r: &Correlation, m: &GeneratorMap) -> Result<Correlation> {
    let (tn, tk) = m.target();
    same_dims(r, tn, tk)?;
    let (sn, sk) = m.source();
    let mut preimage: Vec<Vec<(GeneratorId, Rational)>> = vec![Vec::new(); tn * tk];
    for i in 0..sn * sk {
        let e = GeneratorId::from_index(i, sk);
        for (f, alpha) in m.image_terms(e) {
            preimage[f.index(tk)].push((e, alpha));
        }
    }
    let mut out = Correlation::new(sn, sk);
    for (&[c, d, z, w], v) in r.entries() {
        for &(e1, a1) in &preimage[z * tk + c] {
            for &(e2, a2) in &preimage[w * tk + d] {
                out.add(e1.answer, e2.answer, e1.question, e2.question, a1 * a2 * *v);
            }
        }
    }
    Ok(out)
}

/// A product correlation `p(a,b|x,y) = u(a|x) u(b|y)` stored by its
/// single-party response `u`. Deterministic strategies have this form, and
/// [`transport`] preserves it because the transport kernel factors per party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCorrelation {
    n: usize,
    k: usize,
    rows: Vec<Vec<Rational>>,
}

impl ProductCorrelation {
    pub fn from_strategy(f: &DeterministicStrategy, k: usize) -> Result<Self> {
        if f.0.iter().any(|&a| a >= k) {
            return Err(Error::Dimension(format!("strategy answer out of range for k={k}")));
        }
        let rows =
            f.0.iter()
                .map(|&a| {
                    (0..k)
                        .map(|b| if a == b { Rational::one() } else { Rational::zero() })
                        .collect()
                })
                .collect();
        Ok(ProductCorrelation { n: f.0.len(), k, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `u(a|x)`.
    pub fn response(&self, a: usize, x: usize) -> Rational {
        self.rows[x][a]
    }

    /// The strategy `f` when every `u(·|x)` is the indicator of `f(x)`.
    pub fn as_strategy(&self) -> Option<DeterministicStrategy> {
        self.rows
            .iter()
            .map(|row| {
                let mut hit = None;
                for (a, v) in row.iter().enumerate() {
                    if v.is_one() && hit.is_none() {
                        hit = Some(a);
                    } else if !v.is_zero() {
                        return None;
                    }
                }
                hit
            })
            .collect::<Option<Vec<_>>>()
            .map(DeterministicStrategy)
    }

    /// Whether the support of `u(a|x) u(b|y)` avoids every forbidden tuple of `g`.
    pub fn is_winning(&self, g: &Game) -> Result<bool> {
        if (self.n, self.k) != (g.n(), g.k()) {
            return Err(Error::Dimension(format!(
                "product correlation has n={}, k={}; game has n={}, k={}",
                self.n,
                self.k,
                g.n(),
                g.k()
            )));
        }
        let support: Vec<Vec<usize>> = self
            .rows
            .iter()
            .map(|row| (0..self.k).filter(|&a| !row[a].is_zero()).collect())
            .collect();
        Ok((0..self.n).all(|x| {
            (0..self.n).all(|y| {
                support[x]
                    .iter()
                    .all(|&a| support[y].iter().all(|&b| g.allowed(a, b, x, y)))
            })
        }))
    }

    pub fn to_correlation(&self) -> Correlation {
        let mut c = Correlation::new(self.n, self.k);
        for x in 0..self.n {
            for y in 0..self.n {
                for (a, u) in self.rows[x].iter().enumerate().filter(|(_, u)| !u.is_zero()) {
                    for (b, w) in self.rows[y].iter().enumerate().filter(|(_, w)| !w.is_zero()) {
                        c.add(a, b, x, y, *u * *w);
                    }
                }
            }
        }
        c
    }

    /// [`transport`] on product form: `u'(a|x) = Σ α_{a,x,c,z} u(c|z)`.
    pub fn transport(&self, m: &GeneratorMap) -> Result<ProductCorrelation> {
        let (tn, tk) = m.target();
        if (self.n, self.k) != (tn, tk) {
            return Err(Error::Dimension(format!(
                "product correlation has n={}, k={}; map target has n={tn}, k={tk}",
                self.n, self.k
            )));
        }
        let (sn, sk) = m.source();
        let rows = (0..sn)
            .map(|x| {
                (0..sk)
                    .map(|a| {
                        m.image_terms(GeneratorId::new(x, a))
                            .into_iter()
                            .map(|(f, alpha)| alpha * self.rows[f.question][f.answer])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Ok(ProductCorrelation { n: sn, k: sk, rows })
    }
}

/// Recovers `p₀` from `p = δ_{vx} δ_{wy} p₀(a-i, b-j | x, y)` on a
/// bisynchronization over `n` questions and `k` answers, or `None` when `p`
/// has another form.
pub fn decode_bisync(p: &Correlation, n: usize, k: usize) -> Option<Correlation> {
    let size = n * k;
    if (p.n, p.k) != (size, size) {
        return None;
    }
    let split = |v: usize| (v / n, v % n);
    let mut p0: BTreeMap<[usize; 4], Rational> = BTreeMap::new();
    for xq in 0..size {
        for yq in 0..size {
            let ((a, x), (b, y)) = (split(xq), split(yq));
            for ans_a in 0..size {
                for ans_b in 0..size {
                    let ((i, v), (j, w)) = (split(ans_a), split(ans_b));
                    let val = p.get(ans_a, ans_b, xq, yq);
                    if v != x || w != y {
                        if !val.is_zero() {
                            return None;
                        }
                        continue;
                    }
                    let key = [(a + k - i) % k, (b + k - j) % k, x, y];
                    match p0.get(&key) {
                        Some(old) if *old != val => return None,
                        Some(_) => {}
                        None => {
                            p0.insert(key, val);
                        }
                    }
                }
            }
        }
    }
    let mut out = Correlation::new(n, k);
    for ([c, d, x, y], v) in p0 {
        out.add(c, d, x, y, v);
    }
    Some(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Membership {
    pub nonsignalling_winning: bool,
    /// Decodes as `δ_{vx} δ_{wy} p₀(a-i, b-j|x,y)`.
    pub decodes: bool,
    /// The decoded `p₀` is itself a non-signalling winning correlation.
    pub decoded_valid: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub p: Membership,
    pub q: Membership,
    pub r: Membership,
    pub midpoint: bool,
}

impl CounterexampleReport {
    /// p, q, r lie in `C_ns(λ̃)`, `p = (q + r)/2`, `p` is in the range of Φ
    /// and neither `q` nor `r` is.
    pub fn confirms(&self) -> bool {
        [&self.p, &self.q, &self.r].iter().all(|m| m.nonsignalling_winning)
            && self.midpoint
            && self.p.decodes
            && !self.q.decodes
            && !self.r.decodes
    }
}

/// The three correlations p, q, r on the bisynchronization of
/// `trivial_sync(2, 2)` and the checks relating them.
pub fn ns_counterexample() -> Result<(Correlation, Correlation, Correlation, CounterexampleReport)> {
    let (n, k) = (2usize, 2usize);
    let base = trivial_sync(n, k)?;
    let game = bisynchronize(&base)?;
    let size = n * k;
    let half = rational::frac(1, 2);
    let quarter = rational::frac(1, 4);
    let build = |f: &dyn Fn(bool, bool) -> Rational| {
        Correlation::from_fn(size, size, |ans_a, ans_b, xq, yq| {
            let ((i, v), (j, w)) = ((ans_a / n, ans_a % n), (ans_b / n, ans_b % n));
            let ((a, x), (b, y)) = ((xq / n, xq % n), (yq / n, yq % n));
            if v != x || w != y {
                return Rational::zero();
            }
            let same_offset = (a + k - i) % k == (b + k - j) % k;
            f(x == y, same_offset)
        })
    };
    let delta = |b: bool| if b { Rational::one() } else { Rational::zero() };
    let p = build(&|eq, same| if eq { half * delta(same) } else { quarter });
    let q = build(&|_, same| half * delta(same));
    let r = build(&|eq, same| if eq { half * delta(same) } else { half * delta(!same) });

    let member = |c: &Correlation| -> Result<Membership> {
        let flags = classify(c, &game)?;
        let decoded = decode_bisync(c, n, k);
        let decoded_valid = match &decoded {
            Some(p0) => classify(p0, &base)?.is_ns_winning(),
            None => false,
        };
        Ok(Membership {
            nonsignalling_winning: flags.is_ns_winning(),
            decodes: decoded.is_some(),
            decoded_valid,
        })
    };
    let midpoint = q.plus(&r)?.scale(half) == p;
    let report = CounterexampleReport {
        p: member(&p)?,
        q: member(&q)?,
        r: member(&r)?,
        midpoint,
    };
    Ok((p, q, r, report))
}
