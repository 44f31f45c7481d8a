//! Rule-function transformations between synchronous games.
//!
//! Every transform is a pure function of its input game and attaches
//! [`IndexMaps`] describing how the new questions and answers decode.
//! Composite labels are flattened as `block * n + x`, where `n` is the
//! source question count.

use serde::{Deserialize, Serialize};

use crate::game::{Game, IndexMaps};
use crate::{Error, Result};

fn label(g: &Game) -> String {
    g.name.clone().unwrap_or_else(|| "game".into())
}

/// `λ_sym(a,b,x,y) = λ(a,b,x,y) λ(b,a,y,x)`.
pub fn symmetrize(g: &Game) -> Game {
    let out = Game::from_fn(g.n(), g.k(), |a, b, x, y| {
        g.allowed(a, b, x, y) && g.allowed(b, a, y, x)
    });
    out.with_name(format!("sym({})", label(g))).with_index_maps(IndexMaps {
        transform: "symmetrize".into(),
        source_n: g.n(),
        source_k: g.k(),
        questions: (0..g.n()).map(|x| vec![x]).collect(),
        answers: Vec::new(),
    })
}

fn require_synchronous(g: &Game, what: &str) -> Result<()> {
    if g.is_synchronous() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} needs a synchronous game")))
    }
}

/// Bisynchronous game on `O × I` questions and `O × I` answers.
///
/// Question `(a, x)` and answer `(i, v)` are both flattened as `a * n + x`.
/// A pair of rounds is rejected when an answer names the wrong source
/// question, when equal answers meet distinct questions, or when distinct
/// answers meet equal questions; otherwise the source rule is consulted at
/// the offsets `(a - i) mod k` and `(b - j) mod k`.
pub fn bisynchronize(g: &Game) -> Result<Game> {
    require_synchronous(g, "bisynchronize")?;
    let (n, k) = (g.n(), g.k());
    let size = n * k;
    let split = |p: usize| (p / n, p % n);
    let offset = |a: usize, i: usize| (a + k - i) % k;

    // Zero rules and the source-valued rule never disagree on a synchronous
    // input; scan every cell the two can both reach.
    for ans in 0..size {
        let (i, v) = split(ans);
        let x = v;
        for a in 0..k {
            let xq = a * n + x;
            // Equal answers on distinct questions (necessarily b != a, same x).
            for b in (0..k).filter(|&b| b != a) {
                if g.allowed(offset(a, i), offset(b, i), x, x) {
                    return Err(Error::Construction(format!(
                        "bisynchronize: answer {ans} allowed on distinct questions {xq}, {}",
                        b * n + x
                    )));
                }
            }
            // Distinct answers on equal questions.
            for j in (0..k).filter(|&j| j != i) {
                if g.allowed(offset(a, i), offset(a, j), x, x) {
                    return Err(Error::Construction(format!(
                        "bisynchronize: answers {ans}, {} allowed on question {xq}",
                        j * n + x
                    )));
                }
            }
        }
    }

    let out = Game::from_fn(size, size, |ans_a, ans_b, xq, yq| {
        let ((i, v), (j, w)) = (split(ans_a), split(ans_b));
        let ((a, x), (b, y)) = (split(xq), split(yq));
        let rejected = v != x || w != y || (ans_a == ans_b && xq != yq) || (xq == yq && ans_a != ans_b);
        !rejected && g.allowed(offset(a, i), offset(b, j), x, y)
    });
    let pairs: Vec<Vec<usize>> = (0..size).map(|p| vec![p / n, p % n]).collect();
    Ok(out
        .with_name(format!("bisync({})", label(g)))
        .with_index_maps(IndexMaps {
            transform: "bisync".into(),
            source_n: n,
            source_k: k,
            questions: pairs.clone(),
            answers: pairs,
        }))
}

/// Symmetric three-output game on `(k - 2) * n` questions.
///
/// Question `(c, x)` with block `c in 0..k-2` is flattened as `c * n + x`.
/// A non-symmetric input is symmetrized first; the result carries the same
/// game algebra either way.
pub fn three_output_reduce(g: &Game) -> Result<Game> {
    require_synchronous(g, "three_output_reduce")?;
    let (n, k) = (g.n(), g.k());
    if k <= 3 {
        return Err(Error::Precondition(format!(
            "three_output_reduce needs k > 3 (got {k})"
        )));
    }
    let sym;
    let g = if g.is_symmetric() {
        g
    } else {
        sym = symmetrize(g);
        &sym
    };
    let blocks = k - 2;
    let last = blocks - 1;
    let size = blocks * n;
    let cell = |i: usize, j: usize, p: usize, q: usize| ((i * 3 + j) * size + p) * size + q;
    let mut lam: Vec<Option<bool>> = vec![None; 9 * size * size];
    let mut forced_zero = vec![false; 9 * size * size];

    let assign = |lam: &mut Vec<Option<bool>>, idx: usize, v: bool| -> Result<()> {
        match lam[idx] {
            Some(old) if old != v => Err(Error::Construction(format!(
                "three_output_reduce: source-valued rules disagree on cell {idx}"
            ))),
            _ => {
                lam[idx] = Some(v);
                Ok(())
            }
        }
    };

    for x in 0..n {
        for y in 0..n {
            let q = |c: usize, z: usize| c * n + z;
            assign(&mut lam, cell(0, 0, q(0, x), q(0, y)), g.allowed(0, 0, x, y))?;
            for c in 0..blocks {
                assign(&mut lam, cell(0, 1, q(0, x), q(c, y)), g.allowed(0, c + 1, x, y))?;
            }
            assign(&mut lam, cell(0, 2, q(0, x), q(last, y)), g.allowed(0, k - 1, x, y))?;
            for c in 0..blocks {
                for d in 0..blocks {
                    assign(&mut lam, cell(1, 1, q(c, x), q(d, y)), g.allowed(c + 1, d + 1, x, y))?;
                }
                assign(&mut lam, cell(1, 2, q(c, x), q(last, y)), g.allowed(c + 1, k - 1, x, y))?;
            }
            assign(
                &mut lam,
                cell(2, 2, q(last, x), q(last, y)),
                g.allowed(k - 1, k - 1, x, y),
            )?;
        }
        for c in 0..last {
            let (lo, hi) = (c * n + x, (c + 1) * n + x);
            forced_zero[cell(0, 2, hi, lo)] = true;
            for i in 0..2 {
                for j in 1..3 {
                    forced_zero[cell(i, j, lo, hi)] = true;
                }
            }
        }
    }
    // Distinct answers to one question collide.
    for p in 0..size {
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    forced_zero[cell(i, j, p, p)] = true;
                }
            }
        }
    }

    let mut mu = vec![true; 9 * size * size];
    for idx in 0..mu.len() {
        if forced_zero[idx] && lam[idx] == Some(true) {
            return Err(Error::Construction(format!(
                "three_output_reduce: zero rule overrides an allowed source cell ({idx})"
            )));
        }
        mu[idx] = lam[idx].unwrap_or(true) && !forced_zero[idx];
    }
    let out = Game::from_fn(size, 3, |i, j, p, q| mu[cell(i, j, p, q)] && mu[cell(j, i, q, p)]);
    for i in 0..3 {
        for j in 0..3 {
            for p in 0..size {
                for q in 0..size {
                    if lam[cell(i, j, p, q)] == Some(true) && !out.allowed(i, j, p, q) {
                        return Err(Error::Construction(format!(
                            "three_output_reduce: symmetrization drops allowed cell ({i},{j},{p},{q})"
                        )));
                    }
                }
            }
        }
    }
    Ok(out
        .with_name(format!("threeout({})", label(g)))
        .with_index_maps(IndexMaps {
            transform: "threeout".into(),
            source_n: n,
            source_k: k,
            questions: (0..size).map(|p| vec![p / n, p % n]).collect(),
            answers: Vec::new(),
        }))
}

/// A generator of a three-output game as `(answer, question)`.
pub type GenLabel = (usize, usize);

/// Relations of a zero/relation presentation: generators listed in `zero_set`
/// vanish and each pair in `relations` is equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroRelationSpec {
    pub n: usize,
    #[serde(rename = "Z")]
    pub zero_set: Vec<GenLabel>,
    #[serde(rename = "R")]
    pub relations: Vec<(GenLabel, GenLabel)>,
}

impl ZeroRelationSpec {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ZeroRelationSpec = serde_json::from_str(text).map_err(Error::from_json)?;
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        let ok = |&(a, x): &GenLabel| a < 3 && x < self.n;
        let bad = self
            .zero_set
            .iter()
            .chain(self.relations.iter().flat_map(|(l, r)| [l, r]))
            .find(|g| !ok(g));
        match bad {
            Some(g) => Err(Error::OutOfRange(format!(
                "generator {g:?} outside 3 answers x {} questions",
                self.n
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ZrOptions {
    /// Keep one of each `{(a,b,x,y), (b,a,y,x)}` pair of zero tuples.
    pub dedupe_symmetric: bool,
}

/// The zero tuples that become new questions, in lexicographic order.
pub fn zr_tuples(g: &Game, opts: ZrOptions) -> Vec<[usize; 4]> {
    g.zeros()
        .filter(|&[a, b, x, y]| {
            let t = [b, a, y, x];
            !opts.dedupe_symmetric || [a, b, x, y] <= t || g.allowed(b, a, y, x)
        })
        .collect()
}

/// Three-output game on `I ⊔ λ⁻¹(0)` whose algebra is presented by equalities.
///
/// Question `x < n` is the source question; question `n + i` is the `i`-th
/// zero tuple `t = (a, b, x, y)`. Answer 0 at `t` copies `e_{a,x}`, answer 1
/// copies `e_{b,y}`. The emitted game is symmetrized.
pub fn zero_relation_normalize(g: &Game, opts: ZrOptions) -> Result<(Game, ZeroRelationSpec)> {
    require_synchronous(g, "zero_relation_normalize")?;
    if g.k() != 3 {
        return Err(Error::Precondition(format!(
            "zero_relation_normalize needs k = 3 (got {}); reduce to three outputs first",
            g.k()
        )));
    }
    let n = g.n();
    let tuples = zr_tuples(g, opts);
    let size = n + tuples.len();
    let mut zero = vec![false; 9 * size * size];
    let cell = |i: usize, j: usize, p: usize, q: usize| ((i * 3 + j) * size + p) * size + q;
    for p in 0..size {
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    zero[cell(i, j, p, p)] = true;
                }
            }
        }
    }
    let mut relations = Vec::with_capacity(2 * tuples.len());
    for (idx, &[a, b, x, y]) in tuples.iter().enumerate() {
        let t = n + idx;
        for i in [1, 2] {
            zero[cell(a, i, x, t)] = true;
        }
        for j in (0..3).filter(|&j| j != a) {
            zero[cell(j, 0, x, t)] = true;
        }
        for i in [0, 2] {
            zero[cell(b, i, y, t)] = true;
        }
        for j in (0..3).filter(|&j| j != b) {
            zero[cell(j, 1, y, t)] = true;
        }
        relations.push(((0, t), (a, x)));
        relations.push(((1, t), (b, y)));
    }
    let out = Game::from_fn(size, 3, |i, j, p, q| !zero[cell(i, j, p, q)] && !zero[cell(j, i, q, p)]);
    let mut questions: Vec<Vec<usize>> = (0..n).map(|x| vec![x]).collect();
    questions.extend(tuples.iter().map(|t| t.to_vec()));
    let out = out.with_name(format!("zr({})", label(g))).with_index_maps(IndexMaps {
        transform: "zr".into(),
        source_n: n,
        source_k: 3,
        questions,
        answers: Vec::new(),
    });
    let spec = ZeroRelationSpec {
        n: size,
        zero_set: Vec::new(),
        relations,
    };
    Ok((out, spec))
}

/// Encodes a zero/relation presentation as a symmetric synchronous rule function.
pub fn zr_to_game(spec: &ZeroRelationSpec) -> Result<Game> {
    spec.check()?;
    let size = spec.n;
    let cell = |i: usize, j: usize, p: usize, q: usize| ((i * 3 + j) * size + p) * size + q;
    let mut zero = vec![false; 9 * size * size];
    for p in 0..size {
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    zero[cell(i, j, p, p)] = true;
                }
            }
        }
    }
    for &(a, x) in &spec.zero_set {
        for b in 0..3 {
            for y in 0..size {
                zero[cell(a, b, x, y)] = true;
                zero[cell(b, a, y, x)] = true;
            }
        }
    }
    for &((a, x), (b, y)) in &spec.relations {
        for other in (0..3).filter(|&c| c != a) {
            zero[cell(other, b, x, y)] = true;
        }
        for other in (0..3).filter(|&c| c != b) {
            zero[cell(a, other, x, y)] = true;
        }
    }
    Ok(Game::from_fn(size, 3, |i, j, p, q| !zero[cell(i, j, p, q)] && !zero[cell(j, i, q, p)]).with_name("zr_spec"))
}

/// The transforms reachable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    #[serde(rename = "sym")]
    Symmetrize,
    Bisync,
    #[serde(rename = "threeout")]
    ThreeOut,
    #[serde(rename = "zr")]
    ZeroRelation,
}

impl TransformKind {
    pub const ALL: [TransformKind; 4] = [
        TransformKind::Symmetrize,
        TransformKind::Bisync,
        TransformKind::ThreeOut,
        TransformKind::ZeroRelation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Symmetrize => "sym",
            TransformKind::Bisync => "bisync",
            TransformKind::ThreeOut => "threeout",
            TransformKind::ZeroRelation => "zr",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "sym" | "symmetrize" => Ok(TransformKind::Symmetrize),
            "bisync" => Ok(TransformKind::Bisync),
            "threeout" => Ok(TransformKind::ThreeOut),
            "zr" => Ok(TransformKind::ZeroRelation),
            other => Err(Error::Domain(format!("unknown transform {other:?}"))),
        }
    }

    /// Whether the transform (and its builtin generator maps) accepts `g` as is.
    pub fn applies_to(self, g: &Game) -> bool {
        g.is_synchronous()
            && match self {
                TransformKind::Symmetrize | TransformKind::Bisync => true,
                TransformKind::ThreeOut => g.k() > 3,
                TransformKind::ZeroRelation => g.k() == 3,
            }
    }

    /// Applies the transform. `zr` on a game with more than three answers
    /// reduces to three outputs first.
    pub fn apply(self, g: &Game, opts: ZrOptions) -> Result<Game> {
        match self {
            TransformKind::Symmetrize => Ok(symmetrize(g)),
            TransformKind::Bisync => bisynchronize(g),
            TransformKind::ThreeOut => three_output_reduce(g),
            TransformKind::ZeroRelation if g.k() > 3 => Ok(zero_relation_normalize(&three_output_reduce(g)?, opts)?.0),
            TransformKind::ZeroRelation => Ok(zero_relation_normalize(g, opts)?.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{complete_graph, hom_game, trivial_sync};

    fn hom(m: usize, c: usize) -> Game {
        hom_game(&complete_graph(m).unwrap(), &complete_graph(c).unwrap()).unwrap()
    }

    #[test]
    fn symmetrize_examples() {
        let g = trivial_sync(2, 2).unwrap();
        assert!(symmetrize(&g).same_rules(&g));
        let g = hom(3, 3);
        assert!(symmetrize(&g).same_rules(&g));

        // λ(0,1,0,1)=1 but λ(1,0,1,0)=0.
        let g = Game::from_fn(2, 2, |a, b, x, y| {
            if x == y {
                a == b
            } else {
                !(a == 1 && b == 0 && x == 1 && y == 0)
            }
        });
        assert!(g.allowed(0, 1, 0, 1));
        let s = symmetrize(&g);
        assert!(!s.allowed(0, 1, 0, 1) && s.is_symmetric());
        assert!(symmetrize(&s).same_rules(&s));
    }

    /// The four bisynchronization rules evaluated literally, in their listed order.
    fn bisync_oracle(
        g: &Game,
        ans_a: (usize, usize),
        ans_b: (usize, usize),
        qx: (usize, usize),
        qy: (usize, usize),
    ) -> bool {
        let k = g.k() as i64;
        let ((i, v), (j, w), (a, x), (b, y)) = (ans_a, ans_b, qx, qy);
        if v != x || w != y {
            return false;
        }
        if ans_a == ans_b && qx != qy {
            return false;
        }
        if qx == qy && ans_a != ans_b {
            return false;
        }
        let off = |p: usize, q: usize| (p as i64 - q as i64).rem_euclid(k) as usize;
        g.allowed(off(a, i), off(b, j), x, y)
    }

    #[test]
    fn bisync_matches_rule_table() {
        for src in [
            trivial_sync(1, 2).unwrap(),
            trivial_sync(2, 2).unwrap(),
            hom(3, 3),
            hom(2, 3),
        ] {
            let (n, k) = (src.n(), src.k());
            let out = bisynchronize(&src).unwrap();
            assert_eq!((out.n(), out.k()), (n * k, n * k));
            assert!(out.is_bisynchronous());
            let pair = |p: usize| (p / n, p % n);
            for a in 0..n * k {
                for b in 0..n * k {
                    for x in 0..n * k {
                        for y in 0..n * k {
                            assert_eq!(
                                out.allowed(a, b, x, y),
                                bisync_oracle(&src, pair(a), pair(b), pair(x), pair(y))
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bisync_of_trivial_one_two() {
        // Allowed exactly when a - i ≡ b - j (mod 2): 8 of the 16 tuples.
        let out = bisynchronize(&trivial_sync(1, 2).unwrap()).unwrap();
        let mut allowed = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        if out.allowed(i, j, a, b) {
                            allowed.push([i, j, a, b]);
                        }
                    }
                }
            }
        }
        assert_eq!(allowed.len(), 8);
        assert!(allowed.iter().all(|&[i, j, a, b]| (a + 2 - i) % 2 == (b + 2 - j) % 2));
    }

    #[test]
    fn bisync_sizes_and_preconditions() {
        let out = bisynchronize(&hom(5, 4)).unwrap();
        assert_eq!((out.n(), out.k()), (20, 20));
        assert!(out.is_bisynchronous());
        // Already bisynchronous with n = k: no shortcut.
        let out = bisynchronize(&hom(3, 3)).unwrap();
        assert_eq!(out.n(), 9);
        let non_sync = Game::from_fn(1, 2, |_, _, _, _| true);
        assert!(matches!(bisynchronize(&non_sync), Err(Error::Precondition(_))));
        let maps = out.index_maps.unwrap();
        assert_eq!(maps.questions[4], vec![1, 1]);
    }

    #[test]
    fn three_output_examples() {
        let out = three_output_reduce(&hom(5, 4)).unwrap();
        assert_eq!((out.n(), out.k()), (10, 3));
        assert!(out.is_synchronous() && out.is_symmetric());
        assert_eq!(three_output_reduce(&trivial_sync(3, 6).unwrap()).unwrap().n(), 12);

        let out = three_output_reduce(&trivial_sync(1, 4).unwrap()).unwrap();
        assert_eq!((out.n(), out.k()), (2, 3));
        // (r_a, f_3) orthogonality: answer 0 at block 1 against answer 2 at block 0.
        assert!(!out.allowed(0, 2, 1, 0));
        assert!(!out.allowed(2, 0, 0, 1));

        assert!(matches!(
            three_output_reduce(&trivial_sync(2, 3).unwrap()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn three_output_symmetrizes_first() {
        let g = Game::from_fn(
            2,
            4,
            |a, b, x, y| if x == y { a == b } else { !(a == 0 && b == 3 && x == 0) },
        );
        assert!(!g.is_symmetric());
        let direct = three_output_reduce(&g).unwrap();
        let via = three_output_reduce(&symmetrize(&g)).unwrap();
        assert!(direct.same_rules(&via));
    }

    #[test]
    fn zr_examples() {
        let g = trivial_sync(1, 3).unwrap();
        let (out, spec) = zero_relation_normalize(&g, ZrOptions::default()).unwrap();
        assert_eq!(out.n(), 7);
        assert_eq!(spec.n, 7);
        assert_eq!(spec.relations.len(), 12);
        assert!(spec.zero_set.is_empty());
        assert!(out.is_synchronous() && out.is_symmetric());

        let (dedup, spec_d) = zero_relation_normalize(&g, ZrOptions { dedupe_symmetric: true }).unwrap();
        assert_eq!(dedup.n(), 1 + 3);
        assert_eq!(spec_d.relations.len(), 6);

        assert!(matches!(
            zero_relation_normalize(&trivial_sync(1, 4).unwrap(), ZrOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zr_spec_encoding() {
        let spec = ZeroRelationSpec {
            n: 2,
            zero_set: vec![],
            relations: vec![],
        };
        assert!(zr_to_game(&spec).unwrap().same_rules(&trivial_sync(2, 3).unwrap()));

        let spec = ZeroRelationSpec {
            n: 2,
            zero_set: vec![(0, 0)],
            relations: vec![],
        };
        let g = zr_to_game(&spec).unwrap();
        for b in 0..3 {
            for y in 0..2 {
                assert!(!g.allowed(0, b, 0, y) && !g.allowed(b, 0, y, 0));
            }
        }
        assert!(g.allowed(1, 1, 0, 1));

        for src in [trivial_sync(1, 3).unwrap(), trivial_sync(2, 3).unwrap(), hom(3, 3)] {
            for dedupe_symmetric in [false, true] {
                let (out, spec) = zero_relation_normalize(&src, ZrOptions { dedupe_symmetric }).unwrap();
                assert!(zr_to_game(&spec).unwrap().same_rules(&out));
            }
        }
        let bad = ZeroRelationSpec {
            n: 1,
            zero_set: vec![(3, 0)],
            relations: vec![],
        };
        assert!(zr_to_game(&bad).is_err());
    }

    #[test]
    fn zr_spec_json() {
        let (_, spec) = zero_relation_normalize(&trivial_sync(1, 3).unwrap(), ZrOptions::default()).unwrap();
        let text = spec.to_json();
        assert!(text.starts_with(r#"{"n":7,"Z":[],"R":[[[0,1],[0,0]]"#), "{text}");
        assert_eq!(ZeroRelationSpec::from_json(&text).unwrap(), spec);
        assert!(ZeroRelationSpec::from_json(r#"{"n":1,"Z":[[0,4]],"R":[]}"#).is_err());
    }
}
