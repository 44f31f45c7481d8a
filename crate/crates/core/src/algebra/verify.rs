use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde::Serialize;

use super::closure::{presentation_of, saturate, Closure, Presentation};
use super::maps::{GeneratorMap, MapPair};
use super::oracle::DetOracle;
use super::poly::{GeneratorId, Poly, TermJson};
use super::reduce::{reduce_with, ReduceConfig};
use crate::game::Game;
use crate::par::{self, Exec};
use crate::transforms::bisynchronize;
use crate::{Error, Result};

/// A game together with its presentation and saturated closure.
#[derive(Debug)]
pub struct GameAlgebra {
    game: Game,
    presentation: Presentation,
    closure: Closure,
    oracle: OnceLock<Option<DetOracle>>,
}

impl GameAlgebra {
    pub fn new(game: Game) -> Result<Self> {
        let presentation = presentation_of(&game)?;
        let closure = saturate(&presentation);
        Ok(GameAlgebra {
            game,
            presentation,
            closure,
            oracle: OnceLock::new(),
        })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    /// Deterministic-representation oracle, or `None` when enumeration
    /// exceeds its budget.
    pub fn oracle(&self) -> Option<&DetOracle> {
        self.oracle.get_or_init(|| DetOracle::new(&self.game).ok()).as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Proven,
    Unverified,
    /// Not zero: some deterministic strategy evaluates it to a nonzero value.
    Failed,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub exec: Exec,
    /// Also evaluate every certified polynomial in the deterministic
    /// representations and count disagreements.
    pub cross_check: bool,
    pub reduce: ReduceConfig,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub category: &'static str,
    pub label: String,
    pub poly: Poly,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub check: String,
    pub status: Status,
    pub residual: Vec<TermJson>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CategoryReport {
    pub category: String,
    pub total: usize,
    pub proven: usize,
    pub unverified: usize,
    pub failed: usize,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructuralCheck {
    pub name: String,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct OracleSummary {
    /// Certified polynomials that were also evaluated by the oracle.
    pub cross_checked: usize,
    /// Certified polynomials the oracle found nonzero (must stay 0).
    pub discrepancies: usize,
    /// Checks for which no oracle was available.
    pub skipped: usize,
}

impl OracleSummary {
    pub fn absorb(&mut self, other: OracleSummary) {
        self.cross_checked += other.cross_checked;
        self.discrepancies += other.discrepancies;
        self.skipped += other.skipped;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub title: String,
    pub categories: Vec<CategoryReport>,
    pub structural: Vec<StructuralCheck>,
    pub oracle: OracleSummary,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            categories: Vec::new(),
            structural: Vec::new(),
            oracle: OracleSummary::default(),
        }
    }

    pub fn all_proven(&self) -> bool {
        self.categories.iter().all(|c| c.proven == c.total) && self.structural.iter().all(|s| s.ok)
    }

    /// `(total, proven, unverified, failed)` over all categories.
    pub fn totals(&self) -> (usize, usize, usize, usize) {
        self.categories.iter().fold((0, 0, 0, 0), |acc, c| {
            (
                acc.0 + c.total,
                acc.1 + c.proven,
                acc.2 + c.unverified,
                acc.3 + c.failed,
            )
        })
    }

    pub fn extend(&mut self, other: Report) {
        self.categories.extend(other.categories.into_iter().map(|mut c| {
            if !other.title.is_empty() {
                c.category = format!("{}/{}", other.title, c.category);
            }
            c
        }));
        self.structural.extend(other.structural.into_iter().map(|mut s| {
            if !other.title.is_empty() {
                s.name = format!("{}/{}", other.title, s.name);
            }
            s
        }));
        self.oracle.absorb(other.oracle);
    }

    fn push_checks(&mut self, alg: &GameAlgebra, checks: Vec<Check>, opts: VerifyOptions) -> Result<()> {
        let (cats, oracle) = run_checks(alg, checks, opts)?;
        self.categories.extend(cats);
        self.oracle.absorb(oracle);
        Ok(())
    }
}

struct Outcome {
    status: Status,
    residual: Poly,
    cross_checked: bool,
    discrepancy: bool,
    skipped: bool,
}

fn run_one(alg: &GameAlgebra, check: &Check, opts: VerifyOptions) -> Result<Outcome> {
    let residual = reduce_with(&check.poly, alg.closure(), opts.reduce)?;
    let mut out = Outcome {
        status: Status::Proven,
        residual,
        cross_checked: false,
        discrepancy: false,
        skipped: false,
    };
    let needs_oracle = !out.residual.is_zero() || (opts.cross_check && !check.poly.is_zero());
    if !needs_oracle {
        return Ok(out);
    }
    let Some(oracle) = alg.oracle() else {
        out.skipped = true;
        if !out.residual.is_zero() {
            out.status = Status::Unverified;
        }
        return Ok(out);
    };
    let nonzero = oracle.find_counterexample(&check.poly).is_some();
    if out.residual.is_zero() {
        out.cross_checked = true;
        out.discrepancy = nonzero;
    } else {
        out.status = if nonzero { Status::Failed } else { Status::Unverified };
    }
    Ok(out)
}

/// Reduces every check in `alg`, grouping outcomes by category in first-seen order.
pub fn run_checks(
    alg: &GameAlgebra,
    checks: Vec<Check>,
    opts: VerifyOptions,
) -> Result<(Vec<CategoryReport>, OracleSummary)> {
    let outcomes = par::map(opts.exec, &checks, |c| run_one(alg, c, opts));
    let mut order: Vec<&'static str> = Vec::new();
    let mut cats: BTreeMap<&'static str, CategoryReport> = BTreeMap::new();
    let mut oracle = OracleSummary::default();
    for (check, outcome) in checks.iter().zip(outcomes) {
        let outcome = outcome?;
        let cat = cats.entry(check.category).or_insert_with(|| {
            order.push(check.category);
            CategoryReport {
                category: check.category.to_string(),
                ..CategoryReport::default()
            }
        });
        cat.total += 1;
        match outcome.status {
            Status::Proven => cat.proven += 1,
            Status::Unverified => cat.unverified += 1,
            Status::Failed => cat.failed += 1,
        }
        if outcome.status != Status::Proven {
            cat.failures.push(Failure {
                check: check.label.clone(),
                status: outcome.status,
                residual: outcome.residual.to_json(),
            });
        }
        oracle.cross_checked += usize::from(outcome.cross_checked);
        oracle.discrepancies += usize::from(outcome.discrepancy);
        oracle.skipped += usize::from(outcome.skipped);
    }
    let cats = order.into_iter().map(|c| cats.remove(c).expect("recorded")).collect();
    Ok((cats, oracle))
}

fn check_shape(map: &GeneratorMap, src: &GameAlgebra, tgt: &GameAlgebra) -> Result<()> {
    let s = (src.game().n(), src.game().k());
    let t = (tgt.game().n(), tgt.game().k());
    if map.source() != s || map.target() != t {
        return Err(Error::Dimension(format!(
            "map {:?} -> {:?} does not fit games {s:?} -> {t:?}",
            map.source(),
            map.target()
        )));
    }
    Ok(())
}

/// Checks that `map` respects the defining relations of the source algebra.
pub fn hom_checks(src: &GameAlgebra, map: &GeneratorMap) -> Vec<Check> {
    let (n, k) = (src.game().n(), src.game().k());
    let mut checks = Vec::new();
    for i in 0..n * k {
        let e = GeneratorId::from_index(i, k);
        let img = map.image(e);
        checks.push(Check {
            category: "idempotent",
            label: format!("{e}"),
            poly: &(img * img) - img,
        });
    }
    for x in 0..n {
        let mut sum = Poly::zero();
        for a in 0..k {
            sum = &sum + map.image(GeneratorId::new(x, a));
        }
        checks.push(Check {
            category: "complete",
            label: format!("question {x}"),
            poly: &sum - &Poly::one(),
        });
    }
    for (e, f) in src.presentation().seed_pairs() {
        checks.push(Check {
            category: "zero-preserving",
            label: format!("{e}*{f}"),
            poly: map.image(e) * map.image(f),
        });
    }
    checks
}

pub fn verify_hom(src: &GameAlgebra, tgt: &GameAlgebra, map: &GeneratorMap, opts: VerifyOptions) -> Result<Report> {
    check_shape(map, src, tgt)?;
    let mut report = Report::new("hom");
    report.structural.push(StructuralCheck {
        name: "self-adjoint images".into(),
        ok: map.is_structurally_self_adjoint(),
    });
    report.push_checks(tgt, hom_checks(src, map), opts)?;
    Ok(report)
}

fn roundtrip_checks(
    alg: &GameAlgebra,
    there: &GeneratorMap,
    back: &GeneratorMap,
    category: &'static str,
) -> Vec<Check> {
    let (n, k) = (alg.game().n(), alg.game().k());
    (0..n * k)
        .map(|i| {
            let e = GeneratorId::from_index(i, k);
            let round = back.apply(there.image(e));
            Check {
                category,
                label: format!("{e}"),
                poly: &round - &Poly::generator(e),
            }
        })
        .collect()
}

/// Round trips on both sides only; assumes both maps are homomorphisms.
pub fn inverse_report(
    src: &GameAlgebra,
    tgt: &GameAlgebra,
    forward: &GeneratorMap,
    backward: &GeneratorMap,
    opts: VerifyOptions,
) -> Result<Report> {
    check_shape(forward, src, tgt)?;
    check_shape(backward, tgt, src)?;
    let mut report = Report::new("inverse");
    report.push_checks(src, roundtrip_checks(src, forward, backward, "source-roundtrip"), opts)?;
    report.push_checks(tgt, roundtrip_checks(tgt, backward, forward, "target-roundtrip"), opts)?;
    Ok(report)
}

/// Round-trip checks, after confirming both maps are homomorphisms.
pub fn verify_mutual_inverse(
    src: &GameAlgebra,
    tgt: &GameAlgebra,
    forward: &GeneratorMap,
    backward: &GeneratorMap,
    opts: VerifyOptions,
) -> Result<Report> {
    for (name, map, a, b) in [("forward", forward, src, tgt), ("backward", backward, tgt, src)] {
        if !verify_hom(a, b, map, opts)?.all_proven() {
            return Err(Error::Precondition(format!(
                "{name} map is not verified as a homomorphism"
            )));
        }
    }
    inverse_report(src, tgt, forward, backward, opts)
}

/// Both homomorphism reports and the round trips for a builtin map pair.
pub fn verify_pair(pair: &MapPair, opts: VerifyOptions) -> Result<Report> {
    let src = GameAlgebra::new(pair.source.clone())?;
    let tgt = GameAlgebra::new(pair.target.clone())?;
    verify_pair_in(pair, &src, &tgt, opts)
}

pub fn verify_pair_in(pair: &MapPair, src: &GameAlgebra, tgt: &GameAlgebra, opts: VerifyOptions) -> Result<Report> {
    let mut report = Report::new(pair.kind.name());
    let mut fwd = verify_hom(src, tgt, &pair.forward, opts)?;
    fwd.title = "forward".into();
    report.extend(fwd);
    let mut bwd = verify_hom(tgt, src, &pair.backward, opts)?;
    bwd.title = "backward".into();
    report.extend(bwd);
    report.extend(inverse_report(src, tgt, &pair.forward, &pair.backward, opts)?);
    Ok(report)
}

/// `Σ_{(a,y)} f_{(i,x),(a,y)} = 1` for every answer `(i, x)` of a
/// bisynchronized game over `source_n` questions.
pub fn row_sum_report(bisync: &GameAlgebra, source_n: usize, opts: VerifyOptions) -> Result<Report> {
    let size = bisync.game().n();
    if source_n == 0 || !size.is_multiple_of(source_n) || bisync.game().k() != size {
        return Err(Error::Dimension(format!(
            "game with {size} questions is not a bisynchronization over {source_n} questions"
        )));
    }
    let checks = (0..size)
        .map(|answer| Check {
            category: "row-sums",
            label: format!("answer {answer}"),
            poly: &Poly::sum_of((0..size).map(|q| GeneratorId::new(q, answer))) - &Poly::one(),
        })
        .collect();
    let mut report = Report::new("rowsums");
    report.push_checks(bisync, checks, opts)?;
    Ok(report)
}

/// Nulls and equality classes of a bisynchronized algebra compared with the
/// closed forms predicted from the source game.
#[derive(Debug, Clone, Serialize)]
pub struct BisyncStructure {
    /// The source closure has no nulls and no nontrivial equalities.
    pub source_trivial: bool,
    /// Every `f_{(i,v),(a,x)}` with `v ≠ x` is null and every
    /// `(x, (a - i) mod k)` family lies in one class.
    pub closed_form_derived: bool,
    /// Nulls are exactly `v ≠ x`.
    pub closed_form_nulls: bool,
    /// Classes are exactly the `(x, (a - i) mod k)` families, each of size `k`.
    pub closed_form_classes: bool,
    /// Nulls and classes are exactly the preimages of the source closure
    /// under `f_{(i,x),(a,x)} ↦ e_{(a - i) mod k, x}`.
    pub pullback_nulls: bool,
    pub pullback_classes: bool,
}

impl BisyncStructure {
    /// Closed forms derived, exact against the source closure, and exact on
    /// the nose whenever the source closure is trivial.
    pub fn holds(&self) -> bool {
        self.closed_form_derived
            && self.pullback_nulls
            && self.pullback_classes
            && (!self.source_trivial || (self.closed_form_nulls && self.closed_form_classes))
    }
}

pub fn bisync_structure(src: &Closure, bisync: &Closure) -> BisyncStructure {
    let (n, k) = (src.n(), src.k());
    let size = n * k;
    let decode = |f: GeneratorId| {
        let (a, x) = (f.question / n, f.question % n);
        let (i, v) = (f.answer / n, f.answer % n);
        (v == x).then(|| GeneratorId::new(x, (a + k - i) % k))
    };
    let all: Vec<GeneratorId> = (0..size * size).map(|i| GeneratorId::from_index(i, size)).collect();
    let classes: BTreeSet<Vec<GeneratorId>> = bisync.classes().into_iter().collect();

    let mut families: BTreeMap<GeneratorId, Vec<GeneratorId>> = BTreeMap::new();
    let mut pulled: BTreeMap<GeneratorId, Vec<GeneratorId>> = BTreeMap::new();
    let mut closed_nulls = true;
    let mut derived = true;
    let mut pull_nulls = true;
    for &f in &all {
        let src_gen = decode(f);
        closed_nulls &= bisync.is_null(f) == src_gen.is_none();
        derived &= src_gen.is_some() || bisync.is_null(f);
        let src_rep = src_gen.and_then(|e| src.rep(e));
        pull_nulls &= bisync.is_null(f) == src_rep.is_none();
        if let Some(e) = src_gen {
            families.entry(e).or_default().push(f);
        }
        if let Some(r) = src_rep {
            pulled.entry(r).or_default().push(f);
        }
    }
    for fam in families.values() {
        derived &= fam
            .iter()
            .all(|&f| bisync.rep(f).is_some() && bisync.rep(f) == bisync.rep(fam[0]))
            || fam.iter().all(|&f| bisync.is_null(f));
    }
    let family_set: BTreeSet<Vec<GeneratorId>> = families.into_values().collect();
    let pulled_set: BTreeSet<Vec<GeneratorId>> = pulled.into_values().collect();
    let source_trivial = src.nulls().is_empty() && src.classes().iter().all(|c| c.len() == 1);
    BisyncStructure {
        source_trivial,
        closed_form_derived: derived,
        closed_form_nulls: closed_nulls,
        closed_form_classes: family_set == classes && family_set.iter().all(|c| c.len() == k),
        pullback_nulls: pull_nulls,
        pullback_classes: pulled_set == classes,
    }
}

/// Saturates `g` and its bisynchronization and compares their structure.
pub fn bisync_closure_structure(g: &Game) -> Result<BisyncStructure> {
    let src = saturate(&presentation_of(g)?);
    let tgt = saturate(&presentation_of(&bisynchronize(g)?)?);
    Ok(bisync_structure(&src, &tgt))
}
