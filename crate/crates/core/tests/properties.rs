use proptest::prelude::*;

use syncgame::algebra::{
    builtin_maps, presentation_of, reduce, saturate, DetOracle, GameAlgebra, GeneratorId, GeneratorMap, Poly,
};
use syncgame::correlations::{
    classify, enumerate_perfect_deterministic, strategy_to_correlation, transport, Correlation, DeterministicStrategy,
    ProductCorrelation,
};
use syncgame::game::{parse_game, serialize_game, serialize_game_with, Mode};
use syncgame::rational::{self, Rational};
use syncgame::transforms::{bisynchronize, symmetrize, zero_relation_normalize, zr_to_game, TransformKind, ZrOptions};
use syncgame::Game;

/// A synchronous game whose off-diagonal cells are forbidden according to `mask`.
fn game_from_mask(n: usize, k: usize, mask: &[bool]) -> Game {
    Game::from_fn(n, k, |a, b, x, y| {
        if x == y {
            a == b
        } else {
            !mask[((a * k + b) * n + x) * n + y]
        }
    })
}

fn sync_game(max_n: usize, max_k: usize) -> impl Strategy<Value = Game> {
    (1..=max_n, 2..=max_k).prop_flat_map(|(n, k)| {
        proptest::collection::vec(proptest::bool::weighted(0.25), k * k * n * n)
            .prop_map(move |mask| game_from_mask(n, k, &mask))
    })
}

fn brute_force(g: &Game) -> Vec<DeterministicStrategy> {
    let (n, k) = (g.n(), g.k());
    let mut out = Vec::new();
    for code in 0..k.pow(n as u32) {
        let mut f = vec![0; n];
        let mut c = code;
        for slot in f.iter_mut().rev() {
            *slot = c % k;
            c /= k;
        }
        let ok = (0..n).all(|x| (0..n).all(|y| g.allowed(f[x], f[y], x, y)));
        if ok {
            out.push(DeterministicStrategy(f));
        }
    }
    out
}

/// Bisynchronous rules spelled out on flattened labels `(a, x) ↦ a·n + x`.
fn bisync_rule(g: &Game, ans_a: usize, ans_b: usize, qx: usize, qy: usize) -> bool {
    let (n, k) = (g.n(), g.k());
    let ((i, v), (j, w)) = ((ans_a / n, ans_a % n), (ans_b / n, ans_b % n));
    let ((a, x), (b, y)) = ((qx / n, qx % n), (qy / n, qy % n));
    if v != x || w != y || (ans_a == ans_b) != (qx == qy) {
        return false;
    }
    g.allowed((a + k - i) % k, (b + k - j) % k, x, y)
}

fn word_strategy(n: usize, k: usize) -> impl Strategy<Value = Vec<GeneratorId>> {
    proptest::collection::vec((0..n, 0..k).prop_map(|(q, a)| GeneratorId::new(q, a)), 0..=3)
}

fn poly_strategy(n: usize, k: usize) -> impl Strategy<Value = Poly> {
    proptest::collection::vec((word_strategy(n, k), -2i64..=2), 1..6).prop_map(|terms| {
        let mut p = Poly::zero();
        for (w, c) in terms {
            p.add_term(w, rational::int(c));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetrize_is_idempotent(g in sync_game(3, 3)) {
        let s = symmetrize(&g);
        prop_assert!(s.is_symmetric() && s.is_synchronous());
        prop_assert!(symmetrize(&s).same_rules(&s));
        for [a, b, x, y] in g.zeros() {
            prop_assert!(!s.allowed(a, b, x, y) && !s.allowed(b, a, y, x));
        }
    }

    #[test]
    fn bisynchronize_matches_rules(g in sync_game(3, 3)) {
        let b = bisynchronize(&g).unwrap();
        let size = g.n() * g.k();
        prop_assert_eq!((b.n(), b.k()), (size, size));
        prop_assert!(b.is_bisynchronous());
        for ans_a in 0..size {
            for ans_b in 0..size {
                for qx in 0..size {
                    for qy in 0..size {
                        prop_assert_eq!(b.allowed(ans_a, ans_b, qx, qy), bisync_rule(&g, ans_a, ans_b, qx, qy));
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force(g in sync_game(4, 3)) {
        prop_assert_eq!(enumerate_perfect_deterministic(&g).unwrap(), brute_force(&g));
    }

    #[test]
    fn transforms_preserve_strategy_counts(g in sync_game(2, 4)) {
        let count = enumerate_perfect_deterministic(&g).unwrap().len();
        for kind in TransformKind::ALL.into_iter().filter(|k| k.applies_to(&g)) {
            let t = kind.apply(&g, ZrOptions::default()).unwrap();
            prop_assert_eq!(enumerate_perfect_deterministic(&t).unwrap().len(), count, "{}", kind.name());
        }
    }

    #[test]
    fn reduce_agrees_with_deterministic_reps(
        (g, p) in sync_game(3, 3).prop_flat_map(|g| {
            let (n, k) = (g.n(), g.k());
            (Just(g), poly_strategy(n, k))
        })
    ) {
        let closure = saturate(&presentation_of(&g).unwrap());
        let oracle = DetOracle::new(&g).unwrap();
        let r = reduce(&p, &closure).unwrap();
        prop_assert!(oracle.find_counterexample(&(&p - &r)).is_none(), "reduce changed the value of {}", p);
        if r.is_zero() {
            prop_assert!(oracle.find_counterexample(&p).is_none());
        }
    }

    #[test]
    fn closure_is_a_fixpoint(g in sync_game(3, 3)) {
        let c = saturate(&presentation_of(&g).unwrap());
        let again = saturate(&c.to_presentation());
        prop_assert_eq!(again.nulls(), c.nulls());
        prop_assert_eq!(again.classes(), c.classes());
    }

    #[test]
    fn product_transport_matches_full_transport(g in sync_game(2, 3)) {
        let pair = builtin_maps(TransformKind::Bisync, &g).unwrap();
        for s in enumerate_perfect_deterministic(&g).unwrap() {
            let u = ProductCorrelation::from_strategy(&s, g.k()).unwrap();
            let pushed = u.transport(&pair.backward).unwrap();
            let full = transport(&u.to_correlation(), &pair.backward).unwrap();
            prop_assert_eq!(&full, &pushed.to_correlation());
            prop_assert!(classify(&full, &pair.target).unwrap().is_ns_winning());
            let back = transport(&full, &pair.forward).unwrap();
            prop_assert_eq!(back, strategy_to_correlation(&s, &g).unwrap());
        }
    }

    #[test]
    fn game_json_round_trip(g in sync_game(3, 3)) {
        let back = parse_game(&serialize_game(&g)).unwrap();
        prop_assert!(back.same_rules(&g));
        let back = parse_game(&serialize_game_with(&g, Mode::Ones)).unwrap();
        prop_assert!(back.same_rules(&g));
    }

    #[test]
    fn correlation_json_round_trip(
        entries in proptest::collection::vec((0..3usize, 0..3usize, 0..2usize, 0..2usize, -5i64..=5, 1i64..=8), 0..12)
    ) {
        let mut c = Correlation::new(2, 3);
        for (a, b, x, y, num, den) in entries {
            c.add(a, b, x, y, rational::frac(num, den));
        }
        prop_assert_eq!(Correlation::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn zero_relation_spec_reproduces_game(g in sync_game(2, 3).prop_filter("three answers", |g| g.k() == 3), dedupe in any::<bool>()) {
        let (normal, spec) = zero_relation_normalize(&g, ZrOptions { dedupe_symmetric: dedupe }).unwrap();
        prop_assert!(zr_to_game(&spec).unwrap().same_rules(&normal));
        prop_assert_eq!(syncgame::transforms::ZeroRelationSpec::from_json(&spec.to_json()).unwrap(), spec);
    }
}

#[test]
fn identity_transport_is_identity() {
    let c = Correlation::from_fn(2, 2, |a, b, x, y| {
        if (a == b) == (x == y) {
            rational::frac(1, 2)
        } else {
            Rational::from_integer(0)
        }
    });
    assert_eq!(transport(&c, &GeneratorMap::identity(2, 2)).unwrap(), c);
}

#[test]
fn bisync_push_of_constant_strategy() {
    let g = syncgame::zoo::trivial_sync(1, 2).unwrap();
    let pair = builtin_maps(TransformKind::Bisync, &g).unwrap();
    let p = strategy_to_correlation(&DeterministicStrategy(vec![0]), &g).unwrap();
    let pushed = transport(&p, &pair.backward).unwrap();
    // Ψ(p)((i,0),(j,0)|(a,0),(b,0)) = δ_{i,a} δ_{j,b}.
    for i in 0..2 {
        for j in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let expected = if i == a && j == b { 1 } else { 0 };
                    assert_eq!(pushed.get(i, j, a, b), Rational::from_integer(expected), "{i}{j}{a}{b}");
                }
            }
        }
    }
}

#[test]
fn algebra_of_corpus_game_has_oracle() {
    let g = syncgame::zoo::game_from_shortcut("hom(K3,K3)").unwrap();
    let alg = GameAlgebra::new(g).unwrap();
    assert_eq!(alg.oracle().unwrap().strategies().len(), 6);
}
