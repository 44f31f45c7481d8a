//! Stored rule tables, rechecked against independent rule implementations.

use syncgame::game::parse_game;
use syncgame::transforms::bisynchronize;
use syncgame::zoo::{game_from_shortcut, trivial_sync};
use syncgame::Game;

fn golden(name: &str) -> Game {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_game(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// K3 ⊔ K3: every distinct pair is adjacent, so the relation of two vertices
/// is just whether they coincide.
fn iso_k3_rule(a: usize, b: usize, x: usize, y: usize) -> bool {
    let side = |v: usize| v / 3;
    if side(a) == side(x) || side(b) == side(y) {
        return false;
    }
    let (gx, hx) = if side(x) == 0 { (x, a) } else { (a, x) };
    let (gy, hy) = if side(y) == 0 { (y, b) } else { (b, y) };
    (gx == gy) == (hx == hy)
}

#[test]
fn iso_k3_k3_table() {
    let g = golden("iso_k3_k3.json");
    let built = game_from_shortcut("iso(K3,K3)").unwrap();
    assert!(g.same_rules(&built));
    assert_eq!(g.zero_count(), 1296 - 180);
    for a in 0..6 {
        for b in 0..6 {
            for x in 0..6 {
                for y in 0..6 {
                    assert_eq!(g.allowed(a, b, x, y), iso_k3_rule(a, b, x, y), "({a},{b},{x},{y})");
                }
            }
        }
    }
}

#[test]
fn bisync_trivial_2_2_table() {
    let g = golden("bisync_trivial_2_2.json");
    let built = bisynchronize(&trivial_sync(2, 2).unwrap()).unwrap();
    assert!(g.same_rules(&built));
    assert_eq!(g.index_maps, built.index_maps);
    let allowed = g.tensor().iter().filter(|&&v| v).count();
    assert_eq!(allowed, 48);
}
