//! Named games and graphs.

use crate::game::{Game, Graph};
use crate::{Error, Result};

/// `λ(a,b,x,y) = 1` for `x ≠ y` and `δ_ab` for `x = y`.
pub fn trivial_sync(n: usize, k: usize) -> Result<Game> {
    if n == 0 || k == 0 {
        return Err(Error::Domain(format!("trivial_sync needs n, k >= 1 (got {n}, {k})")));
    }
    Ok(Game::from_fn(n, k, |a, b, x, y| x != y || a == b).with_name(format!("trivial_sync({n},{k})")))
}

/// Graph homomorphism game: questions are vertices of `g`, answers vertices of `h`.
///
/// Equal questions need equal answers; adjacent questions need adjacent
/// answers. `h` is simple, so adjacent questions never accept equal answers.
pub fn hom_game(g: &Graph, h: &Graph) -> Result<Game> {
    if g.vertices() == 0 || h.vertices() == 0 {
        return Err(Error::Domain("hom_game needs nonempty graphs".into()));
    }
    Ok(Game::from_fn(g.vertices(), h.vertices(), |a, b, x, y| {
        if x == y {
            a == b
        } else if g.adjacent(x, y) {
            h.adjacent(a, b)
        } else {
            true
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Relation {
    Equal,
    Adjacent,
    Distinct,
}

/// Graph isomorphism game on `V(G) ⊔ V(H)`.
///
/// Vertex `u < m` is `u ∈ G`, vertex `m + u` is `u ∈ H`. Each player must
/// answer a vertex of the other graph than the one asked about; the pair of
/// `G`-vertices and the pair of `H`-vertices determined by the two rounds
/// must stand in the same relation (equal, adjacent or distinct and
/// non-adjacent).
pub fn iso_game(g: &Graph, h: &Graph) -> Result<Game> {
    let m = g.vertices();
    if m != h.vertices() {
        return Err(Error::Domain(format!(
            "iso_game needs equal vertex counts (got {m} and {})",
            h.vertices()
        )));
    }
    if m == 0 {
        return Err(Error::Domain("iso_game needs nonempty graphs".into()));
    }
    let rel = |graph: &Graph, u: usize, v: usize| {
        if u == v {
            Relation::Equal
        } else if graph.adjacent(u, v) {
            Relation::Adjacent
        } else {
            Relation::Distinct
        }
    };
    // Splits a (question, answer) pair into its G-vertex and H-vertex.
    let split = |q: usize, a: usize| -> Option<(usize, usize)> {
        match (q < m, a < m) {
            (true, false) => Some((q, a - m)),
            (false, true) => Some((a, q - m)),
            _ => None,
        }
    };
    Ok(Game::from_fn(2 * m, 2 * m, |a, b, x, y| {
        match (split(x, a), split(y, b)) {
            (Some((xg, xh)), Some((yg, yh))) => rel(g, xg, yg) == rel(h, xh, yh),
            _ => false,
        }
    }))
}

pub fn complete_graph(m: usize) -> Result<Graph> {
    if m == 0 {
        return Err(Error::Domain("complete graph needs m >= 1".into()));
    }
    let edges: Vec<_> = (0..m).flat_map(|u| ((u + 1)..m).map(move |v| (u, v))).collect();
    Graph::new(m, &edges)
}

pub fn cycle_graph(m: usize) -> Result<Graph> {
    if m < 3 {
        return Err(Error::Domain("cycle graph needs m >= 3".into()));
    }
    let edges: Vec<_> = (0..m).map(|u| (u, (u + 1) % m)).collect();
    Graph::new(m, &edges)
}

pub fn path_graph(m: usize) -> Result<Graph> {
    if m == 0 {
        return Err(Error::Domain("path graph needs m >= 1".into()));
    }
    let edges: Vec<_> = (1..m).map(|u| (u - 1, u)).collect();
    Graph::new(m, &edges)
}

pub fn edgeless_graph(m: usize) -> Result<Graph> {
    if m == 0 {
        return Err(Error::Domain("edgeless graph needs m >= 1".into()));
    }
    Graph::new(m, &[])
}

/// Parses `K5`, `C5`, `P3` or `E3` (edgeless).
pub fn graph_from_shortcut(spec: &str) -> Result<Graph> {
    let spec = spec.trim();
    let bad = || Error::Domain(format!("unknown graph shortcut {spec:?}"));
    let (kind, size) = spec.split_at(spec.char_indices().nth(1).map_or(spec.len(), |(i, _)| i));
    let m: usize = size.parse().map_err(|_| bad())?;
    match kind {
        "K" => complete_graph(m),
        "C" => cycle_graph(m),
        "P" => path_graph(m),
        "E" => edgeless_graph(m),
        _ => Err(bad()),
    }
}

/// Parses inline game shortcuts: `trivial_sync(n,k)`, `hom(G,H)`, `iso(G,H)`.
pub fn game_from_shortcut(spec: &str) -> Result<Game> {
    let spec: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Domain(format!("unknown game shortcut {spec:?}"));
    let (head, rest) = spec.split_once('(').ok_or_else(bad)?;
    let args = rest.strip_suffix(')').ok_or_else(bad)?;
    let (left, right) = args.split_once(',').ok_or_else(bad)?;
    match head {
        "trivial_sync" | "trivial" => {
            let n = left.parse().map_err(|_| bad())?;
            let k = right.parse().map_err(|_| bad())?;
            trivial_sync(n, k)
        }
        "hom" => Ok(hom_game(&graph_from_shortcut(left)?, &graph_from_shortcut(right)?)?
            .with_name(format!("hom({left},{right})"))),
        "iso" => Ok(iso_game(&graph_from_shortcut(left)?, &graph_from_shortcut(right)?)?
            .with_name(format!("iso({left},{right})"))),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_zero_sets() {
        let g = trivial_sync(1, 2).unwrap();
        assert_eq!(g.zeros().collect::<Vec<_>>(), vec![[0, 1, 0, 0], [1, 0, 0, 0]]);
        assert_eq!(trivial_sync(2, 3).unwrap().zero_count(), 12);
        assert_eq!(trivial_sync(1, 1).unwrap().zero_count(), 0);
        assert!(trivial_sync(0, 2).is_err());
        assert!(trivial_sync(2, 0).is_err());
        let g = trivial_sync(3, 4).unwrap();
        assert!(g.is_synchronous() && g.is_symmetric());
    }

    #[test]
    fn complete_graph_edges() {
        assert_eq!(complete_graph(1).unwrap().edges().len(), 0);
        assert_eq!(complete_graph(3).unwrap().edges().len(), 3);
        assert_eq!(complete_graph(5).unwrap().edges().len(), 10);
        assert!(complete_graph(0).is_err());
    }

    #[test]
    fn hom_games() {
        let k5 = complete_graph(5).unwrap();
        let k4 = complete_graph(4).unwrap();
        let g = hom_game(&k5, &k4).unwrap();
        assert_eq!((g.n(), g.k()), (5, 4));
        assert!(g.is_synchronous() && g.is_symmetric());

        let k3 = complete_graph(3).unwrap();
        let g = hom_game(&k3, &k3).unwrap();
        assert!(!g.allowed(1, 1, 0, 2));
        assert!(g.is_bisynchronous());

        // Edgeless source: only the synchronous diagonal is forbidden.
        let g = hom_game(&edgeless_graph(3).unwrap(), &k3).unwrap();
        assert!(g.same_rules(&trivial_sync(3, 3).unwrap()));
    }

    #[test]
    fn iso_games_are_bisynchronous() {
        let k3 = complete_graph(3).unwrap();
        let g = iso_game(&k3, &k3).unwrap();
        assert_eq!((g.n(), g.k()), (6, 6));
        assert!(g.is_bisynchronous() && g.is_symmetric());
        assert!(iso_game(&k3, &complete_graph(2).unwrap()).is_err());
        for (a, b) in [("K2", "E2"), ("P3", "P3"), ("C4", "E4"), ("K1", "K1")] {
            let g = iso_game(&graph_from_shortcut(a).unwrap(), &graph_from_shortcut(b).unwrap()).unwrap();
            assert!(g.is_bisynchronous(), "{a} {b}");
        }
    }

    #[test]
    fn shortcuts() {
        assert_eq!(game_from_shortcut("trivial_sync(1, 4)").unwrap().k(), 4);
        assert_eq!(game_from_shortcut("hom(K5,K4)").unwrap().n(), 5);
        assert_eq!(game_from_shortcut("iso(K3,E3)").unwrap().n(), 6);
        assert!(game_from_shortcut("hom(K5)").is_err());
        assert!(graph_from_shortcut("X3").is_err());
        assert_eq!(graph_from_shortcut("C5").unwrap().edges().len(), 5);
        assert_eq!(graph_from_shortcut("P3").unwrap().edges().len(), 2);
    }
}
