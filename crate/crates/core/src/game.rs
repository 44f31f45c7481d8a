//! Finite non-local games: the rule-function tensor, structural flags and the
//! JSON game file format.
//!
//! All indices are 0-based: answers run over `0..k`, questions over `0..n`.
//! A game stores `allow[a][b][x][y]`, true when the referee accepts answers
//! `(a, b)` to questions `(x, y)`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Decoding of composite question/answer labels produced by a transform.
///
/// `questions[q]` lists the source-side coordinates encoded by question `q`
/// of the transformed game (for example `[a, x]` after bisynchronization),
/// and likewise for `answers`. Never consulted by validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexMaps {
    pub transform: String,
    pub source_n: usize,
    pub source_k: usize,
    pub questions: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub answers: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    n: usize,
    k: usize,
    allow: Vec<bool>,
    pub name: Option<String>,
    pub index_maps: Option<IndexMaps>,
}

/// Structural flags computed from a rule tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub well_formed: bool,
    pub synchronous: bool,
    pub bisynchronous: bool,
    pub symmetric: bool,
}

impl Game {
    /// Builds a game by evaluating the rule function `rule(a, b, x, y)`.
    pub fn from_fn(n: usize, k: usize, rule: impl Fn(usize, usize, usize, usize) -> bool) -> Game {
        let mut allow = Vec::with_capacity(k * k * n * n);
        for a in 0..k {
            for b in 0..k {
                for x in 0..n {
                    for y in 0..n {
                        allow.push(rule(a, b, x, y));
                    }
                }
            }
        }
        Game {
            n,
            k,
            allow,
            name: None,
            index_maps: None,
        }
    }

    /// Wraps a flat tensor laid out as `((a * k + b) * n + x) * n + y`.
    pub fn from_allow(n: usize, k: usize, allow: Vec<bool>) -> Result<Game> {
        let expected = k * k * n * n;
        if allow.len() != expected {
            return Err(Error::Shape {
                expected,
                found: allow.len(),
            });
        }
        Ok(Game {
            n,
            k,
            allow,
            name: None,
            index_maps: None,
        })
    }

    /// Like [`Game::from_allow`] but from 0/1 integers.
    pub fn from_values(n: usize, k: usize, values: &[i64]) -> Result<Game> {
        let allow = values
            .iter()
            .map(|&v| match v {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::NonBinary(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Game::from_allow(n, k, allow)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Game {
        self.name = Some(name.into());
        self
    }

    pub fn with_index_maps(mut self, maps: IndexMaps) -> Game {
        self.index_maps = Some(maps);
        self
    }

    /// Number of questions.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of answers.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tensor(&self) -> &[bool] {
        &self.allow
    }

    #[inline]
    fn offset(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((a * self.k + b) * self.n + x) * self.n + y
    }

    #[inline]
    pub fn allowed(&self, a: usize, b: usize, x: usize, y: usize) -> bool {
        self.allow[self.offset(a, b, x, y)]
    }

    /// The zero set of the rule function in lexicographic `(a, b, x, y)` order.
    pub fn zeros(&self) -> impl Iterator<Item = [usize; 4]> + '_ {
        self.cells().filter(|&[a, b, x, y]| !self.allowed(a, b, x, y))
    }

    pub fn zero_count(&self) -> usize {
        self.allow.iter().filter(|v| !**v).count()
    }

    fn cells(&self) -> impl Iterator<Item = [usize; 4]> + '_ {
        let (n, k) = (self.n, self.k);
        (0..k).flat_map(move |a| (0..k).flat_map(move |b| (0..n).flat_map(move |x| (0..n).map(move |y| [a, b, x, y]))))
    }

    pub fn is_synchronous(&self) -> bool {
        (0..self.n).all(|x| (0..self.k).all(|a| (0..self.k).all(|b| a == b || !self.allowed(a, b, x, x))))
    }

    pub fn is_bisynchronous(&self) -> bool {
        self.is_synchronous()
            && (0..self.k).all(|a| (0..self.n).all(|x| (0..self.n).all(|y| x == y || !self.allowed(a, a, x, y))))
    }

    pub fn is_symmetric(&self) -> bool {
        self.cells()
            .all(|[a, b, x, y]| self.allowed(a, b, x, y) == self.allowed(b, a, y, x))
    }

    /// Tensors and dimensions agree; name and provenance are ignored.
    pub fn same_rules(&self, other: &Game) -> bool {
        self.n == other.n && self.k == other.k && self.allow == other.allow
    }
}

pub fn validate_game(g: &Game) -> StructureReport {
    StructureReport {
        well_formed: true,
        synchronous: g.is_synchronous(),
        bisynchronous: g.is_bisynchronous(),
        symmetric: g.is_symmetric(),
    }
}

/// Validates a raw tensor before it is wrapped into a [`Game`].
pub fn validate_tensor(n: usize, k: usize, allow: &[bool]) -> Result<StructureReport> {
    let g = Game::from_allow(n, k, allow.to_vec())?;
    Ok(validate_game(&g))
}

/// Which cells the `cells` list of a game file enumerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Zeros,
    Ones,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    n: usize,
    k: usize,
    mode: Mode,
    cells: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index_maps: Option<IndexMaps>,
}

pub fn parse_game(text: &str) -> Result<Game> {
    let file: GameFile = serde_json::from_str(text).map_err(Error::from_json)?;
    let (n, k) = (file.n, file.k);
    let listed = file.mode == Mode::Ones;
    let mut allow = vec![!listed; k * k * n * n];
    for cell in &file.cells {
        let [a, b, x, y] = match cell.as_slice() {
            &[a, b, x, y] => [a, b, x, y],
            _ => {
                return Err(Error::Syntax {
                    line: 0,
                    column: 0,
                    message: format!("cell {cell:?} must have exactly 4 entries"),
                })
            }
        };
        let check = |v: i64, bound: usize, what: &str| -> Result<usize> {
            if v < 0 || v as usize >= bound {
                Err(Error::OutOfRange(format!(
                    "{what} {v} in cell {cell:?} outside 0..{bound}"
                )))
            } else {
                Ok(v as usize)
            }
        };
        let (a, b) = (check(a, k, "answer")?, check(b, k, "answer")?);
        let (x, y) = (check(x, n, "question")?, check(y, n, "question")?);
        allow[((a * k + b) * n + x) * n + y] = listed;
    }
    let mut g = Game::from_allow(n, k, allow)?;
    g.name = file.name;
    g.index_maps = file.index_maps;
    Ok(g)
}

/// Serializes in `zeros` mode.
pub fn serialize_game(g: &Game) -> String {
    serialize_game_with(g, Mode::Zeros)
}

pub fn serialize_game_with(g: &Game, mode: Mode) -> String {
    let want = mode == Mode::Ones;
    let cells = g
        .cells()
        .filter(|&[a, b, x, y]| g.allowed(a, b, x, y) == want)
        .map(|c| c.iter().map(|&v| v as i64).collect())
        .collect();
    let file = GameFile {
        n: g.n,
        k: g.k,
        mode,
        cells,
        name: g.name.clone(),
        index_maps: g.index_maps.clone(),
    };
    serde_json::to_string(&file).expect("game file serializes")
}

/// A finite simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    adj: Vec<bool>,
}

impl Graph {
    pub fn new(vertices: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut adj = vec![false; vertices * vertices];
        for &(u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::OutOfRange(format!("edge ({u}, {v}) on {vertices} vertices")));
            }
            if u == v {
                return Err(Error::Domain(format!("loop at vertex {u}")));
            }
            adj[u * vertices + v] = true;
            adj[v * vertices + u] = true;
        }
        Ok(Graph { vertices, adj })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.vertices + v]
    }

    /// Edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.vertices {
            for v in (u + 1)..self.vertices {
                if self.adjacent(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let file: GraphFile = serde_json::from_str(text).map_err(Error::from_json)?;
    Graph::new(file.vertices, &file.edges)
}

pub fn serialize_graph(g: &Graph) -> String {
    let file = GraphFile {
        vertices: g.vertices,
        edges: g.edges(),
    };
    serde_json::to_string(&file).expect("graph file serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_only(n: usize, k: usize) -> Game {
        Game::from_fn(n, k, |a, b, x, y| x != y || a == b)
    }

    #[test]
    fn flags_from_tensor() {
        let g = diag_only(2, 2);
        let r = validate_game(&g);
        assert!(r.well_formed && r.synchronous && r.symmetric && !r.bisynchronous);

        let mut allow = g.tensor().to_vec();
        let cell = |a: usize, b: usize, x: usize, y: usize| ((a * 2 + b) * 2 + x) * 2 + y;
        allow[cell(0, 1, 0, 0)] = true;
        let r = validate_tensor(2, 2, &allow).unwrap();
        assert!(!r.synchronous && !r.bisynchronous && !r.symmetric);
    }

    #[test]
    fn shape_and_value_errors() {
        assert_eq!(
            Game::from_allow(1, 2, vec![true; 3]),
            Err(Error::Shape { expected: 4, found: 3 })
        );
        assert_eq!(Game::from_values(1, 1, &[2]), Err(Error::NonBinary(2)));
        assert!(validate_tensor(2, 1, &[true]).is_err());
    }

    #[test]
    fn serialize_lists_zero_set() {
        let text = serialize_game(&diag_only(1, 2));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["n"], 1);
        assert_eq!(v["k"], 2);
        assert_eq!(v["mode"], "zeros");
        assert_eq!(v["cells"], serde_json::json!([[0, 1, 0, 0], [1, 0, 0, 0]]));
    }

    #[test]
    fn parse_both_modes() {
        let g = parse_game(r#"{"n":1,"k":1,"mode":"zeros","cells":[]}"#).unwrap();
        assert_eq!(g.tensor(), &[true]);
        let g = parse_game(r#"{"n":1,"k":2,"mode":"ones","cells":[[0,0,0,0],[1,1,0,0]]}"#).unwrap();
        assert!(g.same_rules(&diag_only(1, 2)));
        let text = serialize_game_with(&g, Mode::Ones);
        assert_eq!(parse_game(&text).unwrap(), g);
    }

    #[test]
    fn parse_errors() {
        let err = parse_game(r#"{"n":1,"k":2,"mode":"zeros","cells":[[5,0,0,0]]}"#).unwrap_err();
        assert!(matches!(err, Error::OutOfRange(_)), "{err:?}");
        let err = parse_game(r#"{"n":1,"k":2,"mode":"zeros","cells":[[-1,0,0,0]]}"#).unwrap_err();
        assert!(matches!(err, Error::OutOfRange(_)));
        let err = parse_game("{\"n\":1,\n\"k\":2,\n  \"mode\": oops}").unwrap_err();
        match err {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (3, 11)),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_game(r#"{"n":1,"k":2,"mode":"zeros","cells":[[0,0,0]]}"#).unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }));
        let err = parse_game(r#"{"n":1,"k":2,"mode":"both","cells":[]}"#).unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }));
    }

    #[test]
    fn provenance_round_trips() {
        let g = diag_only(1, 2).with_name("t").with_index_maps(IndexMaps {
            transform: "bisync".into(),
            source_n: 1,
            source_k: 2,
            questions: vec![vec![0, 0], vec![1, 0]],
            answers: vec![],
        });
        assert_eq!(parse_game(&serialize_game(&g)).unwrap(), g);
    }

    #[test]
    fn graph_format() {
        let g = parse_graph(r#"{"vertices":3,"edges":[[0,1],[1,2]]}"#).unwrap();
        assert!(g.adjacent(1, 0) && !g.adjacent(0, 2));
        assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
        assert!(parse_graph(r#"{"vertices":2,"edges":[[0,0]]}"#).is_err());
        assert!(parse_graph(r#"{"vertices":2,"edges":[[0,2]]}"#).is_err());
    }
}
