//! The fixed collection of small games used by the property suites.

use crate::game::Game;
use crate::transforms::{three_output_reduce, TransformKind};
use crate::zoo::game_from_shortcut;
use crate::Result;

const SHORTCUTS: &[&str] = &[
    "trivial_sync(1,2)",
    "trivial_sync(1,3)",
    "trivial_sync(1,4)",
    "trivial_sync(1,5)",
    "trivial_sync(1,6)",
    "trivial_sync(2,2)",
    "trivial_sync(2,3)",
    "trivial_sync(2,4)",
    "trivial_sync(3,2)",
    "trivial_sync(3,3)",
    "trivial_sync(3,5)",
    "trivial_sync(4,2)",
    "trivial_sync(4,3)",
    "trivial_sync(4,6)",
    "hom(K2,K2)",
    "hom(K2,K3)",
    "hom(K3,K3)",
    "hom(K3,K4)",
    "hom(K4,K4)",
    "hom(K5,K4)",
    "hom(C5,K3)",
    "hom(C4,K2)",
    "hom(P3,K2)",
    "hom(C4,K3)",
    "iso(K3,K3)",
];

/// The base corpus, named by shortcut.
pub fn corpus() -> Result<Vec<Game>> {
    SHORTCUTS
        .iter()
        .map(|s| game_from_shortcut(s).map(|g| g.with_name(*s)))
        .collect()
}

/// One builtin transform applied to one game.
#[derive(Debug, Clone)]
pub struct Job {
    pub kind: TransformKind,
    pub source: Game,
}

impl Job {
    pub fn label(&self) -> String {
        format!("{} {}", self.kind.name(), self.source.name.as_deref().unwrap_or("game"))
    }
}

/// Bisynchronization of every game, three-output reduction when `4 ≤ k ≤ 6`,
/// and zero/relation normalization of every three-answer game, including
/// the three-output reductions.
pub fn jobs(games: &[Game]) -> Result<Vec<Job>> {
    let mut out = Vec::new();
    for g in games {
        out.push(Job {
            kind: TransformKind::Bisync,
            source: g.clone(),
        });
    }
    for g in games.iter().filter(|g| (4..=6).contains(&g.k())) {
        out.push(Job {
            kind: TransformKind::ThreeOut,
            source: g.clone(),
        });
    }
    for g in games.iter().filter(|g| g.k() == 3) {
        out.push(Job {
            kind: TransformKind::ZeroRelation,
            source: g.clone(),
        });
    }
    for g in games.iter().filter(|g| (4..=6).contains(&g.k())) {
        out.push(Job {
            kind: TransformKind::ZeroRelation,
            source: three_output_reduce(g)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shape() {
        let games = corpus().unwrap();
        assert!(games.len() >= 20);
        assert!(games.iter().all(|g| g.is_synchronous() && g.n() <= 6 && g.k() <= 6));
        assert!(games.iter().any(|g| g.name.as_deref() == Some("iso(K3,K3)")));
        let jobs = jobs(&games).unwrap();
        assert!(jobs.iter().all(|j| j.kind.applies_to(&j.source)));
    }
}
