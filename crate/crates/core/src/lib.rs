//! Synchronous non-local games and their game algebras.
//!
//! The crate is organised around five layers:
//!
//! * [`game`]: the rule-function tensor, structural flags and the JSON game format.
//! * [`zoo`]: constructors for the standard games (trivial synchronous, graph
//!   homomorphism and graph isomorphism games).
//! * [`transforms`]: rule-function transformations (symmetrization,
//!   bisynchronization, reduction to three outputs, zero/relation normal form).
//! * [`algebra`]: the symbolic game-algebra engine: presentations, saturation,
//!   noncommutative reduction and verification of generator maps.
//! * [`correlations`]: exact rational correlations, transport along generator
//!   maps and perfect deterministic strategy enumeration.
//!
//! [`suite`] wires everything into the pass/fail checks used by the acceptance
//! tests and the `syncgame suite` command.

pub mod algebra;
mod bits;
pub mod corpus;
pub mod correlations;
mod error;
pub mod game;
pub mod par;
pub mod rational;
pub mod suite;
pub mod transforms;
pub mod zoo;

pub use error::{Error, Result};
pub use game::{Game, Graph, StructureReport};
pub use rational::Rational;
