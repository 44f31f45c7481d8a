//! Game algebras: presentations, saturation, a sound rewriting verifier and
//! the checks built on it.

mod closure;
mod maps;
mod oracle;
mod poly;
pub mod projections;
mod reduce;
mod verify;

pub use closure::{presentation_of, saturate, Closure, Presentation, SumFact};
pub use maps::{builtin_maps, builtin_maps_with, GeneratorMap, MapPair};
pub use oracle::{check_in_deterministic_reps, DetOracle, OracleVerdict};
pub use poly::{GeneratorId, Poly, TermJson, Word};
pub use reduce::{reduce, reduce_with, ReduceConfig};
pub use verify::*;
