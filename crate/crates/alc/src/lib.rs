//! Core library for `alc`: a typechecker, rewrite engine, equational
//! equivalence checker and denotational evaluator for a simply-typed
//! lambda-calculus with formal sums, scalar weights from a commutative
//! ring, and an algebraic effect monad connecting call-by-value
//! computations with duplicable frozen thunks.
//!
//! The calculus comes in two semantic flavours selected by [`Mode`]:
//! strict mode identifies the empty sum with weight-zero terms, weak
//! mode keeps `0·s` distinct from `0` so that possibly-divergent
//! computations are never erased. A PCF-style extension adds naturals,
//! booleans and a fixpoint operator over frozen computations.

pub mod scalar;
pub mod term;
pub mod canon;
pub mod parse;
pub mod pretty;
pub mod types;
pub mod rewrite;
pub mod equiv;
pub mod denote;
pub mod prelude;
pub mod gen;
pub mod cli;

/// Interpretation of weight zero: strict mode collapses `0·s` to the
/// empty sum, weak mode keeps the weighted term alive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Strict,
    Weak,
}

impl Mode {
    pub fn is_strict(self) -> bool {
        matches!(self, Mode::Strict)
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Strict => write!(f, "strict"),
            Mode::Weak => write!(f, "weak"),
        }
    }
}
