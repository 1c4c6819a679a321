//! Neighborhood analysis for one-dimensional reversible cellular automata.
//!
//! A reversible CA carries three windows worth knowing about: the classical
//! neighborhood N (what the forward rule reads), the dual neighborhood Ñ
//! (what the inverse reads, reflected), and the block neighborhood BN, the
//! smallest cell set X such that the automaton, split into the cells of X
//! and the rest, factors through two block bijections communicating over a
//! finite mediating set. This crate computes all three, produces the
//! factorization witnesses explicitly on finite rings, and machine-checks
//! the containments relating them:
//!
//! ```text
//! N ∪ Ñ  ⊆  BN  ⊆  (N − N + Ñ) ∩ (Ñ − Ñ + N)
//! ```
//!
//! with refinements for compositions and iterates.
//!
//! Everything here is exhaustive, exact combinatorics; the [`Caps`] limits
//! keep the exponential enumerations at desk scale and turn anything larger
//! into an error instead of an open-ended computation.

pub mod alphabet;
pub mod blocknbh;
pub mod ca;
pub mod cellset;
pub mod error;
pub mod explorer;
pub mod format;
pub mod pattern;
pub mod reversibility;
pub mod rule;
pub mod witness;
mod words;

pub use alphabet::Alphabet;
pub use ca::ReversibleCA;
pub use cellset::CellSet;
pub use error::{Error, Result};
pub use pattern::PatternAssignment;
pub use rule::LocalRule;

/// Symbols are small nonnegative integers `0..q`.
pub type Symbol = u32;

/// Resource limits for the exponential enumerations.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    /// Maximum number of word evaluations a single check may enumerate.
    pub max_evals: u64,
    /// Maximum number of entries in any constructed rule table.
    pub max_table: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_evals: 1 << 28,
            max_table: 1 << 24,
        }
    }
}
