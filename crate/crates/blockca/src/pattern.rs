//! Partial configurations: words pinned to an arbitrary finite support.

use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::Symbol;

/// A word assigned to a cell set, aligned with the support in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternAssignment {
    support: CellSet,
    symbols: Vec<Symbol>,
}

impl PatternAssignment {
    pub fn new(support: CellSet, symbols: Vec<Symbol>) -> Result<Self> {
        if support.len() != symbols.len() {
            return Err(Error::precondition(format!(
                "pattern has {} symbols for {} support cells",
                symbols.len(),
                support.len()
            )));
        }
        Ok(PatternAssignment { support, symbols })
    }

    pub fn support(&self) -> &CellSet {
        &self.support
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn get(&self, cell: i64) -> Option<Symbol> {
        self.support.position(cell).map(|i| self.symbols[i])
    }
}
