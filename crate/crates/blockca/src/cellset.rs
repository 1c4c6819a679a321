//! Finite sets of integer cell positions with Minkowski arithmetic.
//!
//! Neighborhoods, windows, check bands and intervals are all `CellSet`s.
//! The Minkowski sum `A + B = {a + b}` and difference `A - B = {a - b}`
//! follow the usual convention for subsets of the integers; note that the
//! Minkowski difference is not the set difference (`without`).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// Strictly increasing finite set of cell positions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CellSet {
    cells: Vec<i64>,
}

impl CellSet {
    pub fn new(mut cells: Vec<i64>) -> Self {
        cells.sort_unstable();
        cells.dedup();
        CellSet { cells }
    }

    pub fn empty() -> Self {
        CellSet { cells: Vec::new() }
    }

    pub fn singleton(cell: i64) -> Self {
        CellSet { cells: vec![cell] }
    }

    /// Integer interval `[lo, hi]`; empty when `lo > hi`.
    pub fn interval(lo: i64, hi: i64) -> Self {
        CellSet {
            cells: (lo..=hi).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: i64) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    pub fn min(&self) -> Option<i64> {
        self.cells.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.cells.last().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.cells.iter().copied()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.cells
    }

    /// Position of `cell` within the ascending order, if present.
    pub fn position(&self, cell: i64) -> Option<usize> {
        self.cells.binary_search(&cell).ok()
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.iter().all(|c| other.contains(c))
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        let mut out: Vec<i64> = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.cells);
        out.extend_from_slice(&other.cells);
        CellSet::new(out)
    }

    pub fn intersect(&self, other: &CellSet) -> CellSet {
        CellSet {
            cells: self.iter().filter(|&c| other.contains(c)).collect(),
        }
    }

    /// Set difference `self \ other`.
    pub fn without(&self, other: &CellSet) -> CellSet {
        CellSet {
            cells: self.iter().filter(|&c| !other.contains(c)).collect(),
        }
    }

    /// Minkowski sum `{a + b | a in self, b in other}`.
    pub fn minkowski_sum(&self, other: &CellSet) -> CellSet {
        let mut out = BTreeSet::new();
        for a in self.iter() {
            for b in other.iter() {
                out.insert(a + b);
            }
        }
        CellSet {
            cells: out.into_iter().collect(),
        }
    }

    /// Minkowski difference `{a - b | a in self, b in other}`.
    pub fn minkowski_diff(&self, other: &CellSet) -> CellSet {
        self.minkowski_sum(&other.negate())
    }

    /// Reflection `-X`.
    pub fn negate(&self) -> CellSet {
        CellSet {
            cells: self.cells.iter().rev().map(|&c| -c).collect(),
        }
    }

    pub fn translate(&self, k: i64) -> CellSet {
        CellSet {
            cells: self.cells.iter().map(|&c| c + k).collect(),
        }
    }

    /// Smallest interval containing the set; empty for the empty set.
    pub fn hull_interval(&self) -> CellSet {
        match (self.min(), self.max()) {
            (Some(lo), Some(hi)) => CellSet::interval(lo, hi),
            _ => CellSet::empty(),
        }
    }

    /// `max - min`, or `None` when empty.
    pub fn diameter(&self) -> Option<i64> {
        Some(self.max()? - self.min()?)
    }

    /// Compact rendering without spaces, used by machine-readable output.
    pub fn compact(&self) -> String {
        let mut s = String::from("{");
        for (i, c) in self.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&c.to_string());
        }
        s.push('}');
        s
    }
}

impl fmt::Display for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<i64> for CellSet {
    fn from_iter<T: IntoIterator<Item = i64>>(iter: T) -> Self {
        CellSet::new(iter.into_iter().collect())
    }
}

/// Accepts `0,1,2`, ranges `a..b` (inclusive), optional surrounding braces,
/// and any mix, e.g. `{-1,1..3}`.
impl FromStr for CellSet {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let s = s.strip_prefix('{').unwrap_or(s);
        let s = s.strip_suffix('}').unwrap_or(s);
        let mut cells = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            if let Some((lo, hi)) = part.split_once("..") {
                let lo: i64 = lo.trim().parse().map_err(|_| format!("bad cell `{lo}`"))?;
                let hi: i64 = hi.trim().parse().map_err(|_| format!("bad cell `{hi}`"))?;
                if lo > hi {
                    return Err(format!("empty range `{part}`"));
                }
                cells.extend(lo..=hi);
            } else {
                cells.push(part.parse().map_err(|_| format!("bad cell `{part}`"))?);
            }
        }
        Ok(CellSet::new(cells))
    }
}
