//! Local transition rules: a window of cell offsets plus a total lookup
//! table from window words to output symbols.
//!
//! Tables are flat arrays in lexicographic order of the input word, with the
//! earliest offset most significant. This ordering is part of the on-disk
//! format, so it must never change.

use crate::alphabet::Alphabet;
use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::words::{word_count, Odometer, WordIdx};
use crate::{Caps, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalRule {
    offsets: CellSet,
    table: Vec<Symbol>,
}

impl LocalRule {
    pub fn new(offsets: CellSet, table: Vec<Symbol>, alphabet: &Alphabet) -> Result<Self> {
        let q = alphabet.size();
        let arity = offsets.len();
        let expected = word_count(q, arity)
            .and_then(|c| usize::try_from(c).ok())
            .ok_or(Error::TableTooLarge {
                required: word_count(q, arity).unwrap_or(u128::MAX),
                cap: u64::MAX,
            })?;
        if table.len() != expected {
            return Err(Error::TableSizeMismatch {
                expected,
                got: table.len(),
                arity,
            });
        }
        if let Some(&bad) = table.iter().find(|&&s| !alphabet.contains(s)) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad,
                size: q,
            });
        }
        Ok(LocalRule { offsets, table })
    }

    /// Window `{0}`, output = input.
    pub fn identity(alphabet: &Alphabet) -> Self {
        LocalRule {
            offsets: CellSet::singleton(0),
            table: (0..alphabet.size() as Symbol).collect(),
        }
    }

    /// Window `{k}`, output = the read symbol: the CA `f(v)_0 = v_k`.
    pub fn shift(k: i64, alphabet: &Alphabet) -> Self {
        LocalRule {
            offsets: CellSet::singleton(k),
            table: (0..alphabet.size() as Symbol).collect(),
        }
    }

    pub fn offsets(&self) -> &CellSet {
        &self.offsets
    }

    pub fn table(&self) -> &[Symbol] {
        &self.table
    }

    pub fn arity(&self) -> usize {
        self.offsets.len()
    }

    /// Output for a word given in window order.
    pub fn eval_word(&self, word: &[Symbol], alphabet: &Alphabet) -> Symbol {
        let idx = WordIdx {
            q: alphabet.size(),
            len: self.arity(),
            count: self.table.len(),
        }
        .index(word);
        self.table[idx]
    }

    /// Apply on a ring of period `config.len()`; offsets wrap modulo the period.
    pub fn apply_on_ring(&self, config: &[Symbol], alphabet: &Alphabet) -> Vec<Symbol> {
        let p = config.len() as i64;
        assert!(p >= 1, "ring period must be at least 1");
        let q = alphabet.size();
        let mut out = Vec::with_capacity(config.len());
        let mut word = vec![0; self.arity()];
        for n in 0..p {
            for (slot, o) in word.iter_mut().zip(self.offsets.iter()) {
                *slot = config[(n + o).rem_euclid(p) as usize];
            }
            let mut idx = 0usize;
            for &s in &word {
                idx = idx * q + s as usize;
            }
            out.push(self.table[idx]);
        }
        out
    }

    /// Offsets whose value can change the output: offset positions for which
    /// two words differing only there give different outputs.
    pub fn essential_offsets(&self, alphabet: &Alphabet) -> CellSet {
        let q = alphabet.size();
        let k = self.arity();
        let mut essential = Vec::new();
        for (j, offset) in self.offsets.iter().enumerate() {
            let stride = q.pow((k - 1 - j) as u32);
            let block = stride * q;
            let mut needed = false;
            'scan: for base in (0..self.table.len()).step_by(block) {
                for lo in base..base + stride {
                    let first = self.table[lo];
                    for m in 1..q {
                        if self.table[lo + m * stride] != first {
                            needed = true;
                            break 'scan;
                        }
                    }
                }
            }
            if needed {
                essential.push(offset);
            }
        }
        CellSet::new(essential)
    }

    /// Equivalent rule on the essential offsets only. Minimization never
    /// adds offsets and is a fixed point on already-minimal rules.
    pub fn minimized(&self, alphabet: &Alphabet) -> LocalRule {
        let essential = self.essential_offsets(alphabet);
        if essential == self.offsets {
            return self.clone();
        }
        let q = alphabet.size();
        let k = self.arity();
        // Weight of each kept position in the old index; dropped positions
        // read as symbol 0.
        let kept: Vec<usize> = self
            .offsets
            .iter()
            .enumerate()
            .filter(|(_, o)| essential.contains(*o))
            .map(|(j, _)| q.pow((k - 1 - j) as u32))
            .collect();
        let new_len = q.pow(kept.len() as u32);
        let mut table = Vec::with_capacity(new_len);
        let mut odo = Odometer::new(q, kept.len());
        loop {
            let old_idx: usize = odo
                .current()
                .iter()
                .zip(&kept)
                .map(|(&s, &w)| s as usize * w)
                .sum();
            table.push(self.table[old_idx]);
            if !odo.step() {
                break;
            }
        }
        LocalRule {
            offsets: essential,
            table,
        }
    }

    /// Conjugation by the central symmetry: the rule of `*f*` where
    /// `*(a)_n = a_{-n}`. Offsets are negated and the table re-indexed.
    pub fn reflected(&self, alphabet: &Alphabet) -> LocalRule {
        let q = alphabet.size();
        let k = self.arity();
        let words = WordIdx {
            q,
            len: k,
            count: self.table.len(),
        };
        let mut table = vec![0; self.table.len()];
        let mut word = vec![0; k];
        for (idx, out) in table.iter_mut().enumerate() {
            words.decode_into(idx, &mut word);
            word.reverse();
            *out = self.table[words.index(&word)];
        }
        LocalRule {
            offsets: self.offsets.negate(),
            table,
        }
    }

    /// Same rule read `k` cells to the right: the rule of `shift(k) . f`.
    pub fn translated(&self, k: i64) -> LocalRule {
        LocalRule {
            offsets: self.offsets.translate(k),
            table: self.table.clone(),
        }
    }

    /// True when the minimized rule is the identity on window `{0}`.
    pub fn is_identity(&self, alphabet: &Alphabet) -> bool {
        let m = self.minimized(alphabet);
        m.offsets == CellSet::singleton(0)
            && m.table.iter().enumerate().all(|(i, &s)| i as Symbol == s)
    }
}

/// Smallest window that still determines the rule's output.
pub fn minimal_neighborhood(rule: &LocalRule, alphabet: &Alphabet) -> CellSet {
    rule.essential_offsets(alphabet)
}

/// Rule of the composition `outer . inner` (`inner` applied first).
/// The window is the Minkowski sum of the two windows; the result is not
/// minimized.
pub fn compose_rules(
    outer: &LocalRule,
    inner: &LocalRule,
    alphabet: &Alphabet,
    caps: &Caps,
) -> Result<LocalRule> {
    let q = alphabet.size();
    let window = outer.offsets.minkowski_sum(&inner.offsets);
    let required = word_count(q, window.len()).unwrap_or(u128::MAX);
    if required > caps.max_table as u128 {
        return Err(Error::TableTooLarge {
            required,
            cap: caps.max_table,
        });
    }
    let len = required as usize;

    // For each outer offset, where inner's window lands inside the combined
    // window, as positions into the combined word.
    let taps: Vec<Vec<usize>> = outer
        .offsets
        .iter()
        .map(|u| {
            inner
                .offsets
                .iter()
                .map(|t| window.position(u + t).expect("window closed under sum"))
                .collect()
        })
        .collect();

    let mut table = Vec::with_capacity(len);
    let mut odo = Odometer::new(q, window.len());
    let mut mid = vec![0; outer.arity()];
    loop {
        let w = odo.current();
        for (slot, tap) in mid.iter_mut().zip(&taps) {
            let mut idx = 0usize;
            for &pos in tap {
                idx = idx * q + w[pos] as usize;
            }
            *slot = inner.table[idx];
        }
        let mut idx = 0usize;
        for &s in &mid {
            idx = idx * q + s as usize;
        }
        table.push(outer.table[idx]);
        if !odo.step() {
            break;
        }
    }
    Ok(LocalRule {
        offsets: window,
        table,
    })
}
