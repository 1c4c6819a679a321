//! Indexing of fixed-length words over `0..q` in lexicographic order,
//! earliest position most significant.

use crate::Symbol;

/// `q^len` without overflow.
pub(crate) fn word_count(q: usize, len: usize) -> Option<u128> {
    (q as u128).checked_pow(u32::try_from(len).ok()?)
}

/// Word space small enough to index with `usize`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct WordIdx {
    pub q: usize,
    pub len: usize,
    pub count: usize,
}

impl WordIdx {
    /// `None` when `q^len` does not fit in a `usize`.
    pub fn new(q: usize, len: usize) -> Option<Self> {
        let count = word_count(q, len)?;
        let count = usize::try_from(count).ok()?;
        Some(WordIdx { q, len, count })
    }

    pub fn index(&self, word: &[Symbol]) -> usize {
        debug_assert_eq!(word.len(), self.len);
        let mut idx = 0usize;
        for &s in word {
            idx = idx * self.q + s as usize;
        }
        idx
    }

    pub fn decode_into(&self, mut idx: usize, out: &mut [Symbol]) {
        debug_assert_eq!(out.len(), self.len);
        for slot in out.iter_mut().rev() {
            *slot = (idx % self.q) as Symbol;
            idx /= self.q;
        }
    }

    pub fn decode(&self, idx: usize) -> Vec<Symbol> {
        let mut out = vec![0; self.len];
        self.decode_into(idx, &mut out);
        out
    }
}

/// In-place enumeration of all words of a space in lexicographic order.
pub(crate) struct Odometer {
    q: Symbol,
    word: Vec<Symbol>,
}

impl Odometer {
    pub fn new(q: usize, len: usize) -> Self {
        Odometer {
            q: q as Symbol,
            word: vec![0; len],
        }
    }

    pub fn current(&self) -> &[Symbol] {
        &self.word
    }

    /// Advance to the next word; `false` once the space wraps around.
    pub fn step(&mut self) -> bool {
        for slot in self.word.iter_mut().rev() {
            *slot += 1;
            if *slot < self.q {
                return true;
            }
            *slot = 0;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_decode_round_trip() {
        let w = WordIdx::new(3, 4).unwrap();
        assert_eq!(w.count, 81);
        for idx in 0..w.count {
            assert_eq!(w.index(&w.decode(idx)), idx);
        }
        // earliest position most significant
        assert_eq!(w.index(&[1, 0, 0, 0]), 27);
    }

    #[test]
    fn odometer_covers_space_in_order() {
        let w = WordIdx::new(2, 3).unwrap();
        let mut odo = Odometer::new(2, 3);
        let mut seen = Vec::new();
        loop {
            seen.push(w.index(odo.current()));
            if !odo.step() {
                break;
            }
        }
        assert_eq!(seen, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn zero_length_space() {
        let w = WordIdx::new(5, 0).unwrap();
        assert_eq!(w.count, 1);
        let mut odo = Odometer::new(5, 0);
        assert!(odo.current().is_empty());
        assert!(!odo.step());
    }
}
