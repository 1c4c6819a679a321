//! Finite alphabets, with an optional track decomposition.
//!
//! Tracks are constructor metadata only (product automata, pretty-printing);
//! every algorithm in this crate sees flat symbols `0..q`.

use crate::error::{Error, Result};
use crate::Symbol;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
    tracks: Option<Vec<usize>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::AlphabetTooSmall(size));
        }
        if size > Symbol::MAX as usize {
            return Err(Error::TableTooLarge {
                required: size as u128,
                cap: Symbol::MAX as u64,
            });
        }
        Ok(Alphabet { size, tracks: None })
    }

    /// Alphabet that is the product of the given track alphabets.
    pub fn with_tracks(tracks: Vec<usize>) -> Result<Self> {
        let mut product: usize = 1;
        for &t in &tracks {
            if t == 0 {
                return Err(Error::TrackMismatch {
                    tracks: tracks.clone(),
                    product: 0,
                    size: 0,
                });
            }
            product = product.checked_mul(t).ok_or(Error::TableTooLarge {
                required: u128::MAX,
                cap: Symbol::MAX as u64,
            })?;
        }
        let mut a = Alphabet::new(product)?;
        a.tracks = Some(tracks);
        Ok(a)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tracks(&self) -> Option<&[usize]> {
        self.tracks.as_deref()
    }

    /// Track sizes, defaulting to a single track covering the whole alphabet.
    pub fn track_view(&self) -> Vec<usize> {
        self.tracks.clone().unwrap_or_else(|| vec![self.size])
    }

    pub fn contains(&self, s: Symbol) -> bool {
        (s as usize) < self.size
    }

    /// Pack per-track values into a flat symbol, first track most significant.
    pub fn encode_tracks(&self, values: &[Symbol]) -> Symbol {
        let tracks = self.track_view();
        debug_assert_eq!(values.len(), tracks.len());
        let mut s: usize = 0;
        for (v, t) in values.iter().zip(&tracks) {
            debug_assert!((*v as usize) < *t);
            s = s * t + *v as usize;
        }
        s as Symbol
    }

    /// Unpack a flat symbol into per-track values.
    pub fn decode_tracks(&self, symbol: Symbol) -> Vec<Symbol> {
        let tracks = self.track_view();
        let mut out = vec![0; tracks.len()];
        let mut s = symbol as usize;
        for (i, &t) in tracks.iter().enumerate().rev() {
            out[i] = (s % t) as Symbol;
            s /= t;
        }
        out
    }

    /// Product alphabet for direct sums: sizes multiply, track lists concatenate.
    pub fn product(&self, other: &Alphabet) -> Result<Alphabet> {
        let mut tracks = self.track_view();
        tracks.extend(other.track_view());
        Alphabet::with_tracks(tracks)
    }
}
