//! Reversible one-dimensional cellular automata: a forward rule and an
//! inverse rule over a shared alphabet, both kept minimized, together with
//! the classical neighborhood N and the dual neighborhood Ñ.
//!
//! The dual of `f` is the conjugation of the inverse by the central
//! symmetry, `*(f^-1)*`, so Ñ(f) is the reflection of the inverse rule's
//! minimal window. Constructing a `ReversibleCA` always verifies that the
//! two rules compose to the identity, in both orders.

use crate::alphabet::Alphabet;
use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::pattern::PatternAssignment;
use crate::rule::{compose_rules, LocalRule};
use crate::words::word_count;
use crate::{Caps, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub struct ReversibleCA {
    alphabet: Alphabet,
    forward: LocalRule,
    inverse: LocalRule,
    classical_nbh: CellSet,
    dual_nbh: CellSet,
}

impl ReversibleCA {
    /// Build from a forward and an inverse rule. Both rules are minimized and
    /// the inverse relation is verified by exact table composition.
    pub fn new(
        alphabet: Alphabet,
        forward: LocalRule,
        inverse: LocalRule,
        caps: &Caps,
    ) -> Result<Self> {
        let forward = forward.minimized(&alphabet);
        let inverse = inverse.minimized(&alphabet);
        let round = compose_rules(&inverse, &forward, &alphabet, caps)?;
        if !round.is_identity(&alphabet) {
            return Err(Error::precondition(
                "inverse rule does not undo the forward rule",
            ));
        }
        let round = compose_rules(&forward, &inverse, &alphabet, caps)?;
        if !round.is_identity(&alphabet) {
            return Err(Error::precondition(
                "forward rule does not undo the inverse rule",
            ));
        }
        let classical_nbh = forward.offsets().clone();
        let dual_nbh = inverse.offsets().negate();
        Ok(ReversibleCA {
            alphabet,
            forward,
            inverse,
            classical_nbh,
            dual_nbh,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn forward(&self) -> &LocalRule {
        &self.forward
    }

    pub fn inverse(&self) -> &LocalRule {
        &self.inverse
    }

    /// The classical neighborhood N(f): minimal window of the forward rule.
    pub fn classical_neighborhood(&self) -> &CellSet {
        &self.classical_nbh
    }

    /// The dual neighborhood Ñ(f) = N(*f^-1*): reflection of the inverse
    /// rule's minimal window.
    pub fn dual_neighborhood(&self) -> &CellSet {
        &self.dual_nbh
    }

    /// The inverse automaton f^-1 (rules swapped).
    pub fn inverse_ca(&self) -> ReversibleCA {
        ReversibleCA {
            alphabet: self.alphabet.clone(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            classical_nbh: self.inverse.offsets().clone(),
            dual_nbh: self.forward.offsets().negate(),
        }
    }

    /// The dual automaton `*(f^-1)*`. An involution: `f.dual().dual() == f`.
    pub fn dual(&self) -> ReversibleCA {
        let forward = self.inverse.reflected(&self.alphabet);
        let inverse = self.forward.reflected(&self.alphabet);
        ReversibleCA {
            classical_nbh: forward.offsets().clone(),
            dual_nbh: inverse.offsets().negate(),
            alphabet: self.alphabet.clone(),
            forward,
            inverse,
        }
    }

    /// The mirror automaton `*f*` (reflection of both rules).
    pub fn mirror(&self) -> ReversibleCA {
        let forward = self.forward.reflected(&self.alphabet);
        let inverse = self.inverse.reflected(&self.alphabet);
        ReversibleCA {
            classical_nbh: forward.offsets().clone(),
            dual_nbh: inverse.offsets().negate(),
            alphabet: self.alphabet.clone(),
            forward,
            inverse,
        }
    }

    pub fn identity(alphabet: Alphabet) -> ReversibleCA {
        Self::shift(0, alphabet)
    }

    /// `f(v)_0 = v_k`, inverse `v_{-k}`. N = Ñ = {k}.
    pub fn shift(k: i64, alphabet: Alphabet) -> ReversibleCA {
        let forward = LocalRule::shift(k, &alphabet);
        let inverse = LocalRule::shift(-k, &alphabet);
        ReversibleCA {
            classical_nbh: CellSet::singleton(k),
            dual_nbh: CellSet::singleton(k),
            alphabet,
            forward,
            inverse,
        }
    }

    /// The two-track automaton over (Z/2Z)^2 with forward rule
    /// `(v_0^2 + v_0^1 v_1^1, v_1^1)` and inverse
    /// `(v_{-1}^2, v_0^1 + v_{-1}^2 v_0^2)`, stretched so that the window is
    /// `{0, l}` (and `{-l, 0}` for the inverse).
    pub fn toffoli(l: u32) -> ReversibleCA {
        assert!(l >= 1, "stretch factor must be at least 1");
        let alphabet = Alphabet::with_tracks(vec![2, 2]).expect("4-symbol alphabet");
        let bit = |s: Symbol, hi: bool| -> Symbol {
            if hi {
                s >> 1
            } else {
                s & 1
            }
        };
        let pack = |t1: Symbol, t2: Symbol| -> Symbol { (t1 << 1) | t2 };
        let mut forward = Vec::with_capacity(16);
        let mut inverse = Vec::with_capacity(16);
        for a in 0..4 {
            for b in 0..4 {
                // forward reads (v_0, v_l) = (a, b)
                forward.push(pack(
                    (bit(a, false) + bit(a, true) * bit(b, true)) & 1,
                    bit(b, true),
                ));
                // inverse reads (v_{-l}, v_0) = (a, b)
                inverse.push(pack(
                    bit(a, false),
                    (bit(b, true) + bit(a, false) * bit(b, false)) & 1,
                ));
            }
        }
        let l = l as i64;
        let forward = LocalRule::new(CellSet::new(vec![0, l]), forward, &alphabet)
            .expect("toffoli forward table");
        let inverse = LocalRule::new(CellSet::new(vec![-l, 0]), inverse, &alphabet)
            .expect("toffoli inverse table");
        ReversibleCA {
            classical_nbh: forward.offsets().clone(),
            dual_nbh: inverse.offsets().negate(),
            alphabet,
            forward,
            inverse,
        }
    }

    /// Apply the forward rule on a ring of period `config.len()`.
    pub fn apply_on_ring(&self, config: &[Symbol]) -> Vec<Symbol> {
        self.forward.apply_on_ring(config, &self.alphabet)
    }

    /// Apply the inverse rule on a ring of period `config.len()`.
    pub fn apply_inverse_on_ring(&self, config: &[Symbol]) -> Vec<Symbol> {
        self.inverse.apply_on_ring(config, &self.alphabet)
    }

    /// `f(v)_cell` for any configuration extending the pattern; the pattern
    /// must cover `cell + N(f)`.
    pub fn evaluate_at(&self, input: &PatternAssignment, cell: i64) -> Result<Symbol> {
        let needed = self.classical_nbh.translate(cell);
        let missing: CellSet = needed
            .iter()
            .filter(|&c| input.get(c).is_none())
            .collect();
        if !missing.is_empty() {
            return Err(Error::InsufficientSupport { missing });
        }
        let word: Vec<Symbol> = needed.iter().map(|c| input.get(c).unwrap()).collect();
        if let Some(&bad) = word.iter().find(|&&s| !self.alphabet.contains(s)) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad,
                size: self.alphabet.size(),
            });
        }
        Ok(self.forward.eval_word(&word, &self.alphabet))
    }
}

/// Composition `later . first` (`first` applied first). Both the forward and
/// the inverse rule are composed by table substitution and minimized.
pub fn compose(later: &ReversibleCA, first: &ReversibleCA, caps: &Caps) -> Result<ReversibleCA> {
    if later.alphabet.size() != first.alphabet.size() {
        return Err(Error::AlphabetMismatch {
            left: later.alphabet.size(),
            right: first.alphabet.size(),
        });
    }
    let alphabet = if later.alphabet == first.alphabet {
        later.alphabet.clone()
    } else {
        Alphabet::new(later.alphabet.size())?
    };
    let forward = compose_rules(&later.forward, &first.forward, &alphabet, caps)?
        .minimized(&alphabet);
    let inverse = compose_rules(&first.inverse, &later.inverse, &alphabet, caps)?
        .minimized(&alphabet);
    Ok(ReversibleCA {
        classical_nbh: forward.offsets().clone(),
        dual_nbh: inverse.offsets().negate(),
        alphabet,
        forward,
        inverse,
    })
}

/// `f` composed with itself `k` times.
pub fn power(f: &ReversibleCA, k: u32, caps: &Caps) -> Result<ReversibleCA> {
    assert!(k >= 1, "exponent must be at least 1");
    let mut acc = f.clone();
    for _ in 1..k {
        acc = compose(&acc, f, caps)?;
    }
    Ok(acc)
}

/// Product automaton over the product alphabet: acts as `f` on the first
/// track block and as `g` on the second, each reading only its own tracks.
/// N and Ñ of the sum are the unions of the components'.
pub fn direct_sum(f: &ReversibleCA, g: &ReversibleCA, caps: &Caps) -> Result<ReversibleCA> {
    let alphabet = f.alphabet.product(&g.alphabet)?;
    let qg = g.alphabet.size();

    let build = |rf: &LocalRule, rg: &LocalRule| -> Result<LocalRule> {
        let window = rf.offsets().union(rg.offsets());
        let required = word_count(alphabet.size(), window.len()).unwrap_or(u128::MAX);
        if required > caps.max_table as u128 {
            return Err(Error::TableTooLarge {
                required,
                cap: caps.max_table,
            });
        }
        let taps_f: Vec<usize> = rf
            .offsets()
            .iter()
            .map(|o| window.position(o).unwrap())
            .collect();
        let taps_g: Vec<usize> = rg
            .offsets()
            .iter()
            .map(|o| window.position(o).unwrap())
            .collect();
        let mut table = Vec::with_capacity(required as usize);
        let mut odo = crate::words::Odometer::new(alphabet.size(), window.len());
        let mut wf = vec![0; taps_f.len()];
        let mut wg = vec![0; taps_g.len()];
        loop {
            let w = odo.current();
            for (slot, &pos) in wf.iter_mut().zip(&taps_f) {
                *slot = w[pos] / qg as Symbol;
            }
            for (slot, &pos) in wg.iter_mut().zip(&taps_g) {
                *slot = w[pos] % qg as Symbol;
            }
            let of = rf.eval_word(&wf, &f.alphabet);
            let og = rg.eval_word(&wg, &g.alphabet);
            table.push(of * qg as Symbol + og);
            if !odo.step() {
                break;
            }
        }
        LocalRule::new(window, table, &alphabet)
    };

    let forward = build(&f.forward, &g.forward)?.minimized(&alphabet);
    let inverse = build(&f.inverse, &g.inverse)?.minimized(&alphabet);
    Ok(ReversibleCA {
        classical_nbh: forward.offsets().clone(),
        dual_nbh: inverse.offsets().negate(),
        alphabet,
        forward,
        inverse,
    })
}

/// One additive term of a linear rule: at `offset`, mix tracks with a binary
/// matrix (`matrix[i][j] = 1` reads track `j` of the cell into output track
/// `i`, XOR-accumulated).
#[derive(Clone, Debug)]
pub struct LinearTerm {
    pub offset: i64,
    pub matrix: Vec<Vec<u8>>,
}

/// Automaton additive with respect to componentwise XOR over `(Z/2Z)^t`
/// tracks. The rule must be reversible; the inverse is synthesized and
/// verified by exact composition.
pub fn linear_ca(terms: &[LinearTerm], caps: &Caps) -> Result<ReversibleCA> {
    if terms.is_empty() {
        return Err(Error::precondition("linear rule needs at least one term"));
    }
    let t = terms[0].matrix.len();
    if t == 0 {
        return Err(Error::precondition("track-mixing matrix must be nonempty"));
    }
    for term in terms {
        if term.matrix.len() != t || term.matrix.iter().any(|row| row.len() != t) {
            return Err(Error::precondition(
                "all track-mixing matrices must be square of the same size",
            ));
        }
    }
    let mut offsets = Vec::new();
    for term in terms {
        if offsets.contains(&term.offset) {
            return Err(Error::precondition(format!(
                "duplicate offset {} in linear rule",
                term.offset
            )));
        }
        offsets.push(term.offset);
    }
    let alphabet = Alphabet::with_tracks(vec![2; t])?;
    let window = CellSet::new(offsets);
    // Terms sorted to match the window's ascending order.
    let mut sorted: Vec<&LinearTerm> = terms.iter().collect();
    sorted.sort_by_key(|term| term.offset);

    let required = word_count(alphabet.size(), window.len()).unwrap_or(u128::MAX);
    if required > caps.max_table as u128 {
        return Err(Error::TableTooLarge {
            required,
            cap: caps.max_table,
        });
    }
    let mut table = Vec::with_capacity(required as usize);
    let mut odo = crate::words::Odometer::new(alphabet.size(), window.len());
    loop {
        let w = odo.current();
        let mut out_bits = vec![0u8; t];
        for (term, &sym) in sorted.iter().zip(w) {
            let bits = alphabet.decode_tracks(sym);
            for (out, row) in out_bits.iter_mut().zip(&term.matrix) {
                for (&m, &b) in row.iter().zip(&bits) {
                    *out ^= m & b as u8;
                }
            }
        }
        let out: Vec<Symbol> = out_bits.iter().map(|&b| b as Symbol).collect();
        table.push(alphabet.encode_tracks(&out));
        if !odo.step() {
            break;
        }
    }
    let forward = LocalRule::new(window, table, &alphabet)?;

    let verdict = crate::reversibility::is_injective(&forward, &alphabet, caps)?;
    match verdict.witness {
        Some(witness) => Err(Error::NotReversible {
            witness: Box::new(witness),
        }),
        None => {
            let inverse = crate::reversibility::synthesize_inverse(
                &forward,
                &alphabet,
                crate::reversibility::DEFAULT_MAX_RADIUS,
                caps,
            )?;
            ReversibleCA::new(alphabet, forward, inverse, caps)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn toffoli_neighborhoods() {
        let t = ReversibleCA::toffoli(1);
        assert_eq!(t.classical_neighborhood(), &CellSet::new(vec![0, 1]));
        assert_eq!(t.dual_neighborhood(), &CellSet::new(vec![0, 1]));
        for l in 2..=4 {
            let tl = ReversibleCA::toffoli(l);
            assert_eq!(
                tl.classical_neighborhood(),
                &CellSet::new(vec![0, l as i64])
            );
            assert_eq!(tl.dual_neighborhood(), &CellSet::new(vec![0, l as i64]));
        }
    }

    #[test]
    fn toffoli_inverse_undoes_forward() {
        let t = ReversibleCA::toffoli(1);
        let id = compose(&t.inverse_ca(), &t, &caps()).unwrap();
        assert!(id.forward().is_identity(id.alphabet()));
        let id = compose(&t, &t.inverse_ca(), &caps()).unwrap();
        assert!(id.forward().is_identity(id.alphabet()));
    }

    #[test]
    fn toffoli_frozen_tables() {
        // hand-computed from the track formulas, symbols packed as 2*t1 + t2
        let t = ReversibleCA::toffoli(1);
        assert_eq!(
            t.forward().table(),
            &[0, 0, 1, 1, 2, 2, 3, 3, 0, 0, 3, 3, 2, 2, 1, 1]
        );
        assert_eq!(
            t.inverse().table(),
            &[0, 0, 1, 1, 2, 3, 3, 2, 0, 0, 1, 1, 2, 3, 3, 2]
        );
    }

    #[test]
    fn toffoli_ring_step() {
        let t = ReversibleCA::toffoli(1);
        // all-zero ring stays all-zero
        assert_eq!(t.apply_on_ring(&[0, 0, 0, 0]), vec![0, 0, 0, 0]);
        // v_0 = (0,0), v_1 = (1,1): output cell 0 is (0,1)
        let out = t.apply_on_ring(&[0, 3, 0, 0]);
        assert_eq!(out[0], 1);
        // the ring map is a bijection: pulling back recovers the input
        assert_eq!(t.apply_inverse_on_ring(&out), vec![0, 3, 0, 0]);
    }

    #[test]
    fn identity_fixes_every_ring_configuration() {
        let id = ReversibleCA::identity(Alphabet::new(3).unwrap());
        for config in [vec![0, 1, 2, 1], vec![2, 2], vec![0]] {
            assert_eq!(id.apply_on_ring(&config), config);
        }
    }

    #[test]
    fn evaluate_at_checks_support() {
        let t = ReversibleCA::toffoli(1);
        let pat =
            PatternAssignment::new(CellSet::new(vec![0, 1]), vec![0, 3]).unwrap();
        assert_eq!(t.evaluate_at(&pat, 0).unwrap(), 1);

        let narrow = PatternAssignment::new(CellSet::singleton(0), vec![0]).unwrap();
        match t.evaluate_at(&narrow, 0) {
            Err(Error::InsufficientSupport { missing }) => {
                assert_eq!(missing, CellSet::singleton(1))
            }
            other => panic!("expected missing-cell error, got {other:?}"),
        }

        let id = ReversibleCA::identity(Alphabet::new(3).unwrap());
        let pat = PatternAssignment::new(CellSet::singleton(5), vec![2]).unwrap();
        assert_eq!(id.evaluate_at(&pat, 5).unwrap(), 2);
    }

    #[test]
    fn shifts_are_self_dual() {
        for k in [-2i64, 0, 3] {
            let s = ReversibleCA::shift(k, Alphabet::new(3).unwrap());
            assert_eq!(s.classical_neighborhood(), &CellSet::singleton(k));
            assert_eq!(s.dual_neighborhood(), &CellSet::singleton(k));
            assert_eq!(s.dual(), s);
        }
    }

    #[test]
    fn dual_is_an_involution() {
        let t = ReversibleCA::toffoli(1);
        assert_eq!(t.dual().dual(), t);
        assert_eq!(
            t.dual().classical_neighborhood(),
            &CellSet::new(vec![0, 1])
        );
    }

    #[test]
    fn compose_shifts() {
        let a = Alphabet::new(2).unwrap();
        let s1 = ReversibleCA::shift(1, a.clone());
        let s2 = ReversibleCA::shift(2, a.clone());
        let c = compose(&s1, &s2, &caps()).unwrap();
        assert_eq!(c, ReversibleCA::shift(3, a.clone()));
        let back = compose(&ReversibleCA::shift(-1, a.clone()), &s1, &caps()).unwrap();
        assert_eq!(back, ReversibleCA::identity(a));
    }

    #[test]
    fn compose_agrees_with_two_step_application() {
        let t = ReversibleCA::toffoli(1);
        let tt = compose(&t, &t, &caps()).unwrap();
        assert!(tt
            .classical_neighborhood()
            .is_subset(&CellSet::interval(0, 2)));
        // exhaustive cross-check on a period-5 ring
        let mut config = vec![0; 5];
        for idx in 0..4u32.pow(5) {
            let mut n = idx;
            for slot in config.iter_mut() {
                *slot = n % 4;
                n /= 4;
            }
            let two_steps = t.apply_on_ring(&t.apply_on_ring(&config));
            assert_eq!(tt.apply_on_ring(&config), two_steps);
        }
    }

    #[test]
    fn power_matches_repeated_compose() {
        let t = ReversibleCA::toffoli(1);
        assert_eq!(power(&t, 1, &caps()).unwrap(), t);
        let tt = compose(&t, &t, &caps()).unwrap();
        assert_eq!(power(&t, 2, &caps()).unwrap(), tt);
        let a = Alphabet::new(2).unwrap();
        assert_eq!(
            power(&ReversibleCA::shift(1, a.clone()), 3, &caps()).unwrap(),
            ReversibleCA::shift(3, a)
        );
    }

    #[test]
    fn direct_sum_neighborhoods_are_unions() {
        let a = Alphabet::new(2).unwrap();
        let id = ReversibleCA::identity(a.clone());
        let sum = direct_sum(&id, &id, &caps()).unwrap();
        assert_eq!(sum.classical_neighborhood(), &CellSet::singleton(0));

        let s = direct_sum(
            &ReversibleCA::shift(0, a.clone()),
            &ReversibleCA::shift(-1, a.clone()),
            &caps(),
        )
        .unwrap();
        assert_eq!(s.classical_neighborhood(), &CellSet::new(vec![-1, 0]));
        assert_eq!(s.dual_neighborhood(), &CellSet::new(vec![-1, 0]));
        assert_eq!(s.alphabet().size(), 4);
    }

    #[test]
    fn direct_sum_respects_table_cap() {
        let t = ReversibleCA::toffoli(1);
        let tight = Caps {
            max_table: 64,
            ..Caps::default()
        };
        assert!(matches!(
            direct_sum(&t, &t, &tight),
            Err(Error::TableTooLarge { .. })
        ));
    }

    #[test]
    fn linear_two_track_partial_shift() {
        // f(v)_0 = (v_0^1 + v_1^2, v_0^2)
        let f = linear_ca(
            &[
                LinearTerm {
                    offset: 0,
                    matrix: vec![vec![1, 0], vec![0, 1]],
                },
                LinearTerm {
                    offset: 1,
                    matrix: vec![vec![0, 1], vec![0, 0]],
                },
            ],
            &caps(),
        )
        .unwrap();
        assert_eq!(f.classical_neighborhood(), &CellSet::new(vec![0, 1]));
        assert_eq!(f.dual_neighborhood(), &CellSet::new(vec![-1, 0]));
        // additive: the zero configuration is a fixed point
        assert_eq!(f.apply_on_ring(&[0; 6]), vec![0; 6]);
    }

    #[test]
    fn linear_xor_is_rejected() {
        let err = linear_ca(
            &[
                LinearTerm {
                    offset: 0,
                    matrix: vec![vec![1]],
                },
                LinearTerm {
                    offset: 1,
                    matrix: vec![vec![1]],
                },
            ],
            &caps(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotReversible { .. }));
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let f = ReversibleCA::identity(Alphabet::new(2).unwrap());
        let g = ReversibleCA::identity(Alphabet::new(3).unwrap());
        assert!(matches!(
            compose(&f, &g, &caps()),
            Err(Error::AlphabetMismatch { .. })
        ));
    }
}
