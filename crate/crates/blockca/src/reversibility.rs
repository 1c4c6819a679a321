//! Deciding injectivity of a 1D CA on bi-infinite configurations, and
//! synthesizing the inverse local rule of an injective one.
//!
//! Injectivity is decided on the pair graph over de Bruijn states: states
//! are pairs of window overlaps, edges are pairs of same-output transitions.
//! The automaton is non-injective exactly when the subgraph of bi-infinitely
//! extendable states contains an edge whose two tracks spell different
//! window words; a pair of eventually-periodic configurations with equal
//! images is then read off a backward and a forward lasso through that edge.

use rayon::prelude::*;

use crate::alphabet::Alphabet;
use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::rule::{compose_rules, LocalRule};
use crate::words::{word_count, WordIdx};
use crate::{Caps, Symbol};

pub const DEFAULT_MAX_RADIUS: u32 = 8;

/// One eventually-periodic configuration: `center` occupies cells
/// `0..center.len()`, `left_period` repeats towards -∞, `right_period`
/// towards +∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    pub left_period: Vec<Symbol>,
    pub center: Vec<Symbol>,
    pub right_period: Vec<Symbol>,
}

impl EventuallyPeriodic {
    pub fn at(&self, n: i64) -> Symbol {
        if n < 0 {
            let l = self.left_period.len() as i64;
            self.left_period[n.rem_euclid(l) as usize]
        } else if (n as usize) < self.center.len() {
            self.center[n as usize]
        } else {
            let r = self.right_period.len() as i64;
            self.right_period[((n - self.center.len() as i64) % r) as usize]
        }
    }
}

/// Two distinct configurations with the same image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonInjectivityWitness {
    pub first: EventuallyPeriodic,
    pub second: EventuallyPeriodic,
}

#[derive(Clone, Debug)]
pub struct InjectivityVerdict {
    pub injective: bool,
    pub witness: Option<NonInjectivityWitness>,
}

/// Check a witness by direct evaluation: the two configurations must differ
/// somewhere and have identical images. Both are eventually periodic, so a
/// finite window spanning the center plus full periods on each side, padded
/// by the rule window, decides equality everywhere.
pub fn check_witness(
    rule: &LocalRule,
    alphabet: &Alphabet,
    witness: &NonInjectivityWitness,
) -> bool {
    let (a, b) = (&witness.first, &witness.second);
    if a.left_period.len() != b.left_period.len()
        || a.center.len() != b.center.len()
        || a.right_period.len() != b.right_period.len()
    {
        return false;
    }
    let pad = rule
        .offsets()
        .iter()
        .map(i64::abs)
        .max()
        .unwrap_or(0)
        + 2;
    let lo = -2 * (a.left_period.len() as i64) - pad;
    let hi = a.center.len() as i64 + 2 * (a.right_period.len() as i64) + pad;

    if (lo..=hi).all(|n| a.at(n) == b.at(n)) {
        return false;
    }
    let mut word_a = vec![0; rule.arity()];
    let mut word_b = vec![0; rule.arity()];
    for n in lo..=hi {
        for ((sa, sb), o) in word_a
            .iter_mut()
            .zip(word_b.iter_mut())
            .zip(rule.offsets().iter())
        {
            *sa = a.at(n + o);
            *sb = b.at(n + o);
        }
        if rule.eval_word(&word_a, alphabet) != rule.eval_word(&word_b, alphabet) {
            return false;
        }
    }
    true
}

/// The rule read over a contiguous window of length `span + 1`. De Bruijn
/// states are the `span`-length overlaps, indexed as words.
struct Geometry {
    q: usize,
    span: usize,
    states: usize,
    /// output for every contiguous window word, indexed lexicographically
    edge_out: Vec<Symbol>,
}

impl Geometry {
    fn new(rule: &LocalRule, alphabet: &Alphabet, caps: &Caps) -> Result<Geometry> {
        let q = alphabet.size();
        // A rule with an empty window is constant; read cell 0 and ignore it
        // so the graph machinery applies uniformly.
        let (w_min, w_max) = match (rule.offsets().min(), rule.offsets().max()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => (0, 0),
        };
        let span = (w_max - w_min) as usize;
        let m = span + 1;
        let pair_edges = word_count(q, 2 * m).unwrap_or(u128::MAX);
        if pair_edges > caps.max_evals as u128 {
            return Err(Error::TooLarge {
                required: pair_edges,
                cap: caps.max_evals,
            });
        }
        let full = WordIdx::new(q, m).expect("guarded window");
        let positions: Vec<usize> = rule.offsets().iter().map(|o| (o - w_min) as usize).collect();
        let mut edge_out = Vec::with_capacity(full.count);
        let mut word = vec![0; m];
        for idx in 0..full.count {
            full.decode_into(idx, &mut word);
            let mut t = 0usize;
            for &p in &positions {
                t = t * q + word[p] as usize;
            }
            edge_out.push(rule.table()[t]);
        }
        Ok(Geometry {
            q,
            span,
            states: q.pow(span as u32),
            edge_out,
        })
    }

    fn succ(&self, state: usize, symbol: usize) -> usize {
        (state * self.q + symbol) % self.states
    }

    fn out(&self, state: usize, symbol: usize) -> Symbol {
        self.edge_out[state * self.q + symbol]
    }

    /// `(predecessor, consumed label)` pairs: states `x` with `succ(x, a) = u`.
    /// For `span > 0` the label is forced to be the last digit of `u`.
    fn preds(&self, u: usize) -> Vec<(usize, usize)> {
        if self.states == 1 {
            (0..self.q).map(|a| (0, a)).collect()
        } else {
            let a = u % self.q;
            let base = u / self.q;
            let stride = self.states / self.q;
            (0..self.q).map(|d| (d * stride + base, a)).collect()
        }
    }

    /// Digit `j` (0 = most significant) of a state's span-length word.
    fn state_digit(&self, state: usize, j: usize) -> Symbol {
        let w = self.q.pow((self.span - 1 - j) as u32);
        ((state / w) % self.q) as Symbol
    }
}

/// Pair-graph states that admit a bi-infinite path: the largest subgraph in
/// which every state keeps an incoming and an outgoing edge.
fn bi_extendable(geo: &Geometry) -> Vec<bool> {
    let s = geo.states;
    let q = geo.q;
    let n = s * s;
    let mut alive = vec![true; n];
    let mut out_deg = vec![0u32; n];
    let mut in_deg = vec![0u32; n];
    for (p, deg) in out_deg.iter_mut().enumerate() {
        let (u, v) = (p / s, p % s);
        for a in 0..q {
            for b in 0..q {
                if geo.out(u, a) == geo.out(v, b) {
                    *deg += 1;
                    in_deg[geo.succ(u, a) * s + geo.succ(v, b)] += 1;
                }
            }
        }
    }
    let mut stack: Vec<usize> = (0..n)
        .filter(|&p| out_deg[p] == 0 || in_deg[p] == 0)
        .collect();
    while let Some(p) = stack.pop() {
        if !alive[p] {
            continue;
        }
        alive[p] = false;
        let (u, v) = (p / s, p % s);
        for a in 0..q {
            for b in 0..q {
                if geo.out(u, a) == geo.out(v, b) {
                    let t = geo.succ(u, a) * s + geo.succ(v, b);
                    if alive[t] {
                        in_deg[t] -= 1;
                        if in_deg[t] == 0 {
                            stack.push(t);
                        }
                    }
                }
            }
        }
        for &(x, a) in &geo.preds(u) {
            for &(y, b) in &geo.preds(v) {
                if geo.out(x, a) == geo.out(y, b) {
                    let t = x * s + y;
                    if alive[t] {
                        out_deg[t] -= 1;
                        if out_deg[t] == 0 {
                            stack.push(t);
                        }
                    }
                }
            }
        }
    }
    alive
}

/// Decide injectivity of the global map on bi-infinite configurations.
pub fn is_injective(
    rule: &LocalRule,
    alphabet: &Alphabet,
    caps: &Caps,
) -> Result<InjectivityVerdict> {
    let geo = Geometry::new(rule, alphabet, caps)?;
    let s = geo.states;
    let q = geo.q;
    let alive = bi_extendable(&geo);

    // an edge, between extendable states, whose two window words differ
    let mut violation = None;
    'search: for p in 0..s * s {
        if !alive[p] {
            continue;
        }
        let (u, v) = (p / s, p % s);
        for a in 0..q {
            for b in 0..q {
                if (u != v || a != b) && geo.out(u, a) == geo.out(v, b) {
                    let t = geo.succ(u, a) * s + geo.succ(v, b);
                    if alive[t] {
                        violation = Some((p, a, b));
                        break 'search;
                    }
                }
            }
        }
    }

    match violation {
        None => Ok(InjectivityVerdict {
            injective: true,
            witness: None,
        }),
        Some((p, a, b)) => Ok(InjectivityVerdict {
            injective: false,
            witness: Some(extract_witness(&geo, &alive, p, a, b)),
        }),
    }
}

/// Walk backward from the violating edge's source until a pair-state
/// repeats, and forward from its target likewise. The label streams of
/// cycle, tails and edge assemble the two configurations.
fn extract_witness(
    geo: &Geometry,
    alive: &[bool],
    start: usize,
    edge_a: usize,
    edge_b: usize,
) -> NonInjectivityWitness {
    let s = geo.states;

    let pred_of = |p: usize| -> (usize, (usize, usize)) {
        let (u, v) = (p / s, p % s);
        for &(x, a) in &geo.preds(u) {
            for &(y, b) in &geo.preds(v) {
                if geo.out(x, a) == geo.out(y, b) && alive[x * s + y] {
                    return (x * s + y, (a, b));
                }
            }
        }
        unreachable!("extendable state lost all predecessors")
    };
    let succ_of = |p: usize| -> (usize, (usize, usize)) {
        let (u, v) = (p / s, p % s);
        for a in 0..geo.q {
            for b in 0..geo.q {
                if geo.out(u, a) == geo.out(v, b) {
                    let t = geo.succ(u, a) * s + geo.succ(v, b);
                    if alive[t] {
                        return (t, (a, b));
                    }
                }
            }
        }
        unreachable!("extendable state lost all successors")
    };

    // backward lasso; back_labels[i] labels the edge into back_states[i]
    let mut back_states = vec![start];
    let mut back_labels: Vec<(usize, usize)> = Vec::new();
    let (tail_rev, cycle_rev) = loop {
        let (prev, label) = pred_of(*back_states.last().unwrap());
        back_labels.push(label);
        if let Some(pos) = back_states.iter().position(|&x| x == prev) {
            break (back_labels[..pos].to_vec(), back_labels[pos..].to_vec());
        }
        back_states.push(prev);
    };
    // forward in time: the cycle labels and then the tail, both reversed
    let left_cycle: Vec<(usize, usize)> = cycle_rev.iter().rev().copied().collect();
    let left_tail: Vec<(usize, usize)> = tail_rev.iter().rev().copied().collect();

    // forward lasso from the edge target
    let target = {
        let (u, v) = (start / s, start % s);
        geo.succ(u, edge_a) * s + geo.succ(v, edge_b)
    };
    let mut fwd_states = vec![target];
    let mut fwd_labels: Vec<(usize, usize)> = Vec::new();
    let (right_tail, right_cycle) = loop {
        let (next, label) = succ_of(*fwd_states.last().unwrap());
        fwd_labels.push(label);
        if let Some(pos) = fwd_states.iter().position(|&x| x == next) {
            break (fwd_labels[..pos].to_vec(), fwd_labels[pos..].to_vec());
        }
        fwd_states.push(next);
    };

    let track = |pick: fn(&(usize, usize)) -> usize| -> EventuallyPeriodic {
        let mut center: Vec<Symbol> = left_tail.iter().map(|l| pick(l) as Symbol).collect();
        center.push(pick(&(edge_a, edge_b)) as Symbol);
        center.extend(right_tail.iter().map(|l| pick(l) as Symbol));
        EventuallyPeriodic {
            left_period: left_cycle.iter().map(|l| pick(l) as Symbol).collect(),
            center,
            right_period: right_cycle.iter().map(|l| pick(l) as Symbol).collect(),
        }
    };
    NonInjectivityWitness {
        first: track(|l| l.0),
        second: track(|l| l.1),
    }
}

/// Synthesize the inverse rule of an injective CA, trying symmetric windows
/// `[-R, R]` of growing radius. A radius works when every image word of
/// length `2R + 1` pins the center preimage symbol uniquely; the candidate
/// is then verified by exact rule composition in both orders.
pub fn synthesize_inverse(
    rule: &LocalRule,
    alphabet: &Alphabet,
    max_radius: u32,
    caps: &Caps,
) -> Result<LocalRule> {
    let verdict = is_injective(rule, alphabet, caps)?;
    if let Some(witness) = verdict.witness {
        return Err(Error::NotReversible {
            witness: Box::new(witness),
        });
    }
    let geo = Geometry::new(rule, alphabet, caps)?;
    let (w_min, w_max) = match (rule.offsets().min(), rule.offsets().max()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => (0, 0),
    };
    let q = geo.q;

    for radius in 0..=max_radius {
        let r = radius as i64;
        // an output position whose input window covers cell 0
        let n0 = (-w_max).max(-r);
        if n0 > (-w_min).min(r) {
            continue;
        }
        let len = (2 * r + 1) as usize;
        let required = word_count(q, len)
            .unwrap_or(u128::MAX)
            .saturating_mul(len as u128)
            .saturating_mul(geo.states as u128);
        if required > caps.max_evals as u128 {
            return Err(Error::TooLarge {
                required,
                cap: caps.max_evals,
            });
        }
        let words = WordIdx::new(q, len).expect("guarded image space");
        let edge_index = (n0 + r) as usize;
        let pos0 = (-n0 - w_min) as usize;

        let table: Vec<Option<Symbol>> = (0..words.count)
            .into_par_iter()
            .map(|w_idx| {
                let mut image = vec![0; len];
                words.decode_into(w_idx, &mut image);
                center_preimage(&geo, &image, edge_index, pos0)
            })
            .collect();

        if table.iter().all(|c| c.is_some()) {
            let table: Vec<Symbol> = table.into_iter().map(|c| c.unwrap()).collect();
            let candidate = LocalRule::new(CellSet::interval(-r, r), table, alphabet)
                .expect("candidate inverse table")
                .minimized(alphabet);
            let ok_left = compose_rules(&candidate, rule, alphabet, caps)?.is_identity(alphabet);
            let ok_right = compose_rules(rule, &candidate, alphabet, caps)?.is_identity(alphabet);
            if ok_left && ok_right {
                return Ok(candidate);
            }
            // A unique-preimage table failing exact verification would
            // contradict injectivity.
            debug_assert!(false, "unique-preimage candidate failed verification");
        }
    }
    Err(Error::RadiusCapExceeded { max_radius })
}

/// The set of input symbols at cell 0 over all de Bruijn paths labelled by
/// `image`; `Some(s)` when it is exactly `{s}`.
fn center_preimage(
    geo: &Geometry,
    image: &[Symbol],
    edge_index: usize,
    pos0: usize,
) -> Option<Symbol> {
    let s = geo.states;
    let q = geo.q;
    // forward reachability up to the deciding edge
    let mut fwd = vec![true; s];
    let mut next = vec![false; s];
    for &out in &image[..edge_index] {
        next.iter_mut().for_each(|x| *x = false);
        for st in 0..s {
            if !fwd[st] {
                continue;
            }
            for a in 0..q {
                if geo.out(st, a) == out {
                    next[geo.succ(st, a)] = true;
                }
            }
        }
        std::mem::swap(&mut fwd, &mut next);
        if !fwd.iter().any(|&x| x) {
            return None;
        }
    }
    // backward reachability down to just after the deciding edge
    let mut bwd = vec![true; s];
    for &out in image[edge_index + 1..].iter().rev() {
        next.iter_mut().for_each(|x| *x = false);
        for st in 0..s {
            for a in 0..q {
                if geo.out(st, a) == out && bwd[geo.succ(st, a)] {
                    next[st] = true;
                    break;
                }
            }
        }
        std::mem::swap(&mut bwd, &mut next);
        if !bwd.iter().any(|&x| x) {
            return None;
        }
    }

    let mut found: Option<Symbol> = None;
    let out = image[edge_index];
    for st in 0..s {
        if !fwd[st] {
            continue;
        }
        for a in 0..q {
            if geo.out(st, a) == out && bwd[geo.succ(st, a)] {
                let sym = if pos0 < geo.span {
                    geo.state_digit(st, pos0)
                } else {
                    a as Symbol
                };
                match found {
                    None => found = Some(sym),
                    Some(prev) if prev != sym => return None,
                    _ => {}
                }
            }
        }
    }
    found
}
