//! Explicit block-factorization witnesses on finite rings.
//!
//! On a ring of period P a reversible CA is a bijection of `Σ^P`. For a
//! block pair (X, Y) inside the ring, the factorization data is:
//!
//! * classes of X-words under "same outputs off Y, for every context"
//!   (context independence is verified, not assumed);
//! * `g`: X-word ↦ (output word on Y, class);
//! * dual classes of off-Y words under "same preimage on X, for every
//!   completion on Y", and `h`: off-Y word ↦ (preimage word off X, class);
//! * `alpha`: the class bijection matching the two sides.
//!
//! The witness is exact: for every ring configuration split as (a on X,
//! b off X), the image is `(g_out(a), h^{-1}(b, alpha(g_class(a))))`, and
//! `verify_witness` re-checks that identity over all `q^P` configurations
//! from the table data alone.

use std::collections::HashMap;

use crate::blocknbh::{self, ClassMap};
use crate::ca::ReversibleCA;
use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::words::{word_count, WordIdx};
use crate::{Caps, Symbol};

/// One row of a block-bijection table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessRow {
    pub input: Vec<Symbol>,
    pub output: Vec<Symbol>,
    pub class: u32,
}

/// The factorization data (mediating-set size, g, h, alpha) for one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilocalWitness {
    pub ring_period: usize,
    pub x: CellSet,
    pub y: CellSet,
    pub e_size: usize,
    /// Rows in lexicographic order of the X-word; outputs live on Y.
    pub g: Vec<WitnessRow>,
    /// Rows in lexicographic order of the off-Y word; outputs live off X.
    pub h: Vec<WitnessRow>,
    /// Class bijection from g-classes to h-classes.
    pub alpha: Vec<u32>,
}

/// Ring period that keeps X, its band and Y from wrapping into themselves.
pub fn default_ring_period(ca: &ReversibleCA, x: &CellSet, y: &CellSet) -> usize {
    let n = ca.classical_neighborhood();
    let band = x.minkowski_diff(n).minkowski_sum(n);
    let span = x.union(y).union(&band);
    (span.diameter().unwrap_or(0) + 2) as usize
}

/// Cells of the ring `[0, p)` not in `s`.
fn ring_complement(s: &CellSet, p: usize) -> CellSet {
    CellSet::interval(0, p as i64 - 1).without(s)
}

/// Per-cell window sources modulo the ring period.
fn ring_plan(ca: &ReversibleCA, p: usize, inverse: bool) -> (Vec<usize>, usize) {
    let rule = if inverse { ca.inverse() } else { ca.forward() };
    let mut plan = Vec::with_capacity(p * rule.arity());
    for n in 0..p as i64 {
        for o in rule.offsets().iter() {
            plan.push((n + o).rem_euclid(p as i64) as usize);
        }
    }
    (plan, rule.arity())
}

struct RingEval<'a> {
    q: usize,
    arity: usize,
    plan: Vec<usize>,
    table: &'a [Symbol],
}

impl<'a> RingEval<'a> {
    fn new(ca: &'a ReversibleCA, p: usize, inverse: bool) -> RingEval<'a> {
        let (plan, arity) = ring_plan(ca, p, inverse);
        RingEval {
            q: ca.alphabet().size(),
            arity,
            plan,
            table: if inverse {
                ca.inverse().table()
            } else {
                ca.forward().table()
            },
        }
    }

    fn apply(&self, config: &[Symbol], out: &mut [Symbol]) {
        for (n, slot) in out.iter_mut().enumerate() {
            let mut idx = 0usize;
            for &src in &self.plan[n * self.arity..(n + 1) * self.arity] {
                idx = idx * self.q + config[src] as usize;
            }
            *slot = self.table[idx];
        }
    }
}

fn scatter(word: &[Symbol], cells: &CellSet, into: &mut [Symbol]) {
    for (s, c) in word.iter().zip(cells.iter()) {
        into[c as usize] = *s;
    }
}

fn gather_key(config: &[Symbol], cells: &CellSet, q: usize) -> u64 {
    let mut key: u64 = 0;
    for c in cells.iter() {
        key = key * q as u64 + config[c as usize] as u64;
    }
    key
}

/// Outcome of one side's sweep: the canonical class of every outer word,
/// the class count, and the fixed part and grouped key of every outer word
/// under the all-zero inner word.
struct SideClasses {
    labels: Vec<u32>,
    count: usize,
    fixed: Vec<Vec<Symbol>>,
    keys: Vec<u64>,
}

/// One side of the construction: for every (outer, inner) word pair, apply
/// the map and partition outer words by their `grouped` part; the `fixed`
/// part must not depend on the inner word, and neither may the partition.
#[allow(clippy::too_many_arguments)]
fn classify_side(
    eval: &RingEval,
    p: usize,
    q: usize,
    outer_cells: &CellSet,
    inner_cells: &CellSet,
    fixed_cells: &CellSet,
    grouped_cells: &CellSet,
    side: &str,
) -> Result<SideClasses> {
    let outer_words = WordIdx::new(q, outer_cells.len()).expect("guarded outer space");
    let inner_words = WordIdx::new(q, inner_cells.len()).expect("guarded inner space");
    let grouped_space = word_count(q, grouped_cells.len()).unwrap_or(u128::MAX);

    let mut config = vec![0; p];
    let mut image = vec![0; p];
    let mut outer_word = vec![0; outer_cells.len()];
    let mut inner_word = vec![0; inner_cells.len()];

    let mut reference: Option<Vec<u32>> = None;
    let mut fixed_at_zero: Vec<Vec<Symbol>> = Vec::new();
    let mut keys_at_zero: Vec<u64> = Vec::new();
    let mut class_count = 0usize;

    for inner_idx in 0..inner_words.count {
        inner_words.decode_into(inner_idx, &mut inner_word);
        scatter(&inner_word, inner_cells, &mut config);
        let mut classes = ClassMap::new(grouped_space);
        let mut next = 0u32;
        let mut labels = Vec::with_capacity(outer_words.count);
        for outer_idx in 0..outer_words.count {
            outer_words.decode_into(outer_idx, &mut outer_word);
            scatter(&outer_word, outer_cells, &mut config);
            eval.apply(&config, &mut image);
            let key = gather_key(&image, grouped_cells, q);
            labels.push(classes.get_or_insert(key, &mut next));
            let fixed: Vec<Symbol> = fixed_cells
                .iter()
                .map(|c| image[c as usize])
                .collect();
            if inner_idx == 0 {
                fixed_at_zero.push(fixed);
                keys_at_zero.push(key);
            } else if fixed != fixed_at_zero[outer_idx] {
                return Err(Error::precondition(format!(
                    "{side} block output depends on the context on this ring; \
                     the block pair is not semilocalizable at this period"
                )));
            }
        }
        match &reference {
            None => {
                class_count = next as usize;
                reference = Some(labels);
            }
            Some(r) => {
                if labels != *r {
                    return Err(Error::precondition(format!(
                        "{side} indistinguishability classes depend on the context \
                         on this ring; the block pair is not semilocalizable at this period"
                    )));
                }
            }
        }
    }
    Ok(SideClasses {
        labels: reference.unwrap(),
        count: class_count,
        fixed: fixed_at_zero,
        keys: keys_at_zero,
    })
}

/// Build the factorization witness for `(x, y)` on the ring of period `p`.
/// All checks are exhaustive; context dependence, class mismatches or a
/// failed reconstruction all abort with `PreconditionFailed`.
pub fn semilocalize(
    ca: &ReversibleCA,
    x: &CellSet,
    y: &CellSet,
    p: usize,
    caps: &Caps,
) -> Result<SemilocalWitness> {
    let q = ca.alphabet().size();
    if p == 0 {
        return Err(Error::precondition("ring period must be positive"));
    }
    let ring = CellSet::interval(0, p as i64 - 1);
    if !x.is_subset(&ring) || !y.is_subset(&ring) {
        return Err(Error::precondition(format!(
            "blocks must live inside the ring [0, {p})"
        )));
    }
    let needed = default_ring_period(ca, x, y);
    if p < needed {
        return Err(Error::precondition(format!(
            "ring period {p} is too small: the blocks and their band need at least {needed}"
        )));
    }
    let required = word_count(q, p).unwrap_or(u128::MAX);
    if required > caps.max_evals as u128 {
        return Err(Error::TooLarge {
            required,
            cap: caps.max_evals,
        });
    }
    if !blocknbh::is_semilocalizable(ca, x, y, caps)? {
        return Err(Error::precondition(format!(
            "the block pair (X = {x}, Y = {y}) is not semilocalizable"
        )));
    }

    let xbar = ring_complement(x, p);
    let ybar = ring_complement(y, p);
    let forward = RingEval::new(ca, p, false);
    let backward = RingEval::new(ca, p, true);

    // forward side: partition X-words by image off Y; image on Y is fixed
    let fwd_side = classify_side(&forward, p, q, x, &xbar, y, &ybar, "forward")?;
    // inverse side: partition off-Y words by preimage on X; preimage off X
    // is fixed
    let inv_side = classify_side(&backward, p, q, &ybar, y, &xbar, x, "inverse")?;
    let e_size = fwd_side.count;
    if e_size != inv_side.count {
        return Err(Error::precondition(format!(
            "class counts disagree between the two sides ({e_size} vs {})",
            inv_side.count
        )));
    }
    let (class_a, g_fixed, d_keys) = (fwd_side.labels, fwd_side.fixed, fwd_side.keys);
    let (class_d, h_fixed) = (inv_side.labels, inv_side.fixed);

    // alpha: class of the X-word ↦ class of its image off Y. The grouped
    // keys of the forward side are exactly off-Y word indices.
    let d_words = WordIdx::new(q, ybar.len()).expect("guarded image space");
    let mut alpha = vec![u32::MAX; e_size];
    for (a_idx, &key) in d_keys.iter().enumerate() {
        let d_class = class_d[key as usize];
        let slot = &mut alpha[class_a[a_idx] as usize];
        if *slot == u32::MAX {
            *slot = d_class;
        } else if *slot != d_class {
            return Err(Error::precondition(
                "class bijection is not well defined on this ring",
            ));
        }
    }
    {
        let mut seen = vec![false; e_size];
        for &v in &alpha {
            if v == u32::MAX || seen[v as usize] {
                return Err(Error::precondition(
                    "class bijection is not a permutation",
                ));
            }
            seen[v as usize] = true;
        }
    }

    let a_words = WordIdx::new(q, x.len()).expect("guarded block space");
    let g: Vec<WitnessRow> = (0..a_words.count)
        .map(|a_idx| WitnessRow {
            input: a_words.decode(a_idx),
            output: g_fixed[a_idx].clone(),
            class: class_a[a_idx],
        })
        .collect();
    let h: Vec<WitnessRow> = (0..d_words.count)
        .map(|d_idx| WitnessRow {
            input: d_words.decode(d_idx),
            output: h_fixed[d_idx].clone(),
            class: class_d[d_idx],
        })
        .collect();

    let witness = SemilocalWitness {
        ring_period: p,
        x: x.clone(),
        y: y.clone(),
        e_size,
        g,
        h,
        alpha,
    };
    verify_witness(ca, &witness, caps)?;
    Ok(witness)
}

/// Re-check a witness from its table data alone: shapes, bijectivity, and
/// the exact reconstruction of `f` on every ring configuration.
pub fn verify_witness(ca: &ReversibleCA, w: &SemilocalWitness, caps: &Caps) -> Result<()> {
    let q = ca.alphabet().size();
    let p = w.ring_period;
    let ring = CellSet::interval(0, p as i64 - 1);
    if !w.x.is_subset(&ring) || !w.y.is_subset(&ring) {
        return Err(Error::violation("witness blocks outside the ring"));
    }
    let required = word_count(q, p).unwrap_or(u128::MAX);
    if required > caps.max_evals as u128 {
        return Err(Error::TooLarge {
            required,
            cap: caps.max_evals,
        });
    }
    let xbar = ring_complement(&w.x, p);
    let ybar = ring_complement(&w.y, p);
    let a_words = WordIdx::new(q, w.x.len()).expect("guarded block space");
    let b_words = WordIdx::new(q, xbar.len()).expect("guarded context space");
    let d_words = WordIdx::new(q, ybar.len()).expect("guarded image space");

    if w.g.len() != a_words.count {
        return Err(Error::violation(format!(
            "g has {} rows, expected {}",
            w.g.len(),
            a_words.count
        )));
    }
    if w.h.len() != d_words.count {
        return Err(Error::violation(format!(
            "h has {} rows, expected {}",
            w.h.len(),
            d_words.count
        )));
    }
    if w.alpha.len() != w.e_size {
        return Err(Error::violation("alpha length differs from |E|"));
    }
    let mut seen = vec![false; w.e_size];
    for &v in &w.alpha {
        if v as usize >= w.e_size || seen[v as usize] {
            return Err(Error::violation("alpha is not a permutation"));
        }
        seen[v as usize] = true;
    }

    // rows must enumerate their inputs in order, classes must be in range,
    // and both tables must be injective as maps to (output, class)
    let mut g_seen = HashMap::new();
    for (i, row) in w.g.iter().enumerate() {
        if row.input != a_words.decode(i) {
            return Err(Error::violation(format!("g row {i} out of order")));
        }
        if row.output.len() != w.y.len() || row.class as usize >= w.e_size {
            return Err(Error::violation(format!("g row {i} malformed")));
        }
        if g_seen
            .insert((row.output.clone(), row.class), i)
            .is_some()
        {
            return Err(Error::violation("g is not injective"));
        }
    }
    let mut h_back: HashMap<(u64, u32), usize> = HashMap::new();
    for (i, row) in w.h.iter().enumerate() {
        if row.input != d_words.decode(i) {
            return Err(Error::violation(format!("h row {i} out of order")));
        }
        if row.output.len() != xbar.len() || row.class as usize >= w.e_size {
            return Err(Error::violation(format!("h row {i} malformed")));
        }
        let mut key: u64 = 0;
        for &s in &row.output {
            key = key * q as u64 + s as u64;
        }
        if h_back.insert((key, row.class), i).is_some() {
            return Err(Error::violation("h is not injective"));
        }
    }

    // exact reconstruction over all q^P ring configurations
    let forward = RingEval::new(ca, p, false);
    let mut config = vec![0; p];
    let mut image = vec![0; p];
    let mut a_word = vec![0; w.x.len()];
    let mut b_word = vec![0; xbar.len()];
    for b_idx in 0..b_words.count {
        b_words.decode_into(b_idx, &mut b_word);
        scatter(&b_word, &xbar, &mut config);
        let b_key = {
            let mut key: u64 = 0;
            for &s in &b_word {
                key = key * q as u64 + s as u64;
            }
            key
        };
        for a_idx in 0..a_words.count {
            a_words.decode_into(a_idx, &mut a_word);
            scatter(&a_word, &w.x, &mut config);
            forward.apply(&config, &mut image);
            let row = &w.g[a_idx];
            for (s, c) in row.output.iter().zip(w.y.iter()) {
                if image[c as usize] != *s {
                    return Err(Error::violation(
                        "reconstruction mismatch on the target block",
                    ));
                }
            }
            let e = w.alpha[row.class as usize];
            let d_idx = match h_back.get(&(b_key, e)) {
                Some(&d) => d,
                None => {
                    return Err(Error::violation(
                        "no h-row matches the context and mediator class",
                    ))
                }
            };
            let d_key = gather_key(&image, &ybar, q);
            if d_key != d_idx as u64 {
                return Err(Error::violation(
                    "reconstruction mismatch off the target block",
                ));
            }
        }
    }
    Ok(())
}
