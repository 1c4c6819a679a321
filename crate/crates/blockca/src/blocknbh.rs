//! Semilocalizability of block splittings, the block neighborhood, and the
//! bounds relating it to the classical and dual neighborhoods.
//!
//! For cell sets X and Y, `P(X, Y, f)` says: `f`, read as a map from
//! `(cells of X, cells of X̄)` to `(cells of Y, cells of Ȳ)`, factors
//! through two block bijections that communicate over a finite mediating
//! set. Combinatorially this is equivalent to three conditions:
//!
//!   1. `X ⊇ Y + N(f)`   (the Y-part depends only on the X-part),
//!   2. `X ⊇ Y + Ñ(f)`   (dually for the inverse),
//!   3. whether two X-words are indistinguishable on `Ȳ` does not depend
//!      on the surrounding context.
//!
//! Condition 3 quantifies over infinite context words, but it reduces to a
//! finite band: outputs at cells `n` with `(n + N) ∩ X = ∅` are equal for
//! equal context regardless of the X-word, so the comparison restricts to
//! `out_band = (X − N) ∖ Y`; and only context cells inside
//! `in_band = ((X − N) + N) ∖ X` can influence the compared outputs. The
//! check then becomes: the partition of the X-words by their `out_band`
//! outputs is the same for every context word on `in_band`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::ca::{compose, ReversibleCA};
use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::pattern::PatternAssignment;
use crate::words::{word_count, Odometer, WordIdx};
use crate::{Caps, Symbol};

/// The finite reduction of condition 3 for a block pair (X, Y).
#[derive(Clone, Debug)]
pub struct CheckBand {
    pub x: CellSet,
    pub y: CellSet,
    /// Output cells outside Y where compared outputs can actually differ.
    pub out_band: CellSet,
    /// Context cells that can influence the compared outputs.
    pub in_band: CellSet,
}

impl CheckBand {
    pub fn new(ca: &ReversibleCA, x: &CellSet, y: &CellSet) -> CheckBand {
        let n = ca.classical_neighborhood();
        let reach = x.minkowski_diff(n);
        CheckBand {
            out_band: reach.without(y),
            in_band: reach.minkowski_sum(n).without(x),
            x: x.clone(),
            y: y.clone(),
        }
    }
}

/// First-occurrence class labelling, backed by a dense table when the key
/// space is small and a hash map otherwise. Keys always fit in a `u64`:
/// every key space is bounded by the evaluation count, which is capped by
/// a `u64` before any enumeration starts.
pub(crate) enum ClassMap {
    Direct(Vec<u32>),
    Hashed(HashMap<u64, u32>),
}

impl ClassMap {
    const DIRECT_LIMIT: u128 = 1 << 20;

    pub fn new(key_space: u128) -> ClassMap {
        if key_space <= Self::DIRECT_LIMIT {
            ClassMap::Direct(vec![u32::MAX; key_space as usize])
        } else {
            ClassMap::Hashed(HashMap::new())
        }
    }

    pub fn get_or_insert(&mut self, key: u64, next: &mut u32) -> u32 {
        match self {
            ClassMap::Direct(v) => {
                let slot = &mut v[key as usize];
                if *slot == u32::MAX {
                    *slot = *next;
                    *next += 1;
                }
                *slot
            }
            ClassMap::Hashed(m) => *m.entry(key).or_insert_with(|| {
                let id = *next;
                *next += 1;
                id
            }),
        }
    }
}

/// Evaluation plan for the forward rule on `out_band` cells, reading inputs
/// from an X-word and an in-band context word.
struct BandEval<'a> {
    q: usize,
    table: &'a [Symbol],
    cells: Vec<CellPlan>,
}

struct CellPlan {
    a_taps: Vec<(usize, usize)>,
    b_taps: Vec<(usize, usize)>,
}

impl<'a> BandEval<'a> {
    fn new(ca: &'a ReversibleCA, band: &CheckBand) -> BandEval<'a> {
        let rule = ca.forward();
        let q = ca.alphabet().size();
        let arity = rule.arity();
        let cells = band
            .out_band
            .iter()
            .map(|n| {
                let mut plan = CellPlan {
                    a_taps: Vec::new(),
                    b_taps: Vec::new(),
                };
                for (i, o) in rule.offsets().iter().enumerate() {
                    let weight = q.pow((arity - 1 - i) as u32);
                    let cell = n + o;
                    if let Some(p) = band.x.position(cell) {
                        plan.a_taps.push((p, weight));
                    } else if let Some(p) = band.in_band.position(cell) {
                        plan.b_taps.push((p, weight));
                    } else {
                        unreachable!("in-band closed under the rule window");
                    }
                }
                plan
            })
            .collect();
        BandEval {
            q,
            table: rule.table(),
            cells,
        }
    }

    fn context_bases(&self, context: &[Symbol]) -> Vec<usize> {
        self.cells
            .iter()
            .map(|cell| {
                cell.b_taps
                    .iter()
                    .map(|&(p, w)| context[p] as usize * w)
                    .sum()
            })
            .collect()
    }

    /// Key of the out-band output word for one X-word under fixed context.
    fn out_key(&self, a: &[Symbol], bases: &[usize]) -> u64 {
        let mut key: u64 = 0;
        for (cell, &base) in self.cells.iter().zip(bases) {
            let mut idx = base;
            for &(p, w) in &cell.a_taps {
                idx += a[p] as usize * w;
            }
            key = key * self.q as u64 + self.table[idx] as u64;
        }
        key
    }
}

/// `X ⊇ Y + N(f)`: the Y-part of the output depends only on the X-part of
/// the input.
pub fn is_semicausal(ca: &ReversibleCA, x: &CellSet, y: &CellSet) -> bool {
    y.minkowski_sum(ca.classical_neighborhood()).is_subset(x)
}

/// Context independence of the indistinguishability relation: the partition
/// of X-words by their out-band outputs is the same for every context word.
/// Requires `X ⊇ Y + N(f)`.
pub fn condition_three(
    ca: &ReversibleCA,
    x: &CellSet,
    y: &CellSet,
    caps: &Caps,
) -> Result<bool> {
    if !is_semicausal(ca, x, y) {
        return Err(Error::precondition(format!(
            "condition-three check needs X ⊇ Y + N; X = {x}, Y = {y}, N = {}",
            ca.classical_neighborhood()
        )));
    }
    let band = CheckBand::new(ca, x, y);
    if band.out_band.is_empty() {
        return Ok(true);
    }
    let q = ca.alphabet().size();
    let required = word_count(q, x.len() + band.in_band.len()).unwrap_or(u128::MAX);
    if required > caps.max_evals as u128 {
        return Err(Error::TooLarge {
            required,
            cap: caps.max_evals,
        });
    }
    let eval = BandEval::new(ca, &band);
    let a_count = word_count(q, x.len()).unwrap() as usize;
    let b_words = WordIdx::new(q, band.in_band.len()).expect("guarded context space");
    let key_space = word_count(q, band.out_band.len()).unwrap_or(u128::MAX);

    // canonical partition under the all-zero context: class ids by first
    // occurrence in X-word order
    let mut reference = Vec::with_capacity(a_count);
    let class_count = {
        let zero_context = vec![0; band.in_band.len()];
        let bases = eval.context_bases(&zero_context);
        let mut classes = ClassMap::new(key_space);
        let mut next = 0u32;
        let mut odo = Odometer::new(q, x.len());
        loop {
            let key = eval.out_key(odo.current(), &bases);
            reference.push(classes.get_or_insert(key, &mut next));
            if !odo.step() {
                break;
            }
        }
        next as usize
    };

    // another context induces the same partition exactly when its keys are
    // constant on every reference class and distinct across classes
    let matches_reference = |b_idx: usize| -> bool {
        let mut context = vec![0; band.in_band.len()];
        b_words.decode_into(b_idx, &mut context);
        let bases = eval.context_bases(&context);
        let mut representative = vec![u64::MAX; class_count];
        let mut odo = Odometer::new(q, x.len());
        for &class in &reference {
            let key = eval.out_key(odo.current(), &bases);
            let slot = &mut representative[class as usize];
            if *slot == u64::MAX {
                *slot = key;
            } else if *slot != key {
                return false;
            }
            odo.step();
        }
        // keys sit below u64::MAX, so every slot is filled; a duplicate
        // representative would merge two reference classes
        representative.sort_unstable();
        representative.windows(2).all(|w| w[0] != w[1])
    };

    let same = (1..b_words.count)
        .into_par_iter()
        .try_for_each(|b_idx| if matches_reference(b_idx) { Ok(()) } else { Err(()) })
        .is_ok();
    Ok(same)
}

/// Whether a specific quadruple of words exhibits a violation of condition
/// 3: the two X-words are indistinguishable under `context` but
/// distinguishable under `context_alt`. The context patterns must cover the
/// in-band and avoid X.
pub fn condition_three_violation(
    ca: &ReversibleCA,
    x: &CellSet,
    y: &CellSet,
    left: &PatternAssignment,
    right: &PatternAssignment,
    context: &PatternAssignment,
    context_alt: &PatternAssignment,
) -> Result<bool> {
    if !is_semicausal(ca, x, y) {
        return Err(Error::precondition(
            "violation check needs X ⊇ Y + N".to_string(),
        ));
    }
    if left.support() != x || right.support() != x {
        return Err(Error::precondition(
            "X-words must be supported exactly on X",
        ));
    }
    if context.support() != context_alt.support() {
        return Err(Error::precondition(
            "both context words must share a support",
        ));
    }
    let band = CheckBand::new(ca, x, y);
    if !band.in_band.is_subset(context.support()) {
        return Err(Error::precondition(format!(
            "context must cover the in-band {}",
            band.in_band
        )));
    }
    if !context.support().intersect(x).is_empty() {
        return Err(Error::precondition("context support must avoid X"));
    }

    let outputs = |a: &PatternAssignment, ctx: &PatternAssignment| -> Vec<Symbol> {
        band.out_band
            .iter()
            .map(|n| {
                let word: Vec<Symbol> = ca
                    .classical_neighborhood()
                    .iter()
                    .map(|o| {
                        a.get(n + o)
                            .or_else(|| ctx.get(n + o))
                            .expect("band cells covered")
                    })
                    .collect();
                ca.forward().eval_word(&word, ca.alphabet())
            })
            .collect()
    };

    let agree_under_ctx = outputs(left, context) == outputs(right, context);
    let agree_under_alt = outputs(left, context_alt) == outputs(right, context_alt);
    Ok(agree_under_ctx && !agree_under_alt)
}

/// `P(X, Y, f)`: the split of `f` along (X, Y) factors through block
/// bijections with a finite mediator.
pub fn is_semilocalizable(
    ca: &ReversibleCA,
    x: &CellSet,
    y: &CellSet,
    caps: &Caps,
) -> Result<bool> {
    if !is_semicausal(ca, x, y) {
        return Ok(false);
    }
    if !y.minkowski_sum(ca.dual_neighborhood()).is_subset(x) {
        return Ok(false);
    }
    condition_three(ca, x, y, caps)
}

/// `(N − N + Ñ) ∩ (Ñ − Ñ + N)`: the a-priori upper bound on the block
/// neighborhood of a single automaton.
pub fn individual_bound(ca: &ReversibleCA) -> CellSet {
    let n = ca.classical_neighborhood();
    let d = ca.dual_neighborhood();
    let first = n.minkowski_diff(n).minkowski_sum(d);
    let second = d.minkowski_diff(d).minkowski_sum(n);
    first.intersect(&second)
}

/// The block neighborhood: the smallest X with `P(X, {0}, f)`.
///
/// The sets satisfying `P(·, {0}, f)` are upward closed and closed under
/// intersection, and the individual bound B0 is one of them, so the minimum
/// is unique and a cell belongs to it exactly when removing the cell from
/// B0 breaks the property. A final check confirms the result satisfies it.
pub fn block_neighborhood(ca: &ReversibleCA, caps: &Caps) -> Result<CellSet> {
    let b0 = individual_bound(ca);
    let origin = CellSet::singleton(0);
    let mut kept = Vec::new();
    for cell in b0.iter() {
        let candidate = b0.without(&CellSet::singleton(cell));
        if !is_semilocalizable(ca, &candidate, &origin, caps)? {
            kept.push(cell);
        }
    }
    let bn = CellSet::new(kept);
    if !is_semilocalizable(ca, &bn, &origin, caps)? {
        return Err(Error::violation(format!(
            "computed block neighborhood {bn} does not satisfy the block property"
        )));
    }
    Ok(bn)
}

/// Per-factor summand of the composition bound.
#[derive(Clone, Debug)]
pub struct CompositionStage {
    /// Ñ of the composite of the factors after this one.
    pub suffix_dual: CellSet,
    /// `suffix_dual + BN(factor)`.
    pub with_factor_block: CellSet,
    /// N of the composite of the factors before this one.
    pub prefix_classical: CellSet,
    /// Sum of the three: this factor's contribution to the bound.
    pub stage_bound: CellSet,
}

#[derive(Clone, Debug)]
pub struct CompositionBound {
    pub stages: Vec<CompositionStage>,
    /// Union of the stage bounds.
    pub total: CellSet,
    /// `BN(composite) ⊆ total`, when the true BN fit under the caps.
    pub contained: Option<bool>,
}

/// Computed neighborhoods of one automaton together with every bound
/// verdict this crate knows how to check.
#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub classical: Option<CellSet>,
    pub dual: Option<CellSet>,
    pub block: Option<CellSet>,
    pub individual: Option<CellSet>,
    pub composition: Option<CompositionBound>,
    /// `N ∪ Ñ ⊆ BN`
    pub lower_ok: Option<bool>,
    /// `BN ⊆ individual bound`
    pub upper_ok: Option<bool>,
    /// `BN(dual) == BN`
    pub self_dual_ok: Option<bool>,
    /// `BN == N ∪ Ñ` (informational, not a verdict)
    pub minimal: Option<bool>,
}

impl BoundsReport {
    fn empty() -> BoundsReport {
        BoundsReport {
            classical: None,
            dual: None,
            block: None,
            individual: None,
            composition: None,
            lower_ok: None,
            upper_ok: None,
            self_dual_ok: None,
            minimal: None,
        }
    }

    /// No checked verdict failed.
    pub fn passes(&self) -> bool {
        self.lower_ok != Some(false)
            && self.upper_ok != Some(false)
            && self.self_dual_ok != Some(false)
            && self
                .composition
                .as_ref()
                .is_none_or(|c| c.contained != Some(false))
    }
}

/// Bound for the composite `f_n ⋯ f_1` (`f_1` applied first):
/// the union over k of `Ñ(f_n ⋯ f_{k+1}) + BN(f_k) + N(f_{k-1} ⋯ f_1)`,
/// with empty products counting as the identity (N = Ñ = {0}).
/// The composite's own block neighborhood is computed for the containment
/// verdict when it fits under the caps.
pub fn composition_bound(factors: &[&ReversibleCA], caps: &Caps) -> Result<BoundsReport> {
    if factors.is_empty() {
        return Err(Error::precondition("composition of zero automata"));
    }
    let q = factors[0].alphabet().size();
    for f in factors {
        if f.alphabet().size() != q {
            return Err(Error::AlphabetMismatch {
                left: q,
                right: f.alphabet().size(),
            });
        }
    }
    let n = factors.len();
    let origin = CellSet::singleton(0);

    // suffix composites f_n ⋯ f_{k+1} for k = n-1 .. 0
    let mut suffix_dual = vec![origin.clone(); n + 1];
    {
        let mut acc: Option<ReversibleCA> = None;
        for k in (0..n).rev() {
            let next = match &acc {
                None => factors[k].clone(),
                Some(s) => compose(s, factors[k], caps)?,
            };
            suffix_dual[k] = next.dual_neighborhood().clone();
            acc = Some(next);
        }
    }
    // prefix composites f_{k-1} ⋯ f_1 for k = 1 ..= n
    let mut prefix_classical = vec![origin.clone(); n + 1];
    {
        let mut acc: Option<ReversibleCA> = None;
        for k in 1..=n {
            prefix_classical[k] = match &acc {
                None => origin.clone(),
                Some(p) => p.classical_neighborhood().clone(),
            };
            acc = Some(match acc {
                None => factors[k - 1].clone(),
                Some(p) => compose(factors[k - 1], &p, caps)?,
            });
        }
    }

    let mut stages = Vec::with_capacity(n);
    let mut total = CellSet::empty();
    for k in 1..=n {
        let factor_block = block_neighborhood(factors[k - 1], caps)?;
        let with_factor_block = suffix_dual[k].minkowski_sum(&factor_block);
        let stage_bound = with_factor_block.minkowski_sum(&prefix_classical[k]);
        total = total.union(&stage_bound);
        stages.push(CompositionStage {
            suffix_dual: suffix_dual[k].clone(),
            with_factor_block,
            prefix_classical: prefix_classical[k].clone(),
            stage_bound,
        });
    }

    let mut report = BoundsReport::empty();
    let composite = {
        let mut acc = factors[0].clone();
        for f in &factors[1..] {
            acc = compose(f, &acc, caps)?;
        }
        acc
    };
    report.classical = Some(composite.classical_neighborhood().clone());
    report.dual = Some(composite.dual_neighborhood().clone());
    report.individual = Some(individual_bound(&composite));
    let contained = match block_neighborhood(&composite, caps) {
        Ok(bn) => {
            let ok = bn.is_subset(&total);
            report.block = Some(bn);
            Some(ok)
        }
        Err(Error::TooLarge { .. }) | Err(Error::TableTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    report.composition = Some(CompositionBound {
        stages,
        total,
        contained,
    });
    Ok(report)
}

/// Interval bound for iterates: with N ⊆ [-a, b] and Ñ ⊆ [-c, d] tightest,
/// `BN(f^k) ⊆ [-(k+1)·max(a,c) - min(b,d), (k+1)·max(b,d) + min(a,c)]`.
/// One-sided neighborhoods give negative "radii"; the formula is applied
/// verbatim and only containment is asserted by callers.
pub fn iterate_bound(ca: &ReversibleCA, k: u32) -> CellSet {
    let n = ca.classical_neighborhood();
    let d = ca.dual_neighborhood();
    let a = -n.min().expect("nonempty neighborhood");
    let b = n.max().expect("nonempty neighborhood");
    let c = -d.min().expect("nonempty dual neighborhood");
    let dd = d.max().expect("nonempty dual neighborhood");
    let k = k as i64;
    let lo = -(k + 1) * a.max(c) - b.min(dd);
    let hi = (k + 1) * b.max(dd) + a.min(c);
    CellSet::interval(lo, hi)
}

/// Full report for one automaton: N, Ñ, BN, the individual bound, the
/// sandwich containments, self-duality of BN, and the minimality flag.
pub fn verify_all_bounds(ca: &ReversibleCA, caps: &Caps) -> Result<BoundsReport> {
    let classical = ca.classical_neighborhood().clone();
    let dual = ca.dual_neighborhood().clone();
    let block = block_neighborhood(ca, caps)?;
    let individual = individual_bound(ca);
    let union = classical.union(&dual);
    let dual_block = block_neighborhood(&ca.dual(), caps)?;
    Ok(BoundsReport {
        lower_ok: Some(union.is_subset(&block)),
        upper_ok: Some(block.is_subset(&individual)),
        self_dual_ok: Some(dual_block == block),
        minimal: Some(block == union),
        classical: Some(classical),
        dual: Some(dual),
        block: Some(block),
        individual: Some(individual),
        composition: None,
    })
}
