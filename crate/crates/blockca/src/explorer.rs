//! Systematic campaigns over small reversible CAs: exhaustive rule-space
//! enumeration, surveys of (N, Ñ, BN) triples, the minimality test for
//! additive automata, and constructions realizing a prescribed triple.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::alphabet::Alphabet;
use crate::blocknbh::{block_neighborhood, individual_bound};
use crate::ca::{compose, direct_sum, ReversibleCA};
use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::reversibility::{is_injective, synthesize_inverse};
use crate::rule::LocalRule;
use crate::words::{word_count, WordIdx};
use crate::{Caps, Symbol};

/// A reversible CA found by enumeration, tagged with its table index.
#[derive(Clone, Debug)]
pub struct EnumeratedCa {
    pub table_index: u64,
    pub ca: ReversibleCA,
}

/// The three neighborhoods of one surveyed automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleRecord {
    pub table_index: u64,
    pub classical: CellSet,
    pub dual: CellSet,
    pub block: CellSet,
}

/// Stream the reversible CAs over a window, in lexicographic order of their
/// rule tables. Non-injective tables are skipped; injective ones are
/// promoted by inverse synthesis. `limit` truncates the number of emitted
/// automata.
pub fn enumerate_rcas(
    q: usize,
    window: &CellSet,
    limit: Option<u64>,
    max_radius: u32,
    caps: &Caps,
) -> Result<impl Iterator<Item = Result<EnumeratedCa>>> {
    let alphabet = Alphabet::new(q)?;
    let arity = window.len();
    let table_len = word_count(q, arity)
        .and_then(|c| usize::try_from(c).ok())
        .ok_or(Error::TableTooLarge {
            required: word_count(q, arity).unwrap_or(u128::MAX),
            cap: caps.max_table,
        })?;
    if table_len as u128 > caps.max_table as u128 {
        return Err(Error::TableTooLarge {
            required: table_len as u128,
            cap: caps.max_table,
        });
    }
    // number of candidate tables, saturating; the scan stops at the limit
    let total: u64 = word_count(q, table_len)
        .and_then(|c| u64::try_from(c).ok())
        .unwrap_or(u64::MAX);
    let window = window.clone();
    let caps = *caps;
    let limit = limit.unwrap_or(u64::MAX);

    let iter = (0..total)
        .filter_map(move |table_index| {
            let mut digits = vec![0 as Symbol; table_len];
            let mut rest = table_index;
            for slot in digits.iter_mut().rev() {
                *slot = (rest % q as u64) as Symbol;
                rest /= q as u64;
            }
            let rule = LocalRule::new(window.clone(), digits, &alphabet)
                .expect("enumerated table is well formed");
            match is_injective(&rule, &alphabet, &caps) {
                Err(e) => Some(Err(e)),
                Ok(v) if !v.injective => None,
                Ok(_) => Some(
                    synthesize_inverse(&rule, &alphabet, max_radius, &caps)
                        .and_then(|inverse| {
                            ReversibleCA::new(alphabet.clone(), rule, inverse, &caps)
                        })
                        .map(|ca| EnumeratedCa { table_index, ca }),
                ),
            }
        })
        .take(limit as usize);
    Ok(iter)
}

/// For an automaton additive under componentwise XOR, the block
/// neighborhood collapses to `N ∪ Ñ`; this re-checks additivity on rings
/// and then compares the computed block neighborhood against the union.
pub fn check_subtraction_minimal(ca: &ReversibleCA, caps: &Caps) -> Result<bool> {
    assert_additive(ca)?;
    let bn = block_neighborhood(ca, caps)?;
    Ok(bn == ca.classical_neighborhood().union(ca.dual_neighborhood()))
}

/// Additivity on rings: `f(0) = 0` and `f(u ⊕ δ) = f(u) ⊕ f(δ)` for every
/// configuration `u` and single-cell impulse `δ`, which extends to all
/// pairs by peeling impulses. Symbols XOR componentwise exactly when every
/// track is binary.
fn assert_additive(ca: &ReversibleCA) -> Result<()> {
    let alphabet = ca.alphabet();
    if alphabet.track_view().iter().any(|&t| t != 2) {
        return Err(Error::precondition(
            "additivity needs an all-binary track alphabet",
        ));
    }
    let q = alphabet.size();
    let span = ca
        .classical_neighborhood()
        .diameter()
        .unwrap_or(0)
        .unsigned_abs() as usize;
    // smallest ring that exercises the full window, capped to stay exhaustive
    let mut p = span + 2;
    while word_count(q, p).unwrap_or(u128::MAX) > 1 << 16 && p > 1 {
        p -= 1;
    }
    let words = WordIdx::new(q, p).expect("bounded ring space");
    let zero = vec![0 as Symbol; p];
    if ca.apply_on_ring(&zero) != zero {
        return Err(Error::precondition(
            "rule does not fix the zero configuration",
        ));
    }
    let mut u = vec![0; p];
    for idx in 0..words.count {
        words.decode_into(idx, &mut u);
        let fu = ca.apply_on_ring(&u);
        for cell in 0..p {
            for bit in 0..q.trailing_zeros() {
                let mut delta = zero.clone();
                delta[cell] = 1 << bit;
                let fdelta = ca.apply_on_ring(&delta);
                let mut sum = u.clone();
                sum[cell] ^= 1 << bit;
                let fsum = ca.apply_on_ring(&sum);
                let expect: Vec<Symbol> =
                    fu.iter().zip(&fdelta).map(|(a, b)| a ^ b).collect();
                if fsum != expect {
                    return Err(Error::precondition(
                        "rule is not additive under componentwise XOR",
                    ));
                }
            }
        }
    }
    Ok(())
}

/// A constructed automaton realizing a prescribed neighborhood triple.
#[derive(Clone, Debug)]
pub struct ConjectureInstance {
    pub ca: ReversibleCA,
    pub classical: CellSet,
    pub dual: CellSet,
    pub block: CellSet,
    /// Whether the block neighborhood was computed on the full sum; when
    /// the flat enumeration exceeds the caps it is assembled from the
    /// per-component computations instead.
    pub block_direct: bool,
}

/// Build a reversible CA with `N = x`, `Ñ = y`, `BN = z`, as a direct sum
/// of one shift per cell of `x` and, for each `z`-cell outside `x`, a
/// shifted (possibly mirrored) stretched two-track automaton realizing
/// `{a, b, 2b - a}`. Requires `x = y`,
/// `x ∪ y ⊆ z ⊆ (x - x + y) ∩ (y - y + x)` and
/// `z ⊆ {2b - a | a, b ∈ x ∩ y}`. The triple is re-computed and verified
/// before returning.
pub fn build_conjecture_instance(
    x: &CellSet,
    y: &CellSet,
    z: &CellSet,
    caps: &Caps,
) -> Result<ConjectureInstance> {
    if x != y {
        return Err(Error::precondition(
            "only equal input and dual neighborhoods are constructible",
        ));
    }
    if x.is_empty() {
        return Err(Error::precondition("neighborhoods must be nonempty"));
    }
    let bound = x
        .minkowski_diff(x)
        .minkowski_sum(y)
        .intersect(&y.minkowski_diff(y).minkowski_sum(x));
    if !x.union(y).is_subset(z) || !z.is_subset(&bound) {
        return Err(Error::precondition(format!(
            "target {z} must sit between {} and {bound}",
            x.union(y)
        )));
    }
    let core = x.intersect(y);
    let reachable: CellSet = core
        .iter()
        .flat_map(|a| core.iter().map(move |b| 2 * b - a))
        .collect();
    if !z.is_subset(&reachable) {
        return Err(Error::precondition(format!(
            "target {z} has cells outside the constructible set {reachable}"
        )));
    }

    let components = collect_components(x, z, &core, caps)?;
    let mut ca = components[0].clone();
    for part in &components[1..] {
        ca = direct_sum(&ca, part, caps)?;
    }

    if ca.classical_neighborhood() != x {
        return Err(Error::violation(format!(
            "constructed neighborhood {} differs from target {x}",
            ca.classical_neighborhood()
        )));
    }
    if ca.dual_neighborhood() != y {
        return Err(Error::violation(format!(
            "constructed dual neighborhood {} differs from target {y}",
            ca.dual_neighborhood()
        )));
    }
    let (block, block_direct) = match block_neighborhood(&ca, caps) {
        Ok(bn) => (bn, true),
        Err(Error::TooLarge { .. }) => {
            // the sum's block neighborhood is the union of the components':
            // the factorization conditions hold for a product exactly when
            // they hold for every factor
            let mut union = CellSet::empty();
            for part in &components {
                union = union.union(&block_neighborhood(part, caps)?);
            }
            (union, false)
        }
        Err(e) => return Err(e),
    };
    if &block != z {
        return Err(Error::violation(format!(
            "constructed block neighborhood {block} differs from target {z}"
        )));
    }
    Ok(ConjectureInstance {
        classical: ca.classical_neighborhood().clone(),
        dual: ca.dual_neighborhood().clone(),
        block,
        block_direct,
        ca,
    })
}

/// One shift per cell of `x`, plus a shifted stretched block automaton per
/// cell of `z` outside `x` (mirrored when the stretch is negative).
fn collect_components(
    x: &CellSet,
    z: &CellSet,
    core: &CellSet,
    caps: &Caps,
) -> Result<Vec<ReversibleCA>> {
    let two = Alphabet::new(2)?;
    let mut parts: Vec<ReversibleCA> = x
        .iter()
        .map(|cell| ReversibleCA::shift(cell, two.clone()))
        .collect();
    for target in z.without(x).iter() {
        // decompose target = 2b - a with a, b in the core; smallest a wins
        let (a, b) = core
            .iter()
            .find_map(|a| {
                let twice = target + a;
                (twice % 2 == 0 && core.contains(twice / 2)).then_some((a, twice / 2))
            })
            .expect("reachability was validated");
        let stretch = b - a;
        let block = if stretch > 0 {
            ReversibleCA::toffoli(stretch as u32)
        } else {
            ReversibleCA::toffoli((-stretch) as u32).mirror()
        };
        parts.push(compose(
            &ReversibleCA::shift(a, block.alphabet().clone()),
            &block,
            caps,
        )?);
    }
    Ok(parts)
}

/// Exhaustive survey of the reversible CAs over one window: computes the
/// (N, Ñ, BN) triple of every automaton, asserting the sandwich containment
/// and self-duality along the way, and appends records to a resumable
/// results file. Returns all records in table order.
pub fn survey(
    q: usize,
    window: &CellSet,
    limit: Option<u64>,
    out_path: Option<&Path>,
    max_radius: u32,
    caps: &Caps,
) -> Result<Vec<TripleRecord>> {
    let header = format!("# survey q={} window={} format=1", q, window.compact());
    let mut existing: Vec<TripleRecord> = Vec::new();
    if let Some(path) = out_path {
        if path.exists() {
            let text = fs::read_to_string(path)?;
            existing = parse_survey(&text, &header)?;
        }
    }
    let mut file = match out_path {
        Some(path) => {
            let fresh = !path.exists();
            let mut f = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)?;
            if fresh {
                writeln!(f, "{header}")?;
            }
            Some(f)
        }
        None => None,
    };

    let mut records = Vec::new();
    let mut reused = existing.into_iter().peekable();
    for item in enumerate_rcas(q, window, limit, max_radius, caps)? {
        let EnumeratedCa { table_index, ca } = item?;
        if let Some(front) = reused.peek() {
            if front.table_index == table_index {
                records.push(reused.next().unwrap());
                continue;
            }
        }
        let bn = block_neighborhood(&ca, caps)?;
        let lower = ca.classical_neighborhood().union(ca.dual_neighborhood());
        if !lower.is_subset(&bn) || !bn.is_subset(&individual_bound(&ca)) {
            return Err(Error::violation(format!(
                "table {table_index}: block neighborhood {bn} escapes its bounds"
            )));
        }
        let dual_bn = block_neighborhood(&ca.dual(), caps)?;
        if dual_bn != bn {
            return Err(Error::violation(format!(
                "table {table_index}: dual block neighborhood {dual_bn} differs from {bn}"
            )));
        }
        let record = TripleRecord {
            table_index,
            classical: ca.classical_neighborhood().clone(),
            dual: ca.dual_neighborhood().clone(),
            block: bn,
        };
        if let Some(f) = &mut file {
            writeln!(f, "{}", render_record(&record))?;
        }
        records.push(record);
    }
    Ok(records)
}

pub fn render_record(r: &TripleRecord) -> String {
    format!(
        "{} {} {} {}",
        r.table_index,
        r.classical.compact(),
        r.dual.compact(),
        r.block.compact()
    )
}

fn parse_survey(text: &str, expected_header: &str) -> Result<Vec<TripleRecord>> {
    let mut records = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, line)) if line.trim() == expected_header => {}
        Some((_, line)) => {
            return Err(Error::parse(
                1,
                format!("survey header `{line}` does not match `{expected_header}`"),
            ))
        }
        None => return Err(Error::parse(1, "empty survey file")),
    }
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse_set = |s: Option<&str>, i: usize| -> Result<CellSet> {
            s.ok_or_else(|| Error::parse(i + 1, "truncated record"))?
                .parse()
                .map_err(|e: String| Error::parse(i + 1, e))
        };
        let table_index = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(i + 1, "bad table index"))?;
        let classical = parse_set(parts.next(), i)?;
        let dual = parse_set(parts.next(), i)?;
        let block = parse_set(parts.next(), i)?;
        records.push(TripleRecord {
            table_index,
            classical,
            dual,
            block,
        });
    }
    Ok(records)
}
