//! Acceptance suite: every shipped guarantee, run end to end with exact
//! (set-equality or containment) checks and pinned runtime budgets.
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion pass lines.

use std::panic::{catch_unwind, UnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use blockca::blocknbh::{
    block_neighborhood, composition_bound, condition_three, condition_three_violation,
    individual_bound, is_semilocalizable, iterate_bound, verify_all_bounds,
};
use blockca::ca::{compose, linear_ca, power, LinearTerm, ReversibleCA};
use blockca::explorer::{build_conjecture_instance, enumerate_rcas, survey};
use blockca::reversibility::synthesize_inverse;
use blockca::witness::verify_witness;
use blockca::{Alphabet, Caps, CellSet, PatternAssignment, Symbol};

fn caps() -> Caps {
    Caps::default()
}

fn toffoli() -> ReversibleCA {
    ReversibleCA::toffoli(1)
}

fn criterion<F: FnOnce() + UnwindSafe>(name: &str, body: F) {
    let start = Instant::now();
    let outcome = catch_unwind(body);
    let elapsed = start.elapsed();
    match outcome {
        Ok(()) => println!("acceptance {name}: PASS ({elapsed:.2?})"),
        Err(cause) => {
            println!("acceptance {name}: FAIL ({elapsed:.2?})");
            std::panic::resume_unwind(cause);
        }
    }
}

/// Deterministic splitmix64 for the sampled suites.
struct Rng(u64);

impl Rng {
    fn new(seed: u64) -> Rng {
        Rng(seed)
    }

    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    fn cell(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    fn subset(&mut self, lo: i64, hi: i64, max_len: usize) -> CellSet {
        let len = self.below(max_len as u64 + 1) as usize;
        CellSet::new((0..len).map(|_| self.cell(lo, hi)).collect())
    }
}

fn two_track_partial_shift() -> ReversibleCA {
    linear_ca(
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
    .unwrap()
}

#[test]
fn acceptance_01_toffoli_neighborhoods() {
    criterion("01 toffoli-neighborhoods", || {
        let start = Instant::now();
        let t = toffoli();
        let expected = CellSet::new(vec![0, 1]);
        assert_eq!(t.classical_neighborhood(), &expected);
        assert_eq!(t.dual_neighborhood(), &expected);
        assert!(start.elapsed() < Duration::from_millis(100));
    });
}

#[test]
fn acceptance_02_toffoli_block_neighborhood() {
    criterion("02 toffoli-block-neighborhood", || {
        let start = Instant::now();
        let bn = block_neighborhood(&toffoli(), &caps()).unwrap();
        assert_eq!(bn, CellSet::interval(0, 2));
        assert!(start.elapsed() < Duration::from_secs(5));
    });
}

#[test]
fn acceptance_03_counterexample_words() {
    criterion("03 counterexample-words", || {
        let t = toffoli();
        let x = CellSet::new(vec![0, 1]);
        let y = CellSet::singleton(0);
        assert!(!condition_three(&t, &x, &y, &caps()).unwrap());

        // the explicit failing quadruple: X-words (0,0)(0,0) and (0,0)(1,1);
        // contexts all (0,0) except one carries (1,0) at cell 2
        let support = CellSet::new(vec![-1, 2]);
        let a = PatternAssignment::new(x.clone(), vec![0, 0]).unwrap();
        let a_alt = PatternAssignment::new(x.clone(), vec![0, 3]).unwrap();
        let with_impulse = PatternAssignment::new(support.clone(), vec![0, 2]).unwrap();
        let all_zero = PatternAssignment::new(support, vec![0, 0]).unwrap();
        let violated =
            condition_three_violation(&t, &x, &y, &a, &a_alt, &with_impulse, &all_zero).unwrap();
        assert!(violated);
    });
}

#[test]
fn acceptance_04_stretched_block_neighborhoods() {
    criterion("04 stretched-block-neighborhoods", || {
        for l in 1..=3i64 {
            let bn = block_neighborhood(&ReversibleCA::toffoli(l as u32), &caps()).unwrap();
            assert_eq!(bn, CellSet::new(vec![0, l, 2 * l]), "stretch {l}");
        }
    });
}

#[test]
fn acceptance_05_inverse_synthesis_exact_table() {
    criterion("05 inverse-synthesis", || {
        let t = toffoli();
        let inverse = synthesize_inverse(t.forward(), t.alphabet(), 8, &caps()).unwrap();
        assert_eq!(inverse.offsets(), &CellSet::new(vec![-1, 0]));
        assert_eq!(
            inverse.table(),
            &[0, 0, 1, 1, 2, 3, 3, 2, 0, 0, 1, 1, 2, 3, 3, 2]
        );
    });
}

/// Quadruple-quantifier oracle for context independence over a widened
/// window W: for all X-words a, a' and context words b, b' on W \ X, if
/// the outputs agree under b they must agree under b'. Comparison runs over
/// every output cell computable inside W (cells whose window stays in W),
/// so it makes no use of the band reduction under test.
fn widened_window_oracle(ca: &ReversibleCA, x: &CellSet, y: &CellSet, widen: i64) -> bool {
    if x.is_empty() {
        // a single empty block word is indistinguishable from itself
        return true;
    }
    let q = ca.alphabet().size();
    let n = ca.classical_neighborhood();
    let reach = x.minkowski_diff(n);
    let span = x.union(&reach.minkowski_sum(n));
    let w_lo = span.min().unwrap() - widen;
    let w_hi = span.max().unwrap() + widen;
    let window = CellSet::interval(w_lo, w_hi);
    let ctx_cells = window.without(x);
    let n_lo = n.min().unwrap();
    let n_hi = n.max().unwrap();
    let compare: CellSet = (w_lo - n_lo..=w_hi - n_hi)
        .filter(|&c| !y.contains(c))
        .collect();

    let a_count = q.pow(x.len() as u32);
    let c_count = q.pow(ctx_cells.len() as u32);
    let decode = |mut idx: usize, len: usize| -> Vec<Symbol> {
        let mut out = vec![0; len];
        for slot in out.iter_mut().rev() {
            *slot = (idx % q) as Symbol;
            idx /= q;
        }
        out
    };
    let outputs = |a: &[Symbol], ctx: &[Symbol]| -> Vec<Symbol> {
        compare
            .iter()
            .map(|cell| {
                let word: Vec<Symbol> = n
                    .iter()
                    .map(|o| {
                        let c = cell + o;
                        if let Some(p) = x.position(c) {
                            a[p]
                        } else {
                            ctx[ctx_cells.position(c).expect("inside W")]
                        }
                    })
                    .collect();
                ca.forward().eval_word(&word, ca.alphabet())
            })
            .collect()
    };

    // memoized output rows, indexed by (block word, context word)
    let mut rows: Vec<Vec<Symbol>> = Vec::with_capacity(a_count * c_count);
    for a_idx in 0..a_count {
        let a = decode(a_idx, x.len());
        for c_idx in 0..c_count {
            rows.push(outputs(&a, &decode(c_idx, ctx_cells.len())));
        }
    }
    let row = |a_idx: usize, c_idx: usize| -> &Vec<Symbol> { &rows[a_idx * c_count + c_idx] };
    for a in 0..a_count {
        for a_alt in 0..a_count {
            for b in 0..c_count {
                if row(a, b) != row(a_alt, b) {
                    continue;
                }
                for b_alt in 0..c_count {
                    if row(a, b_alt) != row(a_alt, b_alt) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[test]
fn acceptance_06_subtraction_minimality() {
    criterion("06 subtraction-minimality", || {
        let f = two_track_partial_shift();
        let bn = block_neighborhood(&f, &caps()).unwrap();
        let union = f.classical_neighborhood().union(f.dual_neighborhood());
        assert_eq!(bn, union);
        assert_eq!(bn, CellSet::interval(-1, 1));

        // cross-check the per-cell removal verdicts against the widened oracle
        let b0 = individual_bound(&f);
        let origin = CellSet::singleton(0);
        for cell in b0.iter() {
            let candidate = b0.without(&CellSet::singleton(cell));
            let fast = is_semilocalizable(&f, &candidate, &origin, &caps()).unwrap();
            let semicausal = origin
                .minkowski_sum(f.classical_neighborhood())
                .is_subset(&candidate)
                && origin
                    .minkowski_sum(f.dual_neighborhood())
                    .is_subset(&candidate);
            let slow = semicausal && widened_window_oracle(&f, &candidate, &origin, 1);
            assert_eq!(fast, slow, "cell {cell}");
        }

        for k in -3..=3 {
            let s = ReversibleCA::shift(k, Alphabet::new(2).unwrap());
            let bn = block_neighborhood(&s, &caps()).unwrap();
            assert_eq!(bn, CellSet::singleton(k));
            assert_eq!(
                bn,
                s.classical_neighborhood().union(s.dual_neighborhood())
            );
        }
    });
}

#[test]
fn acceptance_07_individual_bound_over_survey() {
    criterion("07 individual-bound-survey", || {
        let start = Instant::now();
        let records = survey(2, &CellSet::interval(0, 1), None, None, 8, &caps()).unwrap();
        assert_eq!(records.len(), 4);
        for r in &records {
            let lower = r.classical.union(&r.dual);
            let upper = r
                .classical
                .minkowski_diff(&r.classical)
                .minkowski_sum(&r.dual)
                .intersect(&r.dual.minkowski_diff(&r.dual).minkowski_sum(&r.classical));
            assert!(lower.is_subset(&r.block), "table {}", r.table_index);
            assert!(r.block.is_subset(&upper), "table {}", r.table_index);
        }
        let t = toffoli();
        let bn = block_neighborhood(&t, &caps()).unwrap();
        assert!(t
            .classical_neighborhood()
            .union(t.dual_neighborhood())
            .is_subset(&bn));
        assert!(bn.is_subset(&individual_bound(&t)));
        assert!(start.elapsed() < Duration::from_secs(60));
    });
}

#[test]
fn acceptance_08_self_duality_over_survey() {
    criterion("08 self-duality-survey", || {
        let mut checked = 0;
        for item in enumerate_rcas(2, &CellSet::interval(0, 1), None, 8, &caps()).unwrap() {
            let ca = item.unwrap().ca;
            let bn = block_neighborhood(&ca, &caps()).unwrap();
            assert_eq!(block_neighborhood(&ca.dual(), &caps()).unwrap(), bn);
            checked += 1;
        }
        assert_eq!(checked, 4);
        let t = toffoli();
        assert_eq!(
            block_neighborhood(&t.dual(), &caps()).unwrap(),
            block_neighborhood(&t, &caps()).unwrap()
        );
    });
}

#[test]
fn acceptance_09_composition_bound() {
    criterion("09 composition-bound", || {
        let start = Instant::now();
        let t = toffoli();
        let report = composition_bound(&[&t, &t], &caps()).unwrap();
        let comp = report.composition.as_ref().unwrap();
        assert_eq!(comp.total, CellSet::interval(0, 3));
        let bn = report.block.as_ref().expect("true BN fits under caps");
        assert!(bn.is_subset(&comp.total));
        assert_eq!(comp.contained, Some(true));
        assert!(start.elapsed() < Duration::from_secs(120));
    });
}

#[test]
fn acceptance_10_iterate_bound() {
    criterion("10 iterate-bound", || {
        let t = toffoli();
        assert_eq!(iterate_bound(&t, 2), CellSet::interval(-1, 3));
        for k in 1..=2 {
            let iterated = power(&t, k, &caps()).unwrap();
            let bn = block_neighborhood(&iterated, &caps()).unwrap();
            assert!(
                bn.is_subset(&iterate_bound(&t, k)),
                "k = {k}: {bn} not within {}",
                iterate_bound(&t, k)
            );
        }
    });
}

#[test]
fn acceptance_11_witness_exactness_end_to_end() {
    criterion("11 witness-exactness", || {
        let bin = env!("CARGO_BIN_EXE_blockca");
        let dir = tempfile::tempdir().unwrap();
        let ca_path = dir.path().join("toffoli.ca");
        let witness_path = dir.path().join("toffoli.witness");

        let status = Command::new(bin)
            .args(["builtin", "toffoli", "--l", "1", "-o"])
            .arg(&ca_path)
            .status()
            .unwrap();
        assert!(status.success());

        let output = Command::new(bin)
            .args(["--porcelain", "decompose"])
            .arg(&ca_path)
            .args(["--ring", "6", "--cells", "0..2", "--target", "0", "-o"])
            .arg(&witness_path)
            .output()
            .unwrap();
        assert!(output.status.success());
        let stdout = String::from_utf8(output.stdout).unwrap();
        assert!(stdout.contains("reconstruction=ok"), "stdout: {stdout}");
        assert!(stdout.contains("configurations=4096"), "stdout: {stdout}");

        let status = Command::new(bin)
            .arg("verify-witness")
            .arg(&ca_path)
            .arg(&witness_path)
            .status()
            .unwrap();
        assert!(status.success());

        // independent in-process reconstruction of the written file
        let witness = blockca::format::read_witness_file(&witness_path).unwrap();
        assert_eq!(witness.ring_period, 6);
        verify_witness(&toffoli(), &witness, &caps()).unwrap();

        // a non-semilocalizable block pair is refused with a usage error
        let output = Command::new(bin)
            .arg("decompose")
            .arg(&ca_path)
            .args(["--ring", "6", "--cells", "0,1", "--target", "0"])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(2));
    });
}

#[test]
fn acceptance_12_conjecture_instance() {
    criterion("12 conjecture-instance", || {
        let x = CellSet::new(vec![0, 1]);
        let z = CellSet::interval(0, 2);
        let inst = build_conjecture_instance(&x, &x, &z, &caps()).unwrap();
        assert_eq!(inst.classical, x);
        assert_eq!(inst.dual, x);
        assert_eq!(inst.block, z);
        assert!(inst.block_direct, "verified on the full sum");
        // and the full bounds report agrees
        let report = verify_all_bounds(&inst.ca, &caps()).unwrap();
        assert!(report.passes());
        assert_eq!(report.block.unwrap(), z);
    });
}

fn survey_pool() -> Vec<(ReversibleCA, CellSet)> {
    let mut pool = Vec::new();
    for window in [
        CellSet::singleton(0),
        CellSet::interval(0, 1),
        CellSet::interval(-1, 1),
    ] {
        for item in enumerate_rcas(2, &window, None, 8, &caps()).unwrap() {
            let ca = item.unwrap().ca;
            let bn = block_neighborhood(&ca, &caps()).unwrap();
            pool.push((ca, bn));
        }
    }
    pool
}

#[test]
fn acceptance_13a_monotonicity() {
    criterion("13a monotonicity", || {
        let pool = survey_pool();
        let mut rng = Rng::new(0x5eed_0001);
        let mut instances = 0;
        let mut nonvacuous = 0;
        while instances < 220 {
            let (ca, bn) = &pool[rng.below(pool.len() as u64) as usize];
            let y = rng.subset(-2, 2, 2);
            let x = if rng.below(10) < 7 {
                y.minkowski_sum(bn).union(&rng.subset(-3, 3, 2))
            } else {
                rng.subset(-3, 3, 4)
            };
            let holds = is_semilocalizable(ca, &x, &y, &caps()).unwrap();
            instances += 1;
            if !holds {
                continue;
            }
            nonvacuous += 1;
            let grown = x.union(&rng.subset(-4, 4, 2));
            let shrunk: CellSet = y.iter().filter(|_| rng.below(2) == 0).collect();
            assert!(
                is_semilocalizable(ca, &grown, &shrunk, &caps()).unwrap(),
                "monotonicity broken: X={x} Y={y} X'={grown} Y'={shrunk}"
            );
        }
        assert!(nonvacuous >= 100, "only {nonvacuous} non-vacuous samples");
    });
}

#[test]
fn acceptance_13b_intersection_closure() {
    criterion("13b intersection-closure", || {
        let pool = survey_pool();
        let mut rng = Rng::new(0x5eed_0002);
        let mut instances = 0;
        let mut nonvacuous = 0;
        while instances < 220 {
            let (ca, bn) = &pool[rng.below(pool.len() as u64) as usize];
            let y = rng.subset(-2, 2, 2);
            let base = y.minkowski_sum(bn);
            let x1 = base.union(&rng.subset(-3, 3, 3));
            let x2 = base.union(&rng.subset(-3, 3, 3));
            instances += 1;
            if !is_semilocalizable(ca, &x1, &y, &caps()).unwrap()
                || !is_semilocalizable(ca, &x2, &y, &caps()).unwrap()
            {
                continue;
            }
            nonvacuous += 1;
            let meet = x1.intersect(&x2);
            assert!(
                is_semilocalizable(ca, &meet, &y, &caps()).unwrap(),
                "intersection closure broken: X1={x1} X2={x2} Y={y}"
            );
        }
        assert!(nonvacuous >= 100, "only {nonvacuous} non-vacuous samples");
    });
}

#[test]
fn acceptance_13c_block_equivalence() {
    criterion("13c block-equivalence", || {
        // P(X, {y}) holds exactly when X covers y + BN
        let pool = survey_pool();
        let mut rng = Rng::new(0x5eed_0003);
        for _ in 0..220 {
            let (ca, bn) = &pool[rng.below(pool.len() as u64) as usize];
            let y = rng.cell(-2, 2);
            let lo = y + bn.min().unwrap() - 2;
            let hi = y + bn.max().unwrap() + 2;
            let x = rng.subset(lo, hi, bn.len() + 2);
            let direct = is_semilocalizable(ca, &x, &CellSet::singleton(y), &caps()).unwrap();
            let via_block = bn.translate(y).is_subset(&x);
            assert_eq!(direct, via_block, "X={x} y={y} BN={bn}");
        }
    });
}

#[test]
fn acceptance_13d_naive_composition() {
    criterion("13d naive-composition", || {
        // BN(second . first) within BN(second) + BN(first)
        let mut q2: Vec<ReversibleCA> = survey_pool().into_iter().map(|(ca, _)| ca).collect();
        q2.push(ReversibleCA::shift(-2, Alphabet::new(2).unwrap()));
        q2.push(ReversibleCA::shift(2, Alphabet::new(2).unwrap()));
        q2.push(ReversibleCA::identity(Alphabet::new(2).unwrap()));

        let tracks = Alphabet::with_tracks(vec![2, 2]).unwrap();
        let t = toffoli();
        let q4 = vec![
            t.clone(),
            t.dual(),
            two_track_partial_shift(),
            ReversibleCA::shift(1, tracks.clone()),
            ReversibleCA::shift(0, tracks),
        ];

        let mut instances = 0;
        for family in [&q2, &q4] {
            for first in family.iter() {
                for second in family.iter() {
                    let bn_first = block_neighborhood(first, &caps()).unwrap();
                    let bn_second = block_neighborhood(second, &caps()).unwrap();
                    let composite = compose(second, first, &caps()).unwrap();
                    let bn = block_neighborhood(&composite, &caps()).unwrap();
                    assert!(
                        bn.is_subset(&bn_second.minkowski_sum(&bn_first)),
                        "BN {bn} escapes {} + {}",
                        bn_second,
                        bn_first
                    );
                    instances += 1;
                }
            }
        }
        assert!(instances >= 200, "only {instances} composition samples");
    });
}

#[test]
fn acceptance_13e_band_reduction_oracle() {
    criterion("13e band-reduction-oracle", || {
        let pool = survey_pool();
        let mut rng = Rng::new(0x5eed_0005);
        let mut checked = 0;
        // binary automata: random blocks, widened by 1 or 2
        while checked < 88 {
            let (ca, _) = &pool[rng.below(pool.len() as u64) as usize];
            let x = rng.subset(-3, 3, 3);
            let y = rng.subset(-1, 1, 1);
            if !y
                .minkowski_sum(ca.classical_neighborhood())
                .is_subset(&x)
            {
                continue;
            }
            let widen = 1 + rng.below(2) as i64;
            let fast = condition_three(ca, &x, &y, &caps()).unwrap();
            let slow = widened_window_oracle(ca, &x, &y, widen);
            assert_eq!(fast, slow, "X={x} Y={y} widen={widen}");
            checked += 1;
        }
        // the stretched two-track automaton exercises nontrivial bands
        let t = toffoli();
        let blocks = [
            (CellSet::interval(0, 1), CellSet::singleton(0)),
            (CellSet::interval(0, 2), CellSet::singleton(0)),
            (CellSet::new(vec![-1, 0, 1]), CellSet::singleton(-1)),
            (CellSet::interval(-1, 2), CellSet::singleton(0)),
            (CellSet::interval(0, 3), CellSet::singleton(1)),
            (CellSet::interval(0, 2), CellSet::singleton(1)),
            (CellSet::new(vec![0, 1, 3]), CellSet::singleton(0)),
            (CellSet::interval(1, 2), CellSet::singleton(1)),
            (CellSet::interval(-2, 0), CellSet::singleton(-2)),
            (CellSet::interval(0, 2), CellSet::empty()),
            (CellSet::new(vec![0, 2]), CellSet::empty()),
            (CellSet::interval(-1, 1), CellSet::singleton(-1)),
        ];
        for (x, y) in blocks {
            let fast = condition_three(&t, &x, &y, &caps()).unwrap();
            let slow = widened_window_oracle(&t, &x, &y, 1);
            assert_eq!(fast, slow, "toffoli X={x} Y={y}");
            checked += 1;
        }
        assert!(checked >= 100, "only {checked} oracle samples");
    });
}
