//! Command-line front end: load and save `.ca` files, compute neighborhoods
//! and block decompositions, verify bounds, and run enumeration surveys.
//!
//! Output is deterministic: cell sets print in ascending order, fields in a
//! fixed order, no timestamps. `--porcelain` switches to stable `key=value`
//! lines. Exit codes: 0 success, 1 a verified bound failed, 2 usage or
//! input error, 3 a resource cap was exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use blockca::blocknbh::{
    block_neighborhood, composition_bound, iterate_bound, verify_all_bounds,
    BoundsReport,
};
use blockca::ca::{compose, power, ReversibleCA};
use blockca::error::Error;
use blockca::explorer::{render_record, survey};
use blockca::format;
use blockca::reversibility::{is_injective, EventuallyPeriodic};
use blockca::witness::{default_ring_period, semilocalize, verify_witness};
use blockca::{Alphabet, Caps, CellSet};

#[derive(Parser)]
#[command(
    name = "blockca",
    about = "Neighborhood analysis for reversible 1D cellular automata",
    version
)]
struct Cli {
    /// Emit stable key=value lines instead of human-readable text
    #[arg(long, global = true)]
    porcelain: bool,

    /// Cap on word evaluations per exhaustive check
    #[arg(long, global = true, default_value_t = 1 << 28)]
    max_evals: u64,

    /// Cap on constructed rule-table entries
    #[arg(long, global = true, default_value_t = 1 << 24)]
    max_table: u64,

    /// Radius cap for inverse-rule synthesis
    #[arg(long, global = true, default_value_t = 8)]
    max_radius: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print alphabet, window, N, N~ and the reversibility verdict
    Info { file: PathBuf },
    /// Compute the block neighborhood and check its bounds
    Bn { file: PathBuf },
    /// Build a block-decomposition witness on a ring
    Decompose {
        file: PathBuf,
        /// Ring period (defaults to the smallest that avoids wraparound)
        #[arg(long)]
        ring: Option<usize>,
        /// Input block X, e.g. `0..2` or `0,1,2`
        #[arg(long)]
        cells: String,
        /// Output block Y, e.g. `0`
        #[arg(long)]
        target: String,
        /// Where to write the witness file
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-verify a witness file against an automaton
    VerifyWitness { ca: PathBuf, witness: PathBuf },
    /// Compose automata (first file applied first) and bound the result
    Compose {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Write the composite automaton to a `.ca` file
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Iterate an automaton and bound the iterate
    Power {
        file: PathBuf,
        #[arg(short = 'k', long = "exponent")]
        exponent: u32,
        /// Write the iterated automaton to a `.ca` file
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify every neighborhood bound for the given automata
    CheckBounds {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Write a built-in automaton to a `.ca` file
    Builtin {
        /// One of: toffoli, shift, identity, linear
        name: String,
        /// Stretch factor for toffoli
        #[arg(long, default_value_t = 1)]
        l: u32,
        /// Shift amount
        #[arg(long, default_value_t = 1)]
        k: i64,
        /// Alphabet size for shift/identity
        #[arg(long, default_value_t = 2)]
        q: usize,
        /// Linear preset: two-track-partial-shift or xor
        #[arg(long)]
        preset: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Enumerate reversible CAs over a window and survey their triples
    Explore {
        #[arg(long)]
        q: usize,
        /// Window offsets, e.g. `0,1`
        #[arg(long)]
        window: String,
        /// Stop after this many automata
        #[arg(long)]
        limit: Option<u64>,
        /// Results file (appended to; resumes a partial survey)
        #[arg(short, long)]
        output: PathBuf,
    },
}

struct Printer {
    porcelain: bool,
}

impl Printer {
    fn field(&self, key: &str, human_label: &str, value: impl std::fmt::Display) {
        if self.porcelain {
            println!("{key}={value}");
        } else {
            println!("{human_label}: {value}");
        }
    }

    fn set(&self, key: &str, human_label: &str, value: &CellSet) {
        if self.porcelain {
            println!("{key}={}", value.compact());
        } else {
            println!("{human_label}: {value}");
        }
    }

    fn verdict(&self, key: &str, human_label: &str, ok: bool) {
        if self.porcelain {
            println!("{key}={}", if ok { "pass" } else { "fail" });
        } else {
            println!("{human_label}: {}", if ok { "PASS" } else { "FAIL" });
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = Caps {
        max_evals: cli.max_evals,
        max_table: cli.max_table,
    };
    let out = Printer {
        porcelain: cli.porcelain,
    };
    match run(cli.command, &caps, cli.max_radius, &out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Violation(_) => 1,
        Error::TooLarge { .. } | Error::TableTooLarge { .. } | Error::RadiusCapExceeded { .. } => {
            3
        }
        _ => 2,
    }
}

fn load(path: &Path, max_radius: u32, caps: &Caps) -> Result<ReversibleCA, Error> {
    format::read_ca_file(path)?.promote(max_radius, caps)
}

fn parse_cells(text: &str) -> Result<CellSet, Error> {
    text.parse::<CellSet>()
        .map_err(|e| Error::PreconditionFailed(format!("bad cell set `{text}`: {e}")))
}

fn run(command: Command, caps: &Caps, max_radius: u32, out: &Printer) -> Result<(), Error> {
    match command {
        Command::Info { file } => cmd_info(&file, caps, max_radius, out),
        Command::Bn { file } => cmd_bn(&file, caps, max_radius, out),
        Command::Decompose {
            file,
            ring,
            cells,
            target,
            output,
        } => cmd_decompose(&file, ring, &cells, &target, output.as_deref(), caps, max_radius, out),
        Command::VerifyWitness { ca, witness } => {
            cmd_verify_witness(&ca, &witness, caps, max_radius, out)
        }
        Command::Compose { files, output } => {
            cmd_compose(&files, output.as_deref(), caps, max_radius, out)
        }
        Command::Power {
            file,
            exponent,
            output,
        } => cmd_power(&file, exponent, output.as_deref(), caps, max_radius, out),
        Command::CheckBounds { files } => cmd_check_bounds(&files, caps, max_radius, out),
        Command::Builtin {
            name,
            l,
            k,
            q,
            preset,
            output,
        } => cmd_builtin(&name, l, k, q, preset.as_deref(), &output, caps, out),
        Command::Explore {
            q,
            window,
            limit,
            output,
        } => cmd_explore(q, &window, limit, &output, caps, max_radius, out),
    }
}

fn periodic_word(w: &[u32]) -> String {
    w.iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn periodic_text(c: &EventuallyPeriodic) -> String {
    format!(
        "({})* {} ({})*",
        periodic_word(&c.left_period),
        periodic_word(&c.center),
        periodic_word(&c.right_period)
    )
}

fn periodic_compact(c: &EventuallyPeriodic) -> String {
    format!(
        "({})*|{}|({})*",
        periodic_word(&c.left_period),
        periodic_word(&c.center),
        periodic_word(&c.right_period)
    )
}

fn cmd_info(file: &Path, caps: &Caps, max_radius: u32, out: &Printer) -> Result<(), Error> {
    let parsed = format::read_ca_file(file)?;
    out.field("alphabet", "alphabet", parsed.alphabet.size());
    if let Some(tracks) = parsed.alphabet.tracks() {
        let list = tracks
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(if out.porcelain { "," } else { " " });
        out.field("tracks", "tracks", list);
    }
    let n = blockca::rule::minimal_neighborhood(&parsed.forward, &parsed.alphabet);
    out.set("n", "N", &n);

    let inverse = match parsed.inverse {
        Some(inv) => Some(inv),
        None => {
            let verdict = is_injective(&parsed.forward, &parsed.alphabet, caps)?;
            match verdict.witness {
                None => Some(blockca::reversibility::synthesize_inverse(
                    &parsed.forward,
                    &parsed.alphabet,
                    max_radius,
                    caps,
                )?),
                Some(w) => {
                    out.field("reversible", "reversible", "false");
                    if out.porcelain {
                        println!("witness_first={}", periodic_compact(&w.first));
                        println!("witness_second={}", periodic_compact(&w.second));
                    } else {
                        println!("not reversible; these configurations share an image:");
                        println!("  {}", periodic_text(&w.first));
                        println!("  {}", periodic_text(&w.second));
                    }
                    None
                }
            }
        }
    };
    if let Some(inverse) = inverse {
        let ca = ReversibleCA::new(parsed.alphabet, parsed.forward, inverse, caps)?;
        out.field("reversible", "reversible", "true");
        out.set("n_dual", "N~", ca.dual_neighborhood());
        out.set("inverse_window", "inverse window", ca.inverse().offsets());
    }
    Ok(())
}

fn print_bounds(report: &BoundsReport, out: &Printer) {
    if let Some(n) = &report.classical {
        out.set("n", "N", n);
    }
    if let Some(d) = &report.dual {
        out.set("n_dual", "N~", d);
    }
    if let Some(b) = &report.block {
        out.set("bn", "BN", b);
    }
    if let Some(i) = &report.individual {
        out.set("individual_bound", "individual bound", i);
    }
    if let Some(ok) = report.lower_ok {
        out.verdict("lower", "contains N and N~", ok);
    }
    if let Some(ok) = report.upper_ok {
        out.verdict("upper", "within individual bound", ok);
    }
    if let Some(ok) = report.self_dual_ok {
        out.verdict("self_dual", "block neighborhood self-dual", ok);
    }
    if let Some(minimal) = report.minimal {
        out.field("minimal", "minimal (BN = N with N~)", minimal);
    }
}

fn fail_if_violated(passed: bool) -> Result<(), Error> {
    if passed {
        Ok(())
    } else {
        Err(Error::Violation(
            "a verified bound failed; see the report above".to_string(),
        ))
    }
}

fn cmd_bn(file: &Path, caps: &Caps, max_radius: u32, out: &Printer) -> Result<(), Error> {
    let ca = load(file, max_radius, caps)?;
    let report = verify_all_bounds(&ca, caps)?;
    print_bounds(&report, out);
    fail_if_violated(report.passes())
}

#[allow(clippy::too_many_arguments)]
fn cmd_decompose(
    file: &Path,
    ring: Option<usize>,
    cells: &str,
    target: &str,
    output: Option<&Path>,
    caps: &Caps,
    max_radius: u32,
    out: &Printer,
) -> Result<(), Error> {
    let ca = load(file, max_radius, caps)?;
    let x = parse_cells(cells)?;
    let y = parse_cells(target)?;
    let p = ring.unwrap_or_else(|| default_ring_period(&ca, &x, &y));
    let witness = semilocalize(&ca, &x, &y, p, caps)?;
    let configurations = (ca.alphabet().size() as u128).pow(p as u32);
    out.field("ring", "ring", p);
    out.set("x", "x", &x);
    out.set("y", "y", &y);
    out.field("e", "mediator classes", witness.e_size);
    out.field("configurations", "configurations checked", configurations);
    out.field("reconstruction", "reconstruction", "ok");
    if let Some(path) = output {
        format::write_witness_file(path, &witness)?;
        out.field("witness_file", "witness written to", path.display());
    }
    Ok(())
}

fn cmd_verify_witness(
    ca_path: &Path,
    witness_path: &Path,
    caps: &Caps,
    max_radius: u32,
    out: &Printer,
) -> Result<(), Error> {
    let ca = load(ca_path, max_radius, caps)?;
    let witness = format::read_witness_file(witness_path)?;
    verify_witness(&ca, &witness, caps)?;
    let configurations = (ca.alphabet().size() as u128).pow(witness.ring_period as u32);
    out.field("verified", "witness", "ok");
    out.field("configurations", "configurations checked", configurations);
    Ok(())
}

fn print_composition(report: &BoundsReport, out: &Printer) -> Result<(), Error> {
    print_bounds(report, out);
    let comp = report.composition.as_ref().expect("composition report");
    for (i, stage) in comp.stages.iter().enumerate() {
        let k = i + 1;
        if out.porcelain {
            println!(
                "stage{k}_suffix_dual={}",
                stage.suffix_dual.compact()
            );
            println!(
                "stage{k}_with_block={}",
                stage.with_factor_block.compact()
            );
            println!("stage{k}_prefix={}", stage.prefix_classical.compact());
            println!("stage{k}_bound={}", stage.stage_bound.compact());
        } else {
            println!(
                "stage {k}: suffix dual {} + factor block -> {}, prefix {}, bound {}",
                stage.suffix_dual, stage.with_factor_block, stage.prefix_classical, stage.stage_bound
            );
        }
    }
    out.set("v", "composition bound V", &comp.total);
    match comp.contained {
        Some(ok) => out.verdict("contained", "BN within V", ok),
        None => out.field("contained", "BN within V", "skipped (over caps)"),
    }
    fail_if_violated(report.passes())
}

fn cmd_compose(
    files: &[PathBuf],
    output: Option<&Path>,
    caps: &Caps,
    max_radius: u32,
    out: &Printer,
) -> Result<(), Error> {
    let factors: Vec<ReversibleCA> = files
        .iter()
        .map(|f| load(f, max_radius, caps))
        .collect::<Result<_, _>>()?;
    let refs: Vec<&ReversibleCA> = factors.iter().collect();
    out.field("factors", "factors", refs.len());
    let report = composition_bound(&refs, caps)?;
    if let Some(path) = output {
        let mut acc = factors[0].clone();
        for f in &factors[1..] {
            acc = compose(f, &acc, caps)?;
        }
        format::write_ca_file(path, &acc)?;
        out.field("output", "composite written to", path.display());
    }
    print_composition(&report, out)
}

fn cmd_power(
    file: &Path,
    exponent: u32,
    output: Option<&Path>,
    caps: &Caps,
    max_radius: u32,
    out: &Printer,
) -> Result<(), Error> {
    if exponent == 0 {
        return Err(Error::PreconditionFailed("exponent must be positive".into()));
    }
    let ca = load(file, max_radius, caps)?;
    let iterated = power(&ca, exponent, caps)?;
    out.field("exponent", "exponent", exponent);
    out.set("n", "N of the iterate", iterated.classical_neighborhood());
    out.set("n_dual", "N~ of the iterate", iterated.dual_neighborhood());
    let interval = iterate_bound(&ca, exponent);
    out.set("iterate_bound", "iterate bound", &interval);
    let contained = match block_neighborhood(&iterated, caps) {
        Ok(bn) => {
            out.set("bn", "BN of the iterate", &bn);
            Some(bn.is_subset(&interval))
        }
        Err(Error::TooLarge { .. }) | Err(Error::TableTooLarge { .. }) => {
            out.field("bn", "BN of the iterate", "skipped (over caps)");
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(path) = output {
        format::write_ca_file(path, &iterated)?;
        out.field("output", "iterate written to", path.display());
    }
    match contained {
        Some(ok) => {
            out.verdict("contained", "BN within iterate bound", ok);
            fail_if_violated(ok)
        }
        None => {
            out.field("contained", "BN within iterate bound", "skipped (over caps)");
            Ok(())
        }
    }
}

fn cmd_check_bounds(
    files: &[PathBuf],
    caps: &Caps,
    max_radius: u32,
    out: &Printer,
) -> Result<(), Error> {
    let mut all_ok = true;
    let mut factors = Vec::new();
    for file in files {
        out.field("file", "file", file.display());
        let ca = load(file, max_radius, caps)?;
        let report = verify_all_bounds(&ca, caps)?;
        print_bounds(&report, out);
        all_ok &= report.passes();
        factors.push(ca);
    }
    if factors.len() >= 2 {
        let refs: Vec<&ReversibleCA> = factors.iter().collect();
        let report = composition_bound(&refs, caps)?;
        out.field("composition", "composition", "of all inputs in order");
        let comp = report.composition.as_ref().expect("composition report");
        out.set("v", "composition bound V", &comp.total);
        if let Some(ok) = comp.contained {
            out.verdict("contained", "composite BN within V", ok);
            all_ok &= ok;
        }
        if factors.len() == 2 {
            // radius form: with every neighborhood inside [-r, r], the
            // composite block neighborhood sits inside [-4r, 4r]
            let radius = factors
                .iter()
                .flat_map(|f| {
                    f.classical_neighborhood()
                        .iter()
                        .chain(f.dual_neighborhood().iter())
                })
                .map(i64::abs)
                .max()
                .unwrap_or(0);
            let window = CellSet::interval(-4 * radius, 4 * radius);
            out.field("radius", "common radius r", radius);
            out.set("radius_bound", "interval bound [-4r, 4r]", &window);
            if let Some(bn) = &report.block {
                let ok = bn.is_subset(&window);
                out.verdict("radius_contained", "composite BN within [-4r, 4r]", ok);
                all_ok &= ok;
            }
        }
    }
    fail_if_violated(all_ok)
}

#[allow(clippy::too_many_arguments)]
fn cmd_builtin(
    name: &str,
    l: u32,
    k: i64,
    q: usize,
    preset: Option<&str>,
    output: &Path,
    caps: &Caps,
    out: &Printer,
) -> Result<(), Error> {
    match name {
        "toffoli" => {
            format::write_ca_file(output, &ReversibleCA::toffoli(l))?;
        }
        "shift" => {
            format::write_ca_file(output, &ReversibleCA::shift(k, Alphabet::new(q)?))?;
        }
        "identity" => {
            format::write_ca_file(output, &ReversibleCA::identity(Alphabet::new(q)?))?;
        }
        "linear" => match preset {
            Some("two-track-partial-shift") => {
                let ca = blockca::ca::linear_ca(
                    &[
                        blockca::ca::LinearTerm {
                            offset: 0,
                            matrix: vec![vec![1, 0], vec![0, 1]],
                        },
                        blockca::ca::LinearTerm {
                            offset: 1,
                            matrix: vec![vec![0, 1], vec![0, 0]],
                        },
                    ],
                    caps,
                )?;
                format::write_ca_file(output, &ca)?;
            }
            Some("xor") => {
                // intentionally non-reversible: forward-only file
                let alphabet = Alphabet::new(2)?;
                let rule = blockca::LocalRule::new(
                    CellSet::interval(0, 1),
                    vec![0, 1, 1, 0],
                    &alphabet,
                )?;
                std::fs::write(output, format::render_ca(&alphabet, &rule, None))?;
            }
            other => {
                return Err(Error::PreconditionFailed(format!(
                    "unknown linear preset {other:?}; try two-track-partial-shift or xor"
                )))
            }
        },
        other => {
            return Err(Error::PreconditionFailed(format!(
                "unknown builtin `{other}`; try toffoli, shift, identity or linear"
            )))
        }
    }
    out.field("written", "written", output.display());
    Ok(())
}

fn cmd_explore(
    q: usize,
    window: &str,
    limit: Option<u64>,
    output: &Path,
    caps: &Caps,
    max_radius: u32,
    out: &Printer,
) -> Result<(), Error> {
    let window = parse_cells(window)?;
    out.field("q", "alphabet", q);
    out.set("window", "window", &window);
    let records = survey(q, &window, limit, Some(output), max_radius, caps)?;
    for record in &records {
        if out.porcelain {
            println!("record={}", render_record(record));
        } else {
            println!("record: {}", render_record(record));
        }
    }
    out.field("records", "records", records.len());
    out.field("output", "written to", output.display());
    Ok(())
}
