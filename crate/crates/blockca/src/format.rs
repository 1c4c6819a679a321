//! Text formats: the `.ca` automaton file and the witness file.
//!
//! Both are UTF-8, line oriented, `#` starts a comment. A `.ca` file:
//!
//! ```text
//! ca-format 1
//! alphabet 4
//! tracks 2 2
//! offsets 0 1
//! table 0 0 1 1 2 2 3 3 0 0 3 3 2 2 1 1
//! inverse-offsets -1 0
//! inverse-table 0 0 1 1 2 3 3 2 0 0 1 1 2 3 3 2
//! ```
//!
//! Table values may span lines. The inverse sections are optional; loading
//! a file without them synthesizes the inverse.

use std::fs;
use std::path::Path;

use crate::alphabet::Alphabet;
use crate::ca::ReversibleCA;
use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::reversibility::synthesize_inverse;
use crate::rule::LocalRule;
use crate::witness::{SemilocalWitness, WitnessRow};
use crate::{Caps, Symbol};

/// A parsed `.ca` file; the inverse sections are optional.
#[derive(Clone, Debug)]
pub struct CaFile {
    pub alphabet: Alphabet,
    pub forward: LocalRule,
    pub inverse: Option<LocalRule>,
}

impl CaFile {
    /// Promote to a verified reversible CA, synthesizing the inverse when
    /// the file does not carry one.
    pub fn promote(self, max_radius: u32, caps: &Caps) -> Result<ReversibleCA> {
        let inverse = match self.inverse {
            Some(inv) => inv,
            None => synthesize_inverse(&self.forward, &self.alphabet, max_radius, caps)?,
        };
        ReversibleCA::new(self.alphabet, self.forward, inverse, caps)
    }
}

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Tokens<'a> {
        let mut items = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split_whitespace() {
                items.push((i + 1, tok));
            }
        }
        Tokens { items, pos: 0 }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, word: &str) -> Result<()> {
        match self.next() {
            Some((_, tok)) if tok == word => Ok(()),
            Some((line, tok)) => Err(Error::parse(line, format!("expected `{word}`, got `{tok}`"))),
            None => Err(Error::parse(0, format!("expected `{word}`, got end of file"))),
        }
    }

    fn int<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        match self.next() {
            Some((line, tok)) => tok
                .parse()
                .map_err(|_| Error::parse(line, format!("bad {what} `{tok}`"))),
            None => Err(Error::parse(0, format!("missing {what}"))),
        }
    }

    /// Consume integer tokens until the next keyword (non-numeric token).
    fn int_run<T: std::str::FromStr>(&mut self) -> Result<Vec<T>> {
        let mut out = Vec::new();
        while let Some((line, tok)) = self.peek() {
            if tok.parse::<T>().is_ok() {
                out.push(tok.parse().map_err(|_| Error::parse(line, "bad integer"))?);
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(out)
    }
}

pub fn parse_ca(text: &str) -> Result<CaFile> {
    let mut toks = Tokens::new(text);
    toks.expect("ca-format")?;
    let version: u32 = toks.int("format version")?;
    if version != 1 {
        return Err(Error::parse(1, format!("unsupported ca-format {version}")));
    }
    toks.expect("alphabet")?;
    let q: usize = toks.int("alphabet size")?;

    let mut tracks: Option<Vec<usize>> = None;
    if let Some((_, "tracks")) = toks.peek() {
        toks.next();
        tracks = Some(toks.int_run()?);
    }
    let alphabet = match tracks {
        Some(t) => {
            let a = Alphabet::with_tracks(t)?;
            if a.size() != q {
                return Err(Error::TrackMismatch {
                    tracks: a.tracks().unwrap().to_vec(),
                    product: a.size(),
                    size: q,
                });
            }
            a
        }
        None => Alphabet::new(q)?,
    };

    let read_rule = |toks: &mut Tokens,
                     offsets_kw: &str,
                     table_kw: &str,
                     alphabet: &Alphabet|
     -> Result<LocalRule> {
        toks.expect(offsets_kw)?;
        let offsets: Vec<i64> = toks.int_run()?;
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::parse(0, format!("{offsets_kw} must be strictly ascending")));
        }
        toks.expect(table_kw)?;
        let table: Vec<Symbol> = toks.int_run()?;
        LocalRule::new(CellSet::new(offsets), table, alphabet)
    };

    let forward = read_rule(&mut toks, "offsets", "table", &alphabet)?;
    let inverse = match toks.peek() {
        Some((_, "inverse-offsets")) => Some(read_rule(
            &mut toks,
            "inverse-offsets",
            "inverse-table",
            &alphabet,
        )?),
        Some((line, tok)) => return Err(Error::parse(line, format!("unexpected `{tok}`"))),
        None => None,
    };
    if let Some((line, tok)) = toks.peek() {
        return Err(Error::parse(line, format!("trailing `{tok}`")));
    }
    Ok(CaFile {
        alphabet,
        forward,
        inverse,
    })
}

fn push_table(out: &mut String, table: &[Symbol]) {
    for chunk in table.chunks(16) {
        for (i, v) in chunk.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
}

fn push_cells(out: &mut String, cells: &CellSet) {
    for (i, c) in cells.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&c.to_string());
    }
    out.push('\n');
}

pub fn render_ca(alphabet: &Alphabet, forward: &LocalRule, inverse: Option<&LocalRule>) -> String {
    let mut out = String::from("ca-format 1\n");
    out.push_str(&format!("alphabet {}\n", alphabet.size()));
    if let Some(tracks) = alphabet.tracks() {
        out.push_str("tracks");
        for t in tracks {
            out.push_str(&format!(" {t}"));
        }
        out.push('\n');
    }
    out.push_str("offsets ");
    push_cells(&mut out, forward.offsets());
    out.push_str("table\n");
    push_table(&mut out, forward.table());
    if let Some(inv) = inverse {
        out.push_str("inverse-offsets ");
        push_cells(&mut out, inv.offsets());
        out.push_str("inverse-table\n");
        push_table(&mut out, inv.table());
    }
    out
}

pub fn render_reversible(ca: &ReversibleCA) -> String {
    render_ca(ca.alphabet(), ca.forward(), Some(ca.inverse()))
}

pub fn read_ca_file(path: &Path) -> Result<CaFile> {
    parse_ca(&fs::read_to_string(path)?)
}

pub fn write_ca_file(path: &Path, ca: &ReversibleCA) -> Result<()> {
    fs::write(path, render_reversible(ca))?;
    Ok(())
}

/// `0,1,3` for words, `-` for the empty word.
fn render_word(word: &[Symbol]) -> String {
    if word.is_empty() {
        return "-".to_string();
    }
    word.iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_word(tok: &str, line: usize) -> Result<Vec<Symbol>> {
    if tok == "-" {
        return Ok(Vec::new());
    }
    tok.split(',')
        .map(|s| {
            s.parse()
                .map_err(|_| Error::parse(line, format!("bad symbol `{s}`")))
        })
        .collect()
}

pub fn render_witness(w: &SemilocalWitness) -> String {
    let mut out = String::from("witness-format 1\n");
    out.push_str(&format!("ring {}\n", w.ring_period));
    out.push_str("x ");
    push_cells(&mut out, &w.x);
    out.push_str("y ");
    push_cells(&mut out, &w.y);
    out.push_str(&format!("e {}\n", w.e_size));
    for row in &w.g {
        out.push_str(&format!(
            "g {} -> {} {}\n",
            render_word(&row.input),
            render_word(&row.output),
            row.class
        ));
    }
    for row in &w.h {
        out.push_str(&format!(
            "h {} -> {} {}\n",
            render_word(&row.input),
            render_word(&row.output),
            row.class
        ));
    }
    out.push_str("alpha");
    for v in &w.alpha {
        out.push_str(&format!(" {v}"));
    }
    out.push('\n');
    out
}

pub fn parse_witness(text: &str) -> Result<SemilocalWitness> {
    let mut ring = None;
    let mut x = None;
    let mut y = None;
    let mut e_size = None;
    let mut g = Vec::new();
    let mut h = Vec::new();
    let mut alpha = None;
    let mut saw_header = false;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        match key {
            "witness-format" => {
                let v = parts.next().unwrap_or("");
                if v != "1" {
                    return Err(Error::parse(line_no, format!("unsupported witness-format {v}")));
                }
                saw_header = true;
            }
            "ring" => {
                ring = Some(
                    parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::parse(line_no, "bad ring period"))?,
                )
            }
            "x" | "y" => {
                let cells: Vec<i64> = parts
                    .map(|s| {
                        s.parse()
                            .map_err(|_| Error::parse(line_no, format!("bad cell `{s}`")))
                    })
                    .collect::<Result<_>>()?;
                let set = CellSet::new(cells);
                if key == "x" {
                    x = Some(set);
                } else {
                    y = Some(set);
                }
            }
            "e" => {
                e_size = Some(
                    parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::parse(line_no, "bad class count"))?,
                )
            }
            "g" | "h" => {
                let input = parse_word(
                    parts
                        .next()
                        .ok_or_else(|| Error::parse(line_no, "missing input word"))?,
                    line_no,
                )?;
                match parts.next() {
                    Some("->") => {}
                    _ => return Err(Error::parse(line_no, "expected `->`")),
                }
                let output = parse_word(
                    parts
                        .next()
                        .ok_or_else(|| Error::parse(line_no, "missing output word"))?,
                    line_no,
                )?;
                let class = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::parse(line_no, "missing class index"))?;
                let row = WitnessRow {
                    input,
                    output,
                    class,
                };
                if key == "g" {
                    g.push(row);
                } else {
                    h.push(row);
                }
            }
            "alpha" => {
                alpha = Some(
                    parts
                        .map(|s| {
                            s.parse()
                                .map_err(|_| Error::parse(line_no, format!("bad class `{s}`")))
                        })
                        .collect::<Result<Vec<u32>>>()?,
                )
            }
            other => return Err(Error::parse(line_no, format!("unknown keyword `{other}`"))),
        }
    }
    if !saw_header {
        return Err(Error::parse(1, "missing witness-format header"));
    }
    Ok(SemilocalWitness {
        ring_period: ring.ok_or_else(|| Error::parse(0, "missing ring period"))?,
        x: x.ok_or_else(|| Error::parse(0, "missing x cells"))?,
        y: y.ok_or_else(|| Error::parse(0, "missing y cells"))?,
        e_size: e_size.ok_or_else(|| Error::parse(0, "missing class count"))?,
        g,
        h,
        alpha: alpha.ok_or_else(|| Error::parse(0, "missing alpha"))?,
    })
}

pub fn read_witness_file(path: &Path) -> Result<SemilocalWitness> {
    parse_witness(&fs::read_to_string(path)?)
}

pub fn write_witness_file(path: &Path, w: &SemilocalWitness) -> Result<()> {
    fs::write(path, render_witness(w))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::semilocalize;

    #[test]
    fn ca_round_trip_with_inverse() {
        let t = ReversibleCA::toffoli(1);
        let text = render_reversible(&t);
        let parsed = parse_ca(&text).unwrap();
        assert_eq!(parsed.forward, *t.forward());
        assert_eq!(parsed.inverse.as_ref(), Some(t.inverse()));
        let promoted = parsed.promote(8, &Caps::default()).unwrap();
        assert_eq!(promoted, t);
    }

    #[test]
    fn ca_without_inverse_is_promoted() {
        let t = ReversibleCA::toffoli(1);
        let text = render_ca(t.alphabet(), t.forward(), None);
        let parsed = parse_ca(&text).unwrap();
        assert!(parsed.inverse.is_none());
        let promoted = parsed.promote(8, &Caps::default()).unwrap();
        assert_eq!(promoted, t);
    }

    #[test]
    fn comments_and_line_breaks_are_tolerated() {
        let text = "# a toffoli file\nca-format 1\nalphabet 4 # four symbols\ntracks 2 2\noffsets 0 1\ntable\n0 0 1 1\n2 2 3 3\n0 0 3 3\n2 2 1 1\n";
        let parsed = parse_ca(text).unwrap();
        assert_eq!(parsed.forward.table().len(), 16);
        assert_eq!(parsed.alphabet.tracks(), Some(&[2usize, 2][..]));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(
            parse_ca("ca-format 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        let text = "ca-format 1\nalphabet 2\noffsets 1 0\ntable 0 1 1 0\n";
        assert!(parse_ca(text).is_err());
    }

    #[test]
    fn bad_table_is_rejected() {
        let text = "ca-format 1\nalphabet 2\noffsets 0 1\ntable 0 1 1\n";
        assert!(matches!(
            parse_ca(text),
            Err(Error::TableSizeMismatch { .. })
        ));
    }

    #[test]
    fn witness_round_trip() {
        let t = ReversibleCA::toffoli(1);
        let w = semilocalize(
            &t,
            &CellSet::interval(0, 2),
            &CellSet::singleton(0),
            6,
            &Caps::default(),
        )
        .unwrap();
        let text = render_witness(&w);
        let parsed = parse_witness(&text).unwrap();
        assert_eq!(parsed, w);
    }

    #[test]
    fn render_is_deterministic() {
        let t = ReversibleCA::toffoli(2);
        assert_eq!(render_reversible(&t), render_reversible(&t));
    }
}
