//! Sparse SDPA (`.dat-s`) reading and writing.
//!
//! An [`SdpInstance`] `min ⟨C,X⟩ s.t. ⟨Aᵢ,X⟩ = bᵢ, X ⪰ 0` is the dual side of
//! an SDPA problem, so it is written with `F₀ = −C`, `Fᵢ = Aᵢ` and `c = b`.
//! See `docs/sdpa.md` for the byte-level dialect.

use std::fmt::Write as _;

use selftest_core::sdp::{SdpConstraint, SdpEntry, SdpInstance};
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SdpaError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Writes every value with 17 significant digits, enough to read back the
/// identical `f64`.
pub fn export_sdpa(p: &SdpInstance, comments: &[&str]) -> String {
    let mut out = String::new();
    out.push_str("\"min <C,X> s.t. <A_i,X> = b_i, X psd; written as F0 = -C, F_i = A_i, c = b\n");
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "\"{line}");
        }
    }
    let _ = writeln!(out, "{} = mDIM", p.constraints.len());
    out.push_str("1 = nBLOCK\n");
    let _ = writeln!(out, "{} = bLOCKsTRUCT", p.order);
    let rhs: Vec<String> = p.constraints.iter().map(|c| format!("{:.16e}", c.rhs)).collect();
    out.push_str(&rhs.join(" "));
    out.push('\n');
    for e in &p.objective {
        let _ = writeln!(out, "0 1 {} {} {:.16e}", e.row + 1, e.col + 1, -e.value);
    }
    for (k, c) in p.constraints.iter().enumerate() {
        for e in &c.entries {
            let _ = writeln!(out, "{} 1 {} {} {:.16e}", k + 1, e.row + 1, e.col + 1, e.value);
        }
    }
    out
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

/// Splits a line on whitespace and the separators SDPA tolerates in headers.
fn tokens(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        let sep = ch.is_whitespace() || matches!(ch, ',' | '{' | '}' | '(' | ')');
        match (sep, start) {
            (true, Some(s)) => {
                out.push(Token { text: &line[s..i], line: line_no, column: s + 1 });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], line: line_no, column: s + 1 });
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> SdpaError {
    SdpaError { line, column, message: message.into() }
}

fn parse_usize(t: &Token<'_>, what: &str) -> Result<usize, SdpaError> {
    t.text.parse().map_err(|_| err(t.line, t.column, format!("expected {what}, found `{}`", t.text)))
}

fn parse_f64(t: &Token<'_>, what: &str) -> Result<f64, SdpaError> {
    let v: f64 = t.text.parse().map_err(|_| err(t.line, t.column, format!("expected {what}, found `{}`", t.text)))?;
    if !v.is_finite() {
        return Err(err(t.line, t.column, format!("{what} is not finite")));
    }
    Ok(v)
}

/// Parses a single-block sparse SDPA file.
pub fn import_sdpa(text: &str) -> Result<SdpInstance, SdpaError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !(t.is_empty() || t.starts_with('"') || t.starts_with('*'))
        })
        .peekable();
    let last_line = text.lines().count().max(1);
    // Header values are the first token of their line; "= mDIM" etc. are ignored.
    let mut header = |what: &str| -> Result<(usize, Token<'_>), SdpaError> {
        let (no, line) = lines.next().ok_or_else(|| err(last_line, 1, format!("missing {what}")))?;
        let toks = tokens(line, no);
        let first = toks.into_iter().next().ok_or_else(|| err(no, 1, format!("missing {what}")))?;
        Ok((no, first))
    };
    let (_, t) = header("mDIM")?;
    let m = parse_usize(&t, "number of constraints")?;
    let (_, t) = header("nBLOCK")?;
    let blocks = parse_usize(&t, "number of blocks")?;
    if blocks != 1 {
        return Err(err(t.line, t.column, format!("only one block is supported, found {blocks}")));
    }
    let (_, t) = header("block structure")?;
    let order: i64 = t.text.parse().map_err(|_| err(t.line, t.column, format!("expected block size, found `{}`", t.text)))?;
    if order <= 0 {
        return Err(err(t.line, t.column, "diagonal (negative) or empty blocks are not supported"));
    }
    let order = order as usize;
    let mut rhs = Vec::with_capacity(m);
    while rhs.len() < m {
        let (no, line) = lines.next().ok_or_else(|| err(last_line, 1, format!("expected {m} right-hand side values")))?;
        for t in tokens(line, no) {
            if rhs.len() == m {
                return Err(err(t.line, t.column, format!("more than {m} right-hand side values")));
            }
            rhs.push(parse_f64(&t, "right-hand side value")?);
        }
    }
    let mut inst = SdpInstance::new(order);
    inst.constraints = rhs.into_iter().map(|rhs| SdpConstraint { entries: Vec::new(), rhs }).collect();
    let mut seen: HashSet<(usize, usize, usize)> = HashSet::new();
    for (no, line) in lines {
        let toks = tokens(line, no);
        if toks.len() != 5 {
            let col = toks.get(5).map_or(1, |t| t.column);
            return Err(err(no, col, format!("expected `matno blkno i j value`, found {} fields", toks.len())));
        }
        let matno = parse_usize(&toks[0], "matrix number")?;
        let blk = parse_usize(&toks[1], "block number")?;
        let i = parse_usize(&toks[2], "row index")?;
        let j = parse_usize(&toks[3], "column index")?;
        let v = parse_f64(&toks[4], "entry value")?;
        if matno > m {
            return Err(err(no, toks[0].column, format!("matrix number {matno} exceeds mDIM = {m}")));
        }
        if blk != 1 {
            return Err(err(no, toks[1].column, format!("block {blk} does not exist")));
        }
        for (idx, t) in [(i, &toks[2]), (j, &toks[3])] {
            if idx == 0 || idx > order {
                return Err(err(no, t.column, format!("index {idx} outside 1..={order}")));
            }
        }
        if i > j {
            return Err(err(
                no,
                toks[2].column,
                format!("entry ({i}, {j}) lies below the diagonal; symmetric matrices are given by their upper triangle"),
            ));
        }
        if !seen.insert((matno, i, j)) {
            return Err(err(no, toks[0].column, format!("entry ({i}, {j}) of matrix {matno} is specified twice")));
        }
        let entry = SdpEntry { row: i - 1, col: j - 1, value: v };
        if matno == 0 {
            inst.objective.push(SdpEntry { value: -v, ..entry });
        } else {
            inst.constraints[matno - 1].entries.push(entry);
        }
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SdpInstance {
        let mut p = SdpInstance::new(2);
        p.objective = vec![SdpEntry::new(0, 0, 1.0), SdpEntry::new(1, 1, 1.0)];
        p.constraints.push(SdpConstraint { entries: vec![SdpEntry::new(0, 0, 1.0)], rhs: 1.0 });
        p
    }

    #[test]
    fn tiny_round_trip() {
        let p = tiny();
        let text = export_sdpa(&p, &["order-2 trace"]);
        assert_eq!(import_sdpa(&text).unwrap(), p);
        assert_eq!(export_sdpa(&import_sdpa(&text).unwrap(), &["order-2 trace"]), text);
    }

    #[test]
    fn awkward_values_survive() {
        let mut p = tiny();
        p.objective[0].value = 0.1 + 0.2;
        p.constraints[0].rhs = -1.0 / 3.0;
        p.constraints[0].entries[0].value = f64::MIN_POSITIVE;
        assert_eq!(import_sdpa(&export_sdpa(&p, &[])).unwrap(), p);
    }

    #[test]
    fn lower_triangle_entry_is_rejected_with_position() {
        let text = "\"hand written\n1 = mDIM\n1\n2\n1.0\n1 1 2 1 0.5\n";
        let e = import_sdpa(text).unwrap_err();
        assert_eq!(e.line, 6);
        assert_eq!(e.column, 5);
        assert!(e.to_string().starts_with("line 6, column 5"));
    }

    #[test]
    fn repeated_entry_is_rejected() {
        let text = "1\n1\n2\n1.0\n1 1 1 2 0.5\n1 1 1 2 0.25\n";
        assert_eq!(import_sdpa(text).unwrap_err().line, 6);
    }

    #[test]
    fn header_separators_are_tolerated() {
        let text = "* comment\n1 = mDIM\n1 = nBLOCK\n{2}\n{1.0}\n0 1 1 1 -1\n1 1 1 1 1\n";
        let p = import_sdpa(text).unwrap();
        assert_eq!(p.order, 2);
        assert_eq!(p.objective, vec![SdpEntry::new(0, 0, 1.0)]);
    }

    #[test]
    fn malformed_values_name_the_column() {
        let e = import_sdpa("1\n1\n2\n1.0\n1 1 1 x 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (5, 7));
        let e = import_sdpa("1\n2\n2\n").unwrap_err();
        assert_eq!(e.line, 2);
    }
}
