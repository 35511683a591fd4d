//! Vector files: one vector per line, `p=<prime>;` then whitespace-separated
//! residues. Blank lines and lines starting with `#` are skipped.

use std::path::Path;

use crate::error::{Error, Result};
use crate::zp::{PrimeModulus, ZpVector};

pub fn parse_vector_line(line: &str, lineno: usize) -> Result<ZpVector> {
    let parse_err = |msg: &str| Error::Parse { line: lineno, msg: msg.to_string() };
    let (head, body) = line.split_once(';').ok_or_else(|| parse_err("missing ';' after p=<prime>"))?;
    let p_text = head.trim().strip_prefix("p=").ok_or_else(|| parse_err("line must start with p=<prime>"))?;
    let p: u64 = p_text.trim().parse().map_err(|_| parse_err("p is not an integer"))?;
    let p = PrimeModulus::new(p).map_err(|e| parse_err(&e.to_string()))?;
    let mut entries = Vec::new();
    for tok in body.split_whitespace() {
        let x: u64 = tok.parse().map_err(|_| parse_err(&format!("bad residue {tok:?}")))?;
        if x >= p.get() {
            return Err(Error::Range { line: lineno, value: x, p: p.get() });
        }
        entries.push(x);
    }
    ZpVector::new(p, entries)
}

pub fn parse_vectors(text: &str) -> Result<Vec<ZpVector>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| parse_vector_line(l, i + 1))
        .collect()
}

pub fn load_vectors(path: &Path) -> Result<Vec<ZpVector>> {
    parse_vectors(&std::fs::read_to_string(path)?)
}

/// Inverse of [`parse_vector_line`].
pub fn format_vector(v: &ZpVector) -> String {
    let body: Vec<String> = v.entries().iter().map(|x| x.to_string()).collect();
    format!("p={}; {}", v.modulus().get(), body.join(" "))
}
