use std::fmt::Write as _;

use super::Circuit;
use crate::error::{Error, Result};

pub(super) fn write(c: &Circuit) -> String {
    let (ni, nl) = (c.inputs.len(), c.latches.len());
    let mut s = String::new();
    let _ = writeln!(s, "aag {} {} {} {} {}", c.max_var(), ni, nl, c.outputs.len(), c.ands.len());
    for k in 0..ni {
        let _ = writeln!(s, "{}", 2 * (k + 1));
    }
    for (k, (_, next, reset)) in c.latches.iter().enumerate() {
        let _ = writeln!(s, "{} {} {}", 2 * (ni + 1 + k), next, u8::from(*reset));
    }
    for (_, l) in &c.outputs {
        let _ = writeln!(s, "{l}");
    }
    for (k, (a, b)) in c.ands.iter().enumerate() {
        let _ = writeln!(s, "{} {} {}", 2 * (ni + nl + 1 + k), a, b);
    }
    for (k, n) in c.inputs.iter().enumerate() {
        let _ = writeln!(s, "i{k} {n}");
    }
    for (k, (n, _, _)) in c.latches.iter().enumerate() {
        let _ = writeln!(s, "l{k} {n}");
    }
    for (k, (n, _)) in c.outputs.iter().enumerate() {
        let _ = writeln!(s, "o{k} {n}");
    }
    if !c.comments.is_empty() {
        s.push_str("c\n");
        for line in &c.comments {
            let _ = writeln!(s, "{line}");
        }
    }
    s
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::syntax("aiger", line, 1, msg)
}

/// Parses an ASCII AIGER file whose variables are numbered inputs first, then
/// latches, then and gates in order (the layout produced by [`Circuit::to_aiger`]).
pub fn parse_aiger(text: &str) -> Result<Circuit> {
    let lines: Vec<&str> = text.lines().collect();
    let header = lines.first().ok_or_else(|| err(1, "empty file"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 6 || h[0] != "aag" {
        return Err(err(1, "expected `aag M I L O A`"));
    }
    let num = |s: &str, line: usize| s.parse::<usize>().map_err(|_| err(line, format!("bad number {s:?}")));
    let (m, ni, nl, no, na) = (num(h[1], 1)?, num(h[2], 1)?, num(h[3], 1)?, num(h[4], 1)?, num(h[5], 1)?);
    if m != ni + nl + na {
        return Err(err(1, "M differs from I + L + A"));
    }
    let body = 1 + ni + nl + no + na;
    if lines.len() < body {
        return Err(err(lines.len(), "file ends early"));
    }
    let lit = |s: &str, line: usize| -> Result<u32> {
        let v = num(s, line)?;
        if v / 2 > m {
            return Err(err(line, format!("literal {v} exceeds M")));
        }
        Ok(v as u32)
    };
    let fields = |k: usize, n: usize| -> Result<Vec<&str>> {
        let f: Vec<&str> = lines[k].split_whitespace().collect();
        if f.len() != n {
            return Err(err(k + 1, format!("expected {n} fields")));
        }
        Ok(f)
    };
    let mut c = Circuit {
        inputs: (0..ni).map(|k| format!("i{k}")).collect(),
        latches: Vec::with_capacity(nl),
        outputs: Vec::with_capacity(no),
        ands: Vec::with_capacity(na),
        comments: Vec::new(),
    };
    let mut k = 1;
    for j in 0..ni {
        let f = fields(k, 1)?;
        if lit(f[0], k + 1)? as usize != 2 * (j + 1) {
            return Err(err(k + 1, "inputs must be numbered consecutively"));
        }
        k += 1;
    }
    for j in 0..nl {
        let f: Vec<&str> = lines[k].split_whitespace().collect();
        if f.len() != 2 && f.len() != 3 {
            return Err(err(k + 1, "expected latch `lit next [reset]`"));
        }
        if lit(f[0], k + 1)? as usize != 2 * (ni + 1 + j) {
            return Err(err(k + 1, "latches must follow the inputs"));
        }
        let next = lit(f[1], k + 1)?;
        let reset = match f.get(2) {
            None | Some(&"0") => false,
            Some(&"1") => true,
            Some(_) => return Err(err(k + 1, "unsupported latch reset value")),
        };
        c.latches.push((format!("l{j}"), next, reset));
        k += 1;
    }
    for j in 0..no {
        let f = fields(k, 1)?;
        c.outputs.push((format!("o{j}"), lit(f[0], k + 1)?));
        k += 1;
    }
    for j in 0..na {
        let f = fields(k, 3)?;
        let lhs = lit(f[0], k + 1)? as usize;
        if lhs != 2 * (ni + nl + 1 + j) {
            return Err(err(k + 1, "and gates must be numbered in order"));
        }
        let (a, b) = (lit(f[1], k + 1)?, lit(f[2], k + 1)?);
        if a as usize >= lhs || b as usize >= lhs {
            return Err(err(k + 1, "and gate refers to a later variable"));
        }
        c.ands.push((a, b));
        k += 1;
    }
    while k < lines.len() {
        let line = lines[k];
        if line == "c" {
            c.comments = lines[k + 1..].iter().map(|s| s.to_string()).collect();
            break;
        }
        if !line.is_char_boundary(1) {
            return Err(err(k + 1, "expected symbol `<kind><index> <name>`"));
        }
        let (kind, rest) = line.split_at(1);
        let (idx, name) = rest
            .split_once(' ')
            .ok_or_else(|| err(k + 1, "expected symbol `<kind><index> <name>`"))?;
        let idx = num(idx, k + 1)?;
        let slot = match kind {
            "i" => c.inputs.get_mut(idx),
            "l" => c.latches.get_mut(idx).map(|l| &mut l.0),
            "o" => c.outputs.get_mut(idx).map(|o| &mut o.0),
            _ => return Err(err(k + 1, format!("unknown symbol kind {kind:?}"))),
        };
        *slot.ok_or_else(|| err(k + 1, "symbol index out of range"))? = name.to_string();
        k += 1;
    }
    Ok(c)
}
