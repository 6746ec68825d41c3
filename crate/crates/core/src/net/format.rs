use std::fmt::Write as _;

use super::{NetBuilder, PetriNetWithTransits, PtNet};
use crate::error::{Error, Result};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::syntax("net", line, 1, msg)
}

/// Parses the line-oriented net format into a builder.
pub(crate) fn parse_builder(text: &str, allow_inhibitors: bool) -> Result<NetBuilder> {
    let mut b = NetBuilder::new("net");
    for (lno, raw) in text.lines().enumerate() {
        let lno = lno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let at = |r: Result<&mut NetBuilder>| r.map(|_| ()).map_err(|e| err(lno, e.to_string()));
        match toks[0] {
            ".net" => {
                if toks.len() != 2 {
                    return Err(err(lno, "expected `.net NAME`"));
                }
                b.set_name(toks[1]);
            }
            ".place" => match toks.as_slice() {
                [_, name] => at(b.place(name, false))?,
                [_, name, "init"] => at(b.place(name, true))?,
                _ => return Err(err(lno, "expected `.place NAME [init]`")),
            },
            ".transition" => match toks.as_slice() {
                [_, name] => at(b.transition(name, false))?,
                [_, name, "weakfair"] => at(b.transition(name, true))?,
                _ => return Err(err(lno, "expected `.transition NAME [weakfair]`")),
            },
            ".flow" => {
                let (t, rest) = split_head(&toks, lno, ".flow T : P.. -> Q..")?;
                let arrow = rest
                    .iter()
                    .position(|s| *s == "->")
                    .ok_or_else(|| err(lno, "missing `->` in .flow"))?;
                for p in &rest[..arrow] {
                    at(b.arc_in(p, t))?;
                }
                for p in &rest[arrow + 1..] {
                    at(b.arc_out(t, p))?;
                }
            }
            ".transit" => {
                let (t, rest) = split_head(&toks, lno, ".transit T : P -> Q")?;
                match rest {
                    [">", "->", q] => at(b.transit(t, None, q))?,
                    [p, "->", q] => at(b.transit(t, Some(p), q))?,
                    _ => return Err(err(lno, "expected `.transit T : P -> Q`")),
                }
            }
            ".inhibitor" => {
                if !allow_inhibitors {
                    return Err(err(lno, "inhibitor arcs are only accepted for inhibitor nets"));
                }
                let (t, rest) = split_head(&toks, lno, ".inhibitor T : P")?;
                match rest {
                    [p] => at(b.inhibitor(p, t))?,
                    _ => return Err(err(lno, "expected `.inhibitor T : P`")),
                }
            }
            other => return Err(err(lno, format!("unknown directive {other}"))),
        }
    }
    Ok(b)
}

fn split_head<'a, 'b>(toks: &'b [&'a str], lno: usize, usage: &str) -> Result<(&'a str, &'b [&'a str])> {
    if toks.len() < 3 || toks[2] != ":" {
        return Err(err(lno, format!("expected `{usage}`")));
    }
    Ok((toks[1], &toks[3..]))
}

/// Parses a net with transits.
pub fn parse_net(text: &str) -> Result<PetriNetWithTransits> {
    parse_builder(text, false)?.build()
}

/// Parses a P/T net that may carry inhibitor arcs. Returns the declared name and the structure.
pub fn parse_pt_net(text: &str) -> Result<(String, PtNet)> {
    let b = parse_builder(text, true)?;
    Ok((b.name().to_string(), b.build_pt_net()?))
}

fn write_pt(out: &mut String, name: &str, pt: &PtNet, weak_fair: &dyn Fn(usize) -> bool) {
    let _ = writeln!(out, ".net {name}");
    let init: std::collections::BTreeSet<usize> = pt.initial().iter().copied().collect();
    for (i, p) in pt.places().iter().enumerate() {
        if init.contains(&i) {
            let _ = writeln!(out, ".place {p} init");
        } else {
            let _ = writeln!(out, ".place {p}");
        }
    }
    for (t, name) in pt.transitions().iter().enumerate() {
        if weak_fair(t) {
            let _ = writeln!(out, ".transition {name} weakfair");
        } else {
            let _ = writeln!(out, ".transition {name}");
        }
    }
    for (t, name) in pt.transitions().iter().enumerate() {
        let side = |v: &[usize]| -> String {
            v.iter().map(|&p| format!(" {}", pt.places()[p])).collect()
        };
        let _ = writeln!(out, ".flow {name} :{} ->{}", side(pt.pre(t)), side(pt.post(t)));
        for &p in pt.inhibitors(t) {
            let _ = writeln!(out, ".inhibitor {name} : {}", pt.places()[p]);
        }
    }
}

/// Serializes a net with transits.
pub fn write_net(net: &PetriNetWithTransits) -> String {
    let mut out = String::new();
    let pt = super::NetStructure::pt(net);
    write_pt(&mut out, net.name(), pt, &|t| net.is_weak_fair(t));
    for (t, name) in pt.transitions().iter().enumerate() {
        for &(s, q) in net.transits_ix(t) {
            let src = s.map(|p| pt.places()[p].to_string()).unwrap_or_else(|| ">".into());
            let _ = writeln!(out, ".transit {name} : {src} -> {}", pt.places()[q]);
        }
    }
    out
}

/// Serializes a P/T net with inhibitor arcs.
pub fn write_pt_net(name: &str, pt: &PtNet) -> String {
    let mut out = String::new();
    write_pt(&mut out, name, pt, &|_| false);
    out
}
