use std::collections::{BTreeMap, BTreeSet};

use super::{Config, Topology, UpdateProgram};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(&'static str),
}

struct Lexer {
    what: &'static str,
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

const SYMBOLS: [&str; 11] = [">>", "||", "{", "}", ",", ";", "=", "-", "(", ")", "."];

fn lex(what: &'static str, text: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1, 1);
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), line, col));
            col += i - start;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
            return Err(Error::syntax(what, line, col, format!("unexpected character {c:?}")));
        };
        toks.push((Tok::Sym(sym), line, col));
        i += sym.len();
        col += sym.len();
    }
    Ok(Lexer {
        what,
        toks,
        pos: 0,
        end: (line, col),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.1, t.2)).unwrap_or(self.end)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(Error::syntax(self.what, l, c, msg))
    }

    fn sym(&mut self, s: &'static str) -> Result<()> {
        if self.peek() == Some(&Tok::Sym(s)) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected `{s}`"))
        }
    }

    fn eat(&mut self, s: &'static str) -> bool {
        if self.peek() == Some(&Tok::Sym(s)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("expected a name"),
        }
    }

    fn keyword(&mut self, k: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == k => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(format!("expected `{k}`")),
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// `{a, b, c}`
    fn name_set(&mut self) -> Result<Vec<String>> {
        self.sym("{")?;
        let mut out = Vec::new();
        if self.eat("}") {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if self.eat("}") {
                return Ok(out);
            }
            self.sym(",")?;
        }
    }

    /// `x.fwd(y)`
    fn rule(&mut self) -> Result<(String, String)> {
        let x = self.ident()?;
        self.sym(".")?;
        self.keyword("fwd")?;
        self.sym("(")?;
        let y = self.ident()?;
        self.sym(")")?;
        Ok((x, y))
    }
}

/// Parses `switches = {..}; connections = {x - y, ..};`. Connections are undirected.
pub fn parse_topology(text: &str) -> Result<Topology> {
    let mut lx = lex("topology", text)?;
    let mut switches = None;
    let mut connections = None;
    while !lx.done() {
        let key = lx.ident()?;
        lx.sym("=")?;
        match key.as_str() {
            "switches" if switches.is_none() => switches = Some(lx.name_set()?),
            "connections" if connections.is_none() => {
                lx.sym("{")?;
                let mut cons = Vec::new();
                if !lx.eat("}") {
                    loop {
                        let a = lx.ident()?;
                        lx.sym("-")?;
                        let b = lx.ident()?;
                        cons.push((a, b));
                        if lx.eat("}") {
                            break;
                        }
                        lx.sym(",")?;
                    }
                }
                connections = Some(cons);
            }
            "switches" | "connections" => return lx.fail(format!("`{key}` given twice")),
            _ => return lx.fail(format!("unknown section `{key}`")),
        }
        lx.sym(";")?;
    }
    let switches = switches.ok_or_else(|| Error::Sdn("topology lacks `switches`".into()))?;
    let connections = connections.ok_or_else(|| Error::Sdn("topology lacks `connections`".into()))?;
    Topology::new(switches, connections)
}

/// Parses `ingress = {..};`, forwarding rules `x.fwd(y);` and `egress = {..};`.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut lx = lex("config", text)?;
    let mut ingress = None;
    let mut egress = None;
    let mut forwarding: BTreeMap<String, String> = BTreeMap::new();
    while !lx.done() {
        let is_section = matches!(lx.toks.get(lx.pos + 1), Some((Tok::Sym("="), _, _)));
        if is_section {
            let key = lx.ident()?;
            lx.sym("=")?;
            let set = lx.name_set()?;
            match key.as_str() {
                "ingress" if ingress.is_none() => ingress = Some(set),
                "egress" if egress.is_none() => egress = Some(set),
                "ingress" | "egress" => return lx.fail(format!("`{key}` given twice")),
                _ => return lx.fail(format!("unknown section `{key}`")),
            }
        } else {
            let (x, y) = lx.rule()?;
            if forwarding.contains_key(&x) {
                return Err(Error::Sdn(format!("switch {x} has two forwarding rules")));
            }
            forwarding.insert(x, y);
        }
        lx.sym(";")?;
    }
    let ingress = ingress.ok_or_else(|| Error::Sdn("configuration lacks `ingress`".into()))?;
    let egress = egress.ok_or_else(|| Error::Sdn("configuration lacks `egress`".into()))?;
    Config::new(ingress, egress, forwarding)
}

fn update_expr(lx: &mut Lexer) -> Result<UpdateProgram> {
    let first = update_atom(lx)?;
    let op = match lx.peek() {
        Some(Tok::Sym(">>")) => ">>",
        Some(Tok::Sym("||")) => "||",
        _ => return Ok(first),
    };
    let mut items = vec![first];
    while lx.eat(op) {
        items.push(update_atom(lx)?);
    }
    if matches!(lx.peek(), Some(Tok::Sym(">>" | "||"))) {
        return lx.fail("mixing `>>` and `||` needs parentheses");
    }
    Ok(if op == ">>" {
        UpdateProgram::Sequential(items)
    } else {
        UpdateProgram::Parallel(items)
    })
}

fn update_atom(lx: &mut Lexer) -> Result<UpdateProgram> {
    if lx.eat("(") {
        let u = update_expr(lx)?;
        lx.sym(")")?;
        return Ok(u);
    }
    lx.keyword("upd")?;
    lx.sym("(")?;
    let (switch, target) = lx.rule()?;
    lx.sym(")")?;
    Ok(UpdateProgram::Switch { switch, target })
}

/// Parses an update such as `(upd(y.fwd(d)) >> upd(x.fwd(y))) || upd(v.fwd(x))`.
pub fn parse_update(text: &str) -> Result<UpdateProgram> {
    let mut lx = lex("update", text)?;
    let u = update_expr(&mut lx)?;
    lx.eat(";");
    if !lx.done() {
        return lx.fail("unexpected input after the update");
    }
    u.check_single_updates()?;
    Ok(u)
}

pub(super) fn unique(names: Vec<String>, what: &str) -> Result<BTreeSet<String>> {
    let mut set = BTreeSet::new();
    for n in names {
        if !set.insert(n.clone()) {
            return Err(Error::Sdn(format!("{what} lists {n} twice")));
        }
    }
    Ok(set)
}
