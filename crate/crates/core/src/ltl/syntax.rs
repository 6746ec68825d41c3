use super::{FlowLtlFormula, LtlFormula};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    X,
    U,
    W,
    F,
    G,
    A,
    LParen,
    RParen,
    End,
}

const KEYWORDS: [&str; 9] = ["true", "false", "X", "U", "W", "F", "G", "A", "R"];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: &str| Error::syntax("formula", line, col, msg);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut adv = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            adv(1, &mut i);
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let tok = match (c, two.as_str()) {
            (_, "&&") => {
                adv(2, &mut i);
                Tok::And
            }
            (_, "||") => {
                adv(2, &mut i);
                Tok::Or
            }
            (_, "->") => {
                adv(2, &mut i);
                Tok::Implies
            }
            ('!', _) => {
                adv(1, &mut i);
                Tok::Not
            }
            ('(', _) => {
                adv(1, &mut i);
                Tok::LParen
            }
            (')', _) => {
                adv(1, &mut i);
                Tok::RParen
            }
            ('"', _) => {
                let mut s = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None | Some('\n') => return Err(err(l0, c0, "unterminated quoted atom")),
                        Some('"') => break,
                        Some('\\') => {
                            match chars.get(j + 1) {
                                Some(e @ ('"' | '\\')) => s.push(*e),
                                _ => return Err(err(l0, c0, "bad escape in quoted atom")),
                            }
                            j += 2;
                        }
                        Some(ch) => {
                            s.push(*ch);
                            j += 1;
                        }
                    }
                }
                if s.is_empty() {
                    return Err(err(l0, c0, "empty quoted atom"));
                }
                adv(j + 1 - i, &mut i);
                Tok::Ident(s)
            }
            (c, _) if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                adv(j - i, &mut i);
                match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::X,
                    "U" => Tok::U,
                    "W" => Tok::W,
                    "F" => Tok::F,
                    "G" => Tok::G,
                    "A" => Tok::A,
                    _ => Tok::Ident(word),
                }
            }
            _ => return Err(err(l0, c0, &format!("unexpected character {c:?}"))),
        };
        out.push((tok, l0, c0));
    }
    out.push((Tok::End, line, col));
    Ok(out)
}

/// Parse tree that still admits the flow operator anywhere; grammar checks come after.
#[derive(Debug, Clone)]
enum Ast {
    True,
    False,
    Atom(String),
    Not(Box<Ast>),
    And(Box<Ast>, Box<Ast>),
    Or(Box<Ast>, Box<Ast>),
    Implies(Box<Ast>, Box<Ast>),
    Next(Box<Ast>),
    Until(Box<Ast>, Box<Ast>),
    WeakUntil(Box<Ast>, Box<Ast>),
    Eventually(Box<Ast>),
    Always(Box<Ast>),
    Flow(Box<Ast>),
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: &str) -> Error {
        let (_, l, c) = &self.toks[self.pos];
        Error::syntax("formula", *l, *c, msg)
    }

    fn implication(&mut self) -> Result<Ast> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Ast::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Ast> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Ast::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Ast> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.until()?;
            lhs = Ast::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Ast> {
        let lhs = self.unary()?;
        match self.peek() {
            Tok::U => {
                self.bump();
                let rhs = self.until()?;
                Ok(Ast::Until(Box::new(lhs), Box::new(rhs)))
            }
            Tok::W => {
                self.bump();
                let rhs = self.until()?;
                Ok(Ast::WeakUntil(Box::new(lhs), Box::new(rhs)))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Ast::Not(Box::new(self.unary()?)))
            }
            Tok::X => {
                self.bump();
                Ok(Ast::Next(Box::new(self.unary()?)))
            }
            Tok::F => {
                self.bump();
                Ok(Ast::Eventually(Box::new(self.unary()?)))
            }
            Tok::G => {
                self.bump();
                Ok(Ast::Always(Box::new(self.unary()?)))
            }
            Tok::A => {
                self.bump();
                Ok(Ast::Flow(Box::new(self.until()?)))
            }
            Tok::True => {
                self.bump();
                Ok(Ast::True)
            }
            Tok::False => {
                self.bump();
                Ok(Ast::False)
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Ast::Atom(s))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.implication()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error("expected `)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(self.error("unexpected end of formula")),
            t => Err(self.error(&format!("unexpected token {t:?}"))),
        }
    }
}

fn parse_ast(text: &str) -> Result<Ast> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let ast = p.implication()?;
    if *p.peek() != Tok::End {
        return Err(p.error("trailing input"));
    }
    Ok(ast)
}

fn has_flow(a: &Ast) -> bool {
    match a {
        Ast::True | Ast::False | Ast::Atom(_) => false,
        Ast::Flow(_) => true,
        Ast::Not(x) | Ast::Next(x) | Ast::Eventually(x) | Ast::Always(x) => has_flow(x),
        Ast::And(x, y) | Ast::Or(x, y) | Ast::Implies(x, y) | Ast::Until(x, y) | Ast::WeakUntil(x, y) => {
            has_flow(x) || has_flow(y)
        }
    }
}

fn to_ltl(a: &Ast) -> Result<LtlFormula> {
    use LtlFormula as L;
    let b = |x: &Ast| to_ltl(x).map(Box::new);
    Ok(match a {
        Ast::True => L::True,
        Ast::False => L::False,
        Ast::Atom(s) => L::Atom(s.clone()),
        Ast::Not(x) => L::Not(b(x)?),
        Ast::Next(x) => L::Next(b(x)?),
        Ast::Eventually(x) => L::Eventually(b(x)?),
        Ast::Always(x) => L::Always(b(x)?),
        Ast::And(x, y) => L::And(b(x)?, b(y)?),
        Ast::Or(x, y) => L::Or(b(x)?, b(y)?),
        Ast::Implies(x, y) => L::Implies(b(x)?, b(y)?),
        Ast::Until(x, y) => L::Until(b(x)?, b(y)?),
        Ast::WeakUntil(x, y) => L::WeakUntil(b(x)?, b(y)?),
        Ast::Flow(_) => return Err(Error::Grammar("flow operator A inside an LTL formula".into())),
    })
}

fn to_flow(a: &Ast) -> Result<FlowLtlFormula> {
    use FlowLtlFormula as Fl;
    if !has_flow(a) {
        return Ok(Fl::Run(to_ltl(a)?));
    }
    match a {
        Ast::Flow(x) => {
            if has_flow(x) {
                return Err(Error::Grammar("nested flow operator A".into()));
            }
            Ok(Fl::Flow(to_ltl(x)?))
        }
        Ast::And(x, y) => Ok(Fl::And(Box::new(to_flow(x)?), Box::new(to_flow(y)?))),
        Ast::Or(x, y) => Ok(Fl::Or(Box::new(to_flow(x)?), Box::new(to_flow(y)?))),
        Ast::Implies(x, y) => {
            if has_flow(x) {
                return Err(Error::Grammar("antecedent of an implication must be an LTL formula".into()));
            }
            Ok(Fl::Implies(to_ltl(x)?, Box::new(to_flow(y)?)))
        }
        Ast::Not(_) => Err(Error::Grammar("flow operator A under negation".into())),
        _ => Err(Error::Grammar("flow operator A under a temporal operator".into())),
    }
}

/// Parses an LTL formula.
pub fn parse_ltl(text: &str) -> Result<LtlFormula> {
    to_ltl(&parse_ast(text)?)
}

/// Parses a Flow-LTL formula.
pub fn parse_flow_ltl(text: &str) -> Result<FlowLtlFormula> {
    to_flow(&parse_ast(text)?)
}

// Precedence levels used by the printer.
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNTIL: u8 = 4;
const UNARY: u8 = 5;

pub(crate) fn atom_text(s: &str) -> String {
    let plain = s.chars().next().is_some_and(is_ident_start)
        && s.chars().all(is_ident_char)
        && !KEYWORDS.contains(&s);
    if plain {
        s.to_string()
    } else {
        let mut out = String::from("\"");
        for c in s.chars() {
            if c == '"' || c == '\\' {
                out.push('\\');
            }
            out.push(c);
        }
        out.push('"');
        out
    }
}

fn level(f: &LtlFormula) -> u8 {
    use LtlFormula as L;
    match f {
        L::Implies(..) => IMP,
        L::Or(..) => OR,
        L::And(..) => AND,
        L::Until(..) | L::WeakUntil(..) => UNTIL,
        _ => UNARY,
    }
}

fn wrap(s: String, own: u8, need: u8) -> String {
    if own < need {
        format!("({s})")
    } else {
        s
    }
}

fn ltl_at(f: &LtlFormula, need: u8) -> String {
    wrap(print_ltl(f), level(f), need)
}

pub(crate) fn print_ltl(f: &LtlFormula) -> String {
    use LtlFormula as L;
    match f {
        L::True => "true".into(),
        L::False => "false".into(),
        L::Atom(s) => atom_text(s),
        L::Not(a) => format!("!{}", ltl_at(a, UNARY)),
        L::Next(a) => format!("X {}", ltl_at(a, UNARY)),
        L::Eventually(a) => format!("F {}", ltl_at(a, UNARY)),
        L::Always(a) => format!("G {}", ltl_at(a, UNARY)),
        L::Implies(a, b) => format!("{} -> {}", ltl_at(a, OR), ltl_at(b, IMP)),
        L::Or(a, b) => format!("{} || {}", ltl_at(a, OR), ltl_at(b, AND)),
        L::And(a, b) => format!("{} && {}", ltl_at(a, AND), ltl_at(b, UNTIL)),
        L::Until(a, b) => format!("{} U {}", ltl_at(a, UNARY), ltl_at(b, UNTIL)),
        L::WeakUntil(a, b) => format!("{} W {}", ltl_at(a, UNARY), ltl_at(b, UNTIL)),
    }
}

fn flow_level(f: &FlowLtlFormula) -> u8 {
    use FlowLtlFormula as Fl;
    match f {
        Fl::Run(a) => level(a),
        Fl::Implies(..) => IMP,
        Fl::Or(..) => OR,
        Fl::And(..) => AND,
        Fl::Flow(_) => UNARY,
    }
}

fn flow_at(f: &FlowLtlFormula, need: u8) -> String {
    wrap(print_flow(f), flow_level(f), need)
}

pub(crate) fn print_flow(f: &FlowLtlFormula) -> String {
    use FlowLtlFormula as Fl;
    match f {
        Fl::Run(a) => print_ltl(a),
        Fl::Flow(a) => format!("A {}", ltl_at(a, UNTIL)),
        Fl::And(a, b) => format!("{} && {}", flow_at(a, AND), flow_at(b, UNTIL)),
        Fl::Or(a, b) => format!("{} || {}", flow_at(a, OR), flow_at(b, AND)),
        Fl::Implies(a, b) => format!("{} -> {}", ltl_at(a, OR), flow_at(b, IMP)),
    }
}
