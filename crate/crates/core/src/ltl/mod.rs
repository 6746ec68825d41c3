//! LTL and Flow-LTL over the places and transitions of a net.

mod eval;
mod syntax;

pub use eval::{check_atoms, eval_flow_ltl_oracle, eval_ltl_lasso, Arena, Node};
pub use syntax::{parse_flow_ltl, parse_ltl};

use std::collections::BTreeSet;

/// LTL formula. `True`, `Atom`, `Not`, `And`, `Next` and `Until` are the core
/// operators; the remaining variants keep the written spelling of derived
/// operators and are given meaning through [`LtlFormula::expand`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LtlFormula {
    True,
    Atom(String),
    Not(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
    False,
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Implies(Box<LtlFormula>, Box<LtlFormula>),
    Eventually(Box<LtlFormula>),
    Always(Box<LtlFormula>),
    WeakUntil(Box<LtlFormula>, Box<LtlFormula>),
}

use LtlFormula as L;

impl LtlFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        L::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: LtlFormula) -> Self {
        L::Not(Box::new(a))
    }

    pub fn and(a: LtlFormula, b: LtlFormula) -> Self {
        L::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: LtlFormula, b: LtlFormula) -> Self {
        L::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: LtlFormula, b: LtlFormula) -> Self {
        L::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(a: LtlFormula) -> Self {
        L::Next(Box::new(a))
    }

    pub fn until(a: LtlFormula, b: LtlFormula) -> Self {
        L::Until(Box::new(a), Box::new(b))
    }

    pub fn weak_until(a: LtlFormula, b: LtlFormula) -> Self {
        L::WeakUntil(Box::new(a), Box::new(b))
    }

    pub fn eventually(a: LtlFormula) -> Self {
        L::Eventually(Box::new(a))
    }

    pub fn always(a: LtlFormula) -> Self {
        L::Always(Box::new(a))
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn conj<I: IntoIterator<Item = LtlFormula>>(items: I) -> Self {
        items.into_iter().reduce(L::and).unwrap_or(L::True)
    }

    /// Left-nested disjunction; the empty disjunction is `false`.
    pub fn disj<I: IntoIterator<Item = LtlFormula>>(items: I) -> Self {
        items.into_iter().reduce(L::or).unwrap_or(L::False)
    }

    /// Rewrites derived operators into core operators.
    pub fn expand(&self) -> LtlFormula {
        match self {
            L::True => L::True,
            L::Atom(a) => L::Atom(a.clone()),
            L::Not(a) => L::not(a.expand()),
            L::And(a, b) => L::and(a.expand(), b.expand()),
            L::Next(a) => L::next(a.expand()),
            L::Until(a, b) => L::until(a.expand(), b.expand()),
            L::False => L::not(L::True),
            L::Or(a, b) => L::not(L::and(L::not(a.expand()), L::not(b.expand()))),
            L::Implies(a, b) => L::not(L::and(a.expand(), L::not(b.expand()))),
            L::Eventually(a) => L::until(L::True, a.expand()),
            L::Always(a) => L::not(L::until(L::True, L::not(a.expand()))),
            L::WeakUntil(a, b) => L::Or(Box::new(L::Always(a.clone())), Box::new(L::until((**a).clone(), (**b).clone())))
                .expand(),
        }
    }

    /// Number of core nodes of the expanded formula.
    pub fn size(&self) -> usize {
        match self {
            L::True | L::Atom(_) => 1,
            L::Not(a) | L::Next(a) => 1 + a.size(),
            L::And(a, b) | L::Until(a, b) => 1 + a.size() + b.size(),
            L::False => 2,
            L::Or(a, b) => 4 + a.size() + b.size(),
            L::Implies(a, b) => 3 + a.size() + b.size(),
            L::Eventually(a) => 2 + a.size(),
            L::Always(a) => 4 + a.size(),
            L::WeakUntil(a, b) => 9 + 2 * a.size() + b.size(),
        }
    }

    /// Nesting depth of operators (atoms and constants have depth 0).
    pub fn depth(&self) -> usize {
        match self {
            L::True | L::False | L::Atom(_) => 0,
            L::Not(a) | L::Next(a) | L::Eventually(a) | L::Always(a) => 1 + a.depth(),
            L::And(a, b) | L::Or(a, b) | L::Implies(a, b) | L::Until(a, b) | L::WeakUntil(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn children(&self) -> Vec<&LtlFormula> {
        match self {
            L::True | L::False | L::Atom(_) => vec![],
            L::Not(a) | L::Next(a) | L::Eventually(a) | L::Always(a) => vec![a],
            L::And(a, b) | L::Or(a, b) | L::Implies(a, b) | L::Until(a, b) | L::WeakUntil(a, b) => vec![a, b],
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        if let L::Atom(a) = self {
            out.insert(a.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    /// True when no temporal operator occurs.
    pub fn is_propositional(&self) -> bool {
        match self {
            L::Next(_) | L::Until(_, _) | L::Eventually(_) | L::Always(_) | L::WeakUntil(_, _) => false,
            _ => self.children().iter().all(|c| c.is_propositional()),
        }
    }

    /// Replaces every atom by the result of `f` (simultaneously).
    pub fn map_atoms(&self, f: &mut dyn FnMut(&str) -> LtlFormula) -> LtlFormula {
        let mut go = |x: &LtlFormula| x.map_atoms(f);
        match self {
            L::True => L::True,
            L::False => L::False,
            L::Atom(a) => f(a),
            L::Not(a) => L::not(go(a)),
            L::Next(a) => L::next(go(a)),
            L::Eventually(a) => L::eventually(go(a)),
            L::Always(a) => L::always(go(a)),
            L::And(a, b) => {
                let a = go(a);
                L::and(a, go(b))
            }
            L::Or(a, b) => {
                let a = go(a);
                L::or(a, go(b))
            }
            L::Implies(a, b) => {
                let a = go(a);
                L::implies(a, go(b))
            }
            L::Until(a, b) => {
                let a = go(a);
                L::until(a, go(b))
            }
            L::WeakUntil(a, b) => {
                let a = go(a);
                L::weak_until(a, go(b))
            }
        }
    }
}

impl std::fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&syntax::print_ltl(self))
    }
}

/// Flow-LTL formula: run formulas combined with flow subformulas `A ψ`.
///
/// Implication antecedents and flow bodies are pure LTL by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FlowLtlFormula {
    Run(LtlFormula),
    And(Box<FlowLtlFormula>, Box<FlowLtlFormula>),
    Or(Box<FlowLtlFormula>, Box<FlowLtlFormula>),
    Implies(LtlFormula, Box<FlowLtlFormula>),
    Flow(LtlFormula),
}

use FlowLtlFormula as Fl;

impl FlowLtlFormula {
    /// Conjunction; two run formulas merge into one run formula.
    pub fn and(a: FlowLtlFormula, b: FlowLtlFormula) -> Self {
        match (a, b) {
            (Fl::Run(x), Fl::Run(y)) => Fl::Run(L::and(x, y)),
            (a, b) => Fl::And(Box::new(a), Box::new(b)),
        }
    }

    /// Disjunction; two run formulas merge into one run formula.
    pub fn or(a: FlowLtlFormula, b: FlowLtlFormula) -> Self {
        match (a, b) {
            (Fl::Run(x), Fl::Run(y)) => Fl::Run(L::or(x, y)),
            (a, b) => Fl::Or(Box::new(a), Box::new(b)),
        }
    }

    /// Implication with an LTL antecedent; a run consequent merges into one run formula.
    pub fn implies(a: LtlFormula, b: FlowLtlFormula) -> Self {
        match b {
            Fl::Run(y) => Fl::Run(L::implies(a, y)),
            b => Fl::Implies(a, Box::new(b)),
        }
    }

    pub fn flow(a: LtlFormula) -> Self {
        Fl::Flow(a)
    }

    /// Flow subformulas in textual order.
    pub fn flow_subformulas(&self) -> Vec<&LtlFormula> {
        let mut out = Vec::new();
        self.collect_flows(&mut out);
        out
    }

    fn collect_flows<'a>(&'a self, out: &mut Vec<&'a LtlFormula>) {
        match self {
            Fl::Run(_) => {}
            Fl::Flow(a) => out.push(a),
            Fl::And(a, b) | Fl::Or(a, b) => {
                a.collect_flows(out);
                b.collect_flows(out);
            }
            Fl::Implies(_, b) => b.collect_flows(out),
        }
    }

    /// Core-node count; the flow operator counts as one node.
    pub fn size(&self) -> usize {
        match self {
            Fl::Run(a) => a.size(),
            Fl::Flow(a) => 1 + a.size(),
            Fl::And(a, b) => 1 + a.size() + b.size(),
            Fl::Or(a, b) => 4 + a.size() + b.size(),
            Fl::Implies(a, b) => 3 + a.size() + b.size(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        match self {
            Fl::Run(a) | Fl::Flow(a) => a.atoms(),
            Fl::And(a, b) | Fl::Or(a, b) => {
                let mut s = a.atoms();
                s.extend(b.atoms());
                s
            }
            Fl::Implies(a, b) => {
                let mut s = a.atoms();
                s.extend(b.atoms());
                s
            }
        }
    }
}

impl std::fmt::Display for FlowLtlFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&syntax::print_flow(self))
    }
}
