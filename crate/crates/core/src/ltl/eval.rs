use std::collections::HashMap;

use super::{FlowLtlFormula, LtlFormula};
use crate::error::{Error, Result};
use crate::net::{trace_of_chain, trace_of_sequence, track_chains, FiringSequence, PetriNetWithTransits};
use crate::trace::Trace;

/// Core LTL node stored in an [`Arena`]; children are arena indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    Atom(String),
    Not(usize),
    And(usize, usize),
    Next(usize),
    Until(usize, usize),
}

/// Hash-consed DAG of core nodes. Children always precede their parents.
#[derive(Debug, Clone, Default)]
pub struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
}

impl Arena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn intern(&mut self, node: Node) -> usize {
        if let Some(&i) = self.index.get(&node) {
            return i;
        }
        self.nodes.push(node.clone());
        self.index.insert(node, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    /// Adds the core expansion of `f` and returns the index of its root.
    pub fn add(&mut self, f: &LtlFormula) -> usize {
        match f {
            LtlFormula::True => self.intern(Node::True),
            LtlFormula::Atom(a) => self.intern(Node::Atom(a.clone())),
            LtlFormula::Not(a) => {
                let a = self.add(a);
                self.intern(Node::Not(a))
            }
            LtlFormula::And(a, b) => {
                let a = self.add(a);
                let b = self.add(b);
                self.intern(Node::And(a, b))
            }
            LtlFormula::Next(a) => {
                let a = self.add(a);
                self.intern(Node::Next(a))
            }
            LtlFormula::Until(a, b) => {
                let a = self.add(a);
                let b = self.add(b);
                self.intern(Node::Until(a, b))
            }
            derived => self.add(&derived.expand()),
        }
    }

    /// Truth value of every node at every position of `trace`.
    pub fn evaluate(&self, trace: &Trace) -> Vec<Vec<bool>> {
        let n = trace.len();
        let mut val: Vec<Vec<bool>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let row = match node {
                Node::True => vec![true; n],
                Node::Atom(a) => (0..n).map(|i| trace.at(i).contains(a)).collect(),
                Node::Not(a) => val[*a].iter().map(|v| !v).collect(),
                Node::And(a, b) => (0..n).map(|i| val[*a][i] && val[*b][i]).collect(),
                Node::Next(a) => (0..n).map(|i| val[*a][trace.next(i)]).collect(),
                Node::Until(a, b) => {
                    let (va, vb) = (&val[*a], &val[*b]);
                    let mut row = vec![false; n];
                    // least fixpoint: a false start never creates spurious witnesses
                    loop {
                        let mut changed = false;
                        for i in (0..n).rev() {
                            let v = vb[i] || (va[i] && row[trace.next(i)]);
                            if v != row[i] {
                                row[i] = v;
                                changed = true;
                            }
                        }
                        if !changed {
                            break;
                        }
                    }
                    row
                }
            };
            val.push(row);
        }
        val
    }
}

/// Decides whether the ultimately periodic word `trace` satisfies `phi`.
pub fn eval_ltl_lasso(phi: &LtlFormula, trace: &Trace) -> bool {
    let mut arena = Arena::new();
    let root = arena.add(phi);
    arena.evaluate(trace)[root][0]
}

/// Checks that every atom of `phi` names a place or transition of `net`.
pub fn check_atoms(phi: &FlowLtlFormula, net: &PetriNetWithTransits) -> Result<()> {
    let pt = crate::net::NetStructure::pt(net);
    for a in phi.atoms() {
        if pt.place_index(&a).is_none() && pt.transition_index(&a).is_none() {
            return Err(Error::UnboundAtom(a));
        }
    }
    Ok(())
}

/// Decides the Flow-LTL judgement for the single firing sequence `seq`.
///
/// Run formulas are evaluated on the trace of the sequence; a flow formula
/// `A ψ` holds when ψ holds on the trace of every flow chain of the sequence.
pub fn eval_flow_ltl_oracle(net: &PetriNetWithTransits, seq: &FiringSequence, phi: &FlowLtlFormula) -> Result<bool> {
    seq.validate(net)?;
    let run = trace_of_sequence(seq);
    let chains: Vec<Trace> = if phi.flow_subformulas().is_empty() {
        Vec::new()
    } else {
        track_chains(net, seq).iter().map(trace_of_chain).collect()
    };
    Ok(eval_flow(phi, &run, &chains))
}

fn eval_flow(phi: &FlowLtlFormula, run: &Trace, chains: &[Trace]) -> bool {
    match phi {
        FlowLtlFormula::Run(a) => eval_ltl_lasso(a, run),
        FlowLtlFormula::Flow(a) => chains.iter().all(|c| eval_ltl_lasso(a, c)),
        FlowLtlFormula::And(a, b) => eval_flow(a, run, chains) && eval_flow(b, run, chains),
        FlowLtlFormula::Or(a, b) => eval_flow(a, run, chains) || eval_flow(b, run, chains),
        FlowLtlFormula::Implies(a, b) => !eval_ltl_lasso(a, run) || eval_flow(b, run, chains),
    }
}
