//! Circuit encoding of safe P/T nets with inhibitor arcs as and-inverter graphs.
//!
//! Inputs are the transitions, latches are the places plus an initialisation latch
//! `i` and an error latch `e`, and outputs are one per place, one per transition
//! and `e_o`. The first clock step outputs the initial marking; afterwards a valid
//! input (exactly one enabled transition) fires, anything else keeps the marking
//! and raises the error latch for the following step.

mod aiger;

pub use aiger::parse_aiger;

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::ltl::LtlFormula;
use crate::net::{NetStructure, PtNet};

/// Literal of the constant false.
pub const FALSE: u32 = 0;
/// Literal of the constant true.
pub const TRUE: u32 = 1;

/// Name of the error output.
pub const ERROR_OUTPUT: &str = "e_o";

/// Output variable standing for the net element `name`.
pub fn output_name(name: &str) -> String {
    format!("{name}_o")
}

/// And-inverter graph with latches, using the AIGER literal convention:
/// variable `v` has literal `2v`, its negation `2v + 1`, variable 0 is false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub inputs: Vec<String>,
    /// Latch name, next-state literal, reset value.
    pub latches: Vec<(String, u32, bool)>,
    pub outputs: Vec<(String, u32)>,
    /// Right-hand sides of the and gates; gate `k` defines variable `I + L + 1 + k`.
    pub ands: Vec<(u32, u32)>,
    pub comments: Vec<String>,
}

impl Circuit {
    pub fn max_var(&self) -> usize {
        self.inputs.len() + self.latches.len() + self.ands.len()
    }

    pub fn gate_count(&self) -> usize {
        self.ands.len()
    }

    pub fn latch_count(&self) -> usize {
        self.latches.len()
    }

    fn eval(&self, latches: &[bool], inputs: &[bool]) -> Vec<bool> {
        let (ni, nl) = (self.inputs.len(), self.latches.len());
        let mut v = vec![false; self.max_var() + 1];
        v[1..=ni].copy_from_slice(inputs);
        v[ni + 1..=ni + nl].copy_from_slice(latches);
        for (k, &(a, b)) in self.ands.iter().enumerate() {
            let lit = |l: u32| v[(l >> 1) as usize] ^ (l & 1 == 1);
            v[ni + nl + 1 + k] = lit(a) && lit(b);
        }
        v
    }

    fn lit(v: &[bool], l: u32) -> bool {
        v[(l >> 1) as usize] ^ (l & 1 == 1)
    }

    /// One clock step: outputs and next latch values for the given latch and input values.
    pub fn step(&self, latches: &[bool], inputs: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let v = self.eval(latches, inputs);
        let outs = self.outputs.iter().map(|&(_, l)| Self::lit(&v, l)).collect();
        let next = self.latches.iter().map(|&(_, l, _)| Self::lit(&v, l)).collect();
        (outs, next)
    }

    /// Latch values after reset.
    pub fn reset(&self) -> Vec<bool> {
        self.latches.iter().map(|&(_, _, r)| r).collect()
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|n| n == name)
    }

    pub fn output_index(&self, name: &str) -> Option<usize> {
        self.outputs.iter().position(|(n, _)| n == name)
    }

    /// ASCII AIGER rendering.
    pub fn to_aiger(&self) -> String {
        aiger::write(self)
    }
}

/// Gate-level builder with structural hashing and constant propagation.
#[derive(Debug, Default)]
struct AigBuilder {
    first_gate: u32,
    ands: Vec<(u32, u32)>,
    hash: HashMap<(u32, u32), u32>,
}

impl AigBuilder {
    fn new(first_gate_var: u32) -> Self {
        AigBuilder {
            first_gate: first_gate_var,
            ..Default::default()
        }
    }

    fn and(&mut self, a: u32, b: u32) -> u32 {
        let (a, b) = if a >= b { (a, b) } else { (b, a) };
        if b == FALSE || a == b ^ 1 {
            return FALSE;
        }
        if b == TRUE {
            return a;
        }
        if a == b {
            return a;
        }
        if let Some(&l) = self.hash.get(&(a, b)) {
            return l;
        }
        let l = 2 * (self.first_gate + self.ands.len() as u32);
        self.ands.push((a, b));
        self.hash.insert((a, b), l);
        l
    }

    fn or(&mut self, a: u32, b: u32) -> u32 {
        self.and(a ^ 1, b ^ 1) ^ 1
    }

    fn and_all(&mut self, lits: impl IntoIterator<Item = u32>) -> u32 {
        lits.into_iter().fold(TRUE, |acc, l| self.and(acc, l))
    }

    fn or_all(&mut self, lits: impl IntoIterator<Item = u32>) -> u32 {
        lits.into_iter().fold(FALSE, |acc, l| self.or(acc, l))
    }

    fn mux(&mut self, s: u32, then: u32, otherwise: u32) -> u32 {
        let a = self.and(s, then);
        let b = self.and(s ^ 1, otherwise);
        self.or(a, b)
    }
}

/// Encodes a safe P/T net with inhibitor arcs as a circuit. `comments` are recorded in the
/// AIGER comment section.
pub fn encode_net<N: NetStructure>(net: &N, comments: &[String]) -> Result<Circuit> {
    let pt = net.pt();
    let (np, nt) = (pt.places().len(), pt.transitions().len());
    let mut names: BTreeSet<String> = BTreeSet::new();
    for n in pt.places().iter().map(|p| p.as_str()).chain(pt.transitions().iter().map(|t| t.as_str())) {
        names.insert(output_name(n));
    }
    if names.contains(ERROR_OUTPUT) {
        return Err(Error::NameCollision(format!("output {ERROR_OUTPUT} clashes with a net element")));
    }
    let input = |t: usize| 2 * (1 + t as u32);
    let latch = |p: usize| 2 * (1 + nt as u32 + p as u32);
    let init_latch = latch(np);
    let err_latch = latch(np + 1);
    let mut g = AigBuilder::new(1 + nt as u32 + np as u32 + 2);

    // exactly-one over the inputs through prefix and suffix disjunctions
    let mut prefix = vec![FALSE; nt + 1];
    for t in 0..nt {
        prefix[t + 1] = g.or(prefix[t], input(t));
    }
    let mut suffix = vec![FALSE; nt + 1];
    for t in (0..nt).rev() {
        suffix[t] = g.or(suffix[t + 1], input(t));
    }
    let mut val = Vec::with_capacity(nt);
    for t in 0..nt {
        let others = g.or(prefix[t], suffix[t + 1]);
        let mut lits = vec![input(t), others ^ 1];
        lits.extend(pt.pre(t).iter().map(|&p| latch(p)));
        lits.extend(pt.inhibitors(t).iter().map(|&p| latch(p) ^ 1));
        val.push(g.and_all(lits));
    }
    let no_t = g.and_all(val.iter().map(|&v| v ^ 1));

    // succ(p): keep on noT, otherwise the effect of the single valid transition
    let mut produce = vec![Vec::new(); np];
    let mut consume = vec![Vec::new(); np];
    for t in 0..nt {
        for &p in pt.post(t) {
            produce[p].push(val[t]);
        }
        for &p in pt.pre(t) {
            if !pt.post(t).contains(&p) {
                consume[p].push(val[t]);
            }
        }
    }
    let initial: BTreeSet<usize> = pt.initial().iter().copied().collect();
    let mut next_place = Vec::with_capacity(np);
    for p in 0..np {
        let made = g.or_all(produce[p].clone());
        let taken = g.or_all(consume[p].clone());
        let kept = g.and(latch(p), taken ^ 1);
        let fired = g.or(made, kept);
        let succ = g.mux(no_t, latch(p), fired);
        let next = if initial.contains(&p) {
            g.or(init_latch ^ 1, succ)
        } else {
            g.and(init_latch, succ)
        };
        next_place.push(next);
    }
    let next_err = g.and(init_latch, no_t);

    let mut outputs = Vec::with_capacity(np + nt + 1);
    for p in 0..np {
        let o = g.mux(init_latch, latch(p), next_place[p]);
        outputs.push((output_name(pt.places()[p].as_str()), o));
    }
    for t in 0..nt {
        outputs.push((output_name(pt.transitions()[t].as_str()), val[t]));
    }
    outputs.push((ERROR_OUTPUT.to_string(), err_latch));

    let mut latches: Vec<(String, u32, bool)> = (0..np)
        .map(|p| (pt.places()[p].to_string(), next_place[p], false))
        .collect();
    latches.push(("i".to_string(), TRUE, false));
    latches.push(("e".to_string(), next_err, false));
    Ok(Circuit {
        inputs: pt.transitions().iter().map(|t| t.to_string()).collect(),
        latches,
        outputs,
        ands: g.ands,
        comments: comments.to_vec(),
    })
}

/// `X(G(e_o -> G e_o) -> φ̃)` where φ̃ renames every atom to its output variable.
pub fn wrap_formula_for_circuit(phi: &LtlFormula) -> LtlFormula {
    use LtlFormula as L;
    let renamed = phi.map_atoms(&mut |a| L::atom(output_name(a)));
    let e = L::atom(ERROR_OUTPUT);
    L::next(L::implies(L::always(L::implies(e.clone(), L::always(e))), renamed))
}

/// Runs the circuit from reset on a sequence of input sets (named transitions).
/// Returns the set of true outputs per step.
pub fn simulate(c: &Circuit, inputs: &[BTreeSet<String>]) -> Result<Vec<BTreeSet<String>>> {
    let mut latches = c.reset();
    let mut out = Vec::with_capacity(inputs.len());
    for set in inputs {
        let mut bits = vec![false; c.inputs.len()];
        for name in set {
            let i = c
                .input_index(name)
                .ok_or_else(|| Error::Argument(format!("unknown circuit input {name}")))?;
            bits[i] = true;
        }
        let (o, next) = c.step(&latches, &bits);
        out.push(
            c.outputs
                .iter()
                .zip(o)
                .filter(|(_, v)| *v)
                .map(|((n, _), _)| n.clone())
                .collect(),
        );
        latches = next;
    }
    Ok(out)
}

/// Reference reading of the update relation: whether `(I, L, O, L')` satisfies all
/// conjuncts, evaluated on the net directly rather than through the gates.
///
/// Latches are ordered as places, then `i`, then `e`; outputs as places, transitions, `e_o`.
pub fn relation_holds(pt: &PtNet, inputs: &[bool], l: &[bool], o: &[bool], l2: &[bool]) -> bool {
    let (np, nt) = (pt.places().len(), pt.transitions().len());
    let (i, e) = (l[np], l[np + 1]);
    let val = |t: usize| {
        inputs[t]
            && (0..nt).all(|u| u == t || !inputs[u])
            && pt.pre(t).iter().all(|&p| l[p])
            && pt.inhibitors(t).iter().all(|&p| !l[p])
    };
    let vals: Vec<bool> = (0..nt).map(val).collect();
    let no_t = vals.iter().all(|v| !v);
    let t_out = |t: usize| o[np + t];
    let succ = |p: usize| -> bool {
        if no_t {
            return l[p];
        }
        (0..nt).all(|t| {
            !t_out(t) || {
                let (inpre, inpost) = (pt.pre(t).contains(&p), pt.post(t).contains(&p));
                if !inpre && !inpost {
                    l[p]
                } else {
                    !(inpre && !inpost)
                }
            }
        })
    };
    let initial: BTreeSet<usize> = pt.initial().iter().copied().collect();
    let out_p = (0..np).all(|p| o[p] == (if i { l[p] } else { l2[p] }));
    let out_t = (0..nt).all(|t| o[np + t] == vals[t]);
    let out_e = o[np + nt] == e;
    let latch_e = l2[np + 1] == (i && no_t);
    let latch_i = l2[np];
    let latch_p = (0..np).all(|p| {
        let want = if initial.contains(&p) { !i || succ(p) } else { i && succ(p) };
        l2[p] == want
    });
    out_p && out_t && out_e && latch_e && latch_i && latch_p
}
