use std::collections::BTreeMap;

use super::{naming, InhibitorNet, Part, TransitionRole};
use crate::error::{Error, Result};
use crate::ltl::{check_atoms, Arena, FlowLtlFormula, LtlFormula};
use crate::net::{NetStructure, PetriNetWithTransits};

/// Transition sets steering the skipping of unrelated steps.
///
/// Subnet vectors are indexed from 0 for subnet 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSets {
    /// Transitions outside the original part.
    pub o: Vec<String>,
    /// Per subnet: transitions of other components, own skip transitions and own chain-end transitions.
    pub o_i: Vec<Vec<String>>,
    /// Per subnet and original transition: the subnet transitions moving the chain on that label.
    pub m_it: Vec<BTreeMap<String, Vec<String>>>,
    /// Per subnet: all transitions moving the chain.
    pub m_i: Vec<Vec<String>>,
}

impl TransitionSets {
    pub fn of(tnet: &InhibitorNet) -> Self {
        let n = tnet.subnets();
        let names = tnet.pt().transitions();
        let mut o = Vec::new();
        let mut o_i = vec![Vec::new(); n];
        let mut m_it = vec![BTreeMap::new(); n];
        let mut m_i = vec![Vec::new(); n];
        for (t, role) in tnet.transition_roles().iter().enumerate() {
            let name = names[t].to_string();
            if role.part() != Part::Original {
                o.push(name.clone());
            }
            for i in 1..=n {
                let own = role.part() == Part::Subnet(i);
                let moves = matches!(role, TransitionRole::Start { .. } | TransitionRole::Transit { .. });
                if !own || !moves {
                    o_i[i - 1].push(name.clone());
                } else {
                    m_i[i - 1].push(name.clone());
                    m_it[i - 1]
                        .entry(role.label().to_string())
                        .or_insert_with(Vec::new)
                        .push(name.clone());
                }
            }
        }
        TransitionSets { o, o_i, m_it, m_i }
    }
}

fn disj(names: &[String]) -> LtlFormula {
    LtlFormula::disj(names.iter().map(LtlFormula::atom))
}

/// Positions of `X` subformulas grouped by depth, innermost group first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionPlan {
    pub batches: Vec<Vec<Vec<usize>>>,
}

impl SubstitutionPlan {
    pub fn of(f: &LtlFormula) -> Self {
        let mut found: Vec<(usize, Vec<usize>)> = Vec::new();
        fn walk(f: &LtlFormula, path: &mut Vec<usize>, out: &mut Vec<(usize, Vec<usize>)>) {
            if let LtlFormula::Next(_) = f {
                out.push((f.depth(), path.clone()));
            }
            for (k, c) in f.children().into_iter().enumerate() {
                path.push(k);
                walk(c, path, out);
                path.pop();
            }
        }
        walk(f, &mut Vec::new(), &mut found);
        let mut by_depth: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for (d, p) in found {
            by_depth.entry(d).or_default().push(p);
        }
        SubstitutionPlan {
            batches: by_depth.into_values().collect(),
        }
    }

    /// Replaces every planned `X ψ` by `rewrite(ψ')`, where ψ' is ψ after the inner batches.
    pub fn apply(&self, f: &LtlFormula, rewrite: &dyn Fn(LtlFormula) -> LtlFormula) -> LtlFormula {
        let mut f = f.clone();
        for batch in &self.batches {
            // a batch never contains a node and one of its descendants, so the order inside is free
            for path in batch {
                let node = at_path(&mut f, path);
                let LtlFormula::Next(inner) = node else {
                    unreachable!("plan paths point at next operators")
                };
                let inner = std::mem::replace(inner.as_mut(), LtlFormula::True);
                *node = rewrite(inner);
            }
        }
        f
    }
}

fn at_path<'a>(f: &'a mut LtlFormula, path: &[usize]) -> &'a mut LtlFormula {
    use LtlFormula as L;
    let Some((&k, rest)) = path.split_first() else {
        return f;
    };
    let child = match f {
        L::Not(a) | L::Next(a) | L::Eventually(a) | L::Always(a) => a,
        L::And(a, b) | L::Or(a, b) | L::Implies(a, b) | L::Until(a, b) | L::WeakUntil(a, b) => {
            if k == 0 {
                a
            } else {
                b
            }
        }
        L::True | L::False | L::Atom(_) => unreachable!("path descends into a leaf"),
    };
    at_path(child, rest)
}

/// Bottom-up rewrite of every `X ψ` by `rewrite(ψ')`; the reference for [`SubstitutionPlan`].
pub fn naive_next_rewrite(f: &LtlFormula, rewrite: &dyn Fn(LtlFormula) -> LtlFormula) -> LtlFormula {
    use LtlFormula as L;
    let go = |x: &LtlFormula| naive_next_rewrite(x, rewrite);
    match f {
        L::True | L::False | L::Atom(_) => f.clone(),
        L::Next(a) => rewrite(go(a)),
        L::Not(a) => L::not(go(a)),
        L::Eventually(a) => L::eventually(go(a)),
        L::Always(a) => L::always(go(a)),
        L::And(a, b) => L::and(go(a), go(b)),
        L::Or(a, b) => L::or(go(a), go(b)),
        L::Implies(a, b) => L::implies(go(a), go(b)),
        L::Until(a, b) => L::until(go(a), go(b)),
        L::WeakUntil(a, b) => L::weak_until(go(a), go(b)),
    }
}

/// `((∨ unrelated) U (related ∧ X ψ)) ∨ (G ¬related ∧ ψ)`
fn next_template(unrelated: &LtlFormula, related: &LtlFormula, psi: LtlFormula) -> LtlFormula {
    use LtlFormula as L;
    L::or(
        L::until(unrelated.clone(), L::and(related.clone(), L::next(psi.clone()))),
        L::and(L::always(L::not(related.clone())), psi),
    )
}

struct Rewriter<'a> {
    net: &'a PetriNetWithTransits,
    tnet: &'a InhibitorNet,
    sets: TransitionSets,
}

impl Rewriter<'_> {
    fn is_place(&self, a: &str) -> bool {
        self.net.pt().place_index(a).is_some()
    }

    fn is_transition(&self, a: &str) -> bool {
        self.net.pt().transition_index(a).is_some()
    }

    /// Flow subformula `ψ` tracked by subnet `i`.
    fn flow(&self, i: usize, psi: &LtlFormula) -> LtlFormula {
        let unrelated = disj(&self.sets.o_i[i - 1]);
        let mut atoms = |a: &str| -> LtlFormula {
            if self.is_place(a) {
                let copy = LtlFormula::atom(naming::copy(a, i));
                let ended = naming::ended(a, i);
                if self.tnet.pt().place_index(&ended).is_some() {
                    LtlFormula::or(copy, LtlFormula::atom(ended))
                } else {
                    copy
                }
            } else {
                let related = self.sets.m_it[i - 1].get(a).map(|v| disj(v)).unwrap_or(LtlFormula::False);
                LtlFormula::until(unrelated.clone(), related)
            }
        };
        let pt = psi.map_atoms(&mut atoms);
        let related = disj(&self.sets.m_i[i - 1]);
        SubstitutionPlan::of(&pt).apply(&pt, &|x| next_template(&unrelated, &related, x))
    }

    /// Run formula outside the scope of any flow operator.
    fn run(&self, phi: &LtlFormula) -> LtlFormula {
        let unrelated = disj(&self.sets.o);
        let mut atoms = |a: &str| -> LtlFormula {
            if self.is_transition(a) {
                LtlFormula::until(unrelated.clone(), LtlFormula::atom(a))
            } else {
                LtlFormula::atom(a)
            }
        };
        let t = phi.map_atoms(&mut atoms);
        let related = LtlFormula::disj(self.net.transitions().iter().map(|t| LtlFormula::atom(t.as_str())));
        SubstitutionPlan::of(&t).apply(&t, &|x| next_template(&unrelated, &related, x))
    }

    fn whole(&self, phi: &FlowLtlFormula, next: &mut usize) -> LtlFormula {
        use LtlFormula as L;
        match phi {
            FlowLtlFormula::Run(a) => self.run(a),
            FlowLtlFormula::And(a, b) => {
                let a = self.whole(a, next);
                L::and(a, self.whole(b, next))
            }
            FlowLtlFormula::Or(a, b) => {
                let a = self.whole(a, next);
                L::or(a, self.whole(b, next))
            }
            FlowLtlFormula::Implies(a, b) => L::implies(self.run(a), self.whole(b, next)),
            FlowLtlFormula::Flow(psi) => {
                *next += 1;
                let i = *next;
                let init = L::atom(naming::init(i));
                let body = self.flow(i, psi);
                L::or(L::always(init.clone()), L::until(init.clone(), L::and(L::not(init), body)))
            }
        }
    }
}

/// Rewrites `phi` into an LTL formula over the reduced net `tnet`.
///
/// Flow subformulas are assigned to subnets in textual order.
pub fn transform_formula(net: &PetriNetWithTransits, phi: &FlowLtlFormula, tnet: &InhibitorNet) -> Result<LtlFormula> {
    check_atoms(phi, net)?;
    let n = phi.flow_subformulas().len();
    if n != tnet.subnets() {
        return Err(Error::Argument(format!(
            "formula has {n} flow subformulas but the net has {} subnets",
            tnet.subnets()
        )));
    }
    let rw = Rewriter {
        net,
        tnet,
        sets: TransitionSets::of(tnet),
    };
    let body = rw.whole(phi, &mut 0);
    let fair = LtlFormula::always(LtlFormula::eventually(LtlFormula::atom(naming::act_o())));
    Ok(LtlFormula::implies(fair, body))
}

/// Sizes of a formula before and after the reduction, with the linear bound on the shared form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaSizeCheck {
    pub input: usize,
    pub output: usize,
    /// Distinct core subformulas of the output.
    pub output_shared: usize,
    pub bound: usize,
    pub holds: bool,
}

/// Constant of the size bound `c·(|N|³·n·|φ| + |φ|)`.
pub const SIZE_BOUND_CONSTANT: usize = 32;

/// Measures the reduction of `phi` on `net` against `c·(|N|³·n·|φ| + |φ|)`, where
/// `|N|` counts places and transitions. Nested next operators duplicate their operand,
/// so the bound is checked on the shared (DAG) size.
pub fn formula_size_check(net: &PetriNetWithTransits, phi: &FlowLtlFormula) -> Result<FormulaSizeCheck> {
    let n = phi.flow_subformulas().len();
    let tnet = super::transform_net(net, n)?;
    let out = transform_formula(net, phi, &tnet)?;
    let mut arena = Arena::new();
    arena.add(&out);
    let size_n = net.places().len() + net.transitions().len();
    let input = phi.size();
    let bound = SIZE_BOUND_CONSTANT * (size_n.pow(3) * n.max(1) * input + input);
    Ok(FormulaSizeCheck {
        input,
        output: out.size(),
        output_shared: arena.len(),
        bound,
        holds: arena.len() <= bound,
    })
}
