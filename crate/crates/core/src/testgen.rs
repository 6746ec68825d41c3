//! Seeded generators of small nets, formulas and traces, and exhaustive enumeration
//! of short firing sequences, used by the property campaigns.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ltl::{FlowLtlFormula, LtlFormula};
use crate::net::{fire, validate_safe, FiringSequence, NetBuilder, NetStructure, PetriNetWithTransits, PtNet};
use crate::trace::Trace;

/// Bounds for [`random_pnwt`].
#[derive(Debug, Clone, Copy)]
pub struct PnwtShape {
    pub max_places: usize,
    pub max_transitions: usize,
    pub max_transits: usize,
    pub max_starts: usize,
}

impl Default for PnwtShape {
    fn default() -> Self {
        PnwtShape {
            max_places: 4,
            max_transitions: 3,
            max_transits: 2,
            max_starts: 1,
        }
    }
}

fn subset<R: Rng>(rng: &mut R, names: &[String], p: f64) -> Vec<String> {
    names.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

/// A random safe net with transits within `shape`.
pub fn random_pnwt<R: Rng>(rng: &mut R, shape: PnwtShape) -> PetriNetWithTransits {
    loop {
        let np = rng.gen_range(1..=shape.max_places);
        let nt = rng.gen_range(1..=shape.max_transitions);
        let places: Vec<String> = (0..np).map(|i| format!("p{i}")).collect();
        let transitions: Vec<String> = (0..nt).map(|i| format!("t{i}")).collect();
        let mut b = NetBuilder::new("random");
        let init = subset(rng, &places, 0.5);
        for p in &places {
            b.place(p, init.contains(p)).expect("fresh place");
        }
        let mut starts = 0;
        for t in &transitions {
            b.transition(t, rng.gen_bool(0.3)).expect("fresh transition");
            let mut pre = subset(rng, &places, 0.4);
            if pre.is_empty() {
                pre.push(places.choose(rng).unwrap().clone());
            }
            let post = subset(rng, &places, 0.4);
            for p in &pre {
                b.arc_in(p, t).expect("known names");
            }
            for q in &post {
                b.arc_out(t, q).expect("known names");
            }
            let mut candidates: Vec<(Option<String>, String)> = Vec::new();
            for q in &post {
                candidates.push((None, q.clone()));
                for p in &pre {
                    candidates.push((Some(p.clone()), q.clone()));
                }
            }
            candidates.shuffle(rng);
            let k = rng.gen_range(0..=shape.max_transits.min(candidates.len()));
            for (from, to) in candidates.into_iter().take(k) {
                if from.is_none() {
                    if starts >= shape.max_starts {
                        continue;
                    }
                    starts += 1;
                }
                b.transit(t, from.as_deref(), &to).expect("known names");
            }
        }
        let net = b.build().expect("arcs cover the transits");
        if validate_safe(&net, 1000).is_ok() {
            return net;
        }
    }
}

/// A random safe P/T net with inhibitor arcs and at most `max_places` places.
pub fn random_inhibitor_net<R: Rng>(rng: &mut R, max_places: usize, max_transitions: usize) -> PtNet {
    loop {
        let np = rng.gen_range(1..=max_places);
        let nt = rng.gen_range(1..=max_transitions);
        let places: Vec<String> = (0..np).map(|i| format!("p{i}")).collect();
        let mut b = NetBuilder::new("random");
        let init = subset(rng, &places, 0.5);
        for p in &places {
            b.place(p, init.contains(p)).expect("fresh place");
        }
        for i in 0..nt {
            let t = format!("t{i}");
            b.transition(&t, false).expect("fresh transition");
            let mut pre = subset(rng, &places, 0.4);
            if pre.is_empty() {
                pre.push(places.choose(rng).unwrap().clone());
            }
            for p in &pre {
                b.arc_in(p, &t).expect("known names");
            }
            for q in subset(rng, &places, 0.4) {
                b.arc_out(&t, &q).expect("known names");
            }
            for q in subset(rng, &places, 0.2) {
                if !pre.contains(&q) {
                    b.inhibitor(&q, &t).expect("known names");
                }
            }
        }
        let pt = b.build_pt_net().expect("no transits");
        if validate_safe(&pt, 1000).is_ok() {
            return pt;
        }
    }
}

/// A random LTL formula of depth at most `depth` over `atoms`.
pub fn random_ltl<R: Rng>(rng: &mut R, atoms: &[String], depth: usize) -> LtlFormula {
    use LtlFormula as L;
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => L::True,
            1 => L::False,
            _ => L::atom(atoms.choose(rng).expect("atoms given").clone()),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..10) {
        0 => L::not(random_ltl(rng, atoms, d)),
        1 => L::and(random_ltl(rng, atoms, d), random_ltl(rng, atoms, d)),
        2 => L::or(random_ltl(rng, atoms, d), random_ltl(rng, atoms, d)),
        3 => L::implies(random_ltl(rng, atoms, d), random_ltl(rng, atoms, d)),
        4 => L::next(random_ltl(rng, atoms, d)),
        5 => L::eventually(random_ltl(rng, atoms, d)),
        6 => L::always(random_ltl(rng, atoms, d)),
        7 => L::until(random_ltl(rng, atoms, d), random_ltl(rng, atoms, d)),
        8 => L::weak_until(random_ltl(rng, atoms, d), random_ltl(rng, atoms, d)),
        _ => L::not(L::until(random_ltl(rng, atoms, d), random_ltl(rng, atoms, d))),
    }
}

/// A random Flow-LTL formula with exactly one flow subformula.
pub fn random_flow_ltl<R: Rng>(rng: &mut R, net: &PetriNetWithTransits, depth: usize) -> FlowLtlFormula {
    let atoms: Vec<String> = net
        .places()
        .iter()
        .map(|p| p.to_string())
        .chain(net.transitions().iter().map(|t| t.to_string()))
        .collect();
    let flow = FlowLtlFormula::flow(random_ltl(rng, &atoms, depth));
    match rng.gen_range(0..4) {
        0 => flow,
        1 => FlowLtlFormula::implies(random_ltl(rng, &atoms, depth.saturating_sub(1)), flow),
        2 => FlowLtlFormula::and(FlowLtlFormula::Run(random_ltl(rng, &atoms, depth.saturating_sub(1))), flow),
        _ => FlowLtlFormula::or(FlowLtlFormula::Run(random_ltl(rng, &atoms, depth.saturating_sub(1))), flow),
    }
}

/// A random lasso-shaped trace over `atoms` with at most `max_len` positions.
pub fn random_trace<R: Rng>(rng: &mut R, atoms: &[String], max_len: usize) -> Trace {
    let len = rng.gen_range(1..=max_len.max(1));
    let split = rng.gen_range(0..len);
    let letter = |rng: &mut R| -> BTreeSet<String> { atoms.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect() };
    let prefix = (0..split).map(|_| letter(rng)).collect();
    let period = (split..len).map(|_| letter(rng)).collect();
    Trace::new(prefix, period)
}

/// Every firing sequence of `net` with at most `bound` steps: all finite ones and every
/// lasso whose prefix and period together have at most `bound` steps.
pub fn enumerate_sequences<N: NetStructure>(net: &N, bound: usize) -> Vec<FiringSequence> {
    let pt = net.pt();
    let mut out = Vec::new();
    let mut stack = vec![FiringSequence::empty(pt.initial_marking())];
    while let Some(seq) = stack.pop() {
        let m = seq.final_marking.clone();
        for l in 0..seq.len() {
            if seq.steps[l].0 == m {
                let mut lasso = seq.clone();
                lasso.lasso_start = Some(l);
                out.push(lasso);
            }
        }
        if seq.len() < bound {
            for t in pt.transitions() {
                if let Ok(next) = fire(net, &m, t) {
                    let mut longer = seq.clone();
                    longer.steps.push((m.clone(), t.clone()));
                    longer.final_marking = next;
                    stack.push(longer);
                }
            }
        }
        out.push(seq);
    }
    out
}

/// Direct reading of LTL on a lasso trace by unrolling, independent of the dynamic program.
pub fn naive_eval(phi: &LtlFormula, trace: &Trace, i: usize) -> bool {
    use LtlFormula as L;
    // positions reachable from i, in order, visiting the loop once
    let horizon = || {
        let mut v = vec![i];
        let mut j = i;
        for _ in 0..trace.len() {
            j = trace.next(j);
            v.push(j);
        }
        v
    };
    match phi {
        L::True => true,
        L::False => false,
        L::Atom(a) => trace.at(i).contains(a),
        L::Not(a) => !naive_eval(a, trace, i),
        L::And(a, b) => naive_eval(a, trace, i) && naive_eval(b, trace, i),
        L::Or(a, b) => naive_eval(a, trace, i) || naive_eval(b, trace, i),
        L::Implies(a, b) => !naive_eval(a, trace, i) || naive_eval(b, trace, i),
        L::Next(a) => naive_eval(a, trace, trace.next(i)),
        L::Eventually(a) => horizon().into_iter().any(|j| naive_eval(a, trace, j)),
        L::Always(a) => horizon().into_iter().all(|j| naive_eval(a, trace, j)),
        L::Until(a, b) => {
            for j in horizon() {
                if naive_eval(b, trace, j) {
                    return true;
                }
                if !naive_eval(a, trace, j) {
                    return false;
                }
            }
            false
        }
        L::WeakUntil(a, b) => {
            for j in horizon() {
                if naive_eval(b, trace, j) {
                    return true;
                }
                if !naive_eval(a, trace, j) {
                    return false;
                }
            }
            true
        }
    }
}
