//! Reduction of a net with transits and a Flow-LTL formula to a P/T net with
//! inhibitor arcs and an LTL formula, with counterexample maps in both directions.
//!
//! The reduced net runs the original net next to one tracking subnet per flow
//! subformula. An activation token visits the original part and then every
//! subnet in turn, so each original step is followed by exactly one step per
//! subnet that either moves the tracked chain or skips.

mod audit;
mod cex;
mod formula;
pub mod naming;

pub use audit::{audit, ConstraintCheck};
pub use cex::{lift_counterexample, map_counterexample_back};
pub use formula::{
    formula_size_check, naive_next_rewrite, transform_formula, FormulaSizeCheck, SubstitutionPlan, TransitionSets,
};

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::net::{validate_safe, NetBuilder, NetStructure, PetriNetWithTransits, PlaceId, PtNet, TransitionId};

/// Depth bound handed to the safety check of input nets.
pub const SAFETY_DEPTH: usize = 1_000;

/// Component an element of the reduced net belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Original,
    /// Tracking subnet, numbered from 1.
    Subnet(usize),
}

/// What a place of the reduced net stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlaceRole {
    Original(PlaceId),
    /// `act@o`: the original part may fire.
    ActivationOriginal,
    /// `act@t#i`: subnet `i` has to follow a step labelled `t`.
    Activation { transition: TransitionId, subnet: usize },
    /// `[p]#i`: the chain tracked by subnet `i` is at `p`.
    Copy { place: PlaceId, subnet: usize },
    /// `init#i`: subnet `i` has not picked a chain yet.
    Init { subnet: usize },
    /// `[p]#i!`: the tracked chain ended in `p`.
    Ended { place: PlaceId, subnet: usize },
}

/// What a transition of the reduced net stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransitionRole {
    Original(TransitionId),
    /// `t@(>,q)#i`: start tracking a chain created by `t` in `q`.
    Start { transition: TransitionId, target: PlaceId, subnet: usize },
    /// `t@(p,q)#i`: move the tracked chain along the transit `p -> q` of `t`.
    Transit { transition: TransitionId, source: PlaceId, target: PlaceId, subnet: usize },
    /// `t@skip#i`: `t` does not touch the tracked chain.
    Skip { transition: TransitionId, subnet: usize },
    /// `t@(p,!)#i`: `t` consumes `p` without a transit from it, ending the tracked chain.
    End { transition: TransitionId, source: PlaceId, subnet: usize },
}

impl TransitionRole {
    pub fn label(&self) -> &TransitionId {
        match self {
            TransitionRole::Original(t)
            | TransitionRole::Start { transition: t, .. }
            | TransitionRole::Transit { transition: t, .. }
            | TransitionRole::Skip { transition: t, .. }
            | TransitionRole::End { transition: t, .. } => t,
        }
    }

    pub fn part(&self) -> Part {
        match self {
            TransitionRole::Original(_) => Part::Original,
            TransitionRole::Start { subnet, .. }
            | TransitionRole::Transit { subnet, .. }
            | TransitionRole::Skip { subnet, .. }
            | TransitionRole::End { subnet, .. } => Part::Subnet(*subnet),
        }
    }
}

impl PlaceRole {
    pub fn part(&self) -> Part {
        match self {
            PlaceRole::Original(_) | PlaceRole::ActivationOriginal => Part::Original,
            PlaceRole::Activation { subnet, .. }
            | PlaceRole::Copy { subnet, .. }
            | PlaceRole::Init { subnet }
            | PlaceRole::Ended { subnet, .. } => Part::Subnet(*subnet),
        }
    }
}

/// Safe P/T net with inhibitor arcs produced from a net with transits, with the
/// labelling back to the original elements.
#[derive(Debug, Clone)]
pub struct InhibitorNet {
    pt: PtNet,
    name: String,
    subnets: usize,
    place_roles: Vec<PlaceRole>,
    transition_roles: Vec<TransitionRole>,
    original: PetriNetWithTransits,
}

impl NetStructure for InhibitorNet {
    fn pt(&self) -> &PtNet {
        &self.pt
    }
}

impl InhibitorNet {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of tracking subnets.
    pub fn subnets(&self) -> usize {
        self.subnets
    }

    pub fn original(&self) -> &PetriNetWithTransits {
        &self.original
    }

    pub fn place_role(&self, p: usize) -> &PlaceRole {
        &self.place_roles[p]
    }

    pub fn transition_role(&self, t: usize) -> &TransitionRole {
        &self.transition_roles[t]
    }

    pub fn place_roles(&self) -> &[PlaceRole] {
        &self.place_roles
    }

    pub fn transition_roles(&self) -> &[TransitionRole] {
        &self.transition_roles
    }

    /// Component of the named element.
    pub fn part(&self, name: &str) -> Option<Part> {
        if let Some(p) = self.pt.place_index(name) {
            return Some(self.place_roles[p].part());
        }
        self.pt.transition_index(name).map(|t| self.transition_roles[t].part())
    }

    /// Original element the named element stands for, if any.
    pub fn lambda(&self, name: &str) -> Option<&str> {
        if let Some(p) = self.pt.place_index(name) {
            return match &self.place_roles[p] {
                PlaceRole::Original(q) | PlaceRole::Copy { place: q, .. } | PlaceRole::Ended { place: q, .. } => {
                    Some(q.as_str())
                }
                _ => None,
            };
        }
        self.pt
            .transition_index(name)
            .map(|t| self.transition_roles[t].label().as_str())
    }

    pub fn place_count(&self) -> usize {
        self.pt.places().len()
    }

    pub fn transition_count(&self) -> usize {
        self.pt.transitions().len()
    }

    /// Places of the original net, as indices of this net.
    pub fn original_places(&self) -> Vec<usize> {
        (0..self.place_count())
            .filter(|&p| matches!(self.place_roles[p], PlaceRole::Original(_)))
            .collect()
    }

    /// Serializes the reduced net (structure only; roles are recoverable from the names).
    pub fn to_text(&self) -> String {
        crate::net::write_pt_net(&self.name, &self.pt)
    }
}

/// Closed-form element counts of the reduced net for `n` subnets, without end gadgets:
/// `n(|P|+|T|+1)+|P|+1` places (every subnet has a copy of each place, one init place
/// and one activation place per transition) and `n(#starts+#transits+|T|)+|T|` transitions.
pub fn expected_sizes(net: &PetriNetWithTransits, n: usize) -> (usize, usize) {
    let (p, t) = (net.places().len(), net.transitions().len());
    (
        n * (p + t + 1) + p + 1,
        n * (net.start_count() + net.transit_count() + t) + t,
    )
}

/// Pairs (t, p) where `t` consumes a place `p` that chains can reach without a transit out of `p`.
pub fn chain_end_pairs(net: &PetriNetWithTransits) -> Vec<(usize, usize)> {
    let pt = net.pt();
    let targets: BTreeSet<usize> = (0..pt.transitions().len())
        .flat_map(|t| net.transits_ix(t).iter().map(|&(_, q)| q))
        .collect();
    let mut out = Vec::new();
    for t in 0..pt.transitions().len() {
        for &p in pt.pre(t) {
            if targets.contains(&p) && !net.transits_ix(t).iter().any(|&(s, _)| s == Some(p)) {
                out.push((t, p));
            }
        }
    }
    out
}

/// Builds the reduced net for `n` flow subformulas.
pub fn transform_net(net: &PetriNetWithTransits, n: usize) -> Result<InhibitorNet> {
    validate_safe(net, SAFETY_DEPTH)?;
    let pt = net.pt();
    let pname = |p: usize| pt.places()[p].as_str();
    let tname = |t: usize| pt.transitions()[t].as_str();
    let mut b = NetBuilder::new(net.name());
    let mut place_roles: HashMap<String, PlaceRole> = HashMap::new();
    let mut trans_roles: HashMap<String, TransitionRole> = HashMap::new();
    let initial: BTreeSet<usize> = pt.initial().iter().copied().collect();

    let collide = |e: Error| match e {
        Error::NameCollision(s) => Error::NameCollision(format!("generated name {s} clashes with a net element")),
        e => e,
    };

    // (o) original part
    for (p, name) in pt.places().iter().enumerate() {
        b.place(name.as_str(), initial.contains(&p))?;
        place_roles.insert(name.to_string(), PlaceRole::Original(name.clone()));
    }
    for (t, name) in pt.transitions().iter().enumerate() {
        b.transition(name.as_str(), false)?;
        trans_roles.insert(name.to_string(), TransitionRole::Original(name.clone()));
        for &p in pt.pre(t) {
            b.arc_in(pname(p), name.as_str())?;
        }
        for &p in pt.post(t) {
            b.arc_out(name.as_str(), pname(p))?;
        }
    }
    // (a), act@o
    let act_o = naming::act_o();
    b.place(&act_o, true).map_err(collide)?;
    place_roles.insert(act_o.clone(), PlaceRole::ActivationOriginal);

    let ends = chain_end_pairs(net);
    for i in 1..=n {
        // (s1) place copies, (s2) init, (a) activation places
        for (p, name) in pt.places().iter().enumerate() {
            let c = naming::copy(pname(p), i);
            b.place(&c, false).map_err(collide)?;
            place_roles.insert(c, PlaceRole::Copy { place: name.clone(), subnet: i });
        }
        let init = naming::init(i);
        b.place(&init, true).map_err(collide)?;
        place_roles.insert(init.clone(), PlaceRole::Init { subnet: i });
        for (t, name) in pt.transitions().iter().enumerate() {
            let a = naming::act(tname(t), i);
            b.place(&a, false).map_err(collide)?;
            place_roles.insert(a, PlaceRole::Activation { transition: name.clone(), subnet: i });
        }
        for &(_, p) in &ends {
            let e = naming::ended(pname(p), i);
            if !b.has_place(&e) {
                b.place(&e, false).map_err(collide)?;
                place_roles.insert(e, PlaceRole::Ended { place: pt.places()[p].clone(), subnet: i });
            }
        }
    }

    for i in 1..=n {
        let next_act = |t: usize| if i == n { naming::act_o() } else { naming::act(tname(t), i + 1) };
        for (t, name) in pt.transitions().iter().enumerate() {
            let here = naming::act(tname(t), i);
            let mut add = |b: &mut NetBuilder, tn: String, role: TransitionRole, pre: Vec<String>, post: Vec<String>| -> Result<()> {
                b.transition(&tn, false).map_err(collide)?;
                b.arc_in(&here, &tn)?;
                b.arc_out(&tn, &next_act(t))?;
                for p in &pre {
                    b.arc_in(p, &tn)?;
                }
                for p in &post {
                    b.arc_out(&tn, p)?;
                }
                trans_roles.insert(tn, role);
                Ok(())
            };
            for &(s, q) in net.transits_ix(t) {
                match s {
                    // (s3) chain start
                    None => add(
                        &mut b,
                        naming::start(tname(t), pname(q), i),
                        TransitionRole::Start { transition: name.clone(), target: pt.places()[q].clone(), subnet: i },
                        vec![naming::init(i)],
                        vec![naming::copy(pname(q), i)],
                    )?,
                    // (s4) transit
                    Some(p) => add(
                        &mut b,
                        naming::transit(tname(t), pname(p), pname(q), i),
                        TransitionRole::Transit {
                            transition: name.clone(),
                            source: pt.places()[p].clone(),
                            target: pt.places()[q].clone(),
                            subnet: i,
                        },
                        vec![naming::copy(pname(p), i)],
                        vec![naming::copy(pname(q), i)],
                    )?,
                }
            }
            // (s5) skip, guarded by inhibitor arcs on the copies of the preset
            let skip = naming::skip(tname(t), i);
            add(&mut b, skip.clone(), TransitionRole::Skip { transition: name.clone(), subnet: i }, vec![], vec![])?;
            for &p in pt.pre(t) {
                b.inhibitor(&naming::copy(pname(p), i), &skip)?;
            }
            for &(_, p) in ends.iter().filter(|(et, _)| *et == t) {
                add(
                    &mut b,
                    naming::end(tname(t), pname(p), i),
                    TransitionRole::End { transition: name.clone(), source: pt.places()[p].clone(), subnet: i },
                    vec![naming::copy(pname(p), i)],
                    vec![naming::ended(pname(p), i)],
                )?;
            }
        }
    }

    // (mO): original transitions pass the activation token to subnet 1 (or keep it when n = 0)
    for t in 0..pt.transitions().len() {
        b.arc_in(&act_o, tname(t))?;
        let to = if n == 0 { act_o.clone() } else { naming::act(tname(t), 1) };
        b.arc_out(tname(t), &to)?;
    }

    let built = b.build_pt_net()?;
    let place_roles = built
        .places()
        .iter()
        .map(|p| place_roles.remove(p.as_str()).expect("every place has a role"))
        .collect();
    let transition_roles = built
        .transitions()
        .iter()
        .map(|t| trans_roles.remove(t.as_str()).expect("every transition has a role"))
        .collect();
    Ok(InhibitorNet {
        pt: built,
        name: net.name().to_string(),
        subnets: n,
        place_roles,
        transition_roles,
        original: net.clone(),
    })
}
