//! Safe Petri nets with transits: data model, firing, reachability.

mod chains;
mod format;
mod run;

pub use chains::{trace_of_chain, trace_of_sequence, track_chains, ChainAction, ChainEnd, FlowChain};
pub use format::{parse_net, parse_pt_net, write_net, write_pt_net};
pub use run::InducedRun;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                $name(name.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }
    };
}

id_type!(PlaceId);
id_type!(TransitionId);

/// Source of a transit: an existing flow in a preset place, or the start symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Start,
    Place(PlaceId),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Start => f.write_str(">"),
            Source::Place(p) => write!(f, "{p}"),
        }
    }
}

/// Names are printable in the net file format without escaping.
pub fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name == ">" || name == "->" || name.starts_with('.') || name.starts_with('#') {
        return Err(Error::Structural(format!("invalid element name {name:?}")));
    }
    if name.chars().any(|c| c.is_whitespace() || c == ':') {
        return Err(Error::Structural(format!("invalid element name {name:?}")));
    }
    Ok(())
}

/// Place/transition structure shared by nets with transits and nets with inhibitor arcs.
///
/// Places and transitions are kept sorted by name; indices into these vectors
/// are what the engine works with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtNet {
    places: Vec<PlaceId>,
    transitions: Vec<TransitionId>,
    pre: Vec<Vec<usize>>,
    post: Vec<Vec<usize>>,
    inhibitors: Vec<Vec<usize>>,
    initial: Vec<usize>,
    place_ix: HashMap<String, usize>,
    trans_ix: HashMap<String, usize>,
}

impl PtNet {
    pub fn places(&self) -> &[PlaceId] {
        &self.places
    }

    pub fn transitions(&self) -> &[TransitionId] {
        &self.transitions
    }

    pub fn place_index(&self, name: &str) -> Option<usize> {
        self.place_ix.get(name).copied()
    }

    pub fn transition_index(&self, name: &str) -> Option<usize> {
        self.trans_ix.get(name).copied()
    }

    pub fn pre(&self, t: usize) -> &[usize] {
        &self.pre[t]
    }

    pub fn post(&self, t: usize) -> &[usize] {
        &self.post[t]
    }

    pub fn inhibitors(&self, t: usize) -> &[usize] {
        &self.inhibitors[t]
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn initial_bits(&self) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.places.len());
        for &p in &self.initial {
            m.insert(p);
        }
        m
    }

    pub fn initial_marking(&self) -> Marking {
        Marking(self.initial.iter().map(|&p| self.places[p].clone()).collect())
    }

    pub fn enabled_bits(&self, m: &FixedBitSet, t: usize) -> bool {
        self.pre[t].iter().all(|&p| m.contains(p)) && self.inhibitors[t].iter().all(|&p| !m.contains(p))
    }

    /// Fires `t` on a bit marking. Returns the offending place on a 1-safety violation.
    pub fn fire_bits(&self, m: &FixedBitSet, t: usize) -> std::result::Result<FixedBitSet, usize> {
        let mut next = m.clone();
        for &p in &self.pre[t] {
            next.set(p, false);
        }
        for &p in &self.post[t] {
            if next.contains(p) {
                return Err(p);
            }
            next.insert(p);
        }
        Ok(next)
    }

    pub fn bits_of(&self, m: &Marking) -> Result<FixedBitSet> {
        let mut bits = FixedBitSet::with_capacity(self.places.len());
        for p in &m.0 {
            let i = self
                .place_index(p.as_str())
                .ok_or_else(|| Error::Structural(format!("unknown place {p}")))?;
            bits.insert(i);
        }
        Ok(bits)
    }

    pub fn marking_of(&self, bits: &FixedBitSet) -> Marking {
        Marking(bits.ones().map(|p| self.places[p].clone()).collect())
    }

    fn tindex(&self, t: &TransitionId) -> Result<usize> {
        self.transition_index(t.as_str())
            .ok_or_else(|| Error::Structural(format!("unknown transition {t}")))
    }
}

/// Gives uniform access to the P/T structure of a net.
pub trait NetStructure {
    fn pt(&self) -> &PtNet;
}

impl NetStructure for PtNet {
    fn pt(&self) -> &PtNet {
        self
    }
}

/// A set of occupied places.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(pub BTreeSet<PlaceId>);

impl Marking {
    pub fn new<I, S>(places: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Marking(places.into_iter().map(|s| PlaceId(s.into())).collect())
    }

    pub fn contains(&self, p: &str) -> bool {
        self.0.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PlaceId> {
        self.0.iter()
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// Whether `t` is enabled in `m`: preset marked and inhibitor places empty.
pub fn enabled<N: NetStructure>(net: &N, m: &Marking, t: &TransitionId) -> Result<bool> {
    let pt = net.pt();
    let ti = pt.tindex(t)?;
    Ok(pt.enabled_bits(&pt.bits_of(m)?, ti))
}

/// Fires `t` in `m`.
pub fn fire<N: NetStructure>(net: &N, m: &Marking, t: &TransitionId) -> Result<Marking> {
    let pt = net.pt();
    let ti = pt.tindex(t)?;
    let bits = pt.bits_of(m)?;
    if !pt.enabled_bits(&bits, ti) {
        return Err(Error::Firing {
            transition: t.to_string(),
            marking: m.to_string(),
        });
    }
    match pt.fire_bits(&bits, ti) {
        Ok(next) => Ok(pt.marking_of(&next)),
        Err(p) => Err(Error::Safety {
            place: pt.places[p].to_string(),
            witness: vec![t.to_string()],
        }),
    }
}

/// All enabled transitions of `m` with their successor markings, ordered by transition name.
pub fn successors<N: NetStructure>(net: &N, m: &Marking) -> Result<Vec<(TransitionId, Marking)>> {
    let pt = net.pt();
    let bits = pt.bits_of(m)?;
    let mut out = Vec::new();
    for t in 0..pt.transitions.len() {
        if pt.enabled_bits(&bits, t) {
            let next = pt.fire_bits(&bits, t).map_err(|p| Error::Safety {
                place: pt.places[p].to_string(),
                witness: vec![pt.transitions[t].to_string()],
            })?;
            out.push((pt.transitions[t].clone(), pt.marking_of(&next)));
        }
    }
    Ok(out)
}

const SAFETY_STATE_CAP: usize = 200_000;

/// Explores the reachable markings and reports the first 1-safety violation with a witness.
///
/// The exploration is a full fixpoint while the number of markings stays below an
/// internal cap; beyond the cap it stops at `depth_bound` layers.
pub fn validate_safe<N: NetStructure>(net: &N, depth_bound: usize) -> Result<()> {
    let pt = net.pt();
    let init = pt.initial_bits();
    let mut seen: HashMap<FixedBitSet, (usize, usize)> = HashMap::new();
    let mut order: Vec<FixedBitSet> = vec![init.clone()];
    seen.insert(init, (usize::MAX, usize::MAX));
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while let Some((idx, depth)) = queue.pop_front() {
        if order.len() > SAFETY_STATE_CAP && depth >= depth_bound {
            continue;
        }
        let m = order[idx].clone();
        for t in 0..pt.transitions.len() {
            if !pt.enabled_bits(&m, t) {
                continue;
            }
            match pt.fire_bits(&m, t) {
                Ok(next) => {
                    if !seen.contains_key(&next) {
                        seen.insert(next.clone(), (idx, t));
                        order.push(next);
                        queue.push_back((order.len() - 1, depth + 1));
                    }
                }
                Err(p) => {
                    let mut witness = vec![pt.transitions[t].to_string()];
                    let mut cur = &order[idx];
                    while let Some(&(parent, via)) = seen.get(cur) {
                        if parent == usize::MAX {
                            break;
                        }
                        witness.push(pt.transitions[via].to_string());
                        cur = &order[parent];
                    }
                    witness.reverse();
                    return Err(Error::Safety {
                        place: pt.places[p].to_string(),
                        witness,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Builder for P/T structure with optional transits, inhibitor arcs and fairness annotations.
#[derive(Debug, Clone, Default)]
pub struct NetBuilder {
    name: String,
    places: Vec<(String, bool)>,
    transitions: Vec<(String, bool)>,
    place_set: HashMap<String, usize>,
    trans_set: HashMap<String, usize>,
    arcs_in: BTreeSet<(usize, usize)>,
    arcs_out: BTreeSet<(usize, usize)>,
    inhibitor: BTreeSet<(usize, usize)>,
    transits: BTreeSet<(usize, Option<usize>, usize)>,
}

impl NetBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NetBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn has_place(&self, name: &str) -> bool {
        self.place_set.contains_key(name)
    }

    pub fn has_transition(&self, name: &str) -> bool {
        self.trans_set.contains_key(name)
    }

    pub fn place(&mut self, name: &str, initial: bool) -> Result<&mut Self> {
        check_name(name)?;
        if self.place_set.contains_key(name) || self.trans_set.contains_key(name) {
            return Err(Error::NameCollision(name.to_string()));
        }
        self.place_set.insert(name.to_string(), self.places.len());
        self.places.push((name.to_string(), initial));
        Ok(self)
    }

    pub fn transition(&mut self, name: &str, weak_fair: bool) -> Result<&mut Self> {
        check_name(name)?;
        if self.place_set.contains_key(name) || self.trans_set.contains_key(name) {
            return Err(Error::NameCollision(name.to_string()));
        }
        self.trans_set.insert(name.to_string(), self.transitions.len());
        self.transitions.push((name.to_string(), weak_fair));
        Ok(self)
    }

    pub fn set_initial(&mut self, place: &str, initial: bool) -> Result<&mut Self> {
        let p = self.p(place)?;
        self.places[p].1 = initial;
        Ok(self)
    }

    pub fn set_weak_fair(&mut self, t: &str, weak_fair: bool) -> Result<&mut Self> {
        let t = self.t(t)?;
        self.transitions[t].1 = weak_fair;
        Ok(self)
    }

    fn p(&self, name: &str) -> Result<usize> {
        self.place_set
            .get(name)
            .copied()
            .ok_or_else(|| Error::Structural(format!("unknown place {name}")))
    }

    fn t(&self, name: &str) -> Result<usize> {
        self.trans_set
            .get(name)
            .copied()
            .ok_or_else(|| Error::Structural(format!("unknown transition {name}")))
    }

    pub fn arc_in(&mut self, place: &str, t: &str) -> Result<&mut Self> {
        let (p, t) = (self.p(place)?, self.t(t)?);
        self.arcs_in.insert((t, p));
        Ok(self)
    }

    pub fn arc_out(&mut self, t: &str, place: &str) -> Result<&mut Self> {
        let (p, t) = (self.p(place)?, self.t(t)?);
        self.arcs_out.insert((t, p));
        Ok(self)
    }

    /// Preset and postset in one call.
    pub fn flow(&mut self, t: &str, pre: &[&str], post: &[&str]) -> Result<&mut Self> {
        for p in pre {
            self.arc_in(p, t)?;
        }
        for p in post {
            self.arc_out(t, p)?;
        }
        Ok(self)
    }

    /// Place in both preset and postset.
    pub fn read_arc(&mut self, place: &str, t: &str) -> Result<&mut Self> {
        self.arc_in(place, t)?;
        self.arc_out(t, place)
    }

    pub fn inhibitor(&mut self, place: &str, t: &str) -> Result<&mut Self> {
        let (p, t) = (self.p(place)?, self.t(t)?);
        self.inhibitor.insert((t, p));
        Ok(self)
    }

    /// Transit from `from` (None is the start symbol) to `to` on `t`.
    pub fn transit(&mut self, t: &str, from: Option<&str>, to: &str) -> Result<&mut Self> {
        let t = self.t(t)?;
        let from = from.map(|p| self.p(p)).transpose()?;
        let to = self.p(to)?;
        self.transits.insert((t, from, to));
        Ok(self)
    }

    fn build_pt(&self) -> (PtNet, Vec<usize>, Vec<usize>) {
        let mut porder: Vec<usize> = (0..self.places.len()).collect();
        porder.sort_by(|a, b| self.places[*a].0.cmp(&self.places[*b].0));
        let mut torder: Vec<usize> = (0..self.transitions.len()).collect();
        torder.sort_by(|a, b| self.transitions[*a].0.cmp(&self.transitions[*b].0));
        let mut pmap = vec![0; self.places.len()];
        for (new, &old) in porder.iter().enumerate() {
            pmap[old] = new;
        }
        let mut tmap = vec![0; self.transitions.len()];
        for (new, &old) in torder.iter().enumerate() {
            tmap[old] = new;
        }
        let nt = self.transitions.len();
        let mut pre = vec![Vec::new(); nt];
        let mut post = vec![Vec::new(); nt];
        let mut inhibitors = vec![Vec::new(); nt];
        for &(t, p) in &self.arcs_in {
            pre[tmap[t]].push(pmap[p]);
        }
        for &(t, p) in &self.arcs_out {
            post[tmap[t]].push(pmap[p]);
        }
        for &(t, p) in &self.inhibitor {
            inhibitors[tmap[t]].push(pmap[p]);
        }
        for v in pre.iter_mut().chain(post.iter_mut()).chain(inhibitors.iter_mut()) {
            v.sort_unstable();
        }
        let places: Vec<PlaceId> = porder.iter().map(|&i| PlaceId(self.places[i].0.clone())).collect();
        let transitions: Vec<TransitionId> =
            torder.iter().map(|&i| TransitionId(self.transitions[i].0.clone())).collect();
        let mut initial: Vec<usize> = (0..self.places.len())
            .filter(|&i| self.places[i].1)
            .map(|i| pmap[i])
            .collect();
        initial.sort_unstable();
        let place_ix = places.iter().enumerate().map(|(i, p)| (p.0.clone(), i)).collect();
        let trans_ix = transitions.iter().enumerate().map(|(i, t)| (t.0.clone(), i)).collect();
        (
            PtNet {
                places,
                transitions,
                pre,
                post,
                inhibitors,
                initial,
                place_ix,
                trans_ix,
            },
            pmap,
            tmap,
        )
    }

    /// Builds a net with transits; inhibitor arcs are rejected.
    pub fn build(&self) -> Result<PetriNetWithTransits> {
        if !self.inhibitor.is_empty() {
            return Err(Error::Structural("inhibitor arcs are not allowed in a net with transits".into()));
        }
        let (pt, pmap, tmap) = self.build_pt();
        let mut transits: Vec<Vec<(Option<usize>, usize)>> = vec![Vec::new(); pt.transitions.len()];
        for &(t, from, to) in &self.transits {
            let (ti, from, to) = (tmap[t], from.map(|p| pmap[p]), pmap[to]);
            if !pt.post[ti].contains(&to) {
                return Err(Error::Structural(format!(
                    "transit target {} is not in the postset of {}",
                    pt.places[to], pt.transitions[ti]
                )));
            }
            if let Some(f) = from {
                if !pt.pre[ti].contains(&f) {
                    return Err(Error::Structural(format!(
                        "transit source {} is not in the preset of {}",
                        pt.places[f], pt.transitions[ti]
                    )));
                }
            }
            transits[ti].push((from, to));
        }
        for v in transits.iter_mut() {
            v.sort_by(|a, b| {
                let key = |x: &(Option<usize>, usize)| (x.0.map(|p| p + 1).unwrap_or(0), x.1);
                key(a).cmp(&key(b))
            });
        }
        let mut weak_fair = vec![false; pt.transitions.len()];
        for (i, (_, wf)) in self.transitions.iter().enumerate() {
            weak_fair[tmap[i]] = *wf;
        }
        Ok(PetriNetWithTransits {
            name: self.name.clone(),
            pt,
            transits,
            weak_fair,
        })
    }

    /// Builds a plain P/T net that may carry inhibitor arcs; transits are rejected.
    pub fn build_pt_net(&self) -> Result<PtNet> {
        if !self.transits.is_empty() {
            return Err(Error::Structural("transits are not allowed in an inhibitor net".into()));
        }
        Ok(self.build_pt().0)
    }
}

/// A safe Petri net with a transit relation per transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNetWithTransits {
    name: String,
    pt: PtNet,
    transits: Vec<Vec<(Option<usize>, usize)>>,
    weak_fair: Vec<bool>,
}

impl NetStructure for PetriNetWithTransits {
    fn pt(&self) -> &PtNet {
        &self.pt
    }
}

impl PetriNetWithTransits {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn places(&self) -> &[PlaceId] {
        &self.pt.places
    }

    pub fn transitions(&self) -> &[TransitionId] {
        &self.pt.transitions
    }

    /// Transits of transition index `t` as (source, target) place indices; `None` is the start symbol.
    pub fn transits_ix(&self, t: usize) -> &[(Option<usize>, usize)] {
        &self.transits[t]
    }

    pub fn transits(&self, t: &str) -> Vec<(Source, PlaceId)> {
        let Some(ti) = self.pt.transition_index(t) else {
            return Vec::new();
        };
        self.transits[ti]
            .iter()
            .map(|&(s, q)| {
                let s = match s {
                    None => Source::Start,
                    Some(p) => Source::Place(self.pt.places[p].clone()),
                };
                (s, self.pt.places[q].clone())
            })
            .collect()
    }

    pub fn preset(&self, t: &str) -> BTreeSet<PlaceId> {
        self.pt
            .transition_index(t)
            .map(|ti| self.pt.pre[ti].iter().map(|&p| self.pt.places[p].clone()).collect())
            .unwrap_or_default()
    }

    pub fn postset(&self, t: &str) -> BTreeSet<PlaceId> {
        self.pt
            .transition_index(t)
            .map(|ti| self.pt.post[ti].iter().map(|&p| self.pt.places[p].clone()).collect())
            .unwrap_or_default()
    }

    pub fn is_weak_fair(&self, t: usize) -> bool {
        self.weak_fair[t]
    }

    pub fn weak_fair(&self) -> Vec<TransitionId> {
        (0..self.weak_fair.len())
            .filter(|&t| self.weak_fair[t])
            .map(|t| self.pt.transitions[t].clone())
            .collect()
    }

    pub fn initial_marking(&self) -> Marking {
        self.pt.initial_marking()
    }

    pub fn start_count(&self) -> usize {
        self.transits.iter().flatten().filter(|(s, _)| s.is_none()).count()
    }

    pub fn transit_count(&self) -> usize {
        self.transits.iter().flatten().filter(|(s, _)| s.is_some()).count()
    }

    /// Reconstructs a builder with the same content (used to derive variants of a net).
    pub fn to_builder(&self) -> NetBuilder {
        let pt = &self.pt;
        let mut b = NetBuilder::new(self.name.clone());
        let init: BTreeSet<usize> = pt.initial.iter().copied().collect();
        for (i, p) in pt.places.iter().enumerate() {
            b.place(p.as_str(), init.contains(&i)).expect("names already validated");
        }
        for (t, name) in pt.transitions.iter().enumerate() {
            b.transition(name.as_str(), self.weak_fair[t]).expect("names already validated");
            for &p in &pt.pre[t] {
                b.arc_in(pt.places[p].as_str(), name.as_str()).unwrap();
            }
            for &p in &pt.post[t] {
                b.arc_out(name.as_str(), pt.places[p].as_str()).unwrap();
            }
            for &(s, q) in &self.transits[t] {
                b.transit(name.as_str(), s.map(|p| pt.places[p].as_str()), pt.places[q].as_str())
                    .unwrap();
            }
        }
        b
    }
}

/// A firing sequence; `lasso_start` marks an ultimately periodic execution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiringSequence {
    pub steps: Vec<(Marking, TransitionId)>,
    pub final_marking: Marking,
    pub lasso_start: Option<usize>,
}

impl FiringSequence {
    pub fn empty(initial: Marking) -> Self {
        FiringSequence {
            steps: Vec::new(),
            final_marking: initial,
            lasso_start: None,
        }
    }

    /// Replays `transitions` from the initial marking of `net`.
    pub fn from_transitions<N: NetStructure>(net: &N, transitions: &[&str], lasso_start: Option<usize>) -> Result<Self> {
        let mut m = net.pt().initial_marking();
        let mut steps = Vec::new();
        for t in transitions {
            let t = TransitionId::from(*t);
            let next = fire(net, &m, &t)?;
            steps.push((m, t));
            m = next;
        }
        let seq = FiringSequence {
            steps,
            final_marking: m,
            lasso_start,
        };
        seq.validate(net)?;
        Ok(seq)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_lasso(&self) -> bool {
        self.lasso_start.is_some()
    }

    pub fn marking_at(&self, i: usize) -> &Marking {
        if i < self.steps.len() {
            &self.steps[i].0
        } else {
            &self.final_marking
        }
    }

    pub fn transitions(&self) -> Vec<TransitionId> {
        self.steps.iter().map(|(_, t)| t.clone()).collect()
    }

    /// Checks that the sequence replays on `net` from its initial marking.
    pub fn validate<N: NetStructure>(&self, net: &N) -> Result<()> {
        let pt = net.pt();
        let init = pt.initial_marking();
        let first = self.marking_at(0);
        if *first != init {
            return Err(Error::InvalidSequence(format!("starts in {first}, expected {init}")));
        }
        for (i, (m, t)) in self.steps.iter().enumerate() {
            let next = fire(net, m, t).map_err(|e| Error::InvalidSequence(format!("step {i}: {e}")))?;
            if next != *self.marking_at(i + 1) {
                return Err(Error::InvalidSequence(format!("step {i}: marking mismatch after {t}")));
            }
        }
        if let Some(l) = self.lasso_start {
            if l >= self.steps.len() {
                return Err(Error::InvalidSequence("empty lasso period".into()));
            }
            if self.steps[l].0 != self.final_marking {
                return Err(Error::InvalidSequence("lasso does not close".into()));
            }
        }
        Ok(())
    }

    /// Step index in the sequence for global time `g` of the (possibly unrolled) execution.
    pub fn position(&self, g: usize) -> usize {
        match self.lasso_start {
            Some(l) if g >= l => l + (g - l) % (self.steps.len() - l),
            _ => g,
        }
    }

    /// Transition fired at global time `g`, if any.
    pub fn transition_at(&self, g: usize) -> Option<&TransitionId> {
        let i = self.position(g);
        if self.lasso_start.is_none() && g >= self.steps.len() {
            None
        } else {
            self.steps.get(i).map(|(_, t)| t)
        }
    }

    /// The shortest equivalent representation: minimal prefix and primitive period.
    pub fn canonical(&self) -> FiringSequence {
        let Some(mut l) = self.lasso_start else {
            return self.clone();
        };
        let mut steps = self.steps.clone();
        // primitive period
        let p = steps.len() - l;
        for d in 1..=p {
            if p.is_multiple_of(d) && (0..p).all(|k| steps[l + k] == steps[l + (k + d) % p]) {
                steps.truncate(l + d);
                break;
            }
        }
        // roll the period back into the prefix as far as possible
        while l > 0 && steps[l - 1] == steps[steps.len() - 1] {
            steps.pop();
            l -= 1;
        }
        let final_marking = steps[l].0.clone();
        FiringSequence {
            steps,
            final_marking,
            lasso_start: Some(l),
        }
    }
}

impl fmt::Display for FiringSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, t)) in self.steps.iter().enumerate() {
            if Some(i) == self.lasso_start {
                writeln!(f, "  -- loop --")?;
            }
            writeln!(f, "  {m} --{t}-->")?;
        }
        match self.lasso_start {
            Some(l) => writeln!(f, "  back to step {l}"),
            None => writeln!(f, "  {} (stutter)", self.final_marking),
        }
    }
}
