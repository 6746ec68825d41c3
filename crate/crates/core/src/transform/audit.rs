use std::collections::BTreeSet;

use super::{chain_end_pairs, naming, InhibitorNet};
use crate::net::{NetStructure, PetriNetWithTransits};

/// Outcome of checking one construction constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintCheck {
    pub name: &'static str,
    pub violations: Vec<String>,
}

impl ConstraintCheck {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

struct View<'a> {
    tnet: &'a InhibitorNet,
}

impl View<'_> {
    fn has_place(&self, p: &str) -> bool {
        self.tnet.pt().place_index(p).is_some()
    }

    fn has_transition(&self, t: &str) -> bool {
        self.tnet.pt().transition_index(t).is_some()
    }

    fn names(&self, ix: &[usize]) -> BTreeSet<String> {
        ix.iter().map(|&p| self.tnet.pt().places()[p].to_string()).collect()
    }

    fn pre(&self, t: &str) -> BTreeSet<String> {
        self.tnet.pt().transition_index(t).map(|t| self.names(self.tnet.pt().pre(t))).unwrap_or_default()
    }

    fn post(&self, t: &str) -> BTreeSet<String> {
        self.tnet.pt().transition_index(t).map(|t| self.names(self.tnet.pt().post(t))).unwrap_or_default()
    }

    fn inhibitors(&self, t: &str) -> BTreeSet<String> {
        self.tnet
            .pt()
            .transition_index(t)
            .map(|t| self.names(self.tnet.pt().inhibitors(t)))
            .unwrap_or_default()
    }

    fn labelled(&self, name: &str, label: &str) -> bool {
        self.tnet.lambda(name) == Some(label)
    }
}

/// Checks the reduced net against every construction constraint, quantified as stated,
/// using only element names, the arcs of `tnet` and its labelling.
///
/// The last check verifies that no undemanded element or arc is present apart from
/// the chain-end elements for transitions consuming a chain place without a transit.
pub fn audit(net: &PetriNetWithTransits, tnet: &InhibitorNet) -> Vec<ConstraintCheck> {
    let v = View { tnet };
    let n = tnet.subnets();
    let pt = net.pt();
    let places: Vec<&str> = pt.places().iter().map(|p| p.as_str()).collect();
    let transitions: Vec<&str> = pt.transitions().iter().map(|t| t.as_str()).collect();
    let pre = |t: usize| -> Vec<&str> { pt.pre(t).iter().map(|&p| places[p]).collect() };
    let post = |t: usize| -> Vec<&str> { pt.post(t).iter().map(|&p| places[p]).collect() };
    let subnets = 1..=n;
    let mut out = Vec::new();
    let mut check = |name: &'static str, f: &mut dyn FnMut(&mut Vec<String>)| {
        let mut violations = Vec::new();
        f(&mut violations);
        out.push(ConstraintCheck { name, violations });
    };

    check("o", &mut |bad| {
        for &p in &places {
            if !v.has_place(p) || !v.labelled(p, p) {
                bad.push(format!("original place {p} missing or mislabelled"));
            }
        }
        for (t, &tn) in transitions.iter().enumerate() {
            if !v.has_transition(tn) || !v.labelled(tn, tn) {
                bad.push(format!("original transition {tn} missing or mislabelled"));
                continue;
            }
            let (tp, tq) = (v.pre(tn), v.post(tn));
            if !pre(t).iter().all(|p| tp.contains(*p)) || !post(t).iter().all(|p| tq.contains(*p)) {
                bad.push(format!("flows of {tn} not copied"));
            }
        }
    });
    check("s1", &mut |bad| {
        for i in subnets.clone() {
            for &p in &places {
                let c = naming::copy(p, i);
                if !v.has_place(&c) || !v.labelled(&c, p) {
                    bad.push(format!("copy {c} missing or mislabelled"));
                }
            }
        }
    });
    check("s2", &mut |bad| {
        for i in subnets.clone() {
            if !v.has_place(&naming::init(i)) {
                bad.push(format!("{} missing", naming::init(i)));
            }
        }
    });
    check("s3", &mut |bad| {
        for i in subnets.clone() {
            for (t, &tn) in transitions.iter().enumerate() {
                for &(s, q) in net.transits_ix(t) {
                    if s.is_some() {
                        continue;
                    }
                    let x = naming::start(tn, places[q], i);
                    let ok = v.has_transition(&x)
                        && v.pre(&x).contains(&naming::init(i))
                        && v.post(&x).contains(&naming::copy(places[q], i))
                        && v.labelled(&x, tn);
                    if !ok {
                        bad.push(format!("start transition {x} missing or miswired"));
                    }
                }
            }
        }
    });
    check("s4", &mut |bad| {
        for i in subnets.clone() {
            for (t, &tn) in transitions.iter().enumerate() {
                for &(s, q) in net.transits_ix(t) {
                    let Some(p) = s else { continue };
                    let x = naming::transit(tn, places[p], places[q], i);
                    let ok = v.has_transition(&x)
                        && v.pre(&x).contains(&naming::copy(places[p], i))
                        && v.post(&x).contains(&naming::copy(places[q], i))
                        && v.labelled(&x, tn);
                    if !ok {
                        bad.push(format!("transit transition {x} missing or miswired"));
                    }
                }
            }
        }
    });
    check("s5", &mut |bad| {
        for i in subnets.clone() {
            for (t, &tn) in transitions.iter().enumerate() {
                let x = naming::skip(tn, i);
                let inh = v.inhibitors(&x);
                let ok = v.has_transition(&x)
                    && pre(t).iter().all(|p| inh.contains(&naming::copy(p, i)))
                    && v.labelled(&x, tn);
                if !ok {
                    bad.push(format!("skip transition {x} missing or miswired"));
                }
            }
        }
    });
    check("a", &mut |bad| {
        if !v.has_place(&naming::act_o()) {
            bad.push("act@o missing".into());
        }
        for i in subnets.clone() {
            for &tn in &transitions {
                if !v.has_place(&naming::act(tn, i)) {
                    bad.push(format!("{} missing", naming::act(tn, i)));
                }
            }
        }
    });
    check("mO", &mut |bad| {
        for &tn in &transitions {
            let target = if n == 0 { naming::act_o() } else { naming::act(tn, 1) };
            if !v.pre(tn).contains(&naming::act_o()) || !v.post(tn).contains(&target) {
                bad.push(format!("{tn} does not pass the activation token on"));
            }
        }
    });
    // transitions of subnet i labelled t, identified through the labelling and the name suffix
    let subnet_transitions = |i: usize, label: &str| -> Vec<String> {
        tnet.pt()
            .transitions()
            .iter()
            .map(|t| t.to_string())
            .filter(|t| t.ends_with(&format!("#{i}")) && t.contains('@') && tnet.lambda(t) == Some(label))
            .collect()
    };
    check("mSi", &mut |bad| {
        for i in 1..n {
            for &tn in &transitions {
                for x in subnet_transitions(i, tn) {
                    if !v.pre(&x).contains(&naming::act(tn, i)) || !v.post(&x).contains(&naming::act(tn, i + 1)) {
                        bad.push(format!("{x} does not pass the activation token to subnet {}", i + 1));
                    }
                }
            }
        }
    });
    check("mSn", &mut |bad| {
        if n == 0 {
            return;
        }
        for &tn in &transitions {
            for x in subnet_transitions(n, tn) {
                if !v.pre(&x).contains(&naming::act(tn, n)) || !v.post(&x).contains(&naming::act_o()) {
                    bad.push(format!("{x} does not return the activation token"));
                }
            }
        }
    });
    check("in", &mut |bad| {
        let mut expected: BTreeSet<String> = pt.initial().iter().map(|&p| places[p].to_string()).collect();
        expected.insert(naming::act_o());
        expected.extend(subnets.clone().map(naming::init));
        let actual = v.names(tnet.pt().initial());
        if actual != expected {
            bad.push(format!("initial marking {actual:?}, expected {expected:?}"));
        }
    });
    check("smallest", &mut |bad| {
        // demanded arcs per transition: (pre, post, inhibitors)
        let mut want: std::collections::BTreeMap<String, (BTreeSet<String>, BTreeSet<String>, BTreeSet<String>)> =
            Default::default();
        let mut want_places: BTreeSet<String> = places.iter().map(|p| p.to_string()).collect();
        want_places.insert(naming::act_o());
        let set = |v: Vec<String>| v.into_iter().collect::<BTreeSet<String>>();
        for (t, &tn) in transitions.iter().enumerate() {
            let mut p: Vec<String> = pre(t).iter().map(|s| s.to_string()).collect();
            p.push(naming::act_o());
            let mut q: Vec<String> = post(t).iter().map(|s| s.to_string()).collect();
            q.push(if n == 0 { naming::act_o() } else { naming::act(tn, 1) });
            want.insert(tn.to_string(), (set(p), set(q), BTreeSet::new()));
        }
        let ends = chain_end_pairs(net);
        for i in subnets.clone() {
            want_places.extend(places.iter().map(|p| naming::copy(p, i)));
            want_places.insert(naming::init(i));
            want_places.extend(transitions.iter().map(|t| naming::act(t, i)));
            want_places.extend(ends.iter().map(|&(_, p)| naming::ended(places[p], i)));
            for (t, &tn) in transitions.iter().enumerate() {
                let here = naming::act(tn, i);
                let next = if i == n { naming::act_o() } else { naming::act(tn, i + 1) };
                for &(s, q) in net.transits_ix(t) {
                    let (name, from) = match s {
                        None => (naming::start(tn, places[q], i), naming::init(i)),
                        Some(p) => (naming::transit(tn, places[p], places[q], i), naming::copy(places[p], i)),
                    };
                    want.insert(
                        name,
                        (set(vec![here.clone(), from]), set(vec![next.clone(), naming::copy(places[q], i)]), BTreeSet::new()),
                    );
                }
                want.insert(
                    naming::skip(tn, i),
                    (
                        set(vec![here.clone()]),
                        set(vec![next.clone()]),
                        pre(t).iter().map(|p| naming::copy(p, i)).collect(),
                    ),
                );
                for &(_, p) in ends.iter().filter(|(et, _)| *et == t) {
                    want.insert(
                        naming::end(tn, places[p], i),
                        (
                            set(vec![here.clone(), naming::copy(places[p], i)]),
                            set(vec![next.clone(), naming::ended(places[p], i)]),
                            BTreeSet::new(),
                        ),
                    );
                }
            }
        }
        let have_places = v.names(&(0..tnet.pt().places().len()).collect::<Vec<_>>());
        if have_places != want_places {
            let extra: Vec<_> = have_places.difference(&want_places).collect();
            let missing: Vec<_> = want_places.difference(&have_places).collect();
            bad.push(format!("place set differs: extra {extra:?}, missing {missing:?}"));
        }
        let have: BTreeSet<String> = tnet.pt().transitions().iter().map(|t| t.to_string()).collect();
        let wanted: BTreeSet<String> = want.keys().cloned().collect();
        if have != wanted {
            let extra: Vec<_> = have.difference(&wanted).collect();
            let missing: Vec<_> = wanted.difference(&have).collect();
            bad.push(format!("transition set differs: extra {extra:?}, missing {missing:?}"));
        }
        for (t, (p, q, inh)) in &want {
            if v.has_transition(t) && (v.pre(t) != *p || v.post(t) != *q || v.inhibitors(t) != *inh) {
                bad.push(format!("arcs of {t} differ from the demanded ones"));
            }
        }
    });
    out
}
