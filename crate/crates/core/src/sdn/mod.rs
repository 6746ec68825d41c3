//! Software-defined networks as nets with transits: topologies and forwarding
//! configurations become the data plane, concurrent update programs the control
//! plane, and the usual data-flow requirements become Flow-LTL formulas.

mod syntax;

pub use syntax::{parse_config, parse_topology, parse_update};

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::ltl::{FlowLtlFormula, LtlFormula};
use crate::net::{NetBuilder, PetriNetWithTransits};

/// Place holding the token of switch `x`.
pub fn switch_place(x: &str) -> String {
    format!("sw_{x}")
}

/// Place marked while switch `x` forwards to `y`.
pub fn rule_place(x: &str, y: &str) -> String {
    format!("{x}.fwd({y})")
}

/// Transition forwarding packets from `x` to `y`.
pub fn fwd_transition(x: &str, y: &str) -> String {
    format!("fwd({x},{y})")
}

/// Transition letting packets enter at `x`.
pub fn ingress_transition(x: &str) -> String {
    format!("ingress_{x}")
}

/// Transition performing the switch update `upd(x.fwd(z))`.
pub fn update_transition(x: &str, z: &str) -> String {
    format!("upd({x}.fwd({z}))")
}

/// Undirected, connected switch graph; connections are stored in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub switches: BTreeSet<String>,
    pub connections: BTreeSet<(String, String)>,
}

impl Topology {
    pub fn new(switches: Vec<String>, connections: Vec<(String, String)>) -> Result<Self> {
        let switches = syntax::unique(switches, "switches")?;
        if switches.is_empty() {
            return Err(Error::Sdn("topology has no switches".into()));
        }
        let mut cons = BTreeSet::new();
        for (a, b) in connections {
            for s in [&a, &b] {
                if !switches.contains(s) {
                    return Err(Error::Sdn(format!("connection mentions unknown switch {s}")));
                }
            }
            if a == b {
                return Err(Error::Sdn(format!("switch {a} is connected to itself")));
            }
            cons.insert((b.clone(), a.clone()));
            cons.insert((a, b));
        }
        if switches.len() > 1 && cons.is_empty() {
            return Err(Error::Sdn("topology has no connections".into()));
        }
        let top = Topology {
            switches,
            connections: cons,
        };
        let first = top.switches.iter().next().unwrap().clone();
        let mut seen = BTreeSet::from([first.clone()]);
        let mut queue = VecDeque::from([first]);
        while let Some(s) = queue.pop_front() {
            for (_, b) in top.connections.range((s.clone(), String::new())..).take_while(|(a, _)| *a == s) {
                if seen.insert(b.clone()) {
                    queue.push_back(b.clone());
                }
            }
        }
        if seen.len() != top.switches.len() {
            return Err(Error::Sdn("topology is not connected".into()));
        }
        Ok(top)
    }

    pub fn connected(&self, x: &str, y: &str) -> bool {
        self.connections.contains(&(x.to_string(), y.to_string()))
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sw: Vec<&str> = self.switches.iter().map(|s| s.as_str()).collect();
        writeln!(f, "switches = {{{}}};", sw.join(", "))?;
        let cons: Vec<String> = self
            .connections
            .iter()
            .filter(|(a, b)| a < b)
            .map(|(a, b)| format!("{a} - {b}"))
            .collect();
        writeln!(f, "connections = {{{}}};", cons.join(", "))
    }
}

/// Ingress and egress switches with a deterministic forwarding map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub ingress: BTreeSet<String>,
    pub egress: BTreeSet<String>,
    pub forwarding: BTreeMap<String, String>,
}

impl Config {
    pub fn new(ingress: Vec<String>, egress: Vec<String>, forwarding: BTreeMap<String, String>) -> Result<Self> {
        let ingress = syntax::unique(ingress, "ingress")?;
        let egress = syntax::unique(egress, "egress")?;
        if ingress.is_empty() {
            return Err(Error::Sdn("no ingress switch".into()));
        }
        if egress.is_empty() {
            return Err(Error::Sdn("no egress switch".into()));
        }
        if let Some(s) = ingress.intersection(&egress).next() {
            return Err(Error::Sdn(format!("switch {s} is both ingress and egress")));
        }
        Ok(Config {
            ingress,
            egress,
            forwarding,
        })
    }

    /// Checks that every switch exists and every rule follows a connection.
    pub fn validate(&self, top: &Topology) -> Result<()> {
        for s in self.ingress.iter().chain(&self.egress) {
            if !top.switches.contains(s) {
                return Err(Error::Sdn(format!("unknown switch {s} in the configuration")));
            }
        }
        for (x, y) in &self.forwarding {
            if !top.connected(x, y) {
                return Err(Error::Sdn(format!("rule {} does not follow a connection", rule_place(x, y))));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &BTreeSet<String>| s.iter().map(|x| x.as_str()).collect::<Vec<_>>().join(", ");
        writeln!(f, "ingress = {{{}}};", set(&self.ingress))?;
        for (x, y) in &self.forwarding {
            writeln!(f, "{};", rule_place(x, y))?;
        }
        writeln!(f, "egress = {{{}}};", set(&self.egress))
    }
}

/// Concurrent update of forwarding rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UpdateProgram {
    Switch { switch: String, target: String },
    Sequential(Vec<UpdateProgram>),
    Parallel(Vec<UpdateProgram>),
}

impl UpdateProgram {
    pub fn switch_updates(&self) -> Vec<(&str, &str)> {
        match self {
            UpdateProgram::Switch { switch, target } => vec![(switch.as_str(), target.as_str())],
            UpdateProgram::Sequential(v) | UpdateProgram::Parallel(v) => {
                v.iter().flat_map(|u| u.switch_updates()).collect()
            }
        }
    }

    fn check_single_updates(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (x, _) in self.switch_updates() {
            if !seen.insert(x) {
                return Err(Error::Sdn(format!("switch {x} is updated twice")));
            }
        }
        Ok(())
    }

    /// Checks single updates per switch and that every new rule follows a connection.
    pub fn validate(&self, top: &Topology) -> Result<()> {
        self.check_single_updates()?;
        for (x, z) in self.switch_updates() {
            if !top.connected(x, z) {
                return Err(Error::Sdn(format!("update {} does not follow a connection", update_transition(x, z))));
            }
        }
        Ok(())
    }
}

impl fmt::Display for UpdateProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, v: &[UpdateProgram], op: &str| -> fmt::Result {
            f.write_str("(")?;
            for (k, u) in v.iter().enumerate() {
                if k > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{u}")?;
            }
            f.write_str(")")
        };
        match self {
            UpdateProgram::Switch { switch, target } => write!(f, "{}", update_transition(switch, target)),
            UpdateProgram::Sequential(v) => list(f, v, ">>"),
            UpdateProgram::Parallel(v) => list(f, v, "||"),
        }
    }
}

/// Data plane: switch places, rule places for both directions of every connection,
/// forwarding and ingress transitions that keep their tokens and move data flows.
pub fn encode_data_plane(top: &Topology, cfg: &Config) -> Result<PetriNetWithTransits> {
    cfg.validate(top)?;
    let mut b = NetBuilder::new("data_plane");
    for s in &top.switches {
        b.place(&switch_place(s), true)?;
    }
    for (x, y) in &top.connections {
        let marked = cfg.forwarding.get(x) == Some(y);
        b.place(&rule_place(x, y), marked)?;
    }
    for (x, y) in &top.connections {
        let t = fwd_transition(x, y);
        let (sx, sy, r) = (switch_place(x), switch_place(y), rule_place(x, y));
        b.transition(&t, true)?;
        b.flow(&t, &[&sx, &sy, &r], &[&sx, &sy, &r])?;
        b.transit(&t, Some(&sx), &sy)?;
        b.transit(&t, Some(&sy), &sy)?;
    }
    for x in &cfg.ingress {
        let t = ingress_transition(x);
        let sx = switch_place(x);
        b.transition(&t, true)?;
        b.flow(&t, &[&sx], &[&sx])?;
        b.transit(&t, None, &sx)?;
        b.transit(&t, Some(&sx), &sx)?;
    }
    b.build()
}

struct ControlBuilder<'a> {
    b: NetBuilder,
    cfg: &'a Config,
    counter: usize,
}

impl ControlBuilder<'_> {
    /// Adds the node and returns its start and finish places.
    fn node(&mut self, u: &UpdateProgram, label: Option<String>) -> Result<(String, String)> {
        let label = match (label, u) {
            (Some(l), _) => l,
            (None, UpdateProgram::Switch { switch, target }) => update_transition(switch, target),
            (None, UpdateProgram::Sequential(_)) => {
                self.counter += 1;
                format!("seq{}", self.counter)
            }
            (None, UpdateProgram::Parallel(_)) => {
                self.counter += 1;
                format!("par{}", self.counter)
            }
        };
        let (start, finish) = (format!("{label}_start"), format!("{label}_finish"));
        self.b.place(&start, false)?;
        self.b.place(&finish, false)?;
        match u {
            UpdateProgram::Switch { switch, target } => {
                let t = update_transition(switch, target);
                let new_rule = rule_place(switch, target);
                self.ensure_rule(&new_rule)?;
                self.b.transition(&t, true)?;
                self.b.arc_in(&start, &t)?;
                self.b.arc_out(&t, &finish)?;
                self.b.arc_out(&t, &new_rule)?;
                if let Some(y) = self.cfg.forwarding.get(switch) {
                    let old = rule_place(switch, y);
                    self.ensure_rule(&old)?;
                    self.b.arc_in(&old, &t)?;
                }
            }
            UpdateProgram::Sequential(items) => {
                let subs = items
                    .iter()
                    .map(|s| self.node(s, None))
                    .collect::<Result<Vec<_>>>()?;
                let n = subs.len();
                for k in 0..=n {
                    let t = format!("{label}.{k}");
                    self.b.transition(&t, true)?;
                    let from = if k == 0 { &start } else { &subs[k - 1].1 };
                    let to = if k == n { &finish } else { &subs[k].0 };
                    self.b.arc_in(from, &t)?;
                    self.b.arc_out(&t, to)?;
                }
            }
            UpdateProgram::Parallel(items) => {
                let subs = items
                    .iter()
                    .map(|s| self.node(s, None))
                    .collect::<Result<Vec<_>>>()?;
                let (open, close) = (format!("{label}.open"), format!("{label}.close"));
                self.b.transition(&open, true)?;
                self.b.transition(&close, true)?;
                self.b.arc_in(&start, &open)?;
                self.b.arc_out(&close, &finish)?;
                for (s, f) in &subs {
                    self.b.arc_out(&open, s)?;
                    self.b.arc_in(f, &close)?;
                }
            }
        }
        Ok((start, finish))
    }

    fn ensure_rule(&mut self, place: &str) -> Result<()> {
        if !self.b.has_place(place) {
            let marked = self.cfg.forwarding.iter().any(|(x, y)| rule_place(x, y) == place);
            self.b.place(place, marked)?;
        }
        Ok(())
    }
}

/// Label of the outermost update node; its start place carries the initial token.
pub const UPDATE_ROOT: &str = "update";

/// Control plane: one token walks through start and finish places of the update
/// tree, parallel updates fork and join it, and switch updates move rule tokens.
pub fn encode_control_plane(upd: &UpdateProgram, cfg: &Config) -> Result<PetriNetWithTransits> {
    upd.check_single_updates()?;
    let mut cb = ControlBuilder {
        b: NetBuilder::new("control_plane"),
        cfg,
        counter: 0,
    };
    let (start, _) = cb.node(upd, Some(UPDATE_ROOT.to_string()))?;
    cb.b.set_initial(&start, true)?;
    cb.b.build()
}

/// Union of two nets; elements with equal names are shared and marked if marked in either.
pub fn compose(a: &PetriNetWithTransits, b: &PetriNetWithTransits) -> Result<PetriNetWithTransits> {
    let mut out = a.to_builder();
    out.set_name(format!("{}+{}", a.name(), b.name()));
    let init = b.initial_marking();
    for p in b.places() {
        if out.has_place(p.as_str()) {
            if init.contains(p.as_str()) {
                out.set_initial(p.as_str(), true)?;
            }
        } else {
            out.place(p.as_str(), init.contains(p.as_str()))?;
        }
    }
    for (ti, t) in b.transitions().iter().enumerate() {
        let t = t.as_str();
        if !out.has_transition(t) {
            out.transition(t, b.is_weak_fair(ti))?;
        }
        for p in b.preset(t) {
            out.arc_in(p.as_str(), t)?;
        }
        for p in b.postset(t) {
            out.arc_out(t, p.as_str())?;
        }
        for (from, to) in b.transits(t) {
            let from = match &from {
                crate::net::Source::Start => None,
                crate::net::Source::Place(p) => Some(p.as_str()),
            };
            out.transit(t, from, to.as_str())?;
        }
    }
    out.build()
}

/// The full network model; without an update only the configuration is modelled.
pub fn encode_network(top: &Topology, cfg: &Config, upd: Option<&UpdateProgram>) -> Result<PetriNetWithTransits> {
    let data = encode_data_plane(top, cfg)?;
    let mut net = match upd {
        None => data,
        Some(u) => {
            u.validate(top)?;
            compose(&data, &encode_control_plane(u, cfg)?)?
        }
    };
    let mut b = net.to_builder();
    b.set_name("network");
    net = b.build()?;
    Ok(net)
}

fn any_switch(set: &BTreeSet<String>) -> LtlFormula {
    LtlFormula::disj(set.iter().map(|s| LtlFormula::atom(switch_place(s))))
}

/// Every flow eventually reaches an egress switch: `A F ⋁ egress`.
pub fn spec_connectivity(egress: &BTreeSet<String>) -> FlowLtlFormula {
    FlowLtlFormula::flow(LtlFormula::eventually(any_switch(egress)))
}

/// No flow returns to a non-egress switch it has left: `A G ⋀ (s -> (s U G !s))`.
pub fn spec_loop_freedom(switches: &BTreeSet<String>, egress: &BTreeSet<String>) -> FlowLtlFormula {
    use LtlFormula as L;
    let body = L::conj(switches.difference(egress).map(|s| {
        let a = L::atom(switch_place(s));
        L::implies(a.clone(), L::until(a.clone(), L::always(L::not(a))))
    }));
    FlowLtlFormula::flow(L::always(body))
}

/// Flows away from the egress switches keep being forwarded: `A G (⋀ !e -> ⋁ f)`.
pub fn spec_drop_freedom(egress: &BTreeSet<String>, fwd: &BTreeSet<String>) -> Result<FlowLtlFormula> {
    use LtlFormula as L;
    if fwd.is_empty() {
        return Err(Error::Argument("drop freedom needs forwarding transitions".into()));
    }
    let away = L::conj(egress.iter().map(|e| L::not(L::atom(switch_place(e)))));
    let moved = L::disj(fwd.iter().map(L::atom));
    Ok(FlowLtlFormula::flow(L::always(L::implies(away, moved))))
}

/// Every flow stays on one of two paths: `A (G ⋁ path1 || G ⋁ path2)`.
pub fn spec_packet_coherence(path1: &BTreeSet<String>, path2: &BTreeSet<String>) -> FlowLtlFormula {
    use LtlFormula as L;
    FlowLtlFormula::flow(L::or(L::always(any_switch(path1)), L::always(any_switch(path2))))
}

/// Forwarding and ingress transitions of a data plane.
pub fn forwarding_transitions(top: &Topology, cfg: &Config) -> BTreeSet<String> {
    top.connections
        .iter()
        .map(|(x, y)| fwd_transition(x, y))
        .chain(cfg.ingress.iter().map(|x| ingress_transition(x)))
        .collect()
}

/// Run assumptions expressible over a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    WeakFair,
    StrongFair,
    InterleavingMax,
    ConcurrencyMax,
}

fn pre_formula(net: &PetriNetWithTransits, t: &str) -> LtlFormula {
    LtlFormula::conj(net.preset(t).iter().map(|p| LtlFormula::atom(p.as_str())))
}

/// The run formula for `kind`; fairness ranges over the weak-fair transitions.
pub fn run_assumptions(net: &PetriNetWithTransits, kind: Assumption) -> LtlFormula {
    use LtlFormula as L;
    let all: Vec<&str> = net.transitions().iter().map(|t| t.as_str()).collect();
    let fair: Vec<String> = net.weak_fair().iter().map(|t| t.to_string()).collect();
    match kind {
        Assumption::WeakFair => L::conj(fair.iter().map(|t| {
            L::implies(
                L::eventually(L::always(pre_formula(net, t))),
                L::always(L::eventually(L::atom(t.as_str()))),
            )
        })),
        Assumption::StrongFair => L::conj(fair.iter().map(|t| {
            L::implies(
                L::always(L::eventually(pre_formula(net, t))),
                L::always(L::eventually(L::atom(t.as_str()))),
            )
        })),
        Assumption::InterleavingMax => L::always(L::implies(
            L::disj(all.iter().map(|t| pre_formula(net, t))),
            L::disj(all.iter().map(|t| L::atom(*t))),
        )),
        Assumption::ConcurrencyMax => L::conj(all.iter().map(|t| {
            let pre = net.preset(t);
            let sharing: BTreeSet<&str> = all
                .iter()
                .copied()
                .filter(|u| net.preset(u).iter().any(|p| pre.contains(p)))
                .collect();
            L::implies(
                L::eventually(L::always(pre_formula(net, t))),
                L::always(L::eventually(L::disj(sharing.into_iter().map(L::atom)))),
            )
        })),
    }
}

/// `assumption -> spec`, the usual shape of a verification query.
pub fn verification_query(net: &PetriNetWithTransits, kind: Assumption, spec: FlowLtlFormula) -> FlowLtlFormula {
    FlowLtlFormula::implies(run_assumptions(net, kind), spec)
}

/// The five-switch network whose update has to reroute `x` to `y` only after `y` forwards to `d`.
pub const EXAMPLE_TOPOLOGY: &str = "switches = {u, v, x, y, d};\nconnections = {v - u, v - x, u - x, d - y, d - x, y - x};\n";

/// Forwarding before the update.
pub const EXAMPLE_CONFIG: &str = "ingress = {v};\nv.fwd(u);\nu.fwd(x);\nx.fwd(d);\ny.fwd(x);\negress = {d};\n";

/// Update that reroutes `y` before `x`.
pub const EXAMPLE_UPDATE: &str = "(upd(y.fwd(d)) >> upd(x.fwd(y))) || upd(v.fwd(x))";

/// Update that reroutes `x` before `y`, which can send packets around `x` and `y` forever.
pub const EXAMPLE_UPDATE_WRONG_ORDER: &str = "(upd(x.fwd(y)) >> upd(y.fwd(d))) || upd(v.fwd(x))";
