use std::collections::{BTreeSet, HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::ltl::LtlFormula;
use crate::trace::Trace;

/// Propositional constraint over atom indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prop {
    True,
    False,
    Lit(usize, bool),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

impl Prop {
    pub fn eval(&self, atom: &dyn Fn(usize) -> bool) -> bool {
        match self {
            Prop::True => true,
            Prop::False => false,
            Prop::Lit(a, pos) => atom(*a) == *pos,
            Prop::And(v) => v.iter().all(|p| p.eval(atom)),
            Prop::Or(v) => v.iter().any(|p| p.eval(atom)),
        }
    }

    fn assign(&self, a: usize, val: bool) -> Prop {
        match self {
            Prop::Lit(b, pos) if *b == a => {
                if val == *pos {
                    Prop::True
                } else {
                    Prop::False
                }
            }
            Prop::And(v) => prop_and(v.iter().map(|p| p.assign(a, val)).collect()),
            Prop::Or(v) => prop_or(v.iter().map(|p| p.assign(a, val)).collect()),
            p => p.clone(),
        }
    }

    fn first_atom(&self) -> Option<usize> {
        match self {
            Prop::Lit(a, _) => Some(*a),
            Prop::And(v) | Prop::Or(v) => v.iter().find_map(|p| p.first_atom()),
            _ => None,
        }
    }

    fn negate(&self) -> Prop {
        match self {
            Prop::True => Prop::False,
            Prop::False => Prop::True,
            Prop::Lit(a, pos) => Prop::Lit(*a, !pos),
            Prop::And(v) => prop_or(v.iter().map(|p| p.negate()).collect()),
            Prop::Or(v) => prop_and(v.iter().map(|p| p.negate()).collect()),
        }
    }
}

fn prop_and(v: Vec<Prop>) -> Prop {
    let mut out = Vec::new();
    for p in v {
        match p {
            Prop::True => {}
            Prop::False => return Prop::False,
            Prop::And(w) => out.extend(w),
            p => out.push(p),
        }
    }
    match out.len() {
        0 => Prop::True,
        1 => out.pop().unwrap(),
        _ => Prop::And(out),
    }
}

fn prop_or(v: Vec<Prop>) -> Prop {
    let mut out = Vec::new();
    for p in v {
        match p {
            Prop::False => {}
            Prop::True => return Prop::True,
            Prop::Or(w) => out.extend(w),
            p => out.push(p),
        }
    }
    match out.len() {
        0 => Prop::False,
        1 => out.pop().unwrap(),
        _ => Prop::Or(out),
    }
}

const SAT_BUDGET: usize = 4_096;

/// Satisfiability of a conjunction by case splitting. Answers `true` when the
/// budget runs out, which only costs pruning opportunities.
fn satisfiable(props: Vec<Prop>, budget: &mut usize) -> bool {
    let p = prop_and(props);
    sat_rec(p, budget)
}

fn sat_rec(p: Prop, budget: &mut usize) -> bool {
    match p {
        Prop::True => true,
        Prop::False => false,
        p => {
            if *budget == 0 {
                return true;
            }
            *budget -= 1;
            let a = p.first_atom().expect("non-constant proposition mentions an atom");
            sat_rec(p.assign(a, true), budget) || sat_rec(p.assign(a, false), budget)
        }
    }
}

/// LTL in negation normal form with release.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Nnf {
    True,
    False,
    Lit(String, bool),
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Next(Box<Nnf>),
    Until(Box<Nnf>, Box<Nnf>),
    Release(Box<Nnf>, Box<Nnf>),
}

fn b(n: Nnf) -> Box<Nnf> {
    Box::new(n)
}

/// Negation normal form of `f` (of `¬f` when `negate`).
pub fn to_nnf(f: &LtlFormula, negate: bool) -> Nnf {
    use LtlFormula as L;
    match (f, negate) {
        (L::True, false) | (L::False, true) => Nnf::True,
        (L::True, true) | (L::False, false) => Nnf::False,
        (L::Atom(a), neg) => Nnf::Lit(a.clone(), !neg),
        (L::Not(a), neg) => to_nnf(a, !neg),
        (L::And(x, y), false) | (L::Or(x, y), true) => Nnf::And(b(to_nnf(x, negate)), b(to_nnf(y, negate))),
        (L::Or(x, y), false) | (L::And(x, y), true) => Nnf::Or(b(to_nnf(x, negate)), b(to_nnf(y, negate))),
        (L::Implies(x, y), false) => Nnf::Or(b(to_nnf(x, true)), b(to_nnf(y, false))),
        (L::Implies(x, y), true) => Nnf::And(b(to_nnf(x, false)), b(to_nnf(y, true))),
        (L::Next(x), neg) => Nnf::Next(b(to_nnf(x, neg))),
        (L::Until(x, y), false) => Nnf::Until(b(to_nnf(x, false)), b(to_nnf(y, false))),
        (L::Until(x, y), true) => Nnf::Release(b(to_nnf(x, true)), b(to_nnf(y, true))),
        (L::Eventually(x), false) => Nnf::Until(b(Nnf::True), b(to_nnf(x, false))),
        (L::Eventually(x), true) => Nnf::Release(b(Nnf::False), b(to_nnf(x, true))),
        (L::Always(x), false) => Nnf::Release(b(Nnf::False), b(to_nnf(x, false))),
        (L::Always(x), true) => Nnf::Until(b(Nnf::True), b(to_nnf(x, true))),
        // x W y = y R (x ∨ y)
        (L::WeakUntil(x, y), false) => Nnf::Release(
            b(to_nnf(y, false)),
            b(Nnf::Or(b(to_nnf(x, false)), b(to_nnf(y, false)))),
        ),
        // ¬(x W y) = (¬y) U (¬x ∧ ¬y)
        (L::WeakUntil(x, y), true) => Nnf::Until(
            b(to_nnf(y, true)),
            b(Nnf::And(b(to_nnf(x, true)), b(to_nnf(y, true)))),
        ),
    }
}

impl Nnf {
    fn is_propositional(&self) -> bool {
        match self {
            Nnf::True | Nnf::False | Nnf::Lit(..) => true,
            Nnf::And(x, y) | Nnf::Or(x, y) => x.is_propositional() && y.is_propositional(),
            _ => false,
        }
    }

    /// The operand of `G F x`, if this is one.
    fn gf_operand(&self) -> Option<&Nnf> {
        if let Nnf::Release(f, inner) = self {
            if let (Nnf::False, Nnf::Until(t, x)) = (f.as_ref(), inner.as_ref()) {
                if **t == Nnf::True {
                    return Some(x);
                }
            }
        }
        None
    }

    fn gf(x: Nnf) -> Nnf {
        Nnf::Release(b(Nnf::False), b(Nnf::Until(b(Nnf::True), b(x))))
    }

    fn or_list(self, out: &mut Vec<Nnf>) {
        match self {
            Nnf::Or(x, y) => {
                x.or_list(out);
                y.or_list(out);
            }
            n => out.push(n),
        }
    }

    fn and_list(self, out: &mut Vec<Nnf>) {
        match self {
            Nnf::And(x, y) => {
                x.and_list(out);
                y.and_list(out);
            }
            n => out.push(n),
        }
    }
}

fn or_of(v: Vec<Nnf>) -> Nnf {
    v.into_iter().reduce(|a, c| Nnf::Or(b(a), b(c))).unwrap_or(Nnf::False)
}

fn and_of(v: Vec<Nnf>) -> Nnf {
    v.into_iter().reduce(|a, c| Nnf::And(b(a), b(c))).unwrap_or(Nnf::True)
}

/// `G F` operands are insensitive to the left side of an until at the top of a disjunct.
fn gf_core(x: Nnf) -> Nnf {
    let mut items = Vec::new();
    x.or_list(&mut items);
    let items = items
        .into_iter()
        .map(|i| match i {
            Nnf::Until(_, c) => gf_core(*c),
            i => i,
        })
        .collect();
    simplify(or_of(items))
}

/// Language-preserving simplification: constant folding, merging of `G F`
/// disjuncts and dropping of until left sides under `G F`.
pub fn simplify(n: Nnf) -> Nnf {
    match n {
        Nnf::And(x, y) => match (simplify(*x), simplify(*y)) {
            (Nnf::False, _) | (_, Nnf::False) => Nnf::False,
            (Nnf::True, z) | (z, Nnf::True) => z,
            (x, y) if x == y => x,
            (x, y) => Nnf::And(b(x), b(y)),
        },
        Nnf::Or(x, y) => {
            let (x, y) = (simplify(*x), simplify(*y));
            match (x, y) {
                (Nnf::True, _) | (_, Nnf::True) => Nnf::True,
                (Nnf::False, z) | (z, Nnf::False) => z,
                (x, y) if x == y => x,
                (x, y) => {
                    let mut items = Vec::new();
                    x.or_list(&mut items);
                    y.or_list(&mut items);
                    let (gf, rest): (Vec<Nnf>, Vec<Nnf>) = items.into_iter().partition(|i| i.gf_operand().is_some());
                    if gf.len() < 2 {
                        let mut all = rest;
                        all.extend(gf);
                        return or_of(all);
                    }
                    let merged = or_of(gf.into_iter().map(|g| g.gf_operand().unwrap().clone()).collect());
                    let mut all = rest;
                    all.push(Nnf::gf(gf_core(merged)));
                    or_of(all)
                }
            }
        }
        Nnf::Next(x) => match simplify(*x) {
            Nnf::True => Nnf::True,
            Nnf::False => Nnf::False,
            x => Nnf::Next(b(x)),
        },
        Nnf::Until(x, y) => match (simplify(*x), simplify(*y)) {
            (_, Nnf::True) => Nnf::True,
            (_, Nnf::False) => Nnf::False,
            (Nnf::False, y) => y,
            (x, y) if x == y => x,
            (x, y) => Nnf::Until(b(x), b(y)),
        },
        Nnf::Release(x, y) => match (simplify(*x), simplify(*y)) {
            (_, Nnf::False) => Nnf::False,
            (_, Nnf::True) => Nnf::True,
            (Nnf::True, y) => y,
            (x, y) if x == y => x,
            (Nnf::False, Nnf::Until(t, c)) if *t == Nnf::True => Nnf::gf(gf_core(*c)),
            (x, y) => Nnf::Release(b(x), b(y)),
        },
        n => n,
    }
}

/// Acceptance set of a generalized Büchi automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AcceptanceSet {
    /// Visits to these automaton states.
    States(BTreeSet<usize>),
    /// Letters satisfying this proposition.
    Label(Prop),
}

/// Generalized Büchi automaton with state guards: a run reads the letter at a state
/// and the letter has to satisfy the state's guard.
#[derive(Debug, Clone)]
pub struct GeneralizedBuchi {
    pub atoms: Vec<String>,
    pub guards: Vec<Prop>,
    pub initial: Vec<usize>,
    pub succ: Vec<Vec<usize>>,
    pub acceptance: Vec<AcceptanceSet>,
}

/// State-based Büchi automaton with one acceptance set.
#[derive(Debug, Clone)]
pub struct BuchiAutomaton {
    pub atoms: Vec<String>,
    pub guards: Vec<Prop>,
    pub initial: Vec<usize>,
    pub succ: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Tf {
    True,
    False,
    Prop(usize),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

struct Tableau {
    atoms: Vec<String>,
    atom_ix: HashMap<String, usize>,
    props: Vec<Prop>,
    prop_ix: HashMap<Prop, usize>,
    nodes: Vec<Tf>,
    node_ix: HashMap<Tf, usize>,
    /// Negation of every propositional node.
    neg: HashMap<usize, usize>,
}

impl Tableau {
    fn atom(&mut self, a: &str) -> usize {
        if let Some(&i) = self.atom_ix.get(a) {
            return i;
        }
        self.atoms.push(a.to_string());
        self.atom_ix.insert(a.to_string(), self.atoms.len() - 1);
        self.atoms.len() - 1
    }

    fn prop(&mut self, n: &Nnf) -> Prop {
        match n {
            Nnf::True => Prop::True,
            Nnf::False => Prop::False,
            Nnf::Lit(a, pos) => Prop::Lit(self.atom(a), *pos),
            Nnf::And(x, y) => {
                let (x, y) = (self.prop(x), self.prop(y));
                prop_and(vec![x, y])
            }
            Nnf::Or(x, y) => {
                let (x, y) = (self.prop(x), self.prop(y));
                prop_or(vec![x, y])
            }
            _ => unreachable!("temporal operator in a proposition"),
        }
    }

    fn intern_prop(&mut self, p: Prop) -> usize {
        if let Some(&i) = self.prop_ix.get(&p) {
            return i;
        }
        self.props.push(p.clone());
        self.prop_ix.insert(p, self.props.len() - 1);
        self.props.len() - 1
    }

    fn intern(&mut self, t: Tf) -> usize {
        if let Some(&i) = self.node_ix.get(&t) {
            return i;
        }
        self.nodes.push(t.clone());
        self.node_ix.insert(t, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn add_negations(&mut self) {
        let n = self.nodes.len();
        for i in 0..n {
            let neg = match &self.nodes[i] {
                Tf::True => self.intern(Tf::False),
                Tf::False => self.intern(Tf::True),
                Tf::Prop(p) => {
                    let q = self.props[*p].negate();
                    let q = self.intern_prop(q);
                    self.intern(Tf::Prop(q))
                }
                _ => continue,
            };
            self.neg.insert(i, neg);
        }
    }

    fn add(&mut self, n: &Nnf) -> usize {
        if n.is_propositional() {
            return match self.prop(n) {
                Prop::True => self.intern(Tf::True),
                Prop::False => self.intern(Tf::False),
                p => {
                    let i = self.intern_prop(p);
                    self.intern(Tf::Prop(i))
                }
            };
        }
        let t = match n {
            Nnf::And(x, y) => Tf::And(self.add(x), self.add(y)),
            Nnf::Or(x, y) => Tf::Or(self.add(x), self.add(y)),
            Nnf::Next(x) => Tf::Next(self.add(x)),
            Nnf::Until(x, y) => Tf::Until(self.add(x), self.add(y)),
            Nnf::Release(x, y) => Tf::Release(self.add(x), self.add(y)),
            _ => unreachable!("propositional nodes handled above"),
        };
        self.intern(t)
    }
}

#[derive(Clone)]
struct Pending {
    new: Vec<usize>,
    old: BTreeSet<usize>,
    next: BTreeSet<usize>,
}

/// Declarative tableau expansion of the obligations `now`: every result is a set of
/// formulas holding at the current position together with the obligations for the
/// next one.
fn expand(tab: &Tableau, now: &BTreeSet<usize>, budget: &mut usize) -> Vec<(BTreeSet<usize>, BTreeSet<usize>)> {
    let mut out = Vec::new();
    let mut work = vec![Pending {
        new: now.iter().copied().collect(),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];
    'outer: while let Some(mut node) = work.pop() {
        while let Some(eta) = node.new.pop() {
            if node.old.contains(&eta) {
                continue;
            }
            match tab.nodes[eta].clone() {
                Tf::False => continue 'outer,
                Tf::True => {
                    node.old.insert(eta);
                }
                Tf::Prop(p) => {
                    let mut ps: Vec<Prop> = node
                        .old
                        .iter()
                        .filter_map(|&o| match tab.nodes[o] {
                            Tf::Prop(q) => Some(tab.props[q].clone()),
                            _ => None,
                        })
                        .collect();
                    ps.push(tab.props[p].clone());
                    let mut local = SAT_BUDGET.min(*budget);
                    let before = local;
                    let sat = satisfiable(ps, &mut local);
                    *budget = budget.saturating_sub(before - local);
                    if !sat {
                        continue 'outer;
                    }
                    node.old.insert(eta);
                }
                Tf::And(x, y) => {
                    node.old.insert(eta);
                    node.new.push(x);
                    node.new.push(y);
                }
                Tf::Next(x) => {
                    node.old.insert(eta);
                    node.next.insert(x);
                }
                Tf::Or(x, y) => {
                    node.old.insert(eta);
                    // a propositional disjunct is tried first and excluded from the other branch
                    let (x, y) = if tab.neg.contains_key(&y) && !tab.neg.contains_key(&x) { (y, x) } else { (x, y) };
                    let mut other = node.clone();
                    other.new.push(y);
                    other.new.extend(tab.neg.get(&x));
                    work.push(other);
                    node.new.push(x);
                }
                Tf::Until(x, y) => {
                    node.old.insert(eta);
                    let mut other = node.clone();
                    other.new.push(y);
                    work.push(other);
                    node.new.push(x);
                    node.new.extend(tab.neg.get(&y));
                    node.next.insert(eta);
                }
                Tf::Release(x, y) => {
                    node.old.insert(eta);
                    let mut other = node.clone();
                    other.new.push(x);
                    other.new.push(y);
                    work.push(other);
                    node.new.push(y);
                    node.new.extend(tab.neg.get(&x));
                    node.next.insert(eta);
                }
            }
        }
        out.push((node.old, node.next));
    }
    out
}

/// Edge of a [`TransitionBuchi`]: reads a letter satisfying `guard`, moves to `target`
/// and visits the mark sets in `marks`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub guard: Prop,
    pub target: usize,
    pub marks: FixedBitSet,
}

/// Transition-based generalized Büchi automaton. A run is accepting when it takes
/// edges of every mark set infinitely often and reads letters satisfying every
/// label proposition infinitely often.
#[derive(Debug, Clone)]
pub struct TransitionBuchi {
    pub atoms: Vec<String>,
    pub initial: usize,
    pub edges: Vec<Vec<Edge>>,
    pub mark_sets: usize,
    pub labels: Vec<Prop>,
}

impl TransitionBuchi {
    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of acceptance conditions: mark sets followed by label propositions.
    pub fn acceptance_count(&self) -> usize {
        self.mark_sets + self.labels.len()
    }

    /// The same language with guards on states: every edge becomes a state.
    pub fn to_state_based(&self) -> GeneralizedBuchi {
        let mut first = Vec::with_capacity(self.edges.len());
        let mut guards = Vec::new();
        for es in &self.edges {
            first.push(guards.len());
            guards.extend(es.iter().map(|e| e.guard.clone()));
        }
        let out_of = |q: usize| (first[q]..first[q] + self.edges[q].len()).collect::<Vec<_>>();
        let succ = self.edges.iter().flatten().map(|e| out_of(e.target)).collect();
        let mut acceptance: Vec<AcceptanceSet> = (0..self.mark_sets)
            .map(|i| {
                AcceptanceSet::States(
                    self.edges
                        .iter()
                        .flatten()
                        .enumerate()
                        .filter(|(_, e)| e.marks.contains(i))
                        .map(|(k, _)| k)
                        .collect(),
                )
            })
            .collect();
        acceptance.extend(self.labels.iter().cloned().map(AcceptanceSet::Label));
        GeneralizedBuchi {
            atoms: self.atoms.clone(),
            guards,
            initial: out_of(self.initial),
            succ,
            acceptance,
        }
    }
}

struct EdgeCandidate {
    props: BTreeSet<usize>,
    target: BTreeSet<usize>,
    marks: FixedBitSet,
}

impl EdgeCandidate {
    fn subsumes(&self, other: &EdgeCandidate) -> bool {
        self.target == other.target && self.props.is_subset(&other.props) && self.marks.is_superset(&other.marks)
    }
}

/// Transition-based automaton for `phi`. States are the obligations left for the next
/// position; edges dominated by a weaker guard with more marks to the same state are
/// dropped. Top-level conjuncts `G F p` with propositional `p` become label conditions.
pub fn ltl_to_tgba(phi: &LtlFormula) -> TransitionBuchi {
    let n = simplify(to_nnf(phi, false));
    let mut tab = Tableau {
        atoms: Vec::new(),
        atom_ix: HashMap::new(),
        props: Vec::new(),
        prop_ix: HashMap::new(),
        nodes: Vec::new(),
        node_ix: HashMap::new(),
        neg: HashMap::new(),
    };
    let mut conj = Vec::new();
    n.and_list(&mut conj);
    let mut labels = Vec::new();
    let mut rest = Vec::new();
    for c in conj {
        match c.gf_operand() {
            Some(x) if x.is_propositional() => labels.push(tab.prop(x)),
            _ => rest.push(c),
        }
    }
    let root = tab.add(&and_of(rest));
    tab.add_negations();
    let untils: Vec<(usize, usize)> = tab
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(i, t)| match t {
            Tf::Until(_, y) => Some((i, *y)),
            _ => None,
        })
        .collect();
    let mut states: Vec<BTreeSet<usize>> = vec![BTreeSet::from([root])];
    let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::from([(states[0].clone(), 0)]);
    let mut edges: Vec<Vec<Edge>> = Vec::new();
    let mut budget = SAT_BUDGET * 64;
    let mut q = 0;
    while q < states.len() {
        let mut cands: Vec<EdgeCandidate> = Vec::new();
        for (old, next) in expand(&tab, &states[q], &mut budget) {
            let props = old.iter().copied().filter(|&o| matches!(tab.nodes[o], Tf::Prop(_))).collect();
            let mut marks = FixedBitSet::with_capacity(untils.len());
            for (i, &(u, y)) in untils.iter().enumerate() {
                if !old.contains(&u) || old.contains(&y) {
                    marks.insert(i);
                }
            }
            cands.push(EdgeCandidate {
                props,
                target: next,
                marks,
            });
        }
        let mut kept: Vec<EdgeCandidate> = Vec::new();
        for (i, c) in cands.iter().enumerate() {
            let dominated = cands
                .iter()
                .enumerate()
                .any(|(j, d)| j != i && d.subsumes(c) && (!c.subsumes(d) || j < i));
            if !dominated {
                kept.push(EdgeCandidate {
                    props: c.props.clone(),
                    target: c.target.clone(),
                    marks: c.marks.clone(),
                });
            }
        }
        let mut out = Vec::with_capacity(kept.len());
        for c in kept {
            let target = match ids.get(&c.target) {
                Some(&t) => t,
                None => {
                    ids.insert(c.target.clone(), states.len());
                    states.push(c.target.clone());
                    states.len() - 1
                }
            };
            let guard = prop_and(
                c.props
                    .iter()
                    .map(|&o| match tab.nodes[o] {
                        Tf::Prop(p) => tab.props[p].clone(),
                        _ => unreachable!("only propositions are kept in guards"),
                    })
                    .collect(),
            );
            out.push(Edge {
                guard,
                target,
                marks: c.marks,
            });
        }
        edges.push(out);
        q += 1;
    }
    TransitionBuchi {
        atoms: tab.atoms,
        initial: 0,
        edges,
        mark_sets: untils.len(),
        labels,
    }
}

/// Generalized automaton for `phi` with guards on states.
pub fn ltl_to_gba(phi: &LtlFormula) -> GeneralizedBuchi {
    ltl_to_tgba(phi).to_state_based()
}

impl GeneralizedBuchi {
    /// Counter-based degeneralization. States in front of a label set are split by
    /// whether the letter satisfies the set's proposition.
    pub fn degeneralize(&self) -> BuchiAutomaton {
        let k = self.acceptance.len().max(1);
        let mut ids: HashMap<(usize, usize, bool), usize> = HashMap::new();
        let mut guards = Vec::new();
        let mut accepting = Vec::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::new();
        let variants = |c: usize| -> Vec<bool> {
            match self.acceptance.get(c) {
                Some(AcceptanceSet::Label(_)) => vec![true, false],
                _ => vec![false],
            }
        };
        let in_set = |q: usize, c: usize, bit: bool| -> bool {
            match self.acceptance.get(c) {
                None => true,
                Some(AcceptanceSet::States(s)) => s.contains(&q),
                Some(AcceptanceSet::Label(_)) => bit,
            }
        };
        let mut intern = |key: (usize, usize, bool),
                          guards: &mut Vec<Prop>,
                          accepting: &mut Vec<bool>,
                          succ: &mut Vec<Vec<usize>>,
                          queue: &mut VecDeque<((usize, usize, bool), usize)>|
         -> usize {
            if let Some(&id) = ids.get(&key) {
                return id;
            }
            let (q, c, bit) = key;
            let g = match self.acceptance.get(c) {
                Some(AcceptanceSet::Label(p)) => {
                    prop_and(vec![self.guards[q].clone(), if bit { p.clone() } else { p.negate() }])
                }
                _ => self.guards[q].clone(),
            };
            let id = guards.len();
            guards.push(g);
            accepting.push(c == 0 && in_set(q, c, bit));
            succ.push(Vec::new());
            ids.insert(key, id);
            queue.push_back((key, id));
            id
        };
        let mut initial = Vec::new();
        for &q in &self.initial {
            for bit in variants(0) {
                initial.push(intern((q, 0, bit), &mut guards, &mut accepting, &mut succ, &mut queue));
            }
        }
        while let Some(((q, c, bit), id)) = queue.pop_front() {
            let c2 = if in_set(q, c, bit) { (c + 1) % k } else { c };
            for &r in &self.succ[q] {
                for bit2 in variants(c2) {
                    let t = intern((r, c2, bit2), &mut guards, &mut accepting, &mut succ, &mut queue);
                    succ[id].push(t);
                }
            }
        }
        // drop states whose guard cannot hold
        let mut budget = SAT_BUDGET * 16;
        let alive: Vec<bool> = guards.iter().map(|g| satisfiable(vec![g.clone()], &mut budget)).collect();
        for s in succ.iter_mut() {
            s.retain(|&t| alive[t]);
        }
        initial.retain(|&q| alive[q]);
        BuchiAutomaton {
            atoms: self.atoms.clone(),
            guards,
            initial,
            succ,
            accepting,
        }
    }
}

/// Büchi automaton accepting exactly the models of `phi`.
pub fn ltl_to_buchi(phi: &LtlFormula) -> BuchiAutomaton {
    ltl_to_gba(phi).degeneralize()
}

impl BuchiAutomaton {
    pub fn state_count(&self) -> usize {
        self.guards.len()
    }

    fn letter_ok(&self, q: usize, letter: &BTreeSet<String>) -> bool {
        self.guards[q].eval(&|a| letter.contains(&self.atoms[a]))
    }

    /// Whether the automaton accepts the ultimately periodic word `trace`.
    pub fn accepts(&self, trace: &Trace) -> bool {
        let n = trace.len();
        let nq = self.state_count();
        let id = |i: usize, q: usize| i * nq + q;
        let mut reach = vec![false; n * nq];
        let mut stack: Vec<(usize, usize)> = self
            .initial
            .iter()
            .filter(|&&q| self.letter_ok(q, trace.at(0)))
            .map(|&q| (0, q))
            .collect();
        let succs = |i: usize, q: usize| -> Vec<(usize, usize)> {
            let j = trace.next(i);
            self.succ[q]
                .iter()
                .filter(|&&r| self.letter_ok(r, trace.at(j)))
                .map(|&r| (j, r))
                .collect()
        };
        for &(i, q) in &stack {
            reach[id(i, q)] = true;
        }
        while let Some((i, q)) = stack.pop() {
            for (j, r) in succs(i, q) {
                if !reach[id(j, r)] {
                    reach[id(j, r)] = true;
                    stack.push((j, r));
                }
            }
        }
        for i in 0..n {
            for q in 0..nq {
                if !reach[id(i, q)] || !self.accepting[q] {
                    continue;
                }
                // accepting product state on a cycle
                let mut seen = vec![false; n * nq];
                let mut st = succs(i, q);
                while let Some((j, r)) = st.pop() {
                    if (j, r) == (i, q) {
                        return true;
                    }
                    if !seen[id(j, r)] {
                        seen[id(j, r)] = true;
                        st.extend(succs(j, r));
                    }
                }
            }
        }
        false
    }
}
