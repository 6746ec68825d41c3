use std::collections::{HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;

use super::buchi::TransitionBuchi;
use super::kripke::Kripke;
use crate::ltl::{eval_ltl_lasso, LtlFormula};

/// Default bound on the number of explored product states.
pub const DEFAULT_STATE_CAP: usize = 2_000_000;

/// Result of an emptiness check over a Kripke structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Search<S> {
    /// No accepting lasso; `states` product states were explored.
    Empty { states: usize },
    /// Accepting lasso: the states of `cycle` repeat forever after `prefix`.
    Lasso { prefix: Vec<S>, cycle: Vec<S> },
    /// The product exceeded `cap` states.
    Exceeded { cap: usize },
}

type Key = (u32, u32);

/// Edge of the product: target state and the acceptance conditions it visits.
type Step = (Key, FixedBitSet);

struct Product<'a, K: Kripke> {
    k: &'a K,
    ba: &'a TransitionBuchi,
    /// Kripke atom index of every automaton atom.
    amap: Vec<Option<usize>>,
    conditions: usize,
    kstates: Vec<K::State>,
    kindex: HashMap<K::State, u32>,
    ksucc: Vec<Option<Vec<u32>>>,
    keys: Vec<Key>,
    index: HashMap<Key, u32>,
    dead: Vec<bool>,
    cap: usize,
}

struct Found(Vec<u32>, Vec<u32>);

enum Stop {
    Found(Found),
    Cap,
}

struct Root {
    id: u32,
    /// Conditions visited by edges inside the component.
    acc: FixedBitSet,
    /// Conditions of the edge that entered the component.
    entry: FixedBitSet,
}

impl<'a, K: Kripke> Product<'a, K> {
    fn new(k: &'a K, ba: &'a TransitionBuchi, cap: usize) -> Self {
        let katoms = k.atoms();
        let kix: HashMap<&str, usize> = katoms.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
        let amap = ba.atoms.iter().map(|a| kix.get(a.as_str()).copied()).collect();
        Product {
            k,
            ba,
            amap,
            conditions: ba.acceptance_count(),
            kstates: Vec::new(),
            kindex: HashMap::new(),
            ksucc: Vec::new(),
            keys: Vec::new(),
            index: HashMap::new(),
            dead: Vec::new(),
            cap,
        }
    }

    fn kintern(&mut self, s: K::State) -> u32 {
        if let Some(&i) = self.kindex.get(&s) {
            return i;
        }
        let i = self.kstates.len() as u32;
        self.kstates.push(s.clone());
        self.kindex.insert(s, i);
        self.ksucc.push(None);
        i
    }

    fn holds(&self, ks: u32, a: usize) -> bool {
        self.amap[a].is_some_and(|x| self.k.holds(&self.kstates[ks as usize], x))
    }

    fn kripke_succ(&mut self, ks: u32) -> Vec<u32> {
        if let Some(v) = &self.ksucc[ks as usize] {
            return v.clone();
        }
        let succ = self.k.successors(&self.kstates[ks as usize].clone());
        let v: Vec<u32> = succ.into_iter().map(|s| self.kintern(s)).collect();
        self.ksucc[ks as usize] = Some(v.clone());
        v
    }

    /// Edges leaving `(ks, q)`: the automaton reads the label of `ks`.
    fn successors(&mut self, (ks, q): Key) -> Vec<Step> {
        let ba = self.ba;
        let holds = |a: usize| self.holds(ks, a);
        let mut label_marks = FixedBitSet::with_capacity(self.conditions);
        for (i, p) in ba.labels.iter().enumerate() {
            if p.eval(&holds) {
                label_marks.insert(ba.mark_sets + i);
            }
        }
        let moves: Vec<(usize, FixedBitSet)> = ba.edges[q as usize]
            .iter()
            .filter(|e| e.guard.eval(&holds))
            .map(|e| {
                let mut m = label_marks.clone();
                m.union_with(&e.marks);
                (e.target, m)
            })
            .collect();
        if moves.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for k2 in self.kripke_succ(ks) {
            for (t, m) in &moves {
                out.push(((k2, *t as u32), m.clone()));
            }
        }
        out
    }

    fn lookup(&self, key: &Key) -> Option<u32> {
        self.index.get(key).copied()
    }

    fn add(&mut self, key: Key) -> Result<u32, Stop> {
        if self.keys.len() >= self.cap {
            return Err(Stop::Cap);
        }
        let id = self.keys.len() as u32;
        self.keys.push(key);
        self.index.insert(key, id);
        self.dead.push(false);
        Ok(id)
    }

    fn full(&self, acc: &FixedBitSet) -> bool {
        acc.count_ones(..) == self.conditions
    }

    /// Depth-first search for a strongly connected component whose internal edges
    /// visit every acceptance condition (Couvreur's algorithm). Ids are assigned in
    /// visiting order, so an id doubles as the depth-first number.
    fn run(&mut self) -> Result<(), Stop> {
        let init = self.k.initial();
        let starts: Vec<Key> = init
            .into_iter()
            .map(|s| (self.kintern(s), self.ba.initial as u32))
            .collect();
        for start in starts {
            if self.lookup(&start).is_some() {
                continue;
            }
            let id = self.add(start)?;
            let empty = FixedBitSet::with_capacity(self.conditions);
            let mut roots = vec![Root {
                id,
                acc: empty.clone(),
                entry: empty,
            }];
            let mut active = vec![id];
            let mut frames: Vec<(u32, Vec<Step>, usize)> = vec![(id, self.successors(start), 0)];
            while let Some(top) = frames.len().checked_sub(1) {
                let (s, i) = (frames[top].0, frames[top].2);
                if i < frames[top].1.len() {
                    let (t, marks) = frames[top].1[i].clone();
                    frames[top].2 += 1;
                    match self.lookup(&t) {
                        None => {
                            let tid = self.add(t)?;
                            roots.push(Root {
                                id: tid,
                                acc: FixedBitSet::with_capacity(self.conditions),
                                entry: marks,
                            });
                            active.push(tid);
                            let succ = self.successors(t);
                            frames.push((tid, succ, 0));
                        }
                        Some(tid) if !self.dead[tid as usize] => {
                            let mut acc = marks;
                            while roots.last().expect("live state has a root").id > tid {
                                let r = roots.pop().unwrap();
                                acc.union_with(&r.acc);
                                acc.union_with(&r.entry);
                            }
                            let top_root = roots.last_mut().unwrap();
                            top_root.acc.union_with(&acc);
                            if self.full(&top_root.acc) {
                                let root = top_root.id;
                                let at = active.iter().position(|&x| x == root).unwrap();
                                let scc: HashSet<u32> = active[at..].iter().copied().collect();
                                let j = frames.iter().position(|f| f.0 == root).unwrap();
                                let prefix = frames[..j].iter().map(|f| f.0).collect();
                                let cycle = self.accepting_cycle(root, &scc);
                                return Err(Stop::Found(Found(prefix, cycle)));
                            }
                        }
                        Some(_) => {}
                    }
                } else {
                    frames.pop();
                    if roots.last().is_some_and(|r| r.id == s) {
                        roots.pop();
                        while let Some(x) = active.pop() {
                            self.dead[x as usize] = true;
                            if x == s {
                                break;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Shortest path inside `scc` from `from` to the target of an edge accepted by `goal`;
    /// returns the states after `from`, ending with that target, and the edge's marks.
    fn bfs(&mut self, from: u32, scc: &HashSet<u32>, goal: &dyn Fn(u32, &FixedBitSet) -> bool) -> (Vec<u32>, FixedBitSet) {
        let mut parent: HashMap<u32, u32> = HashMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = HashSet::from([from]);
        while let Some(x) = queue.pop_front() {
            for (t, m) in self.successors(self.keys[x as usize]) {
                let Some(tid) = self.lookup(&t) else { continue };
                if !scc.contains(&tid) {
                    continue;
                }
                if goal(tid, &m) {
                    let mut path = vec![tid];
                    let mut y = x;
                    while y != from {
                        path.push(y);
                        y = parent[&y];
                    }
                    path.reverse();
                    return (path, m);
                }
                if seen.insert(tid) {
                    parent.insert(tid, x);
                    queue.push_back(tid);
                }
            }
        }
        unreachable!("the component is strongly connected")
    }

    /// A cycle through `root` inside `scc` whose edges visit every acceptance condition.
    fn accepting_cycle(&mut self, root: u32, scc: &HashSet<u32>) -> Vec<u32> {
        let mut missing = FixedBitSet::with_capacity(self.conditions);
        missing.insert_range(..);
        let mut cycle = vec![root];
        let mut cur = root;
        while !missing.is_clear() {
            let want = missing.clone();
            let (path, m) = self.bfs(cur, scc, &|_, m| m.intersection(&want).next().is_some());
            missing.difference_with(&m);
            cur = *path.last().unwrap();
            cycle.extend(path);
        }
        if cur == root && cycle.len() > 1 {
            cycle.pop();
            return cycle;
        }
        let (mut back, _) = self.bfs(cur, scc, &|t, _| t == root);
        back.pop();
        cycle.extend(back);
        cycle
    }

    fn kripke_states(&self, ids: &[u32]) -> Vec<K::State> {
        ids.iter()
            .map(|&i| self.kstates[self.keys[i as usize].0 as usize].clone())
            .collect()
    }
}

/// Looks for an accepting lasso of `k` × `ba`, exploring at most `cap` product states.
pub fn find_accepting_lasso<K: Kripke>(k: &K, ba: &TransitionBuchi, cap: usize) -> Search<K::State> {
    let mut p = Product::new(k, ba, cap);
    match p.run() {
        Ok(()) => Search::Empty { states: p.keys.len() },
        Err(Stop::Cap) => Search::Exceeded { cap },
        Err(Stop::Found(Found(prefix, cycle))) => Search::Lasso {
            prefix: p.kripke_states(&prefix),
            cycle: p.kripke_states(&cycle),
        },
    }
}

/// Explicit lasso enumeration: every path of at most `bound` states that closes a loop
/// is checked against `phi`; the first violating lasso is returned.
pub fn bounded_lasso_search<K: Kripke>(k: &K, phi: &LtlFormula, bound: usize) -> Option<(Vec<K::State>, Vec<K::State>)> {
    let atoms = k.atoms();
    let label = |s: &K::State| -> std::collections::BTreeSet<String> {
        atoms
            .iter()
            .enumerate()
            .filter(|(a, _)| k.holds(s, *a))
            .map(|(_, n)| n.clone())
            .collect()
    };
    let violates = |path: &[K::State], j: usize| -> bool {
        let t = crate::trace::Trace::new(path[..j].iter().map(label).collect(), path[j..].iter().map(label).collect());
        !eval_ltl_lasso(phi, &t)
    };
    if bound == 0 {
        return None;
    }
    let mut path: Vec<K::State> = Vec::new();
    let mut frames: Vec<(Vec<K::State>, usize)> = vec![(k.initial(), 0)];
    while let Some(top) = frames.len().checked_sub(1) {
        let i = frames[top].1;
        if i >= frames[top].0.len() {
            frames.pop();
            path.pop();
            continue;
        }
        let s = frames[top].0[i].clone();
        frames[top].1 += 1;
        path.push(s);
        let last = path.last().unwrap().clone();
        let succ = k.successors(&last);
        for n in &succ {
            if let Some(j) = path.iter().position(|x| x == n) {
                if violates(&path, j) {
                    let cycle = path.split_off(j);
                    return Some((path, cycle));
                }
            }
        }
        if path.len() < bound {
            let fresh: Vec<K::State> = succ.into_iter().filter(|n| !path.contains(n)).collect();
            frames.push((fresh, 0));
        } else {
            path.pop();
        }
    }
    None
}
