use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{FiringSequence, NetStructure, PetriNetWithTransits, PlaceId, TransitionId};
use crate::trace::Trace;

/// How a chain behaves after its last recorded element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ChainEnd {
    /// The last place is never consumed again.
    Open,
    /// The last place is consumed at `step` by a transition without a transit from it.
    Terminated { step: usize },
    /// The last move leads back to `places[from]`; the cycle repeats every `span` steps.
    Loop { from: usize, span: usize },
}

/// One data flow of a firing sequence.
///
/// `moves[k]` is the transition (and global step) moving the flow out of `places[k]`.
/// For periodic chains the moves from index `from` on repeat with period `span`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlowChain {
    pub start_transition: TransitionId,
    pub start_step: usize,
    pub places: Vec<PlaceId>,
    pub moves: Vec<(TransitionId, usize)>,
    pub end: ChainEnd,
}

/// What a chain does at one global step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainAction {
    NotStarted,
    Start(PlaceId),
    Move(PlaceId, PlaceId),
    Terminate(PlaceId),
    Idle(PlaceId),
    Ended,
}

impl FlowChain {
    /// Alternating place/transition names p0 t0 p1 t1 ...
    pub fn elements(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (k, p) in self.places.iter().enumerate() {
            out.push(p.to_string());
            if let Some((t, _)) = self.moves.get(k) {
                out.push(t.to_string());
            }
        }
        out
    }

    pub fn finite_end(&self) -> bool {
        !matches!(self.end, ChainEnd::Loop { .. })
    }

    fn move_target(&self, k: usize) -> &PlaceId {
        &self.places[self.target_index(k)]
    }

    /// Index of the move performed at global step `g`, if any.
    fn move_at(&self, g: usize) -> Option<usize> {
        if let Some(k) = self.moves.iter().position(|(_, s)| *s == g) {
            return Some(k);
        }
        if let ChainEnd::Loop { from, span } = self.end {
            for k in from..self.moves.len() {
                let s = self.moves[k].1;
                if g > s && (g - s).is_multiple_of(span) {
                    return Some(k);
                }
            }
        }
        None
    }

    fn target_index(&self, k: usize) -> usize {
        match self.end {
            ChainEnd::Loop { from, .. } if k + 1 == self.places.len() => from,
            _ => k + 1,
        }
    }

    /// Place occupied right before global step `g` (after start).
    fn place_before(&self, g: usize) -> Option<&PlaceId> {
        if g <= self.start_step {
            return None;
        }
        if let ChainEnd::Terminated { step } = self.end {
            if g > step {
                return None;
            }
        }
        let m = self.moves.len();
        let mut cur = 0;
        for k in 0..m {
            if self.moves[k].1 < g {
                cur = self.target_index(k);
            } else {
                return Some(&self.places[cur]);
            }
        }
        if let ChainEnd::Loop { from, span } = self.end {
            let mut r = 1;
            loop {
                for k in from..m {
                    if self.moves[k].1 + r * span < g {
                        cur = self.target_index(k);
                    } else {
                        return Some(&self.places[cur]);
                    }
                }
                r += 1;
            }
        }
        Some(&self.places[cur])
    }

    /// Behaviour of the chain at global step `g`.
    pub fn action_at(&self, g: usize) -> ChainAction {
        if g < self.start_step {
            return ChainAction::NotStarted;
        }
        if g == self.start_step {
            return ChainAction::Start(self.places[0].clone());
        }
        if let Some(k) = self.move_at(g) {
            return ChainAction::Move(self.places[k].clone(), self.move_target(k).clone());
        }
        if let ChainEnd::Terminated { step } = self.end {
            if g == step {
                return ChainAction::Terminate(self.places.last().unwrap().clone());
            }
            if g > step {
                return ChainAction::Ended;
            }
        }
        match self.place_before(g) {
            Some(p) => ChainAction::Idle(p.clone()),
            None => ChainAction::Ended,
        }
    }

    /// Observable behaviour up to global step `horizon` (for comparing representations).
    pub fn behaviour(&self, horizon: usize) -> Vec<(usize, ChainAction)> {
        (self.start_step..horizon)
            .map(|g| (g, self.action_at(g)))
            .filter(|(_, a)| !matches!(a, ChainAction::Idle(_)))
            .collect()
    }
}

impl fmt::Display for FlowChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}@{}] ", self.start_transition, self.start_step)?;
        let els = self.elements();
        f.write_str(&els.join(" "))?;
        match self.end {
            ChainEnd::Open => Ok(()),
            ChainEnd::Terminated { step } => write!(f, " (ends at step {step})"),
            ChainEnd::Loop { from, .. } => write!(f, " (loops to {})", self.places[from]),
        }
    }
}

struct Tracker<'a> {
    net: &'a PetriNetWithTransits,
    seq: &'a FiringSequence,
    tix: Vec<usize>,
    out: Vec<FlowChain>,
}

impl Tracker<'_> {
    fn key(&self, g: usize) -> usize {
        self.seq.position(g)
    }

    fn limit(&self, g: usize) -> usize {
        match self.seq.lasso_start {
            None => self.seq.len(),
            Some(l) => g.max(l) + (self.seq.len() - l),
        }
    }

    fn extend(
        &mut self,
        start: (&TransitionId, usize),
        places: &mut Vec<PlaceId>,
        moves: &mut Vec<(TransitionId, usize)>,
        seen: &mut HashMap<(usize, usize), (usize, usize)>,
        g: usize,
    ) {
        let pt = self.net.pt();
        let p = pt.place_index(places.last().unwrap().as_str()).unwrap();
        let consumer = (g..self.limit(g)).find(|&j| pt.pre(self.tix[self.key(j)]).contains(&p));
        let Some(j) = consumer else {
            self.emit(start, places, moves, ChainEnd::Open);
            return;
        };
        let t = self.tix[self.key(j)];
        let targets: Vec<usize> = self
            .net
            .transits_ix(t)
            .iter()
            .filter(|(s, _)| *s == Some(p))
            .map(|&(_, q)| q)
            .collect();
        if targets.is_empty() {
            self.emit(start, places, moves, ChainEnd::Terminated { step: j });
            return;
        }
        let tname = pt.transitions()[t].clone();
        for q in targets {
            moves.push((tname.clone(), j));
            let key = (q, self.key(j + 1));
            if let (Some(&(k, g0)), true) = (seen.get(&key), self.seq.lasso_start.is_some()) {
                self.emit(start, places, moves, ChainEnd::Loop { from: k, span: j + 1 - g0 });
            } else {
                places.push(pt.places()[q].clone());
                seen.insert(key, (places.len() - 1, j + 1));
                self.extend(start, places, moves, seen, j + 1);
                seen.remove(&key);
                places.pop();
            }
            moves.pop();
        }
    }

    fn emit(&mut self, start: (&TransitionId, usize), places: &[PlaceId], moves: &[(TransitionId, usize)], end: ChainEnd) {
        self.out.push(FlowChain {
            start_transition: start.0.clone(),
            start_step: start.1,
            places: places.to_vec(),
            moves: moves.to_vec(),
            end,
        });
    }
}

/// Every maximal flow chain of `seq`, in canonical order.
///
/// Chains start whenever a fired transition has a start transit; a chain at `p`
/// follows each transit out of `p` of the next transition consuming `p`, ends
/// when that transition has no transit from `p`, and is open when `p` is never
/// consumed again. On lassos a chain revisiting a (place, position) state is
/// reported as periodic.
pub fn track_chains(net: &PetriNetWithTransits, seq: &FiringSequence) -> Vec<FlowChain> {
    let pt = net.pt();
    let tix: Vec<usize> = seq
        .steps
        .iter()
        .map(|(_, t)| pt.transition_index(t.as_str()).expect("sequence uses net transitions"))
        .collect();
    let mut tracker = Tracker {
        net,
        seq,
        tix,
        out: Vec::new(),
    };
    for i in 0..seq.len() {
        let t = tracker.tix[i];
        let tname = pt.transitions()[t].clone();
        let starts: Vec<usize> = net
            .transits_ix(t)
            .iter()
            .filter(|(s, _)| s.is_none())
            .map(|&(_, q)| q)
            .collect();
        for q in starts {
            let mut places = vec![pt.places()[q].clone()];
            let mut moves = Vec::new();
            let mut seen = HashMap::new();
            seen.insert((q, tracker.key(i + 1)), (0, i + 1));
            tracker.extend((&tname, i), &mut places, &mut moves, &mut seen, i + 1);
        }
    }
    let mut out = tracker.out;
    out.sort_by(|a, b| {
        (a.start_step, &a.places[0], a.elements())
            .cmp(&(b.start_step, &b.places[0], b.elements()))
            .then_with(|| format!("{:?}", a.end).cmp(&format!("{:?}", b.end)))
    });
    out
}

fn letter<I: IntoIterator<Item = String>>(it: I) -> BTreeSet<String> {
    it.into_iter().collect()
}

/// σ(ζ): marking atoms plus the fired transition per position; finite sequences stutter.
pub fn trace_of_sequence(seq: &FiringSequence) -> Trace {
    let pos = |i: usize| -> BTreeSet<String> {
        let (m, t) = &seq.steps[i];
        letter(m.iter().map(|p| p.to_string()).chain(std::iter::once(t.to_string())))
    };
    match seq.lasso_start {
        Some(l) => Trace::new((0..l).map(pos).collect(), (l..seq.len()).map(pos).collect()),
        None => Trace::new(
            (0..seq.len()).map(pos).collect(),
            vec![letter(seq.final_marking.iter().map(|p| p.to_string()))],
        ),
    }
}

/// σ(ξ): {p_i, t_i} per position; finite chains stutter their last place.
pub fn trace_of_chain(chain: &FlowChain) -> Trace {
    let pos = |k: usize| -> BTreeSet<String> {
        letter([chain.places[k].to_string(), chain.moves[k].0.to_string()])
    };
    match chain.end {
        ChainEnd::Loop { from, .. } => Trace::new((0..from).map(pos).collect(), (from..chain.moves.len()).map(pos).collect()),
        _ => Trace::new(
            (0..chain.moves.len()).map(pos).collect(),
            vec![letter([chain.places.last().unwrap().to_string()])],
        ),
    }
}
