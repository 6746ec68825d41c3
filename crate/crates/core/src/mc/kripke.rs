use std::collections::BTreeSet;
use std::hash::Hash;

use fixedbitset::FixedBitSet;

use crate::circuit::Circuit;
use crate::net::{FiringSequence, PtNet, TransitionId};
use crate::trace::Trace;

/// Labelled transition structure explored on the fly.
pub trait Kripke {
    type State: Clone + Eq + Hash;

    /// Names of the label atoms, indexed as in [`Kripke::holds`].
    fn atoms(&self) -> Vec<String>;
    fn initial(&self) -> Vec<Self::State>;
    fn successors(&self, s: &Self::State) -> Vec<Self::State>;
    fn holds(&self, s: &Self::State, atom: usize) -> bool;

    fn label(&self, s: &Self::State) -> BTreeSet<String> {
        self.atoms()
            .into_iter()
            .enumerate()
            .filter(|(a, _)| self.holds(s, *a))
            .map(|(_, n)| n)
            .collect()
    }
}

/// Marker for the stutter step in [`NetState`].
pub const STUTTER: u32 = u32::MAX;

/// A marking together with the transition fired from it, or [`STUTTER`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetState {
    pub marking: FixedBitSet,
    pub fired: u32,
}

/// Trace positions of a safe net: each state is a marking plus the transition fired
/// next. The run may stop anywhere, after which the last marking repeats forever.
#[derive(Debug, Clone, Copy)]
pub struct NetKripke<'a> {
    pub pt: &'a PtNet,
}

impl<'a> NetKripke<'a> {
    pub fn new(pt: &'a PtNet) -> Self {
        NetKripke { pt }
    }

    fn out_of(&self, m: FixedBitSet) -> Vec<NetState> {
        let mut v: Vec<NetState> = (0..self.pt.transitions().len())
            .filter(|&t| self.pt.enabled_bits(&m, t))
            .map(|t| NetState {
                marking: m.clone(),
                fired: t as u32,
            })
            .collect();
        v.push(NetState {
            marking: m,
            fired: STUTTER,
        });
        v
    }

    /// Firing sequence spelled by a lasso of states (`cycle` loops back to its first state).
    pub fn to_sequence(&self, prefix: &[NetState], cycle: &[NetState]) -> FiringSequence {
        let step = |s: &NetState| {
            (
                self.pt.marking_of(&s.marking),
                TransitionId::new(self.pt.transitions()[s.fired as usize].as_str()),
            )
        };
        let head = cycle.first().or(prefix.last()).expect("lasso has states");
        if head.fired == STUTTER {
            let steps: Vec<_> = prefix.iter().filter(|s| s.fired != STUTTER).map(step).collect();
            return FiringSequence {
                steps,
                final_marking: self.pt.marking_of(&head.marking),
                lasso_start: None,
            };
        }
        let steps: Vec<_> = prefix.iter().chain(cycle).map(step).collect();
        FiringSequence {
            steps,
            final_marking: self.pt.marking_of(&cycle[0].marking),
            lasso_start: Some(prefix.len()),
        }
    }
}

impl Kripke for NetKripke<'_> {
    type State = NetState;

    fn atoms(&self) -> Vec<String> {
        self.pt
            .places()
            .iter()
            .map(|p| p.to_string())
            .chain(self.pt.transitions().iter().map(|t| t.to_string()))
            .collect()
    }

    fn initial(&self) -> Vec<NetState> {
        self.out_of(self.pt.initial_bits())
    }

    fn successors(&self, s: &NetState) -> Vec<NetState> {
        if s.fired == STUTTER {
            return vec![s.clone()];
        }
        let m = self
            .pt
            .fire_bits(&s.marking, s.fired as usize)
            .expect("states only record enabled transitions");
        self.out_of(m)
    }

    fn holds(&self, s: &NetState, atom: usize) -> bool {
        let np = self.pt.places().len();
        if atom < np {
            s.marking.contains(atom)
        } else {
            s.fired != STUTTER && s.fired as usize == atom - np
        }
    }
}

/// Clock steps of a circuit: a state holds the outputs of a step and the latch values
/// it produced. Inputs range over the empty set and the singletons, which covers every
/// behaviour of the net encodings since two or more raised inputs act like none.
#[derive(Debug, Clone)]
pub struct CircuitKripke<'a> {
    pub circuit: &'a Circuit,
    inputs: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CircuitState {
    pub outputs: Vec<bool>,
    pub latches: Vec<bool>,
}

impl<'a> CircuitKripke<'a> {
    pub fn new(circuit: &'a Circuit) -> Self {
        let ni = circuit.inputs.len();
        let mut inputs = vec![vec![false; ni]];
        for k in 0..ni {
            let mut v = vec![false; ni];
            v[k] = true;
            inputs.push(v);
        }
        CircuitKripke { circuit, inputs }
    }

    fn from_latches(&self, l: &[bool]) -> Vec<CircuitState> {
        let mut v: Vec<CircuitState> = self
            .inputs
            .iter()
            .map(|i| {
                let (outputs, latches) = self.circuit.step(l, i);
                CircuitState { outputs, latches }
            })
            .collect();
        v.sort_by(|a, b| (&a.outputs, &a.latches).cmp(&(&b.outputs, &b.latches)));
        v.dedup();
        v
    }
}

impl Kripke for CircuitKripke<'_> {
    type State = CircuitState;

    fn atoms(&self) -> Vec<String> {
        self.circuit.outputs.iter().map(|(n, _)| n.clone()).collect()
    }

    fn initial(&self) -> Vec<CircuitState> {
        self.from_latches(&self.circuit.reset())
    }

    fn successors(&self, s: &CircuitState) -> Vec<CircuitState> {
        self.from_latches(&s.latches)
    }

    fn holds(&self, s: &CircuitState, atom: usize) -> bool {
        s.outputs[atom]
    }
}

/// Trace spelled by a lasso of Kripke states.
pub fn lasso_trace<K: Kripke>(k: &K, prefix: &[K::State], cycle: &[K::State]) -> Trace {
    Trace::new(
        prefix.iter().map(|s| k.label(s)).collect(),
        cycle.iter().map(|s| k.label(s)).collect(),
    )
}
