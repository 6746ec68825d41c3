//! Explicit-state LTL model checking of safe nets (Büchi product with an SCC-based
//! emptiness check, plus bounded lasso enumeration) and the Flow-LTL pipeline.

mod buchi;
mod kripke;
mod search;

pub use buchi::{
    ltl_to_buchi, ltl_to_gba, ltl_to_tgba, simplify, to_nnf, AcceptanceSet, BuchiAutomaton, Edge, GeneralizedBuchi, Nnf, Prop,
    TransitionBuchi,
};
pub use kripke::{lasso_trace, CircuitKripke, CircuitState, Kripke, NetKripke, NetState, STUTTER};
pub use search::{bounded_lasso_search, find_accepting_lasso, Search, DEFAULT_STATE_CAP};

use std::fmt;

use crate::circuit::{encode_net, wrap_formula_for_circuit};
use crate::error::Result;
use crate::ltl::{eval_flow_ltl_oracle, FlowLtlFormula, LtlFormula};
use crate::net::{trace_of_chain, FiringSequence, FlowChain, NetStructure, PetriNetWithTransits};
use crate::transform::{map_counterexample_back, transform_formula, transform_net, InhibitorNet};

/// Outcome of checking an LTL formula on a net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LtlVerdict {
    /// Every trace satisfies the formula; `states` product states were explored.
    Verified { states: usize },
    /// A firing sequence whose trace violates the formula.
    Counterexample(FiringSequence),
    /// The state cap was reached before a decision.
    Inconclusive { cap: usize },
}

impl LtlVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, LtlVerdict::Verified { .. })
    }

    pub fn is_counterexample(&self) -> bool {
        matches!(self, LtlVerdict::Counterexample(_))
    }
}

/// Checks `phi` on every trace of `net` (finite firing sequences stutter their last marking).
pub fn check_ltl<N: NetStructure>(net: &N, phi: &LtlFormula, cap: usize) -> LtlVerdict {
    let k = NetKripke::new(net.pt());
    let ba = ltl_to_tgba(&LtlFormula::not(phi.clone()));
    match find_accepting_lasso(&k, &ba, cap) {
        Search::Empty { states } => LtlVerdict::Verified { states },
        Search::Exceeded { cap } => LtlVerdict::Inconclusive { cap },
        Search::Lasso { prefix, cycle } => LtlVerdict::Counterexample(k.to_sequence(&prefix, &cycle)),
    }
}

/// Enumerates lassos of at most `bound` trace positions and returns the first whose
/// trace violates `phi`.
pub fn bmc_search<N: NetStructure>(net: &N, phi: &LtlFormula, bound: usize) -> Option<FiringSequence> {
    let k = NetKripke::new(net.pt());
    bounded_lasso_search(&k, phi, bound).map(|(prefix, cycle)| k.to_sequence(&prefix, &cycle))
}

/// Search strategy of the Flow-LTL pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Büchi product with an SCC-based emptiness check, up to `cap` product states.
    Explicit { cap: usize },
    /// Lasso enumeration up to `bound` positions of the reduced net. Never verifies.
    Bmc { bound: usize },
}

impl Default for Engine {
    fn default() -> Self {
        Engine::Explicit { cap: DEFAULT_STATE_CAP }
    }
}

/// A violation found on the reduced net together with its reading on the original net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub transformed: FiringSequence,
    pub original: FiringSequence,
    /// Chain tracked by each flow subformula, in textual order.
    pub chains: Vec<Option<FlowChain>>,
    /// Whether the direct semantics rejects the formula on `original`.
    pub oracle_confirmed: bool,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "transformed lasso ({} steps):", self.transformed.len())?;
        writeln!(f, "  {}", self.transformed)?;
        let (prefix, period) = match self.original.lasso_start {
            Some(l) => (l, self.original.len() - l),
            None => (self.original.len(), 0),
        };
        writeln!(f, "original sequence (prefix {prefix}, period {period}):")?;
        writeln!(f, "  {}", self.original)?;
        for (i, c) in self.chains.iter().enumerate() {
            match c {
                None => writeln!(f, "chain {}: none started", i + 1)?,
                Some(c) => {
                    writeln!(f, "chain {}: {}", i + 1, c.elements().join(" "))?;
                    writeln!(f, "  trace: {}", trace_of_chain(c))?;
                }
            }
        }
        write!(f, "oracle confirmed: {}", self.oracle_confirmed)
    }
}

/// Outcome of the Flow-LTL pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowVerdict {
    Verified,
    Counterexample(Box<Counterexample>),
    /// No decision: the state cap was hit or the bounded search found nothing.
    Inconclusive(String),
}

impl FlowVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            FlowVerdict::Verified => "verified",
            FlowVerdict::Counterexample(_) => "counterexample",
            FlowVerdict::Inconclusive(_) => "inconclusive",
        }
    }
}

/// Everything the pipeline produced on the way to its verdict.
#[derive(Debug, Clone)]
pub struct FlowCheck {
    pub tnet: InhibitorNet,
    pub formula: LtlFormula,
    pub verdict: FlowVerdict,
}

/// Reduces `phi` on `net` to LTL on the inhibitor net, runs `engine`, and maps any
/// counterexample back, confirming it against the direct semantics.
pub fn check_flow_ltl_detailed(net: &PetriNetWithTransits, phi: &FlowLtlFormula, engine: Engine) -> Result<FlowCheck> {
    let n = phi.flow_subformulas().len();
    let tnet = transform_net(net, n)?;
    let formula = transform_formula(net, phi, &tnet)?;
    let found = match engine {
        Engine::Explicit { cap } => match check_ltl(&tnet, &formula, cap) {
            LtlVerdict::Verified { .. } => None,
            LtlVerdict::Inconclusive { cap } => {
                return Ok(FlowCheck {
                    tnet,
                    formula,
                    verdict: FlowVerdict::Inconclusive(format!("state cap of {cap} reached")),
                })
            }
            LtlVerdict::Counterexample(seq) => Some(seq),
        },
        Engine::Bmc { bound } => match bmc_search(&tnet, &formula, bound) {
            None => {
                return Ok(FlowCheck {
                    tnet,
                    formula,
                    verdict: FlowVerdict::Inconclusive(format!("no counterexample up to bound {bound}")),
                })
            }
            Some(seq) => Some(seq),
        },
    };
    let verdict = match found {
        None => FlowVerdict::Verified,
        Some(transformed) => {
            let (original, chains) = map_counterexample_back(&tnet, &transformed)?;
            let oracle_confirmed = !eval_flow_ltl_oracle(net, &original, phi)?;
            FlowVerdict::Counterexample(Box::new(Counterexample {
                transformed,
                original,
                chains,
                oracle_confirmed,
            }))
        }
    };
    Ok(FlowCheck { tnet, formula, verdict })
}

/// Verdict of the Flow-LTL pipeline.
pub fn check_flow_ltl(net: &PetriNetWithTransits, phi: &FlowLtlFormula, engine: Engine) -> Result<FlowVerdict> {
    Ok(check_flow_ltl_detailed(net, phi, engine)?.verdict)
}

/// Coarse verdict used to compare engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Net-level and circuit-level verdicts for the same formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub net: Verdict,
    pub circuit: Verdict,
    /// `None` when either side is inconclusive.
    pub agree: Option<bool>,
}

/// Checks `phi` on the net and `X(G(e_o -> G e_o) -> φ̃)` on its circuit encoding.
pub fn check_circuit_equivalence<N: NetStructure>(net: &N, phi: &LtlFormula, cap: usize) -> Result<EquivalenceReport> {
    let net_verdict = match check_ltl(net, phi, cap) {
        LtlVerdict::Verified { .. } => Verdict::Holds,
        LtlVerdict::Counterexample(_) => Verdict::Fails,
        LtlVerdict::Inconclusive { .. } => Verdict::Inconclusive,
    };
    let circuit = encode_net(net, &[])?;
    let k = CircuitKripke::new(&circuit);
    let ba = ltl_to_tgba(&LtlFormula::not(wrap_formula_for_circuit(phi)));
    let circuit_verdict = match find_accepting_lasso(&k, &ba, cap) {
        Search::Empty { .. } => Verdict::Holds,
        Search::Lasso { .. } => Verdict::Fails,
        Search::Exceeded { .. } => Verdict::Inconclusive,
    };
    let agree = (net_verdict != Verdict::Inconclusive && circuit_verdict != Verdict::Inconclusive)
        .then_some(net_verdict == circuit_verdict);
    Ok(EquivalenceReport {
        net: net_verdict,
        circuit: circuit_verdict,
        agree,
    })
}
