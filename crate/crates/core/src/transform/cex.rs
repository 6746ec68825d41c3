use super::{naming, InhibitorNet, PlaceRole, TransitionRole};
use crate::error::{Error, Result};
use crate::net::{
    fire, ChainAction, ChainEnd, FiringSequence, FlowChain, Marking, NetStructure, PetriNetWithTransits, PlaceId,
    TransitionId,
};

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Subnet transition simulating what `chain` does at global step `g` when `t` fires.
fn subnet_step(t: &TransitionId, chain: Option<&FlowChain>, g: usize, i: usize) -> Result<String> {
    let action = chain.map(|c| c.action_at(g)).unwrap_or(ChainAction::NotStarted);
    let bad = |what: &str| Error::InvalidSequence(format!("chain of subnet {i} {what} at step {g}"));
    Ok(match action {
        ChainAction::NotStarted | ChainAction::Idle(_) | ChainAction::Ended => naming::skip(t.as_str(), i),
        ChainAction::Start(q) => {
            if chain.map(|c| &c.start_transition) != Some(t) {
                return Err(bad("starts on a different transition"));
            }
            naming::start(t.as_str(), q.as_str(), i)
        }
        ChainAction::Move(p, q) => naming::transit(t.as_str(), p.as_str(), q.as_str(), i),
        ChainAction::Terminate(p) => naming::end(t.as_str(), p.as_str(), i),
    })
}

/// First global step from which every chain behaves periodically.
fn settle_step(seq: &FiringSequence, chains: &[Option<FlowChain>]) -> usize {
    let mut g = seq.lasso_start.unwrap_or(0);
    for c in chains.iter().flatten() {
        g = g.max(c.start_step + 1);
        match c.end {
            ChainEnd::Open => g = g.max(c.moves.last().map(|m| m.1 + 1).unwrap_or(0)),
            ChainEnd::Terminated { step } => g = g.max(step + 1),
            ChainEnd::Loop { from, .. } => g = g.max(c.moves[from].1),
        }
    }
    g
}

/// Pumps a firing sequence of the original net up to the reduced net: every original
/// step is followed by one step per subnet that follows the given chain or skips.
///
/// `chains[i]` is the chain tracked by subnet `i + 1`; `None` lets the subnet skip throughout.
/// Lassos are unrolled until the joint behaviour of sequence and chains repeats; the
/// lasso start of the result is a multiple of `n + 1`.
pub fn lift_counterexample(
    net: &PetriNetWithTransits,
    tnet: &InhibitorNet,
    seq: &FiringSequence,
    chains: &[Option<FlowChain>],
) -> Result<FiringSequence> {
    seq.validate(net)?;
    let n = tnet.subnets();
    if chains.len() != n {
        return Err(Error::Argument(format!("{} chains given for {n} subnets", chains.len())));
    }
    let (horizon, lasso) = match seq.lasso_start {
        None => (seq.len(), None),
        Some(l) => {
            let p = seq.len() - l;
            let mut period = p;
            for c in chains.iter().flatten() {
                if let ChainEnd::Loop { span, .. } = c.end {
                    period = lcm(period, span);
                }
            }
            let mut g0 = settle_step(seq, chains);
            // align with the original period so that markings match
            g0 = l + (g0 - l).div_ceil(p) * p;
            (g0 + period, Some(g0))
        }
    };
    let mut m = tnet.pt().initial_marking();
    let mut steps = Vec::with_capacity(horizon * (n + 1));
    for g in 0..horizon {
        let t = seq.transition_at(g).expect("inside horizon").clone();
        let mut names = vec![t.to_string()];
        for (k, c) in chains.iter().enumerate() {
            names.push(subnet_step(&t, c.as_ref(), g, k + 1)?);
        }
        for name in names {
            let tid = TransitionId::new(name);
            let next = fire(tnet, &m, &tid).map_err(|e| Error::InvalidSequence(format!("lifting step {g}: {e}")))?;
            steps.push((m, tid));
            m = next;
        }
    }
    let out = FiringSequence {
        steps,
        final_marking: m,
        lasso_start: lasso.map(|g0| g0 * (n + 1)),
    };
    out.validate(tnet)?;
    Ok(out)
}

fn project(tnet: &InhibitorNet, m: &Marking) -> Marking {
    Marking(
        m.iter()
            .filter(|p| {
                tnet.pt()
                    .place_index(p.as_str())
                    .is_some_and(|i| matches!(tnet.place_role(i), PlaceRole::Original(_)))
            })
            .cloned()
            .collect(),
    )
}

/// Projects a firing sequence of the reduced net back to the original net and
/// assembles the chain tracked by each subnet (`None` when the subnet never starts one).
pub fn map_counterexample_back(
    tnet: &InhibitorNet,
    tseq: &FiringSequence,
) -> Result<(FiringSequence, Vec<Option<FlowChain>>)> {
    tseq.validate(tnet)?;
    let n = tnet.subnets();
    let cycle = n + 1;
    let mut tseq = tseq.clone();
    if let Some(l) = tseq.lasso_start {
        if !(tseq.len() - l).is_multiple_of(cycle) {
            return Err(Error::InvalidSequence("lasso period is not a whole number of activation cycles".into()));
        }
        // move the lasso start forward to the next original step
        let shift = (cycle - l % cycle) % cycle;
        for k in 0..shift {
            let s = tseq.steps[l + k].clone();
            tseq.steps.push(s);
        }
        tseq.lasso_start = Some(l + shift);
        tseq.final_marking = tseq.steps[l + shift].0.clone();
    } else if !tseq.len().is_multiple_of(cycle) {
        return Err(Error::InvalidSequence("sequence ends inside an activation cycle".into()));
    }
    let role = |t: &TransitionId| -> Result<&TransitionRole> {
        tnet.pt()
            .transition_index(t.as_str())
            .map(|i| tnet.transition_role(i))
            .ok_or_else(|| Error::InvalidSequence(format!("unknown transition {t}")))
    };
    let rounds = tseq.len() / cycle;
    let mut steps = Vec::with_capacity(rounds);
    for k in 0..rounds {
        let (m, t) = &tseq.steps[k * cycle];
        if !matches!(role(t)?, TransitionRole::Original(_)) {
            return Err(Error::InvalidSequence(format!("activation out of phase at step {}", k * cycle)));
        }
        steps.push((project(tnet, m), t.clone()));
    }
    let orig = FiringSequence {
        steps,
        final_marking: project(tnet, &tseq.final_marking),
        lasso_start: tseq.lasso_start.map(|l| l / cycle),
    };
    orig.validate(tnet.original())?;

    let mut chains = Vec::with_capacity(n);
    for i in 1..=n {
        let mut chain: Option<FlowChain> = None;
        let mut from: Option<usize> = None;
        let mut periodic_moves = false;
        for k in 0..rounds {
            if Some(k) == orig.lasso_start {
                from = chain.as_ref().map(|c| c.places.len() - 1);
            }
            let (_, t) = &tseq.steps[k * cycle + i];
            let r = role(t)?;
            let bad = || Error::InvalidSequence(format!("subnet {i} moves out of phase at step {}", k * cycle + i));
            match r {
                TransitionRole::Skip { subnet, .. } if *subnet == i => {}
                TransitionRole::Start { transition, target, subnet } if *subnet == i => {
                    if chain.is_some() {
                        return Err(bad());
                    }
                    chain = Some(FlowChain {
                        start_transition: transition.clone(),
                        start_step: k,
                        places: vec![target.clone()],
                        moves: Vec::new(),
                        end: ChainEnd::Open,
                    });
                }
                TransitionRole::Transit { transition, target, subnet, .. } if *subnet == i => {
                    let c = chain.as_mut().ok_or_else(bad)?;
                    c.moves.push((transition.clone(), k));
                    c.places.push(target.clone());
                    if orig.lasso_start.is_some_and(|l| k >= l) {
                        periodic_moves = true;
                    }
                }
                TransitionRole::End { subnet, .. } if *subnet == i => {
                    let c = chain.as_mut().ok_or_else(bad)?;
                    c.end = ChainEnd::Terminated { step: k };
                }
                _ => return Err(bad()),
            }
        }
        if let (Some(c), Some(l), true) = (chain.as_mut(), orig.lasso_start, periodic_moves) {
            let from = from.ok_or_else(|| Error::InvalidSequence(format!("subnet {i} starts a chain inside the loop")))?;
            // the last move returns to the place occupied at the lasso start
            let back: PlaceId = c.places.pop().expect("periodic chains moved");
            if back != c.places[from] {
                return Err(Error::InvalidSequence(format!("chain of subnet {i} does not close its loop")));
            }
            c.end = ChainEnd::Loop { from, span: orig.len() - l };
        }
        chains.push(chain);
    }
    Ok((orig, chains))
}
